use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Penalty weights for the element-wise, group and fusion terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub lambda_e: f64,
    pub lambda_g: f64,
    pub lambda_f: f64,
}

impl PenaltyConfig {
    pub fn new(lambda_e: f64, lambda_g: f64, lambda_f: f64) -> Result<Self> {
        for (name, v) in [("lambda_e", lambda_e), ("lambda_g", lambda_g), ("lambda_f", lambda_f)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self {
            lambda_e,
            lambda_g,
            lambda_f,
        })
    }
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            lambda_e: 0.5,
            lambda_g: 5.0,
            lambda_f: 3.0,
        }
    }
}

/// Order of the sub-steps inside one ADMM cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateOrder {
    /// `u` and `z` are computed from the freshly updated `x`.
    #[default]
    GaussSeidel,
    /// `u` and `z` are computed from the previous `x`. This variant is not
    /// guaranteed to converge and typically diverges on realistic problems.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmConfig {
    pub c_u: f64,
    pub c_z: f64,
    pub max_iter: usize,
    /// Threshold on `‖x⁽ⁿ⁾ − x⁽ⁿ⁻¹⁾‖₂`.
    pub tol: f64,
    pub order: UpdateOrder,
}

impl AdmmConfig {
    pub fn new(c_u: f64, c_z: f64, max_iter: usize, tol: f64) -> Result<Self> {
        let cfg = Self {
            c_u,
            c_z,
            max_iter,
            tol,
            order: UpdateOrder::GaussSeidel,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_order(mut self, order: UpdateOrder) -> Self {
        self.order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_u", self.c_u), ("c_z", self.c_z), ("tol", self.tol)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            c_u: 2.0,
            c_z: 2.0,
            max_iter: 150,
            tol: 1e-3,
            order: UpdateOrder::GaussSeidel,
        }
    }
}
