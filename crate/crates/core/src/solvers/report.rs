use nalgebra::DVector;

use super::Formulation;
use crate::model::SignalVector;

/// Diagnostics recorded after one ADMM cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// The formulation's objective as written (SGF: `N−1`-term fusion sum,
    /// LGF: `‖Dx‖₁`).
    pub objective: f64,
    /// The objective with fusion as `‖Dx‖₁`, which is what the splitting
    /// minimises. Equal to `objective` for LGF.
    pub split_objective: f64,
    /// `‖u − x‖₂` (SGF) or `‖ũ − Wx‖₂` (LGF).
    pub group_residual: f64,
    /// `‖z − Dx‖₂`
    pub fusion_residual: f64,
    /// `‖x⁽ⁿ⁾ − x⁽ⁿ⁻¹⁾‖₂`
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x_hat: SignalVector,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
    pub formulation: Formulation,
}

impl SolveReport {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.trace.last()
    }

    pub fn final_objective(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.objective)
    }

    pub fn final_split_objective(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.split_objective)
    }

    pub fn x(&self) -> &DVector<f64> {
        self.x_hat.as_vector()
    }
}
