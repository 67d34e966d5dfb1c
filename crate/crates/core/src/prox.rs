//! Closed-form shrinkage operators.
//!
//! * [`soft_threshold`] is the prox of `τ‖·‖₁`,
//! * [`block_shrink`] is the prox of `τ‖·‖₂`,
//! * [`sparse_group_shrink`] is the prox of `τₑ‖·‖₁ + τ_g‖·‖₂`, obtained by
//!   composing the two.

use crate::error::{Error, Result};

/// A non-negative, finite shrinkage threshold (penalty weight over the
/// augmentation constant).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ShrinkageThreshold(f64);

impl ShrinkageThreshold {
    pub const ZERO: Self = Self(0.0);

    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau >= 0.0 {
            Ok(Self(tau))
        } else {
            Err(Error::param("tau", format!("threshold must be finite and >= 0, got {tau}")))
        }
    }

    /// `weight / scale`, e.g. `λ_e / c_u`.
    pub fn ratio(weight: f64, scale: f64) -> Result<Self> {
        Self::new(weight / scale)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `sign(v)·(|v| − τ)₊`, element-wise.
pub fn soft_threshold(v: &[f64], tau: ShrinkageThreshold) -> Vec<f64> {
    let mut out = v.to_vec();
    soft_threshold_in_place(&mut out, tau);
    out
}

pub fn soft_threshold_in_place(v: &mut [f64], tau: ShrinkageThreshold) {
    let t = tau.0;
    for a in v.iter_mut() {
        let mag = a.abs() - t;
        *a = if mag > 0.0 { mag.copysign(*a) } else { 0.0 };
    }
}

/// `(1 − τ/‖v‖₂)₊ · v`; the zero vector when `‖v‖₂ ≤ τ`.
pub fn block_shrink(v: &[f64], tau: ShrinkageThreshold) -> Vec<f64> {
    let mut out = v.to_vec();
    block_shrink_in_place(&mut out, tau);
    out
}

pub fn block_shrink_in_place(v: &mut [f64], tau: ShrinkageThreshold) {
    if tau.0 == 0.0 {
        return;
    }
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm <= tau.0 {
        v.fill(0.0);
    } else {
        let scale = 1.0 - tau.0 / norm;
        v.iter_mut().for_each(|a| *a *= scale);
    }
}

/// Prox of `τₑ‖u‖₁ + τ_g‖u‖₂`: soft thresholding followed by block shrinkage.
pub fn sparse_group_shrink(
    v: &[f64],
    tau_e: ShrinkageThreshold,
    tau_g: ShrinkageThreshold,
) -> Vec<f64> {
    let mut out = v.to_vec();
    sparse_group_shrink_in_place(&mut out, tau_e, tau_g);
    out
}

pub fn sparse_group_shrink_in_place(
    v: &mut [f64],
    tau_e: ShrinkageThreshold,
    tau_g: ShrinkageThreshold,
) {
    soft_threshold_in_place(v, tau_e);
    block_shrink_in_place(v, tau_g);
}
