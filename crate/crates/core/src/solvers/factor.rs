use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_len, Error, Result};
use crate::model::{AdmmConfig, DifferenceOperator, LatentGroupLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    SparseGroupFused,
    LatentGroupFused,
}

/// Cholesky factor of the `x`-update system matrix
/// `ΦᵀΦ + c_z·DᵀD + c_u·M`, with `M = I` (SGF) or `M = WᵀW` (LGF).
///
/// Immutable once built; share it behind an `Arc` across solves on the same
/// `Φ` and augmentation constants.
#[derive(Debug, Clone)]
pub struct LinearSystemFactor {
    matrix: DMatrix<f64>,
    cholesky: Cholesky<f64, Dyn>,
    formulation: Formulation,
    c_u: f64,
    c_z: f64,
}

impl LinearSystemFactor {
    fn new(matrix: DMatrix<f64>, formulation: Formulation, admm: &AdmmConfig) -> Result<Self> {
        let cholesky = Cholesky::new(matrix.clone())
            .ok_or(Error::NotPositiveDefinite("x-update system matrix"))?;
        Ok(Self {
            matrix,
            cholesky,
            formulation,
            c_u: admm.c_u,
            c_z: admm.c_z,
        })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.cholesky.solve(b)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    /// Whether this factor was built for the given augmentation constants.
    pub fn matches(&self, formulation: Formulation, admm: &AdmmConfig) -> bool {
        self.formulation == formulation && self.c_u == admm.c_u && self.c_z == admm.c_z
    }
}

fn base_matrix(phi: &DMatrix<f64>, d: &DifferenceOperator, admm: &AdmmConfig) -> Result<DMatrix<f64>> {
    admm.validate()?;
    check_len("Φ columns vs D", d.n(), phi.ncols())?;
    if !phi.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("measurement matrix"));
    }
    Ok(phi.tr_mul(phi) + d.gram() * admm.c_z)
}

/// Factorises `ΦᵀΦ + c_z·DᵀD + c_u·I`.
pub fn factorize_sgf(
    phi: &DMatrix<f64>,
    d: &DifferenceOperator,
    admm: &AdmmConfig,
) -> Result<LinearSystemFactor> {
    let mut a = base_matrix(phi, d, admm)?;
    for j in 0..d.n() {
        a[(j, j)] += admm.c_u;
    }
    LinearSystemFactor::new(a, Formulation::SparseGroupFused, admm)
}

/// Factorises `ΦᵀΦ + c_z·DᵀD + c_u·WᵀW`, where `WᵀW` is the diagonal of
/// group membership counts.
pub fn factorize_lgf(
    phi: &DMatrix<f64>,
    d: &DifferenceOperator,
    layout: &LatentGroupLayout,
    admm: &AdmmConfig,
) -> Result<LinearSystemFactor> {
    check_len("layout vs D", d.n(), layout.n())?;
    let counts = layout.membership_counts();
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(Error::InvalidLayout(format!("index {j} is not covered by any group")));
    }
    let mut a = base_matrix(phi, d, admm)?;
    for (j, &c) in counts.iter().enumerate() {
        a[(j, j)] += admm.c_u * c as f64;
    }
    LinearSystemFactor::new(a, Formulation::LatentGroupFused, admm)
}
