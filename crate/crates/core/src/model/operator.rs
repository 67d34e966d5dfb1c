use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};

/// The N×N upper-bidiagonal first-difference matrix.
///
/// Rows `0..N-1` hold `-1` on the diagonal and `+1` on the superdiagonal, so
/// `(Dx)_j = x_{j+1} - x_j`. The last row keeps `x_{N-1}` (diagonal `+1`),
/// which makes `D` invertible. Never stored densely unless asked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifferenceOperator {
    n: usize,
}

pub fn build_difference_operator(n: usize) -> Result<DifferenceOperator> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "difference operator needs n >= 2, got {n}"
        )));
    }
    Ok(DifferenceOperator { n })
}

impl DifferenceOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of structurally nonzero entries (`2N - 1`).
    pub fn nnz(&self) -> usize {
        2 * self.n - 1
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("D·x", self.n, x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |j, _| if j + 1 < n { x[j + 1] - x[j] } else { x[n - 1] })
    }

    pub fn apply_transpose(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("Dᵀ·z", self.n, z.len())?;
        Ok(self.apply_transpose_unchecked(z))
    }

    // (Dᵀz)_0 = -z_0, (Dᵀz)_j = z_{j-1} - z_j for 0 < j < N-1, (Dᵀz)_{N-1} = z_{N-2} + z_{N-1}
    pub(crate) fn apply_transpose_unchecked(&self, z: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |j, _| {
            let own = if j + 1 < n { -z[j] } else { z[j] };
            if j == 0 {
                own
            } else {
                z[j - 1] + own
            }
        })
    }

    /// Solves `D x = b` by back substitution.
    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("D⁻¹·b", self.n, b.len())?;
        let n = self.n;
        let mut x = DVector::zeros(n);
        x[n - 1] = b[n - 1];
        for j in (0..n - 1).rev() {
            x[j] = x[j + 1] - b[j];
        }
        Ok(x)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut d = DMatrix::zeros(n, n);
        for j in 0..n - 1 {
            d[(j, j)] = -1.0;
            d[(j, j + 1)] = 1.0;
        }
        d[(n - 1, n - 1)] = 1.0;
        d
    }

    /// `DᵀD`, tridiagonal with diagonal `[1, 2, …, 2]` and off-diagonal `-1`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut g = DMatrix::zeros(n, n);
        for j in 0..n {
            g[(j, j)] = if j == 0 { 1.0 } else { 2.0 };
            if j + 1 < n {
                g[(j, j + 1)] = -1.0;
                g[(j + 1, j)] = -1.0;
            }
        }
        g
    }
}
