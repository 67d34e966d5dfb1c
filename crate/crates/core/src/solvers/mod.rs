//! ADMM solvers for the sparse-group fused and latent-group fused LASSO.
//!
//! Both solvers split the objective with auxiliary copies of `x` (one per
//! penalty block) and cycle through
//!
//! 1. an `x` update: a linear solve with a system matrix that depends only
//!    on `Φ`, `c_u` and `c_z`, factorised once ([`LinearSystemFactor`]);
//! 2. shrinkage updates of the auxiliary variables ([`crate::prox`]);
//! 3. dual ascent on the multipliers.
//!
//! The classical LASSO, G-LASSO, SG-LASSO and F-LASSO are obtained from the
//! SGF solver by zeroing penalties, see [`variant_config`].

mod factor;
mod lgf;
mod report;
mod sgf;
mod variant;

pub use factor::{factorize_lgf, factorize_sgf, Formulation, LinearSystemFactor};
pub use lgf::{lgf_admm_solve, LgfRun, LgfSolver, LgfSolverState};
pub use report::{IterationRecord, SolveReport};
pub use sgf::{sgf_admm_solve, SgfRun, SgfSolver, SgfSolverState};
pub use variant::{variant_config, VariantKind};

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::model::{AdmmConfig, SignalVector};

/// How the `x` update obtains its linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XUpdate {
    /// Reuse the factorisation computed at construction.
    #[default]
    Precomputed,
    /// Assemble and factorise the system matrix again on every iteration.
    /// Slow; exists as a reference for the precomputed path.
    Refactorize,
}

/// Minimum-norm least-squares solution `Φ⁺y`, usable as a warm start.
pub fn least_squares_warm_start(y: &DVector<f64>, phi: &DMatrix<f64>) -> Result<SignalVector> {
    check_len("Φ rows vs y", phi.nrows(), y.len())?;
    let pinv = phi
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::InvalidDimension(e.to_string()))?;
    SignalVector::from_vector(pinv * y)
}

/// One ADMM cycle over some formulation's state.
trait Cycle {
    fn step(&mut self) -> Result<IterationRecord>;
    fn iterate(&self) -> &DVector<f64>;
    fn iteration(&self) -> usize;
}

fn run_to_completion<C: Cycle>(
    cycle: &mut C,
    admm: &AdmmConfig,
    formulation: Formulation,
) -> Result<SolveReport> {
    let mut trace = Vec::with_capacity(admm.max_iter.min(1024));
    let mut converged = false;
    while cycle.iteration() < admm.max_iter {
        let rec = cycle.step()?;
        // the first cycle compares against the initial point, not an update
        let done = cycle.iteration() >= 2 && rec.step <= admm.tol;
        trace.push(rec);
        if done {
            converged = true;
            break;
        }
    }
    Ok(SolveReport {
        x_hat: SignalVector::from_vector(cycle.iterate().clone())?,
        iterations: trace.len(),
        converged,
        trace,
        formulation,
    })
}

fn ensure_finite(iteration: usize, vectors: &[&DVector<f64>]) -> Result<()> {
    if vectors.iter().all(|v| v.iter().all(|a| a.is_finite())) {
        Ok(())
    } else {
        Err(Error::Diverged { iteration })
    }
}

fn ensure_finite_inputs(y: &DVector<f64>, phi: &DMatrix<f64>) -> Result<()> {
    if !y.iter().all(|a| a.is_finite()) {
        return Err(Error::NonFinite("measurements"));
    }
    if !phi.iter().all(|a| a.is_finite()) {
        return Err(Error::NonFinite("measurement matrix"));
    }
    Ok(())
}
