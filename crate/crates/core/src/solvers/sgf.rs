use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{
    ensure_finite, ensure_finite_inputs, factorize_sgf, run_to_completion, Cycle, Formulation,
    IterationRecord, LinearSystemFactor, SolveReport, XUpdate,
};
use crate::error::{check_len, Error, Result};
use crate::model::{
    build_difference_operator, sgf_objective, sgf_split_objective, AdmmConfig, DifferenceOperator,
    GroupPartition, PenaltyConfig, SignalVector, UpdateOrder,
};
use crate::prox::{soft_threshold_in_place, sparse_group_shrink_in_place, ShrinkageThreshold};

/// Iterates of the SGF-LASSO ADMM.
#[derive(Debug, Clone, PartialEq)]
pub struct SgfSolverState {
    pub x: DVector<f64>,
    /// Copy of `x` carrying the element-wise and group penalties.
    pub u: DVector<f64>,
    /// Copy of `Dx` carrying the fusion penalty.
    pub z: DVector<f64>,
    pub rho_u: DVector<f64>,
    pub rho_z: DVector<f64>,
    pub iteration: usize,
}

/// SGF-LASSO problem bound to a measurement matrix and a factorised
/// `x`-update system. Reusable across measurement vectors.
#[derive(Debug, Clone)]
pub struct SgfSolver<'a> {
    phi: &'a DMatrix<f64>,
    partition: &'a GroupPartition,
    penalties: PenaltyConfig,
    admm: AdmmConfig,
    diff: DifferenceOperator,
    factor: Arc<LinearSystemFactor>,
    x_update: XUpdate,
    tau_e: ShrinkageThreshold,
    tau_g: ShrinkageThreshold,
    tau_f: ShrinkageThreshold,
}

impl<'a> SgfSolver<'a> {
    pub fn new(
        phi: &'a DMatrix<f64>,
        partition: &'a GroupPartition,
        penalties: PenaltyConfig,
        admm: AdmmConfig,
    ) -> Result<Self> {
        let diff = build_difference_operator(phi.ncols())?;
        let factor = Arc::new(factorize_sgf(phi, &diff, &admm)?);
        Self::with_factor(phi, partition, penalties, admm, factor)
    }

    /// Uses an existing factor, e.g. one shared by several variants solved on
    /// the same `Φ`.
    pub fn with_factor(
        phi: &'a DMatrix<f64>,
        partition: &'a GroupPartition,
        penalties: PenaltyConfig,
        admm: AdmmConfig,
        factor: Arc<LinearSystemFactor>,
    ) -> Result<Self> {
        admm.validate()?;
        let penalties = PenaltyConfig::new(penalties.lambda_e, penalties.lambda_g, penalties.lambda_f)?;
        let n = phi.ncols();
        check_len("partition vs Φ columns", n, partition.n())?;
        check_len("factor vs Φ columns", n, factor.n())?;
        if !factor.matches(Formulation::SparseGroupFused, &admm) {
            return Err(Error::param("factor", "built for a different formulation or augmentation constants"));
        }
        Ok(Self {
            phi,
            partition,
            penalties,
            admm,
            diff: build_difference_operator(n)?,
            factor,
            x_update: XUpdate::Precomputed,
            tau_e: ShrinkageThreshold::ratio(penalties.lambda_e, admm.c_u)?,
            tau_g: ShrinkageThreshold::ratio(penalties.lambda_g, admm.c_u)?,
            tau_f: ShrinkageThreshold::ratio(penalties.lambda_f, admm.c_z)?,
        })
    }

    pub fn x_update(mut self, mode: XUpdate) -> Self {
        self.x_update = mode;
        self
    }

    pub fn factor(&self) -> &Arc<LinearSystemFactor> {
        &self.factor
    }

    /// Initial state: all zeros, or `x = u = init`, `z = D·init` and zero
    /// multipliers for a warm start.
    pub fn start(&self, y: &DVector<f64>, init: Option<&SignalVector>) -> Result<SgfRun<'_>> {
        check_len("Φ rows vs y", self.phi.nrows(), y.len())?;
        ensure_finite_inputs(y, self.phi)?;
        let n = self.phi.ncols();
        let x = match init {
            Some(x0) => {
                check_len("warm start vs Φ columns", n, x0.len())?;
                x0.as_vector().clone()
            }
            None => DVector::zeros(n),
        };
        let state = SgfSolverState {
            u: x.clone(),
            z: self.diff.apply_unchecked(&x),
            x,
            rho_u: DVector::zeros(n),
            rho_z: DVector::zeros(n),
            iteration: 0,
        };
        Ok(SgfRun {
            solver: self,
            y: y.clone(),
            phi_t_y: self.phi.tr_mul(y),
            state,
        })
    }

    pub fn solve(&self, y: &DVector<f64>, init: Option<&SignalVector>) -> Result<SolveReport> {
        self.start(y, init)?.run()
    }
}

/// A running SGF-LASSO ADMM; step it manually or [`run`](Self::run) it.
#[derive(Debug, Clone)]
pub struct SgfRun<'s> {
    solver: &'s SgfSolver<'s>,
    y: DVector<f64>,
    phi_t_y: DVector<f64>,
    state: SgfSolverState,
}

impl SgfRun<'_> {
    pub fn state(&self) -> &SgfSolverState {
        &self.state
    }

    /// Runs until the stopping rule fires or `max_iter` total cycles have
    /// been executed. The trace covers the cycles executed by this call.
    pub fn run(&mut self) -> Result<SolveReport> {
        let admm = self.solver.admm;
        run_to_completion(self, &admm, Formulation::SparseGroupFused)
    }

    pub fn step(&mut self) -> Result<IterationRecord> {
        let s = self.solver;
        let (c_u, c_z) = (s.admm.c_u, s.admm.c_z);
        let st = &mut self.state;
        let iteration = st.iteration + 1;

        // Φᵀy − Dᵀρ_z + c_z·Dᵀz − ρ_u + c_u·u
        let mut rhs = self.phi_t_y.clone();
        rhs -= s.diff.apply_transpose_unchecked(&(&st.rho_z - &st.z * c_z));
        rhs -= &st.rho_u;
        rhs.axpy(c_u, &st.u, 1.0);
        let x_new = match s.x_update {
            XUpdate::Precomputed => s.factor.solve(&rhs),
            XUpdate::Refactorize => factorize_sgf(s.phi, &s.diff, &s.admm)?.solve(&rhs),
        };

        let source = match s.admm.order {
            UpdateOrder::GaussSeidel => &x_new,
            UpdateOrder::Jacobi => &st.x,
        };
        let mut u = source + &st.rho_u / c_u;
        for r in s.partition.ranges() {
            sparse_group_shrink_in_place(&mut u.as_mut_slice()[r], s.tau_e, s.tau_g);
        }
        let mut z = s.diff.apply_unchecked(source) + &st.rho_z / c_z;
        soft_threshold_in_place(z.as_mut_slice(), s.tau_f);

        let dx_new = s.diff.apply_unchecked(&x_new);
        let u_gap = &x_new - &u;
        let z_gap = &dx_new - &z;
        st.rho_u.axpy(c_u, &u_gap, 1.0);
        st.rho_z.axpy(c_z, &z_gap, 1.0);

        let step = (&x_new - &st.x).norm();
        st.x = x_new;
        st.u = u;
        st.z = z;
        st.iteration = iteration;
        ensure_finite(iteration, &[&st.x, &st.u, &st.z, &st.rho_u, &st.rho_z])?;

        Ok(IterationRecord {
            objective: sgf_objective(&st.x, &self.y, s.phi, s.partition, &s.penalties)?,
            split_objective: sgf_split_objective(&st.x, &self.y, s.phi, s.partition, &s.penalties)?,
            group_residual: u_gap.norm(),
            fusion_residual: z_gap.norm(),
            step,
        })
    }
}

impl Cycle for SgfRun<'_> {
    fn step(&mut self) -> Result<IterationRecord> {
        SgfRun::step(self)
    }

    fn iterate(&self) -> &DVector<f64> {
        &self.state.x
    }

    fn iteration(&self) -> usize {
        self.state.iteration
    }
}

/// Solves SGF-LASSO from a zero (or warm) start with a freshly factorised
/// `x`-update system.
pub fn sgf_admm_solve(
    y: &DVector<f64>,
    phi: &DMatrix<f64>,
    partition: &GroupPartition,
    penalties: &PenaltyConfig,
    admm: &AdmmConfig,
    init: Option<&SignalVector>,
) -> Result<SolveReport> {
    SgfSolver::new(phi, partition, *penalties, *admm)?.solve(y, init)
}
