use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{
    ensure_finite, ensure_finite_inputs, factorize_lgf, run_to_completion, Cycle, Formulation,
    IterationRecord, LinearSystemFactor, SolveReport, XUpdate,
};
use crate::error::{check_len, Error, Result};
use crate::model::{
    build_difference_operator, lgf_objective, AdmmConfig, DifferenceOperator,
    LatentGroupLayout, PenaltyConfig, SignalVector, UpdateOrder,
};
use crate::prox::{block_shrink_in_place, soft_threshold_in_place, ShrinkageThreshold};

/// Iterates of the LGF-LASSO ADMM. `u_tilde` and `rho_u_tilde` live in the
/// layout's stacked group space.
#[derive(Debug, Clone, PartialEq)]
pub struct LgfSolverState {
    pub x: DVector<f64>,
    pub u_tilde: DVector<f64>,
    pub z: DVector<f64>,
    pub rho_u_tilde: DVector<f64>,
    pub rho_z: DVector<f64>,
    pub iteration: usize,
}

#[derive(Debug, Clone)]
pub struct LgfSolver<'a> {
    phi: &'a DMatrix<f64>,
    layout: &'a LatentGroupLayout,
    penalties: PenaltyConfig,
    admm: AdmmConfig,
    diff: DifferenceOperator,
    factor: Arc<LinearSystemFactor>,
    x_update: XUpdate,
    tau_g: ShrinkageThreshold,
    tau_f: ShrinkageThreshold,
}

impl<'a> LgfSolver<'a> {
    /// `penalties.lambda_e` is ignored: the formulation has no element-wise term.
    pub fn new(
        phi: &'a DMatrix<f64>,
        layout: &'a LatentGroupLayout,
        penalties: PenaltyConfig,
        admm: AdmmConfig,
    ) -> Result<Self> {
        let diff = build_difference_operator(phi.ncols())?;
        let factor = Arc::new(factorize_lgf(phi, &diff, layout, &admm)?);
        Self::with_factor(phi, layout, penalties, admm, factor)
    }

    pub fn with_factor(
        phi: &'a DMatrix<f64>,
        layout: &'a LatentGroupLayout,
        penalties: PenaltyConfig,
        admm: AdmmConfig,
        factor: Arc<LinearSystemFactor>,
    ) -> Result<Self> {
        admm.validate()?;
        let penalties = PenaltyConfig::new(0.0, penalties.lambda_g, penalties.lambda_f)?;
        let n = phi.ncols();
        check_len("layout vs Φ columns", n, layout.n())?;
        check_len("factor vs Φ columns", n, factor.n())?;
        if !factor.matches(Formulation::LatentGroupFused, &admm) {
            return Err(Error::param("factor", "built for a different formulation or augmentation constants"));
        }
        Ok(Self {
            phi,
            layout,
            penalties,
            admm,
            diff: build_difference_operator(n)?,
            factor,
            x_update: XUpdate::Precomputed,
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

    pub fn start(&self, y: &DVector<f64>, init: Option<&SignalVector>) -> Result<LgfRun<'_>> {
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
        let state = LgfSolverState {
            u_tilde: self.layout.gather_unchecked(&x),
            z: self.diff.apply_unchecked(&x),
            x,
            rho_u_tilde: DVector::zeros(self.layout.stacked_len()),
            rho_z: DVector::zeros(n),
            iteration: 0,
        };
        Ok(LgfRun {
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

#[derive(Debug, Clone)]
pub struct LgfRun<'s> {
    solver: &'s LgfSolver<'s>,
    y: DVector<f64>,
    phi_t_y: DVector<f64>,
    state: LgfSolverState,
}

impl LgfRun<'_> {
    pub fn state(&self) -> &LgfSolverState {
        &self.state
    }

    pub fn run(&mut self) -> Result<SolveReport> {
        let admm = self.solver.admm;
        run_to_completion(self, &admm, Formulation::LatentGroupFused)
    }

    pub fn step(&mut self) -> Result<IterationRecord> {
        let s = self.solver;
        let (c_u, c_z) = (s.admm.c_u, s.admm.c_z);
        let st = &mut self.state;
        let iteration = st.iteration + 1;

        // Φᵀy − Dᵀρ_z + c_z·Dᵀz − Wᵀ(ρ_ũ − c_u·ũ)
        let mut rhs = self.phi_t_y.clone();
        rhs -= s.diff.apply_transpose_unchecked(&(&st.rho_z - &st.z * c_z));
        rhs -= s.layout.scatter_add_unchecked(&(&st.rho_u_tilde - &st.u_tilde * c_u));
        let x_new = match s.x_update {
            XUpdate::Precomputed => s.factor.solve(&rhs),
            XUpdate::Refactorize => factorize_lgf(s.phi, &s.diff, s.layout, &s.admm)?.solve(&rhs),
        };

        let source = match s.admm.order {
            UpdateOrder::GaussSeidel => &x_new,
            UpdateOrder::Jacobi => &st.x,
        };
        let mut u_tilde = s.layout.gather_unchecked(source) + &st.rho_u_tilde / c_u;
        for i in 0..s.layout.num_groups() {
            block_shrink_in_place(&mut u_tilde.as_mut_slice()[s.layout.stacked_group(i)], s.tau_g);
        }
        let mut z = s.diff.apply_unchecked(source) + &st.rho_z / c_z;
        soft_threshold_in_place(z.as_mut_slice(), s.tau_f);

        let u_gap = s.layout.gather_unchecked(&x_new) - &u_tilde;
        let z_gap = s.diff.apply_unchecked(&x_new) - &z;
        st.rho_u_tilde.axpy(c_u, &u_gap, 1.0);
        st.rho_z.axpy(c_z, &z_gap, 1.0);

        let step = (&x_new - &st.x).norm();
        st.x = x_new;
        st.u_tilde = u_tilde;
        st.z = z;
        st.iteration = iteration;
        ensure_finite(iteration, &[&st.x, &st.u_tilde, &st.z, &st.rho_u_tilde, &st.rho_z])?;

        let objective = lgf_objective(&st.x, &self.y, s.phi, s.layout, &s.penalties)?;
        Ok(IterationRecord {
            objective,
            split_objective: objective,
            group_residual: u_gap.norm(),
            fusion_residual: z_gap.norm(),
            step,
        })
    }
}

impl Cycle for LgfRun<'_> {
    fn step(&mut self) -> Result<IterationRecord> {
        LgfRun::step(self)
    }

    fn iterate(&self) -> &DVector<f64> {
        &self.state.x
    }

    fn iteration(&self) -> usize {
        self.state.iteration
    }
}

pub fn lgf_admm_solve(
    y: &DVector<f64>,
    phi: &DMatrix<f64>,
    layout: &LatentGroupLayout,
    penalties: &PenaltyConfig,
    admm: &AdmmConfig,
    init: Option<&SignalVector>,
) -> Result<SolveReport> {
    LgfSolver::new(phi, layout, *penalties, *admm)?.solve(y, init)
}
