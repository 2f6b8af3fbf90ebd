//! Problem setup and the time loop.

use std::sync::Arc;

use crate::assembly::{BlockOperators, BoundaryConditions, Discretization, Loading, RhsAssembler};
use crate::basis::build_space;
use crate::dg_forms::PenaltyParams;
use crate::error::Error;
use crate::geometry::Point;
use crate::mesh::PolyMesh;
use crate::models::CoefficientField;
use crate::timestepping::{InitialData, Integrator, IntegratorConfig, Rhs, Scheme, State};

/// A discretized problem with its assembled operators.
#[derive(Debug)]
pub struct Problem {
    pub disc: Discretization,
    pub ops: BlockOperators,
}

impl Problem {
    pub fn new(
        mesh: Arc<PolyMesh>,
        degrees: &[usize],
        coeffs: CoefficientField,
        bcs: &BoundaryConditions,
        penalty: PenaltyParams,
    ) -> Result<Self, Error> {
        let space = build_space(mesh, degrees)?;
        let disc = Discretization::new(space, coeffs, bcs, penalty)?;
        let ops = BlockOperators::assemble(&disc)?;
        Ok(Problem { disc, ops })
    }

    /// Integrator dictated by the relaxation time `τ₁`.
    pub fn scheme(&self) -> Result<Scheme, Error> {
        Ok(Scheme::for_coefficients(&self.disc.coeffs)?)
    }

    pub fn n_unknowns(&self) -> usize {
        self.ops.n_u() + self.ops.n_phi()
    }

    /// L² projections of initial displacement, velocity, pressure and
    /// pressure rate.
    pub fn project_initial(
        &self,
        u: impl Fn(Point) -> Point + Sync,
        z: impl Fn(Point) -> Point + Sync,
        phi: impl Fn(Point) -> f64 + Sync,
        phi_dot: impl Fn(Point) -> f64 + Sync,
    ) -> InitialData {
        let s = &self.disc.space;
        InitialData { u: s.project_vector(u), z: s.project_vector(z), phi: s.project_scalar(phi), phi_dot: s.project_scalar(phi_dot) }
    }

    pub fn zero_initial(&self) -> InitialData {
        InitialData::zeros(self.ops.n_u(), self.ops.n_phi())
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub state: State,
    pub steps: usize,
    pub factorizations: usize,
}

/// Advance from `t0` to `t0 + cfg.t_final`, calling `observer` on the
/// initial state and after every step.
pub fn run(
    problem: &Problem,
    loading: &dyn Loading,
    init: InitialData,
    cfg: IntegratorConfig,
    t0: f64,
    mut observer: impl FnMut(&State) -> Result<(), Error>,
) -> Result<RunSummary, Error> {
    let steps = cfg.n_steps()?;
    let dt = cfg.dt;
    let mut integrator = Integrator::new(&problem.ops, problem.scheme()?, cfg)?;
    let rhs = RhsAssembler::new(&problem.disc, loading);
    let (mut f_now, mut g_now) = rhs.assemble(t0);
    let mut state = integrator.initial_state(t0, init, Rhs { f: &f_now, g: &g_now })?;
    observer(&state)?;
    for n in 0..steps {
        let t_next = t0 + (n + 1) as f64 * dt;
        let (f_next, g_next) = rhs.assemble(t_next);
        let mut next = integrator.step(&state, Rhs { f: &f_now, g: &g_now }, Rhs { f: &f_next, g: &g_next })?;
        // avoid drift of the time coordinate over many steps
        next.t = t_next;
        state = next;
        observer(&state)?;
        f_now = f_next;
        g_now = g_next;
    }
    Ok(RunSummary { state, steps, factorizations: integrator.factorizations() })
}
