//! Discrete energy diagnostics.

use crate::assembly::{
    assemble_diffusion, assemble_div, assemble_elasticity, assemble_mass, BlockOperators, Discretization, Loading, Parts,
};
use crate::error::Error;
use crate::simulation::{run, Problem};
use crate::solver::SparseLu;
use crate::sparse::CsrMatrix;
use crate::timestepping::{discrete_energy, InitialData, IntegratorConfig, State};

/// Squared norms of one state; `total` is the energy conserved or
/// dissipated by the integrator (see [`EnergyNorms::total`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    /// `‖√ρ u̇_h‖²`.
    pub kinetic: f64,
    /// `‖u_h‖²_{dG,e}`.
    pub elastic: f64,
    /// `‖u_h‖²_{dG,δ}`.
    pub viscous: f64,
    /// `‖√(τ₂τ₁d₀) φ_h‖²`.
    pub relaxation: f64,
    /// `‖φ_h‖²_{dG,φ}`.
    pub diffusion: f64,
    pub total: f64,
}

impl EnergyRow {
    pub const CSV_HEADER: &'static str = "t,kinetic,elastic_dg,viscous_dg,relaxation,diffusion_dg,total";

    pub fn csv(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.t, self.kinetic, self.elastic, self.viscous, self.relaxation, self.diffusion, self.total
        )
    }
}

/// Norm matrices assembled once per discretization.
#[derive(Debug)]
pub struct EnergyNorms {
    elastic: CsrMatrix,
    viscous: CsrMatrix,
    relaxation: CsrMatrix,
    diffusion: CsrMatrix,
    relaxed: Option<Relaxed>,
}

/// Uniform relaxation time `τ = τ₁ = τ₂` and the factored diffusion
/// operator, which together give the flux part of the energy.
#[derive(Debug)]
struct Relaxed {
    tau: f64,
    diffusion: SparseLu,
}

impl EnergyNorms {
    pub fn new(d: &Discretization) -> Result<Self, Error> {
        let elastic = CsrMatrix::combine(&[
            (1.0, &assemble_elasticity(d, false, Parts::Norm)?),
            (1.0, &assemble_div(d, false, Parts::Norm)?),
        ]);
        let viscous = CsrMatrix::combine(&[
            (1.0, &assemble_elasticity(d, true, Parts::Norm)?),
            (1.0, &assemble_div(d, true, Parts::Norm)?),
        ]);
        let w: Vec<f64> = d.coeffs.materials.iter().map(|m| m.tau1 * m.tau2 * m.d0).collect();
        let relaxation = assemble_mass(&d.space, &w, false);
        let diffusion = assemble_diffusion(d, Parts::Norm)?;
        let tau = d.coeffs.materials.first().map_or(0.0, |m| m.tau1);
        let uniform = tau > 0.0 && d.coeffs.materials.iter().all(|m| m.tau1 == tau && m.tau2 == tau);
        let relaxed = if uniform {
            SparseLu::factor(&assemble_diffusion(d, Parts::Full)?).ok().map(|diffusion| Relaxed { tau, diffusion })
        } else {
            None
        };
        Ok(EnergyNorms { elastic, viscous, relaxation, diffusion, relaxed })
    }

    /// Total discrete energy. With a uniform relaxation time `τ = τ₁ = τ₂`
    /// the pressure equation reads `(1 + τ∂t)(M_φ φ̇ + C u̇) + A_φ φ = 0`,
    /// and `r = M_φ Φ̇ + C Z` plays the role of the relaxed flux divergence:
    ///
    /// `E = ½ ZᵀM_u Z + ½ UᵀA_u U + ½ ΦᵀM_φ Φ + ½ τ rᵀA_φ⁻¹ r`.
    ///
    /// Without forcing it is non-increasing along the exact solution and
    /// along the trapezoidal Newmark steps. Otherwise this falls back to
    /// [`discrete_energy`], which has the same property when `τ₁ = τ₂ = 0`
    /// or `γ = 0`.
    pub fn total(&self, ops: &BlockOperators, s: &State) -> f64 {
        if let (Some(relaxed), Some(pd)) = (&self.relaxed, &s.phi_dot) {
            let mut r = ops.mass_phi.mul_vec(pd);
            ops.coupling.mul_add(1.0, &s.z, &mut r);
            if let Ok(w) = relaxed.diffusion.solve(&r) {
                let flux: f64 = r.iter().zip(&w).map(|(a, b)| a * b).sum();
                return 0.5 * (ops.mass_u.quad_form(&s.z) + ops.elastic.quad_form(&s.u) + ops.div.quad_form(&s.u))
                    + 0.5 * ops.mass_phi.quad_form(&s.phi)
                    + 0.5 * relaxed.tau * flux;
            }
        }
        discrete_energy(ops, s)
    }

    /// Squared dG norm `‖u_h‖²_{dG,e}` of a displacement vector.
    pub fn elastic_norm_sq(&self, u: &[f64]) -> f64 {
        self.elastic.quad_form(u)
    }

    /// Squared dG norm `‖φ_h‖²_{dG,φ}` of a pressure vector.
    pub fn diffusion_norm_sq(&self, phi: &[f64]) -> f64 {
        self.diffusion.quad_form(phi)
    }

    pub fn row(&self, ops: &BlockOperators, s: &State) -> EnergyRow {
        EnergyRow {
            t: s.t,
            kinetic: ops.mass_u.quad_form(&s.z),
            elastic: self.elastic.quad_form(&s.u),
            viscous: self.viscous.quad_form(&s.u),
            relaxation: self.relaxation.quad_form(&s.phi),
            diffusion: self.diffusion.quad_form(&s.phi),
            total: self.total(ops, s),
        }
    }
}

/// Energy rows of a run, one per time level.
#[derive(Debug, Clone, Default)]
pub struct EnergyTrace {
    pub rows: Vec<EnergyRow>,
}

impl EnergyTrace {
    pub fn push(&mut self, row: EnergyRow) {
        self.rows.push(row);
    }

    /// Steps whose total energy exceeds the previous one by more than `rel`
    /// relative to the larger of the two (absolute when both vanish).
    pub fn growth_violations(&self, rel: f64) -> Vec<usize> {
        self.rows
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].total - w[0].total > rel * w[0].total.abs().max(w[1].total.abs()).max(f64::MIN_POSITIVE))
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Largest relative change of the total energy between consecutive steps.
    pub fn max_relative_change(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| {
                let scale = w[0].total.abs().max(w[1].total.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (w[1].total - w[0].total).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(EnergyRow::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }
}

/// Run a problem and record the energy of every time level.
pub fn energy_trace(
    problem: &Problem,
    loading: &dyn Loading,
    init: InitialData,
    cfg: IntegratorConfig,
) -> Result<EnergyTrace, Error> {
    let norms = EnergyNorms::new(&problem.disc)?;
    let mut trace = EnergyTrace::default();
    run(problem, loading, init, cfg, 0.0, |s| {
        trace.push(norms.row(&problem.ops, s));
        Ok(())
    })?;
    Ok(trace)
}
