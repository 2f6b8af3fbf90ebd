//! Convergence sweeps over mesh size, degree, time step or solution scale.

use std::str::FromStr;
use std::sync::Arc;

use super::manufactured::{CaseKind, Manufactured};
use super::norms::{compute_errors, FieldErrors};
use crate::assembly::BoundaryConditions;
use crate::basis::uniform;
use crate::dg_forms::PenaltyParams;
use crate::error::{Error, VerificationError};
use crate::mesh::{generate_voronoi, PolyMesh, Rect};
use crate::models::{CoefficientField, Material};
use crate::simulation::{run, Problem};
use crate::timestepping::IntegratorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Mesh refinement at fixed degree.
    H,
    /// Degree increase on a fixed mesh.
    Degree,
    /// Time-step halving.
    TimeStep,
    /// Pressure magnitude `ν_φ` on a fixed discretization.
    Nu,
}

impl FromStr for SweepKind {
    type Err = VerificationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h" => Ok(SweepKind::H),
            "p" | "degree" => Ok(SweepKind::Degree),
            "dt" => Ok(SweepKind::TimeStep),
            "nu" => Ok(SweepKind::Nu),
            other => Err(VerificationError::Input(format!("unknown sweep kind {other:?}"))),
        }
    }
}

/// One discretization of a sweep.
#[derive(Debug, Clone)]
pub struct Level {
    pub mesh: Arc<PolyMesh>,
    pub degree: usize,
    pub dt: f64,
    pub case: CaseKind,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub material: Material,
    pub t_final: f64,
    pub levels: Vec<Level>,
    pub penalty: PenaltyParams,
    /// Newmark and θ parameters; `dt` and `t_final` are taken per level.
    pub integrator: IntegratorConfig,
}

impl SweepConfig {
    pub fn new(material: Material, t_final: f64, levels: Vec<Level>) -> Self {
        SweepConfig {
            material,
            t_final,
            levels,
            penalty: PenaltyParams::default(),
            integrator: IntegratorConfig::new(t_final, t_final),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    /// The swept parameter: `h`, `ℓ`, `Δt` or `ν_φ`.
    pub param: f64,
    pub h: f64,
    pub degree: usize,
    pub dt: f64,
    pub elements: usize,
    pub unknowns: usize,
    pub errors: FieldErrors,
}

#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub kind: SweepKind,
    pub rows: Vec<ErrorRow>,
}

/// Observed orders `log(e_i/e_{i+1}) / log(p_i/p_{i+1})` of consecutive
/// levels.
pub fn observed_rates(params: &[f64], errors: &[f64]) -> Vec<f64> {
    params
        .windows(2)
        .zip(errors.windows(2))
        .map(|(p, e)| (e[0] / e[1]).ln() / (p[0] / p[1]).ln())
        .collect()
}

/// Least-squares line through `(x_i, ln e_i)`: slope and coefficient of
/// determination.
pub fn log_linear_fit(xs: &[f64], errors: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

impl ErrorReport {
    pub fn params(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.param).collect()
    }

    /// Error column `i` (u L², u dG, φ L², φ dG).
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.errors.as_array()[i]).collect()
    }

    /// Observed orders per consecutive pair, one array per pair.
    pub fn rates(&self) -> Vec<[f64; 4]> {
        let p = self.params();
        let cols: Vec<Vec<f64>> = (0..4).map(|i| observed_rates(&p, &self.column(i))).collect();
        (0..p.len().saturating_sub(1)).map(|j| std::array::from_fn(|i| cols[i][j])).collect()
    }

    /// Slope and R² of `ln e` against the swept parameter, per column.
    pub fn log_linear(&self) -> [(f64, f64); 4] {
        let p = self.params();
        std::array::from_fn(|i| log_linear_fit(&p, &self.column(i)))
    }

    /// CSV table: swept parameter (`1/h` for mesh sweeps), each error and,
    /// for mesh and time-step sweeps, the observed order after it.
    pub fn to_csv(&self) -> String {
        let names = ["u_l2", "u_dg", "phi_l2", "phi_dg"];
        let with_rates = matches!(self.kind, SweepKind::H | SweepKind::TimeStep);
        let first = match self.kind {
            SweepKind::H => "inv_h",
            SweepKind::Degree => "degree",
            SweepKind::TimeStep => "dt",
            SweepKind::Nu => "nu_phi",
        };
        let mut head = vec![first.to_string()];
        for n in names {
            head.push(n.to_string());
            if with_rates {
                head.push(format!("roc_{n}"));
            }
        }
        let mut out = head.join(",");
        out.push('\n');
        let rates = self.rates();
        for (j, r) in self.rows.iter().enumerate() {
            let p = if self.kind == SweepKind::H { 1.0 / r.param } else { r.param };
            let mut cells = vec![format!("{p}")];
            for (i, e) in r.errors.as_array().iter().enumerate() {
                cells.push(format!("{e:.6e}"));
                if with_rates {
                    cells.push(if j == 0 { "-".into() } else { format!("{:.3}", rates[j - 1][i]) });
                }
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Voronoi meshes of the unit square with the given element counts.
pub fn voronoi_levels(counts: &[usize], lloyd_iterations: usize, seed: u64) -> Result<Vec<Arc<PolyMesh>>, Error> {
    counts
        .iter()
        .map(|&n| Ok(Arc::new(generate_voronoi(Rect::unit(), n, lloyd_iterations, seed)?)))
        .collect()
}

/// Solve one manufactured problem and measure the final-time errors.
pub fn solve_level(cfg: &SweepConfig, level: &Level) -> Result<ErrorRow, Error> {
    let exact = Manufactured::new(level.case, cfg.material);
    let mesh = level.mesh.clone();
    let coeffs = CoefficientField::uniform(mesh.n_elements(), cfg.material);
    let problem = Problem::new(
        mesh.clone(),
        &uniform(&mesh, level.degree),
        coeffs,
        &BoundaryConditions::all_dirichlet(),
        cfg.penalty,
    )?;
    let init = problem.project_initial(
        |x| exact.u(x, 0.0)[0],
        |x| exact.u(x, 0.0)[1],
        |x| exact.phi(x, 0.0)[0],
        |x| exact.phi(x, 0.0)[1],
    );
    let integrator = IntegratorConfig { dt: level.dt, t_final: cfg.t_final, ..cfg.integrator.clone() };
    let summary = run(&problem, &exact, init, integrator, 0.0, |_| Ok(()))?;
    let s = &summary.state;
    let errors = compute_errors(&problem.disc, &s.u, &s.phi, &exact, s.t);
    Ok(ErrorRow {
        param: 0.0,
        h: mesh.h(),
        degree: level.degree,
        dt: level.dt,
        elements: mesh.n_elements(),
        unknowns: problem.n_unknowns(),
        errors,
    })
}

/// Run every level in order, reporting each finished row to `on_row`.
pub fn convergence_sweep(
    kind: SweepKind,
    cfg: &SweepConfig,
    mut on_row: impl FnMut(&ErrorRow),
) -> Result<ErrorReport, Error> {
    let need = if kind == SweepKind::Nu { 2 } else { 3 };
    if cfg.levels.len() < need {
        return Err(VerificationError::InsufficientLevels { need, got: cfg.levels.len() }.into());
    }
    let mut rows = Vec::with_capacity(cfg.levels.len());
    for (i, level) in cfg.levels.iter().enumerate() {
        let mut row =
            solve_level(cfg, level).map_err(|e| VerificationError::Level { level: i, source: Box::new(e) })?;
        row.param = match kind {
            SweepKind::H => row.h,
            SweepKind::Degree => level.degree as f64,
            SweepKind::TimeStep => level.dt,
            SweepKind::Nu => match level.case {
                CaseKind::Scaled { nu_phi, .. } => nu_phi,
                _ => 1.0,
            },
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(ErrorReport { kind, rows })
}
