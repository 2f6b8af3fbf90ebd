//! Physical scenarios: a thermoelastic wave from a vertical point force and
//! fluid injection into a channelized porous slice under three flow models.

use std::str::FromStr;
use std::sync::Arc;

use crate::assembly::{BoundaryConditions, FieldBc, TagCondition};
use crate::basis::{uniform, DgSpace};
use crate::dg_forms::PenaltyParams;
use crate::error::{Error, ModelError};
use crate::geometry::Point;
use crate::mesh::{PolyMesh, Rect};
use crate::models::{
    channel_raster, in_channel, mixture_density, preset, relaxation_time, CoefficientField, Material, Preset,
    SourceSpec, Wavelet, GRAIN_DENSITY, POROSITY, WATER_DENSITY,
};
use crate::simulation::{run, Problem};
use crate::timestepping::{IntegratorConfig, State};
use crate::verification::{filtration_field, relative_flow_difference, FiltrationField};

/// Area-weighted mean of a scalar dG field on every element.
pub fn element_means(space: &DgSpace, c: &[f64]) -> Vec<f64> {
    (0..space.n_elements())
        .map(|k| {
            let tab = &space.volume[k];
            let n = space.dim(k);
            let ck = &c[space.scalar_range(k)];
            let mut s = 0.0;
            for q in 0..tab.n_points() {
                let v: f64 = (0..n).map(|i| ck[i] * tab.values[q * n + i]).sum();
                s += tab.weights[q] * v;
            }
            s / space.mesh.elements[k].area
        })
        .collect()
}

/// Per element: mean of a vector dG field, root-mean-square magnitude and
/// mean divergence.
pub fn vector_element_stats(space: &DgSpace, c: &[f64]) -> (Vec<Point>, Vec<f64>, Vec<f64>) {
    let ne = space.n_elements();
    let (mut means, mut rms, mut divs) = (Vec::with_capacity(ne), Vec::with_capacity(ne), Vec::with_capacity(ne));
    for k in 0..ne {
        let tab = &space.volume[k];
        let n = space.dim(k);
        let ck = &c[space.vector_range(k)];
        let (mut m, mut s2, mut dv) = ([0.0; 2], 0.0, 0.0);
        for q in 0..tab.n_points() {
            let w = tab.weights[q];
            let mut v = [0.0; 2];
            for i in 0..n {
                v[0] += ck[i] * tab.values[q * n + i];
                v[1] += ck[n + i] * tab.values[q * n + i];
                dv += w * (ck[i] * tab.grads[q * n + i][0] + ck[n + i] * tab.grads[q * n + i][1]);
            }
            m[0] += w * v[0];
            m[1] += w * v[1];
            s2 += w * (v[0] * v[0] + v[1] * v[1]);
        }
        let a = space.mesh.elements[k].area;
        means.push([m[0] / a, m[1] / a]);
        rms.push((s2 / a).sqrt());
        divs.push(dv / a);
    }
    (means, rms, divs)
}

/// Reflection across the vertical line `x = c` or the horizontal line `y = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mirror {
    Vertical(f64),
    Horizontal(f64),
}

impl Mirror {
    pub fn apply(self, p: Point) -> Point {
        match self {
            Mirror::Vertical(c) => [2.0 * c - p[0], p[1]],
            Mirror::Horizontal(c) => [p[0], 2.0 * c - p[1]],
        }
    }
}

/// Element permutation induced by `mirror`, or `None` when the mesh is not
/// mirror symmetric.
pub fn mirror_map(mesh: &PolyMesh, mirror: Mirror) -> Option<Vec<usize>> {
    let tol = 1e-9 * mesh.h();
    mesh.elements
        .iter()
        .map(|e| {
            let target = mirror.apply(e.centroid);
            let k = mesh.locate(target)?;
            let c = mesh.elements[k].centroid;
            let matches = (c[0] - target[0]).abs() <= tol
                && (c[1] - target[1]).abs() <= tol
                && (mesh.elements[k].area - e.area).abs() <= tol * mesh.h();
            matches.then_some(k)
        })
        .collect()
}

/// `‖f - s f∘R‖ / ‖f‖` with area weights: the symmetry defect for `s = 1`,
/// the antisymmetry defect for `s = -1`. Zero fields have no defect.
pub fn reflection_defect(mesh: &PolyMesh, values: &[f64], map: &[usize], sign: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, e) in mesh.elements.iter().enumerate() {
        num += e.area * (values[k] - sign * values[map[k]]).powi(2);
        den += e.area * values[k].powi(2);
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Vertical point force in a square thermoelastic medium.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveScenario {
    /// Side of the square domain [m].
    pub side: f64,
    /// Cells per direction of the Cartesian mesh; even keeps the source on a
    /// mesh vertex.
    pub cells: usize,
    pub degree: usize,
    pub dt: f64,
    pub t_final: f64,
    pub snapshots: Vec<f64>,
    pub wavelet: Wavelet,
    /// Mollifier radius in units of the cell size.
    pub radius_cells: f64,
    pub material: Material,
}

impl Default for WaveScenario {
    fn default() -> Self {
        WaveScenario {
            side: 2310.0,
            cells: 24,
            degree: 2,
            dt: 5e-4,
            t_final: 0.5,
            snapshots: vec![0.1, 0.3, 0.5],
            wavelet: Wavelet::default(),
            radius_cells: 2.0,
            material: preset(Preset::Thermoelastic, &[]).expect("thermoelastic preset is valid"),
        }
    }
}

/// Element-wise fields of a wave run at one instant.
#[derive(Debug, Clone)]
pub struct WaveSnapshot {
    pub t: f64,
    /// Mean velocity `v_h = u̇_h`.
    pub velocity: Vec<Point>,
    /// Root-mean-square `|v_h|`.
    pub speed: Vec<f64>,
    /// Mean generalized pressure (temperature).
    pub temperature: Vec<f64>,
    /// Mean `div u_h`.
    pub divergence: Vec<f64>,
}

/// Symmetry defects of one snapshot about the vertical and horizontal lines
/// through the source, and the size of the induced temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSymmetry {
    pub t: f64,
    /// `|v_h|` symmetric about the vertical line.
    pub speed_vertical: f64,
    /// `|v_h|` symmetric about the horizontal line.
    pub speed_horizontal: f64,
    /// `v_{h,y}` antisymmetric about the horizontal line.
    pub vy_antisymmetric: f64,
    /// `v_{h,y}` symmetric about the horizontal line.
    pub vy_symmetric: f64,
    /// `v_{h,y}` symmetric about the vertical line.
    pub vy_vertical: f64,
    /// Temperature antisymmetric about the horizontal line.
    pub temperature_antisymmetric: f64,
    /// `‖T_h‖ / ‖(γ/d₀) div u_h‖`, the temperature relative to its
    /// adiabatic estimate.
    pub thermal_ratio: f64,
    /// Largest `|T_h|` element mean.
    pub max_temperature: f64,
}

#[derive(Debug, Clone)]
pub struct WaveRun {
    pub mesh: Arc<PolyMesh>,
    pub snapshots: Vec<WaveSnapshot>,
    pub symmetry: Vec<WaveSymmetry>,
    pub final_state: State,
}

impl WaveScenario {
    pub fn mesh(&self) -> Result<PolyMesh, Error> {
        Ok(PolyMesh::cartesian(Rect { x0: 0.0, y0: 0.0, x1: self.side, y1: self.side }, self.cells, self.cells)?)
    }

    pub fn source(&self) -> SourceSpec {
        let h = self.side / self.cells as f64;
        SourceSpec::PointForce {
            location: [0.5 * self.side, 0.5 * self.side],
            direction: [0.0, 1.0],
            wavelet: self.wavelet,
            radius: self.radius_cells * h,
        }
    }

    pub fn run(&self) -> Result<WaveRun, Error> {
        let mesh = Arc::new(self.mesh()?);
        let coeffs = CoefficientField::uniform(mesh.n_elements(), self.material);
        let problem = Problem::new(
            mesh.clone(),
            &uniform(&mesh, self.degree),
            coeffs,
            &BoundaryConditions::all_dirichlet(),
            PenaltyParams::default(),
        )?;
        let source = self.source();
        let space = &problem.disc.space;
        let mut snapshots = Vec::new();
        let mut pending: Vec<f64> = self.snapshots.clone();
        let tol = 0.5 * self.dt;
        let summary = run(&problem, &source, problem.zero_initial(), IntegratorConfig::new(self.dt, self.t_final), 0.0, |s| {
            if let Some(i) = pending.iter().position(|&t| (t - s.t).abs() <= tol) {
                pending.remove(i);
                let (velocity, speed, _) = vector_element_stats(space, &s.z);
                let (_, _, divergence) = vector_element_stats(space, &s.u);
                snapshots.push(WaveSnapshot { t: s.t, velocity, speed, temperature: element_means(space, &s.phi), divergence });
            }
            Ok(())
        })?;
        let c = 0.5 * self.side;
        let vertical = mirror_map(&mesh, Mirror::Vertical(c))
            .ok_or_else(|| ModelError::Scenario("wave mesh is not mirror symmetric".into()))?;
        let horizontal = mirror_map(&mesh, Mirror::Horizontal(c))
            .ok_or_else(|| ModelError::Scenario("wave mesh is not mirror symmetric".into()))?;
        let m = &self.material;
        let symmetry = snapshots
            .iter()
            .map(|s| {
                let vy: Vec<f64> = s.velocity.iter().map(|v| v[1]).collect();
                let adiabatic: Vec<f64> = s.divergence.iter().map(|d| m.gamma / m.d0 * d).collect();
                let l2 = |v: &[f64]| mesh.elements.iter().zip(v).map(|(e, x)| e.area * x * x).sum::<f64>().sqrt();
                let denom = l2(&adiabatic);
                WaveSymmetry {
                    t: s.t,
                    speed_vertical: reflection_defect(&mesh, &s.speed, &vertical, 1.0),
                    speed_horizontal: reflection_defect(&mesh, &s.speed, &horizontal, 1.0),
                    vy_antisymmetric: reflection_defect(&mesh, &vy, &horizontal, -1.0),
                    vy_symmetric: reflection_defect(&mesh, &vy, &horizontal, 1.0),
                    vy_vertical: reflection_defect(&mesh, &vy, &vertical, 1.0),
                    temperature_antisymmetric: reflection_defect(&mesh, &s.temperature, &horizontal, -1.0),
                    thermal_ratio: if denom == 0.0 { 0.0 } else { l2(&s.temperature) / denom },
                    max_temperature: s.temperature.iter().fold(0.0, |a, t| a.max(t.abs())),
                }
            })
            .collect();
        Ok(WaveRun { mesh, snapshots, symmetry, final_state: summary.state })
    }
}

/// Flow models compared on the channelized slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowModel {
    /// Static Darcy law, no coupling to the solid.
    Darcy,
    /// Darcy law with fluid acceleration, no coupling to the solid.
    Inertial,
    /// Fluid acceleration and a Kelvin-Voigt viscoelastic skeleton.
    PoroViscoelastic,
}

impl FlowModel {
    pub const ALL: [FlowModel; 3] = [FlowModel::Darcy, FlowModel::Inertial, FlowModel::PoroViscoelastic];

    pub fn name(self) -> &'static str {
        match self {
            FlowModel::Darcy => "D",
            FlowModel::Inertial => "P",
            FlowModel::PoroViscoelastic => "PVE",
        }
    }

    /// Material with isotropic diffusivity `d`.
    pub fn material(self, d: f64) -> Material {
        let tau = relaxation_time(WATER_DENSITY, POROSITY, d);
        let base = Material {
            rho: mixture_density(WATER_DENSITY, POROSITY, GRAIN_DENSITY),
            mu: 1e9,
            lambda: 4e8,
            delta1: 8e-5,
            delta2: 8e-5,
            gamma: 1.0,
            d0: 1e-9,
            diffusivity: crate::models::iso(d),
            tau1: tau,
            tau2: tau,
        };
        match self {
            FlowModel::PoroViscoelastic => base,
            FlowModel::Inertial => Material { gamma: 0.0, ..base },
            FlowModel::Darcy => Material { gamma: 0.0, tau1: 0.0, tau2: 0.0, ..base },
        }
    }
}

impl FromStr for FlowModel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "D" | "d" | "darcy" => Ok(FlowModel::Darcy),
            "P" | "p" | "inertial" => Ok(FlowModel::Inertial),
            "PVE" | "pve" | "poro-viscoelastic" => Ok(FlowModel::PoroViscoelastic),
            other => Err(ModelError::Scenario(format!("unknown flow model {other:?}"))),
        }
    }
}

/// Injection into a slice crossed by a high-diffusivity channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowScenario {
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub degree: usize,
    pub dt: f64,
    pub t_final: f64,
    pub instants: Vec<f64>,
    /// Diffusivity inside the channel and elsewhere [m²/(Pa·s)].
    pub channel: f64,
    pub background: f64,
}

impl Default for FlowScenario {
    fn default() -> Self {
        FlowScenario {
            width: 366.0,
            height: 671.0,
            nx: 12,
            ny: 44,
            degree: 2,
            dt: 4e-4,
            t_final: 1.0,
            instants: vec![0.2, 0.5, 1.0],
            channel: 2e-5,
            background: 2e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowRun {
    pub model: FlowModel,
    /// Filtration velocity at each requested instant.
    pub snapshots: Vec<(f64, FiltrationField)>,
}

/// Space-averaged relative filtration differences between two models.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDifference {
    pub a: FlowModel,
    pub b: FlowModel,
    /// Mean over elements of `‖w_a - w_b‖_K / ‖w_D‖` at each instant.
    pub mean: Vec<f64>,
    pub std_dev: Vec<f64>,
}

impl FlowScenario {
    pub fn mesh(&self) -> Result<PolyMesh, Error> {
        Ok(PolyMesh::cartesian(Rect { x0: 0.0, y0: 0.0, x1: self.width, y1: self.height }, self.nx, self.ny)?)
    }

    pub fn coefficients(&self, model: FlowModel, mesh: &PolyMesh) -> Result<CoefficientField, Error> {
        let d = channel_raster(self.nx, self.ny, self.channel, self.background).sample(mesh)?;
        let field = CoefficientField { materials: d.into_iter().map(|d| model.material(d)).collect() };
        field.validate()?;
        Ok(field)
    }

    /// Elements whose centroid lies in the channel or lens.
    pub fn channel_mask(&self, mesh: &PolyMesh) -> Vec<bool> {
        mesh.elements.iter().map(|e| in_channel(e.centroid[0] / self.width, e.centroid[1] / self.height)).collect()
    }

    pub fn run(&self, model: FlowModel) -> Result<FlowRun, Error> {
        let mesh = Arc::new(self.mesh()?);
        let coeffs = self.coefficients(model, &mesh)?;
        let bcs = BoundaryConditions::uniform(TagCondition { displacement: FieldBc::Dirichlet, pressure: FieldBc::Neumann });
        let problem = Problem::new(mesh.clone(), &uniform(&mesh, self.degree), coeffs, &bcs, PenaltyParams::default())?;
        let source = SourceSpec::channel_injection();
        let mut snapshots = Vec::new();
        let mut pending = self.instants.clone();
        let tol = 0.5 * self.dt;
        run(&problem, &source, problem.zero_initial(), IntegratorConfig::new(self.dt, self.t_final), 0.0, |s| {
            if let Some(i) = pending.iter().position(|&t| (t - s.t).abs() <= tol) {
                pending.remove(i);
                snapshots.push((s.t, filtration_field(&problem.disc.space, &s.phi, &problem.disc.coeffs)));
            }
            Ok(())
        })?;
        Ok(FlowRun { model, snapshots })
    }
}

/// Mean and standard deviation of the per-element relative differences of
/// `a` and `b`, normalized by the Darcy run `reference`.
pub fn flow_difference(a: &FlowRun, b: &FlowRun, reference: &FlowRun) -> FlowDifference {
    let mut mean = Vec::new();
    let mut std_dev = Vec::new();
    for ((wa, wb), wr) in a.snapshots.iter().zip(&b.snapshots).zip(&reference.snapshots) {
        let (per, _) = relative_flow_difference(&wa.1, &wb.1, &wr.1);
        let n = per.len() as f64;
        let m = per.iter().sum::<f64>() / n;
        mean.push(m);
        std_dev.push((per.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt());
    }
    FlowDifference { a: a.model, b: b.model, mean, std_dev }
}

/// Mean `|w_h|` inside and outside `mask`.
pub fn masked_means(w: &FiltrationField, mask: &[bool]) -> (f64, f64) {
    let mags = w.element_magnitudes();
    let mean = |inside: bool| {
        let v: Vec<f64> = mags.iter().zip(mask).filter(|(_, m)| **m == inside).map(|(x, _)| *x).collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    (mean(true), mean(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_space;

    #[test]
    fn element_means_of_polynomials() {
        let mesh = Arc::new(PolyMesh::cartesian(Rect::unit(), 3, 2).unwrap());
        let space = build_space(mesh.clone(), &uniform(&mesh, 2)).unwrap();
        let phi = space.project_scalar(|p| 2.0 * p[0] - p[1]);
        for (m, e) in element_means(&space, &phi).iter().zip(&mesh.elements) {
            assert!((m - (2.0 * e.centroid[0] - e.centroid[1])).abs() < 1e-12);
        }
        let u = space.project_vector(|p| [p[0], 3.0 * p[1]]);
        let (means, rms, divs) = vector_element_stats(&space, &u);
        for k in 0..mesh.n_elements() {
            let c = mesh.elements[k].centroid;
            assert!((means[k][0] - c[0]).abs() < 1e-12 && (means[k][1] - 3.0 * c[1]).abs() < 1e-12);
            assert!((divs[k] - 4.0).abs() < 1e-11);
            assert!(rms[k] >= (means[k][0].powi(2) + means[k][1].powi(2)).sqrt() - 1e-12);
        }
    }

    #[test]
    fn reflections_of_a_grid() {
        let mesh = PolyMesh::cartesian(Rect::unit(), 4, 2).unwrap();
        let v = mirror_map(&mesh, Mirror::Vertical(0.5)).unwrap();
        assert_eq!(v[0], 3);
        assert_eq!(v[5], 6);
        let h = mirror_map(&mesh, Mirror::Horizontal(0.5)).unwrap();
        assert_eq!(h[1], 5);
        assert!(mirror_map(&mesh, Mirror::Vertical(0.3)).is_none());
        let even: Vec<f64> = mesh.elements.iter().map(|e| (e.centroid[0] - 0.5).powi(2)).collect();
        let odd: Vec<f64> = mesh.elements.iter().map(|e| e.centroid[0] - 0.5).collect();
        assert!(reflection_defect(&mesh, &even, &v, 1.0) < 1e-14);
        assert!(reflection_defect(&mesh, &odd, &v, -1.0) < 1e-14);
        assert!((reflection_defect(&mesh, &odd, &v, 1.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn flow_models_switch_the_expected_terms() {
        let d = FlowModel::Darcy.material(2e-5);
        let p = FlowModel::Inertial.material(2e-5);
        let pve = FlowModel::PoroViscoelastic.material(2e-5);
        assert_eq!((d.gamma, d.tau1, d.tau2), (0.0, 0.0, 0.0));
        assert_eq!(p.gamma, 0.0);
        assert!((p.tau1 - 1.025e4 * 2e-5).abs() < 1e-15);
        assert_eq!((pve.gamma, pve.tau1), (1.0, p.tau1));
        for m in FlowModel::ALL {
            assert_eq!(m.name().parse::<FlowModel>().unwrap(), m);
        }
    }

    #[test]
    fn zero_wavelet_gives_zero_wave() {
        let sc = WaveScenario {
            cells: 4,
            degree: 1,
            dt: 0.01,
            t_final: 0.02,
            snapshots: vec![0.02],
            wavelet: Wavelet { amplitude: 0.0, ..Wavelet::default() },
            ..WaveScenario::default()
        };
        let r = sc.run().unwrap();
        assert_eq!(r.snapshots.len(), 1);
        assert!(r.snapshots[0].speed.iter().all(|v| *v == 0.0));
        assert_eq!(r.symmetry[0].max_temperature, 0.0);
    }
}
