//! Run configuration: a TOML file with `[mesh]`, `[coefficients]`,
//! `[sources]`, `[bc]`, `[time]` and `[output]` sections, SI units.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use polyvisco_core::assembly::{BoundaryConditions, FieldBc, TagCondition};
use polyvisco_core::geometry::Point;
use polyvisco_core::mesh::{generate_voronoi, load_mesh, PolyMesh, Rect};
use polyvisco_core::models::{
    channel_raster, iso, load_raster_field, preset, CoefficientField, InjectionWell, Material, Preset, SourceSpec, Wavelet,
    POROSITY, WATER_DENSITY,
};
use polyvisco_core::scenarios::FlowModel;
use polyvisco_core::timestepping::{IntegratorConfig, Scheme};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshConfig,
    #[serde(default)]
    pub coefficients: CoefficientConfig,
    #[serde(default)]
    pub sources: SourceConfig,
    #[serde(default)]
    pub bc: BcConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshKind {
    Voronoi,
    Cartesian,
    File,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub kind: MeshKind,
    /// `[x0, y0, x1, y1]`.
    #[serde(default = "unit_domain")]
    pub domain: [f64; 4],
    #[serde(default)]
    pub cells: usize,
    #[serde(default = "default_lloyd")]
    pub lloyd: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub nx: usize,
    #[serde(default)]
    pub ny: usize,
    pub path: Option<PathBuf>,
    #[serde(default = "default_degree")]
    pub degree: usize,
}

fn unit_domain() -> [f64; 4] {
    [0.0, 0.0, 1.0, 1.0]
}

fn default_lloyd() -> usize {
    50
}

fn default_seed() -> u64 {
    1
}

fn default_degree() -> usize {
    2
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    /// Named preset; `unified` when absent.
    pub preset: Option<String>,
    /// Flow model `D`, `P` or `PVE` driven by the diffusivity field; replaces
    /// the preset.
    pub flow_model: Option<String>,
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub raster: Vec<RasterConfig>,
    /// Synthetic channelized diffusivity on a Cartesian mesh.
    pub channel: Option<ChannelConfig>,
    /// Set `τ₁ = τ₂ = ρ_f D̄ / φ` element by element after the rasters.
    #[serde(default)]
    pub derive_relaxation: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasterConfig {
    pub parameter: String,
    pub path: PathBuf,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub channel: f64,
    pub background: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    #[default]
    None,
    PointForce,
    MomentTensor,
    Injection,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    #[serde(default)]
    pub kind: SourceKind,
    pub location: Option<Point>,
    pub direction: Option<Point>,
    pub tensor: Option<[[f64; 2]; 2]>,
    /// Wavelet amplitude for wave sources, injection amplitude otherwise.
    pub amplitude: Option<f64>,
    pub frequency: Option<f64>,
    pub shift: Option<f64>,
    /// Mollifier radius [m]; defaults to two local mesh sizes.
    pub radius: Option<f64>,
    pub ramp: Option<f64>,
    #[serde(default)]
    pub wells: Vec<WellConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellConfig {
    pub center: Point,
    pub width: f64,
    #[serde(default = "one")]
    pub sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagConfig {
    pub displacement: BcKind,
    pub pressure: BcKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

impl From<BcKind> for FieldBc {
    fn from(k: BcKind) -> Self {
        match k {
            BcKind::Dirichlet => FieldBc::Dirichlet,
            BcKind::Neumann => FieldBc::Neumann,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    /// Condition for tags without an entry; homogeneous Dirichlet for both
    /// fields when absent.
    pub default: Option<TagConfig>,
    #[serde(default)]
    pub tags: BTreeMap<String, TagConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    /// `newmark` or `newmark-theta`; must agree with `τ₁` when given.
    pub scheme: Option<String>,
    #[serde(default = "quarter")]
    pub beta: f64,
    #[serde(default = "half")]
    pub gamma: f64,
    #[serde(default = "half")]
    pub theta: f64,
}

fn quarter() -> f64 {
    0.25
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative paths resolve against the output root.
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_snapshots")]
    pub snapshots: Vec<f64>,
    /// Point-sampled grid `[nx, ny]` written next to each snapshot.
    pub grid: Option<[usize; 2]>,
    #[serde(default = "yes")]
    pub energy: bool,
    #[serde(default)]
    pub probes: Vec<ProbeConfig>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), snapshots: default_snapshots(), grid: None, energy: true, probes: Vec::new() }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("run")
}

fn default_snapshots() -> Vec<f64> {
    vec![0.1, 0.3, 0.5]
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub name: String,
    pub point: Point,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

pub fn rect(domain: [f64; 4]) -> Result<Rect> {
    let [x0, y0, x1, y1] = domain;
    if !domain.iter().all(|v| v.is_finite()) || x1 <= x0 || y1 <= y0 {
        bail!(ConfigError(format!("invalid domain {domain:?}: need x0 < x1 and y0 < y1")));
    }
    Ok(Rect { x0, y0, x1, y1 })
}

/// Invalid user input detected by the CLI itself.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

impl MeshConfig {
    /// Relative file paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<PolyMesh> {
        match self.kind {
            MeshKind::Voronoi => {
                if self.cells < 2 {
                    return Err(invalid("[mesh] voronoi needs cells >= 2"));
                }
                Ok(generate_voronoi(rect(self.domain)?, self.cells, self.lloyd, self.seed)?)
            }
            MeshKind::Cartesian => {
                if self.nx == 0 || self.ny == 0 {
                    return Err(invalid("[mesh] cartesian needs nx, ny >= 1"));
                }
                Ok(PolyMesh::cartesian(rect(self.domain)?, self.nx, self.ny)?)
            }
            MeshKind::File => {
                let path = self.path.as_ref().ok_or_else(|| invalid("[mesh] file needs a path"))?;
                Ok(load_mesh(base.join(path))?)
            }
        }
    }
}

impl CoefficientConfig {
    pub fn build(&self, mesh: &PolyMesh, base: &Path) -> Result<CoefficientField> {
        let n = mesh.n_elements();
        let mut field = match &self.channel {
            Some(c) => {
                let grid = mesh.grid.ok_or_else(|| invalid("[coefficients] channel needs a cartesian mesh"))?;
                let ds = channel_raster(grid.nx, grid.ny, c.channel, c.background).sample(mesh)?;
                let base = self.base_material()?;
                let model = self.flow_model()?;
                let materials = ds
                    .into_iter()
                    .map(|d| match model {
                        Some(model) => overridden(model.material(d), &self.overrides),
                        None => Ok(Material { diffusivity: iso(d), ..base }),
                    })
                    .collect::<Result<_>>()?;
                CoefficientField { materials }
            }
            None => CoefficientField::uniform(n, self.base_material()?),
        };
        for r in &self.raster {
            let values = load_raster_field(base.join(&r.path), &r.parameter, mesh)?;
            for (m, v) in field.materials.iter_mut().zip(values) {
                match self.flow_model()? {
                    Some(model) if r.parameter == "D" => *m = overridden(model.material(v * r.scale), &self.overrides)?,
                    _ => m.set(&r.parameter, v * r.scale)?,
                }
            }
        }
        if self.derive_relaxation {
            field.derive_relaxation(WATER_DENSITY, POROSITY);
        }
        field.validate()?;
        Ok(field)
    }

    fn flow_model(&self) -> Result<Option<FlowModel>> {
        self.flow_model.as_deref().map(|s| Ok(s.parse::<FlowModel>()?)).transpose()
    }

    fn base_material(&self) -> Result<Material> {
        if self.preset.is_some() && self.flow_model.is_some() {
            return Err(invalid("[coefficients] preset and flow_model are exclusive"));
        }
        if let Some(model) = self.flow_model()? {
            return overridden(model.material(1.0), &self.overrides);
        }
        let p: Preset = self.preset.as_deref().unwrap_or("unified").parse()?;
        let overrides: Vec<(&str, f64)> = self.overrides.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        Ok(preset(p, &overrides)?)
    }
}

fn overridden(mut m: Material, overrides: &BTreeMap<String, f64>) -> Result<Material> {
    for (k, v) in overrides {
        m.set(k, *v)?;
    }
    Ok(m)
}

impl SourceConfig {
    pub fn build(&self, mesh: &PolyMesh) -> Result<SourceSpec> {
        let need = |v: Option<Point>, what: &str| v.ok_or_else(|| invalid(format!("[sources] needs {what}")));
        let wavelet = || {
            let d = Wavelet::default();
            Wavelet {
                amplitude: self.amplitude.unwrap_or(d.amplitude),
                frequency: self.frequency.unwrap_or(d.frequency),
                shift: self.shift.unwrap_or(d.shift),
            }
        };
        let radius = |location: Point| -> Result<f64> {
            let r = match self.radius {
                Some(r) => r,
                None => {
                    let k = mesh
                        .locate(location)
                        .ok_or_else(|| invalid(format!("[sources] location {location:?} is outside the mesh")))?;
                    2.0 * mesh.elements[k].diameter
                }
            };
            if !(r > 0.0) {
                return Err(invalid("[sources] radius must be positive"));
            }
            Ok(r)
        };
        Ok(match self.kind {
            SourceKind::None => SourceSpec::None,
            SourceKind::PointForce => {
                let location = need(self.location, "location")?;
                SourceSpec::PointForce {
                    location,
                    direction: need(self.direction, "direction")?,
                    wavelet: wavelet(),
                    radius: radius(location)?,
                }
            }
            SourceKind::MomentTensor => {
                let location = need(self.location, "location")?;
                let tensor = self.tensor.ok_or_else(|| invalid("[sources] moment-tensor needs tensor"))?;
                SourceSpec::MomentTensor { location, tensor, wavelet: wavelet(), radius: radius(location)? }
            }
            SourceKind::Injection => {
                if self.wells.is_empty() {
                    return Err(invalid("[sources] injection needs at least one well"));
                }
                SourceSpec::Injection {
                    wells: self
                        .wells
                        .iter()
                        .map(|w| InjectionWell { center: w.center, width: w.width, sign: w.sign })
                        .collect(),
                    amplitude: self.amplitude.unwrap_or(0.1),
                    ramp: self.ramp.unwrap_or(5.0),
                }
            }
        })
    }
}

impl BcConfig {
    pub fn build(&self) -> Result<BoundaryConditions> {
        let cond = |t: &TagConfig| TagCondition { displacement: t.displacement.into(), pressure: t.pressure.into() };
        let mut bcs = match &self.default {
            Some(d) => BoundaryConditions::uniform(cond(d)),
            None => BoundaryConditions::all_dirichlet(),
        };
        for (tag, c) in &self.tags {
            let tag: u32 = tag.parse().map_err(|_| invalid(format!("[bc] tag {tag:?} is not an integer")))?;
            bcs = bcs.with_tag(tag, cond(c));
        }
        Ok(bcs)
    }
}

impl TimeConfig {
    pub fn build(&self, coeffs: &CoefficientField) -> Result<IntegratorConfig> {
        let cfg = IntegratorConfig {
            dt: self.dt,
            t_final: self.t_final,
            beta: self.beta,
            gamma: self.gamma,
            theta: self.theta,
            ..IntegratorConfig::new(self.dt, self.t_final)
        };
        cfg.validate()?;
        let scheme = Scheme::for_coefficients(coeffs)?;
        if let Some(s) = &self.scheme {
            if s != scheme.name() {
                return Err(invalid(format!(
                    "[time] scheme {s:?} does not match the coefficients, which require {:?}",
                    scheme.name()
                )));
            }
        }
        Ok(cfg)
    }
}

impl OutputConfig {
    pub fn check(&self, mesh: &PolyMesh) -> Result<()> {
        for p in &self.probes {
            if mesh.locate(p.point).is_none() {
                return Err(invalid(format!("[output] probe {} at {:?} lies outside the domain", p.name, p.point)));
            }
        }
        if let Some([nx, ny]) = self.grid {
            if nx < 2 || ny < 2 {
                return Err(invalid("[output] grid needs at least 2 points per direction"));
            }
        }
        Ok(())
    }
}

/// Everything a run needs, resolved from a configuration.
pub struct Resolved {
    pub mesh: Arc<PolyMesh>,
    pub coeffs: CoefficientField,
    pub source: SourceSpec,
    pub bcs: BoundaryConditions,
    pub integrator: IntegratorConfig,
}

impl RunConfig {
    pub fn resolve(&self, base: &Path) -> Result<Resolved> {
        if self.mesh.degree == 0 {
            return Err(invalid("[mesh] degree must be at least 1"));
        }
        let mesh = Arc::new(self.mesh.build(base)?);
        let coeffs = self.coefficients.build(&mesh, base)?;
        let source = self.sources.build(&mesh)?;
        let bcs = self.bc.build()?;
        let integrator = self.time.build(&coeffs)?;
        self.output.check(&mesh)?;
        Ok(Resolved { mesh, coeffs, source, bcs, integrator })
    }
}
