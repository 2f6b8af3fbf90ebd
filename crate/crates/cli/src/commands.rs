use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args};

use polyvisco_core::basis::{build_space, uniform};
use polyvisco_core::dg_forms::PenaltyParams;
use polyvisco_core::geometry::Point;
use polyvisco_core::mesh::{generate_voronoi, save_mesh, PolyMesh};
use polyvisco_core::models::{preset, Preset};
use polyvisco_core::simulation::{run as simulate, Problem};
use polyvisco_core::timestepping::{IntegratorConfig, Scheme};
use polyvisco_core::verification::{
    convergence_sweep, voronoi_levels, CaseKind, EnergyNorms, EnergyRow, Level, SweepConfig, SweepKind,
};

use crate::config::{rect, ConfigError, MeshKind, RunConfig};
use crate::output::{grid_csv, sample, vtk, PointSample, Snapshot};
use crate::Global;

/// A run produced non-finite output without the solver flagging it.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|v| v.trim().parse::<T>().map_err(|_| format!("invalid list entry {v:?}"))).collect()
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    match parse_list::<f64>(s)?.as_slice() {
        &[x, y] => Ok([x, y]),
        _ => Err(format!("expected x,y, got {s:?}")),
    }
}

fn parse_domain(s: &str) -> std::result::Result<[f64; 4], String> {
    parse_list::<f64>(s)?.try_into().map_err(|_| format!("expected x0,y0,x1,y1, got {s:?}"))
}

fn parse_pair(s: &str) -> std::result::Result<[usize; 2], String> {
    parse_list::<usize>(s)?.try_into().map_err(|_| format!("expected nx,ny, got {s:?}"))
}

fn parse_override(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("invalid value in {s:?}"))?;
    Ok((k.trim().to_string(), v))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["voronoi", "cartesian"])))]
pub struct MeshArgs {
    /// Clipped Voronoi mesh with this many cells.
    #[arg(long)]
    voronoi: Option<usize>,
    /// Cartesian mesh with `nx,ny` cells.
    #[arg(long, value_parser = parse_pair)]
    cartesian: Option<[usize; 2]>,
    /// Rectangle `x0,y0,x1,y1`.
    #[arg(long, value_parser = parse_domain, default_value = "0,0,1,1")]
    domain: [f64; 4],
    /// Lloyd relaxation sweeps for Voronoi meshes.
    #[arg(long, default_value_t = 50)]
    lloyd: usize,
    #[arg(short, long, default_value = "mesh.txt")]
    output: PathBuf,
}

pub fn mesh(g: &Global, a: &MeshArgs) -> Result<()> {
    let domain = rect(a.domain)?;
    let mesh = match (a.voronoi, a.cartesian) {
        (Some(n), _) => generate_voronoi(domain, n, a.lloyd, g.seed.unwrap_or(1))?,
        (None, Some([nx, ny])) => PolyMesh::cartesian(domain, nx, ny)?,
        (None, None) => unreachable!("clap requires one mesh kind"),
    };
    let path = g.output_root.join(&a.output);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    save_mesh(&mesh, &path)?;
    eprintln!(
        "wrote {} elements, {} vertices, h = {:.4e} to {}",
        mesh.n_elements(),
        mesh.vertices.len(),
        mesh.h(),
        path.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration.
    config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Configuration as written into a run directory: the mesh replaced by the
/// saved mesh file and raster paths made absolute.
fn frozen(cfg: &RunConfig, base: &Path) -> Result<RunConfig> {
    let mut c = cfg.clone();
    c.mesh.kind = MeshKind::File;
    c.mesh.path = Some(PathBuf::from("mesh.txt"));
    for r in &mut c.coefficients.raster {
        r.path = std::path::absolute(base.join(&r.path))?;
    }
    Ok(c)
}

pub fn run(g: &Global, a: &RunArgs) -> Result<()> {
    let start = Instant::now();
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(seed) = g.seed {
        cfg.mesh.seed = seed;
    }
    let base = a.config.parent().unwrap_or(Path::new("."));
    let r = cfg.resolve(base)?;
    let out = g.output_root.join(a.out.as_ref().unwrap_or(&cfg.output.dir));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    save_mesh(&r.mesh, out.join("mesh.txt"))?;
    write(&out.join("config.toml"), &frozen(&cfg, base)?.to_toml()?)?;

    let degrees = uniform(&r.mesh, cfg.mesh.degree);
    let problem = Problem::new(r.mesh.clone(), &degrees, r.coeffs, &r.bcs, PenaltyParams::default())?;
    let scheme = problem.scheme()?;
    let dt = r.integrator.dt;
    let t_final = r.integrator.t_final;
    eprintln!(
        "{} elements, {} unknowns, {} scheme, {} steps",
        r.mesh.n_elements(),
        problem.n_unknowns(),
        scheme.name(),
        r.integrator.n_steps()?
    );

    let mut requested: Vec<f64> = cfg.output.snapshots.clone();
    requested.sort_by(f64::total_cmp);
    requested.dedup();
    let (requested, skipped): (Vec<f64>, Vec<f64>) =
        requested.into_iter().partition(|&t| t >= 0.0 && t <= t_final + 0.5 * dt);
    if !skipped.is_empty() {
        eprintln!("warning: snapshot times {skipped:?} lie outside [0, {t_final}] and are skipped");
    }

    let norms = if cfg.output.energy { Some(EnergyNorms::new(&problem.disc)?) } else { None };
    let disc = &problem.disc;
    let mut snapshots: Vec<(f64, Snapshot)> = Vec::new();
    let mut energy: Vec<EnergyRow> = Vec::new();
    let mut probes: Vec<Vec<(f64, PointSample)>> = vec![Vec::new(); cfg.output.probes.len()];
    let mut next = 0;
    simulate(&problem, &r.source, problem.zero_initial(), r.integrator.clone(), 0.0, |s| {
        let snap = || Snapshot { t: s.t, u: s.u.clone(), z: s.z.clone(), phi: s.phi.clone() };
        if let Some(n) = &norms {
            energy.push(n.row(&problem.ops, s));
        }
        if !cfg.output.probes.is_empty() {
            let current = snap();
            for (series, p) in probes.iter_mut().zip(&cfg.output.probes) {
                if let Some(v) = sample(&disc.space, &disc.coeffs, &current, p.point) {
                    series.push((s.t, v));
                }
            }
        }
        while next < requested.len() && s.t >= requested[next] - 0.5 * dt {
            snapshots.push((requested[next], snap()));
            next += 1;
        }
        Ok(())
    })?;

    let mut index = String::from("index,t_requested,t,state\n");
    for (i, (req, s)) in snapshots.iter().enumerate() {
        if s.u.iter().chain(&s.z).chain(&s.phi).any(|v| !v.is_finite()) {
            return Err(NumericalFailure(format!("non-finite state at t = {}", s.t)).into());
        }
        let state = format!("state_{i:03}.txt");
        s.write(&out.join(&state))?;
        write(&out.join(format!("snapshot_{i:03}.vtk")), &vtk(&disc.space, &disc.coeffs, s))?;
        if let Some([nx, ny]) = cfg.output.grid {
            write(&out.join(format!("grid_{i:03}.csv")), &grid_csv(&disc.space, &disc.coeffs, s, nx, ny))?;
        }
        let _ = writeln!(index, "{i},{req},{},{state}", s.t);
    }
    write(&out.join("snapshots.csv"), &index)?;
    for (series, p) in probes.iter().zip(&cfg.output.probes) {
        let mut csv = format!("{}\n", PointSample::CSV_HEADER);
        for (t, v) in series {
            let _ = writeln!(csv, "{}", v.csv(*t));
        }
        write(&out.join(format!("probe_{}.csv", p.name)), &csv)?;
    }
    if cfg.output.energy {
        if energy.iter().any(|r| !r.total.is_finite()) {
            return Err(NumericalFailure("non-finite discrete energy".into()).into());
        }
        let mut csv = format!("{}\n", EnergyRow::CSV_HEADER);
        for r in &energy {
            let _ = writeln!(csv, "{}", r.csv());
        }
        write(&out.join("energy.csv"), &csv)?;
    }
    eprintln!("wrote {} snapshots to {} in {:.1} s", snapshots.len(), out.display(), start.elapsed().as_secs_f64());
    Ok(())
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `h`, `p`, `dt` or `nu`.
    kind: String,
    /// Degree for h-, dt- and nu-sweeps.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Degrees of a p-sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    degrees: Vec<usize>,
    /// Voronoi cell counts of an h-sweep.
    #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
    counts: Vec<usize>,
    /// Cells of the fixed mesh used by p-, dt- and nu-sweeps.
    #[arg(long, default_value_t = 100)]
    cells: usize,
    #[arg(long, default_value_t = 10)]
    lloyd: usize,
    /// Time step of h-, p- and nu-sweeps.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Time steps of a dt-sweep.
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.01,0.005,0.0025")]
    dts: Vec<f64>,
    /// Pressure magnitudes of a nu-sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,100,10000")]
    nus: Vec<f64>,
    /// Displacement magnitude of a nu-sweep.
    #[arg(long, default_value_t = 0.1)]
    nu_u: f64,
    #[arg(long, default_value_t = 0.1)]
    t_final: f64,
    /// Manufactured case `trig`, `linear` or `scaled`; `linear` for
    /// dt-sweeps and `trig` otherwise when absent.
    #[arg(long)]
    case: Option<String>,
    #[arg(long, default_value = "unified")]
    preset: String,
    /// Coefficient override `name=value`, repeatable.
    #[arg(long = "set", value_parser = parse_override)]
    overrides: Vec<(String, f64)>,
    /// Expected scheme, checked against `τ₁`.
    #[arg(long)]
    scheme: Option<String>,
    /// CSV destination; standard output only when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn sweep(g: &Global, a: &SweepArgs) -> Result<()> {
    let kind: SweepKind = a.kind.parse()?;
    let p: Preset = a.preset.parse()?;
    let overrides: Vec<(&str, f64)> = a.overrides.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let material = preset(p, &overrides)?;
    let coeffs = polyvisco_core::models::CoefficientField::uniform(1, material);
    coeffs.validate()?;
    let scheme = Scheme::for_coefficients(&coeffs)?;
    if let Some(s) = &a.scheme {
        let want: Scheme = s.parse()?;
        if want != scheme {
            bail!(ConfigError(format!("--scheme {s} does not match tau1, which requires {}", scheme.name())));
        }
    }
    let case: CaseKind = match &a.case {
        Some(c) => c.parse()?,
        None if kind == SweepKind::TimeStep => CaseKind::Linear,
        None => CaseKind::Trig,
    };
    let seed = g.seed.unwrap_or(1);
    let fixed = || -> Result<Arc<PolyMesh>> { Ok(voronoi_levels(&[a.cells], a.lloyd, seed)?.remove(0)) };
    let level = |mesh: Arc<PolyMesh>, degree: usize, dt: f64, case: CaseKind| Level { mesh, degree, dt, case };
    let levels: Vec<Level> = match kind {
        SweepKind::H => voronoi_levels(&a.counts, a.lloyd, seed)?
            .into_iter()
            .map(|m| level(m, a.degree, a.dt, case))
            .collect(),
        SweepKind::Degree => {
            let m = fixed()?;
            a.degrees.iter().map(|&d| level(m.clone(), d, a.dt, case)).collect()
        }
        SweepKind::TimeStep => {
            let m = fixed()?;
            a.dts.iter().map(|&dt| level(m.clone(), a.degree, dt, case)).collect()
        }
        SweepKind::Nu => {
            let m = fixed()?;
            a.nus.iter().map(|&nu| level(m.clone(), a.degree, a.dt, CaseKind::Scaled { nu_u: a.nu_u, nu_phi: nu })).collect()
        }
    };
    let cfg = SweepConfig {
        integrator: IntegratorConfig::new(a.dt, a.t_final),
        ..SweepConfig::new(material, a.t_final, levels)
    };
    let report = convergence_sweep(kind, &cfg, |row| {
        eprintln!(
            "level: {} elements, degree {}, dt {:e}, {} unknowns, errors {:?}",
            row.elements,
            row.degree,
            row.dt,
            row.unknowns,
            row.errors.as_array()
        );
    })?;
    let csv = report.to_csv();
    print!("{csv}");
    if let Some(path) = &a.out {
        let path = g.output_root.join(path);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        write(&path, &csv)?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Directory written by `run`.
    run_dir: PathBuf,
    /// Probe location `x,y`, repeatable.
    #[arg(long = "point", value_parser = parse_point, required = true)]
    points: Vec<Point>,
    /// CSV destination; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

pub fn probe(g: &Global, a: &ProbeArgs) -> Result<()> {
    let dir = g.output_root.join(&a.run_dir);
    let cfg = RunConfig::load(&dir.join("config.toml"))?;
    let r = cfg.resolve(&dir)?;
    for p in &a.points {
        if r.mesh.locate(*p).is_none() {
            bail!(ConfigError(format!("point {p:?} lies outside the mesh")));
        }
    }
    let space = build_space(r.mesh.clone(), &uniform(&r.mesh, cfg.mesh.degree))?;
    let index_path = dir.join("snapshots.csv");
    let index = std::fs::read_to_string(&index_path).with_context(|| format!("reading {}", index_path.display()))?;
    let mut csv = format!("x,y,{}\n", PointSample::CSV_HEADER);
    for line in index.lines().skip(1) {
        let state = line.rsplit(',').next().context("malformed snapshot index")?;
        let s = Snapshot::read(&dir.join(state))?;
        if s.u.len() != 2 * space.n_scalar || s.phi.len() != space.n_scalar {
            bail!(ConfigError(format!("{state} does not match the run's discretization")));
        }
        for p in &a.points {
            if let Some(v) = sample(&space, &r.coeffs, &s, *p) {
                let _ = writeln!(csv, "{},{},{}", p[0], p[1], v.csv(s.t));
            }
        }
    }
    match &a.out {
        Some(path) => write(&g.output_root.join(path), &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
