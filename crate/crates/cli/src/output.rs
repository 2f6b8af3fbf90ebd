//! Legacy VTK and CSV writers, and the plain-text state dumps read back by
//! `probe`.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use polyvisco_core::basis::DgSpace;
use polyvisco_core::geometry::Point;
use polyvisco_core::models::CoefficientField;
use polyvisco_core::scenarios::{element_means, vector_element_stats};
use polyvisco_core::verification::filtration_field;

/// Coefficients of one saved time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
}

impl Snapshot {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = format!("t {}\n", self.t);
        for (name, v) in [("u", &self.u), ("z", &self.z), ("phi", &self.phi)] {
            let _ = writeln!(s, "{name} {}", v.len());
            for x in v.iter() {
                let _ = writeln!(s, "{x}");
            }
        }
        std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut lines = text.lines();
        let t = match lines.next().and_then(|l| l.strip_prefix("t ")) {
            Some(t) => t.parse()?,
            None => bail!("{}: missing time header", path.display()),
        };
        Self::parse_blocks(t, lines, path)
    }

    fn parse_blocks<'a>(t: f64, mut lines: impl Iterator<Item = &'a str>, path: &Path) -> Result<Self> {
        let mut read = |want: &str| -> Result<Vec<f64>> {
            let head = lines.next().with_context(|| format!("{}: missing {want} block", path.display()))?;
            let n: usize = match head.split_once(' ') {
                Some((k, n)) if k == want => n.parse()?,
                _ => bail!("{}: expected {want} block, found {head:?}", path.display()),
            };
            (0..n)
                .map(|_| {
                    let line = lines.next().with_context(|| format!("{}: truncated {want} block", path.display()))?;
                    Ok(line.trim().parse::<f64>()?)
                })
                .collect()
        };
        let u = read("u")?;
        let z = read("z")?;
        let phi = read("phi")?;
        Ok(Snapshot { t, u, z, phi })
    }
}

/// Point values of one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSample {
    pub u: Point,
    pub v: Point,
    pub phi: f64,
    /// Magnitude of the Darcy flux `-D ∇φ`.
    pub w: f64,
}

impl PointSample {
    pub const CSV_HEADER: &'static str = "t,ux,uy,vx,vy,phi,w_mag";

    pub fn csv(&self, t: f64) -> String {
        format!("{t},{}", self.values())
    }

    fn values(&self) -> String {
        format!("{:e},{:e},{:e},{:e},{:e},{:e}", self.u[0], self.u[1], self.v[0], self.v[1], self.phi, self.w)
    }
}

/// Evaluate all fields at `p`, or `None` when `p` lies outside the mesh.
pub fn sample(space: &DgSpace, coeffs: &CoefficientField, s: &Snapshot, p: Point) -> Option<PointSample> {
    let k = space.mesh.locate(p)?;
    let u = space.vector_at(k, &s.u, p).value;
    let v = space.vector_at(k, &s.z, p).value;
    let phi = space.scalar_at(k, &s.phi, p);
    let d = coeffs.materials[k].diffusivity;
    let g = phi.grad;
    let w = [d[0][0] * g[0] + d[0][1] * g[1], d[1][0] * g[0] + d[1][1] * g[1]];
    Some(PointSample { u, v, phi: phi.value, w: w[0].hypot(w[1]) })
}

/// Legacy VTK unstructured grid with polygon cells and cell-averaged fields.
pub fn vtk(space: &DgSpace, coeffs: &CoefficientField, s: &Snapshot) -> String {
    let mesh = &space.mesh;
    let (u_mean, _, _) = vector_element_stats(space, &s.u);
    let (v_mean, _, _) = vector_element_stats(space, &s.z);
    let phi = element_means(space, &s.phi);
    let w = filtration_field(space, &s.phi, coeffs).element_magnitudes();

    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "polyvisco t={}", s.t);
    let _ = writeln!(out, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", mesh.vertices.len());
    for p in &mesh.vertices {
        let _ = writeln!(out, "{} {} 0", p[0], p[1]);
    }
    let size: usize = mesh.elements.iter().map(|e| e.vertices.len() + 1).sum();
    let _ = writeln!(out, "CELLS {} {size}", mesh.elements.len());
    for e in &mesh.elements {
        let ids: Vec<String> = e.vertices.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{} {}", e.vertices.len(), ids.join(" "));
    }
    let _ = writeln!(out, "CELL_TYPES {}", mesh.elements.len());
    for _ in &mesh.elements {
        let _ = writeln!(out, "7");
    }
    let _ = writeln!(out, "CELL_DATA {}", mesh.elements.len());
    for (name, field) in [("u", &u_mean), ("v", &v_mean)] {
        let _ = writeln!(out, "VECTORS {name} double");
        for a in field {
            let _ = writeln!(out, "{:e} {:e} 0", a[0], a[1]);
        }
    }
    let speed: Vec<f64> = v_mean.iter().map(|a| a[0].hypot(a[1])).collect();
    for (name, field) in [("phi", &phi), ("w_mag", &w), ("speed", &speed)] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for a in field {
            let _ = writeln!(out, "{a:e}");
        }
    }
    out
}

/// Fields sampled on an `nx × ny` lattice spanning the mesh bounding box.
pub fn grid_csv(space: &DgSpace, coeffs: &CoefficientField, s: &Snapshot, nx: usize, ny: usize) -> String {
    let (lo, hi) = bounding_box(&space.mesh.vertices);
    let mut out = String::from("x,y,ux,uy,vx,vy,phi,w_mag\n");
    for j in 0..ny {
        for i in 0..nx {
            let p = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / (nx - 1) as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / (ny - 1) as f64,
            ];
            if let Some(v) = sample(space, coeffs, s, p) {
                let _ = writeln!(out, "{},{},{}", p[0], p[1], v.values());
            }
        }
    }
    out
}

fn bounding_box(points: &[Point]) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (lo, hi)
}
