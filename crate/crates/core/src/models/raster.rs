//! Cell-wise parameter rasters: `raster NX NY` followed by `NX·NY` values,
//! row-major starting at the lower-left cell.

use std::path::Path;

use crate::error::{Error, ModelError};
use crate::mesh::PolyMesh;

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub nx: usize,
    pub ny: usize,
    /// `values[j * nx + i]` is cell `(i, j)`.
    pub values: Vec<f64>,
}

impl Raster {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for v in &mut self.values {
            *v *= factor;
        }
        self
    }

    pub fn write(&self) -> String {
        let mut s = format!("raster {} {}\n", self.nx, self.ny);
        for j in 0..self.ny {
            let row: Vec<String> = (0..self.nx).map(|i| format!("{:?}", self.get(i, j))).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Value of the raster cell containing each element centroid, with the
    /// raster stretched over the mesh bounding box.
    pub fn sample(&self, mesh: &PolyMesh) -> Result<Vec<f64>, ModelError> {
        let shape_err = |mx, my| ModelError::RasterShape { nx: self.nx, ny: self.ny, mx, my };
        match mesh.grid {
            Some(g) if g.nx != self.nx || g.ny != self.ny => return Err(shape_err(g.nx, g.ny)),
            None if mesh.n_elements() != self.nx * self.ny => return Err(shape_err(mesh.n_elements(), 1)),
            _ => {}
        }
        let bb = mesh.bounding_box();
        Ok(mesh
            .elements
            .iter()
            .map(|e| {
                let i = ((e.centroid[0] - bb.x0) / bb.width() * self.nx as f64).floor() as usize;
                let j = ((e.centroid[1] - bb.y0) / bb.height() * self.ny as f64).floor() as usize;
                self.get(i.min(self.nx - 1), j.min(self.ny - 1))
            })
            .collect())
    }
}

pub fn parse_raster(text: &str) -> Result<Raster, ModelError> {
    let perr = |line: usize, msg: String| ModelError::RasterParse { line, msg };
    let mut toks = text.lines().enumerate().flat_map(|(i, l)| {
        l.split('#').next().unwrap_or("").split_whitespace().map(move |t| (i + 1, t))
    });
    match toks.next() {
        Some((_, "raster")) => {}
        Some((ln, _)) => return Err(perr(ln, "expected header `raster NX NY`".into())),
        None => return Err(perr(1, "empty raster".into())),
    }
    let mut dim = || -> Result<usize, ModelError> {
        let (ln, t) = toks.next().ok_or_else(|| perr(1, "missing raster size".into()))?;
        t.parse().ok().filter(|&n: &usize| n > 0).ok_or_else(|| perr(ln, format!("invalid size {t:?}")))
    };
    let nx = dim()?;
    let ny = dim()?;
    let mut values = Vec::with_capacity(nx * ny);
    let mut last = 1;
    for (ln, t) in toks {
        last = ln;
        let v: f64 = t.parse().map_err(|_| perr(ln, format!("invalid value {t:?}")))?;
        if !v.is_finite() {
            return Err(perr(ln, "non-finite value".into()));
        }
        values.push(v);
    }
    if values.len() != nx * ny {
        return Err(perr(last, format!("expected {} values, found {}", nx * ny, values.len())));
    }
    Ok(Raster { nx, ny, values })
}

/// Centerline of the synthetic channel as `(x, y)` fractions of the domain,
/// ordered by `y`.
const CHANNEL_CENTERLINE: [[f64; 2]; 5] = [[0.33, 0.0], [0.355, 0.18], [0.48, 0.54], [0.52, 0.82], [0.5, 1.0]];
/// Channel half-width as a fraction of the domain width.
const CHANNEL_HALF_WIDTH: f64 = 0.085;
/// Detached lens: center and semi-axes as domain fractions.
const LENS: ([f64; 2], [f64; 2]) = ([0.19, 0.9], [0.1, 0.05]);

/// Synthetic heterogeneous slice: `channel` inside a meandering strip that
/// crosses the domain bottom to top and inside a detached lens near the
/// upper-left corner, `background` elsewhere. Cells are classified by their
/// centers.
pub fn channel_raster(nx: usize, ny: usize, channel: f64, background: f64) -> Raster {
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = (i as f64 + 0.5) / nx as f64;
            let y = (j as f64 + 0.5) / ny as f64;
            values.push(if in_channel(x, y) { channel } else { background });
        }
    }
    Raster { nx, ny, values }
}

/// Whether the point with domain fractions `(x, y)` lies in the high
/// diffusivity region of [`channel_raster`].
pub fn in_channel(x: f64, y: f64) -> bool {
    let seg = CHANNEL_CENTERLINE.windows(2).find(|w| y <= w[1][1]).unwrap_or(&CHANNEL_CENTERLINE[3..]);
    let s = (y - seg[0][1]) / (seg[1][1] - seg[0][1]);
    let xc = seg[0][0] + s * (seg[1][0] - seg[0][0]);
    let (c, r) = LENS;
    (x - xc).abs() <= CHANNEL_HALF_WIDTH || ((x - c[0]) / r[0]).powi(2) + ((y - c[1]) / r[1]).powi(2) <= 1.0
}

/// Per-element values of raster parameter `name` on `mesh`. Diffusivities
/// (`D`, `permeability`) must be strictly positive, other parameters
/// nonnegative.
pub fn load_raster_field(path: impl AsRef<Path>, name: &str, mesh: &PolyMesh) -> Result<Vec<f64>, Error> {
    let raster = parse_raster(&std::fs::read_to_string(path)?)?;
    Ok(raster_field(&raster, name, mesh)?)
}

pub(crate) fn raster_field(raster: &Raster, name: &str, mesh: &PolyMesh) -> Result<Vec<f64>, ModelError> {
    let strict = matches!(name, "D" | "permeability");
    if let Some(k) = raster.values.iter().position(|&v| if strict { v <= 0.0 } else { v < 0.0 }) {
        return Err(ModelError::RasterParse {
            line: 2 + k / raster.nx,
            msg: format!("{name} value {} must be {}", raster.values[k], if strict { "positive" } else { "nonnegative" }),
        });
    }
    raster.sample(mesh)
}
