//! Clipped Voronoi tessellations of a rectangle with Lloyd relaxation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PolyMesh;
use crate::error::MeshError;
use crate::geometry::{self, Point};
use crate::quadrature;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn unit() -> Self {
        Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let ok = [self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite())
            && self.x1 > self.x0
            && self.y1 > self.y0;
        if ok {
            Ok(())
        } else {
            Err(MeshError::Input(format!("domain {self:?} has no positive area")))
        }
    }

    fn corners(&self) -> Vec<Point> {
        vec![[self.x0, self.y0], [self.x1, self.y0], [self.x1, self.y1], [self.x0, self.y1]]
    }
}

const MAX_RETRIES: usize = 5;

/// Random generators relaxed `lloyd_iters` times, then clipped to `rect`.
///
/// Degenerate configurations (coincident generators or a tessellation that
/// fails validation) are retried with a perturbed seed.
pub fn generate_voronoi(
    rect: Rect,
    n_elements: usize,
    lloyd_iters: usize,
    seed: u64,
) -> Result<PolyMesh, MeshError> {
    rect.validate()?;
    if n_elements < 2 {
        return Err(MeshError::Input(format!("need at least 2 cells, got {n_elements}")));
    }
    let mut last = String::new();
    for attempt in 0..=MAX_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64 * 0x9E37_79B9_7F4A_7C15));
        let mut gens: Vec<Point> = (0..n_elements)
            .map(|_| {
                [
                    rng.random_range(rect.x0..rect.x1),
                    rng.random_range(rect.y0..rect.y1),
                ]
            })
            .collect();
        for _ in 0..lloyd_iters {
            gens = lloyd_step(rect, &gens);
        }
        if let Some((i, j)) = coincident(rect, &gens) {
            last = format!("generators {i} and {j} coincide");
            continue;
        }
        match voronoi_from_generators(rect, &gens) {
            Ok(m) => return Ok(m),
            Err(e) => last = e.to_string(),
        }
    }
    Err(MeshError::Degenerate(MAX_RETRIES, last))
}

/// One Lloyd update: move every generator to the centroid of its cell.
pub fn lloyd_step(rect: Rect, gens: &[Point]) -> Vec<Point> {
    voronoi_cells(rect, gens)
        .iter()
        .zip(gens)
        .map(|(c, &g)| if c.len() >= 3 { geometry::centroid(c) } else { g })
        .collect()
}

/// Quantization energy `Σ_i ∫_{V_i} |x - z_i|² dx`, which Lloyd iterations
/// never increase.
pub fn cvt_energy(rect: Rect, gens: &[Point]) -> f64 {
    let rule = quadrature::triangle_rule(2);
    let cells = voronoi_cells(rect, gens);
    let mut e = 0.0;
    for (cell, z) in cells.iter().zip(gens) {
        for i in 0..cell.len() {
            let t = [*z, cell[i], cell[(i + 1) % cell.len()]];
            if geometry::signed_area(&t) <= 0.0 {
                continue;
            }
            let (pts, wts) = quadrature::map_triangle(&rule, &t);
            for (p, w) in pts.iter().zip(&wts) {
                let d = geometry::sub(*p, *z);
                e += w * geometry::dot(d, d);
            }
        }
    }
    e
}

fn coincident(rect: Rect, gens: &[Point]) -> Option<(usize, usize)> {
    let tol = 1e-10 * rect.width().max(rect.height());
    let mut idx: Vec<usize> = (0..gens.len()).collect();
    idx.sort_by(|&a, &b| gens[a][0].total_cmp(&gens[b][0]));
    for w in 0..idx.len() {
        for v in w + 1..idx.len() {
            let (i, j) = (idx[w], idx[v]);
            if gens[j][0] - gens[i][0] > tol {
                break;
            }
            if geometry::dist(gens[i], gens[j]) <= tol {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// Bucket grid over the rectangle used to visit generators in rings of
/// increasing distance.
struct Buckets {
    nx: usize,
    ny: usize,
    size: f64,
    x0: f64,
    y0: f64,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(rect: Rect, gens: &[Point]) -> Self {
        let size = (rect.area() / gens.len() as f64).sqrt();
        let nx = ((rect.width() / size).ceil() as usize).max(1);
        let ny = ((rect.height() / size).ceil() as usize).max(1);
        let mut b = Buckets { nx, ny, size, x0: rect.x0, y0: rect.y0, cells: vec![Vec::new(); nx * ny] };
        for (i, g) in gens.iter().enumerate() {
            let (bx, by) = b.index(*g);
            b.cells[by * nx + bx].push(i);
        }
        b
    }

    fn index(&self, p: Point) -> (usize, usize) {
        let bx = (((p[0] - self.x0) / self.size).floor().max(0.0) as usize).min(self.nx - 1);
        let by = (((p[1] - self.y0) / self.size).floor().max(0.0) as usize).min(self.ny - 1);
        (bx, by)
    }
}

/// Voronoi cells of `gens` clipped to `rect`, as counter-clockwise loops.
pub fn voronoi_cells(rect: Rect, gens: &[Point]) -> Vec<Vec<Point>> {
    let buckets = Buckets::new(rect, gens);
    let max_ring = buckets.nx.max(buckets.ny);
    gens.iter()
        .enumerate()
        .map(|(i, &z)| {
            let mut cell = rect.corners();
            let (bx, by) = buckets.index(z);
            for ring in 0..=max_ring {
                let (bx, by) = (bx as isize, by as isize);
                let r = ring as isize;
                for jy in by - r..=by + r {
                    for jx in bx - r..=bx + r {
                        if (jx - bx).abs() != r && (jy - by).abs() != r {
                            continue;
                        }
                        if jx < 0 || jy < 0 || jx >= buckets.nx as isize || jy >= buckets.ny as isize {
                            continue;
                        }
                        for &j in &buckets.cells[jy as usize * buckets.nx + jx as usize] {
                            if j == i {
                                continue;
                            }
                            let g = gens[j];
                            let m = [0.5 * (z[0] + g[0]), 0.5 * (z[1] + g[1])];
                            cell = geometry::clip_halfplane(&cell, m, geometry::sub(g, z));
                        }
                    }
                }
                // generators beyond this ring are at least ring*size away;
                // they cannot cut the cell once that exceeds twice its radius
                let radius = cell.iter().map(|p| geometry::dist(*p, z)).fold(0.0, f64::max);
                if ring as f64 * buckets.size >= 2.0 * radius {
                    break;
                }
            }
            cell
        })
        .collect()
}

/// Clipped Voronoi mesh for fixed generators (no relaxation).
pub fn voronoi_from_generators(rect: Rect, gens: &[Point]) -> Result<PolyMesh, MeshError> {
    rect.validate()?;
    let scale = rect.width().max(rect.height());
    let tol = 1e-10 * scale;
    let cells = voronoi_cells(rect, gens);

    // merge vertices closer than tol through a hash grid
    let mut vertices: Vec<Point> = Vec::new();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let key = |p: Point| (((p[0] - rect.x0) / tol).floor() as i64, ((p[1] - rect.y0) / tol).floor() as i64);
    let mut loops = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let mut lp: Vec<usize> = Vec::with_capacity(cell.len());
        for &p in cell {
            // snap onto the rectangle sides
            let mut p = p;
            for (v, lo, hi) in [(0, rect.x0, rect.x1), (1, rect.y0, rect.y1)] {
                if (p[v] - lo).abs() <= tol {
                    p[v] = lo;
                } else if (p[v] - hi).abs() <= tol {
                    p[v] = hi;
                }
            }
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                        for &v in list {
                            if geometry::dist(vertices[v], p) <= tol {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let v = found.unwrap_or_else(|| {
                vertices.push(p);
                grid.entry((kx, ky)).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            if lp.last() != Some(&v) {
                lp.push(v);
            }
        }
        while lp.len() > 1 && lp.first() == lp.last() {
            lp.pop();
        }
        if lp.len() < 3 {
            return Err(MeshError::Element { element: c, msg: "collapsed Voronoi cell".into() });
        }
        loops.push(lp);
    }

    // tag faces lying on the rectangle sides
    let side = |a: Point, b: Point| -> Option<u32> {
        if a[1] == rect.y0 && b[1] == rect.y0 {
            Some(1)
        } else if a[0] == rect.x1 && b[0] == rect.x1 {
            Some(2)
        } else if a[1] == rect.y1 && b[1] == rect.y1 {
            Some(3)
        } else if a[0] == rect.x0 && b[0] == rect.x0 {
            Some(4)
        } else {
            None
        }
    };
    let mut tags = Vec::new();
    for (k, lp) in loops.iter().enumerate() {
        for i in 0..lp.len() {
            if let Some(t) = side(vertices[lp[i]], vertices[lp[(i + 1) % lp.len()]]) {
                tags.push((k, i, t));
            }
        }
    }
    let mesh = PolyMesh::new(vertices, loops, &tags)?;
    if let Some(f) = mesh.boundary_faces.iter().find(|f| f.tag == super::UNTAGGED) {
        return Err(MeshError::Topology(format!(
            "dangling face of element {} inside the domain",
            f.element
        )));
    }
    let area = mesh.total_area();
    if (area - rect.area()).abs() > 1e-10 * rect.area() {
        return Err(MeshError::Topology(format!("cells cover {area} of {}", rect.area())));
    }
    Ok(mesh)
}
