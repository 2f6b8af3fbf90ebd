//! Broken polynomial spaces with per-element orthonormal bases.
//!
//! Every element carries monomials scaled to its bounding box, orthonormalized
//! in the element L² inner product by two passes of modified Gram-Schmidt.
//! Basis values and gradients are cached at the volume and face quadrature
//! points once, so assembly never re-evaluates polynomials.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{BasisError, MeshError};
use crate::geometry::{self, Point};
use crate::mesh::{FaceRef, PolyMesh};
use crate::quadrature::{self, QuadratureRule};

/// Number of scalar basis functions of total degree `<= degree`.
pub fn local_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Quadrature points with physical weights and the basis tabulated there.
/// `values[q * n + i]` is basis function `i` at point `q`.
#[derive(Debug, Clone, Default)]
pub struct Tabulation {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
}

impl Tabulation {
    pub fn n_points(&self) -> usize {
        self.weights.len()
    }
}

#[derive(Debug, Clone)]
pub struct ElementBasis {
    pub degree: usize,
    pub dim: usize,
    center: Point,
    half: Point,
    exps: Vec<(u32, u32)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: Vec<f64>,
}

impl ElementBasis {
    fn monomials(&self, p: Point, vals: &mut [f64], grads: &mut [Point]) {
        let xi = (p[0] - self.center[0]) / self.half[0];
        let eta = (p[1] - self.center[1]) / self.half[1];
        let d = self.degree;
        let mut px = vec![1.0; d + 1];
        let mut py = vec![1.0; d + 1];
        for k in 1..=d {
            px[k] = px[k - 1] * xi;
            py[k] = py[k - 1] * eta;
        }
        for (j, &(a, b)) in self.exps.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            vals[j] = px[a] * py[b];
            let gx = if a > 0 { a as f64 * px[a - 1] * py[b] / self.half[0] } else { 0.0 };
            let gy = if b > 0 { b as f64 * px[a] * py[b - 1] / self.half[1] } else { 0.0 };
            grads[j] = [gx, gy];
        }
    }

    /// Values and gradients of all basis functions at `p`.
    pub fn eval(&self, p: Point) -> (Vec<f64>, Vec<Point>) {
        let n = self.dim;
        let mut mv = vec![0.0; n];
        let mut mg = vec![[0.0; 2]; n];
        self.monomials(p, &mut mv, &mut mg);
        let mut v = vec![0.0; n];
        let mut g = vec![[0.0; 2]; n];
        for i in 0..n {
            let row = &self.coeffs[i * n..(i + 1) * n];
            for j in 0..=i {
                v[i] += row[j] * mv[j];
                g[i][0] += row[j] * mg[j][0];
                g[i][1] += row[j] * mg[j][1];
            }
        }
        (v, g)
    }

    fn tabulate(&self, points: Vec<Point>, weights: Vec<f64>) -> Tabulation {
        let n = self.dim;
        let mut values = Vec::with_capacity(points.len() * n);
        let mut grads = Vec::with_capacity(points.len() * n);
        for p in &points {
            let (v, g) = self.eval(*p);
            values.extend(v);
            grads.extend(g);
        }
        Tabulation { points, weights, values, grads }
    }
}

/// Face quadrature with the traces of the adjacent element bases.
#[derive(Debug, Clone)]
pub struct FaceTabulation {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// One tabulation (values/grads only) per adjacent element, ordered as
    /// the face's elements.
    pub sides: Vec<Tabulation>,
}

/// Volume quadrature of an element: the triangle rule on every sub-triangle.
pub fn element_quadrature(mesh: &PolyMesh, k: usize, rule: &QuadratureRule) -> (Vec<Point>, Vec<f64>) {
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for t in &mesh.elements[k].triangles {
        let (p, w) = quadrature::map_triangle(rule, t);
        pts.extend(p);
        wts.extend(w);
    }
    (pts, wts)
}

/// Segment rule mapped to the face `a -> b`.
pub fn face_quadrature(a: Point, b: Point, rule: &QuadratureRule) -> (Vec<Point>, Vec<f64>) {
    let len = geometry::dist(a, b);
    let pts = rule
        .points
        .iter()
        .map(|s| [a[0] + s[0] * (b[0] - a[0]), a[1] + s[0] * (b[1] - a[1])])
        .collect();
    let wts = rule.weights.iter().map(|w| w * len).collect();
    (pts, wts)
}

#[derive(Debug, Clone)]
pub struct DgSpace {
    pub mesh: Arc<PolyMesh>,
    pub bases: Vec<ElementBasis>,
    /// Scalar DOF offset of each element; vector DOFs start at twice this.
    pub offsets: Vec<usize>,
    pub n_scalar: usize,
    pub volume: Vec<Tabulation>,
    pub interior: Vec<FaceTabulation>,
    pub boundary: Vec<FaceTabulation>,
}

/// Per-element degrees from a uniform degree.
pub fn uniform(mesh: &PolyMesh, degree: usize) -> Vec<usize> {
    vec![degree; mesh.n_elements()]
}

pub fn build_space(mesh: Arc<PolyMesh>, degrees: &[usize]) -> Result<DgSpace, BasisError> {
    let ne = mesh.n_elements();
    if degrees.len() != ne {
        return Err(BasisError::DegreeCount { got: degrees.len(), expected: ne });
    }
    if let Some(k) = degrees.iter().position(|&d| d == 0) {
        return Err(BasisError::Degree { element: k });
    }
    let built: Vec<(ElementBasis, Tabulation)> = (0..ne)
        .into_par_iter()
        .map(|k| {
            let rule = quadrature::triangle_rule(2 * degrees[k] + 2);
            let (pts, wts) = element_quadrature(&mesh, k, &rule);
            let basis = orthonormal_basis(&mesh, k, degrees[k], &pts, &wts)?;
            let tab = basis.tabulate(pts, wts);
            Ok((basis, tab))
        })
        .collect::<Result<_, BasisError>>()?;
    let (bases, volume): (Vec<_>, Vec<_>) = built.into_iter().unzip();

    let mut offsets = Vec::with_capacity(ne);
    let mut n_scalar = 0;
    for b in &bases {
        offsets.push(n_scalar);
        n_scalar += b.dim;
    }

    let interior = mesh
        .interior_faces
        .par_iter()
        .map(|f| {
            let deg = f.elements.iter().map(|&k| degrees[k]).max().unwrap();
            let rule = quadrature::segment_rule(2 * deg + 2);
            let (pts, wts) = face_quadrature(f.a, f.b, &rule);
            let sides = f.elements.iter().map(|&k| bases[k].tabulate(pts.clone(), Vec::new())).collect();
            FaceTabulation { points: pts, weights: wts, sides }
        })
        .collect();
    let boundary = mesh
        .boundary_faces
        .par_iter()
        .map(|f| {
            let rule = quadrature::segment_rule(2 * degrees[f.element] + 2);
            let (pts, wts) = face_quadrature(f.a, f.b, &rule);
            let sides = vec![bases[f.element].tabulate(pts.clone(), Vec::new())];
            FaceTabulation { points: pts, weights: wts, sides }
        })
        .collect();

    Ok(DgSpace { mesh, bases, offsets, n_scalar, volume, interior, boundary })
}

fn orthonormal_basis(
    mesh: &PolyMesh,
    k: usize,
    degree: usize,
    pts: &[Point],
    wts: &[f64],
) -> Result<ElementBasis, BasisError> {
    let el = &mesh.elements[k];
    let center = [0.5 * (el.bbox_min[0] + el.bbox_max[0]), 0.5 * (el.bbox_min[1] + el.bbox_max[1])];
    let half = [0.5 * (el.bbox_max[0] - el.bbox_min[0]), 0.5 * (el.bbox_max[1] - el.bbox_min[1])];
    let mut exps = Vec::new();
    for total in 0..=degree as u32 {
        for b in 0..=total {
            exps.push((total - b, b));
        }
    }
    let n = exps.len();
    let mut basis = ElementBasis { degree, dim: n, center, half, exps, coeffs: vec![0.0; n * n] };

    // sampled monomials: vals[i][q]
    let nq = pts.len();
    let mut vals = vec![vec![0.0; nq]; n];
    let mut mv = vec![0.0; n];
    let mut mg = vec![[0.0; 2]; n];
    for (q, p) in pts.iter().enumerate() {
        basis.monomials(*p, &mut mv, &mut mg);
        for i in 0..n {
            vals[i][q] = mv[i];
        }
    }
    let inner = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).zip(wts).map(|((x, y), w)| x * y * w).sum() };

    let mut coeffs = vec![0.0; n * n];
    for i in 0..n {
        coeffs[i * n + i] = 1.0;
        let start = inner(&vals[i], &vals[i]).sqrt();
        for _pass in 0..2 {
            for j in 0..i {
                let r = inner(&vals[i], &vals[j]);
                let (head, tail) = vals.split_at_mut(i);
                for q in 0..nq {
                    tail[0][q] -= r * head[j][q];
                }
                for m in 0..=j {
                    coeffs[i * n + m] -= r * coeffs[j * n + m];
                }
            }
        }
        let nrm = inner(&vals[i], &vals[i]).sqrt();
        if !(nrm > 1e-10 * start) {
            return Err(BasisError::SingularGram { element: k });
        }
        for q in 0..nq {
            vals[i][q] /= nrm;
        }
        for m in 0..=i {
            coeffs[i * n + m] /= nrm;
        }
    }
    basis.coeffs = coeffs;
    Ok(basis)
}

/// Point evaluation of a broken scalar field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarEval {
    pub value: f64,
    pub grad: Point,
}

/// Point evaluation of a broken vector field; `grad[a][b] = ∂_b u_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorEval {
    pub value: Point,
    pub grad: [[f64; 2]; 2],
    pub div: f64,
    pub strain: [[f64; 2]; 2],
}

impl VectorEval {
    fn from_parts(value: Point, grad: [[f64; 2]; 2]) -> Self {
        let off = 0.5 * (grad[0][1] + grad[1][0]);
        VectorEval {
            value,
            grad,
            div: grad[0][0] + grad[1][1],
            strain: [[grad[0][0], off], [off, grad[1][1]]],
        }
    }
}

impl DgSpace {
    pub fn n_elements(&self) -> usize {
        self.bases.len()
    }

    pub fn n_vector(&self) -> usize {
        2 * self.n_scalar
    }

    pub fn dim(&self, k: usize) -> usize {
        self.bases[k].dim
    }

    pub fn max_degree(&self) -> usize {
        self.bases.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    /// Global index of vector component `c` of basis function `i` on element `k`.
    #[inline]
    pub fn vector_dof(&self, k: usize, c: usize, i: usize) -> usize {
        2 * self.offsets[k] + c * self.bases[k].dim + i
    }

    /// Scalar DOF range of element `k`.
    pub fn scalar_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k] + self.bases[k].dim
    }

    /// Vector DOF range of element `k` (x components, then y components).
    pub fn vector_range(&self, k: usize) -> std::ops::Range<usize> {
        2 * self.offsets[k]..2 * (self.offsets[k] + self.bases[k].dim)
    }

    /// Face tabulation and the element side for a face reference.
    pub fn face_side(&self, f: FaceRef) -> (&FaceTabulation, usize) {
        match f {
            FaceRef::Interior(i, s) => (&self.interior[i], s),
            FaceRef::Boundary(i) => (&self.boundary[i], 0),
        }
    }

    pub fn scalar_at(&self, k: usize, dofs: &[f64], p: Point) -> ScalarEval {
        let (v, g) = self.bases[k].eval(p);
        let c = &dofs[self.scalar_range(k)];
        let mut out = ScalarEval { value: 0.0, grad: [0.0; 2] };
        for i in 0..v.len() {
            out.value += c[i] * v[i];
            out.grad[0] += c[i] * g[i][0];
            out.grad[1] += c[i] * g[i][1];
        }
        out
    }

    pub fn vector_at(&self, k: usize, dofs: &[f64], p: Point) -> VectorEval {
        let (v, g) = self.bases[k].eval(p);
        let n = v.len();
        let r = self.vector_range(k);
        let c = &dofs[r];
        let mut val = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        for a in 0..2 {
            for i in 0..n {
                let ci = c[a * n + i];
                val[a] += ci * v[i];
                grad[a][0] += ci * g[i][0];
                grad[a][1] += ci * g[i][1];
            }
        }
        VectorEval::from_parts(val, grad)
    }

    fn check_inside(&self, k: usize, p: Point) -> Result<(), MeshError> {
        if k >= self.n_elements() {
            return Err(MeshError::Lookup(p[0], p[1], k));
        }
        let tol = 1e-10 * self.mesh.elements[k].diameter;
        if geometry::contains(&self.mesh.polygon(k), p, tol) {
            Ok(())
        } else {
            Err(MeshError::Lookup(p[0], p[1], k))
        }
    }

    /// Broken scalar value and gradient at a point of element `k`.
    pub fn eval_broken_scalar(&self, dofs: &[f64], p: Point, k: usize) -> Result<ScalarEval, MeshError> {
        self.check_inside(k, p)?;
        Ok(self.scalar_at(k, dofs, p))
    }

    /// Broken vector value, gradient, divergence and symmetric gradient.
    pub fn eval_broken_vector(&self, dofs: &[f64], p: Point, k: usize) -> Result<VectorEval, MeshError> {
        self.check_inside(k, p)?;
        Ok(self.vector_at(k, dofs, p))
    }

    /// L² projection of a scalar function.
    pub fn project_scalar(&self, f: impl Fn(Point) -> f64 + Sync) -> Vec<f64> {
        let mut out = vec![0.0; self.n_scalar];
        let blocks: Vec<Vec<f64>> = (0..self.n_elements())
            .into_par_iter()
            .map(|k| {
                let t = &self.volume[k];
                let n = self.dim(k);
                let mut c = vec![0.0; n];
                for q in 0..t.n_points() {
                    let fw = f(t.points[q]) * t.weights[q];
                    for i in 0..n {
                        c[i] += fw * t.values[q * n + i];
                    }
                }
                c
            })
            .collect();
        for (k, c) in blocks.into_iter().enumerate() {
            out[self.scalar_range(k)].copy_from_slice(&c);
        }
        out
    }

    /// L² projection of a vector function.
    pub fn project_vector(&self, f: impl Fn(Point) -> Point + Sync) -> Vec<f64> {
        let mut out = vec![0.0; self.n_vector()];
        let blocks: Vec<Vec<f64>> = (0..self.n_elements())
            .into_par_iter()
            .map(|k| {
                let t = &self.volume[k];
                let n = self.dim(k);
                let mut c = vec![0.0; 2 * n];
                for q in 0..t.n_points() {
                    let v = f(t.points[q]);
                    for i in 0..n {
                        let w = t.weights[q] * t.values[q * n + i];
                        c[i] += w * v[0];
                        c[n + i] += w * v[1];
                    }
                }
                c
            })
            .collect();
        for (k, c) in blocks.into_iter().enumerate() {
            out[self.vector_range(k)].copy_from_slice(&c);
        }
        out
    }

    /// Integral of `f` over element `k` with the space's volume rule.
    pub fn integrate_volume(&self, k: usize, f: impl Fn(Point) -> f64) -> f64 {
        let t = &self.volume[k];
        t.points.iter().zip(&t.weights).map(|(p, w)| w * f(*p)).sum()
    }
}

/// Integral of `f` over element `k` with a rule exact to `degree`.
pub fn integrate_element(mesh: &PolyMesh, k: usize, degree: usize, f: impl Fn(Point) -> f64) -> f64 {
    let rule = quadrature::triangle_rule(degree);
    let (pts, wts) = element_quadrature(mesh, k, &rule);
    pts.iter().zip(&wts).map(|(p, w)| w * f(*p)).sum()
}
