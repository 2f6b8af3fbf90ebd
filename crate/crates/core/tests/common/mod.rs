//! Dense-quadrature reference assembly used to cross-check the sparse
//! operators. Shares only the mesh topology, the basis functions and the DOF
//! layout with the library; quadrature, normals, diameters, averaging
//! weights, penalties and every form are recomputed here from their
//! definitions.

#![allow(dead_code)]

use std::sync::Arc;

use polyvisco_core::assembly::{
    assemble_diffusion, assemble_div, assemble_elasticity, assemble_rhs, BlockOperators, BoundaryConditions,
    Discretization, FieldBc, Loading, Parts, TagCondition, ZeroLoading,
};
use polyvisco_core::basis::{build_space, DgSpace};
use polyvisco_core::dg_forms::PenaltyParams;
use polyvisco_core::geometry::Point;
use polyvisco_core::mesh::{generate_voronoi, PolyMesh, Rect};
use polyvisco_core::models::{CoefficientField, Material};
use polyvisco_core::simulation::Problem;
use polyvisco_core::sparse::CsrMatrix;
use polyvisco_core::timestepping::{InitialData, IntegratorConfig};
use polyvisco_core::verification::{energy_trace, EnergyTrace};
use proptest::prelude::*;

pub type Dense = Vec<Vec<f64>>;

/// Gauss-Legendre nodes and weights on `[0, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss01(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=m {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 + x), 0.5 * w));
    }
    out
}

const POINTS: usize = 9;

/// Collapsed tensor rule on the polygon, fanned from its vertex average.
pub fn polygon_rule(poly: &[Point]) -> Vec<(Point, f64)> {
    let g = gauss01(POINTS);
    let c = poly.iter().fold([0.0; 2], |s, p| [s[0] + p[0], s[1] + p[1]]);
    let c = [c[0] / poly.len() as f64, c[1] / poly.len() as f64];
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (b, d) = (poly[i], poly[(i + 1) % poly.len()]);
        let area2 = ((b[0] - c[0]) * (d[1] - c[1]) - (b[1] - c[1]) * (d[0] - c[0])).abs();
        for &(u, wu) in &g {
            for &(v, wv) in &g {
                let e = [(1.0 - v) * b[0] + v * d[0], (1.0 - v) * b[1] + v * d[1]];
                let x = [(1.0 - u) * c[0] + u * e[0], (1.0 - u) * c[1] + u * e[1]];
                out.push((x, wu * wv * u * area2));
            }
        }
    }
    out
}

pub fn segment_rule(a: Point, b: Point) -> Vec<(Point, f64)> {
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    gauss01(POINTS)
        .into_iter()
        .map(|(s, w)| ([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])], w * len))
        .collect()
}

fn diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for p in poly {
        for q in poly {
            d = d.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
        }
    }
    d
}

/// Unit normal of segment `a b` pointing away from `inside`.
fn outward(a: Point, b: Point, inside: Point) -> Point {
    let t = [b[0] - a[0], b[1] - a[1]];
    let l = (t[0] * t[0] + t[1] * t[1]).sqrt();
    let n = [t[1] / l, -t[0] / l];
    let m = [0.5 * (a[0] + b[0]) - inside[0], 0.5 * (a[1] + b[1]) - inside[1]];
    if n[0] * m[0] + n[1] * m[1] < 0.0 {
        [-n[0], -n[1]]
    } else {
        n
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b <= 0.0 {
        0.0
    } else {
        a * b / (a + b)
    }
}

/// `(ω⁺, ω⁻)` for coefficients `a⁺, a⁻`.
fn omegas(a: f64, b: f64) -> (f64, f64) {
    if a + b <= 0.0 {
        (0.5, 0.5)
    } else {
        (b / (a + b), a / (a + b))
    }
}

fn ndn(d: &[[f64; 2]; 2], n: Point) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += n[i] * d[i][j] * n[j];
        }
    }
    s
}

fn largest_eigenvalue(d: &[[f64; 2]; 2]) -> f64 {
    let tr = d[0][0] + d[1][1];
    let det = d[0][0] * d[1][1] - d[0][1] * d[1][0];
    0.5 * tr + (0.25 * tr * tr - det).max(0.0).sqrt()
}

/// A vector-valued or scalar basis function with its trace on one element.
#[derive(Clone, Copy)]
struct Shape {
    dof: usize,
    element: usize,
    value: Point,
    grad: [[f64; 2]; 2],
}

impl Shape {
    fn div(&self) -> f64 {
        self.grad[0][0] + self.grad[1][1]
    }

    fn strain(&self) -> [[f64; 2]; 2] {
        let g = self.grad;
        [[g[0][0], 0.5 * (g[0][1] + g[1][0])], [0.5 * (g[0][1] + g[1][0]), g[1][1]]]
    }
}

/// Coefficient selector for the displacement forms.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Coef {
    Mu,
    MuDelta1,
    Lambda,
    LambdaDelta2,
}

impl Coef {
    fn of(self, m: &Material) -> f64 {
        match self {
            Coef::Mu => m.mu,
            Coef::MuDelta1 => m.mu * m.delta1,
            Coef::Lambda => m.lambda,
            Coef::LambdaDelta2 => m.lambda * m.delta2,
        }
    }
}

pub struct Oracle<'a> {
    pub space: &'a DgSpace,
    pub mesh: Arc<PolyMesh>,
    pub coeffs: &'a CoefficientField,
    pub alpha: [f64; 5],
    pub u_dirichlet: Vec<bool>,
    pub p_dirichlet: Vec<bool>,
}

/// Interior and boundary face geometry as seen by the oracle.
struct FaceGeom {
    elements: Vec<usize>,
    /// Outward normal of the first element.
    normal: Point,
    rule: Vec<(Point, f64)>,
}

impl<'a> Oracle<'a> {
    pub fn new(space: &'a DgSpace, coeffs: &'a CoefficientField, bcs: &BoundaryConditions, alpha: f64) -> Self {
        let mesh = space.mesh.clone();
        let cond = |tag| bcs.condition(tag).expect("every tag has a condition");
        let u_dirichlet = mesh.boundary_faces.iter().map(|f| cond(f.tag).displacement == FieldBc::Dirichlet).collect();
        let p_dirichlet = mesh.boundary_faces.iter().map(|f| cond(f.tag).pressure == FieldBc::Dirichlet).collect();
        Oracle { space, mesh, coeffs, alpha: [alpha; 5], u_dirichlet, p_dirichlet }
    }

    fn mat(&self, k: usize) -> &Material {
        self.coeffs.get(k)
    }

    fn degree(&self, k: usize) -> usize {
        self.space.bases[k].degree
    }

    fn h(&self, k: usize) -> f64 {
        diameter(&self.mesh.polygon(k))
    }

    fn scale(&self, k: usize) -> f64 {
        (self.degree(k) * self.degree(k)) as f64 / self.h(k)
    }

    fn n_u(&self) -> usize {
        self.space.n_vector()
    }

    fn n_p(&self) -> usize {
        self.space.n_scalar
    }

    fn vector_shapes(&self, k: usize, x: Point) -> Vec<Shape> {
        let (v, g) = self.space.bases[k].eval(x);
        let n = v.len();
        let r = self.space.vector_range(k);
        let mut out = Vec::with_capacity(2 * n);
        for a in 0..2 {
            for i in 0..n {
                let mut value = [0.0; 2];
                let mut grad = [[0.0; 2]; 2];
                value[a] = v[i];
                grad[a] = g[i];
                out.push(Shape { dof: r.start + a * n + i, element: k, value, grad });
            }
        }
        out
    }

    /// Scalar shapes store the value in `value[0]` and the gradient in `grad[0]`.
    fn scalar_shapes(&self, k: usize, x: Point) -> Vec<Shape> {
        let (v, g) = self.space.bases[k].eval(x);
        let r = self.space.scalar_range(k);
        (0..v.len())
            .map(|i| Shape { dof: r.start + i, element: k, value: [v[i], 0.0], grad: [g[i], [0.0; 2]] })
            .collect()
    }

    fn interior_geoms(&self) -> Vec<FaceGeom> {
        self.mesh
            .interior_faces
            .iter()
            .map(|f| FaceGeom {
                elements: f.elements.to_vec(),
                normal: outward(f.a, f.b, self.mesh.elements[f.elements[0]].centroid),
                rule: segment_rule(f.a, f.b),
            })
            .collect()
    }

    fn boundary_geoms(&self, mask: &[bool]) -> Vec<(usize, FaceGeom)> {
        self.mesh
            .boundary_faces
            .iter()
            .enumerate()
            .filter(|(i, _)| mask[*i])
            .map(|(i, f)| {
                (i, FaceGeom {
                    elements: vec![f.element],
                    normal: outward(f.a, f.b, self.mesh.elements[f.element].centroid),
                    rule: segment_rule(f.a, f.b),
                })
            })
            .collect()
    }

    /// Weighted mass `(w u, v)` for a vector or scalar space.
    pub fn mass(&self, weight: impl Fn(&Material) -> f64, vector: bool) -> Dense {
        let n = if vector { self.n_u() } else { self.n_p() };
        let mut m = vec![vec![0.0; n]; n];
        for k in 0..self.mesh.n_elements() {
            let c = weight(self.mat(k));
            for (x, w) in polygon_rule(&self.mesh.polygon(k)) {
                let s = if vector { self.vector_shapes(k, x) } else { self.scalar_shapes(k, x) };
                for t in &s {
                    for u in &s {
                        m[t.dof][u.dof] += w * c * (u.value[0] * t.value[0] + u.value[1] * t.value[1]);
                    }
                }
            }
        }
        m
    }

    /// `2q ε(u):ε(v)` form with weighted interior-penalty face terms.
    pub fn elasticity(&self, q: Coef, full: bool) -> Dense {
        let pen_index = if q == Coef::Mu { 0 } else { 1 };
        self.vector_form(
            q,
            pen_index,
            full,
            |c, u, v| {
                let (eu, ev) = (u.strain(), v.strain());
                2.0 * c * (0..2).map(|i| (0..2).map(|j| eu[i][j] * ev[i][j]).sum::<f64>()).sum::<f64>()
            },
            // traction of trial against jump of test: {2q ε(u)}: (v ⊗ n)
            |c, u, v, n| {
                let e = u.strain();
                let mut s = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        s += 2.0 * c * e[i][j] * v.value[i] * n[j];
                    }
                }
                s
            },
            |u, v, nu, nv| (u.value[0] * v.value[0] + u.value[1] * v.value[1]) * (nu[0] * nv[0] + nu[1] * nv[1]),
        )
    }

    /// `q div u div v` form with weighted interior-penalty face terms.
    pub fn divergence(&self, q: Coef, full: bool) -> Dense {
        let pen_index = if q == Coef::Lambda { 2 } else { 3 };
        self.vector_form(
            q,
            pen_index,
            full,
            |c, u, v| c * u.div() * v.div(),
            |c, u, v, n| c * u.div() * (v.value[0] * n[0] + v.value[1] * n[1]),
            |u, v, nu, nv| (u.value[0] * nu[0] + u.value[1] * nu[1]) * (v.value[0] * nv[0] + v.value[1] * nv[1]),
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn vector_form(
        &self,
        q: Coef,
        pen_index: usize,
        full: bool,
        volume: impl Fn(f64, &Shape, &Shape) -> f64,
        flux: impl Fn(f64, &Shape, &Shape, Point) -> f64,
        jumps: impl Fn(&Shape, &Shape, Point, Point) -> f64,
    ) -> Dense {
        let n = self.n_u();
        let mut m = vec![vec![0.0; n]; n];
        for k in 0..self.mesh.n_elements() {
            let c = q.of(self.mat(k));
            for (x, w) in polygon_rule(&self.mesh.polygon(k)) {
                let s = self.vector_shapes(k, x);
                for t in &s {
                    for u in &s {
                        m[t.dof][u.dof] += w * volume(c, u, t);
                    }
                }
            }
        }
        let mut faces: Vec<(FaceGeom, [f64; 2], f64)> = Vec::new();
        for g in self.interior_geoms() {
            let (kp, km) = (g.elements[0], g.elements[1]);
            let (qp, qm) = (q.of(self.mat(kp)), q.of(self.mat(km)));
            let (wp, wm) = omegas(qp, qm);
            let pen = self.alpha[pen_index] * harmonic(qp, qm) * self.scale(kp).max(self.scale(km));
            faces.push((g, [wp, wm], pen));
        }
        for (_, g) in self.boundary_geoms(&self.u_dirichlet) {
            let k = g.elements[0];
            let pen = self.alpha[pen_index] * q.of(self.mat(k)) * self.scale(k);
            faces.push((g, [1.0, 0.0], pen));
        }
        for (g, om, pen) in faces {
            for &(x, w) in &g.rule {
                // shapes with the outward normal of their own element
                let mut shapes: Vec<(Shape, Point, f64, f64)> = Vec::new();
                for (s, &k) in g.elements.iter().enumerate() {
                    let nk = if s == 0 { g.normal } else { [-g.normal[0], -g.normal[1]] };
                    for sh in self.vector_shapes(k, x) {
                        shapes.push((sh, nk, om[s], q.of(self.mat(k))));
                    }
                }
                for (t, nt, wt, ct) in &shapes {
                    for (u, nu, wu, cu) in &shapes {
                        let mut v = pen * jumps(u, t, *nu, *nt);
                        if full {
                            v -= flux(wu * cu, u, t, *nt) + flux(wt * ct, t, u, *nu);
                        }
                        m[t.dof][u.dof] += w * v;
                    }
                }
            }
        }
        m
    }

    /// `(D ∇p, ∇q)` with weighted averages of normal fluxes.
    pub fn diffusion(&self, full: bool) -> Dense {
        let n = self.n_p();
        let mut m = vec![vec![0.0; n]; n];
        let flux = |d: &[[f64; 2]; 2], g: Point, nv: Point| {
            (0..2).map(|i| (0..2).map(|j| d[i][j] * g[j]).sum::<f64>() * nv[i]).sum::<f64>()
        };
        for k in 0..self.mesh.n_elements() {
            let d = self.mat(k).diffusivity;
            for (x, w) in polygon_rule(&self.mesh.polygon(k)) {
                let s = self.scalar_shapes(k, x);
                for t in &s {
                    for u in &s {
                        m[t.dof][u.dof] += w * flux(&d, u.grad[0], t.grad[0]);
                    }
                }
            }
        }
        let mut faces: Vec<(FaceGeom, [f64; 2], f64)> = Vec::new();
        for g in self.interior_geoms() {
            let (kp, km) = (g.elements[0], g.elements[1]);
            let (qp, qm) = (ndn(&self.mat(kp).diffusivity, g.normal), ndn(&self.mat(km).diffusivity, g.normal));
            let (wp, wm) = omegas(qp, qm);
            let pen = self.alpha[4] * harmonic(qp, qm) * self.scale(kp).max(self.scale(km));
            faces.push((g, [wp, wm], pen));
        }
        for (_, g) in self.boundary_geoms(&self.p_dirichlet) {
            let k = g.elements[0];
            let pen = self.alpha[4] * largest_eigenvalue(&self.mat(k).diffusivity) * self.scale(k);
            faces.push((g, [1.0, 0.0], pen));
        }
        for (g, om, pen) in faces {
            for &(x, w) in &g.rule {
                let mut shapes: Vec<(Shape, Point, f64)> = Vec::new();
                for (s, &k) in g.elements.iter().enumerate() {
                    let nk = if s == 0 { g.normal } else { [-g.normal[0], -g.normal[1]] };
                    for sh in self.scalar_shapes(k, x) {
                        shapes.push((sh, nk, om[s]));
                    }
                }
                for (t, nt, wt) in &shapes {
                    for (u, nu, wu) in &shapes {
                        let (du, dt) = (self.mat(u.element).diffusivity, self.mat(t.element).diffusivity);
                        let mut v = pen * u.value[0] * t.value[0] * (nu[0] * nt[0] + nu[1] * nt[1]);
                        if full {
                            v -= wu * flux(&du, u.grad[0], *nt) * t.value[0] + wt * flux(&dt, t.grad[0], *nu) * u.value[0];
                        }
                        m[t.dof][u.dof] += w * v;
                    }
                }
            }
        }
        m
    }

    /// `(q div u, ψ) - Σ_F ∫ {ψ} ⟦q u⟧_n`, scalar rows and vector columns.
    pub fn coupling(&self, q: impl Fn(&Material) -> f64) -> Dense {
        let mut m = vec![vec![0.0; self.n_u()]; self.n_p()];
        for k in 0..self.mesh.n_elements() {
            let c = q(self.mat(k));
            for (x, w) in polygon_rule(&self.mesh.polygon(k)) {
                for t in self.scalar_shapes(k, x) {
                    for u in self.vector_shapes(k, x) {
                        m[t.dof][u.dof] += w * c * u.div() * t.value[0];
                    }
                }
            }
        }
        let mut faces: Vec<FaceGeom> = self.interior_geoms();
        faces.extend(self.boundary_geoms(&self.u_dirichlet).into_iter().map(|(_, g)| g));
        for g in faces {
            let avg = 1.0 / g.elements.len() as f64;
            for &(x, w) in &g.rule {
                for (s, &ks) in g.elements.iter().enumerate() {
                    let ns = if s == 0 { g.normal } else { [-g.normal[0], -g.normal[1]] };
                    let c = q(self.mat(ks));
                    for u in self.vector_shapes(ks, x) {
                        let jn = c * (u.value[0] * ns[0] + u.value[1] * ns[1]);
                        for &kt in &g.elements {
                            for t in self.scalar_shapes(kt, x) {
                                m[t.dof][u.dof] -= w * avg * t.value[0] * jn;
                            }
                        }
                    }
                }
            }
        }
        m
    }

    /// Load vectors: volume sources plus the symmetric Nitsche lifting of the
    /// Dirichlet data.
    pub fn rhs(&self, loading: &dyn Loading, t: f64) -> (Vec<f64>, Vec<f64>) {
        let mut f = vec![0.0; self.n_u()];
        let mut g = vec![0.0; self.n_p()];
        for k in 0..self.mesh.n_elements() {
            for (x, w) in polygon_rule(&self.mesh.polygon(k)) {
                let b = loading.body_force(x, t);
                let s = loading.mass_source(x, t);
                for v in self.vector_shapes(k, x) {
                    f[v.dof] += w * (b[0] * v.value[0] + b[1] * v.value[1]);
                }
                for q in self.scalar_shapes(k, x) {
                    g[q.dof] += w * s * q.value[0];
                }
            }
        }
        for (i, geom) in self.boundary_geoms(&self.u_dirichlet) {
            let k = geom.elements[0];
            let m = *self.mat(k);
            let n = geom.normal;
            let parts = [
                (0usize, Coef::Mu, Coef::Lambda, 0usize, 2usize),
                (1usize, Coef::MuDelta1, Coef::LambdaDelta2, 1usize, 3usize),
            ];
            let _ = i;
            for &(x, w) in &geom.rule {
                let data = loading.displacement_data(x, t);
                for &(which, cm, cl, ps, px) in &parts {
                    let gd = data[which];
                    let (mu, la) = (cm.of(&m), cl.of(&m));
                    let sigma = self.alpha[ps] * mu * self.scale(k);
                    let xi = self.alpha[px] * la * self.scale(k);
                    let gn = gd[0] * n[0] + gd[1] * n[1];
                    for v in self.vector_shapes(k, x) {
                        let e = v.strain();
                        let mut traction = 0.0;
                        for a in 0..2 {
                            for b in 0..2 {
                                traction += 2.0 * mu * e[a][b] * gd[a] * n[b];
                            }
                        }
                        let vn = v.value[0] * n[0] + v.value[1] * n[1];
                        f[v.dof] += w * (sigma * (gd[0] * v.value[0] + gd[1] * v.value[1]) - traction + xi * gn * vn
                            - la * v.div() * gn);
                    }
                }
                let rate = m.gamma * ((data[1][0] + m.tau2 * data[2][0]) * n[0] + (data[1][1] + m.tau2 * data[2][1]) * n[1]);
                for q in self.scalar_shapes(k, x) {
                    g[q.dof] -= w * rate * q.value[0];
                }
            }
        }
        for (_, geom) in self.boundary_geoms(&self.p_dirichlet) {
            let k = geom.elements[0];
            let d = self.mat(k).diffusivity;
            let zeta = self.alpha[4] * largest_eigenvalue(&d) * self.scale(k);
            let n = geom.normal;
            for &(x, w) in &geom.rule {
                let p = loading.pressure_data(x, t);
                for q in self.scalar_shapes(k, x) {
                    let gq = q.grad[0];
                    let fl = (0..2).map(|i| (0..2).map(|j| d[i][j] * gq[j]).sum::<f64>() * n[i]).sum::<f64>();
                    g[q.dof] += w * p * (zeta * q.value[0] - fl);
                }
            }
        }
        (f, g)
    }
}

/// `max |a - b|` relative to `max(1, max |b|)`.
pub fn relative_gap(a: &CsrMatrix, b: &Dense) -> f64 {
    let da = a.to_dense();
    assert_eq!((da.len(), da.first().map_or(0, |r| r.len())), (b.len(), b.first().map_or(0, |r| r.len())));
    let scale = b.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
    da.iter().flatten().zip(b.iter().flatten()).fold(0.0f64, |s, (x, y)| s.max((x - y).abs())) / scale
}

pub fn relative_gap_vec(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |s, (x, y)| s.max((x - y).abs())) / scale
}

/// Quadratic data everywhere, so every quadrature in play is exact.
pub struct QuadraticLoading;

impl Loading for QuadraticLoading {
    fn body_force(&self, x: Point, t: f64) -> Point {
        [1.0 + x[0] * x[1] - t * x[1] * x[1], 0.5 * x[0] * x[0] - 2.0 * x[1] + t]
    }

    fn mass_source(&self, x: Point, t: f64) -> f64 {
        x[0] - 3.0 * t * x[0] * x[1] + 0.25
    }

    fn displacement_data(&self, x: Point, t: f64) -> [Point; 3] {
        [
            [x[0] * x[1] + t, 1.0 - x[0] * x[0]],
            [x[1] * x[1], 2.0 * x[0] - t * x[1]],
            [0.3 * x[0], x[0] * x[1] + 0.5],
        ]
    }

    fn pressure_data(&self, x: Point, t: f64) -> f64 {
        x[0] * x[0] - x[1] + 2.0 * t
    }
}

/// Small randomized discretization for the equivalence checks.
#[derive(Debug, Clone)]
pub struct Case {
    pub rect: Rect,
    /// `Ok((nx, ny))` for a grid, `Err((cells, seed))` for a Voronoi mesh.
    pub grid: Result<(usize, usize), (usize, u64)>,
    pub degrees: Vec<usize>,
    pub materials: Vec<Material>,
    pub conditions: [TagCondition; 4],
    pub t: f64,
}

impl Case {
    pub fn mesh(&self) -> Arc<PolyMesh> {
        Arc::new(match self.grid {
            Ok((nx, ny)) => PolyMesh::cartesian(self.rect, nx, ny).unwrap(),
            Err((n, seed)) => generate_voronoi(self.rect, n, 2, seed).unwrap(),
        })
    }

    pub fn bcs(&self) -> BoundaryConditions {
        (0..4).fold(BoundaryConditions::all_dirichlet(), |b, i| b.with_tag(i as u32 + 1, self.conditions[i]))
    }

    pub fn discretization(&self) -> Discretization {
        let mesh = self.mesh();
        let n = mesh.n_elements();
        let degrees: Vec<usize> = (0..n).map(|k| self.degrees[k % self.degrees.len()]).collect();
        let materials = (0..n).map(|k| self.materials[k % self.materials.len()]).collect();
        let space = build_space(mesh, &degrees).unwrap();
        Discretization::new(space, CoefficientField { materials }, &self.bcs(), PenaltyParams::default()).unwrap()
    }
}

fn material() -> impl Strategy<Value = Material> {
    let zero_or = |lo: f64, hi: f64| prop_oneof![1 => Just(0.0), 3 => lo..hi];
    (
        (0.5f64..3.0, 0.5f64..4.0, 0.0f64..5.0, zero_or(0.01, 0.5), zero_or(0.01, 0.5)),
        (zero_or(0.2, 2.0), 0.1f64..2.0, 0.2f64..3.0, 0.2f64..3.0, -0.4f64..0.4),
        (zero_or(0.01, 1.0), zero_or(0.01, 1.0)),
    )
        .prop_map(|((rho, mu, lambda, delta1, delta2), (gamma, d0, dxx, dyy, dxy), (tau1, tau2))| Material {
            rho,
            mu,
            lambda,
            delta1,
            delta2,
            gamma,
            d0,
            diffusivity: [[dxx, dxy], [dxy, dyy]],
            tau1,
            tau2,
        })
}

fn condition() -> impl Strategy<Value = TagCondition> {
    let field = || prop_oneof![Just(FieldBc::Dirichlet), Just(FieldBc::Neumann)];
    (field(), field()).prop_map(|(displacement, pressure)| TagCondition { displacement, pressure })
}

pub fn case() -> impl Strategy<Value = Case> {
    let grid = prop_oneof![
        (1usize..=2, 1usize..=2).prop_map(Ok),
        (2usize..=4, any::<u64>()).prop_map(Err),
    ];
    let rect = (0.3f64..2.0, 0.3f64..2.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(w, h, x0, y0)| Rect { x0, y0, x1: x0 + w, y1: y0 + h });
    (
        rect,
        grid,
        proptest::collection::vec(1usize..=2, 4),
        proptest::collection::vec(material(), 4),
        [condition(), condition(), condition(), condition()],
        0.0f64..1.0,
    )
        .prop_map(|(rect, grid, degrees, materials, conditions, t)| Case { rect, grid, degrees, materials, conditions, t })
}

/// Relative gap of every library operator, norm variant and load vector
/// against its oracle counterpart.
pub fn gaps(case: &Case) -> Vec<(&'static str, f64)> {
    let d = case.discretization();
    let oracle = Oracle::new(&d.space, &d.coeffs, &case.bcs(), PenaltyParams::default().alphas[0]);
    let ops = BlockOperators::assemble(&d).unwrap();
    let norm_elastic = |visc| assemble_elasticity(&d, visc, Parts::Norm).unwrap();
    let norm_div = |visc| assemble_div(&d, visc, Parts::Norm).unwrap();
    let loading = QuadraticLoading;
    let (f, g) = assemble_rhs(&d, &loading, case.t);
    let (fo, go) = oracle.rhs(&loading, case.t);
    vec![
        ("mass_u", relative_gap(&ops.mass_u, &oracle.mass(|m| m.rho, true))),
        ("mass_phi", relative_gap(&ops.mass_phi, &oracle.mass(|m| m.d0, false))),
        ("mass_phi_tau1", relative_gap(&ops.mass_phi_tau1, &oracle.mass(|m| m.d0 * m.tau1, false))),
        ("elastic", relative_gap(&ops.elastic, &oracle.elasticity(Coef::Mu, true))),
        ("elastic_visc", relative_gap(&ops.elastic_visc, &oracle.elasticity(Coef::MuDelta1, true))),
        ("div", relative_gap(&ops.div, &oracle.divergence(Coef::Lambda, true))),
        ("div_visc", relative_gap(&ops.div_visc, &oracle.divergence(Coef::LambdaDelta2, true))),
        ("diffusion", relative_gap(&ops.diffusion, &oracle.diffusion(true))),
        ("coupling", relative_gap(&ops.coupling, &oracle.coupling(|m| m.gamma))),
        ("coupling_tau2", relative_gap(&ops.coupling_tau2, &oracle.coupling(|m| m.gamma * m.tau2))),
        ("elastic_norm", relative_gap(&norm_elastic(false), &oracle.elasticity(Coef::Mu, false))),
        ("elastic_visc_norm", relative_gap(&norm_elastic(true), &oracle.elasticity(Coef::MuDelta1, false))),
        ("div_norm", relative_gap(&norm_div(false), &oracle.divergence(Coef::Lambda, false))),
        ("div_visc_norm", relative_gap(&norm_div(true), &oracle.divergence(Coef::LambdaDelta2, false))),
        ("diffusion_norm", relative_gap(&assemble_diffusion(&d, Parts::Norm).unwrap(), &oracle.diffusion(false))),
        ("load_u", relative_gap_vec(&f, &fo)),
        ("load_phi", relative_gap_vec(&g, &go)),
    ]
}

pub fn worst_gap(case: &Case) -> f64 {
    gaps(case).into_iter().map(|(_, g)| g).fold(0.0, f64::max)
}

/// Zero-forcing run with damping for the energy checks. Relaxed cases use a
/// uniform `τ₁ = τ₂ > 0` and the Newmark scheme; the others set `τ₁ = τ₂ = 0`
/// and use the coupled θ scheme.
#[derive(Debug, Clone)]
pub struct DampedCase {
    pub cells: usize,
    pub seed: u64,
    pub degree: usize,
    pub materials: Vec<Material>,
    pub tau: f64,
    pub dt: f64,
    pub steps: usize,
}

fn damped_material() -> impl Strategy<Value = Material> {
    (
        (0.5f64..2.0, 0.5f64..2.0, 0.0f64..3.0, 0.01f64..1.0, 0.01f64..1.0),
        (0.0f64..2.0, 0.1f64..2.0, 0.1f64..2.0, 0.1f64..2.0, -0.05f64..0.05),
    )
        .prop_map(|((rho, mu, lambda, delta1, delta2), (gamma, d0, dxx, dyy, dxy))| Material {
            rho,
            mu,
            lambda,
            delta1,
            delta2,
            gamma,
            d0,
            diffusivity: [[dxx, dxy], [dxy, dyy]],
            tau1: 0.0,
            tau2: 0.0,
        })
}

pub fn damped_case() -> impl Strategy<Value = DampedCase> {
    (
        6usize..=12,
        any::<u64>(),
        1usize..=2,
        proptest::collection::vec(damped_material(), 3),
        prop_oneof![Just(0.0), 0.05f64..1.0],
        1e-3f64..5e-2,
    )
        .prop_map(|(cells, seed, degree, mut materials, tau, dt)| {
            for m in &mut materials {
                m.tau1 = tau;
                m.tau2 = tau;
            }
            DampedCase { cells, seed, degree, materials, tau, dt, steps: 40 }
        })
}

/// Deterministic pseudo-random initial data.
pub fn wiggle(n: usize, phase: f64) -> Vec<f64> {
    (0..n).map(|i| (1.7 * i as f64 + phase).sin() * (0.3 * i as f64 + 2.0 * phase).cos()).collect()
}

pub fn damped_trace(case: &DampedCase) -> EnergyTrace {
    let mesh = Arc::new(generate_voronoi(Rect::unit(), case.cells, 2, case.seed).unwrap());
    let n = mesh.n_elements();
    let materials = (0..n).map(|k| case.materials[k % case.materials.len()]).collect();
    let problem = Problem::new(
        mesh.clone(),
        &vec![case.degree; n],
        CoefficientField { materials },
        &BoundaryConditions::all_dirichlet(),
        PenaltyParams::default(),
    )
    .unwrap();
    let (nu, np) = (problem.ops.n_u(), problem.ops.n_phi());
    let init = InitialData { u: wiggle(nu, 0.1), z: wiggle(nu, 0.7), phi: wiggle(np, 1.3), phi_dot: wiggle(np, 2.9) };
    let cfg = IntegratorConfig::new(case.dt, case.dt * case.steps as f64);
    energy_trace(&problem, &ZeroLoading, init, cfg).unwrap()
}

/// Largest relative per-step energy change of the undamped, decoupled
/// elastic limit under trapezoidal Newmark.
pub fn undamped_drift() -> f64 {
    let mesh = Arc::new(generate_voronoi(Rect::unit(), 24, 5, 3).unwrap());
    let n = mesh.n_elements();
    let m = Material {
        rho: 1.0,
        mu: 1.0,
        lambda: 2.0,
        delta1: 0.0,
        delta2: 0.0,
        gamma: 0.0,
        d0: 1.0,
        diffusivity: [[0.0; 2]; 2],
        tau1: 1.0,
        tau2: 0.0,
    };
    let problem = Problem::new(
        mesh,
        &vec![2; n],
        CoefficientField::uniform(n, m),
        &BoundaryConditions::all_dirichlet(),
        PenaltyParams::default(),
    )
    .unwrap();
    let (nu, np) = (problem.ops.n_u(), problem.ops.n_phi());
    let init = InitialData { u: wiggle(nu, 0.4), z: wiggle(nu, 1.1), phi: vec![0.0; np], phi_dot: vec![0.0; np] };
    let trace = energy_trace(&problem, &ZeroLoading, init, IntegratorConfig::new(1e-2, 2.0)).unwrap();
    trace.max_relative_change()
}
