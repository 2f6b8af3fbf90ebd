//! Load vectors and symmetric Nitsche lifting of Dirichlet data.

use rayon::prelude::*;

use super::Discretization;
use crate::geometry::Point;
use crate::models::{source_eval, SourceSpec};

/// Volume sources and boundary data of a problem.
pub trait Loading: Sync {
    fn body_force(&self, _x: Point, _t: f64) -> Point {
        [0.0; 2]
    }

    fn mass_source(&self, _x: Point, _t: f64) -> f64 {
        0.0
    }

    /// Dirichlet displacement, velocity and acceleration.
    fn displacement_data(&self, _x: Point, _t: f64) -> [Point; 3] {
        [[0.0; 2]; 3]
    }

    fn pressure_data(&self, _x: Point, _t: f64) -> f64 {
        0.0
    }

    /// Whether all Dirichlet data vanish, which skips the lifting terms.
    fn homogeneous_boundary(&self) -> bool {
        false
    }

    /// Fixed loadings `L_j` with `L(t) = Σ_j c_j(t) L_j`, where `c_j` are
    /// the [`Loading::time_factors`], for loadings separable in time.
    fn separated(&self) -> Option<Vec<Box<dyn Loading + '_>>> {
        None
    }

    fn time_factors(&self, _t: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Load vectors over time; separable loadings are assembled once per
/// component and recombined at each time.
pub struct RhsAssembler<'a> {
    disc: &'a Discretization,
    loading: &'a dyn Loading,
    components: Option<Vec<(Vec<f64>, Vec<f64>)>>,
}

impl<'a> RhsAssembler<'a> {
    pub fn new(disc: &'a Discretization, loading: &'a dyn Loading) -> Self {
        let components = loading
            .separated()
            .map(|parts| parts.iter().map(|l| assemble_rhs(disc, l.as_ref(), 0.0)).collect());
        RhsAssembler { disc, loading, components }
    }

    pub fn assemble(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let Some(components) = &self.components else {
            return assemble_rhs(self.disc, self.loading, t);
        };
        let c = self.loading.time_factors(t);
        let mut f = vec![0.0; components[0].0.len()];
        let mut g = vec![0.0; components[0].1.len()];
        for (cj, (fj, gj)) in c.iter().zip(components) {
            if *cj == 0.0 {
                continue;
            }
            f.iter_mut().zip(fj).for_each(|(a, b)| *a += cj * b);
            g.iter_mut().zip(gj).for_each(|(a, b)| *a += cj * b);
        }
        (f, g)
    }
}

/// No sources, homogeneous boundary data.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroLoading;

impl Loading for ZeroLoading {
    fn homogeneous_boundary(&self) -> bool {
        true
    }
}

impl Loading for SourceSpec {
    fn body_force(&self, x: Point, t: f64) -> Point {
        source_eval(self, x, t).0
    }

    fn mass_source(&self, x: Point, t: f64) -> f64 {
        source_eval(self, x, t).1
    }

    fn homogeneous_boundary(&self) -> bool {
        true
    }
}

/// Right-hand sides `(F(t), G(t))` of the momentum and pressure equations.
pub fn assemble_rhs(d: &Discretization, loading: &dyn Loading, t: f64) -> (Vec<f64>, Vec<f64>) {
    let space = &d.space;
    let mesh = &space.mesh;
    let mut f = vec![0.0; space.n_vector()];
    let mut g = vec![0.0; space.n_scalar];

    let vol: Vec<(Vec<f64>, Vec<f64>)> = (0..space.n_elements())
        .into_par_iter()
        .map(|k| {
            let n = space.dim(k);
            let tab = &space.volume[k];
            let mut fk = vec![0.0; 2 * n];
            let mut gk = vec![0.0; n];
            for q in 0..tab.n_points() {
                let x = tab.points[q];
                let w = tab.weights[q];
                let b = loading.body_force(x, t);
                let s = loading.mass_source(x, t);
                let v = &tab.values[q * n..(q + 1) * n];
                for i in 0..n {
                    fk[i] += w * b[0] * v[i];
                    fk[n + i] += w * b[1] * v[i];
                    gk[i] += w * s * v[i];
                }
            }
            (fk, gk)
        })
        .collect();
    for (k, (fk, gk)) in vol.into_iter().enumerate() {
        f[space.vector_range(k)].copy_from_slice(&fk);
        g[space.scalar_range(k)].copy_from_slice(&gk);
    }

    if loading.homogeneous_boundary() {
        return (f, g);
    }

    for (fi, face) in mesh.boundary_faces.iter().enumerate() {
        let k = face.element;
        let n = space.dim(k);
        let m = d.coeffs.get(k);
        let tab = &space.boundary[fi];
        let side = &tab.sides[0];
        let nv = face.normal;
        let pen = d.penalties.boundary[fi];
        let r = space.vector_range(k);
        let rs = space.scalar_range(k);
        if d.mask.u_dirichlet[fi] {
            // elastic and viscous parts: (σ, μ, ξ, λ) acting on the displacement
            // data and (σ_δ1, μδ1, ξ_δ2, λδ2) on the velocity data
            let parts = [
                (pen[0], m.mu, pen[2], m.lambda, 0usize),
                (pen[1], m.mu * m.delta1, pen[3], m.lambda * m.delta2, 1usize),
            ];
            for q in 0..tab.weights.len() {
                let w = tab.weights[q];
                let x = tab.points[q];
                let data = loading.displacement_data(x, t);
                let psi = &side.values[q * n..(q + 1) * n];
                let gpsi = &side.grads[q * n..(q + 1) * n];
                for &(sigma, mu, xi, lambda, which) in &parts {
                    let u = data[which];
                    if sigma == 0.0 && mu == 0.0 && xi == 0.0 && lambda == 0.0 {
                        continue;
                    }
                    let un = u[0] * nv[0] + u[1] * nv[1];
                    for j in 0..n {
                        let gn = gpsi[j][0] * nv[0] + gpsi[j][1] * nv[1];
                        let ug = u[0] * gpsi[j][0] + u[1] * gpsi[j][1];
                        for b in 0..2 {
                            let v = sigma * u[b] * psi[j] - mu * (u[b] * gn + ug * nv[b])
                                + xi * un * psi[j] * nv[b]
                                - un * lambda * gpsi[j][b];
                            f[r.start + b * n + j] += w * v;
                        }
                    }
                }
                // coupling terms carried by the velocity and acceleration data
                let vn = data[1][0] * nv[0] + data[1][1] * nv[1];
                let an = data[2][0] * nv[0] + data[2][1] * nv[1];
                let c = m.gamma * (vn + m.tau2 * an);
                if c != 0.0 {
                    for j in 0..n {
                        g[rs.start + j] -= w * c * psi[j];
                    }
                }
            }
        }
        if d.mask.p_dirichlet[fi] {
            let zeta = pen[4];
            let dm = m.diffusivity;
            let dn = [dm[0][0] * nv[0] + dm[1][0] * nv[1], dm[0][1] * nv[0] + dm[1][1] * nv[1]];
            for q in 0..tab.weights.len() {
                let w = tab.weights[q];
                let p = loading.pressure_data(tab.points[q], t);
                if p == 0.0 {
                    continue;
                }
                let psi = &side.values[q * n..(q + 1) * n];
                let gpsi = &side.grads[q * n..(q + 1) * n];
                for j in 0..n {
                    g[rs.start + j] += w * p * (zeta * psi[j] - (gpsi[j][0] * dn[0] + gpsi[j][1] * dn[1]));
                }
            }
        }
    }
    (f, g)
}
