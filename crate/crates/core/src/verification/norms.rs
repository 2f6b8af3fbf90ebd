//! L² and dG error norms evaluated with overkill quadrature.

use rayon::prelude::*;

use super::manufactured::ExactFields;
use crate::assembly::Discretization;
use crate::basis::{element_quadrature, face_quadrature};
use crate::geometry::Point;
use crate::quadrature::{segment_rule, triangle_rule};

/// Errors of one discrete state against an exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldErrors {
    pub u_l2: f64,
    pub u_dg: f64,
    pub phi_l2: f64,
    pub phi_dg: f64,
}

impl FieldErrors {
    pub fn as_array(&self) -> [f64; 4] {
        [self.u_l2, self.u_dg, self.phi_l2, self.phi_dg]
    }
}

/// Squared contributions, summed before the final square roots.
#[derive(Default, Clone, Copy)]
struct Squares([f64; 4]);

impl Squares {
    fn add(mut self, o: Squares) -> Squares {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
        self
    }
}

/// Discrete displacement and pressure on element `k` at `x`.
fn discrete_at(d: &Discretization, k: usize, u: &[f64], phi: &[f64], x: Point) -> (Point, [[f64; 2]; 2], f64, Point) {
    let basis = &d.space.bases[k];
    let (v, g) = basis.eval(x);
    let n = v.len();
    let cu = &u[d.space.vector_range(k)];
    let cp = &phi[d.space.scalar_range(k)];
    let mut uv = [0.0; 2];
    let mut ug = [[0.0; 2]; 2];
    let mut pv = 0.0;
    let mut pg = [0.0; 2];
    for i in 0..n {
        for a in 0..2 {
            let c = cu[a * n + i];
            uv[a] += c * v[i];
            ug[a][0] += c * g[i][0];
            ug[a][1] += c * g[i][1];
        }
        pv += cp[i] * v[i];
        pg[0] += cp[i] * g[i][0];
        pg[1] += cp[i] * g[i][1];
    }
    (uv, ug, pv, pg)
}

/// Errors `‖u - u_h‖` and `‖φ - φ_h‖` in the L² and dG norms at time `t`.
///
/// The dG norms are
/// `‖v‖²_{dG,e} = ‖√(2μ) ε_h(v)‖² + ‖√λ div_h v‖² + Σ_F σ‖⟦v⟧‖² + ξ‖⟦v⟧_n‖²` and
/// `‖q‖²_{dG,φ} = ‖√D ∇_h q‖² + Σ_F ζ‖⟦q⟧‖²`, with face sums over interior
/// faces and Dirichlet boundary faces. Volume integrals use rules exact to
/// degree `2ℓ+4`.
pub fn compute_errors(d: &Discretization, u: &[f64], phi: &[f64], exact: &dyn ExactFields, t: f64) -> FieldErrors {
    let space = &d.space;
    let mesh = &space.mesh;

    let volume = (0..space.n_elements())
        .into_par_iter()
        .map(|k| {
            let m = d.coeffs.get(k);
            let rule = triangle_rule(2 * space.bases[k].degree + 4);
            let (pts, wts) = element_quadrature(mesh, k, &rule);
            let mut s = Squares::default();
            for (x, w) in pts.into_iter().zip(wts) {
                let (uh, guh, ph, gph) = discrete_at(d, k, u, phi, x);
                let (ue, gue) = exact.displacement(x, t);
                let (pe, gpe) = exact.pressure(x, t);
                let eu = [uh[0] - ue[0], uh[1] - ue[1]];
                let ge: [[f64; 2]; 2] = std::array::from_fn(|a| std::array::from_fn(|b| guh[a][b] - gue[a][b]));
                let ep = ph - pe;
                let gp = [gph[0] - gpe[0], gph[1] - gpe[1]];
                let off = 0.5 * (ge[0][1] + ge[1][0]);
                let eps2 = ge[0][0] * ge[0][0] + ge[1][1] * ge[1][1] + 2.0 * off * off;
                let div = ge[0][0] + ge[1][1];
                let dm = m.diffusivity;
                let flux = gp[0] * (dm[0][0] * gp[0] + dm[0][1] * gp[1]) + gp[1] * (dm[1][0] * gp[0] + dm[1][1] * gp[1]);
                s.0[0] += w * (eu[0] * eu[0] + eu[1] * eu[1]);
                s.0[1] += w * (2.0 * m.mu * eps2 + m.lambda * div * div);
                s.0[2] += w * ep * ep;
                s.0[3] += w * flux;
            }
            s
        })
        .reduce(Squares::default, Squares::add);

    let interior = (0..mesh.interior_faces.len())
        .into_par_iter()
        .map(|i| {
            let f = &mesh.interior_faces[i];
            let [kp, km] = f.elements;
            let deg = space.bases[kp].degree.max(space.bases[km].degree);
            let (pts, wts) = face_quadrature(f.a, f.b, &segment_rule(2 * deg + 4));
            let pen = d.penalties.interior[i];
            let n = f.normal;
            let mut s = Squares::default();
            for (x, w) in pts.into_iter().zip(wts) {
                let (up, _, pp, _) = discrete_at(d, kp, u, phi, x);
                let (um, _, pm, _) = discrete_at(d, km, u, phi, x);
                let j = [up[0] - um[0], up[1] - um[1]];
                let jn = j[0] * n[0] + j[1] * n[1];
                let jp = pp - pm;
                s.0[1] += w * (pen[0] * (j[0] * j[0] + j[1] * j[1]) + pen[2] * jn * jn);
                s.0[3] += w * pen[4] * jp * jp;
            }
            s
        })
        .reduce(Squares::default, Squares::add);

    let boundary = (0..mesh.boundary_faces.len())
        .into_par_iter()
        .filter(|&i| d.mask.u_dirichlet[i] || d.mask.p_dirichlet[i])
        .map(|i| {
            let f = &mesh.boundary_faces[i];
            let k = f.element;
            let (pts, wts) = face_quadrature(f.a, f.b, &segment_rule(2 * space.bases[k].degree + 4));
            let pen = d.penalties.boundary[i];
            let n = f.normal;
            let mut s = Squares::default();
            for (x, w) in pts.into_iter().zip(wts) {
                let (uh, _, ph, _) = discrete_at(d, k, u, phi, x);
                if d.mask.u_dirichlet[i] {
                    let (ue, _) = exact.displacement(x, t);
                    let j = [uh[0] - ue[0], uh[1] - ue[1]];
                    let jn = j[0] * n[0] + j[1] * n[1];
                    s.0[1] += w * (pen[0] * (j[0] * j[0] + j[1] * j[1]) + pen[2] * jn * jn);
                }
                if d.mask.p_dirichlet[i] {
                    let jp = ph - exact.pressure(x, t).0;
                    s.0[3] += w * pen[4] * jp * jp;
                }
            }
            s
        })
        .reduce(Squares::default, Squares::add);

    let total = volume.add(interior).add(boundary);
    let r = total.0.map(|v| v.max(0.0).sqrt());
    FieldErrors { u_l2: r[0], u_dg: r[1], phi_l2: r[2], phi_dg: r[3] }
}
