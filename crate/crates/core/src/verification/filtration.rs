//! Filtration velocity `w_h = D ∇_h φ_h` and relative flow differences.

use rayon::prelude::*;

use crate::basis::DgSpace;
use crate::geometry::Point;
use crate::models::CoefficientField;

/// Filtration velocity sampled at the volume quadrature points of each
/// element.
#[derive(Debug, Clone)]
pub struct FiltrationField {
    /// `w_h` at the quadrature points of element `k`.
    pub values: Vec<Vec<Point>>,
    pub weights: Vec<Vec<f64>>,
    pub areas: Vec<f64>,
}

/// `w_h = D ∇_h φ_h` on every element.
pub fn filtration_field(space: &DgSpace, phi: &[f64], coeffs: &CoefficientField) -> FiltrationField {
    let values = (0..space.n_elements())
        .into_par_iter()
        .map(|k| {
            let tab = &space.volume[k];
            let n = space.dim(k);
            let c = &phi[space.scalar_range(k)];
            let d = coeffs.get(k).diffusivity;
            (0..tab.n_points())
                .map(|q| {
                    let mut g = [0.0; 2];
                    for i in 0..n {
                        g[0] += c[i] * tab.grads[q * n + i][0];
                        g[1] += c[i] * tab.grads[q * n + i][1];
                    }
                    [d[0][0] * g[0] + d[0][1] * g[1], d[1][0] * g[0] + d[1][1] * g[1]]
                })
                .collect()
        })
        .collect();
    let weights = space.volume.iter().map(|t| t.weights.clone()).collect();
    let areas = space.mesh.elements.iter().map(|e| e.area).collect();
    FiltrationField { values, weights, areas }
}

impl FiltrationField {
    /// `‖w_h‖_{L²(K)}` per element.
    pub fn element_norms(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.element_sq(k, |w| w).sqrt()).collect()
    }

    /// Root-mean-square magnitude `|w_h|` per element.
    pub fn element_magnitudes(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| (self.element_sq(k, |w| w) / self.areas[k]).sqrt()).collect()
    }

    /// Mean `w_h` per element.
    pub fn element_means(&self) -> Vec<Point> {
        (0..self.values.len())
            .map(|k| {
                let mut s = [0.0; 2];
                for (w, q) in self.values[k].iter().zip(&self.weights[k]) {
                    s[0] += q * w[0];
                    s[1] += q * w[1];
                }
                [s[0] / self.areas[k], s[1] / self.areas[k]]
            })
            .collect()
    }

    pub fn global_norm(&self) -> f64 {
        (0..self.values.len()).map(|k| self.element_sq(k, |w| w)).sum::<f64>().sqrt()
    }

    fn element_sq(&self, k: usize, f: impl Fn(Point) -> Point) -> f64 {
        self.values[k].iter().zip(&self.weights[k]).map(|(w, q)| {
            let v = f(*w);
            q * (v[0] * v[0] + v[1] * v[1])
        }).sum()
    }
}

/// Per-element `‖w_a − w_b‖_{L²(K)} / ‖w_ref‖_{L²(Ω)}` together with the
/// global value `‖w_a − w_b‖_{L²(Ω)} / ‖w_ref‖_{L²(Ω)}`.
///
/// All three fields must live on the same space. A vanishing reference norm
/// makes the measure undefined and yields NaN.
pub fn relative_flow_difference(a: &FiltrationField, b: &FiltrationField, reference: &FiltrationField) -> (Vec<f64>, f64) {
    let denom = reference.global_norm();
    let per: Vec<f64> = (0..a.values.len())
        .map(|k| {
            a.values[k]
                .iter()
                .zip(&b.values[k])
                .zip(&a.weights[k])
                .map(|((wa, wb), q)| q * ((wa[0] - wb[0]).powi(2) + (wa[1] - wb[1]).powi(2)))
                .sum::<f64>()
        })
        .collect();
    let global = per.iter().sum::<f64>().sqrt();
    if denom == 0.0 {
        return (vec![f64::NAN; per.len()], f64::NAN);
    }
    (per.into_iter().map(|s| s.sqrt() / denom).collect(), global / denom)
}
