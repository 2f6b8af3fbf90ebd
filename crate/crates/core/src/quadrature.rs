//! Gauss rules on the reference segment and triangle.

use crate::geometry::Point;

/// Points and weights on a reference cell together with the polynomial
/// degree the rule integrates exactly.
///
/// Segment rules live on `[0, 1]` (weights sum to 1, the second coordinate
/// is unused); triangle rules live on the triangle `(0,0), (1,0), (0,1)`
/// (weights sum to 1/2).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss-Legendre rule on `[0, 1]` exact for polynomials of `degree`.
pub fn segment_rule(degree: usize) -> QuadratureRule {
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    QuadratureRule {
        points: x.iter().map(|&t| [0.5 * (t + 1.0), 0.0]).collect(),
        weights: w.iter().map(|&wi| 0.5 * wi).collect(),
        degree: 2 * n - 1,
    }
}

/// Collapsed (Duffy) tensor Gauss rule on the reference triangle exact for
/// polynomials of `degree`.
pub fn triangle_rule(degree: usize) -> QuadratureRule {
    // the collapse Jacobian adds one degree in the first direction
    let n = (degree + 2).div_ceil(2);
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (x[i] + 1.0);
        let wu = 0.5 * w[i];
        for j in 0..n {
            let v = 0.5 * (x[j] + 1.0);
            let wv = 0.5 * w[j];
            points.push([u, v * (1.0 - u)]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    QuadratureRule { points, weights, degree: 2 * n - 2 }
}

/// Map a triangle rule onto the physical triangle `t`; returns points and
/// weights scaled by the Jacobian.
pub fn map_triangle(rule: &QuadratureRule, t: &[Point; 3]) -> (Vec<Point>, Vec<f64>) {
    let e1 = [t[1][0] - t[0][0], t[1][1] - t[0][1]];
    let e2 = [t[2][0] - t[0][0], t[2][1] - t[0][1]];
    let jac = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
    let pts = rule
        .points
        .iter()
        .map(|p| {
            [
                t[0][0] + p[0] * e1[0] + p[1] * e2[0],
                t[0][1] + p[0] * e1[1] + p[1] * e2[1],
            ]
        })
        .collect();
    let wts = rule.weights.iter().map(|w| w * jac).collect();
    (pts, wts)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫ x^a y^b over the reference triangle = a! b! / (a+b+2)!
    fn tri_monomial(a: usize, b: usize) -> f64 {
        let f = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        f(a) * f(b) / f(a + b + 2)
    }

    #[test]
    fn legendre_weights_sum_to_two() {
        for n in 1..20 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            assert!(w.iter().all(|&wi| wi > 0.0));
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn segment_exactness() {
        for deg in 0..16 {
            let r = segment_rule(deg);
            assert!(r.degree >= deg);
            for k in 0..=deg {
                let q: f64 = r.points.iter().zip(&r.weights).map(|(p, w)| w * p[0].powi(k as i32)).sum();
                assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "deg {deg} k {k}");
            }
        }
    }

    #[test]
    fn triangle_exactness() {
        for deg in 0..14 {
            let r = triangle_rule(deg);
            assert!(r.degree >= deg);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!((r.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
            for a in 0..=deg {
                for b in 0..=deg - a {
                    let q: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = tri_monomial(a, b);
                    assert!((q - exact).abs() < 1e-14 * exact.max(1e-3), "deg {deg} ({a},{b})");
                }
            }
        }
    }
}
