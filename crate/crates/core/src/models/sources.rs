//! Volume source terms: mollified point forces, moment tensors and the
//! smooth injection/absorption pattern used for flow scenarios.

use std::f64::consts::PI;

use crate::geometry::Point;

/// Time history `A₀ cos(2π(t - t₀)f₀) exp(-2(t - t₀)²f₀²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavelet {
    pub amplitude: f64,
    pub frequency: f64,
    pub shift: f64,
}

impl Default for Wavelet {
    fn default() -> Self {
        Wavelet { amplitude: 1e4, frequency: 5.0, shift: 0.3 }
    }
}

pub fn wavelet(w: &Wavelet, t: f64) -> f64 {
    let s = t - w.shift;
    w.amplitude * (2.0 * PI * s * w.frequency).cos() * (-2.0 * s * s * w.frequency * w.frequency).exp()
}

/// Compactly supported radial bump `4/(πR²) (1 - r²/R²)³` with unit integral.
pub fn mollifier(center: Point, radius: f64, x: Point) -> f64 {
    let r2 = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)) / (radius * radius);
    if r2 >= 1.0 {
        0.0
    } else {
        4.0 / (PI * radius * radius) * (1.0 - r2).powi(3)
    }
}

pub fn mollifier_grad(center: Point, radius: f64, x: Point) -> Point {
    let d = [x[0] - center[0], x[1] - center[1]];
    let r2 = (d[0] * d[0] + d[1] * d[1]) / (radius * radius);
    if r2 >= 1.0 {
        return [0.0; 2];
    }
    let c = -24.0 / (PI * radius.powi(4)) * (1.0 - r2).powi(2);
    [c * d[0], c * d[1]]
}

/// `-M ∇η`: the divergence of the mollified dipole `M η`, with sign so that
/// `f = -M div δ` in the distributional limit.
pub fn moment_source(tensor: &[[f64; 2]; 2], center: Point, radius: f64, x: Point) -> Point {
    let g = mollifier_grad(center, radius, x);
    [
        -(tensor[0][0] * g[0] + tensor[0][1] * g[1]),
        -(tensor[1][0] * g[0] + tensor[1][1] * g[1]),
    ]
}

/// Gaussian well `sign · exp(-|x - c|² / width)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectionWell {
    pub center: Point,
    pub width: f64,
    pub sign: f64,
}

/// `amplitude · tanh(ramp · t)`.
pub fn injection_rate(amplitude: f64, ramp: f64, t: f64) -> f64 {
    amplitude * (ramp * t).tanh()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum SourceSpec {
    #[default]
    None,
    /// Force `direction · h(t)` concentrated at `location`.
    PointForce { location: Point, direction: Point, wavelet: Wavelet, radius: f64 },
    /// Moment tensor source `-M div δ(x - x_s) h(t)`.
    MomentTensor { location: Point, tensor: [[f64; 2]; 2], wavelet: Wavelet, radius: f64 },
    /// Mass source `amplitude tanh(ramp t) Σ wells`.
    Injection { wells: Vec<InjectionWell>, amplitude: f64, ramp: f64 },
}

impl SourceSpec {
    /// Two injectors around an absorber on a 366 m × 671 m slice.
    pub fn channel_injection() -> Self {
        let well = |x: f64, y: f64, sign: f64| InjectionWell { center: [x, y], width: 500.0, sign };
        SourceSpec::Injection {
            wells: vec![well(190.0, 550.0, 1.0), well(130.0, 120.0, 1.0), well(175.0, 360.0, -1.0)],
            amplitude: 0.1,
            ramp: 5.0,
        }
    }

    /// Radius used by mollified sources (`None` for smooth ones).
    pub fn radius(&self) -> Option<f64> {
        match self {
            SourceSpec::PointForce { radius, .. } | SourceSpec::MomentTensor { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn location(&self) -> Option<Point> {
        match self {
            SourceSpec::PointForce { location, .. } | SourceSpec::MomentTensor { location, .. } => {
                Some(*location)
            }
            _ => None,
        }
    }
}

/// Body force and mass source of `spec` at `(x, t)`.
pub fn source_eval(spec: &SourceSpec, x: Point, t: f64) -> (Point, f64) {
    match spec {
        SourceSpec::None => ([0.0; 2], 0.0),
        SourceSpec::PointForce { location, direction, wavelet: w, radius } => {
            let s = mollifier(*location, *radius, x) * wavelet(w, t);
            ([s * direction[0], s * direction[1]], 0.0)
        }
        SourceSpec::MomentTensor { location, tensor, wavelet: w, radius } => {
            let f = moment_source(tensor, *location, *radius, x);
            let h = wavelet(w, t);
            ([f[0] * h, f[1] * h], 0.0)
        }
        SourceSpec::Injection { wells, amplitude, ramp } => {
            let s: f64 = wells
                .iter()
                .map(|w| {
                    let r2 = (x[0] - w.center[0]).powi(2) + (x[1] - w.center[1]).powi(2);
                    w.sign * (-r2 / w.width).exp()
                })
                .sum();
            ([0.0; 2], injection_rate(*amplitude, *ramp, t) * s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    #[test]
    fn wavelet_peaks_at_shift() {
        let w = Wavelet::default();
        assert_eq!(wavelet(&w, 0.3), 1e4);
        for t in [0.0, 0.1, 0.25, 0.35, 0.6] {
            assert!(wavelet(&w, t).abs() < 1e4);
        }
    }

    #[test]
    fn absorber_plateau() {
        let s = SourceSpec::channel_injection();
        let (_, g) = source_eval(&s, [175.0, 360.0], 20.0);
        assert!((g + 0.1).abs() < 1e-10);
        let (f, g0) = source_eval(&s, [175.0, 360.0], 0.0);
        assert_eq!((f, g0), ([0.0; 2], 0.0));
    }

    /// Polar Gauss quadrature is exact for the radial polynomial profile.
    fn polar_integral(radius: f64, f: impl Fn(Point) -> f64) -> f64 {
        let (x, w) = gauss_legendre(12);
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let r = 0.5 * radius * (xi + 1.0);
            for (xj, wj) in x.iter().zip(&w) {
                let th = PI * (xj + 1.0);
                s += 0.5 * radius * wi * PI * wj * r * f([1.0 + r * th.cos(), 2.0 + r * th.sin()]);
            }
        }
        s
    }

    #[test]
    fn mollifier_has_unit_mass() {
        for radius in [0.01, 1.0, 150.0] {
            let m = polar_integral(radius, |x| mollifier([1.0, 2.0], radius, x));
            assert!((m - 1.0).abs() < 1e-8, "{radius}: {m}");
        }
    }

    #[test]
    fn mollifier_gradient_matches_differences() {
        let c = [0.3, -0.2];
        let r = 0.7;
        let h = 1e-6;
        for x in [[0.5, 0.1], [0.0, -0.4], [0.31, -0.21]] {
            let g = mollifier_grad(c, r, x);
            let gx = (mollifier(c, r, [x[0] + h, x[1]]) - mollifier(c, r, [x[0] - h, x[1]])) / (2.0 * h);
            let gy = (mollifier(c, r, [x[0], x[1] + h]) - mollifier(c, r, [x[0], x[1] - h])) / (2.0 * h);
            assert!((g[0] - gx).abs() < 1e-6 * (1.0 + gx.abs()));
            assert!((g[1] - gy).abs() < 1e-6 * (1.0 + gy.abs()));
        }
    }

    #[test]
    fn moment_source_has_zero_net_force() {
        let m = [[1.0, 0.5], [0.5, -2.0]];
        let fx = polar_integral(0.5, |x| moment_source(&m, [1.0, 2.0], 0.5, x)[0]);
        let fy = polar_integral(0.5, |x| moment_source(&m, [1.0, 2.0], 0.5, x)[1]);
        assert!(fx.abs() < 1e-10 && fy.abs() < 1e-10);
    }
}
