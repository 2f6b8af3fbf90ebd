//! Manufactured solutions with separable space-time structure.
//!
//! Every case has the form `u = ν_u T_u(t) S(x)`, `φ = ν_φ T_φ(t) P(x)` with
//! `T_u = sin(2πt)` and `T_φ = sin(√2 πt)`, so forcing and boundary data
//! follow from the spatial jets of `S` and `P`.

use std::f64::consts::{PI, SQRT_2};
use std::str::FromStr;

use crate::assembly::Loading;
use crate::error::VerificationError;
use crate::geometry::Point;
use crate::models::Material;

/// Value, gradient and Hessian of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub grad: Point,
    pub hess: [[f64; 2]; 2],
}

impl Jet {
    fn scaled(self, c: f64) -> Jet {
        Jet {
            value: c * self.value,
            grad: self.grad.map(|g| c * g),
            hess: self.hess.map(|r| r.map(|h| c * h)),
        }
    }

    fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1]
    }
}

/// Spatial profile of the exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `S = (s, -s)`, `s = x² sin(πx) sin(πy)`; `P = x² cos(πx/2) sin(πx)`.
    Trig,
    /// `S = (x + y, 3x - 5y)`; `P = 10x + 6y`.
    Linear,
}

fn trig_s(p: Point) -> Jet {
    let (x, y) = (p[0], p[1]);
    let (sx, cx) = (PI * x).sin_cos();
    let (sy, cy) = (PI * y).sin_cos();
    let a = x * x * sx;
    let a1 = 2.0 * x * sx + PI * x * x * cx;
    let a2 = 2.0 * sx + 4.0 * PI * x * cx - PI * PI * x * x * sx;
    let (b, b1, b2) = (sy, PI * cy, -PI * PI * sy);
    Jet { value: a * b, grad: [a1 * b, a * b1], hess: [[a2 * b, a1 * b1], [a1 * b1, a * b2]] }
}

fn trig_p(p: Point) -> Jet {
    let x = p[0];
    let (sh, ch) = (0.5 * PI * x).sin_cos();
    let (s, c) = (PI * x).sin_cos();
    let r = ch * s;
    let r1 = -0.5 * PI * sh * s + PI * ch * c;
    let r2 = -1.25 * PI * PI * ch * s - PI * PI * sh * c;
    let v = x * x * r;
    let v1 = 2.0 * x * r + x * x * r1;
    let v2 = 2.0 * r + 4.0 * x * r1 + x * x * r2;
    Jet { value: v, grad: [v1, 0.0], hess: [[v2, 0.0], [0.0, 0.0]] }
}

fn affine(c: [f64; 2], p: Point) -> Jet {
    Jet { value: c[0] * p[0] + c[1] * p[1], grad: c, hess: [[0.0; 2]; 2] }
}

impl Profile {
    pub fn displacement(self, p: Point) -> [Jet; 2] {
        match self {
            Profile::Trig => {
                let s = trig_s(p);
                [s, s.scaled(-1.0)]
            }
            Profile::Linear => [affine([1.0, 1.0], p), affine([3.0, -5.0], p)],
        }
    }

    pub fn pressure(self, p: Point) -> Jet {
        match self {
            Profile::Trig => trig_p(p),
            Profile::Linear => affine([10.0, 6.0], p),
        }
    }
}

/// `sin(ωt)` and its first two derivatives.
fn temporal(omega: f64, t: f64) -> [f64; 3] {
    let (s, c) = (omega * t).sin_cos();
    [s, omega * c, -omega * omega * s]
}

const OMEGA_U: f64 = 2.0 * PI;
const OMEGA_PHI: f64 = SQRT_2 * PI;

/// Named manufactured cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseKind {
    /// Trigonometric profile with unit magnitudes, for h- and ℓ-sweeps.
    Trig,
    /// Affine profile, exactly representable in space from degree one.
    Linear,
    /// Trigonometric profile with magnitudes `ν_u`, `ν_φ`.
    Scaled { nu_u: f64, nu_phi: f64 },
}

impl FromStr for CaseKind {
    type Err = VerificationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trig" => Ok(CaseKind::Trig),
            "linear" => Ok(CaseKind::Linear),
            "scaled" => Ok(CaseKind::Scaled { nu_u: 0.1, nu_phi: 1e4 }),
            other => Err(VerificationError::Input(format!("unknown manufactured case {other:?}"))),
        }
    }
}

/// Exact displacement and pressure with first derivatives, as needed by the
/// error norms.
pub trait ExactFields: Sync {
    fn displacement(&self, x: Point, t: f64) -> (Point, [[f64; 2]; 2]);
    fn pressure(&self, x: Point, t: f64) -> (f64, Point);
}

/// The zero solution; error norms against it are norms of the discrete field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroFields;

impl ExactFields for ZeroFields {
    fn displacement(&self, _x: Point, _t: f64) -> (Point, [[f64; 2]; 2]) {
        ([0.0; 2], [[0.0; 2]; 2])
    }

    fn pressure(&self, _x: Point, _t: f64) -> (f64, Point) {
        (0.0, [0.0; 2])
    }
}

/// A manufactured solution on a homogeneous medium, with the forcing and
/// Dirichlet data that make it exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub profile: Profile,
    pub nu_u: f64,
    pub nu_phi: f64,
    pub material: Material,
}

impl Manufactured {
    pub fn new(kind: CaseKind, material: Material) -> Self {
        let (profile, nu_u, nu_phi) = match kind {
            CaseKind::Trig => (Profile::Trig, 1.0, 1.0),
            CaseKind::Linear => (Profile::Linear, 1.0, 1.0),
            CaseKind::Scaled { nu_u, nu_phi } => (Profile::Trig, nu_u, nu_phi),
        };
        Manufactured { profile, nu_u, nu_phi, material }
    }

    fn time_u(&self, t: f64) -> [f64; 3] {
        temporal(OMEGA_U, t).map(|v| self.nu_u * v)
    }

    fn time_phi(&self, t: f64) -> [f64; 3] {
        temporal(OMEGA_PHI, t).map(|v| self.nu_phi * v)
    }

    /// Displacement, velocity and acceleration.
    pub fn u(&self, x: Point, t: f64) -> [Point; 3] {
        self.displacement_with(x, self.time_u(t))
    }

    /// Pressure and its first two time derivatives.
    pub fn phi(&self, x: Point, t: f64) -> [f64; 3] {
        let p = self.profile.pressure(x).value;
        self.time_phi(t).map(|c| c * p)
    }
}

impl ExactFields for Manufactured {
    fn displacement(&self, x: Point, t: f64) -> (Point, [[f64; 2]; 2]) {
        let s = self.profile.displacement(x);
        let c = self.time_u(t)[0];
        ([c * s[0].value, c * s[1].value], [s[0].grad.map(|g| c * g), s[1].grad.map(|g| c * g)])
    }

    fn pressure(&self, x: Point, t: f64) -> (f64, Point) {
        let p = self.profile.pressure(x);
        let c = self.time_phi(t)[0];
        (c * p.value, p.grad.map(|g| c * g))
    }
}

impl Manufactured {
    fn force_with(&self, x: Point, [tu, tu1, tu2]: [f64; 3], tp: f64) -> Point {
        let m = &self.material;
        let s = self.profile.displacement(x);
        let p = self.profile.pressure(x);
        // ∂_b div S = Σ_a ∂_a∂_b S_a
        let grad_div = [s[0].hess[0][0] + s[1].hess[1][0], s[0].hess[0][1] + s[1].hess[1][1]];
        std::array::from_fn(|b| {
            let shear = s[b].laplacian() + grad_div[b];
            m.rho * tu2 * s[b].value
                - tu * (m.mu * shear + m.lambda * grad_div[b])
                - tu1 * (m.mu * m.delta1 * shear + m.lambda * m.delta2 * grad_div[b])
                + m.gamma * tp * p.grad[b]
        })
    }

    fn source_with(&self, x: Point, [_, tu1, tu2]: [f64; 3], [tp, tp1, tp2]: [f64; 3]) -> f64 {
        let m = &self.material;
        let s = self.profile.displacement(x);
        let p = self.profile.pressure(x);
        let div = s[0].grad[0] + s[1].grad[1];
        let d = &m.diffusivity;
        let div_flux = d[0][0] * p.hess[0][0] + d[0][1] * p.hess[1][0] + d[1][0] * p.hess[0][1] + d[1][1] * p.hess[1][1];
        m.d0 * (tp1 + m.tau1 * tp2) * p.value + m.gamma * (tu1 + m.tau2 * tu2) * div - tp * div_flux
    }

    fn displacement_with(&self, x: Point, tu: [f64; 3]) -> [Point; 3] {
        let s = self.profile.displacement(x);
        tu.map(|c| [c * s[0].value, c * s[1].value])
    }
}

impl Loading for Manufactured {
    fn body_force(&self, x: Point, t: f64) -> Point {
        self.force_with(x, self.time_u(t), self.time_phi(t)[0])
    }

    fn mass_source(&self, x: Point, t: f64) -> f64 {
        self.source_with(x, self.time_u(t), self.time_phi(t))
    }

    fn displacement_data(&self, x: Point, t: f64) -> [Point; 3] {
        self.u(x, t)
    }

    fn pressure_data(&self, x: Point, t: f64) -> f64 {
        self.phi(x, t)[0]
    }

    fn separated(&self) -> Option<Vec<Box<dyn Loading + '_>>> {
        Some((0..6).map(|j| Box::new(Component { exact: self, j }) as Box<dyn Loading>).collect())
    }

    fn time_factors(&self, t: f64) -> Vec<f64> {
        let mut c = self.time_u(t).to_vec();
        c.extend(self.time_phi(t));
        c
    }
}

/// The loading with time factor `j` of `[T_u, T_u', T_u'', T_φ, T_φ', T_φ'']`
/// set to one and the others to zero.
struct Component<'a> {
    exact: &'a Manufactured,
    j: usize,
}

impl Component<'_> {
    fn factors(&self) -> ([f64; 3], [f64; 3]) {
        let c: [f64; 6] = std::array::from_fn(|i| if i == self.j { 1.0 } else { 0.0 });
        ([c[0], c[1], c[2]], [c[3], c[4], c[5]])
    }
}

impl Loading for Component<'_> {
    fn body_force(&self, x: Point, _t: f64) -> Point {
        let (tu, tp) = self.factors();
        self.exact.force_with(x, tu, tp[0])
    }

    fn mass_source(&self, x: Point, _t: f64) -> f64 {
        let (tu, tp) = self.factors();
        self.exact.source_with(x, tu, tp)
    }

    fn displacement_data(&self, x: Point, _t: f64) -> [Point; 3] {
        self.exact.displacement_with(x, self.factors().0)
    }

    fn pressure_data(&self, x: Point, _t: f64) -> f64 {
        self.factors().1[0] * self.exact.profile.pressure(x).value
    }
}
