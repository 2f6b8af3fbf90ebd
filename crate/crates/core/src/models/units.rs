//! Static dimensional analysis of the constitutive law.

use std::ops::{Div, Mul};

/// SI dimension exponents (kg, m, s, K).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dim(pub [i8; 4]);

impl Mul for Dim {
    type Output = Dim;
    fn mul(self, o: Dim) -> Dim {
        Dim(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Div for Dim {
    type Output = Dim;
    fn div(self, o: Dim) -> Dim {
        Dim(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

pub const ONE: Dim = Dim([0, 0, 0, 0]);
pub const KG: Dim = Dim([1, 0, 0, 0]);
pub const M: Dim = Dim([0, 1, 0, 0]);
pub const S: Dim = Dim([0, 0, 1, 0]);
pub const K: Dim = Dim([0, 0, 0, 1]);

pub fn pascal() -> Dim {
    KG / (M * S * S)
}

/// Physical reading of the generalized pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reading {
    /// `φ` is a pore pressure [Pa], `γ` dimensionless.
    Pressure,
    /// `φ` is a temperature [K], `γ` in Pa/K.
    Temperature,
}

/// Units of `(φ, γ, μ, λ, δ1, δ2)` in a reading.
pub fn parameter_units(r: Reading) -> [(&'static str, Dim); 6] {
    let (phi, gamma) = match r {
        Reading::Pressure => (pascal(), ONE),
        Reading::Temperature => (K, pascal() / K),
    };
    [("phi", phi), ("gamma", gamma), ("mu", pascal()), ("lambda", pascal()), ("delta1", S), ("delta2", S)]
}

/// Units of each summand of the total stress
/// `2με(u) + 2μδ1ε(u̇) + λ div u I + λδ2 div u̇ I - γφI`.
pub fn stress_summands(r: Reading) -> [(&'static str, Dim); 5] {
    let [(_, phi), (_, gamma), (_, mu), (_, lambda), (_, d1), (_, d2)] = parameter_units(r);
    #[allow(clippy::eq_op)]
    let strain = M / M;
    let rate = strain / S;
    [
        ("elastic shear", mu * strain),
        ("viscous shear", mu * d1 * rate),
        ("elastic volumetric", lambda * strain),
        ("viscous volumetric", lambda * d2 * rate),
        ("coupling", gamma * phi),
    ]
}
