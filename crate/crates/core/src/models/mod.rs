//! Physical coefficients, named model presets and source terms.

mod raster;
mod sources;
pub mod units;

pub use raster::{channel_raster, in_channel, load_raster_field, parse_raster, Raster};
pub use sources::{
    injection_rate, moment_source, mollifier, mollifier_grad, source_eval, wavelet, InjectionWell,
    SourceSpec, Wavelet,
};

use crate::error::ModelError;

/// Element-wise constant coefficients of the unified model.
///
/// `phi` in the field equations is the generalized pressure: pore pressure
/// for poro(visco)elasticity, temperature for thermoelasticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Bulk density [kg/m³].
    pub rho: f64,
    /// Lamé coefficients [Pa].
    pub mu: f64,
    pub lambda: f64,
    /// Kelvin-Voigt retardation times [s].
    pub delta1: f64,
    pub delta2: f64,
    /// Biot-Willis coefficient [-] or thermal stress coefficient [Pa/K].
    pub gamma: f64,
    /// Storage coefficient [1/Pa] or [Pa/K²].
    pub d0: f64,
    /// Symmetric positive (semi)definite diffusion tensor.
    pub diffusivity: [[f64; 2]; 2],
    /// Relaxation times [s].
    pub tau1: f64,
    pub tau2: f64,
}

impl Material {
    /// All coefficients equal to one, `D = I`.
    pub fn unit() -> Self {
        Material {
            rho: 1.0,
            mu: 1.0,
            lambda: 1.0,
            delta1: 1.0,
            delta2: 1.0,
            gamma: 1.0,
            d0: 1.0,
            diffusivity: iso(1.0),
            tau1: 1.0,
            tau2: 1.0,
        }
    }

    /// Set a coefficient by name. `D` sets an isotropic tensor, `Dxx`, `Dxy`,
    /// `Dyy` set single entries, `tau` sets both relaxation times.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ModelError> {
        match name {
            "rho" => self.rho = value,
            "mu" => self.mu = value,
            "lambda" => self.lambda = value,
            "delta1" => self.delta1 = value,
            "delta2" => self.delta2 = value,
            "gamma" => self.gamma = value,
            "d0" => self.d0 = value,
            "D" => self.diffusivity = iso(value),
            "Dxx" => self.diffusivity[0][0] = value,
            "Dyy" => self.diffusivity[1][1] = value,
            "Dxy" => {
                self.diffusivity[0][1] = value;
                self.diffusivity[1][0] = value;
            }
            "tau1" => self.tau1 = value,
            "tau2" => self.tau2 = value,
            "tau" => {
                self.tau1 = value;
                self.tau2 = value;
            }
            _ => return Err(ModelError::UnknownParameter(name.to_string())),
        }
        Ok(())
    }

    /// Check the coefficient invariants for element `k`.
    pub fn validate(&self, k: usize) -> Result<(), ModelError> {
        let err = |name: &'static str, msg: String| ModelError::Parameter { name, element: k, msg };
        let scalars = [
            ("rho", self.rho),
            ("lambda", self.lambda),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("gamma", self.gamma),
            ("d0", self.d0),
            ("tau1", self.tau1),
            ("tau2", self.tau2),
        ];
        for (name, v) in scalars {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(err(name, format!("must be finite and nonnegative, got {v}")));
            }
        }
        if !(self.rho > 0.0) {
            return Err(err("rho", "must be positive".into()));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(err("mu", format!("must be positive, got {}", self.mu)));
        }
        let d = &self.diffusivity;
        if d.iter().flatten().any(|v| !v.is_finite()) {
            return Err(err("D", "non-finite entry".into()));
        }
        if (d[0][1] - d[1][0]).abs() > 1e-14 * (d[0][0].abs() + d[1][1].abs()) {
            return Err(err("D", "tensor is not symmetric".into()));
        }
        if min_eigenvalue(d) < 0.0 {
            return Err(err("D", "tensor is not positive semidefinite".into()));
        }
        if self.d0 == 0.0 && self.tau1 > 0.0 {
            return Err(err("d0", "relaxation without storage leaves the pressure mass singular".into()));
        }
        Ok(())
    }
}

/// `d I`.
pub fn iso(d: f64) -> [[f64; 2]; 2] {
    [[d, 0.0], [0.0, d]]
}

fn min_eigenvalue(d: &[[f64; 2]; 2]) -> f64 {
    let m = 0.5 * (d[0][0] + d[1][1]);
    let r = (0.25 * (d[0][0] - d[1][1]).powi(2) + d[0][1] * d[1][0]).max(0.0).sqrt();
    m - r
}

/// Named parameter sets of the unified model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Biot poroelasticity: no relaxation, no viscosity.
    Poroelastic,
    /// Thermoelasticity with Maxwell-Vernotte-Cattaneo heat flux, granite-like medium.
    Thermoelastic,
    /// Kelvin-Voigt poro-viscoelasticity without fluid acceleration.
    PoroViscoelastic,
    /// Every term active with unit coefficients.
    Unified,
}

impl std::str::FromStr for Preset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "poroelastic" => Ok(Preset::Poroelastic),
            "thermoelastic" => Ok(Preset::Thermoelastic),
            "poro-viscoelastic" | "poroviscoelastic" => Ok(Preset::PoroViscoelastic),
            "unified" => Ok(Preset::Unified),
            _ => Err(ModelError::UnknownPreset(s.to_string())),
        }
    }
}

/// Fluid density and porosity used to derive relaxation times.
pub const WATER_DENSITY: f64 = 1.025e3;
pub const POROSITY: f64 = 0.1;
/// Solid grain density used when the bulk density is derived.
pub const GRAIN_DENSITY: f64 = 2650.0;

/// Bulk density of a saturated medium.
pub fn mixture_density(rho_f: f64, porosity: f64, rho_s: f64) -> f64 {
    porosity * rho_f + (1.0 - porosity) * rho_s
}

/// Relaxation time `ρ_f D / φ` for isotropic diffusivity `d`.
pub fn relaxation_time(rho_f: f64, porosity: f64, d: f64) -> f64 {
    rho_f * d / porosity
}

/// Material for a preset, followed by `(name, value)` overrides.
pub fn preset(p: Preset, overrides: &[(&str, f64)]) -> Result<Material, ModelError> {
    let mut m = match p {
        Preset::Unified => Material::unit(),
        Preset::Poroelastic => Material { delta1: 0.0, delta2: 0.0, tau1: 0.0, tau2: 0.0, ..Material::unit() },
        Preset::Thermoelastic => Material {
            rho: 2650.0,
            mu: 6e9,
            lambda: 4e9,
            delta1: 0.0,
            delta2: 0.0,
            gamma: 79200.0,
            d0: 117.0,
            diffusivity: iso(10.5),
            tau1: 1.49e-8,
            tau2: 1.49e-8,
        },
        Preset::PoroViscoelastic => Material { tau1: 0.0, tau2: 0.0, ..Material::unit() },
    };
    for (name, v) in overrides {
        m.set(name, *v)?;
    }
    m.validate(0)?;
    Ok(m)
}

/// Per-element coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub materials: Vec<Material>,
}

impl CoefficientField {
    pub fn uniform(n: usize, m: Material) -> Self {
        CoefficientField { materials: vec![m; n] }
    }

    pub fn len(&self) -> usize {
        self.materials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.materials.is_empty()
    }

    #[inline]
    pub fn get(&self, k: usize) -> &Material {
        &self.materials[k]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.materials.iter().enumerate().try_for_each(|(k, m)| m.validate(k))
    }

    /// Elements where `τ₂ < τ₁`, which the stability analysis excludes.
    pub fn relaxation_warnings(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.materials[k].tau2 < self.materials[k].tau1).collect()
    }

    /// Whether every element has `τ₁ = 0`.
    pub fn tau1_vanishes(&self) -> bool {
        self.materials.iter().all(|m| m.tau1 == 0.0)
    }

    /// Set isotropic diffusivities element by element.
    pub fn set_isotropic_diffusivity(&mut self, values: &[f64]) {
        for (m, &d) in self.materials.iter_mut().zip(values) {
            m.diffusivity = iso(d);
        }
    }

    /// Set `τ₁ = τ₂ = ρ_f D̄ / φ` element by element, with `D̄` the largest
    /// eigenvalue of the diffusion tensor.
    pub fn derive_relaxation(&mut self, rho_f: f64, porosity: f64) {
        for m in &mut self.materials {
            let tau = relaxation_time(rho_f, porosity, crate::dg_forms::spectral_bound(&m.diffusivity));
            m.tau1 = tau;
            m.tau2 = tau;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermoelastic_medium() {
        let m = preset(Preset::Thermoelastic, &[]).unwrap();
        assert_eq!(m.rho, 2650.0);
        assert_eq!(m.mu, 6e9);
        assert_eq!(m.lambda, 4e9);
        assert_eq!(m.gamma, 79200.0);
        assert_eq!(m.d0, 117.0);
        assert_eq!(m.diffusivity, iso(10.5));
        assert_eq!((m.tau1, m.tau2), (1.49e-8, 1.49e-8));
        assert_eq!((m.delta1, m.delta2), (0.0, 0.0));
    }

    #[test]
    fn poroelastic_zeroes_dynamics() {
        let m = preset(Preset::Poroelastic, &[]).unwrap();
        assert_eq!([m.delta1, m.delta2, m.tau1, m.tau2], [0.0; 4]);
    }

    #[test]
    fn presets_are_idempotent() {
        for p in [Preset::Poroelastic, Preset::Thermoelastic, Preset::PoroViscoelastic, Preset::Unified] {
            assert_eq!(preset(p, &[]).unwrap(), preset(p, &[]).unwrap());
        }
    }

    #[test]
    fn relaxation_from_permeability() {
        let d = 3e-7;
        let tau = relaxation_time(WATER_DENSITY, POROSITY, d);
        assert!((tau - 1.025e4 * d).abs() <= 1e-14 * tau);
        let mut f = CoefficientField::uniform(3, Material { diffusivity: iso(d), ..Material::unit() });
        f.derive_relaxation(WATER_DENSITY, POROSITY);
        assert!(f.materials.iter().all(|m| (m.tau1 - 1.025e4 * d).abs() <= 1e-14 * m.tau1));
    }

    #[test]
    fn invalid_overrides_name_the_parameter() {
        match preset(Preset::Unified, &[("mu", 0.0)]) {
            Err(ModelError::Parameter { name, .. }) => assert_eq!(name, "mu"),
            other => panic!("{other:?}"),
        }
        match preset(Preset::Unified, &[("Dxx", -1.0)]) {
            Err(ModelError::Parameter { name, .. }) => assert_eq!(name, "D"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            preset(Preset::Unified, &[("nope", 1.0)]),
            Err(ModelError::UnknownParameter(_))
        ));
        assert!("viscous".parse::<Preset>().is_err());
    }

    #[test]
    fn relaxation_order_warning() {
        let mut f = CoefficientField::uniform(2, Material::unit());
        f.materials[1].tau2 = 0.5;
        assert_eq!(f.relaxation_warnings(), vec![1]);
    }
}
