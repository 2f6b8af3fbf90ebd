//! Face operators of the weighted interior penalty method: jumps,
//! coefficient-weighted averages, harmonic means and penalty functions.

use crate::basis::DgSpace;
use crate::error::FormsError;
use crate::geometry::Point;
use crate::mesh::PolyMesh;
use crate::models::{CoefficientField, Material};

/// Scalar jump `a⁺n⁺ + a⁻n⁻` with `n⁻ = -n⁺`.
pub fn jump_scalar(ap: f64, am: f64, n: Point) -> Point {
    [(ap - am) * n[0], (ap - am) * n[1]]
}

/// Vector jump `a⁺⊗n⁺ + a⁻⊗n⁻` with `(a⊗n)_{ij} = a_i n_j`.
pub fn jump_vector(ap: Point, am: Point, n: Point) -> [[f64; 2]; 2] {
    let d = [ap[0] - am[0], ap[1] - am[1]];
    [[d[0] * n[0], d[0] * n[1]], [d[1] * n[0], d[1] * n[1]]]
}

/// Normal jump `a⁺·n⁺ + a⁻·n⁻`.
pub fn jump_normal(ap: Point, am: Point, n: Point) -> f64 {
    (ap[0] - am[0]) * n[0] + (ap[1] - am[1]) * n[1]
}

/// Boundary jumps use the outward normal and no exterior trace.
pub fn boundary_jump_vector(a: Point, n: Point) -> [[f64; 2]; 2] {
    jump_vector(a, [0.0; 2], n)
}

pub fn boundary_jump_normal(a: Point, n: Point) -> f64 {
    a[0] * n[0] + a[1] * n[1]
}

/// Averaging weights for one coefficient on one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub plus: f64,
    pub minus: f64,
    /// Harmonic coefficient `q⁺q⁻/(q⁺+q⁻)`.
    pub harmonic: f64,
}

impl Weights {
    pub const BOUNDARY: Weights = Weights { plus: 1.0, minus: 0.0, harmonic: 0.0 };

    /// Weights `ω⁺ = q⁻/(q⁺+q⁻)`, `ω⁻ = q⁺/(q⁺+q⁻)`. Two vanishing
    /// coefficients give `ω = 1/2` and a zero harmonic mean.
    pub fn new(qp: f64, qm: f64) -> Self {
        let s = qp + qm;
        if s <= 0.0 {
            return Weights { plus: 0.5, minus: 0.5, harmonic: 0.0 };
        }
        let plus = qm / s;
        Weights { plus, minus: 1.0 - plus, harmonic: qp * qm / s }
    }

    /// `{a}_ω = ω⁺a⁺ + ω⁻a⁻`.
    pub fn average(&self, ap: f64, am: f64) -> f64 {
        self.plus * ap + self.minus * am
    }
}

/// `nᵀ D n`.
pub fn normal_diffusivity(d: &[[f64; 2]; 2], n: Point) -> f64 {
    n[0] * (d[0][0] * n[0] + d[0][1] * n[1]) + n[1] * (d[1][0] * n[0] + d[1][1] * n[1])
}

/// Largest eigenvalue of a symmetric 2×2 matrix, i.e. the squared spectral
/// norm of its square root.
pub fn spectral_bound(d: &[[f64; 2]; 2]) -> f64 {
    let m = 0.5 * (d[0][0] + d[1][1]);
    let r = (0.25 * (d[0][0] - d[1][1]).powi(2) + d[0][1] * d[1][0]).max(0.0).sqrt();
    m + r
}

/// The five coefficient-weighted quantities entering the face terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Mu,
    MuDelta1,
    Lambda,
    LambdaDelta2,
    Diffusion,
}

impl Quantity {
    pub const ALL: [Quantity; 5] =
        [Quantity::Mu, Quantity::MuDelta1, Quantity::Lambda, Quantity::LambdaDelta2, Quantity::Diffusion];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Coefficient value on an element; the diffusion tensor is reduced to
    /// its normal component `nᵀDn`.
    pub fn value(self, m: &Material, n: Point) -> f64 {
        match self {
            Quantity::Mu => m.mu,
            Quantity::MuDelta1 => m.mu * m.delta1,
            Quantity::Lambda => m.lambda,
            Quantity::LambdaDelta2 => m.lambda * m.delta2,
            Quantity::Diffusion => normal_diffusivity(&m.diffusivity, n),
        }
    }
}

/// Per-interior-face weights for all five quantities.
#[derive(Debug, Clone)]
pub struct TraceWeights {
    pub faces: Vec<[Weights; 5]>,
}

impl TraceWeights {
    pub fn new(mesh: &PolyMesh, coeffs: &CoefficientField) -> Self {
        let faces = mesh
            .interior_faces
            .iter()
            .map(|f| {
                let (mp, mm) = (coeffs.get(f.elements[0]), coeffs.get(f.elements[1]));
                Quantity::ALL.map(|q| Weights::new(q.value(mp, f.normal), q.value(mm, f.normal)))
            })
            .collect();
        TraceWeights { faces }
    }

    pub fn get(&self, face: usize, q: Quantity) -> Weights {
        self.faces[face][q.index()]
    }
}

/// How the boundary diffusion penalty scales with the diffusion tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryDiffusionScaling {
    /// `α₅ D̄ ℓ²/h`, proportional to the coefficient like every other penalty.
    #[default]
    Proportional,
    /// `α₅ D̄⁻¹ ℓ²/h`.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    /// α₁..α₅ for σ, σ_δ1, ξ, ξ_δ2, ζ.
    pub alphas: [f64; 5],
    pub boundary_diffusion: BoundaryDiffusionScaling,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        PenaltyParams { alphas: [10.0; 5], boundary_diffusion: BoundaryDiffusionScaling::Proportional }
    }
}

/// Penalties of one face, indexed like [`Quantity`]:
/// σ, σ_δ1, ξ, ξ_δ2, ζ.
pub type PenaltyRow = [f64; 5];

#[derive(Debug, Clone)]
pub struct PenaltyTable {
    pub interior: Vec<PenaltyRow>,
    pub boundary: Vec<PenaltyRow>,
    pub params: PenaltyParams,
}

fn check_inputs(degree: usize, h: f64, alphas: &[f64; 5]) -> Result<(), FormsError> {
    if degree == 0 || !(h > 0.0) {
        return Err(FormsError::Input(format!("degree {degree}, diameter {h}")));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0)) {
        return Err(FormsError::Input(format!("penalty constant {a}")));
    }
    Ok(())
}

/// Interior-face penalties `α γ_q max_{κ±}(ℓ²/h)`.
pub fn interior_penalties(
    weights: &[Weights; 5],
    degrees: [usize; 2],
    diameters: [f64; 2],
    params: &PenaltyParams,
) -> Result<PenaltyRow, FormsError> {
    for s in 0..2 {
        check_inputs(degrees[s], diameters[s], &params.alphas)?;
    }
    let scale = (0..2)
        .map(|s| (degrees[s] * degrees[s]) as f64 / diameters[s])
        .fold(0.0, f64::max);
    Ok(std::array::from_fn(|i| params.alphas[i] * weights[i].harmonic * scale))
}

/// Boundary-face penalties `α q_κ ℓ²/h`, with `D̄` for diffusion.
pub fn boundary_penalties(
    m: &Material,
    degree: usize,
    diameter: f64,
    params: &PenaltyParams,
) -> Result<PenaltyRow, FormsError> {
    check_inputs(degree, diameter, &params.alphas)?;
    let scale = (degree * degree) as f64 / diameter;
    let dbar = spectral_bound(&m.diffusivity);
    let diff = match params.boundary_diffusion {
        BoundaryDiffusionScaling::Proportional => dbar,
        BoundaryDiffusionScaling::Inverse if dbar > 0.0 => 1.0 / dbar,
        BoundaryDiffusionScaling::Inverse => 0.0,
    };
    let q = [m.mu, m.mu * m.delta1, m.lambda, m.lambda * m.delta2, diff];
    Ok(std::array::from_fn(|i| params.alphas[i] * q[i] * scale))
}

impl PenaltyTable {
    pub fn new(
        space: &DgSpace,
        coeffs: &CoefficientField,
        weights: &TraceWeights,
        params: PenaltyParams,
    ) -> Result<Self, FormsError> {
        let mesh = &space.mesh;
        let deg = |k: usize| space.bases[k].degree;
        let interior = mesh
            .interior_faces
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let [kp, km] = f.elements;
                interior_penalties(
                    &weights.faces[i],
                    [deg(kp), deg(km)],
                    [mesh.elements[kp].diameter, mesh.elements[km].diameter],
                    &params,
                )
            })
            .collect::<Result<_, _>>()?;
        let boundary = mesh
            .boundary_faces
            .iter()
            .map(|f| {
                let k = f.element;
                boundary_penalties(coeffs.get(k), deg(k), mesh.elements[k].diameter, &params)
            })
            .collect::<Result<_, _>>()?;
        Ok(PenaltyTable { interior, boundary, params })
    }
}
