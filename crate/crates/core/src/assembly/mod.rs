//! Assembly of the mass, stiffness and coupling operators.
//!
//! Trial functions index matrix columns, test functions index rows. Vector
//! unknowns use the per-element layout of [`DgSpace::vector_dof`]. Element
//! and face blocks are computed in parallel and merged in a fixed order, so
//! the compressed matrices are bitwise reproducible.

mod bc;
mod rhs;

pub use bc::{BoundaryConditions, FaceMask, FieldBc, TagCondition};
pub use rhs::{assemble_rhs, Loading, RhsAssembler, ZeroLoading};

use rayon::prelude::*;

use crate::basis::{DgSpace, FaceTabulation, Tabulation};
use crate::dg_forms::{PenaltyParams, PenaltyTable, Quantity, TraceWeights, Weights};
use crate::error::{AssemblyError, Error};
use crate::geometry::Point;
use crate::models::{CoefficientField, Material};
use crate::sparse::{CsrMatrix, Triplets};

/// Everything needed to evaluate the discrete forms.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub space: DgSpace,
    pub coeffs: CoefficientField,
    pub weights: TraceWeights,
    pub penalties: PenaltyTable,
    pub mask: FaceMask,
}

impl Discretization {
    pub fn new(
        space: DgSpace,
        coeffs: CoefficientField,
        bcs: &BoundaryConditions,
        params: PenaltyParams,
    ) -> Result<Self, Error> {
        let mesh = space.mesh.clone();
        if coeffs.len() != mesh.n_elements() {
            return Err(AssemblyError::CoefficientCount { got: coeffs.len(), expected: mesh.n_elements() }.into());
        }
        coeffs.validate()?;
        let weights = TraceWeights::new(&mesh, &coeffs);
        let penalties = PenaltyTable::new(&space, &coeffs, &weights, params)?;
        let mask = bcs.resolve(&mesh)?;
        Ok(Discretization { space, coeffs, weights, penalties, mask })
    }

    fn check(&self) -> Result<(), AssemblyError> {
        let m = &self.space.mesh;
        if self.penalties.interior.len() != m.interior_faces.len()
            || self.penalties.boundary.len() != m.boundary_faces.len()
        {
            return Err(AssemblyError::PenaltyRows {
                got: self.penalties.interior.len() + self.penalties.boundary.len(),
                expected: m.n_faces(),
            });
        }
        Ok(())
    }
}

/// Which parts of a symmetric interior-penalty form to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parts {
    /// Volume, consistency and penalty terms: the operator itself.
    Full,
    /// Volume and penalty terms only: the quadratic form of the dG norm.
    Norm,
}

/// One local block: global test rows, trial columns, row-major values.
struct Block {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

fn merge(nrows: usize, ncols: usize, blocks: Vec<Vec<Block>>) -> CsrMatrix {
    let mut t = Triplets::with_capacity(blocks.iter().flatten().map(|b| b.vals.len()).sum());
    for b in blocks.iter().flatten() {
        t.push_block(&b.rows, &b.cols, &b.vals);
    }
    CsrMatrix::from_triplets(nrows, ncols, &t)
}

fn vector_dofs(space: &DgSpace, k: usize) -> Vec<usize> {
    space.vector_range(k).collect()
}

fn scalar_dofs(space: &DgSpace, k: usize) -> Vec<usize> {
    space.scalar_range(k).collect()
}

/// Trace data of one face side: tabulation, element, outward normal.
struct Side<'a> {
    tab: &'a Tabulation,
    element: usize,
    normal: Point,
}

/// Sides of a face and their coefficient weights for one quantity, or the
/// boundary weight 1 on a single side.
fn face_sides<'a>(d: &'a Discretization, face: FaceId) -> (Vec<Side<'a>>, &'a FaceTabulation) {
    let mesh = &d.space.mesh;
    match face {
        FaceId::Interior(f) => {
            let fc = &mesh.interior_faces[f];
            let tab = &d.space.interior[f];
            let n = fc.normal;
            (
                vec![
                    Side { tab: &tab.sides[0], element: fc.elements[0], normal: n },
                    Side { tab: &tab.sides[1], element: fc.elements[1], normal: [-n[0], -n[1]] },
                ],
                tab,
            )
        }
        FaceId::Boundary(f) => {
            let fc = &mesh.boundary_faces[f];
            let tab = &d.space.boundary[f];
            (vec![Side { tab: &tab.sides[0], element: fc.element, normal: fc.normal }], tab)
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum FaceId {
    Interior(usize),
    Boundary(usize),
}

/// Faces that carry terms of a given unknown: all interior faces plus the
/// boundary faces where that unknown is Dirichlet.
fn active_faces(d: &Discretization, displacement: bool) -> Vec<FaceId> {
    let mut v: Vec<FaceId> = (0..d.space.mesh.interior_faces.len()).map(FaceId::Interior).collect();
    let mask = if displacement { &d.mask.u_dirichlet } else { &d.mask.p_dirichlet };
    v.extend((0..mask.len()).filter(|&f| mask[f]).map(FaceId::Boundary));
    v
}

/// Weights `ω` per side and the penalty of a face for one quantity.
fn face_weights(d: &Discretization, face: FaceId, q: Quantity) -> ([f64; 2], f64) {
    match face {
        FaceId::Interior(f) => {
            let w: Weights = d.weights.get(f, q);
            ([w.plus, w.minus], d.penalties.interior[f][q.index()])
        }
        FaceId::Boundary(f) => ([Weights::BOUNDARY.plus, 0.0], d.penalties.boundary[f][q.index()]),
    }
}

fn elastic_coefficient(m: &Material, q: Quantity) -> f64 {
    match q {
        Quantity::Mu | Quantity::Lambda | Quantity::Diffusion => q.value(m, [1.0, 0.0]),
        Quantity::MuDelta1 => m.mu * m.delta1,
        Quantity::LambdaDelta2 => m.lambda * m.delta2,
    }
}

/// `2q ε(u):ε(v)` form (q = μ or μδ1) over volumes and faces.
pub fn assemble_elasticity(d: &Discretization, viscous: bool, parts: Parts) -> Result<CsrMatrix, Error> {
    d.check()?;
    let q = if viscous { Quantity::MuDelta1 } else { Quantity::Mu };
    vector_form(d, q, parts, elastic_volume, elastic_face)
}

/// `q div u div v` form (q = λ or λδ2) over volumes and faces.
pub fn assemble_div(d: &Discretization, viscous: bool, parts: Parts) -> Result<CsrMatrix, Error> {
    d.check()?;
    let q = if viscous { Quantity::LambdaDelta2 } else { Quantity::Lambda };
    vector_form(d, q, parts, div_volume, div_face)
}

type VolumeKernel = fn(&Tabulation, usize, f64, &mut [f64]);
type FaceKernel = fn(&FaceTabulation, &Side, &Side, FaceCoeffs, &mut [f64]);

/// Coefficients entering one (trial side, test side) face block.
#[derive(Clone, Copy)]
struct FaceCoeffs {
    penalty: f64,
    /// `ω q` on the trial and test side.
    trial: f64,
    test: f64,
    consistency: bool,
}

fn vector_form(
    d: &Discretization,
    q: Quantity,
    parts: Parts,
    volume: VolumeKernel,
    face: FaceKernel,
) -> Result<CsrMatrix, Error> {
    let space = &d.space;
    let nv = space.n_vector();
    let vol_blocks: Vec<Vec<Block>> = (0..space.n_elements())
        .into_par_iter()
        .map(|k| {
            let c = elastic_coefficient(d.coeffs.get(k), q);
            if c == 0.0 {
                return vec![];
            }
            let n = space.dim(k);
            let mut vals = vec![0.0; 4 * n * n];
            volume(&space.volume[k], n, c, &mut vals);
            let dofs = vector_dofs(space, k);
            vec![Block { rows: dofs.clone(), cols: dofs, vals }]
        })
        .collect();
    let faces = active_faces(d, true);
    let face_blocks: Vec<Vec<Block>> = faces
        .par_iter()
        .map(|&fid| {
            let (omega, penalty) = face_weights(d, fid, q);
            let (sides, tab) = face_sides(d, fid);
            let mut out = Vec::new();
            for (s, trial) in sides.iter().enumerate() {
                for (t, test) in sides.iter().enumerate() {
                    let fc = FaceCoeffs {
                        penalty,
                        trial: omega[s] * elastic_coefficient(d.coeffs.get(trial.element), q),
                        test: omega[t] * elastic_coefficient(d.coeffs.get(test.element), q),
                        consistency: parts == Parts::Full,
                    };
                    if fc.penalty == 0.0 && (fc.trial == 0.0 && fc.test == 0.0 || !fc.consistency) {
                        continue;
                    }
                    let (nt, ns) = (space.dim(test.element), space.dim(trial.element));
                    let mut vals = vec![0.0; 4 * nt * ns];
                    face(tab, trial, test, fc, &mut vals);
                    out.push(Block {
                        rows: vector_dofs(space, test.element),
                        cols: vector_dofs(space, trial.element),
                        vals,
                    });
                }
            }
            out
        })
        .collect();
    let mut all = vol_blocks;
    all.extend(face_blocks);
    Ok(merge(nv, nv, all))
}

/// `c [δ_ab ∇φ_i·∇φ_j + ∂_bφ_i ∂_aφ_j]` for trial `φ_i e_a`, test `φ_j e_b`.
fn elastic_volume(tab: &Tabulation, n: usize, c: f64, out: &mut [f64]) {
    let m = 2 * n;
    for qp in 0..tab.n_points() {
        let w = c * tab.weights[qp];
        let g = &tab.grads[qp * n..(qp + 1) * n];
        for b in 0..2 {
            for j in 0..n {
                let row = (b * n + j) * m;
                for a in 0..2 {
                    for i in 0..n {
                        let mut v = g[i][b] * g[j][a];
                        if a == b {
                            v += g[i][0] * g[j][0] + g[i][1] * g[j][1];
                        }
                        out[row + a * n + i] += w * v;
                    }
                }
            }
        }
    }
}

fn elastic_face(tab: &FaceTabulation, trial: &Side, test: &Side, c: FaceCoeffs, out: &mut [f64]) {
    let (ns, nt) = (trial.tab.values.len() / tab.weights.len(), test.tab.values.len() / tab.weights.len());
    let (ms, n_s, n_t) = (2 * ns, trial.normal, test.normal);
    let nn = n_s[0] * n_t[0] + n_s[1] * n_t[1];
    for qp in 0..tab.weights.len() {
        let w = tab.weights[qp];
        let (phi, gphi) = (&trial.tab.values[qp * ns..(qp + 1) * ns], &trial.tab.grads[qp * ns..(qp + 1) * ns]);
        let (psi, gpsi) = (&test.tab.values[qp * nt..(qp + 1) * nt], &test.tab.grads[qp * nt..(qp + 1) * nt]);
        for b in 0..2 {
            for j in 0..nt {
                let row = (b * nt + j) * ms;
                let gpsi_ns = gpsi[j][0] * n_s[0] + gpsi[j][1] * n_s[1];
                for a in 0..2 {
                    for i in 0..ns {
                        let mut v = 0.0;
                        if a == b {
                            v += c.penalty * nn * phi[i] * psi[j];
                        }
                        if c.consistency {
                            let mut cons = c.trial * psi[j] * gphi[i][b] * n_t[a]
                                + c.test * phi[i] * gpsi[j][a] * n_s[b];
                            if a == b {
                                let gphi_nt = gphi[i][0] * n_t[0] + gphi[i][1] * n_t[1];
                                cons += c.trial * psi[j] * gphi_nt + c.test * phi[i] * gpsi_ns;
                            }
                            v -= cons;
                        }
                        out[row + a * ns + i] += w * v;
                    }
                }
            }
        }
    }
}

/// `c ∂_aφ_i ∂_bφ_j`.
fn div_volume(tab: &Tabulation, n: usize, c: f64, out: &mut [f64]) {
    let m = 2 * n;
    for qp in 0..tab.n_points() {
        let w = c * tab.weights[qp];
        let g = &tab.grads[qp * n..(qp + 1) * n];
        for b in 0..2 {
            for j in 0..n {
                let row = (b * n + j) * m;
                for a in 0..2 {
                    for i in 0..n {
                        out[row + a * n + i] += w * g[i][a] * g[j][b];
                    }
                }
            }
        }
    }
}

fn div_face(tab: &FaceTabulation, trial: &Side, test: &Side, c: FaceCoeffs, out: &mut [f64]) {
    let (ns, nt) = (trial.tab.values.len() / tab.weights.len(), test.tab.values.len() / tab.weights.len());
    let (ms, n_s, n_t) = (2 * ns, trial.normal, test.normal);
    for qp in 0..tab.weights.len() {
        let w = tab.weights[qp];
        let (phi, gphi) = (&trial.tab.values[qp * ns..(qp + 1) * ns], &trial.tab.grads[qp * ns..(qp + 1) * ns]);
        let (psi, gpsi) = (&test.tab.values[qp * nt..(qp + 1) * nt], &test.tab.grads[qp * nt..(qp + 1) * nt]);
        for b in 0..2 {
            for j in 0..nt {
                let row = (b * nt + j) * ms;
                for a in 0..2 {
                    for i in 0..ns {
                        let mut v = c.penalty * n_s[a] * n_t[b] * phi[i] * psi[j];
                        if c.consistency {
                            v -= c.trial * gphi[i][a] * psi[j] * n_t[b] + c.test * gpsi[j][b] * phi[i] * n_s[a];
                        }
                        out[row + a * ns + i] += w * v;
                    }
                }
            }
        }
    }
}

/// `(D ∇φ, ∇ψ)` form with weighted averages of the normal fluxes.
pub fn assemble_diffusion(d: &Discretization, parts: Parts) -> Result<CsrMatrix, Error> {
    d.check()?;
    let space = &d.space;
    let ns = space.n_scalar;
    let vol_blocks: Vec<Vec<Block>> = (0..space.n_elements())
        .into_par_iter()
        .map(|k| {
            let dm = d.coeffs.get(k).diffusivity;
            if dm.iter().flatten().all(|v| *v == 0.0) {
                return vec![];
            }
            let n = space.dim(k);
            let tab = &space.volume[k];
            let mut vals = vec![0.0; n * n];
            for qp in 0..tab.n_points() {
                let w = tab.weights[qp];
                let g = &tab.grads[qp * n..(qp + 1) * n];
                for j in 0..n {
                    for i in 0..n {
                        let dg = [dm[0][0] * g[i][0] + dm[0][1] * g[i][1], dm[1][0] * g[i][0] + dm[1][1] * g[i][1]];
                        vals[j * n + i] += w * (dg[0] * g[j][0] + dg[1] * g[j][1]);
                    }
                }
            }
            let dofs = scalar_dofs(space, k);
            vec![Block { rows: dofs.clone(), cols: dofs, vals }]
        })
        .collect();
    let faces = active_faces(d, false);
    let face_blocks: Vec<Vec<Block>> = faces
        .par_iter()
        .map(|&fid| {
            let (omega, penalty) = face_weights(d, fid, Quantity::Diffusion);
            let (sides, tab) = face_sides(d, fid);
            let mut out = Vec::new();
            for (s, trial) in sides.iter().enumerate() {
                for (t, test) in sides.iter().enumerate() {
                    let ds = d.coeffs.get(trial.element).diffusivity;
                    let dt = d.coeffs.get(test.element).diffusivity;
                    let cons = parts == Parts::Full;
                    let (nsd, ntd) = (space.dim(trial.element), space.dim(test.element));
                    let (n_s, n_t) = (trial.normal, test.normal);
                    let nn = n_s[0] * n_t[0] + n_s[1] * n_t[1];
                    // D_s^T n_t and D_t^T n_s so that (D∇φ)·n = ∇φ·(Dᵀn)
                    let dsn = [ds[0][0] * n_t[0] + ds[1][0] * n_t[1], ds[0][1] * n_t[0] + ds[1][1] * n_t[1]];
                    let dtn = [dt[0][0] * n_s[0] + dt[1][0] * n_s[1], dt[0][1] * n_s[0] + dt[1][1] * n_s[1]];
                    let mut vals = vec![0.0; nsd * ntd];
                    let mut any = false;
                    for qp in 0..tab.weights.len() {
                        let w = tab.weights[qp];
                        let phi = &trial.tab.values[qp * nsd..(qp + 1) * nsd];
                        let gphi = &trial.tab.grads[qp * nsd..(qp + 1) * nsd];
                        let psi = &test.tab.values[qp * ntd..(qp + 1) * ntd];
                        let gpsi = &test.tab.grads[qp * ntd..(qp + 1) * ntd];
                        for j in 0..ntd {
                            for i in 0..nsd {
                                let mut v = penalty * nn * phi[i] * psi[j];
                                if cons {
                                    v -= omega[s] * (gphi[i][0] * dsn[0] + gphi[i][1] * dsn[1]) * psi[j]
                                        + omega[t] * (gpsi[j][0] * dtn[0] + gpsi[j][1] * dtn[1]) * phi[i];
                                }
                                if v != 0.0 {
                                    any = true;
                                }
                                vals[j * nsd + i] += w * v;
                            }
                        }
                    }
                    if any {
                        out.push(Block {
                            rows: scalar_dofs(space, test.element),
                            cols: scalar_dofs(space, trial.element),
                            vals,
                        });
                    }
                }
            }
            out
        })
        .collect();
    let mut all = vol_blocks;
    all.extend(face_blocks);
    Ok(merge(ns, ns, all))
}

/// Coupling `(q div u, ψ) - Σ_F ∫ {ψ} ⟦q u⟧_n` with `q = γ` (first matrix)
/// and `q = γτ₂` (second matrix). Rows are scalar tests, columns vector trials.
pub fn assemble_coupling(d: &Discretization) -> Result<(CsrMatrix, CsrMatrix), Error> {
    d.check()?;
    let c = coupling(d, |m| m.gamma);
    let ct = coupling(d, |m| m.gamma * m.tau2);
    Ok((c, ct))
}

fn coupling(d: &Discretization, coef: impl Fn(&Material) -> f64 + Sync) -> CsrMatrix {
    let space = &d.space;
    let vol_blocks: Vec<Vec<Block>> = (0..space.n_elements())
        .into_par_iter()
        .map(|k| {
            let g = coef(d.coeffs.get(k));
            if g == 0.0 {
                return vec![];
            }
            let n = space.dim(k);
            let tab = &space.volume[k];
            let mut vals = vec![0.0; n * 2 * n];
            for qp in 0..tab.n_points() {
                let w = g * tab.weights[qp];
                let v = &tab.values[qp * n..(qp + 1) * n];
                let gr = &tab.grads[qp * n..(qp + 1) * n];
                for j in 0..n {
                    for a in 0..2 {
                        for i in 0..n {
                            vals[j * 2 * n + a * n + i] += w * gr[i][a] * v[j];
                        }
                    }
                }
            }
            vec![Block { rows: scalar_dofs(space, k), cols: vector_dofs(space, k), vals }]
        })
        .collect();
    let faces = active_faces(d, true);
    let face_blocks: Vec<Vec<Block>> = faces
        .par_iter()
        .map(|&fid| {
            let (sides, tab) = face_sides(d, fid);
            let avg = if sides.len() == 2 { 0.5 } else { 1.0 };
            let mut out = Vec::new();
            for trial in &sides {
                let g = coef(d.coeffs.get(trial.element));
                if g == 0.0 {
                    continue;
                }
                for test in &sides {
                    let (nsd, ntd) = (space.dim(trial.element), space.dim(test.element));
                    let mut vals = vec![0.0; ntd * 2 * nsd];
                    for qp in 0..tab.weights.len() {
                        let w = tab.weights[qp] * avg * g;
                        let phi = &trial.tab.values[qp * nsd..(qp + 1) * nsd];
                        let psi = &test.tab.values[qp * ntd..(qp + 1) * ntd];
                        for j in 0..ntd {
                            for a in 0..2 {
                                for i in 0..nsd {
                                    vals[j * 2 * nsd + a * nsd + i] -= w * psi[j] * phi[i] * trial.normal[a];
                                }
                            }
                        }
                    }
                    out.push(Block {
                        rows: scalar_dofs(space, test.element),
                        cols: vector_dofs(space, trial.element),
                        vals,
                    });
                }
            }
            out
        })
        .collect();
    let mut all = vol_blocks;
    all.extend(face_blocks);
    merge(space.n_scalar, space.n_vector(), all)
}

/// Weighted mass matrix `(w φ, ψ)`, scalar or vector valued.
pub fn assemble_mass(space: &DgSpace, weight: &[f64], vector: bool) -> CsrMatrix {
    let blocks: Vec<Vec<Block>> = (0..space.n_elements())
        .into_par_iter()
        .map(|k| {
            let c = weight[k];
            if c == 0.0 {
                return vec![];
            }
            let n = space.dim(k);
            let tab = &space.volume[k];
            let mut m = vec![0.0; n * n];
            for qp in 0..tab.n_points() {
                let w = c * tab.weights[qp];
                let v = &tab.values[qp * n..(qp + 1) * n];
                for j in 0..n {
                    for i in 0..n {
                        m[j * n + i] += w * v[i] * v[j];
                    }
                }
            }
            if vector {
                let mut vals = vec![0.0; 4 * n * n];
                for a in 0..2 {
                    for j in 0..n {
                        for i in 0..n {
                            vals[(a * n + j) * 2 * n + a * n + i] = m[j * n + i];
                        }
                    }
                }
                let dofs = vector_dofs(space, k);
                vec![Block { rows: dofs.clone(), cols: dofs, vals }]
            } else {
                let dofs = scalar_dofs(space, k);
                vec![Block { rows: dofs.clone(), cols: dofs, vals: m }]
            }
        })
        .collect();
    let n = if vector { space.n_vector() } else { space.n_scalar };
    merge(n, n, blocks)
}

/// The assembled operators of the semi-discrete system
/// `A Ẍ + B Ẋ + K X = F` with
/// `A = [[M_u, 0], [C_τ2, M_φτ1]]`, `B = [[A_uδ, 0], [C, M_φ]]`,
/// `K = [[A_u, -Cᵀ], [0, A_φ]]`.
#[derive(Debug, Clone)]
pub struct BlockOperators {
    pub mass_u: CsrMatrix,
    pub mass_phi_tau1: CsrMatrix,
    pub mass_phi: CsrMatrix,
    pub elastic: CsrMatrix,
    pub elastic_visc: CsrMatrix,
    pub div: CsrMatrix,
    pub div_visc: CsrMatrix,
    pub diffusion: CsrMatrix,
    pub coupling: CsrMatrix,
    pub coupling_tau2: CsrMatrix,
}

impl BlockOperators {
    pub fn assemble(d: &Discretization) -> Result<Self, Error> {
        let space = &d.space;
        let mats = &d.coeffs.materials;
        let rho: Vec<f64> = mats.iter().map(|m| m.rho).collect();
        let d0t: Vec<f64> = mats.iter().map(|m| m.d0 * m.tau1).collect();
        let d0: Vec<f64> = mats.iter().map(|m| m.d0).collect();
        let (coupling, coupling_tau2) = assemble_coupling(d)?;
        Ok(BlockOperators {
            mass_u: assemble_mass(space, &rho, true),
            mass_phi_tau1: assemble_mass(space, &d0t, false),
            mass_phi: assemble_mass(space, &d0, false),
            elastic: assemble_elasticity(d, false, Parts::Full)?,
            elastic_visc: assemble_elasticity(d, true, Parts::Full)?,
            div: assemble_div(d, false, Parts::Full)?,
            div_visc: assemble_div(d, true, Parts::Full)?,
            diffusion: assemble_diffusion(d, Parts::Full)?,
            coupling,
            coupling_tau2,
        })
    }

    pub fn n_u(&self) -> usize {
        self.mass_u.nrows
    }

    pub fn n_phi(&self) -> usize {
        self.mass_phi.nrows
    }

    /// `A_u = A_e + A_div`.
    pub fn stiffness_u(&self) -> CsrMatrix {
        CsrMatrix::combine(&[(1.0, &self.elastic), (1.0, &self.div)])
    }

    /// `A_uδ = A_eδ1 + A_divδ2`.
    pub fn damping_u(&self) -> CsrMatrix {
        CsrMatrix::combine(&[(1.0, &self.elastic_visc), (1.0, &self.div_visc)])
    }

    /// Monolithic `A`, `B`, `K`.
    pub fn monolithic(&self) -> (CsrMatrix, CsrMatrix, CsrMatrix) {
        let au = self.stiffness_u();
        let aud = self.damping_u();
        let ct = self.coupling.transpose().scaled(-1.0);
        let a = CsrMatrix::block(&[
            vec![Some(&self.mass_u), None],
            vec![Some(&self.coupling_tau2), Some(&self.mass_phi_tau1)],
        ]);
        let b = CsrMatrix::block(&[vec![Some(&aud), None], vec![Some(&self.coupling), Some(&self.mass_phi)]]);
        let k = CsrMatrix::block(&[vec![Some(&au), Some(&ct)], vec![None, Some(&self.diffusion)]]);
        (a, b, k)
    }
}
