//! Implicit time integration of the semi-discrete system.
//!
//! With `τ₁ > 0` on every element the system `A Ẍ + B Ẋ + K X = F` is
//! advanced by Newmark-β in predictor-corrector form. With `τ₁ = 0` the
//! pressure equation is first order in time; displacement is advanced by
//! Newmark-β, pressure by the θ-method, and the two are solved together for
//! `(U, Φ)` at each step.

use std::str::FromStr;

use crate::assembly::BlockOperators;
use crate::error::{Error, TimeError};
use crate::models::CoefficientField;
use crate::solver::SparseLu;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Newmark,
    NewmarkTheta,
}

impl Scheme {
    /// Scheme dictated by the relaxation time `τ₁`: Newmark when it is
    /// positive everywhere, Newmark-θ when it vanishes everywhere.
    pub fn for_coefficients(coeffs: &CoefficientField) -> Result<Scheme, TimeError> {
        let positive = coeffs.materials.iter().filter(|m| m.tau1 > 0.0).count();
        match positive {
            0 => Ok(Scheme::NewmarkTheta),
            n if n == coeffs.len() => Ok(Scheme::Newmark),
            _ => Err(TimeError::Config(
                "tau1 must be either positive on every element or zero on every element".into(),
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Newmark => "newmark",
            Scheme::NewmarkTheta => "newmark-theta",
        }
    }
}

impl FromStr for Scheme {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "newmark" => Ok(Scheme::Newmark),
            "newmark-theta" => Ok(Scheme::NewmarkTheta),
            other => Err(TimeError::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
    /// Keep one factorization of the step matrix for the whole run.
    pub reuse_factorization: bool,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        IntegratorConfig { dt, t_final, beta: 0.25, gamma: 0.5, theta: 0.5, reuse_factorization: true }
    }

    pub fn validate(&self) -> Result<(), TimeError> {
        let bad = |msg: String| Err(TimeError::Config(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("final time must be non-negative, got {}", self.t_final));
        }
        if !(0.0..=0.5).contains(&self.beta) {
            return bad(format!("beta must satisfy 0 <= 2 beta <= 1, got {}", self.beta));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1], got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        if self.beta == 0.0 {
            return bad("beta = 0 is explicit and not supported by the implicit solver".into());
        }
        Ok(())
    }

    /// Number of steps; `t_final` must be an integer multiple of `dt`.
    pub fn n_steps(&self) -> Result<usize, TimeError> {
        self.validate()?;
        let n = self.t_final / self.dt;
        let r = n.round();
        if (n - r).abs() > 1e-8 * n.max(1.0) {
            return Err(TimeError::Config(format!(
                "final time {} is not a multiple of the time step {}",
                self.t_final, self.dt
            )));
        }
        Ok(r as usize)
    }
}

/// Discrete state at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    /// Displacement velocity.
    pub z: Vec<f64>,
    /// Displacement acceleration.
    pub a: Vec<f64>,
    /// Pressure rate, tracked only by the Newmark scheme.
    pub phi_dot: Option<Vec<f64>>,
    /// Pressure second rate, tracked only by the Newmark scheme.
    pub phi_ddot: Option<Vec<f64>>,
}

impl State {
    pub fn n_u(&self) -> usize {
        self.u.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    fn check(&self, n_u: usize, n_phi: usize) -> Result<(), TimeError> {
        let shape = |what: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(TimeError::Shape(format!("{what} has length {got}, expected {want}")))
            }
        };
        shape("U", self.u.len(), n_u)?;
        shape("Z", self.z.len(), n_u)?;
        shape("A", self.a.len(), n_u)?;
        shape("Phi", self.phi.len(), n_phi)?;
        if let Some(v) = &self.phi_dot {
            shape("Phi'", v.len(), n_phi)?;
        }
        if let Some(v) = &self.phi_ddot {
            shape("Phi''", v.len(), n_phi)?;
        }
        Ok(())
    }
}

/// Initial data as DOF vectors; `phi_dot` is used only when `τ₁ > 0`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
}

impl InitialData {
    pub fn zeros(n_u: usize, n_phi: usize) -> Self {
        InitialData { u: vec![0.0; n_u], z: vec![0.0; n_u], phi: vec![0.0; n_phi], phi_dot: vec![0.0; n_phi] }
    }
}

/// Right-hand side `(F, G)` at one time level.
#[derive(Debug, Clone, Copy)]
pub struct Rhs<'a> {
    pub f: &'a [f64],
    pub g: &'a [f64],
}

fn lin(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = vec![0.0; terms[0].1.len()];
    for &(c, v) in terms {
        if c != 0.0 {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
    }
    out
}

fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

/// Step matrix with its factorization, refactored on every solve when reuse
/// is disabled.
#[derive(Debug)]
struct StepSolver {
    matrix: CsrMatrix,
    split: usize,
    lu: Option<SparseLu>,
    reuse: bool,
    factorizations: usize,
}

impl StepSolver {
    fn new(matrix: CsrMatrix, split: usize, reuse: bool) -> Self {
        StepSolver { matrix, split, lu: None, reuse, factorizations: 0 }
    }

    fn solve(&mut self, b: &[f64]) -> Result<Vec<f64>, Error> {
        if self.lu.is_none() || !self.reuse {
            self.lu = Some(SparseLu::factor_blocks(&self.matrix, self.split)?);
            self.factorizations += 1;
        }
        Ok(self.lu.as_ref().expect("factorization present").solve(b)?)
    }
}

#[derive(Debug)]
struct NewmarkParts {
    a: CsrMatrix,
    b: CsrMatrix,
    k: CsrMatrix,
}

#[derive(Debug)]
struct ThetaParts {
    mass_u: CsrMatrix,
    stiff_u: CsrMatrix,
    damp_u: CsrMatrix,
    coupling_t: CsrMatrix,
    r_uu: CsrMatrix,
    r_uz: CsrMatrix,
    r_ua: CsrMatrix,
    r_pp: CsrMatrix,
    c_u: CsrMatrix,
    c_z: CsrMatrix,
    c_a: CsrMatrix,
}

#[derive(Debug)]
enum Parts {
    Newmark(NewmarkParts),
    Theta(ThetaParts),
}

/// Time integrator bound to a set of assembled operators.
#[derive(Debug)]
pub struct Integrator {
    pub scheme: Scheme,
    pub cfg: IntegratorConfig,
    n_u: usize,
    n_phi: usize,
    parts: Parts,
    solver: StepSolver,
}

impl Integrator {
    pub fn new(ops: &BlockOperators, scheme: Scheme, cfg: IntegratorConfig) -> Result<Self, Error> {
        cfg.validate()?;
        let (n_u, n_phi) = (ops.n_u(), ops.n_phi());
        let (dt, beta, gamma, theta) = (cfg.dt, cfg.beta, cfg.gamma, cfg.theta);
        let (parts, matrix) = match scheme {
            Scheme::Newmark => {
                if ops.mass_phi_tau1.nnz() == 0 && n_phi > 0 {
                    return Err(TimeError::Config("Newmark scheme needs tau1 > 0".into()).into());
                }
                let (a, b, k) = ops.monolithic();
                let s = CsrMatrix::combine(&[(1.0, &a), (gamma * dt, &b), (beta * dt * dt, &k)]);
                (Parts::Newmark(NewmarkParts { a, b, k }), s)
            }
            Scheme::NewmarkTheta => {
                if ops.mass_phi_tau1.max_abs() > 0.0 {
                    return Err(TimeError::Config("Newmark-theta scheme needs tau1 = 0".into()).into());
                }
                let stiff_u = ops.stiffness_u();
                let damp_u = ops.damping_u();
                let a0 = 1.0 / (beta * dt * dt);
                let tt = 1.0 - theta;
                let c = &ops.coupling;
                let ct2 = &ops.coupling_tau2;
                let r_uu = CsrMatrix::combine(&[(a0, &ops.mass_u), (gamma / (beta * dt), &damp_u)]);
                let r_uz = CsrMatrix::combine(&[(1.0 / (beta * dt), &ops.mass_u), (-(beta - gamma) / beta, &damp_u)]);
                let r_ua = CsrMatrix::combine(&[
                    ((1.0 - 2.0 * beta) / (2.0 * beta), &ops.mass_u),
                    (-dt * (2.0 * beta - gamma) / (2.0 * beta), &damp_u),
                ]);
                let r_pp = CsrMatrix::combine(&[(1.0 / dt, &ops.mass_phi), (-tt, &ops.diffusion)]);
                let c_u = CsrMatrix::combine(&[(theta * a0, ct2), (theta * a0 * dt * gamma, c)]);
                let c_z = CsrMatrix::combine(&[(theta / (beta * dt), ct2), ((theta * gamma - beta) / beta, c)]);
                let c_a = CsrMatrix::combine(&[
                    ((theta - 2.0 * beta) / (2.0 * beta), ct2),
                    (theta * dt * (gamma - 2.0 * beta) / (2.0 * beta), c),
                ]);
                let coupling_t = c.transpose();
                let l_uu = CsrMatrix::combine(&[(1.0, &r_uu), (1.0, &stiff_u)]);
                let l_pp = CsrMatrix::combine(&[(1.0 / dt, &ops.mass_phi), (theta, &ops.diffusion)]);
                let neg_ct = coupling_t.scaled(-1.0);
                let l = CsrMatrix::block(&[vec![Some(&l_uu), Some(&neg_ct)], vec![Some(&c_u), Some(&l_pp)]]);
                let parts = ThetaParts {
                    mass_u: ops.mass_u.clone(),
                    stiff_u,
                    damp_u,
                    coupling_t,
                    r_uu,
                    r_uz,
                    r_ua,
                    r_pp,
                    c_u,
                    c_z,
                    c_a,
                };
                (Parts::Theta(parts), l)
            }
        };
        let reuse = cfg.reuse_factorization;
        Ok(Integrator { scheme, cfg, n_u, n_phi, parts, solver: StepSolver::new(matrix, n_u, reuse) })
    }

    /// Number of factorizations of the step matrix performed so far.
    pub fn factorizations(&self) -> usize {
        self.solver.factorizations
    }

    /// Step matrix solved at every step.
    pub fn step_matrix(&self) -> &CsrMatrix {
        &self.solver.matrix
    }

    /// State at `t0` with accelerations consistent with the equations.
    pub fn initial_state(&self, t0: f64, init: InitialData, rhs: Rhs) -> Result<State, Error> {
        let probe = State {
            t: t0,
            u: init.u,
            phi: init.phi,
            z: init.z,
            a: vec![0.0; self.n_u],
            phi_dot: Some(init.phi_dot),
            phi_ddot: None,
        };
        probe.check(self.n_u, self.n_phi)?;
        self.check_rhs(rhs)?;
        let State { u, phi, z, phi_dot, .. } = probe;
        let phi_dot = phi_dot.expect("set above");
        match &self.parts {
            Parts::Newmark(p) => {
                let x = concat(&u, &phi);
                let y = concat(&z, &phi_dot);
                let mut r = concat(rhs.f, rhs.g);
                p.b.mul_add(-1.0, &y, &mut r);
                p.k.mul_add(-1.0, &x, &mut r);
                let acc = SparseLu::factor(&p.a)?.solve(&r)?;
                let (a, pdd) = acc.split_at(self.n_u);
                Ok(State { t: t0, u, phi, z, a: a.to_vec(), phi_dot: Some(phi_dot), phi_ddot: Some(pdd.to_vec()) })
            }
            Parts::Theta(p) => {
                let mut r = rhs.f.to_vec();
                p.damp_u.mul_add(-1.0, &z, &mut r);
                p.stiff_u.mul_add(-1.0, &u, &mut r);
                p.coupling_t.mul_add(1.0, &phi, &mut r);
                let a = SparseLu::factor(&p.mass_u)?.solve(&r)?;
                Ok(State { t: t0, u, phi, z, a, phi_dot: None, phi_ddot: None })
            }
        }
    }

    fn check_rhs(&self, rhs: Rhs) -> Result<(), TimeError> {
        if rhs.f.len() != self.n_u || rhs.g.len() != self.n_phi {
            return Err(TimeError::Shape(format!(
                "right-hand side has lengths ({}, {}), expected ({}, {})",
                rhs.f.len(),
                rhs.g.len(),
                self.n_u,
                self.n_phi
            )));
        }
        Ok(())
    }

    /// Advance one step from `s`; `now` and `next` are the right-hand sides
    /// at `s.t` and `s.t + Δt`.
    pub fn step(&mut self, s: &State, now: Rhs, next: Rhs) -> Result<State, Error> {
        s.check(self.n_u, self.n_phi)?;
        self.check_rhs(now)?;
        self.check_rhs(next)?;
        match self.scheme {
            Scheme::Newmark => self.step_newmark(s, next),
            Scheme::NewmarkTheta => self.step_newmark_theta(s, now, next),
        }
    }

    fn step_newmark(&mut self, s: &State, next: Rhs) -> Result<State, Error> {
        let Parts::Newmark(p) = &self.parts else { unreachable!("scheme and parts agree") };
        let (dt, beta, gamma) = (self.cfg.dt, self.cfg.beta, self.cfg.gamma);
        let missing = || TimeError::Shape("Newmark state needs pressure rates".into());
        let pd = s.phi_dot.as_ref().ok_or_else(missing)?;
        let pdd = s.phi_ddot.as_ref().ok_or_else(missing)?;
        let x = concat(&s.u, &s.phi);
        let y = concat(&s.z, pd);
        let acc = concat(&s.a, pdd);
        let xp = lin(&[(1.0, &x), (dt, &y), ((0.5 - beta) * dt * dt, &acc)]);
        let yp = lin(&[(1.0, &y), ((1.0 - gamma) * dt, &acc)]);
        let mut r = concat(next.f, next.g);
        p.b.mul_add(-1.0, &yp, &mut r);
        p.k.mul_add(-1.0, &xp, &mut r);
        let acc1 = self.solver.solve(&r)?;
        let x1 = lin(&[(1.0, &xp), (beta * dt * dt, &acc1)]);
        let y1 = lin(&[(1.0, &yp), (gamma * dt, &acc1)]);
        let n = self.n_u;
        Ok(State {
            t: s.t + dt,
            u: x1[..n].to_vec(),
            phi: x1[n..].to_vec(),
            z: y1[..n].to_vec(),
            a: acc1[..n].to_vec(),
            phi_dot: Some(y1[n..].to_vec()),
            phi_ddot: Some(acc1[n..].to_vec()),
        })
    }

    fn step_newmark_theta(&mut self, s: &State, now: Rhs, next: Rhs) -> Result<State, Error> {
        let Parts::Theta(p) = &self.parts else { unreachable!("scheme and parts agree") };
        let (dt, beta, gamma, theta) = (self.cfg.dt, self.cfg.beta, self.cfg.gamma, self.cfg.theta);
        let mut ru = next.f.to_vec();
        p.r_uu.mul_add(1.0, &s.u, &mut ru);
        p.r_uz.mul_add(1.0, &s.z, &mut ru);
        p.r_ua.mul_add(1.0, &s.a, &mut ru);
        let mut rp = lin(&[(theta, next.g), (1.0 - theta, now.g)]);
        p.r_pp.mul_add(1.0, &s.phi, &mut rp);
        p.c_u.mul_add(1.0, &s.u, &mut rp);
        p.c_z.mul_add(1.0, &s.z, &mut rp);
        p.c_a.mul_add(1.0, &s.a, &mut rp);
        let sol = self.solver.solve(&concat(&ru, &rp))?;
        let (u1, phi1) = sol.split_at(self.n_u);
        let a0 = 1.0 / (beta * dt * dt);
        let du = lin(&[(1.0, u1), (-1.0, &s.u)]);
        let a1 = lin(&[(a0, &du), (-1.0 / (beta * dt), &s.z), ((2.0 * beta - 1.0) / (2.0 * beta), &s.a)]);
        let z1 = lin(&[(1.0, &s.z), (dt * gamma, &a1), (dt * (1.0 - gamma), &s.a)]);
        Ok(State { t: s.t + dt, u: u1.to_vec(), phi: phi1.to_vec(), z: z1, a: a1, phi_dot: None, phi_ddot: None })
    }
}

/// Discrete energy used by the dissipation checks.
///
/// Newmark-θ states: `½ZᵀM_uZ + ½UᵀA_uU + ½ΦᵀM_φΦ`, non-increasing for the
/// trapezoidal parameters when `τ₂ = 0`. Newmark states additionally carry
/// `½Φ̇ᵀM_φτ1Φ̇ + ½ΦᵀA_φΦ` in place of the pressure mass term, which is
/// non-increasing when the coupling vanishes.
pub fn discrete_energy(ops: &BlockOperators, s: &State) -> f64 {
    let mut e = 0.5 * ops.mass_u.quad_form(&s.z) + 0.5 * ops.elastic.quad_form(&s.u) + 0.5 * ops.div.quad_form(&s.u);
    match &s.phi_dot {
        Some(pd) => e += 0.5 * ops.mass_phi_tau1.quad_form(pd) + 0.5 * ops.diffusion.quad_form(&s.phi),
        None => e += 0.5 * ops.mass_phi.quad_form(&s.phi),
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> CsrMatrix {
        CsrMatrix::from_dense(&[vec![v]])
    }

    /// Operators of two decoupled scalar equations:
    /// `m ü + k u = 0` and `τ φ̈ + φ̇ + a φ = 0`.
    fn scalar_ops(m: f64, k: f64, tau: f64, a: f64) -> BlockOperators {
        BlockOperators {
            mass_u: scalar(m),
            mass_phi_tau1: scalar(tau),
            mass_phi: scalar(1.0),
            elastic: scalar(k),
            elastic_visc: scalar(0.0),
            div: scalar(0.0),
            div_visc: scalar(0.0),
            diffusion: scalar(a),
            coupling: scalar(0.0),
            coupling_tau2: scalar(0.0),
        }
    }

    fn run(ops: &BlockOperators, scheme: Scheme, cfg: IntegratorConfig, init: InitialData) -> State {
        let zero = [0.0];
        let rhs = Rhs { f: &zero, g: &zero };
        let steps = cfg.n_steps().unwrap();
        let mut it = Integrator::new(ops, scheme, cfg).unwrap();
        let mut s = it.initial_state(0.0, init, rhs).unwrap();
        for _ in 0..steps {
            s = it.step(&s, rhs, rhs).unwrap();
        }
        s
    }

    fn order(errors: &[f64]) -> Vec<f64> {
        errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    }

    #[test]
    fn oscillator_is_second_order() {
        let ops = scalar_ops(1.0, 1.0, 1.0, 1.0);
        let init = InitialData { u: vec![1.0], z: vec![0.0], phi: vec![0.0], phi_dot: vec![0.0] };
        let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
            .iter()
            .map(|&dt| {
                let s = run(&ops, Scheme::Newmark, IntegratorConfig::new(dt, 1.0), init.clone());
                (s.u[0] - 1f64.cos()).abs()
            })
            .collect();
        for p in order(&errs) {
            assert!((p - 2.0).abs() < 0.1, "order {p}");
        }
        let s = run(&ops, Scheme::Newmark, IntegratorConfig::new(1e-3, 1.0), init);
        assert!((s.u[0] - 1f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn crank_nicolson_is_second_order() {
        let ops = scalar_ops(1.0, 1.0, 0.0, 1.0);
        let init = InitialData { u: vec![0.0], z: vec![0.0], phi: vec![1.0], phi_dot: vec![0.0] };
        let errs: Vec<f64> = [1e-1, 5e-2, 2.5e-2, 1.25e-2]
            .iter()
            .map(|&dt| {
                let s = run(&ops, Scheme::NewmarkTheta, IntegratorConfig::new(dt, 1.0), init.clone());
                (s.phi[0] - (-1f64).exp()).abs()
            })
            .collect();
        for p in order(&errs) {
            assert!((p - 2.0).abs() < 0.1, "order {p}");
        }
    }

    #[test]
    fn theta_displacement_matches_newmark() {
        // with no coupling both schemes advance u by the same Newmark recursion
        let init = InitialData { u: vec![1.0], z: vec![0.5], phi: vec![0.0], phi_dot: vec![0.0] };
        let a = run(&scalar_ops(2.0, 3.0, 1.0, 1.0), Scheme::Newmark, IntegratorConfig::new(0.01, 0.5), init.clone());
        let b =
            run(&scalar_ops(2.0, 3.0, 0.0, 1.0), Scheme::NewmarkTheta, IntegratorConfig::new(0.01, 0.5), init);
        assert!((a.u[0] - b.u[0]).abs() < 1e-11 && (a.z[0] - b.z[0]).abs() < 1e-11);
    }

    #[test]
    fn zero_data_stays_zero() {
        for (tau, scheme) in [(1.0, Scheme::Newmark), (0.0, Scheme::NewmarkTheta)] {
            let s = run(&scalar_ops(1.0, 1.0, tau, 1.0), scheme, IntegratorConfig::new(0.1, 1.0), InitialData::zeros(1, 1));
            assert_eq!((s.u[0], s.phi[0], s.z[0], s.a[0]), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn undamped_oscillator_conserves_energy() {
        let ops = scalar_ops(2.0, 5.0, 1.0, 1.0);
        let init = InitialData { u: vec![1.0], z: vec![-1.0], phi: vec![0.0], phi_dot: vec![0.0] };
        let zero = [0.0];
        let rhs = Rhs { f: &zero, g: &zero };
        let mut it = Integrator::new(&ops, Scheme::Newmark, IntegratorConfig::new(0.05, 2.0)).unwrap();
        let mut s = it.initial_state(0.0, init, rhs).unwrap();
        let e0 = discrete_energy(&ops, &s);
        for _ in 0..40 {
            s = it.step(&s, rhs, rhs).unwrap();
            assert!((discrete_energy(&ops, &s) - e0).abs() < 1e-12 * e0);
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        let mut c = IntegratorConfig::new(0.1, 1.0);
        c.beta = 0.6;
        assert!(c.validate().is_err());
        assert!(IntegratorConfig::new(0.0, 1.0).validate().is_err());
        assert!(IntegratorConfig::new(0.3, 1.0).n_steps().is_err());
        assert_eq!(IntegratorConfig::new(0.1, 1.0).n_steps().unwrap(), 10);
        let ops = scalar_ops(1.0, 1.0, 0.0, 1.0);
        assert!(Integrator::new(&ops, Scheme::Newmark, IntegratorConfig::new(0.1, 1.0)).is_err());
        let ops = scalar_ops(1.0, 1.0, 1.0, 1.0);
        assert!(Integrator::new(&ops, Scheme::NewmarkTheta, IntegratorConfig::new(0.1, 1.0)).is_err());
    }

    #[test]
    fn reuse_flag_does_not_change_trajectory() {
        let ops = scalar_ops(1.0, 4.0, 0.5, 2.0);
        let init = InitialData { u: vec![1.0], z: vec![0.0], phi: vec![1.0], phi_dot: vec![0.0] };
        let mut cfg = IntegratorConfig::new(0.01, 0.2);
        let a = run(&ops, Scheme::Newmark, cfg.clone(), init.clone());
        cfg.reuse_factorization = false;
        let b = run(&ops, Scheme::Newmark, cfg, init);
        assert!((a.u[0] - b.u[0]).abs() <= 1e-12 && (a.phi[0] - b.phi[0]).abs() <= 1e-12);
    }

    #[test]
    fn scheme_from_coefficients() {
        use crate::models::Material;
        let f = CoefficientField::uniform(3, Material::unit());
        assert_eq!(Scheme::for_coefficients(&f).unwrap(), Scheme::Newmark);
        let mut f = CoefficientField::uniform(3, Material { tau1: 0.0, ..Material::unit() });
        assert_eq!(Scheme::for_coefficients(&f).unwrap(), Scheme::NewmarkTheta);
        f.materials[1].tau1 = 1.0;
        assert!(Scheme::for_coefficients(&f).is_err());
    }
}
