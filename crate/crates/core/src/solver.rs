//! Sparse direct solves with residual verification.
//!
//! General matrices go through faer's supernodal LU with partial pivoting.
//! Two-by-two block matrices that become symmetric after scaling the second
//! block row by a constant are factored with a sparse LDLᵀ instead, which
//! is several times cheaper; the step matrices of the coupled system have
//! this form when the coupling coefficients are uniform.

use std::hash::{Hash, Hasher};

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, LdltRef, SymbolicCholesky, SymmetricOrdering};
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat, Par, Side};

use crate::error::SolverError;
use crate::sparse::CsrMatrix;

/// Relative residual every solve must reach.
pub const RESIDUAL_TOL: f64 = 1e-10;
const MAX_REFINEMENTS: usize = 3;
/// Relative asymmetry tolerated when detecting a symmetrizable matrix.
const SYMMETRY_TOL: f64 = 1e-13;

enum Backend {
    Lu(Lu<usize, f64>),
    Ldlt { symbolic: SymbolicCholesky<usize>, values: Vec<f64>, row_scale: Vec<f64> },
}

/// A factored sparse matrix; solves are checked against the original.
pub struct SparseLu {
    matrix: CsrMatrix,
    backend: Backend,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu")
            .field("n", &self.matrix.nrows)
            .field("nnz", &self.matrix.nnz())
            .field("symmetric", &self.is_symmetric())
            .finish()
    }
}

fn check(a: &CsrMatrix) -> Result<(), SolverError> {
    if a.nrows != a.ncols {
        return Err(SolverError::NotSquare(a.nrows, a.ncols));
    }
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::Factorization("matrix has non-finite entries".into()));
    }
    if let Some(i) = (0..a.nrows).find(|&i| a.indptr[i] == a.indptr[i + 1]) {
        return Err(SolverError::Factorization(format!("structurally singular: row {i} is empty")));
    }
    Ok(())
}

fn to_faer(a: &CsrMatrix, row_scale: Option<&[f64]>) -> Result<SparseColMat<usize, f64>, SolverError> {
    let mut trip = Vec::with_capacity(a.nnz());
    for i in 0..a.nrows {
        let s = row_scale.map_or(1.0, |r| r[i]);
        let (idx, val) = a.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            trip.push(Triplet::new(i, j, s * v));
        }
    }
    SparseColMat::<usize, f64>::try_new_from_triplets(a.nrows, a.ncols, &trip)
        .map_err(|e| SolverError::Factorization(format!("{e:?}")))
}

/// Scale `s` such that multiplying rows `split..` of `a` by `s` makes it
/// symmetric, if one exists.
pub fn block_row_scaling(a: &CsrMatrix, split: usize) -> Option<f64> {
    if a.nrows != a.ncols || split > a.nrows {
        return None;
    }
    let mut s = None;
    'find: for i in split..a.nrows {
        let (idx, val) = a.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            if j < split && v != 0.0 {
                let w = a.get(j, i);
                if w == 0.0 {
                    return None;
                }
                s = Some(w / v);
                break 'find;
            }
        }
    }
    let s = s.unwrap_or(1.0);
    let scale = |i: usize| if i < split { 1.0 } else { s };
    let tol = SYMMETRY_TOL * a.max_abs() * s.abs().max(1.0);
    for i in 0..a.nrows {
        let (idx, val) = a.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            if (scale(i) * v - scale(j) * a.get(j, i)).abs() > tol {
                return None;
            }
        }
    }
    Some(s)
}

impl SparseLu {
    /// LU factorization with partial pivoting.
    pub fn factor(a: &CsrMatrix) -> Result<Self, SolverError> {
        check(a)?;
        let lu = to_faer(a, None)?.sp_lu().map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
        Ok(SparseLu { matrix: a.clone(), backend: Backend::Lu(lu) })
    }

    /// LDLᵀ factorization of the row-scaled matrix when the blocks split at
    /// `split` admit a symmetrizing scale, LU otherwise. A factorization
    /// that fails a trial solve also falls back to LU.
    pub fn factor_blocks(a: &CsrMatrix, split: usize) -> Result<Self, SolverError> {
        check(a)?;
        let Some(s) = block_row_scaling(a, split) else {
            return Self::factor(a);
        };
        let row_scale: Vec<f64> = (0..a.nrows).map(|i| if i < split { 1.0 } else { s }).collect();
        let ldlt = match Self::ldlt(a, row_scale) {
            Some(f) => f,
            None => return Self::factor(a),
        };
        let trial: Vec<f64> = a.mul_vec(&vec![1.0; a.nrows]);
        if ldlt.solve(&trial).is_ok() {
            Ok(ldlt)
        } else {
            Self::factor(a)
        }
    }

    fn ldlt(a: &CsrMatrix, row_scale: Vec<f64>) -> Option<Self> {
        let m = to_faer(a, Some(&row_scale)).ok()?;
        let symbolic =
            factorize_symbolic_cholesky(m.symbolic(), Side::Lower, SymmetricOrdering::Amd, Default::default()).ok()?;
        let mut values = vec![0.0; symbolic.len_val()];
        let mut buf = MemBuffer::new(symbolic.factorize_numeric_ldlt_scratch::<f64>(Par::Seq, Default::default()));
        symbolic
            .factorize_numeric_ldlt(
                &mut values,
                m.as_ref(),
                Side::Lower,
                LdltRegularization::default(),
                Par::Seq,
                MemStack::new(&mut buf),
                Default::default(),
            )
            .ok()?;
        if values.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(SparseLu { matrix: a.clone(), backend: Backend::Ldlt { symbolic, values, row_scale } })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows
    }

    /// Whether the symmetric factorization is in use.
    pub fn is_symmetric(&self) -> bool {
        matches!(self.backend, Backend::Ldlt { .. })
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        match &self.backend {
            Backend::Lu(lu) => {
                let rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
                let x = lu.solve(&rhs);
                (0..b.len()).map(|i| x[(i, 0)]).collect()
            }
            Backend::Ldlt { symbolic, values, row_scale } => {
                let mut rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| row_scale[i] * b[i]);
                let mut buf = MemBuffer::new(symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
                LdltRef::new(symbolic, values).solve_in_place_with_conj(
                    Conj::No,
                    rhs.as_mut(),
                    Par::Seq,
                    MemStack::new(&mut buf),
                );
                (0..b.len()).map(|i| rhs[(i, 0)]).collect()
            }
        }
    }

    /// Solve `A x = b`, refining iteratively until the relative residual is
    /// below [`RESIDUAL_TOL`].
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        let n = self.n();
        if b.len() != n {
            return Err(SolverError::Length { got: b.len(), expected: n });
        }
        let bn = norm(b);
        if bn == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = self.raw_solve(b);
        let mut res = f64::INFINITY;
        for it in 0..=MAX_REFINEMENTS {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(SolverError::NonFinite);
            }
            let mut r = b.to_vec();
            self.matrix.mul_add(-1.0, &x, &mut r);
            res = norm(&r) / bn;
            if res <= RESIDUAL_TOL || it == MAX_REFINEMENTS {
                break;
            }
            let dx = self.raw_solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        if res <= RESIDUAL_TOL {
            Ok(x)
        } else {
            Err(SolverError::Residual { residual: res, tol: RESIDUAL_TOL })
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One-off solve of `A x = b`.
pub fn solve_linear(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolverError> {
    SparseLu::factor(a)?.solve(b)
}

/// Solver that keeps the last factorization and reuses it while the matrix
/// is unchanged.
#[derive(Debug, Default)]
pub struct CachedSolver {
    cached: Option<(u64, SparseLu)>,
    pub factorizations: usize,
}

fn fingerprint(a: &CsrMatrix) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    (a.nrows, a.ncols).hash(&mut h);
    a.indptr.hash(&mut h);
    a.indices.hash(&mut h);
    for v in &a.data {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

impl CachedSolver {
    pub fn solve(&mut self, a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        let key = fingerprint(a);
        if self.cached.as_ref().is_none_or(|(k, lu)| *k != key || lu.matrix != *a) {
            self.cached = Some((key, SparseLu::factor(a)?));
            self.factorizations += 1;
        }
        self.cached.as_ref().unwrap().1.solve(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve_linear(&CsrMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn spd_two_by_two() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = solve_linear(&a, &[1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn nonsymmetric() {
        let a = CsrMatrix::from_dense(&[vec![0.0, 2.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 3.0, 4.0]]);
        let x = solve_linear(&a, &[2.0, 2.0, 7.0]).unwrap();
        for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - e).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(solve_linear(&a, &[1.0, 1.0]).is_err());
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve_linear(&a, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn quasi_definite_blocks_use_symmetric_factor() {
        // [[P, -Bᵀ], [c B, c' Q]] with c < 0 becomes symmetric after scaling
        // the second block row by -1/c.
        let a = CsrMatrix::from_dense(&[
            vec![4.0, 1.0, -1.0, 0.0],
            vec![1.0, 3.0, 0.0, -2.0],
            vec![0.5, 0.0, 1.5, 0.25],
            vec![0.0, 1.0, 0.25, 2.0],
        ]);
        assert_eq!(block_row_scaling(&a, 2), Some(-2.0));
        let f = SparseLu::factor_blocks(&a, 2).unwrap();
        assert!(f.is_symmetric());
        let b = [1.0, -2.0, 0.5, 3.0];
        let x = f.solve(&b).unwrap();
        let y = solve_linear(&a, &b).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((xi - yi).abs() < 1e-13);
        }
    }

    #[test]
    fn unsymmetrizable_blocks_fall_back_to_lu() {
        let a = CsrMatrix::from_dense(&[vec![4.0, 1.0, 0.0], vec![2.0, 3.0, 1.0], vec![0.0, 3.0, 2.0]]);
        assert_eq!(block_row_scaling(&a, 1), None);
        let f = SparseLu::factor_blocks(&a, 1).unwrap();
        assert!(!f.is_symmetric());
        let x = f.solve(&[5.0, 6.0, 5.0]).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cache_reuses_factorization() {
        let a = CsrMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let mut s = CachedSolver::default();
        s.solve(&a, &[1.0, 0.0]).unwrap();
        s.solve(&a, &[0.0, 1.0]).unwrap();
        assert_eq!(s.factorizations, 1);
        s.solve(&a.scaled(2.0), &[0.0, 1.0]).unwrap();
        assert_eq!(s.factorizations, 2);
    }
}
