//! Compressed sparse row matrices built from coordinate triplets.

use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
}

/// Coordinate-format accumulator.
#[derive(Debug, Clone, Default)]
pub struct Triplets {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Triplets {
    pub fn with_capacity(n: usize) -> Self {
        Triplets { rows: Vec::with_capacity(n), cols: Vec::with_capacity(n), vals: Vec::with_capacity(n) }
    }

    #[inline]
    pub fn push(&mut self, r: usize, c: usize, v: f64) {
        self.rows.push(r);
        self.cols.push(c);
        self.vals.push(v);
    }

    /// Add a dense row-major block at the given global row/column indices.
    pub fn push_block(&mut self, rows: &[usize], cols: &[usize], block: &[f64]) {
        let nc = cols.len();
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                let v = block[i * nc + j];
                if v != 0.0 {
                    self.push(r, c, v);
                }
            }
        }
    }

    pub fn extend(&mut self, other: Triplets) {
        self.rows.extend(other.rows);
        self.cols.extend(other.cols);
        self.vals.extend(other.vals);
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix { nrows: n, ncols: n, indptr: (0..=n).collect(), indices: (0..n).collect(), data: vec![1.0; n] }
    }

    /// Compress triplets, summing duplicates in input order so the result is
    /// bitwise reproducible.
    pub fn from_triplets(nrows: usize, ncols: usize, t: &Triplets) -> Self {
        let mut count = vec![0usize; nrows + 1];
        for &r in &t.rows {
            assert!(r < nrows, "row {r} out of range {nrows}");
            count[r + 1] += 1;
        }
        for i in 0..nrows {
            count[i + 1] += count[i];
        }
        // stable bucket by row
        let mut order = vec![0usize; t.len()];
        let mut next = count.clone();
        for (idx, &r) in t.rows.iter().enumerate() {
            order[next[r]] = idx;
            next[r] += 1;
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(t.len());
        let mut data = Vec::with_capacity(t.len());
        indptr.push(0);
        let mut row_buf: Vec<usize> = Vec::new();
        for r in 0..nrows {
            row_buf.clear();
            row_buf.extend_from_slice(&order[count[r]..count[r + 1]]);
            row_buf.sort_by_key(|&idx| t.cols[idx]);
            let mut last = usize::MAX;
            for &idx in &row_buf {
                let c = t.cols[idx];
                assert!(c < ncols, "column {c} out of range {ncols}");
                if c == last {
                    *data.last_mut().unwrap() += t.vals[idx];
                } else {
                    indices.push(c);
                    data.push(t.vals[idx]);
                    last = c;
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix { nrows, ncols, indptr, indices, data }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut t = Triplets::default();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push(i, j, v);
                }
            }
        }
        Self::from_triplets(nrows, ncols, &t)
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.data[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        idx.binary_search(&j).map(|p| val[p]).unwrap_or(0.0)
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_add(1.0, x, &mut y);
        y
    }

    /// `y += alpha A x`.
    pub fn mul_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        let work = |(i, yi): (usize, &mut f64)| {
            let mut s = 0.0;
            for p in self.indptr[i]..self.indptr[i + 1] {
                s += self.data[p] * x[self.indices[p]];
            }
            *yi += alpha * s;
        };
        if self.nnz() > 200_000 {
            y.par_iter_mut().enumerate().for_each(work);
        } else {
            y.iter_mut().enumerate().for_each(work);
        }
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Triplets::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                t.push(j, i, v);
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= s;
        }
        m
    }

    /// `Σ c_i A_i` over matrices of equal shape.
    pub fn combine(terms: &[(f64, &CsrMatrix)]) -> Self {
        let (nrows, ncols) = (terms[0].1.nrows, terms[0].1.ncols);
        let mut t = Triplets::default();
        for (c, m) in terms {
            assert_eq!((m.nrows, m.ncols), (nrows, ncols));
            if *c == 0.0 {
                continue;
            }
            for i in 0..m.nrows {
                let (idx, val) = m.row(i);
                for (&j, &v) in idx.iter().zip(val) {
                    t.push(i, j, c * v);
                }
            }
        }
        Self::from_triplets(nrows, ncols, &t)
    }

    /// Assemble a block matrix; `None` blocks are zero. Row/column block
    /// sizes are taken from the present blocks.
    pub fn block(blocks: &[Vec<Option<&CsrMatrix>>]) -> Self {
        let nbr = blocks.len();
        let nbc = blocks[0].len();
        let mut rsz = vec![usize::MAX; nbr];
        let mut csz = vec![usize::MAX; nbc];
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, b) in row.iter().enumerate() {
                if let Some(m) = b {
                    rsz[bi] = m.nrows;
                    csz[bj] = m.ncols;
                }
            }
        }
        assert!(rsz.iter().chain(&csz).all(|&s| s != usize::MAX), "empty block row or column");
        let roff: Vec<usize> = rsz.iter().scan(0, |s, &n| { let o = *s; *s += n; Some(o) }).collect();
        let coff: Vec<usize> = csz.iter().scan(0, |s, &n| { let o = *s; *s += n; Some(o) }).collect();
        let mut t = Triplets::default();
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, b) in row.iter().enumerate() {
                if let Some(m) = b {
                    assert_eq!((m.nrows, m.ncols), (rsz[bi], csz[bj]));
                    for i in 0..m.nrows {
                        let (idx, val) = m.row(i);
                        for (&j, &v) in idx.iter().zip(val) {
                            t.push(roff[bi] + i, coff[bj] + j, v);
                        }
                    }
                }
            }
        }
        Self::from_triplets(rsz.iter().sum(), csz.iter().sum(), &t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                d[i][j] += v;
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A - Aᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let diff = CsrMatrix::combine(&[(1.0, self), (-1.0, &t)]);
        diff.max_abs()
    }

    /// Whether the matrix has no structural nonzero with magnitude above `tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}
