//! Sparse `LDLᵀ` factorization for symmetric positive definite matrices.
//!
//! The matrix is reordered with approximate minimum degree, the elimination tree
//! is computed from the upper triangle, and the numeric factor is built row by row
//! (up-looking). The ordering is a deterministic function of the sparsity pattern.

use crate::error::{Error, Result};
use crate::krylov::LinearOperator;
use crate::sparse::CsrMatrix;

/// Pivots at or below this fraction of the largest diagonal entry are rejected.
const PIVOT_TOLERANCE: f64 = 1e-12;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct LdlFactorization {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// Strictly lower factor stored by columns.
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    d: Vec<f64>,
}

/// Factors a symmetric positive definite matrix. Only the pattern symmetry is
/// assumed; values are read from the upper triangle of the permuted matrix.
pub fn factorize(a: &CsrMatrix) -> Result<LdlFactorization> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::invalid("factorize: matrix is not square"));
    }
    if n == 0 {
        return Ok(LdlFactorization {
            n,
            perm: Vec::new(),
            l_ptr: vec![0],
            l_idx: Vec::new(),
            l_val: Vec::new(),
            d: Vec::new(),
        });
    }
    let perm = fill_reducing_ordering(a)?;
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }

    // Upper triangle of P A Pᵀ in compressed-column form: column k holds rows i <= k.
    let mut col_count = vec![0usize; n + 1];
    for r in 0..n {
        for &c in a.row(r).0 {
            let (i, k) = (inv[r], inv[c]);
            if i <= k {
                col_count[k + 1] += 1;
            }
        }
    }
    for k in 0..n {
        col_count[k + 1] += col_count[k];
    }
    let c_ptr = col_count;
    let mut next = c_ptr.clone();
    let mut c_idx = vec![0usize; c_ptr[n]];
    let mut c_val = vec![0.0; c_ptr[n]];
    for r in 0..n {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            let (i, k) = (inv[r], inv[c]);
            if i <= k {
                c_idx[next[k]] = i;
                c_val[next[k]] = v;
                next[k] += 1;
            }
        }
    }

    // Symbolic: elimination tree and column counts of L.
    let mut parent = vec![NONE; n];
    let mut flag = vec![NONE; n];
    let mut l_nz = vec![0usize; n];
    for k in 0..n {
        flag[k] = k;
        for p in c_ptr[k]..c_ptr[k + 1] {
            let mut i = c_idx[p];
            if i >= k {
                continue;
            }
            while flag[i] != k {
                if parent[i] == NONE {
                    parent[i] = k;
                }
                l_nz[i] += 1;
                flag[i] = k;
                i = parent[i];
            }
        }
    }
    let mut l_ptr = vec![0usize; n + 1];
    for k in 0..n {
        l_ptr[k + 1] = l_ptr[k] + l_nz[k];
    }

    // Numeric.
    let max_diag = a.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = PIVOT_TOLERANCE * max_diag;
    let mut l_idx = vec![0usize; l_ptr[n]];
    let mut l_val = vec![0.0; l_ptr[n]];
    let mut d = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut pattern = vec![0usize; n];
    l_nz.iter_mut().for_each(|c| *c = 0);
    flag.iter_mut().for_each(|f| *f = NONE);
    for k in 0..n {
        y[k] = 0.0;
        let mut top = n;
        flag[k] = k;
        for p in c_ptr[k]..c_ptr[k + 1] {
            let mut i = c_idx[p];
            y[i] += c_val[p];
            let mut len = 0;
            while flag[i] != k {
                pattern[len] = i;
                len += 1;
                flag[i] = k;
                i = parent[i];
            }
            while len > 0 {
                top -= 1;
                len -= 1;
                pattern[top] = pattern[len];
            }
        }
        let mut dk = y[k];
        y[k] = 0.0;
        for &i in &pattern[top..n] {
            let yi = y[i];
            y[i] = 0.0;
            let end = l_ptr[i] + l_nz[i];
            for p in l_ptr[i]..end {
                y[l_idx[p]] -= l_val[p] * yi;
            }
            let lki = yi / d[i];
            dk -= lki * yi;
            l_idx[end] = k;
            l_val[end] = lki;
            l_nz[i] += 1;
        }
        if !(dk > threshold) {
            return Err(Error::NotPositiveDefinite {
                column: perm[k],
                pivot: dk,
                max_pivot: max_diag,
            });
        }
        d[k] = dk;
    }

    Ok(LdlFactorization {
        n,
        perm,
        l_ptr,
        l_idx,
        l_val,
        d,
    })
}

fn fill_reducing_ordering(a: &CsrMatrix) -> Result<Vec<usize>> {
    let n = a.nrows();
    // AMD wants the pattern of a symmetric matrix in CSC; our CSR of a
    // structurally symmetric matrix is exactly that.
    let control = amd::Control::default();
    match amd::order::<usize>(n, a.indptr(), a.indices(), &control) {
        Ok((p, _, _)) => Ok(p),
        Err(status) => Err(Error::invalid(format!("AMD ordering failed: {status:?}"))),
    }
}

impl LdlFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal entries of `L`.
    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len()
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                    x[self.l_idx[p]] -= self.l_val[p] * xj;
                }
            }
        }
        for (xj, dj) in x.iter_mut().zip(&self.d) {
            *xj /= dj;
        }
        for j in (0..self.n).rev() {
            let mut s = x[j];
            for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                s -= self.l_val[p] * x[self.l_idx[p]];
            }
            x[j] = s;
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = x[new];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

impl LinearOperator for LdlFactorization {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        self.solve_in_place(y);
    }
}
