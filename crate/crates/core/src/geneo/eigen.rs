//! Smallest eigenpairs of a symmetric pencil `A p = λ B p` with `A` positive
//! semidefinite and `B` positive semidefinite, through the shift-and-invert
//! operator `T = (A + s B)⁻¹ B` whose eigenvalues are `μ = 1 / (λ + s)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::krylov::factorize;
use crate::sparse::{dot, CsrMatrix};

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Number of eigenpairs wanted.
    pub nev: usize,
    /// Shift `σ < 0`; `None` uses [`default_shift`].
    pub shift: Option<f64>,
    /// Scaled residual tolerance.
    pub tol: f64,
    /// Problems up to this size are solved densely.
    pub dense_limit: usize,
    pub block_size: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            nev: 21,
            shift: None,
            tol: 1e-8,
            dense_limit: 400,
            block_size: 8,
            max_iterations: 400,
            seed: 0x6e60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Dense,
    Subspace,
    /// `B = 0`: nothing to compute.
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unit 2-norm.
    pub vectors: Vec<Vec<f64>>,
    /// Scaled residuals, see [`scaled_residual`].
    pub residuals: Vec<f64>,
    pub shift: f64,
    pub method: EigenMethod,
    pub iterations: usize,
}

/// `-1e-6 · trace(A) / trace(B)`, small against the pencil eigenvalues
/// whatever the units of the operators.
pub fn default_shift(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
    let tb: f64 = b.diagonal().iter().sum();
    let ta: f64 = a.diagonal().iter().sum();
    if tb > 0.0 {
        -1e-6 * ta / tb
    } else {
        -1e-6 * ta / a.nrows().max(1) as f64
    }
}

/// `‖A p − λ B p‖∞ / ((‖A‖∞ + λ ‖B‖∞) ‖p‖∞)`.
pub fn scaled_residual(a: &CsrMatrix, b: &CsrMatrix, lambda: f64, p: &[f64]) -> f64 {
    let ap = a.mul_vec(p);
    let bp = b.mul_vec(p);
    let r = ap
        .iter()
        .zip(&bp)
        .map(|(x, y)| (x - lambda * y).abs())
        .fold(0.0, f64::max);
    let pn = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = (a.norm_inf() + lambda.abs() * b.norm_inf()) * pn;
    if scale == 0.0 {
        r
    } else {
        r / scale
    }
}

pub fn solve_geneo(a: &CsrMatrix, b: &CsrMatrix, opts: &EigenOptions) -> Result<Eigenpairs> {
    let n = a.nrows();
    if b.nrows() != n || a.ncols() != n || b.ncols() != n {
        return Err(Error::invalid("eigen pencil dimensions differ"));
    }
    let sigma = opts.shift.unwrap_or_else(|| default_shift(a, b));
    if !(sigma < 0.0) {
        return Err(Error::invalid(format!("eigen shift must be negative, got {sigma}")));
    }
    let s = -sigma;
    if b.norm_inf() == 0.0 || opts.nev == 0 || n == 0 {
        return Ok(Eigenpairs {
            values: Vec::new(),
            vectors: Vec::new(),
            residuals: Vec::new(),
            shift: sigma,
            method: EigenMethod::Degenerate,
            iterations: 0,
        });
    }
    if n <= opts.dense_limit {
        let (m, v) = dense(a, b, s, opts.nev)?;
        let pairs = finish(a, b, s, sigma, m, v, EigenMethod::Dense, 0)?;
        if pairs.residuals.iter().all(|r| *r <= opts.tol) {
            return Ok(pairs);
        }
        // Clustered eigenvalues can leave the dense vectors inaccurate; refine
        // them iteratively starting from the dense subspace.
        let (m, v, it) = subspace(a, b, s, opts, Some(pairs.vectors))?;
        return finish(a, b, s, sigma, m, v, EigenMethod::Dense, it);
    }
    let (m, v, it) = subspace(a, b, s, opts, None)?;
    finish(a, b, s, sigma, m, v, EigenMethod::Subspace, it)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: f64,
    sigma: f64,
    mus: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    method: EigenMethod,
    iterations: usize,
) -> Result<Eigenpairs> {
    let a_norm = a.norm_inf();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(mus.len());
    for (mu, mut p) in mus.into_iter().zip(vectors) {
        let mut lambda = 1.0 / mu - s;
        if lambda < 0.0 {
            if lambda >= -1e-10 * a_norm {
                lambda = 0.0;
            } else {
                return Err(Error::ContractViolation(format!(
                    "negative pencil eigenvalue {lambda:e}; A is not positive semidefinite"
                )));
            }
        }
        let nrm = dot(&p, &p).sqrt();
        p.iter_mut().for_each(|x| *x /= nrm);
        pairs.push((lambda, p));
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let residuals = pairs.iter().map(|(l, p)| scaled_residual(a, b, *l, p)).collect();
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigenpairs {
        values,
        vectors,
        residuals,
        shift: sigma,
        method,
        iterations,
    })
}

/// Iterations without halving the worst residual before giving up on it.
const STAGNATION: usize = 16;

/// Relative size below which `μ` is treated as an infinite eigenvalue.
const MU_CUTOFF: f64 = 1e-12;

fn dense(a: &CsrMatrix, b: &CsrMatrix, s: f64, nev: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let k = a.to_dense() + b.to_dense() * s;
    let chol = k.clone().cholesky().ok_or(Error::NotPositiveDefinite {
        column: 0,
        pivot: f64::NAN,
        max_pivot: k.diagonal().amax(),
    })?;
    let l = chol.l();
    let bd = b.to_dense();
    let m = l.solve_lower_triangular(&bd).expect("nonsingular factor");
    let c = l.solve_lower_triangular(&m.transpose()).expect("nonsingular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mu_max = eig.eigenvalues[order[0]];
    let lt = l.transpose();
    let mut mus = Vec::new();
    let mut vecs = Vec::new();
    for &i in order.iter().take(nev) {
        let mu = eig.eigenvalues[i];
        if !(mu > MU_CUTOFF * mu_max) {
            break;
        }
        let y = eig.eigenvectors.column(i).into_owned();
        let p = lt.solve_upper_triangular(&y).expect("nonsingular factor");
        mus.push(mu);
        vecs.push(p.as_slice().to_vec());
    }
    Ok((mus, vecs))
}

/// Block subspace iteration with Rayleigh-Ritz on `K`-orthonormal bases,
/// `K = A + s B`, expanding with `K⁻¹ r` for the residuals `r` of the
/// unconverged Ritz pairs and restarting from the leading Ritz vectors.
///
/// `K⁻¹ r = p − (λ + s) T p` spans the same space as `T p` together with `p`,
/// but avoids the cancellation of forming `T p` and projecting out `p`.
fn subspace(
    a: &CsrMatrix,
    b: &CsrMatrix,
    s: f64,
    opts: &EigenOptions,
    start: Option<Vec<Vec<f64>>>,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let n = a.nrows();
    let k = a.add_scaled(s, b);
    let fact = factorize(&k)?;
    let nev = opts.nev.min(n);
    let bs = opts.block_size.clamp(1, n);
    let m_max = (nev + 16 * bs).max(16 * nev).min(n);
    let keep = (6 * nev).min(m_max);
    let a_norm = a.norm_inf();
    let b_norm = b.norm_inf();
    let apply_t = |x: &[f64]| fact.solve(&b.mul_vec(x));
    // `K` is nearly singular on the kernel of `A`; iterative refinement keeps
    // the corrections accurate enough to resolve tight clusters.
    let correct = |r: &[f64]| {
        let mut x = fact.solve(r);
        for _ in 0..2 {
            let kx = k.mul_vec(&x);
            let d: Vec<f64> = r.iter().zip(&kx).map(|(ri, ki)| ri - ki).collect();
            x.iter_mut().zip(fact.solve(&d)).for_each(|(xi, di)| *xi += di);
        }
        x
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ n as u64);
    let mut w: Vec<Vec<f64>> = start.unwrap_or_default();
    for _ in 0..bs {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        w.push(apply_t(&x));
    }

    let mut v: Vec<Vec<f64>> = Vec::new();
    let mut kv: Vec<Vec<f64>> = Vec::new();
    let mut bv: Vec<Vec<f64>> = Vec::new();
    let mut h = DMatrix::<f64>::zeros(0, 0);
    let mut g = DMatrix::<f64>::zeros(0, 0);
    let mut best = f64::INFINITY;
    let mut best_it = 0;
    for it in 1..=opts.max_iterations {
        let mut added = 0;
        for mut x in w.drain(..) {
            let k0 = dot(&x, &k.mul_vec(&x)).max(0.0).sqrt();
            if k0 == 0.0 {
                continue;
            }
            for _ in 0..2 {
                for (vi, kvi) in v.iter().zip(&kv) {
                    let c = dot(kvi, &x);
                    x.iter_mut().zip(vi).for_each(|(xj, vj)| *xj -= c * vj);
                }
            }
            let kx = k.mul_vec(&x);
            let nrm = dot(&x, &kx).max(0.0).sqrt();
            if nrm <= 1e-10 * k0 {
                continue;
            }
            x.iter_mut().for_each(|e| *e /= nrm);
            let kx: Vec<f64> = kx.iter().map(|e| e / nrm).collect();
            bv.push(b.mul_vec(&x));
            kv.push(kx);
            v.push(x);
            added += 1;
        }
        let exhausted = added == 0;
        let m = v.len();
        // Extend the projected matrices `Vᵀ B V` and `Vᵀ K V` by the new
        // columns only. `Vᵀ K V` is kept explicitly: K-orthogonality degrades
        // when `K` is nearly singular and the Ritz values must not depend on it.
        let old = h.nrows();
        h = h.resize(m, m, 0.0);
        g = g.resize(m, m, 0.0);
        for i in old..m {
            for j in 0..=i {
                let x = 0.5 * (dot(&v[i], &bv[j]) + dot(&v[j], &bv[i]));
                h[(i, j)] = x;
                h[(j, i)] = x;
                let y = 0.5 * (dot(&v[i], &kv[j]) + dot(&v[j], &kv[i]));
                g[(i, j)] = y;
                g[(j, i)] = y;
            }
        }
        let l = g
            .clone()
            .cholesky()
            .ok_or(Error::ContractViolation(
                "projected shifted matrix lost definiteness".into(),
            ))?
            .unpack();
        let c = l.solve_lower_triangular(&h).expect("nonsingular factor");
        let c = l.solve_lower_triangular(&c.transpose()).expect("nonsingular factor");
        let eig = ((&c + c.transpose()) * 0.5).symmetric_eigen();
        let coef = l
            .transpose()
            .solve_upper_triangular(&eig.eigenvectors)
            .expect("nonsingular factor");
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let mu_max = eig.eigenvalues[order[0]].max(f64::MIN_POSITIVE);
        let combine = |basis: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (bi, c) in basis.iter().zip(coef.column(col).iter()) {
                out.iter_mut().zip(bi).for_each(|(o, x)| *o += c * x);
            }
            out
        };

        let want = nev.min(m);
        let mut worst = 0.0f64;
        let mut ritz = Vec::with_capacity(want);
        let mut unconverged = Vec::new();
        for &col in order.iter().take(want) {
            let mu = eig.eigenvalues[col];
            if !(mu > MU_CUTOFF * mu_max) {
                break;
            }
            let p = combine(&v, col);
            let lambda = (1.0 / mu - s).max(0.0);
            let (res, r) = residual_inf(a, b, lambda, &p, a_norm, b_norm);
            if res > opts.tol {
                worst = worst.max(res);
                unconverged.push(r);
            }
            ritz.push((mu, p));
        }
        let complete = ritz.len() == nev || exhausted || m == n;
        if unconverged.is_empty() && complete {
            let (mus, vecs) = ritz.into_iter().unzip();
            return Ok((mus, vecs, it));
        }
        if worst < 0.5 * best {
            best = worst;
            best_it = it;
        }
        // Rounding can put a floor under the residual of pairs in tight
        // clusters; return what was reached rather than iterate further.
        if complete && (exhausted || m == n || it - best_it >= STAGNATION) {
            log::warn!("geneo eigensolver stagnated at scaled residual {worst:e} after {it} iterations");
            let (mus, vecs) = ritz.into_iter().unzip();
            return Ok((mus, vecs, it));
        }
        if exhausted || m == n {
            return Err(Error::NotConverged {
                solver: "geneo eigensolver",
                iterations: it,
                residual: worst,
            });
        }
        // Next block: corrections of the unconverged pairs and of `bs` guard
        // pairs beyond the wanted ones, so a cluster straddling the cut is
        // resolved as a whole.
        w = unconverged.iter().map(|r| correct(r)).collect();
        for &col in order.iter().skip(want).take(bs) {
            let mu = eig.eigenvalues[col];
            if !(mu > MU_CUTOFF * mu_max) {
                break;
            }
            let lambda = (1.0 / mu - s).max(0.0);
            let (_, r) = residual_inf(a, b, lambda, &combine(&v, col), a_norm, b_norm);
            w.push(correct(&r));
        }
        if m + w.len() > m_max {
            let cols: Vec<usize> = order.iter().take(keep.min(m)).copied().collect();
            let nv: Vec<Vec<f64>> = cols.iter().map(|&c| combine(&v, c)).collect();
            let nkv: Vec<Vec<f64>> = cols.iter().map(|&c| combine(&kv, c)).collect();
            let nbv: Vec<Vec<f64>> = cols.iter().map(|&c| combine(&bv, c)).collect();
            h = DMatrix::zeros(0, 0);
            g = DMatrix::zeros(0, 0);
            v = nv;
            kv = nkv;
            bv = nbv;
        }
    }
    Err(Error::NotConverged {
        solver: "geneo eigensolver",
        iterations: opts.max_iterations,
        residual: f64::NAN,
    })
}

/// Scaled residual and the residual vector `A p − λ B p`.
fn residual_inf(a: &CsrMatrix, b: &CsrMatrix, lambda: f64, p: &[f64], a_norm: f64, b_norm: f64) -> (f64, Vec<f64>) {
    let mut r = a.mul_vec(p);
    let bp = b.mul_vec(p);
    r.iter_mut().zip(&bp).for_each(|(x, y)| *x -= lambda * y);
    let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pn = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (rn / ((a_norm + lambda * b_norm) * pn).max(f64::MIN_POSITIVE), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> CsrMatrix {
        CsrMatrix::from_triplets(
            v.len(),
            v.len(),
            &v.iter().enumerate().map(|(i, &x)| (i, i, x)).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn diagonal_pencil() {
        let opts = EigenOptions {
            nev: 2,
            shift: Some(-1e-8),
            ..Default::default()
        };
        let e = solve_geneo(&diag(&[1.0, 2.0, 3.0]), &CsrMatrix::identity(3), &opts).unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn double_eigenvalue() {
        let opts = EigenOptions {
            nev: 2,
            ..Default::default()
        };
        let a = diag(&[2.0, 4.0]);
        let b = diag(&[1.0, 2.0]);
        let e = solve_geneo(&a, &b, &opts).unwrap();
        for (l, p) in e.values.iter().zip(&e.vectors) {
            assert!((l - 2.0).abs() < 1e-12);
            assert!(scaled_residual(&a, &b, *l, p) < 1e-12);
        }
    }

    #[test]
    fn zero_b_selects_nothing() {
        let e = solve_geneo(
            &CsrMatrix::identity(4),
            &CsrMatrix::zeros(4, 4),
            &EigenOptions::default(),
        )
        .unwrap();
        assert!(e.values.is_empty());
        assert_eq!(e.method, EigenMethod::Degenerate);
    }

    /// 1D Laplacian with free ends against a mass-like `B` of partial support.
    fn chain(n: usize) -> (CsrMatrix, CsrMatrix) {
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.push((i, i, 1.0));
            t.push((i + 1, i + 1, 1.0));
            t.push((i, i + 1, -1.0));
            t.push((i + 1, i, -1.0));
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let bt: Vec<_> = (0..n)
            .filter(|i| i % 3 != 1)
            .map(|i| (i, i, 1.0 + (i % 5) as f64 * 0.1))
            .collect();
        (a, CsrMatrix::from_triplets(n, n, &bt))
    }

    #[test]
    fn subspace_agrees_with_dense() {
        let (a, b) = chain(600);
        let dense = solve_geneo(
            &a,
            &b,
            &EigenOptions {
                nev: 12,
                dense_limit: 10_000,
                ..Default::default()
            },
        )
        .unwrap();
        let iter = solve_geneo(
            &a,
            &b,
            &EigenOptions {
                nev: 12,
                dense_limit: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(dense.method, EigenMethod::Dense);
        assert_eq!(iter.method, EigenMethod::Subspace);
        assert_eq!(dense.values.len(), 12);
        assert_eq!(iter.values.len(), 12);
        // The constant vector is in the kernel of A.
        assert!(dense.values[0] < 1e-10 && iter.values[0] < 1e-10);
        for (x, y) in dense.values.iter().zip(&iter.values) {
            assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0), "{x} vs {y}");
        }
        for r in iter.residuals.iter().chain(&dense.residuals) {
            assert!(*r <= 1e-8, "{r}");
        }
    }

    #[test]
    fn low_rank_b_returns_all_finite_eigenvalues() {
        let n = 500;
        let mut t: Vec<_> = (0..n).map(|i| (i, i, 2.0 + i as f64)).collect();
        t.push((0, 1, 0.5));
        t.push((1, 0, 0.5));
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b = CsrMatrix::from_triplets(n, n, &[(0, 0, 1.0), (1, 1, 1.0), (7, 7, 2.0)]);
        let e = solve_geneo(
            &a,
            &b,
            &EigenOptions {
                nev: 10,
                dense_limit: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(e.values.len(), 3);
        assert!((e.values[2] - 4.5).abs() < 1e-10);
    }
}
