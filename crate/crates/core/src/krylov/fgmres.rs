use std::time::Instant;

use super::{LinearOperator, SolveReport};
use crate::error::{Error, Result};
use crate::sparse::{axpy, dot, norm2};

#[derive(Debug, Clone, Copy)]
pub struct FgmresOptions {
    /// Relative reduction of the unpreconditioned residual 2-norm.
    pub tol: f64,
    pub restart: usize,
    pub max_it: usize,
}

impl Default for FgmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            restart: 50,
            max_it: 1000,
        }
    }
}

/// Subdiagonal Hessenberg entries below this (relative to the column norm) count as breakdown.
const BREAKDOWN: f64 = 1e-14;

/// Right-preconditioned flexible GMRES from a zero initial guess.
///
/// The preconditioner is a closure and may differ between calls; the
/// preconditioned directions `z_j = M_j⁻¹ v_j` are stored and the update is
/// formed from them rather than from the Arnoldi basis.
pub fn fgmres<P>(
    a: &dyn LinearOperator,
    mut precondition: P,
    b: &[f64],
    opts: &FgmresOptions,
) -> Result<(Vec<f64>, SolveReport)>
where
    P: FnMut(&[f64], &mut [f64]),
{
    let start = Instant::now();
    let n = a.dim();
    if b.len() != n {
        return Err(Error::invalid("fgmres: dimension mismatch"));
    }
    let restart = opts.restart.max(1);
    let mut x = vec![0.0; n];
    let mut report = SolveReport::default();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        report.converged = true;
        return Ok((x, report));
    }

    let mut r = b.to_vec();
    let mut beta = b_norm;
    let mut total = 0;

    'outer: while total < opts.max_it {
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(restart + 1);
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(restart);
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        v.push(r.iter().map(|ri| ri / beta).collect());

        let mut k = 0;
        let mut done = false;
        while k < restart && total < opts.max_it {
            let mut zk = vec![0.0; n];
            precondition(&v[k], &mut zk);
            let mut w = a.apply_vec(&zk);
            z.push(zk);
            let w_norm0 = norm2(&w);
            // Modified Gram-Schmidt, applied twice.
            for _ in 0..2 {
                for i in 0..=k {
                    let hij = dot(&w, &v[i]);
                    h[i][k] += hij;
                    axpy(-hij, &v[i], &mut w);
                }
            }
            let h_next = norm2(&w);
            h[k + 1][k] = h_next;

            for i in 0..k {
                let tmp = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = tmp;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                return Err(Error::Breakdown("fgmres: zero Hessenberg column".into()));
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];

            total += 1;
            k += 1;
            let rel = g[k].abs() / b_norm;
            report.residual_history.push(rel);
            report.iterations = total;
            if rel <= opts.tol {
                done = true;
                break;
            }
            if h_next <= BREAKDOWN * w_norm0.max(f64::MIN_POSITIVE) {
                return Err(Error::Breakdown(format!(
                    "fgmres: Hessenberg subdiagonal {h_next:e} at iteration {total}"
                )));
            }
            v.push(w.iter().map(|wi| wi / h_next).collect());
        }

        // Back substitution for the least-squares coefficients.
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&z) {
            axpy(*yi, zi, &mut x);
        }
        let ax = a.apply_vec(&x);
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
        beta = norm2(&r);
        report.unpreconditioned_history.push(beta / b_norm);
        if done || beta / b_norm <= opts.tol {
            report.converged = beta / b_norm <= opts.tol * 1.0001 || done;
            break 'outer;
        }
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::{pcg, IdentityOperator, PcgOptions};
    use crate::sparse::CsrMatrix;

    fn laplace_2d(m: usize) -> CsrMatrix {
        let n = m * m;
        let mut t = Vec::new();
        for j in 0..m {
            for i in 0..m {
                let k = j * m + i;
                t.push((k, k, 4.0 + 0.1 * ((i * 7 + j * 3) % 5) as f64));
                if i + 1 < m {
                    t.push((k, k + 1, -1.0));
                    t.push((k + 1, k, -1.0));
                }
                if j + 1 < m {
                    t.push((k, k + m, -1.0));
                    t.push((k + m, k, -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let b = vec![1.0, -2.0, 0.5];
        let (x, rep) = fgmres(
            &IdentityOperator(3),
            |r: &[f64], z: &mut [f64]| z.copy_from_slice(r),
            &b,
            &FgmresOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        for (p, q) in x.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn fixed_jacobi_tracks_pcg() {
        let a = laplace_2d(20);
        let d = a.diagonal();
        let b: Vec<f64> = (0..a.nrows()).map(|i| ((i % 13) as f64 - 6.0) / 6.0).collect();
        let jac = crate::krylov::FnOperator::new(a.nrows(), |r: &[f64], z: &mut [f64]| {
            for i in 0..r.len() {
                z[i] = r[i] / d[i];
            }
        });
        let (_, cg) = pcg(&a, &jac, &b, &PcgOptions { tol: 1e-8, max_it: 500 }).unwrap();
        let (x, gm) = fgmres(
            &a,
            |r: &[f64], z: &mut [f64]| jac.apply(r, z),
            &b,
            &FgmresOptions {
                tol: 1e-8,
                restart: 200,
                max_it: 500,
            },
        )
        .unwrap();
        assert!(gm.converged);
        let res = norm2(&a.apply_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>());
        assert!(res <= 1e-8 * norm2(&b) * 1.001);
        assert!(
            (gm.iterations as i64 - cg.iterations as i64).abs() <= 2,
            "fgmres {} vs pcg {}",
            gm.iterations,
            cg.iterations
        );
    }

    #[test]
    fn converges_with_varying_preconditioner() {
        let a = laplace_2d(16);
        let d = a.diagonal();
        let b = vec![1.0; a.nrows()];
        let mut call = 0usize;
        let (x, rep) = fgmres(
            &a,
            |r: &[f64], z: &mut [f64]| {
                call += 1;
                let wobble = 1.0 + 0.2 * ((call as f64) * 1.7).sin();
                for i in 0..r.len() {
                    z[i] = wobble * r[i] / d[i];
                }
            },
            &b,
            &FgmresOptions {
                tol: 1e-8,
                restart: 30,
                max_it: 1000,
            },
        )
        .unwrap();
        assert!(rep.converged);
        let res = norm2(&a.apply_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>());
        assert!(res <= 1e-8 * norm2(&b) * 1.01, "residual {res}");
    }
}
