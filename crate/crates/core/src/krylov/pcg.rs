use std::time::Instant;

use super::{tridiagonal_extreme_eigenvalues, LinearOperator, SolveReport};
use crate::error::{Error, Result};
use crate::sparse::{axpy, dot, norm2};

#[derive(Debug, Clone, Copy)]
pub struct PcgOptions {
    /// Relative reduction of the preconditioned residual norm `sqrt(rᵀ M⁻¹ r)`.
    pub tol: f64,
    pub max_it: usize,
}

impl Default for PcgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            max_it: 1000,
        }
    }
}

/// Preconditioned conjugate gradients from a zero initial guess.
///
/// Stops when `‖r_k‖_{M⁻¹} / ‖r_0‖_{M⁻¹} <= tol`. The CG step lengths and
/// direction updates define a Lanczos tridiagonal matrix for `M⁻¹A`; its extreme
/// eigenvalues give the reported condition estimate. Hitting `max_it` is not an
/// error: the report carries `converged = false`.
pub fn pcg(
    a: &dyn LinearOperator,
    m_inv: &dyn LinearOperator,
    b: &[f64],
    opts: &PcgOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = a.dim();
    if b.len() != n || m_inv.dim() != n {
        return Err(Error::invalid("pcg: dimension mismatch"));
    }
    let mut x = vec![0.0; n];
    let mut report = SolveReport::default();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        report.converged = true;
        report.wall_time = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }

    let mut r = b.to_vec();
    let mut z = m_inv.apply_vec(&r);
    let mut rz = dot(&r, &z);
    if !(rz > 0.0) {
        return Err(Error::ContractViolation(format!(
            "preconditioner is not positive definite (rᵀM⁻¹r = {rz:e})"
        )));
    }
    let rz0 = rz;
    let mut p = z.clone();
    let mut ap = vec![0.0; n];

    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    for it in 1..=opts.max_it {
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::ContractViolation(format!(
                "operator is not positive definite (pᵀAp = {pap:e} at iteration {it})"
            )));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        alphas.push(alpha);

        m_inv.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let rel = (rz_new.max(0.0) / rz0).sqrt();
        report.iterations = it;
        report.residual_history.push(rel);
        report.unpreconditioned_history.push(norm2(&r) / b_norm);
        if rel <= opts.tol {
            report.converged = true;
            break;
        }
        if !(rz_new > 0.0) {
            return Err(Error::ContractViolation(format!(
                "preconditioner is not positive definite (rᵀM⁻¹r = {rz_new:e} at iteration {it})"
            )));
        }
        let beta = rz_new / rz;
        betas.push(beta);
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }

    if let Some((lo, hi)) = lanczos_extremes(&alphas, &betas) {
        report.extreme_eigenvalues = Some((lo, hi));
        report.condition_estimate = Some(if lo > 0.0 { hi / lo } else { f64::INFINITY });
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

/// Extreme eigenvalues of the Lanczos matrix assembled from CG coefficients:
/// `T_kk = 1/α_k + β_{k-1}/α_{k-1}`, `T_{k,k+1} = sqrt(β_k)/α_k`.
fn lanczos_extremes(alphas: &[f64], betas: &[f64]) -> Option<(f64, f64)> {
    let m = alphas.len();
    if m == 0 {
        return None;
    }
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for k in 0..m {
        let mut t = 1.0 / alphas[k];
        if k > 0 {
            t += betas[k - 1] / alphas[k - 1];
        }
        diag.push(t);
        if k + 1 < m {
            off.push(betas[k].sqrt() / alphas[k]);
        }
    }
    Some(tridiagonal_extreme_eigenvalues(&diag, &off))
}
