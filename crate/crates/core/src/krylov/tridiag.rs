/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(diag: &[f64], off: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    // Finds the k-th smallest eigenvalue (0-based).
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest and largest eigenvalue of a symmetric tridiagonal matrix given its
/// diagonal and off-diagonal, by Sturm-sequence bisection.
pub fn tridiagonal_extreme_eigenvalues(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    assert!(n > 0);
    assert_eq!(off.len() + 1, n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = 1e-12 * (hi.abs().max(lo.abs()) + 1.0);
    lo -= pad;
    hi += pad;
    (bisect(diag, off, 0, lo, hi), bisect(diag, off, n - 1, lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_1d_extremes() {
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let (lo, hi) = tridiagonal_extreme_eigenvalues(&diag, &off);
        let h = std::f64::consts::PI / (n as f64 + 1.0);
        let exact_lo = 2.0 - 2.0 * h.cos();
        let exact_hi = 2.0 + 2.0 * h.cos();
        assert!((lo - exact_lo).abs() < 1e-12);
        assert!((hi - exact_hi).abs() < 1e-12);
    }

    #[test]
    fn one_by_one() {
        let (lo, hi) = tridiagonal_extreme_eigenvalues(&[3.0], &[]);
        assert!((lo - 3.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
    }
}
