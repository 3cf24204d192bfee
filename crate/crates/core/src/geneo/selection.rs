use std::io::Write;

use super::eigen::Eigenpairs;
use crate::mesh::{bounding_box, OverlappingDecomposition, StructuredGrid};

/// Eigenpairs of one subdomain together with the modes chosen for the coarse space.
#[derive(Debug, Clone)]
pub struct EigenSelection {
    pub subdomain: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Number of leading pairs selected.
    pub selected: usize,
    pub threshold: f64,
    /// First eigenvalue not selected, `+∞` if none was computed.
    pub next_eigenvalue: f64,
    /// Selection stopped at `k_max` although more eigenvalues were below the threshold.
    pub cap_binding: bool,
}

/// Half the bounding-box diagonal of the subdomain.
pub fn subdomain_diameter(grid: &StructuredGrid, decomp: &OverlappingDecomposition, j: usize) -> f64 {
    let (lo, hi) = bounding_box(decomp.subdomain_nodes[j].iter().map(|&n| &grid.nodes()[n]));
    0.5 * (0..3).map(|d| (hi[d] - lo[d]).powi(2)).sum::<f64>().sqrt()
}

/// `O` times the smallest extent of an overlap cell along any axis in which
/// the subdomain was extended. `+∞` when there is no overlap.
pub fn overlap_width(grid: &StructuredGrid, decomp: &OverlappingDecomposition, j: usize) -> f64 {
    let owner = decomp.owner_boxes[j];
    let ext = decomp.subdomain_boxes[j];
    let axes: Vec<usize> = (0..3).filter(|&d| owner[d] != ext[d]).collect();
    let mut min_extent = f64::INFINITY;
    for &c in &decomp.overlap_cells[j] {
        let coords = grid.cell_coords(c);
        let (lo, hi) = bounding_box(coords.iter());
        for &d in &axes {
            min_extent = min_extent.min(hi[d] - lo[d]);
        }
    }
    decomp.overlap as f64 * min_extent
}

/// `τ_j = ρ · diam(Ω_j) / width(Ω_j°)`.
pub fn subdomain_threshold(grid: &StructuredGrid, decomp: &OverlappingDecomposition, j: usize, rho: f64) -> f64 {
    let w = overlap_width(grid, decomp, j);
    if w.is_finite() && w > 0.0 {
        rho * subdomain_diameter(grid, decomp, j) / w
    } else {
        0.0
    }
}

/// Keeps every eigenpair with `λ ≤ τ`, at most `k_max`.
pub fn select_modes(subdomain: usize, eigs: Eigenpairs, threshold: f64, k_max: usize) -> EigenSelection {
    let below = eigs.values.iter().take_while(|&&l| l <= threshold).count();
    let selected = below.min(k_max);
    let cap_binding = below > k_max;
    let next_eigenvalue = eigs.values.get(selected).copied().unwrap_or(f64::INFINITY);
    EigenSelection {
        subdomain,
        eigenvalues: eigs.values,
        eigenvectors: eigs.vectors,
        residuals: eigs.residuals,
        selected,
        threshold,
        next_eigenvalue,
        cap_binding,
    }
}

/// CSV with header `subdomain,k,lambda,selected,threshold`.
pub fn write_eigen_report<W: Write>(selections: &[EigenSelection], mut w: W) -> std::io::Result<()> {
    writeln!(w, "subdomain,k,lambda,selected,threshold")?;
    for s in selections {
        for (k, l) in s.eigenvalues.iter().enumerate() {
            writeln!(
                w,
                "{},{},{:e},{},{:e}",
                s.subdomain,
                k + 1,
                l,
                u8::from(k < s.selected),
                s.threshold
            )?;
        }
    }
    Ok(())
}
