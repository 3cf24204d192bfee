use rayon::prelude::*;

use super::pou::PartitionOfUnity;
use crate::error::{Error, Result};
use crate::fem::{assemble_on_cells, Physics, SparseSystem};
use crate::mesh::{OverlappingDecomposition, StructuredGrid};
use crate::sparse::CsrMatrix;

/// Local matrices of one overlapping subdomain, all in the local dof order of
/// [`OverlappingDecomposition::subdomain_dofs`].
#[derive(Debug, Clone)]
pub struct SubdomainOperators {
    pub dofs: Vec<usize>,
    pub interior_boundary: Vec<bool>,
    /// Local flags of globally constrained dofs.
    pub global_dirichlet: Vec<bool>,
    /// `R_j A R_jᵀ`.
    pub a_submatrix: CsrMatrix,
    /// `R_j A R_jᵀ` with interior-boundary rows and columns replaced by identity.
    pub a_dirichlet: CsrMatrix,
    /// Assembled on the cells of `Ω_j` only; global Dirichlet dofs eliminated
    /// with unit diagonal.
    pub a_neumann: CsrMatrix,
    /// Assembled on the overlap cells of `Ω_j`; global Dirichlet rows and
    /// columns are zero.
    pub a_overlap_neumann: CsrMatrix,
    pub pou: Vec<f64>,
}

pub fn build_subdomain_operators(
    grid: &StructuredGrid,
    physics: &dyn Physics,
    system: &SparseSystem,
    decomp: &OverlappingDecomposition,
    pou: &PartitionOfUnity,
    j: usize,
) -> Result<SubdomainOperators> {
    let ncomp = physics.ncomp();
    if ncomp != system.ncomp {
        return Err(Error::invalid("physics and system disagree on components per node"));
    }
    let dofs = decomp.subdomain_dofs(j, ncomp);
    let interior_boundary = decomp.interior_boundary_dofs(j, ncomp);
    let global_dirichlet: Vec<bool> = dofs.iter().map(|&g| system.dirichlet[g]).collect();
    let nodes = &decomp.subdomain_nodes[j];

    let a_submatrix = system.a.principal_submatrix(&dofs);
    let mut a_dirichlet = a_submatrix.clone();
    a_dirichlet.eliminate(&interior_boundary, 1.0);

    let mut a_neumann = assemble_on_cells(grid, physics, &decomp.subdomain_cells[j], nodes)?;
    a_neumann.eliminate(&global_dirichlet, 1.0);

    let mut a_overlap_neumann = if decomp.overlap_cells[j].is_empty() {
        CsrMatrix::zeros(dofs.len(), dofs.len())
    } else {
        assemble_on_cells(grid, physics, &decomp.overlap_cells[j], nodes)?
    };
    a_overlap_neumann.eliminate(&global_dirichlet, 0.0);

    Ok(SubdomainOperators {
        dofs,
        interior_boundary,
        global_dirichlet,
        a_submatrix,
        a_dirichlet,
        a_neumann,
        a_overlap_neumann,
        pou: pou.weights[j].clone(),
    })
}

/// All subdomains, built in parallel.
pub fn build_all_subdomain_operators(
    grid: &StructuredGrid,
    physics: &dyn Physics,
    system: &SparseSystem,
    decomp: &OverlappingDecomposition,
    pou: &PartitionOfUnity,
) -> Result<Vec<SubdomainOperators>> {
    (0..decomp.num_subdomains())
        .into_par_iter()
        .map(|j| build_subdomain_operators(grid, physics, system, decomp, pou, j))
        .collect()
}
