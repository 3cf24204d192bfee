use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::coarse::{build_coarse_basis, CoarseSpace};
use super::eigen::{solve_geneo, EigenOptions};
use super::pencil::assemble_eigen_pencil;
use super::selection::{select_modes, subdomain_threshold, EigenSelection};
use super::two_level::TwoLevelSchwarz;
use super::zem::zem_vectors;
use crate::decomposition::{
    build_all_subdomain_operators, build_pou, Communicator, DofMaps, OneLevelSchwarz, PartitionOfUnity,
    SubdomainOperators,
};
use crate::error::{Error, Result};
use crate::fem::{Physics, SparseSystem};
use crate::mesh::{OverlappingDecomposition, StructuredGrid};
use crate::sparse::CsrMatrix;

/// Coarse space added to the one-level Schwarz preconditioner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoarseKind {
    /// One-level additive Schwarz.
    None,
    /// Zero energy modes.
    Zem,
    Geneo,
}

impl fmt::Display for CoarseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoarseKind::None => "AS1",
            CoarseKind::Zem => "ZEM",
            CoarseKind::Geneo => "GenEO",
        })
    }
}

impl FromStr for CoarseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "as1" | "as" | "one-level" => Ok(CoarseKind::None),
            "zem" => Ok(CoarseKind::Zem),
            "geneo" => Ok(CoarseKind::Geneo),
            _ => Err(Error::invalid(format!("unknown coarse space '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GeneoOptions {
    /// Factor `ρ` applied to the diam/width threshold.
    pub rho: f64,
    /// Maximum number of modes per subdomain.
    pub k_max: usize,
    pub eigen: EigenOptions,
}

impl Default for GeneoOptions {
    fn default() -> Self {
        Self {
            rho: 1.0,
            k_max: 20,
            eigen: EigenOptions::default(),
        }
    }
}

/// Everything built during preconditioner setup.
#[derive(Debug)]
pub struct SchwarzSetup {
    pub preconditioner: TwoLevelSchwarz,
    pub subdomain_ops: Vec<SubdomainOperators>,
    pub pou: PartitionOfUnity,
    /// One entry per subdomain for GenEO, empty otherwise.
    pub selections: Vec<EigenSelection>,
    pub setup_time: f64,
}

impl SchwarzSetup {
    pub fn coarse_dim(&self) -> usize {
        self.preconditioner.coarse().dim()
    }
}

pub fn build_preconditioner(
    grid: &StructuredGrid,
    physics: &dyn Physics,
    system: &SparseSystem,
    decomp: &OverlappingDecomposition,
    kind: CoarseKind,
    opts: &GeneoOptions,
) -> Result<SchwarzSetup> {
    let start = Instant::now();
    if decomp.overlap == 0 {
        return Err(Error::invalid(
            "Schwarz preconditioners need an overlap of at least one cell layer",
        ));
    }
    let ncomp = physics.ncomp();
    let pou = build_pou(decomp, grid.n_nodes(), ncomp)?;
    let maps = Arc::new(DofMaps::new(decomp, grid.n_nodes(), ncomp)?);
    let comm = Arc::new(Communicator::new(decomp.neighbors.clone()));
    let ops = build_all_subdomain_operators(grid, physics, system, decomp, &pou)?;
    let dirichlet: Vec<&CsrMatrix> = ops.iter().map(|o| &o.a_dirichlet).collect();
    let one = OneLevelSchwarz::new(maps.clone(), comm.clone(), &dirichlet)?;

    let n_sub = decomp.num_subdomains();
    let mut selections = Vec::new();
    let vectors: Vec<Vec<Vec<f64>>> = match kind {
        CoarseKind::None => vec![Vec::new(); n_sub],
        CoarseKind::Zem => (0..n_sub).map(|j| zem_vectors(grid, decomp, ncomp, j)).collect(),
        CoarseKind::Geneo => {
            let eig_opts = EigenOptions {
                nev: opts.k_max + 1,
                ..opts.eigen
            };
            selections = (0..n_sub)
                .into_par_iter()
                .map(|j| -> Result<EigenSelection> {
                    let pencil = assemble_eigen_pencil(&ops[j]);
                    let eigs = solve_geneo(&pencil.a, &pencil.b, &eig_opts)?;
                    let tau = subdomain_threshold(grid, decomp, j, opts.rho);
                    Ok(select_modes(j, eigs, tau, opts.k_max))
                })
                .collect::<Result<Vec<_>>>()?;
            selections
                .iter()
                .map(|s| s.eigenvectors[..s.selected].to_vec())
                .collect()
        }
    };
    let coarse = if vectors.iter().all(|v| v.is_empty()) {
        CoarseSpace::empty(n_sub)
    } else {
        let basis = build_coarse_basis(&vectors, &pou, &ops);
        CoarseSpace::assemble(basis, &ops, &maps, &comm)?
    };
    Ok(SchwarzSetup {
        preconditioner: TwoLevelSchwarz::new(one, coarse),
        subdomain_ops: ops,
        pou,
        selections,
        setup_time: start.elapsed().as_secs_f64(),
    })
}
