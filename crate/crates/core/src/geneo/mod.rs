//! Spectral coarse spaces: local generalized eigenproblems, mode selection,
//! coarse matrix assembly and the two-level additive Schwarz preconditioner.

mod coarse;
mod eigen;
mod pencil;
mod selection;
mod setup;
mod two_level;
mod zem;

pub use coarse::{build_coarse_basis, coarse_prolong, coarse_restrict, CoarseSpace, TAG_ASSEMBLY, TAG_RESTRICT};
pub use eigen::{default_shift, scaled_residual, solve_geneo, EigenMethod, EigenOptions, Eigenpairs};
pub use pencil::{assemble_eigen_pencil, EigenPencil};
pub use selection::{
    overlap_width, select_modes, subdomain_diameter, subdomain_threshold, write_eigen_report, EigenSelection,
};
pub use setup::{build_preconditioner, CoarseKind, GeneoOptions, SchwarzSetup};
pub use two_level::TwoLevelSchwarz;
pub use zem::zem_vectors;
