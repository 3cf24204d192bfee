//! Stress recovery, interlaminar failure, scalar quantities of interest and VTK output.

mod failure;
mod stress;
pub mod vtk;

pub use failure::{camanho, camanho_field, failure_load, max_displacement, scan_failure, Allowables, FailureScan};
pub use stress::{centroid_strain, recover_stress, StressField};
pub use vtk::{write_vtk, VtkField};
