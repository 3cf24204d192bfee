//! Constitutive data: orthotropic and isotropic stiffness, ply rotation,
//! laminate stacking and heterogeneous permeability fields.

mod laminate;
mod spe10;
mod stiffness;

pub use laminate::{Laminate, Material, MaterialTable, Ply, RegionMaterial, REFERENCE_RESIN};
pub use spe10::{load_spe10, read_spe10, PermeabilityField, SPE10_DIMS, SPE10_EXTENTS};
pub use stiffness::{
    isotropic_stiffness, lame, orthotropic_stiffness, rotate_stiffness, rotation_z, stress_rotation,
    stress_to_material_frame, OrthotropicParams, StiffnessMatrix,
};
