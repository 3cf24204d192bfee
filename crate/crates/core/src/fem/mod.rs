//! Hexahedral finite elements: shape functions, quadrature, element matrices
//! for elasticity and diffusion, and global assembly.

pub mod assembly;
pub mod basis;
pub mod element;
pub mod quadrature;

pub use assembly::{
    apply_dirichlet, assemble, assemble_on_cells, dirichlet_dofs, load_vector, BoundaryConditions, Diffusion,
    Elasticity, Physics, SparseSystem,
};
pub use basis::ElementType;
pub use element::{element_stiffness_diffusion, element_stiffness_elasticity, ElementTables};
pub use quadrature::QuadratureRule;
