pub mod decomposition;
pub mod error;
pub mod fem;
pub mod geneo;
pub mod krylov;
pub mod materials;
pub mod mesh;
pub mod postprocess;
pub mod problems;
pub mod sparse;

pub use error::{Error, Result};
