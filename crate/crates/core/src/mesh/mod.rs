//! Layer-cake hexahedral grids, coordinate maps and overlapping decompositions.

mod decompose;
mod grid;
mod stacking;
mod transform;

pub use decompose::{decompose, CellBox, OverlappingDecomposition};
pub use grid::{build_layer_cake, GridSpec, Layer, StructuredGrid};
pub use stacking::{parse_stacking_csv, read_stacking_csv, write_stacking_csv, StackingRow};
pub use transform::{apply_named, apply_transformation, graded_positions, Transformation};

pub(crate) use grid::bounding_box;
