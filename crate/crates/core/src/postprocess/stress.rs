use super::super::fem::basis::{jacobian, physical_gradients};
use crate::error::{Error, Result};
use crate::fem::element::strain_columns;
use crate::materials::{stress_to_material_frame, MaterialTable};
use crate::mesh::StructuredGrid;

/// Per-cell Voigt stress (11,22,33,23,13,12) in each cell's material frame.
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    pub stress: Vec<[f64; 6]>,
    pub region: Vec<usize>,
}

/// Voigt strain (engineering shear) at the reference centre of a cell.
pub fn centroid_strain(grid: &StructuredGrid, u: &[f64], cell: usize) -> Result<[f64; 6]> {
    let et = grid.element_type();
    let nn = et.n_nodes();
    let mut vals = vec![0.0; nn];
    let mut grads = vec![[0.0; 3]; nn];
    et.evaluate_into([0.0; 3], &mut vals, &mut grads);
    let coords = grid.cell_coords(cell);
    let (_, det, inv) = jacobian(&coords, &grads);
    if !(det > 0.0) {
        return Err(Error::DegenerateJacobian { cell, det });
    }
    let mut g = vec![[0.0; 3]; nn];
    physical_gradients(&grads, &inv, &mut g);
    let mut eps = [0.0; 6];
    for (a, &node) in grid.cell_nodes(cell).iter().enumerate() {
        let b = strain_columns(&g[a]);
        for r in 0..6 {
            for k in 0..3 {
                eps[r] += b[r][k] * u[3 * node + k];
            }
        }
    }
    Ok(eps)
}

/// Stress at cell centroids, rotated into the material frame of each cell.
pub fn recover_stress(u: &[f64], grid: &StructuredGrid, materials: &MaterialTable) -> Result<StressField> {
    if u.len() != 3 * grid.n_nodes() {
        return Err(Error::invalid("displacement vector does not match the grid"));
    }
    let mut stress = Vec::with_capacity(grid.n_cells());
    for cell in 0..grid.n_cells() {
        let m = materials.get(grid.cell_region(cell))?;
        let eps = centroid_strain(grid, u, cell)?;
        let mut s = [0.0; 6];
        for r in 0..6 {
            for l in 0..6 {
                s[r] += m.stiffness.0[(r, l)] * eps[l];
            }
        }
        stress.push(if m.orientation_deg == 0.0 {
            s
        } else {
            stress_to_material_frame(&s, m.orientation_deg)
        });
    }
    Ok(StressField {
        stress,
        region: grid.cell_regions().to_vec(),
    })
}
