//! Ready-made model problems: the clamped composite plate and the Darcy box.

use crate::error::Result;
use crate::fem::{assemble, BoundaryConditions, Diffusion, Elasticity, ElementType, Physics, SparseSystem};
use crate::materials::{Laminate, Material, MaterialTable, OrthotropicParams, PermeabilityField, REFERENCE_RESIN};
use crate::mesh::{build_layer_cake, GridSpec, StructuredGrid};

pub const PLATE_EXTENTS: [f64; 2] = [100.0, 20.0];
pub const PLATE_CELLS: [usize; 2] = [20, 5];
/// Uniform pressure on the top face in MPa.
pub const PLATE_PRESSURE: f64 = 0.01;

const FACE_TOL: f64 = 1e-6;

/// Cantilever plate: all displacement components fixed at `x = 0`, uniform
/// pressure `q` pushing down on the top face.
#[derive(Debug, Clone, Copy)]
pub struct ClampedPlate {
    pub q: f64,
    pub top: f64,
}

impl BoundaryConditions for ClampedPlate {
    fn is_dirichlet(&self, x: &[f64; 3], _component: usize) -> bool {
        x[0] < FACE_TOL
    }

    fn neumann(&self, x: &[f64; 3], normal: &[f64; 3]) -> [f64; 3] {
        if normal[2] > 0.5 && x[2] > self.top - FACE_TOL {
            [0.0, 0.0, -self.q]
        } else {
            [0.0; 3]
        }
    }
}

/// Pressure fixed to zero on the bottom face `z = 0`, constant source `f`.
#[derive(Debug, Clone, Copy)]
pub struct DarcyBox {
    pub source: f64,
    pub bottom_tol: f64,
}

impl BoundaryConditions for DarcyBox {
    fn is_dirichlet(&self, x: &[f64; 3], _component: usize) -> bool {
        x[2] < self.bottom_tol
    }

    fn body_force(&self, _x: &[f64; 3]) -> [f64; 3] {
        [self.source, 0.0, 0.0]
    }
}

/// A discretized problem ready for the solvers.
pub struct Problem {
    pub grid: StructuredGrid,
    pub physics: Box<dyn Physics + Send>,
    pub system: SparseSystem,
    /// Present for elasticity problems.
    pub materials: Option<MaterialTable>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("cells", &self.grid.n_cells())
            .field("dofs", &self.system.dof_count())
            .finish()
    }
}

/// Grid and material table of the reference laminate; each in-plane cell
/// count is multiplied by `2^refinement`.
pub fn plate_grid(refinement: u32, element_type: ElementType) -> Result<(StructuredGrid, MaterialTable)> {
    let laminate = Laminate::reference_plate();
    laminate.validate()?;
    let rows = laminate.stacking_rows(2, 1, 1);
    let f = 1usize << refinement;
    let spec = GridSpec::from_stacking(
        &rows,
        PLATE_EXTENTS,
        [PLATE_CELLS[0] * f, PLATE_CELLS[1] * f],
        element_type,
    );
    let grid = build_layer_cake(&spec)?;
    let library = [
        Material::Orthotropic(OrthotropicParams::reference_ply()),
        REFERENCE_RESIN,
    ];
    let materials = MaterialTable::from_stacking(&rows, &library)?;
    Ok((grid, materials))
}

pub fn plate_problem(refinement: u32, element_type: ElementType, q: f64) -> Result<Problem> {
    let (grid, materials) = plate_grid(refinement, element_type)?;
    let physics = Elasticity {
        materials: materials.clone(),
    };
    let bcs = ClampedPlate {
        q,
        top: grid.bounding_box().1[2],
    };
    let system = assemble(&grid, &physics, &bcs)?;
    Ok(Problem {
        grid,
        physics: Box::new(physics),
        system,
        materials: Some(materials),
    })
}

/// Darcy flow on `extents` with one cell per permeability entry.
pub fn darcy_problem(
    field: &PermeabilityField,
    extents: [f64; 3],
    element_type: ElementType,
    source: f64,
) -> Result<Problem> {
    field.validate()?;
    let grid = build_layer_cake(&GridSpec::box_domain(extents, field.dims, element_type))?;
    let physics = Diffusion::from_field(field);
    let bcs = DarcyBox {
        source,
        bottom_tol: 1e-9 * extents[2],
    };
    let system = assemble(&grid, &physics, &bcs)?;
    Ok(Problem {
        grid,
        physics: Box::new(physics),
        system,
        materials: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plate_has_reference_size() {
        let p = plate_problem(0, ElementType::Hex8, PLATE_PRESSURE).unwrap();
        assert_eq!(p.grid.n_cells(), 3500);
        assert_eq!(p.system.dof_count(), 13_608);
        assert_eq!(p.system.dirichlet.iter().filter(|&&d| d).count(), 3 * 6 * 36);
        // Pressure times top area, minus the half-cell strip carried by the clamped nodes.
        let fz: f64 = p.system.b.iter().skip(2).step_by(3).sum();
        assert!((fz + PLATE_PRESSURE * (100.0 - 2.5) * 20.0).abs() < 1e-10, "{fz}");
    }

    #[test]
    fn darcy_load_is_source_times_volume() {
        let field = PermeabilityField::uniform([4, 3, 2], 1.0);
        let p = darcy_problem(&field, [4.0, 3.0, 2.0], ElementType::Hex8, 1.0).unwrap();
        let free: f64 = p
            .system
            .b
            .iter()
            .zip(&p.system.dirichlet)
            .filter(|(_, &d)| !d)
            .map(|(b, _)| b)
            .sum();
        // Volume 24; the 12 bottom cells put half their load on z = 0.
        assert!((free - 18.0).abs() < 1e-12, "{free}");
        assert_eq!(p.system.dirichlet.iter().filter(|&&d| d).count(), 5 * 4);
    }
}
