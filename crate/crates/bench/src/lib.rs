//! Fixtures shared by the benchmarks.

use geneo::fem::ElementType;
use geneo::materials::PermeabilityField;
use geneo::problems::{darcy_problem, plate_problem, Problem, PLATE_PRESSURE};

/// Clamped laminated plate at the coarsest refinement.
pub fn plate() -> Problem {
    plate_problem(0, ElementType::Hex8, PLATE_PRESSURE).expect("plate problem")
}

/// Unit cube with `n³` cells and alternating permeability layers of contrast `c`.
pub fn layered_darcy(n: usize, c: f64) -> Problem {
    let mut field = PermeabilityField::uniform([n; 3], 1.0);
    for (i, k) in field
        .kx
        .iter_mut()
        .zip(field.ky.iter_mut())
        .zip(field.kz.iter_mut())
        .enumerate()
    {
        if (i / (n * n)) % 2 == 1 {
            (*k.0 .0, *k.0 .1, *k.1) = (c, c, c);
        }
    }
    darcy_problem(&field, [1.0; 3], ElementType::Hex8, 1.0).expect("darcy problem")
}
