//! Finite element oracles shared by the correctness tests and the acceptance
//! target: a linear-field patch test and a manufactured-solution study.

use std::f64::consts::PI;

use geneo::fem::basis::jacobian;
use geneo::fem::{assemble, BoundaryConditions, Diffusion, Elasticity, ElementType, QuadratureRule};
use geneo::krylov::factorize;
use geneo::materials::{orthotropic_stiffness, rotate_stiffness, MaterialTable, OrthotropicParams};
use geneo::mesh::{apply_transformation, build_layer_cake, GridSpec, StructuredGrid};

fn on_unit_box_boundary(x: &[f64; 3]) -> bool {
    x.iter().any(|&c| c < 1e-9 || c > 1.0 - 1e-9)
}

/// `u_i(x) = c_i + Σ_k g_ik x_k` prescribed on the whole boundary.
struct LinearField {
    c: [f64; 3],
    g: [[f64; 3]; 3],
}

impl LinearField {
    fn eval(&self, x: &[f64; 3], i: usize) -> f64 {
        self.c[i] + (0..3).map(|k| self.g[i][k] * x[k]).sum::<f64>()
    }
}

impl BoundaryConditions for LinearField {
    fn is_dirichlet(&self, x: &[f64; 3], _component: usize) -> bool {
        on_unit_box_boundary(x)
    }

    fn dirichlet_value(&self, x: &[f64; 3], component: usize) -> f64 {
        self.eval(x, component)
    }
}

/// Unit cube of `n³` cells whose interior nodes are moved by a smooth map
/// that fixes the boundary.
pub fn distorted_cube(n: usize, element: ElementType) -> StructuredGrid {
    let grid = build_layer_cake(&GridSpec::box_domain([1.0; 3], [n; 3], element)).unwrap();
    apply_transformation(&grid, |x| {
        let bump = (PI * x[0]).sin() * (PI * x[1]).sin() * (PI * x[2]).sin();
        [
            x[0] + 0.08 * bump,
            x[1] - 0.05 * bump,
            x[2] + 0.06 * bump * (2.0 * PI * x[0]).cos(),
        ]
    })
    .unwrap()
}

/// Largest nodal error of the elasticity patch test relative to the field size.
pub fn elasticity_patch_error(element: ElementType) -> f64 {
    let grid = distorted_cube(3, element);
    let c = rotate_stiffness(
        &orthotropic_stiffness(&OrthotropicParams::reference_ply()).unwrap(),
        30.0,
    );
    let physics = Elasticity {
        materials: MaterialTable::uniform(c, 1),
    };
    let field = LinearField {
        c: [0.1, -0.2, 0.05],
        g: [[1e-3, 2e-3, -1e-3], [-2e-3, 5e-4, 3e-3], [1.5e-3, -1e-3, 2e-3]],
    };
    let sys = assemble(&grid, &physics, &field).unwrap();
    let u = factorize(&sys.a).unwrap().solve(&sys.b);
    let mut err = 0.0f64;
    let mut size = 0.0f64;
    for (n, x) in grid.nodes().iter().enumerate() {
        for i in 0..3 {
            let exact = field.eval(x, i);
            err = err.max((u[3 * n + i] - exact).abs());
            size = size.max(exact.abs());
        }
    }
    err / size
}

/// `−Δu = 3π² u` with `u = sin(πx) sin(πy) sin(πz)` and `u = 0` on the boundary.
struct SineSolution;

fn sine(x: &[f64; 3]) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).sin() * (PI * x[2]).sin()
}

impl BoundaryConditions for SineSolution {
    fn is_dirichlet(&self, x: &[f64; 3], _component: usize) -> bool {
        on_unit_box_boundary(x)
    }

    fn body_force(&self, x: &[f64; 3]) -> [f64; 3] {
        [3.0 * PI * PI * sine(x), 0.0, 0.0]
    }
}

/// L2 error of the manufactured solution on an `n³` mesh, integrated with a
/// 4-point Gauss rule per direction.
pub fn manufactured_l2_error(n: usize, element: ElementType) -> f64 {
    let grid = build_layer_cake(&GridSpec::box_domain([1.0; 3], [n; 3], element)).unwrap();
    let physics = Diffusion::uniform(grid.n_cells(), 1.0);
    let sys = assemble(&grid, &physics, &SineSolution).unwrap();
    let u = factorize(&sys.a).unwrap().solve(&sys.b);
    let rule = QuadratureRule::hex(4).unwrap();
    let mut err2 = 0.0;
    for cell in 0..grid.n_cells() {
        let coords = grid.cell_coords(cell);
        let nodes = grid.cell_nodes(cell);
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let (phi, dphi) = element.shape_basis(*xi).unwrap();
            let (_, det, _) = jacobian(&coords, &dphi);
            let mut x = [0.0; 3];
            let mut uh = 0.0;
            for (a, &node) in nodes.iter().enumerate() {
                for d in 0..3 {
                    x[d] += phi[a] * coords[a][d];
                }
                uh += phi[a] * u[node];
            }
            err2 += (uh - sine(&x)).powi(2) * det * w;
        }
    }
    err2.sqrt()
}
