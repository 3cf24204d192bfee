use nalgebra::Matrix6;
use rayon::prelude::*;

use super::basis::{jacobian, ElementType};
use super::element::{diffusion_into, elasticity_into, map_point, ElementTables};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::materials::{MaterialTable, PermeabilityField};
use crate::mesh::StructuredGrid;
use crate::sparse::CsrMatrix;

/// Bilinear form evaluated cell by cell.
pub trait Physics: Sync {
    /// Unknowns per node (3 for elasticity, 1 for diffusion).
    fn ncomp(&self) -> usize;

    /// Row-major element matrix of size `(ncomp·n)²` written into `out`.
    fn element_matrix(&self, grid: &StructuredGrid, cell: usize, tables: &ElementTables, out: &mut [f64])
        -> Result<()>;
}

/// Linear elasticity with per-region stiffness.
#[derive(Debug, Clone)]
pub struct Elasticity {
    pub materials: MaterialTable,
}

impl Physics for Elasticity {
    fn ncomp(&self) -> usize {
        3
    }

    fn element_matrix(
        &self,
        grid: &StructuredGrid,
        cell: usize,
        tables: &ElementTables,
        out: &mut [f64],
    ) -> Result<()> {
        let c: &Matrix6<f64> = &self.materials.get(grid.cell_region(cell))?.stiffness.0;
        elasticity_into(&grid.cell_coords(cell), c, tables, out).map_err(|e| with_cell(e, cell))
    }
}

/// Scalar diffusion `-∇·(K∇u)` with a diagonal per-cell coefficient.
#[derive(Debug, Clone)]
pub struct Diffusion {
    pub k: Vec<[f64; 3]>,
}

impl Diffusion {
    pub fn from_field(field: &PermeabilityField) -> Self {
        Self {
            k: (0..field.n_cells())
                .map(|c| [field.kx[c], field.ky[c], field.kz[c]])
                .collect(),
        }
    }

    pub fn uniform(n_cells: usize, k: f64) -> Self {
        Self {
            k: vec![[k; 3]; n_cells],
        }
    }
}

impl Physics for Diffusion {
    fn ncomp(&self) -> usize {
        1
    }

    fn element_matrix(
        &self,
        grid: &StructuredGrid,
        cell: usize,
        tables: &ElementTables,
        out: &mut [f64],
    ) -> Result<()> {
        let k = *self
            .k
            .get(cell)
            .ok_or_else(|| Error::invalid(format!("no permeability for cell {cell}")))?;
        diffusion_into(&grid.cell_coords(cell), k, tables, out).map_err(|e| with_cell(e, cell))
    }
}

fn with_cell(e: Error, cell: usize) -> Error {
    match e {
        Error::DegenerateJacobian { det, .. } => Error::DegenerateJacobian { cell, det },
        other => other,
    }
}

/// Boundary data. For scalar problems only component 0 is used.
pub trait BoundaryConditions: Sync {
    fn is_dirichlet(&self, x: &[f64; 3], component: usize) -> bool;

    fn dirichlet_value(&self, _x: &[f64; 3], _component: usize) -> f64 {
        0.0
    }

    /// Traction (or scalar flux in component 0) at a boundary point with outward normal.
    fn neumann(&self, _x: &[f64; 3], _normal: &[f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }

    fn body_force(&self, _x: &[f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }
}

/// Assembled system `A u = b` after symmetric Dirichlet elimination.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub a: CsrMatrix,
    pub b: Vec<f64>,
    pub ncomp: usize,
    pub dirichlet: Vec<bool>,
    pub dirichlet_values: Vec<f64>,
}

impl SparseSystem {
    pub fn dof_count(&self) -> usize {
        self.b.len()
    }
}

const CHUNK: usize = 256;

/// Stiffness matrix of the cells in `cells`, numbered by the position of each
/// node in the sorted list `nodes` (`ncomp` dofs per node, node-major). No
/// boundary conditions are applied.
pub fn assemble_on_cells(
    grid: &StructuredGrid,
    physics: &dyn Physics,
    cells: &[usize],
    nodes: &[usize],
) -> Result<CsrMatrix> {
    let ncomp = physics.ncomp();
    let et = grid.element_type();
    let nn = et.n_nodes();
    let ne = ncomp * nn;
    let mut local = vec![usize::MAX; grid.n_nodes()];
    for (l, &n) in nodes.iter().enumerate() {
        local[n] = l;
    }
    // Node graph restricted to the cells.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for &c in cells {
        let cn = grid.cell_nodes(c);
        for &a in cn {
            let la = local[a];
            if la == usize::MAX {
                return Err(Error::invalid(format!("cell {c} has a node outside the node list")));
            }
            adj[la].extend(cn.iter().map(|&b| local[b]));
        }
    }
    let mut pattern: Vec<Vec<usize>> = Vec::with_capacity(nodes.len() * ncomp);
    for row in adj.iter_mut() {
        row.sort_unstable();
        row.dedup();
        let dofs: Vec<usize> = row
            .iter()
            .flat_map(|&b| (0..ncomp).map(move |k| b * ncomp + k))
            .collect();
        for _ in 0..ncomp {
            pattern.push(dofs.clone());
        }
    }
    drop(adj);
    let mut a = CsrMatrix::from_pattern(nodes.len() * ncomp, &pattern);
    drop(pattern);

    let tables = ElementTables::full(et)?;
    let mut dofs = vec![0usize; ne];
    for chunk in cells.chunks(CHUNK) {
        let mats: Vec<Result<Vec<f64>>> = chunk
            .par_iter()
            .map(|&c| {
                let mut k = vec![0.0; ne * ne];
                physics.element_matrix(grid, c, &tables, &mut k)?;
                Ok(k)
            })
            .collect();
        for (&c, k) in chunk.iter().zip(mats) {
            let k = k?;
            for (a_loc, &n) in grid.cell_nodes(c).iter().enumerate() {
                for comp in 0..ncomp {
                    dofs[a_loc * ncomp + comp] = local[n] * ncomp + comp;
                }
            }
            scatter(&mut a, &dofs, &k);
        }
    }
    Ok(a)
}

fn scatter(a: &mut CsrMatrix, dofs: &[usize], k: &[f64]) {
    let ne = dofs.len();
    for (i, &r) in dofs.iter().enumerate() {
        let start = a.indptr()[r];
        let end = a.indptr()[r + 1];
        for (j, &c) in dofs.iter().enumerate() {
            let pos = start
                + a.indices()[start..end]
                    .binary_search(&c)
                    .expect("dof pair missing from sparsity pattern");
            a.data_mut()[pos] += k[i * ne + j];
        }
    }
}

/// Dirichlet flags and values per global dof.
pub fn dirichlet_dofs(grid: &StructuredGrid, ncomp: usize, bcs: &dyn BoundaryConditions) -> (Vec<bool>, Vec<f64>) {
    let n = grid.n_nodes() * ncomp;
    let mut flags = vec![false; n];
    let mut vals = vec![0.0; n];
    for (node, x) in grid.nodes().iter().enumerate() {
        for c in 0..ncomp {
            if bcs.is_dirichlet(x, c) {
                flags[node * ncomp + c] = true;
                vals[node * ncomp + c] = bcs.dirichlet_value(x, c);
            }
        }
    }
    (flags, vals)
}

/// Global assembly: stiffness, body force, boundary tractions, then symmetric
/// elimination of Dirichlet dofs with unit diagonal.
pub fn assemble(grid: &StructuredGrid, physics: &dyn Physics, bcs: &dyn BoundaryConditions) -> Result<SparseSystem> {
    let ncomp = physics.ncomp();
    let nodes: Vec<usize> = (0..grid.n_nodes()).collect();
    let cells: Vec<usize> = (0..grid.n_cells()).collect();
    let mut a = assemble_on_cells(grid, physics, &cells, &nodes)?;
    let mut b = load_vector(grid, ncomp, bcs)?;
    let (dirichlet, dirichlet_values) = dirichlet_dofs(grid, ncomp, bcs);
    if !dirichlet.iter().any(|&d| d) {
        return Err(Error::invalid(
            "no Dirichlet dofs: the pure Neumann problem is singular",
        ));
    }
    apply_dirichlet(&mut a, &mut b, &dirichlet, &dirichlet_values);
    Ok(SparseSystem {
        a,
        b,
        ncomp,
        dirichlet,
        dirichlet_values,
    })
}

/// Moves known values to the right-hand side, zeroes constrained rows and
/// columns and puts 1 on their diagonal.
pub fn apply_dirichlet(a: &mut CsrMatrix, b: &mut [f64], flags: &[bool], values: &[f64]) {
    if values.iter().zip(flags).any(|(v, f)| *f && *v != 0.0) {
        let mut lift = vec![0.0; b.len()];
        for (i, (&f, &v)) in flags.iter().zip(values).enumerate() {
            if f {
                lift[i] = v;
            }
        }
        let al = a.mul_vec(&lift);
        for i in 0..b.len() {
            if !flags[i] {
                b[i] -= al[i];
            }
        }
    }
    for i in 0..b.len() {
        if flags[i] {
            b[i] = values[i];
        }
    }
    a.eliminate(flags, 1.0);
}

/// `∫ f·v dx + ∫_∂Ω h·v ds` over all cells and all domain-boundary faces.
pub fn load_vector(grid: &StructuredGrid, ncomp: usize, bcs: &dyn BoundaryConditions) -> Result<Vec<f64>> {
    let et = grid.element_type();
    let nn = et.n_nodes();
    let mut b = vec![0.0; grid.n_nodes() * ncomp];
    let tables = ElementTables::full(et)?;
    for c in 0..grid.n_cells() {
        let coords = grid.cell_coords(c);
        let nodes = grid.cell_nodes(c);
        for (q, w) in tables.rule.weights.iter().enumerate() {
            let x = map_point(&coords, &tables.values[q]);
            let f = bcs.body_force(&x);
            if f.iter().all(|v| *v == 0.0) {
                continue;
            }
            let (_, det, _) = jacobian(&coords, &tables.ref_grads[q]);
            for a in 0..nn {
                for k in 0..ncomp {
                    b[nodes[a] * ncomp + k] += w * det * tables.values[q][a] * f[k];
                }
            }
        }
    }
    let face_rule = QuadratureRule::square(et.full_integration_order())?;
    let dims = grid.dims();
    for c in 0..grid.n_cells() {
        let ijk = grid.cell_ijk(c);
        for axis in 0..3 {
            for side in [-1.0f64, 1.0] {
                let on_boundary = if side < 0.0 {
                    ijk[axis] == 0
                } else {
                    ijk[axis] + 1 == dims[axis]
                };
                if on_boundary {
                    integrate_face(grid, c, axis, side, &face_rule, ncomp, bcs, &mut b);
                }
            }
        }
    }
    Ok(b)
}

#[allow(clippy::too_many_arguments)]
fn integrate_face(
    grid: &StructuredGrid,
    cell: usize,
    axis: usize,
    side: f64,
    rule: &QuadratureRule,
    ncomp: usize,
    bcs: &dyn BoundaryConditions,
    b: &mut [f64],
) {
    let et: ElementType = grid.element_type();
    let nn = et.n_nodes();
    let coords = grid.cell_coords(cell);
    let nodes = grid.cell_nodes(cell);
    let (e1, e2) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut vals = vec![0.0; nn];
    let mut grads = vec![[0.0; 3]; nn];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let mut xi = [0.0; 3];
        xi[axis] = side;
        xi[e1] = p[0];
        xi[e2] = p[1];
        et.evaluate_into(xi, &mut vals, &mut grads);
        let (j, _, _) = jacobian(&coords, &grads);
        let t1 = [j[0][e1], j[1][e1], j[2][e1]];
        let t2 = [j[0][e2], j[1][e2], j[2][e2]];
        let mut n = [
            t1[1] * t2[2] - t1[2] * t2[1],
            t1[2] * t2[0] - t1[0] * t2[2],
            t1[0] * t2[1] - t1[1] * t2[0],
        ];
        let ds = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let outward = side * (n[0] * j[0][axis] + n[1] * j[1][axis] + n[2] * j[2][axis]);
        let sign = if outward >= 0.0 { 1.0 } else { -1.0 };
        for v in n.iter_mut() {
            *v *= sign / ds;
        }
        let x = map_point(&coords, &vals);
        let h = bcs.neumann(&x, &n);
        if h.iter().all(|v| *v == 0.0) {
            continue;
        }
        for a in 0..nn {
            if vals[a] == 0.0 {
                continue;
            }
            for k in 0..ncomp {
                b[nodes[a] * ncomp + k] += w * ds * vals[a] * h[k];
            }
        }
    }
}
