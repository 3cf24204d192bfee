use std::io::Write;

use crate::error::{Error, Result};
use crate::fem::basis::{jacobian, ElementType};
use crate::fem::quadrature::QuadratureRule;

/// One through-thickness layer of a layer-cake grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub region_id: usize,
    pub thickness: f64,
    pub elements: usize,
}

/// Input for [`build_layer_cake`].
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Physical lengths in x and y.
    pub extents: [f64; 2],
    /// Cells in x and y.
    pub cells: [usize; 2],
    /// Bottom-to-top layer stack.
    pub layers: Vec<Layer>,
    pub element_type: ElementType,
}

impl GridSpec {
    /// A single-region box `[0,lx]×[0,ly]×[0,lz]` with `cells` cells per axis.
    pub fn box_domain(extents: [f64; 3], cells: [usize; 3], element_type: ElementType) -> Self {
        Self {
            extents: [extents[0], extents[1]],
            cells: [cells[0], cells[1]],
            layers: vec![Layer {
                region_id: 0,
                thickness: extents[2],
                elements: cells[2],
            }],
            element_type,
        }
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.cells.iter().any(|&c| c == 0) {
            return Err(Error::invalid("grid needs at least one cell per in-plane axis"));
        }
        if self.extents.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::invalid("grid extents must be positive"));
        }
        if self.layers.is_empty() {
            return Err(Error::invalid("layer stack is empty"));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if !(l.thickness > 0.0) {
                return Err(Error::invalid(format!(
                    "layer {i} has non-positive thickness {}",
                    l.thickness
                )));
            }
            if l.elements == 0 {
                return Err(Error::invalid(format!(
                    "layer {i} has zero elements through its thickness"
                )));
            }
        }
        Ok(())
    }
}

/// Structured hexahedral grid, cells numbered x-fastest then y then z.
///
/// Nodes live on an integer lattice whose spacing between cell corners is
/// [`ElementType::lattice_step`]; for serendipity cells only lattice points with
/// at most one odd coordinate carry a node.
#[derive(Debug, Clone)]
pub struct StructuredGrid {
    pub(crate) element_type: ElementType,
    pub(crate) dims: [usize; 3],
    pub(crate) nodes: Vec<[f64; 3]>,
    pub(crate) connectivity: Vec<usize>,
    pub(crate) cell_region: Vec<usize>,
    pub(crate) node_lattice: Vec<[usize; 3]>,
    pub(crate) lattice_to_node: Vec<usize>,
    /// Layer index of each element sheet in z.
    pub(crate) sheet_layer: Vec<usize>,
    /// Untransformed z coordinates of the layer interfaces (length layers + 1).
    pub(crate) layer_bounds: Vec<f64>,
    pub(crate) layer_elements: Vec<usize>,
}

const NO_NODE: usize = usize::MAX;

pub fn build_layer_cake(spec: &GridSpec) -> Result<StructuredGrid> {
    spec.validate()?;
    let et = spec.element_type;
    let s = et.lattice_step();
    let nz: usize = spec.layers.iter().map(|l| l.elements).sum();
    let dims = [spec.cells[0], spec.cells[1], nz];
    let lat = [s * dims[0] + 1, s * dims[1] + 1, s * dims[2] + 1];

    let mut layer_bounds = vec![0.0];
    let mut sheet_layer = Vec::with_capacity(nz);
    // z coordinate of every lattice plane.
    let mut zs = Vec::with_capacity(lat[2]);
    zs.push(0.0);
    let mut z0 = 0.0;
    for (li, l) in spec.layers.iter().enumerate() {
        let h = l.thickness / l.elements as f64;
        for e in 0..l.elements {
            sheet_layer.push(li);
            for sub in 1..=s {
                let z = if e + 1 == l.elements && sub == s {
                    z0 + l.thickness
                } else {
                    z0 + h * (e as f64 + sub as f64 / s as f64)
                };
                zs.push(z);
            }
        }
        z0 += l.thickness;
        layer_bounds.push(z0);
    }

    let keep = |a: usize, b: usize, c: usize| -> bool { s == 1 || (a % 2 + b % 2 + c % 2) <= 1 };
    let mut lattice_to_node = vec![NO_NODE; lat[0] * lat[1] * lat[2]];
    let mut nodes = Vec::new();
    let mut node_lattice = Vec::new();
    for c in 0..lat[2] {
        for b in 0..lat[1] {
            for a in 0..lat[0] {
                if keep(a, b, c) {
                    lattice_to_node[a + lat[0] * (b + lat[1] * c)] = nodes.len();
                    nodes.push([
                        spec.extents[0] * a as f64 / (lat[0] - 1) as f64,
                        spec.extents[1] * b as f64 / (lat[1] - 1) as f64,
                        zs[c],
                    ]);
                    node_lattice.push([a, b, c]);
                }
            }
        }
    }

    let n_cells = dims[0] * dims[1] * dims[2];
    let nn = et.n_nodes();
    let mut connectivity = Vec::with_capacity(n_cells * nn);
    let mut cell_region = Vec::with_capacity(n_cells);
    let half = s as f64 / 2.0;
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                for r in et.reference_nodes() {
                    let a = s * i + ((r[0] + 1.0) * half).round() as usize;
                    let b = s * j + ((r[1] + 1.0) * half).round() as usize;
                    let c = s * k + ((r[2] + 1.0) * half).round() as usize;
                    let id = lattice_to_node[a + lat[0] * (b + lat[1] * c)];
                    debug_assert_ne!(id, NO_NODE);
                    connectivity.push(id);
                }
                cell_region.push(spec.layers[sheet_layer[k]].region_id);
            }
        }
    }

    let grid = StructuredGrid {
        element_type: et,
        dims,
        nodes,
        connectivity,
        cell_region,
        node_lattice,
        lattice_to_node,
        sheet_layer,
        layer_bounds,
        layer_elements: spec.layers.iter().map(|l| l.elements).collect(),
    };
    grid.check_jacobians()?;
    Ok(grid)
}

impl StructuredGrid {
    pub fn element_type(&self) -> ElementType {
        self.element_type
    }

    /// Cells per axis.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn n_cells(&self) -> usize {
        self.cell_region.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.element_type.n_nodes()
    }

    pub fn cell_nodes(&self, cell: usize) -> &[usize] {
        let nn = self.nodes_per_cell();
        &self.connectivity[cell * nn..(cell + 1) * nn]
    }

    pub fn connectivity(&self) -> &[usize] {
        &self.connectivity
    }

    pub fn cell_region(&self, cell: usize) -> usize {
        self.cell_region[cell]
    }

    pub fn cell_regions(&self) -> &[usize] {
        &self.cell_region
    }

    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn cell_ijk(&self, cell: usize) -> [usize; 3] {
        let i = cell % self.dims[0];
        let j = (cell / self.dims[0]) % self.dims[1];
        let k = cell / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }

    /// Lattice coordinates of a node.
    pub fn node_lattice(&self, node: usize) -> [usize; 3] {
        self.node_lattice[node]
    }

    pub fn lattice_dims(&self) -> [usize; 3] {
        let s = self.element_type.lattice_step();
        [s * self.dims[0] + 1, s * self.dims[1] + 1, s * self.dims[2] + 1]
    }

    pub fn node_at_lattice(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        let l = self.lattice_dims();
        if a >= l[0] || b >= l[1] || c >= l[2] {
            return None;
        }
        let id = self.lattice_to_node[a + l[0] * (b + l[1] * c)];
        (id != NO_NODE).then_some(id)
    }

    /// Range of cell indices along one axis whose closure contains lattice coordinate `a`.
    pub fn touching_cells_along(&self, axis: usize, a: usize) -> std::ops::Range<usize> {
        let s = self.element_type.lattice_step();
        let n = self.dims[axis];
        if a % s == 0 {
            let hi = (a / s).min(n - 1) + 1;
            let lo = (a / s).saturating_sub(1);
            lo..hi
        } else {
            a / s..a / s + 1
        }
    }

    pub fn cell_coords(&self, cell: usize) -> Vec<[f64; 3]> {
        self.cell_nodes(cell).iter().map(|&n| self.nodes[n]).collect()
    }

    pub fn cell_centroid(&self, cell: usize) -> [f64; 3] {
        let nodes = self.cell_nodes(cell);
        let mut c = [0.0; 3];
        // The mean of the corner nodes is the image of the reference centre for
        // affine cells and a close stand-in otherwise.
        for &n in &nodes[..8] {
            for d in 0..3 {
                c[d] += self.nodes[n][d] / 8.0;
            }
        }
        c
    }

    /// Layer index of a cell.
    pub fn cell_layer(&self, cell: usize) -> usize {
        self.sheet_layer[self.cell_ijk(cell)[2]]
    }

    pub fn n_layers(&self) -> usize {
        self.layer_elements.len()
    }

    pub fn layer_bounds(&self) -> &[f64] {
        &self.layer_bounds
    }

    pub fn layer_elements(&self) -> &[usize] {
        &self.layer_elements
    }

    pub fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        bounding_box(self.nodes.iter())
    }

    /// Verifies a positive Jacobian determinant at every full-integration point.
    pub fn check_jacobians(&self) -> Result<()> {
        let et = self.element_type;
        let rule = QuadratureRule::hex(et.full_integration_order())?;
        let nn = et.n_nodes();
        let mut vals = vec![0.0; nn];
        let mut grads = vec![[0.0; 3]; nn];
        let tables: Vec<Vec<[f64; 3]>> = rule
            .points
            .iter()
            .map(|p| {
                et.evaluate_into(*p, &mut vals, &mut grads);
                grads.clone()
            })
            .collect();
        for cell in 0..self.n_cells() {
            let coords = self.cell_coords(cell);
            for g in &tables {
                let (_, det, _) = jacobian(&coords, g);
                if !(det > 0.0) {
                    return Err(Error::DegenerateJacobian { cell, det });
                }
            }
        }
        Ok(())
    }

    /// Legacy ASCII VTK with the region label as cell data.
    pub fn write_vtk<W: Write>(&self, w: W) -> std::io::Result<()> {
        crate::postprocess::vtk::write_vtk(self, &[], &[], w)
    }
}

pub(crate) fn bounding_box<'a>(pts: impl Iterator<Item = &'a [f64; 3]>) -> ([f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts {
        for d in 0..3 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    (lo, hi)
}
