use super::grid::StructuredGrid;
use crate::error::{Error, Result};

/// Half-open cell index range per axis.
pub type CellBox = [[usize; 2]; 3];

/// Cartesian owner partition of the cells extended by `overlap` cell layers.
///
/// The extension is a box in cell-index space: every cell within `overlap`
/// layers of the owner block in each axis direction (diagonal neighbours
/// included), clipped at the domain boundary.
#[derive(Debug, Clone)]
pub struct OverlappingDecomposition {
    pub partition_shape: [usize; 3],
    pub overlap: usize,
    pub cell_owner: Vec<usize>,
    pub owner_boxes: Vec<CellBox>,
    pub subdomain_boxes: Vec<CellBox>,
    /// Sorted cell indices of each extended subdomain.
    pub subdomain_cells: Vec<Vec<usize>>,
    /// Cells of each subdomain that also belong to another subdomain.
    pub overlap_cells: Vec<Vec<usize>>,
    /// Sorted global node indices of each subdomain.
    pub subdomain_nodes: Vec<Vec<usize>>,
    /// Per local node: lies on the subdomain boundary but not on the domain boundary.
    pub interior_boundary: Vec<Vec<bool>>,
    /// Number of subdomains containing each node.
    pub node_multiplicity: Vec<usize>,
    /// Subdomain owning each node: the owner of the lowest-numbered cell touching it.
    pub node_owner: Vec<usize>,
    pub neighbors: Vec<Vec<usize>>,
    /// Non-fatal findings such as a subdomain swallowing a non-adjacent block.
    pub warnings: Vec<String>,
}

fn block_ranges(n: usize, p: usize) -> Vec<[usize; 2]> {
    (0..p).map(|b| [b * n / p, (b + 1) * n / p]).collect()
}

pub fn decompose(
    grid: &StructuredGrid,
    partition_shape: [usize; 3],
    overlap: usize,
) -> Result<OverlappingDecomposition> {
    let dims = grid.dims();
    for d in 0..3 {
        if partition_shape[d] == 0 {
            return Err(Error::invalid("partition shape entries must be positive"));
        }
        if partition_shape[d] > dims[d] {
            return Err(Error::invalid(format!(
                "{} blocks requested along axis {d} but the grid has only {} cells",
                partition_shape[d], dims[d]
            )));
        }
    }
    let ranges: Vec<Vec<[usize; 2]>> = (0..3).map(|d| block_ranges(dims[d], partition_shape[d])).collect();
    let n_sub = partition_shape.iter().product::<usize>();
    let mut owner_boxes = Vec::with_capacity(n_sub);
    let mut block_ijk = Vec::with_capacity(n_sub);
    for bk in 0..partition_shape[2] {
        for bj in 0..partition_shape[1] {
            for bi in 0..partition_shape[0] {
                owner_boxes.push([ranges[0][bi], ranges[1][bj], ranges[2][bk]]);
                block_ijk.push([bi, bj, bk]);
            }
        }
    }
    let subdomain_boxes: Vec<CellBox> = owner_boxes
        .iter()
        .map(|b| {
            let mut e = *b;
            for d in 0..3 {
                e[d][0] = b[d][0].saturating_sub(overlap);
                e[d][1] = (b[d][1] + overlap).min(dims[d]);
            }
            e
        })
        .collect();

    let mut cell_owner = vec![0; grid.n_cells()];
    for (j, b) in owner_boxes.iter().enumerate() {
        for_each_cell(grid, b, |c| cell_owner[c] = j);
    }
    let mut cell_count = vec![0u32; grid.n_cells()];
    let mut subdomain_cells = Vec::with_capacity(n_sub);
    for b in &subdomain_boxes {
        let mut cells = Vec::new();
        for_each_cell(grid, b, |c| {
            cells.push(c);
            cell_count[c] += 1;
        });
        cells.sort_unstable();
        subdomain_cells.push(cells);
    }
    let overlap_cells: Vec<Vec<usize>> = subdomain_cells
        .iter()
        .map(|cells| cells.iter().copied().filter(|&c| cell_count[c] >= 2).collect())
        .collect();

    let neighbors: Vec<Vec<usize>> = (0..n_sub)
        .map(|j| {
            (0..n_sub)
                .filter(|&k| k != j && boxes_intersect(&subdomain_boxes[j], &subdomain_boxes[k]))
                .collect()
        })
        .collect();

    let s = grid.element_type().lattice_step();
    let mut node_multiplicity = vec![0usize; grid.n_nodes()];
    let mut subdomain_nodes = Vec::with_capacity(n_sub);
    let mut interior_boundary = Vec::with_capacity(n_sub);
    for b in &subdomain_boxes {
        let mut nodes = Vec::new();
        let mut flags = Vec::new();
        for n in 0..grid.n_nodes() {
            let lat = grid.node_lattice(n);
            if (0..3).all(|d| lat[d] >= s * b[d][0] && lat[d] <= s * b[d][1]) {
                let on_inner_face = (0..3)
                    .any(|d| (lat[d] == s * b[d][0] && b[d][0] > 0) || (lat[d] == s * b[d][1] && b[d][1] < dims[d]));
                nodes.push(n);
                flags.push(on_inner_face);
                node_multiplicity[n] += 1;
            }
        }
        subdomain_nodes.push(nodes);
        interior_boundary.push(flags);
    }

    let node_owner: Vec<usize> = (0..grid.n_nodes())
        .map(|n| {
            let lat = grid.node_lattice(n);
            let k = grid.touching_cells_along(2, lat[2]).start;
            let j = grid.touching_cells_along(1, lat[1]).start;
            let i = grid.touching_cells_along(0, lat[0]).start;
            cell_owner[grid.cell_index(i, j, k)]
        })
        .collect();

    let mut warnings = Vec::new();
    for j in 0..n_sub {
        for k in 0..n_sub {
            let adjacent = (0..3).all(|d| block_ijk[j][d].abs_diff(block_ijk[k][d]) <= 1);
            if j != k && !adjacent && box_contains(&subdomain_boxes[j], &owner_boxes[k]) {
                warnings.push(format!(
                    "subdomain {j} contains the whole owner block of non-adjacent subdomain {k}; reduce the overlap"
                ));
            }
        }
    }

    Ok(OverlappingDecomposition {
        partition_shape,
        overlap,
        cell_owner,
        owner_boxes,
        subdomain_boxes,
        subdomain_cells,
        overlap_cells,
        subdomain_nodes,
        interior_boundary,
        node_multiplicity,
        node_owner,
        neighbors,
        warnings,
    })
}

fn for_each_cell(grid: &StructuredGrid, b: &CellBox, mut f: impl FnMut(usize)) {
    for k in b[2][0]..b[2][1] {
        for j in b[1][0]..b[1][1] {
            for i in b[0][0]..b[0][1] {
                f(grid.cell_index(i, j, k));
            }
        }
    }
}

fn boxes_intersect(a: &CellBox, b: &CellBox) -> bool {
    (0..3).all(|d| a[d][0] < b[d][1] && b[d][0] < a[d][1])
}

fn box_contains(outer: &CellBox, inner: &CellBox) -> bool {
    (0..3).all(|d| outer[d][0] <= inner[d][0] && inner[d][1] <= outer[d][1])
}

impl OverlappingDecomposition {
    pub fn num_subdomains(&self) -> usize {
        self.subdomain_cells.len()
    }

    /// Global dof indices of subdomain `j` (node-major, `ncomp` per node).
    pub fn subdomain_dofs(&self, j: usize, ncomp: usize) -> Vec<usize> {
        self.subdomain_nodes[j]
            .iter()
            .flat_map(|&n| (0..ncomp).map(move |c| n * ncomp + c))
            .collect()
    }

    /// Local dof flags of the interior subdomain boundary.
    pub fn interior_boundary_dofs(&self, j: usize, ncomp: usize) -> Vec<bool> {
        self.interior_boundary[j]
            .iter()
            .flat_map(|&b| std::iter::repeat(b).take(ncomp))
            .collect()
    }

    pub fn dof_multiplicity(&self, ncomp: usize) -> Vec<usize> {
        self.node_multiplicity
            .iter()
            .flat_map(|&m| std::iter::repeat(m).take(ncomp))
            .collect()
    }

    /// Number of subdomains whose interior (the subdomain minus its interior
    /// boundary) contains each node.
    pub fn interior_multiplicity(&self, n_nodes: usize) -> Vec<usize> {
        let mut m = vec![0; n_nodes];
        for (nodes, flags) in self.subdomain_nodes.iter().zip(&self.interior_boundary) {
            for (&n, &b) in nodes.iter().zip(flags) {
                if !b {
                    m[n] += 1;
                }
            }
        }
        m
    }
}
