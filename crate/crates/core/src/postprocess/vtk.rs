use std::io::Write;

use crate::mesh::StructuredGrid;

/// Named nodal or cell array with 1 (scalar) or 3 (vector) components per entry.
#[derive(Debug, Clone, Copy)]
pub struct VtkField<'a> {
    pub name: &'a str,
    pub components: usize,
    pub data: &'a [f64],
}

impl<'a> VtkField<'a> {
    pub fn scalar(name: &'a str, data: &'a [f64]) -> Self {
        Self {
            name,
            components: 1,
            data,
        }
    }

    pub fn vector(name: &'a str, data: &'a [f64]) -> Self {
        Self {
            name,
            components: 3,
            data,
        }
    }
}

/// Legacy ASCII VTK 3.0 unstructured grid. The cell region label is always
/// written as the first cell array.
pub fn write_vtk<W: Write>(
    grid: &StructuredGrid,
    point_fields: &[VtkField],
    cell_fields: &[VtkField],
    w: W,
) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(w);
    let bad = |what: &str| std::io::Error::new(std::io::ErrorKind::InvalidInput, what.to_string());
    for f in point_fields {
        if f.data.len() != f.components * grid.n_nodes() || !(f.components == 1 || f.components == 3) {
            return Err(bad(&format!("point field '{}' has the wrong length", f.name)));
        }
    }
    for f in cell_fields {
        if f.data.len() != f.components * grid.n_cells() || !(f.components == 1 || f.components == 3) {
            return Err(bad(&format!("cell field '{}' has the wrong length", f.name)));
        }
    }
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "structured hexahedral grid")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", grid.n_nodes())?;
    for p in grid.nodes() {
        writeln!(w, "{:e} {:e} {:e}", p[0], p[1], p[2])?;
    }
    let nn = grid.nodes_per_cell();
    writeln!(w, "CELLS {} {}", grid.n_cells(), grid.n_cells() * (nn + 1))?;
    for c in 0..grid.n_cells() {
        write!(w, "{nn}")?;
        for n in grid.cell_nodes(c) {
            write!(w, " {n}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {}", grid.n_cells())?;
    let t = grid.element_type().vtk_cell_type();
    for _ in 0..grid.n_cells() {
        writeln!(w, "{t}")?;
    }
    writeln!(w, "CELL_DATA {}", grid.n_cells())?;
    writeln!(w, "SCALARS region int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for r in grid.cell_regions() {
        writeln!(w, "{r}")?;
    }
    for f in cell_fields {
        write_field(&mut w, f)?;
    }
    if !point_fields.is_empty() {
        writeln!(w, "POINT_DATA {}", grid.n_nodes())?;
        for f in point_fields {
            write_field(&mut w, f)?;
        }
    }
    w.flush()
}

fn write_field<W: Write>(w: &mut W, f: &VtkField) -> std::io::Result<()> {
    if f.components == 3 {
        writeln!(w, "VECTORS {} double", f.name)?;
        for v in f.data.chunks(3) {
            writeln!(w, "{:e} {:e} {:e}", v[0], v[1], v[2])?;
        }
    } else {
        writeln!(w, "SCALARS {} double 1", f.name)?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in f.data {
            writeln!(w, "{v:e}")?;
        }
    }
    Ok(())
}
