use std::path::Path;

use super::grid::{GridSpec, Layer};
use crate::error::{Error, Result};
use crate::fem::basis::ElementType;

/// One row of a stacking-sequence file.
#[derive(Debug, Clone, PartialEq)]
pub struct StackingRow {
    pub region_id: usize,
    pub orientation_deg: f64,
    pub thickness: f64,
    pub elements_through_layer: usize,
    pub material_id: usize,
}

const HEADER: [&str; 5] = [
    "region_id",
    "orientation_deg",
    "thickness",
    "elements_through_layer",
    "material_id",
];

/// Parses `region_id,orientation_deg,thickness,elements_through_layer,material_id`
/// rows after a header line. Blank lines and `#` comments are skipped.
pub fn parse_stacking_csv(text: &str, source_name: &str) -> Result<Vec<StackingRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines
        .next()
        .ok_or_else(|| Error::parse(source_name, "empty stacking file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != HEADER {
        return Err(Error::parse(
            source_name,
            format!("line {ln}: expected header '{}'", HEADER.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (ln, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(Error::parse(
                source_name,
                format!("line {ln}: expected 5 fields, found {}", f.len()),
            ));
        }
        let bad = |what: &str| Error::parse(source_name, format!("line {ln}: invalid {what}"));
        let row = StackingRow {
            region_id: f[0].parse().map_err(|_| bad("region_id"))?,
            orientation_deg: f[1].parse().map_err(|_| bad("orientation_deg"))?,
            thickness: f[2].parse().map_err(|_| bad("thickness"))?,
            elements_through_layer: f[3].parse().map_err(|_| bad("elements_through_layer"))?,
            material_id: f[4].parse().map_err(|_| bad("material_id"))?,
        };
        if !(row.thickness > 0.0) {
            return Err(Error::parse(
                source_name,
                format!("line {ln}: thickness must be positive"),
            ));
        }
        if row.elements_through_layer == 0 {
            return Err(Error::parse(
                source_name,
                format!("line {ln}: elements_through_layer must be >= 1"),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(source_name, "no layers"));
    }
    Ok(rows)
}

pub fn read_stacking_csv(path: &Path) -> Result<Vec<StackingRow>> {
    let text = std::fs::read_to_string(path)?;
    parse_stacking_csv(&text, &path.display().to_string())
}

impl GridSpec {
    pub fn from_stacking(
        rows: &[StackingRow],
        extents: [f64; 2],
        cells: [usize; 2],
        element_type: ElementType,
    ) -> Self {
        Self {
            extents,
            cells,
            layers: rows
                .iter()
                .map(|r| Layer {
                    region_id: r.region_id,
                    thickness: r.thickness,
                    elements: r.elements_through_layer,
                })
                .collect(),
            element_type,
        }
    }
}

pub fn write_stacking_csv(rows: &[StackingRow]) -> String {
    let mut s = HEADER.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.region_id, r.orientation_deg, r.thickness, r.elements_through_layer, r.material_id
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let rows = vec![
            StackingRow {
                region_id: 0,
                orientation_deg: -45.0,
                thickness: 0.23,
                elements_through_layer: 2,
                material_id: 0,
            },
            StackingRow {
                region_id: 1,
                orientation_deg: 0.0,
                thickness: 0.02,
                elements_through_layer: 1,
                material_id: 1,
            },
        ];
        let text = write_stacking_csv(&rows);
        assert_eq!(parse_stacking_csv(&text, "mem").unwrap(), rows);
    }

    #[test]
    fn rejects_bad_header_and_rows() {
        assert!(parse_stacking_csv("a,b,c\n", "mem").is_err());
        let hdr = HEADER.join(",");
        assert!(parse_stacking_csv(&format!("{hdr}\n0,0,-1,1,0\n"), "mem").is_err());
        assert!(parse_stacking_csv(&format!("{hdr}\n0,0,1,0,0\n"), "mem").is_err());
        assert!(parse_stacking_csv(&format!("{hdr}\n0,0,1\n"), "mem").is_err());
    }
}
