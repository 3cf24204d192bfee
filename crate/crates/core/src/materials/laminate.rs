use super::stiffness::{
    isotropic_stiffness, orthotropic_stiffness, rotate_stiffness, OrthotropicParams, StiffnessMatrix,
};
use crate::error::{Error, Result};
use crate::mesh::StackingRow;

/// Constitutive law referenced by `material_id` in a stacking file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Material {
    Orthotropic(OrthotropicParams),
    Isotropic { e: f64, nu: f64 },
}

impl Material {
    pub fn stiffness(&self) -> Result<StiffnessMatrix> {
        match self {
            Material::Orthotropic(p) => orthotropic_stiffness(p),
            Material::Isotropic { e, nu } => isotropic_stiffness(*e, *nu),
        }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self, Material::Isotropic { .. })
    }
}

/// Isotropic epoxy resin of the interface layers.
pub const REFERENCE_RESIN: Material = Material::Isotropic { e: 10_000.0, nu: 0.35 };

#[derive(Debug, Clone, PartialEq)]
pub struct Ply {
    pub material_id: usize,
    pub orientation_deg: f64,
    pub thickness: f64,
}

/// Plies separated by thin isotropic interface layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Laminate {
    pub plies: Vec<Ply>,
    /// Young's modulus and Poisson ratio of the interface resin.
    pub interface_material: (f64, f64),
    pub interface_thickness: f64,
}

impl Laminate {
    /// Twelve 0.23 mm carbon/epoxy plies in the sequence
    /// `[-45/45/0/90/45/-45/-45/45/90/0/45/-45]` with 0.02 mm resin interfaces.
    pub fn reference_plate() -> Self {
        let angles = [-45.0, 45.0, 0.0, 90.0, 45.0, -45.0, -45.0, 45.0, 90.0, 0.0, 45.0, -45.0];
        Self {
            plies: angles
                .iter()
                .map(|&a| Ply {
                    material_id: 0,
                    orientation_deg: a,
                    thickness: 0.23,
                })
                .collect(),
            interface_material: (10_000.0, 0.35),
            interface_thickness: 0.02,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.plies.is_empty() {
            return Err(Error::invalid("laminate has no plies"));
        }
        for (i, p) in self.plies.iter().enumerate() {
            if !(p.orientation_deg > -90.0 && p.orientation_deg <= 90.0) {
                return Err(Error::invalid(format!(
                    "ply {i} orientation {} outside (-90, 90]",
                    p.orientation_deg
                )));
            }
            if !(p.thickness > 0.0) {
                return Err(Error::invalid(format!("ply {i} thickness must be positive")));
            }
        }
        if !(self.interface_thickness > 0.0) {
            return Err(Error::invalid("interface thickness must be positive"));
        }
        Ok(())
    }

    pub fn total_thickness(&self) -> f64 {
        self.plies.iter().map(|p| p.thickness).sum::<f64>()
            + self.interface_thickness * (self.plies.len().saturating_sub(1)) as f64
    }

    /// Layer rows bottom to top. Ply `i` becomes region `2i`, the interface above
    /// it region `2i+1`; interfaces use `interface_material_id`.
    pub fn stacking_rows(
        &self,
        elements_per_ply: usize,
        elements_per_interface: usize,
        interface_material_id: usize,
    ) -> Vec<StackingRow> {
        let mut rows = Vec::new();
        for (i, p) in self.plies.iter().enumerate() {
            rows.push(StackingRow {
                region_id: rows.len(),
                orientation_deg: p.orientation_deg,
                thickness: p.thickness,
                elements_through_layer: elements_per_ply,
                material_id: p.material_id,
            });
            if i + 1 < self.plies.len() {
                rows.push(StackingRow {
                    region_id: rows.len(),
                    orientation_deg: 0.0,
                    thickness: self.interface_thickness,
                    elements_through_layer: elements_per_interface,
                    material_id: interface_material_id,
                });
            }
        }
        rows
    }
}

/// Constitutive data resolved for one cell region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMaterial {
    /// Stiffness in the global frame.
    pub stiffness: StiffnessMatrix,
    pub orientation_deg: f64,
    pub material_id: usize,
    /// Resin-rich interface region (isotropic material).
    pub is_interface: bool,
}

/// Region id → constitutive data.
#[derive(Debug, Clone, Default)]
pub struct MaterialTable {
    regions: Vec<Option<RegionMaterial>>,
}

impl MaterialTable {
    pub fn from_stacking(rows: &[StackingRow], library: &[Material]) -> Result<Self> {
        let mut table = Self::default();
        for r in rows {
            let m = library.get(r.material_id).ok_or_else(|| {
                Error::invalid(format!(
                    "region {} references unknown material {}",
                    r.region_id, r.material_id
                ))
            })?;
            let c = rotate_stiffness(&m.stiffness()?, r.orientation_deg);
            table.insert(
                r.region_id,
                RegionMaterial {
                    stiffness: c,
                    orientation_deg: r.orientation_deg,
                    material_id: r.material_id,
                    is_interface: m.is_isotropic(),
                },
            );
        }
        Ok(table)
    }

    /// Every region uses the same material frame-aligned stiffness.
    pub fn uniform(c: StiffnessMatrix, n_regions: usize) -> Self {
        let mut t = Self::default();
        for r in 0..n_regions {
            t.insert(
                r,
                RegionMaterial {
                    stiffness: c,
                    orientation_deg: 0.0,
                    material_id: 0,
                    is_interface: false,
                },
            );
        }
        t
    }

    pub fn insert(&mut self, region: usize, m: RegionMaterial) {
        if self.regions.len() <= region {
            self.regions.resize(region + 1, None);
        }
        self.regions[region] = Some(m);
    }

    pub fn get(&self, region: usize) -> Result<&RegionMaterial> {
        self.regions
            .get(region)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::invalid(format!("no material for region {region}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_plate_thickness() {
        let l = Laminate::reference_plate();
        l.validate().unwrap();
        assert!((l.total_thickness() - 2.98).abs() < 1e-12);
        let rows = l.stacking_rows(2, 1, 1);
        assert_eq!(rows.len(), 23);
        let t: f64 = rows.iter().map(|r| r.thickness).sum();
        assert!((t - 2.98).abs() < 1e-12);
        assert_eq!(rows.iter().map(|r| r.elements_through_layer).sum::<usize>(), 35);
    }

    #[test]
    fn orientation_range_is_checked() {
        let mut l = Laminate::reference_plate();
        l.plies[0].orientation_deg = -90.0;
        assert!(l.validate().is_err());
        l.plies[0].orientation_deg = 90.0;
        assert!(l.validate().is_ok());
    }

    #[test]
    fn table_resolves_regions() {
        let l = Laminate::reference_plate();
        let rows = l.stacking_rows(2, 1, 1);
        let lib = [
            Material::Orthotropic(OrthotropicParams::reference_ply()),
            REFERENCE_RESIN,
        ];
        let t = MaterialTable::from_stacking(&rows, &lib).unwrap();
        assert!(t.get(1).unwrap().is_interface);
        assert!(!t.get(0).unwrap().is_interface);
        assert!(t.get(99).is_err());
        let bad = [Material::Orthotropic(OrthotropicParams::reference_ply())];
        assert!(MaterialTable::from_stacking(&rows, &bad).is_err());
    }
}
