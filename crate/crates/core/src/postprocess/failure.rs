use super::stress::StressField;
use crate::error::{Error, Result};
use crate::materials::MaterialTable;

/// Interlaminar strengths in MPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allowables {
    pub s33: f64,
    pub s13: f64,
    pub s23: f64,
}

impl Allowables {
    /// Through-thickness tension 61 MPa, shear 97 and 94 MPa.
    pub fn reference() -> Self {
        Self {
            s33: 61.0,
            s13: 97.0,
            s23: 94.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.s33, self.s13, self.s23].iter().all(|v| *v > 0.0) {
            Ok(())
        } else {
            Err(Error::invalid("allowables must be positive"))
        }
    }
}

/// Camanho interlaminar failure index; only tensile `σ33` contributes.
pub fn camanho(sigma: &[f64; 6], a: &Allowables) -> f64 {
    let s33 = sigma[2].max(0.0) / a.s33;
    let s13 = sigma[4] / a.s13;
    let s23 = sigma[3] / a.s23;
    (s33 * s33 + s13 * s13 + s23 * s23).sqrt()
}

/// Failure load `q / F_max`; `F_max = 0` yields `+∞`.
pub fn failure_load(q_applied: f64, f_max: f64) -> f64 {
    if f_max == 0.0 {
        f64::INFINITY
    } else {
        q_applied / f_max
    }
}

/// Camanho index of every cell (stress in MPa).
pub fn camanho_field(stress: &StressField, a: &Allowables) -> Vec<f64> {
    stress.stress.iter().map(|s| camanho(s, a)).collect()
}

/// Largest index over interface cells and over all cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureScan {
    pub interface_max: f64,
    pub interface_cell: Option<usize>,
    pub all_max: f64,
}

pub fn scan_failure(stress: &StressField, materials: &MaterialTable, a: &Allowables) -> Result<FailureScan> {
    let mut scan = FailureScan {
        interface_max: 0.0,
        interface_cell: None,
        all_max: 0.0,
    };
    for (c, (s, &r)) in stress.stress.iter().zip(&stress.region).enumerate() {
        let f = camanho(s, a);
        scan.all_max = scan.all_max.max(f);
        if materials.get(r)?.is_interface && f > scan.interface_max {
            scan.interface_max = f;
            scan.interface_cell = Some(c);
        }
    }
    Ok(scan)
}

/// `max |u_z|` over nodes for vector fields, `max |u|` for scalar fields.
pub fn max_displacement(u: &[f64], ncomp: usize) -> f64 {
    let comp = if ncomp >= 3 { 2 } else { 0 };
    u.iter()
        .skip(comp)
        .step_by(ncomp.max(1))
        .fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_cases() {
        let a = Allowables::reference();
        assert!((camanho(&[0.0, 0.0, 61.0, 0.0, 0.0, 0.0], &a) - 1.0).abs() < 1e-15);
        assert_eq!(camanho(&[0.0, 0.0, -100.0, 0.0, 0.0, 0.0], &a), 0.0);
        assert!((camanho(&[0.0, 0.0, 61.0, 94.0, 97.0, 0.0], &a) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn failure_load_cases() {
        assert!((failure_load(0.01, 0.5) - 0.02).abs() < 1e-16);
        assert_eq!(failure_load(0.01, 1.0), 0.01);
        assert!(failure_load(0.01, 0.0).is_infinite());
    }

    #[test]
    fn max_displacement_cases() {
        assert_eq!(max_displacement(&[0.0; 9], 3), 0.0);
        assert_eq!(max_displacement(&[0.0, 0.0, 1.0, 7.0, 0.0, -2.5], 3), 2.5);
        assert_eq!(max_displacement(&[0.5, -3.0], 1), 3.0);
    }

    proptest! {
        #[test]
        fn monotone_and_blind_to_in_plane(
            s in prop::array::uniform6(-200.0f64..200.0),
            d in 0.0f64..50.0,
            other in prop::array::uniform3(-1e3f64..1e3)
        ) {
            let a = Allowables::reference();
            let f = camanho(&s, &a);
            for idx in [2usize, 3, 4] {
                let mut t = s;
                if idx == 2 {
                    t[2] = t[2].max(0.0) + d;
                } else {
                    t[idx] = t[idx].signum() * (t[idx].abs() + d);
                }
                prop_assert!(camanho(&t, &a) >= f - 1e-12);
            }
            let mut t = s;
            t[0] = other[0];
            t[1] = other[1];
            t[5] = other[2];
            prop_assert_eq!(camanho(&t, &a), f);
        }

        #[test]
        fn failure_load_is_linear(q in 1e-4f64..10.0, fm in 1e-3f64..10.0) {
            prop_assert!((failure_load(2.0 * q, fm) - 2.0 * failure_load(q, fm)).abs() <= 1e-12 * failure_load(q, fm));
        }
    }
}
