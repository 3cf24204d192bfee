use std::fmt;
use std::str::FromStr;

use geneo::materials::PermeabilityField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Alternating one-cell z-slabs of permeability 1 (even k) and `c` (odd k).
    Layers,
    /// Straight x-aligned channels of permeability `c` at random (y, z)
    /// positions in a background of 1.
    Channels,
}

impl FromStr for Pattern {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s {
            "layers" => Ok(Self::Layers),
            "channels" => Ok(Self::Channels),
            _ => Err(RunError::Config(format!("unknown pattern '{s}'"))),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Layers => "layers",
            Self::Channels => "channels",
        })
    }
}

/// Isotropic two-valued field with values 1 and `contrast`. The seed only
/// affects the channel pattern.
pub fn generate_synthetic_contrast(dims: [usize; 3], contrast: f64, pattern: Pattern, seed: u64) -> PermeabilityField {
    let mut field = PermeabilityField::uniform(dims, 1.0);
    if contrast == 1.0 {
        return field;
    }
    let [nx, ny, nz] = dims;
    let mut high = vec![false; nx * ny * nz];
    match pattern {
        Pattern::Layers => {
            for k in (1..nz).step_by(2) {
                for j in 0..ny {
                    for i in 0..nx {
                        high[field.cell(i, j, k)] = true;
                    }
                }
            }
        }
        Pattern::Channels => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Channels cover roughly a quarter of the cross-section.
            let target = (ny * nz / 4).max(1);
            let mut covered = 0;
            while covered < target {
                let wy = rng.gen_range(1..=2.min(ny));
                let wz = rng.gen_range(1..=2.min(nz));
                let y0 = rng.gen_range(0..=ny - wy);
                let z0 = rng.gen_range(0..=nz - wz);
                for k in z0..z0 + wz {
                    for j in y0..y0 + wy {
                        let first = field.cell(0, j, k);
                        if !high[first] {
                            covered += 1;
                        }
                        for i in 0..nx {
                            high[field.cell(i, j, k)] = true;
                        }
                    }
                }
            }
        }
    }
    for (id, h) in high.iter().enumerate() {
        if *h {
            field.kx[id] = contrast;
            field.ky[id] = contrast;
            field.kz[id] = contrast;
        }
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_contrast_is_uniform() {
        for p in [Pattern::Layers, Pattern::Channels] {
            let f = generate_synthetic_contrast([4, 5, 6], 1.0, p, 3);
            assert!(f.kx.iter().chain(&f.ky).chain(&f.kz).all(|&k| k == 1.0));
        }
    }

    #[test]
    fn layers_alternate_in_z() {
        let f = generate_synthetic_contrast([3, 2, 5], 1e6, Pattern::Layers, 0);
        for k in 0..5 {
            for j in 0..2 {
                for i in 0..3 {
                    let want = if k % 2 == 1 { 1e6 } else { 1.0 };
                    assert_eq!(f.kz[f.cell(i, j, k)], want);
                }
            }
        }
        assert_eq!(f.contrast(), 1e6);
    }

    #[test]
    fn channels_are_reproducible_and_reach_the_contrast() {
        let a = generate_synthetic_contrast([10, 12, 8], 1e4, Pattern::Channels, 42);
        let b = generate_synthetic_contrast([10, 12, 8], 1e4, Pattern::Channels, 42);
        let c = generate_synthetic_contrast([10, 12, 8], 1e4, Pattern::Channels, 43);
        assert_eq!(a.kx, b.kx);
        assert_ne!(a.kx, c.kx);
        assert_eq!(a.contrast(), 1e4);
        // Channels run the full length in x.
        for k in 0..8 {
            for j in 0..12 {
                let v = a.kx[a.cell(0, j, k)];
                assert!((0..10).all(|i| a.kx[a.cell(i, j, k)] == v));
            }
        }
    }
}
