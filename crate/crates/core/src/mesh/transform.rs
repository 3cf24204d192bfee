use std::fmt;
use std::str::FromStr;

use super::grid::StructuredGrid;
use crate::error::{Error, Result};

/// Built-in continuous maps applied to node coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Transformation {
    Identity,
    /// Axis-aligned scaling.
    Scale([f64; 3]),
    /// Geometric grading of element sheets inside every layer, refined toward
    /// both layer faces; `bias` is the largest/smallest element ratio per layer.
    ZGrade {
        bias: f64,
    },
    /// Bends the plate about an axis parallel to y at height `-radius`, so that
    /// `x` becomes arc length on the mid-surface `z = 0`.
    Bend {
        radius: f64,
    },
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transformation::Identity => write!(f, "identity"),
            Transformation::Scale(s) => write!(f, "scale:{},{},{}", s[0], s[1], s[2]),
            Transformation::ZGrade { bias } => write!(f, "zgrade:{bias}"),
            Transformation::Bend { radius } => write!(f, "bend:{radius}"),
        }
    }
}

impl FromStr for Transformation {
    type Err = Error;

    /// `identity`, `scale:sx,sy,sz` (or `scale:s`), `zgrade:bias`, `bend:radius`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            arg.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid(format!("bad number '{t}' in transformation '{s}'")))
                })
                .collect()
        };
        match name {
            "identity" | "none" | "" => Ok(Transformation::Identity),
            "scale" => {
                let v = nums()?;
                match v.as_slice() {
                    [a] => Ok(Transformation::Scale([*a; 3])),
                    [a, b, c] => Ok(Transformation::Scale([*a, *b, *c])),
                    _ => Err(Error::invalid("scale takes one or three factors")),
                }
            }
            "zgrade" => {
                let v = nums()?;
                match v.as_slice() {
                    [b] if *b >= 1.0 => Ok(Transformation::ZGrade { bias: *b }),
                    _ => Err(Error::invalid("zgrade takes one bias ratio >= 1")),
                }
            }
            "bend" => {
                let v = nums()?;
                match v.as_slice() {
                    [r] if *r > 0.0 => Ok(Transformation::Bend { radius: *r }),
                    _ => Err(Error::invalid("bend takes one positive radius")),
                }
            }
            other => Err(Error::invalid(format!("unknown transformation '{other}'"))),
        }
    }
}

/// Replaces every node coordinate by `map(x)` and re-checks cell Jacobians.
pub fn apply_transformation<F>(grid: &StructuredGrid, map: F) -> Result<StructuredGrid>
where
    F: Fn([f64; 3]) -> [f64; 3],
{
    let mut out = grid.clone();
    for p in out.nodes.iter_mut() {
        *p = map(*p);
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("transformation produced a non-finite coordinate"));
        }
    }
    out.check_jacobians()?;
    Ok(out)
}

pub fn apply_named(grid: &StructuredGrid, t: &Transformation) -> Result<StructuredGrid> {
    match t {
        Transformation::Identity => Ok(grid.clone()),
        Transformation::Scale(s) => {
            let s = *s;
            apply_transformation(grid, move |p| [p[0] * s[0], p[1] * s[1], p[2] * s[2]])
        }
        Transformation::ZGrade { bias } => {
            let tables: Vec<(f64, f64, Vec<f64>)> = grid
                .layer_bounds()
                .windows(2)
                .zip(grid.layer_elements())
                .map(|(b, &n)| (b[0], b[1], graded_positions(n, *bias)))
                .collect();
            apply_transformation(grid, move |p| [p[0], p[1], grade_z(&tables, p[2])])
        }
        Transformation::Bend { radius } => {
            let r = *radius;
            apply_transformation(grid, move |p| {
                let phi = p[0] / r;
                let rho = r + p[2];
                [rho * phi.sin(), p[1], rho * phi.cos() - r]
            })
        }
    }
}

/// Normalised sheet boundaries in `[0,1]` for `n` sheets graded symmetrically
/// toward both ends with largest/smallest ratio `bias`.
///
/// Each half holds `m = ceil(n/2)` sheets growing by `q = bias^(1/(m-1))`; for
/// odd `n` the central sheet is shared by both halves.
pub fn graded_positions(n: usize, bias: f64) -> Vec<f64> {
    let m = n.div_ceil(2);
    let sizes: Vec<f64> = if m <= 1 || bias == 1.0 {
        vec![1.0; n]
    } else {
        let q = bias.powf(1.0 / (m as f64 - 1.0));
        let half: Vec<f64> = (0..m).map(|i| q.powi(i as i32)).collect();
        let mut s = half.clone();
        let mirror_from = if n % 2 == 0 { m } else { m - 1 };
        s.extend(half[..mirror_from].iter().rev());
        s
    };
    let total: f64 = sizes.iter().sum();
    let mut pos = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    pos.push(0.0);
    for (i, h) in sizes.iter().enumerate() {
        acc += h;
        pos.push(if i + 1 == n { 1.0 } else { acc / total });
    }
    pos
}

fn grade_z(tables: &[(f64, f64, Vec<f64>)], z: f64) -> f64 {
    for (z0, z1, g) in tables {
        if z <= *z1 + 1e-12 * (z1 - z0) {
            let n = g.len() - 1;
            let t = ((z - z0) / (z1 - z0) * n as f64).clamp(0.0, n as f64);
            let i = (t.floor() as usize).min(n - 1);
            let f = t - i as f64;
            return z0 + (z1 - z0) * (g[i] + f * (g[i + 1] - g[i]));
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::basis::ElementType;
    use crate::mesh::{build_layer_cake, GridSpec, Layer};

    fn plate() -> StructuredGrid {
        let spec = GridSpec {
            extents: [4.0, 2.0],
            cells: [4, 2],
            layers: vec![
                Layer {
                    region_id: 0,
                    thickness: 1.0,
                    elements: 8,
                },
                Layer {
                    region_id: 1,
                    thickness: 0.5,
                    elements: 7,
                },
            ],
            element_type: ElementType::Hex8,
        };
        build_layer_cake(&spec).unwrap()
    }

    #[test]
    fn identity_leaves_grid_unchanged() {
        let g = plate();
        let h = apply_named(&g, &Transformation::Identity).unwrap();
        assert_eq!(g.nodes(), h.nodes());
    }

    #[test]
    fn scaling_doubles_edges() {
        let g = plate();
        let h = apply_named(&g, &Transformation::Scale([2.0; 3])).unwrap();
        assert_eq!(h.n_cells(), g.n_cells());
        for c in 0..g.n_cells() {
            let a = g.cell_coords(c);
            let b = h.cell_coords(c);
            let la = (0..3).map(|d| (a[1][d] - a[0][d]).powi(2)).sum::<f64>().sqrt();
            let lb = (0..3).map(|d| (b[1][d] - b[0][d]).powi(2)).sum::<f64>().sqrt();
            assert!((lb - 2.0 * la).abs() < 1e-14);
        }
    }

    #[test]
    fn zgrade_ratio_matches_bias_in_every_layer() {
        let g = plate();
        let h = apply_named(&g, &Transformation::ZGrade { bias: 10.0 }).unwrap();
        let mut planes: Vec<f64> = h.nodes().iter().map(|p| p[2]).collect();
        planes.sort_by(f64::total_cmp);
        planes.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let (first, second) = planes.split_at(9);
        for layer in [first.to_vec(), {
            let mut v = vec![first[8]];
            v.extend_from_slice(second);
            v
        }] {
            let sizes: Vec<f64> = layer.windows(2).map(|w| w[1] - w[0]).collect();
            let max = sizes.iter().cloned().fold(0.0, f64::max);
            let min = sizes.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((max / min - 10.0).abs() < 1e-9, "ratio {}", max / min);
        }
        assert!((planes.last().unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn bend_keeps_jacobians_positive() {
        let g = plate();
        let h = apply_named(&g, &Transformation::Bend { radius: 5.0 }).unwrap();
        assert_eq!(h.n_nodes(), g.n_nodes());
    }

    #[test]
    fn folding_map_is_rejected() {
        let g = plate();
        let r = apply_transformation(&g, |p| [-p[0], p[1], p[2]]);
        assert!(matches!(r, Err(Error::DegenerateJacobian { .. })));
    }

    #[test]
    fn parse_round_trip() {
        for t in [
            Transformation::Identity,
            Transformation::Scale([1.0, 2.0, 3.0]),
            Transformation::ZGrade { bias: 10.0 },
            Transformation::Bend { radius: 6.6 },
        ] {
            assert_eq!(t.to_string().parse::<Transformation>().unwrap(), t);
        }
    }
}
