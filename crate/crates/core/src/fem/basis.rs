//! Reference-cell shape functions for the trilinear and 20-node serendipity
//! hexahedra. Node ordering follows VTK: corners 0-7, bottom edge midpoints
//! 8-11, top edge midpoints 12-15, vertical edge midpoints 16-19.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementType {
    Hex8,
    Serendipity20,
}

const HEX8_NODES: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

const SER20_NODES: [[f64; 3]; 20] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [0.0, -1.0, -1.0],
    [1.0, 0.0, -1.0],
    [0.0, 1.0, -1.0],
    [-1.0, 0.0, -1.0],
    [0.0, -1.0, 1.0],
    [1.0, 0.0, 1.0],
    [0.0, 1.0, 1.0],
    [-1.0, 0.0, 1.0],
    [-1.0, -1.0, 0.0],
    [1.0, -1.0, 0.0],
    [1.0, 1.0, 0.0],
    [-1.0, 1.0, 0.0],
];

impl ElementType {
    pub fn n_nodes(self) -> usize {
        match self {
            ElementType::Hex8 => 8,
            ElementType::Serendipity20 => 20,
        }
    }

    pub fn reference_nodes(self) -> &'static [[f64; 3]] {
        match self {
            ElementType::Hex8 => &HEX8_NODES,
            ElementType::Serendipity20 => &SER20_NODES,
        }
    }

    /// Gauss points per direction for full integration of the stiffness.
    pub fn full_integration_order(self) -> usize {
        match self {
            ElementType::Hex8 => 2,
            ElementType::Serendipity20 => 3,
        }
    }

    /// Spacing of corner nodes on the integer node lattice (1 for linear, 2 for quadratic).
    pub fn lattice_step(self) -> usize {
        match self {
            ElementType::Hex8 => 1,
            ElementType::Serendipity20 => 2,
        }
    }

    /// VTK cell type id.
    pub fn vtk_cell_type(self) -> u8 {
        match self {
            ElementType::Hex8 => 12,
            ElementType::Serendipity20 => 25,
        }
    }

    /// Shape values and reference gradients at `xi`, written into the output slices.
    pub fn evaluate_into(self, xi: [f64; 3], values: &mut [f64], grads: &mut [[f64; 3]]) {
        let nodes = self.reference_nodes();
        let [x, y, z] = xi;
        match self {
            ElementType::Hex8 => {
                for (a, n) in nodes.iter().enumerate() {
                    let fx = 1.0 + x * n[0];
                    let fy = 1.0 + y * n[1];
                    let fz = 1.0 + z * n[2];
                    values[a] = 0.125 * fx * fy * fz;
                    grads[a] = [0.125 * n[0] * fy * fz, 0.125 * fx * n[1] * fz, 0.125 * fx * fy * n[2]];
                }
            }
            ElementType::Serendipity20 => {
                for (a, n) in nodes.iter().enumerate() {
                    let zero_axis = n.iter().position(|c| *c == 0.0);
                    match zero_axis {
                        None => {
                            let fx = 1.0 + x * n[0];
                            let fy = 1.0 + y * n[1];
                            let fz = 1.0 + z * n[2];
                            let s = x * n[0] + y * n[1] + z * n[2] - 2.0;
                            values[a] = 0.125 * fx * fy * fz * s;
                            grads[a] = [
                                0.125 * n[0] * fy * fz * (s + fx),
                                0.125 * n[1] * fx * fz * (s + fy),
                                0.125 * n[2] * fx * fy * (s + fz),
                            ];
                        }
                        Some(d) => {
                            let mut f = [0.0; 3];
                            for e in 0..3 {
                                f[e] = if e == d {
                                    1.0 - xi[e] * xi[e]
                                } else {
                                    1.0 + xi[e] * n[e]
                                };
                            }
                            values[a] = 0.25 * f[0] * f[1] * f[2];
                            let mut g = [0.0; 3];
                            for e in 0..3 {
                                let de = if e == d { -2.0 * xi[e] } else { n[e] };
                                let mut p = 0.25 * de;
                                for o in 0..3 {
                                    if o != e {
                                        p *= f[o];
                                    }
                                }
                                g[e] = p;
                            }
                            grads[a] = g;
                        }
                    }
                }
            }
        }
    }

    /// Shape values and reference gradients; rejects points outside the reference cube.
    pub fn shape_basis(self, xi: [f64; 3]) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
        if xi.iter().any(|c| !(c.abs() <= 1.0 + 1e-12)) {
            return Err(Error::invalid(format!("reference point {xi:?} lies outside [-1,1]^3")));
        }
        let n = self.n_nodes();
        let mut v = vec![0.0; n];
        let mut g = vec![[0.0; 3]; n];
        self.evaluate_into(xi, &mut v, &mut g);
        Ok((v, g))
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementType::Hex8 => "hex8",
            ElementType::Serendipity20 => "serendipity20",
        })
    }
}

impl FromStr for ElementType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hex8" | "q1" | "trilinear" => Ok(ElementType::Hex8),
            "serendipity20" | "hex20" | "ser20" | "serendipity" => Ok(ElementType::Serendipity20),
            other => Err(Error::invalid(format!("unknown element type '{other}'"))),
        }
    }
}

/// Jacobian `J[i][k] = ∂x_i/∂ξ_k` at a point, its determinant and inverse.
pub fn jacobian(coords: &[[f64; 3]], ref_grads: &[[f64; 3]]) -> ([[f64; 3]; 3], f64, [[f64; 3]; 3]) {
    let mut j = [[0.0; 3]; 3];
    for (x, g) in coords.iter().zip(ref_grads) {
        for i in 0..3 {
            for k in 0..3 {
                j[i][k] += x[i] * g[k];
            }
        }
    }
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    let inv_det = 1.0 / det;
    let inv = [
        [
            (j[1][1] * j[2][2] - j[1][2] * j[2][1]) * inv_det,
            (j[0][2] * j[2][1] - j[0][1] * j[2][2]) * inv_det,
            (j[0][1] * j[1][2] - j[0][2] * j[1][1]) * inv_det,
        ],
        [
            (j[1][2] * j[2][0] - j[1][0] * j[2][2]) * inv_det,
            (j[0][0] * j[2][2] - j[0][2] * j[2][0]) * inv_det,
            (j[0][2] * j[1][0] - j[0][0] * j[1][2]) * inv_det,
        ],
        [
            (j[1][0] * j[2][1] - j[1][1] * j[2][0]) * inv_det,
            (j[0][1] * j[2][0] - j[0][0] * j[2][1]) * inv_det,
            (j[0][0] * j[1][1] - j[0][1] * j[1][0]) * inv_det,
        ],
    ];
    (j, det, inv)
}

/// Physical gradients `∇N_a = J⁻ᵀ ∇_ξ N_a`.
pub fn physical_gradients(ref_grads: &[[f64; 3]], inv_j: &[[f64; 3]; 3], out: &mut [[f64; 3]]) {
    for (g, o) in ref_grads.iter().zip(out.iter_mut()) {
        for i in 0..3 {
            o[i] = g[0] * inv_j[0][i] + g[1] * inv_j[1][i] + g[2] * inv_j[2][i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TYPES: [ElementType; 2] = [ElementType::Hex8, ElementType::Serendipity20];

    #[test]
    fn hex8_center_values_are_one_eighth() {
        let (v, _) = ElementType::Hex8.shape_basis([0.0; 3]).unwrap();
        assert!(v.iter().all(|x| (x - 0.125).abs() < 1e-15));
    }

    #[test]
    fn kronecker_property_at_nodes() {
        for t in TYPES {
            for (a, node) in t.reference_nodes().iter().enumerate() {
                let (v, _) = t.shape_basis(*node).unwrap();
                for (b, vb) in v.iter().enumerate() {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((vb - expect).abs() < 1e-14, "{t} node {a} fn {b}: {vb}");
                }
            }
        }
    }

    #[test]
    fn out_of_range_point_is_rejected() {
        assert!(ElementType::Hex8.shape_basis([1.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn gradients_match_central_differences() {
        let pts = [
            [0.1, -0.3, 0.7],
            [-0.8, 0.2, 0.05],
            [0.55, 0.55, -0.4],
            [-0.1, 0.9, 0.3],
            [0.33, -0.66, -0.99],
        ];
        let h = 1e-6;
        for t in TYPES {
            for p in pts {
                let (_, g) = t.shape_basis(p).unwrap();
                for k in 0..3 {
                    let mut pp = p;
                    let mut pm = p;
                    pp[k] += h;
                    pm[k] -= h;
                    let (vp, _) = t.shape_basis(pp).unwrap();
                    let (vm, _) = t.shape_basis(pm).unwrap();
                    for a in 0..t.n_nodes() {
                        let fd = (vp[a] - vm[a]) / (2.0 * h);
                        assert!((fd - g[a][k]).abs() < 1e-8, "{t} a={a} k={k}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity_and_zero_gradient_sum(
            x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0
        ) {
            for t in TYPES {
                let (v, g) = t.shape_basis([x, y, z]).unwrap();
                prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
                for k in 0..3 {
                    prop_assert!(g.iter().map(|gi| gi[k]).sum::<f64>().abs() < 1e-13);
                }
            }
        }

        #[test]
        fn linear_fields_are_interpolated_exactly(
            x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
            c in prop::array::uniform4(-3.0f64..3.0)
        ) {
            for t in TYPES {
                let (v, _) = t.shape_basis([x, y, z]).unwrap();
                let interp: f64 = t.reference_nodes().iter().zip(&v)
                    .map(|(n, vi)| vi * (c[0] + c[1] * n[0] + c[2] * n[1] + c[3] * n[2]))
                    .sum();
                let exact = c[0] + c[1] * x + c[2] * y + c[3] * z;
                prop_assert!((interp - exact).abs() < 1e-12);
            }
        }
    }
}
