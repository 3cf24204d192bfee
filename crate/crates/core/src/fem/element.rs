use nalgebra::{DMatrix, Matrix6};

use super::basis::{jacobian, physical_gradients, ElementType};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};

/// Shape values and reference gradients tabulated at the points of a rule.
#[derive(Debug, Clone)]
pub struct ElementTables {
    pub element_type: ElementType,
    pub rule: QuadratureRule,
    pub values: Vec<Vec<f64>>,
    pub ref_grads: Vec<Vec<[f64; 3]>>,
}

impl ElementTables {
    pub fn new(element_type: ElementType, order: usize) -> Result<Self> {
        Self::with_rule(element_type, QuadratureRule::hex(order)?)
    }

    /// Full Gauss integration (2³ for trilinear, 3³ for serendipity cells).
    pub fn full(element_type: ElementType) -> Result<Self> {
        Self::new(element_type, element_type.full_integration_order())
    }

    pub fn with_rule(element_type: ElementType, rule: QuadratureRule) -> Result<Self> {
        let n = element_type.n_nodes();
        let mut values = Vec::with_capacity(rule.len());
        let mut ref_grads = Vec::with_capacity(rule.len());
        for p in &rule.points {
            let mut v = vec![0.0; n];
            let mut g = vec![[0.0; 3]; n];
            element_type.evaluate_into(*p, &mut v, &mut g);
            values.push(v);
            ref_grads.push(g);
        }
        Ok(Self {
            element_type,
            rule,
            values,
            ref_grads,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.element_type.n_nodes()
    }
}

fn degenerate(det: f64) -> Error {
    Error::DegenerateJacobian { cell: usize::MAX, det }
}

/// `∫ B(v)ᵀ C B(u) dx` for linear elasticity, returned as a dense
/// `(3n)×(3n)` matrix with dofs ordered node-major (`3a + i`).
///
/// Strains use Voigt order (11,22,33,23,13,12) with engineering shear.
pub fn element_stiffness_elasticity(
    coords: &[[f64; 3]],
    c: &Matrix6<f64>,
    tables: &ElementTables,
) -> Result<DMatrix<f64>> {
    let n = tables.n_nodes();
    let mut k = vec![0.0; 9 * n * n];
    elasticity_into(coords, c, tables, &mut k)?;
    Ok(DMatrix::from_row_slice(3 * n, 3 * n, &k))
}

/// Row-major variant used by assembly.
pub(crate) fn elasticity_into(
    coords: &[[f64; 3]],
    c: &Matrix6<f64>,
    tables: &ElementTables,
    k: &mut [f64],
) -> Result<()> {
    let n = tables.n_nodes();
    let nd = 3 * n;
    k.iter_mut().for_each(|v| *v = 0.0);
    let mut g = vec![[0.0; 3]; n];
    let mut cb = vec![[[0.0; 3]; 6]; n];
    for (q, w) in tables.rule.weights.iter().enumerate() {
        let (_, det, inv) = jacobian(coords, &tables.ref_grads[q]);
        if !(det > 0.0) {
            return Err(degenerate(det));
        }
        physical_gradients(&tables.ref_grads[q], &inv, &mut g);
        let f = w * det;
        // C·B_b for every node b.
        for b in 0..n {
            let bm = strain_columns(&g[b]);
            for r in 0..6 {
                for col in 0..3 {
                    let mut s = 0.0;
                    for l in 0..6 {
                        s += c[(r, l)] * bm[l][col];
                    }
                    cb[b][r][col] = s;
                }
            }
        }
        for a in 0..n {
            let ba = strain_columns(&g[a]);
            for b in a..n {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut s = 0.0;
                        for r in 0..6 {
                            s += ba[r][i] * cb[b][r][j];
                        }
                        k[(3 * a + i) * nd + 3 * b + j] += f * s;
                    }
                }
            }
        }
    }
    for a in 0..nd {
        for b in 0..a {
            let na = a / 3;
            let nb = b / 3;
            if nb < na {
                k[a * nd + b] = k[b * nd + a];
            }
        }
    }
    // Diagonal node blocks were filled in full; symmetrise them exactly.
    for a in 0..n {
        for i in 0..3 {
            for j in 0..i {
                let r = 3 * a + i;
                let s = 3 * a + j;
                let v = 0.5 * (k[r * nd + s] + k[s * nd + r]);
                k[r * nd + s] = v;
                k[s * nd + r] = v;
            }
        }
    }
    Ok(())
}

/// Strain-displacement block of one node: row = Voigt strain, column = displacement component.
#[inline]
pub(crate) fn strain_columns(g: &[f64; 3]) -> [[f64; 3]; 6] {
    [
        [g[0], 0.0, 0.0],
        [0.0, g[1], 0.0],
        [0.0, 0.0, g[2]],
        [0.0, g[2], g[1]],
        [g[2], 0.0, g[0]],
        [g[1], g[0], 0.0],
    ]
}

/// `∫ ∇v · K ∇u dx` for a diagonal `K`, as a dense `n×n` matrix.
pub fn element_stiffness_diffusion(
    coords: &[[f64; 3]],
    kdiag: [f64; 3],
    tables: &ElementTables,
) -> Result<DMatrix<f64>> {
    let n = tables.n_nodes();
    let mut k = vec![0.0; n * n];
    diffusion_into(coords, kdiag, tables, &mut k)?;
    Ok(DMatrix::from_row_slice(n, n, &k))
}

pub(crate) fn diffusion_into(
    coords: &[[f64; 3]],
    kdiag: [f64; 3],
    tables: &ElementTables,
    k: &mut [f64],
) -> Result<()> {
    let n = tables.n_nodes();
    k.iter_mut().for_each(|v| *v = 0.0);
    let mut g = vec![[0.0; 3]; n];
    for (q, w) in tables.rule.weights.iter().enumerate() {
        let (_, det, inv) = jacobian(coords, &tables.ref_grads[q]);
        if !(det > 0.0) {
            return Err(degenerate(det));
        }
        physical_gradients(&tables.ref_grads[q], &inv, &mut g);
        let f = w * det;
        for a in 0..n {
            for b in a..n {
                let s = kdiag[0] * g[a][0] * g[b][0] + kdiag[1] * g[a][1] * g[b][1] + kdiag[2] * g[a][2] * g[b][2];
                k[a * n + b] += f * s;
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            k[a * n + b] = k[b * n + a];
        }
    }
    Ok(())
}

/// Physical coordinates of a reference point.
pub fn map_point(coords: &[[f64; 3]], values: &[f64]) -> [f64; 3] {
    let mut x = [0.0; 3];
    for (c, v) in coords.iter().zip(values) {
        for d in 0..3 {
            x[d] += v * c[d];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{isotropic_stiffness, orthotropic_stiffness, rotate_stiffness, OrthotropicParams};
    use nalgebra::DVector;

    fn cube(et: ElementType) -> Vec<[f64; 3]> {
        et.reference_nodes()
            .iter()
            .map(|r| [0.5 * (r[0] + 1.0), 0.5 * (r[1] + 1.0), 0.5 * (r[2] + 1.0)])
            .collect()
    }

    fn stretched(et: ElementType) -> Vec<[f64; 3]> {
        // Trilinear image of a distorted brick; serendipity edge nodes sit on it.
        let corners = [
            [0.0, 0.0, 0.0],
            [2.1, 0.2, 0.1],
            [2.3, 1.4, -0.1],
            [0.1, 1.1, 0.05],
            [0.05, -0.1, 0.7],
            [2.0, 0.1, 0.9],
            [2.4, 1.3, 0.8],
            [-0.1, 1.2, 0.75],
        ];
        let lin = ElementType::Hex8;
        et.reference_nodes()
            .iter()
            .map(|r| {
                let (v, _) = lin.shape_basis(*r).unwrap();
                map_point(&corners, &v)
            })
            .collect()
    }

    fn kernel_dim(k: &DMatrix<f64>) -> usize {
        let ev = k.clone().symmetric_eigenvalues();
        let max = ev.iter().cloned().fold(0.0, f64::max);
        ev.iter().filter(|v| v.abs() < 1e-10 * max).count()
    }

    fn rigid_modes(coords: &[[f64; 3]]) -> Vec<DVector<f64>> {
        let n = coords.len();
        let mut modes = Vec::new();
        for d in 0..3 {
            let mut v = DVector::zeros(3 * n);
            for a in 0..n {
                v[3 * a + d] = 1.0;
            }
            modes.push(v);
        }
        for axis in 0..3 {
            let mut v = DVector::zeros(3 * n);
            for (a, x) in coords.iter().enumerate() {
                let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
                v[3 * a + i] = -x[j];
                v[3 * a + j] = x[i];
            }
            modes.push(v);
        }
        modes
    }

    #[test]
    fn rigid_modes_are_in_the_kernel() {
        let c = isotropic_stiffness(10.0, 0.3).unwrap();
        for et in [ElementType::Hex8, ElementType::Serendipity20] {
            let x = cube(et);
            let k = element_stiffness_elasticity(&x, &c.0, &ElementTables::full(et).unwrap()).unwrap();
            let kn = k.norm();
            for (m, u) in rigid_modes(&x).iter().enumerate() {
                let r = (&k * u).norm();
                let tol = if m < 3 { 1e-10 } else { 1e-9 };
                assert!(r < tol * kn, "{et} mode {m}: {r}");
            }
            assert_eq!(kernel_dim(&k), 6, "{et}");
            assert!((&k - k.transpose()).abs().max() < 1e-14 * kn);
        }
    }

    #[test]
    fn over_integration_agrees_on_affine_cells() {
        let c = rotate_stiffness(
            &orthotropic_stiffness(&OrthotropicParams::reference_ply()).unwrap(),
            30.0,
        );
        for et in [ElementType::Hex8, ElementType::Serendipity20] {
            // Parallelepiped: constant Jacobian, so the integrand is polynomial.
            let x: Vec<[f64; 3]> = cube(et)
                .iter()
                .map(|p| {
                    [
                        2.0 * p[0] + 0.3 * p[1],
                        1.5 * p[1] + 0.2 * p[2],
                        0.5 * p[2] + 0.1 * p[0],
                    ]
                })
                .collect();
            let order = et.full_integration_order();
            let a = element_stiffness_elasticity(&x, &c.0, &ElementTables::new(et, order).unwrap()).unwrap();
            let b = element_stiffness_elasticity(&x, &c.0, &ElementTables::new(et, order + 1).unwrap()).unwrap();
            assert!((&a - &b).abs().max() < 1e-10 * b.abs().max(), "{et}");
        }
    }

    #[test]
    fn distorted_cell_remains_psd_with_six_rigid_modes() {
        let c = isotropic_stiffness(3.0, 0.25).unwrap();
        for et in [ElementType::Hex8, ElementType::Serendipity20] {
            let x = stretched(et);
            let k = element_stiffness_elasticity(&x, &c.0, &ElementTables::full(et).unwrap()).unwrap();
            assert_eq!(kernel_dim(&k), 6, "{et}");
            let ev = k.symmetric_eigenvalues();
            let max = ev.max();
            assert!(ev.iter().all(|v| *v > -1e-12 * max));
        }
    }

    #[test]
    fn laplace_unit_cube_reference_matrix() {
        let k = element_stiffness_diffusion(
            &cube(ElementType::Hex8),
            [1.0; 3],
            &ElementTables::full(ElementType::Hex8).unwrap(),
        )
        .unwrap();
        // Hand integration of ∇N_a·∇N_b on the unit cube: 1/3 on the diagonal,
        // 0 across a face edge, -1/12 across a face diagonal, -1/12 across the body diagonal.
        let nodes = ElementType::Hex8.reference_nodes();
        for a in 0..8 {
            for b in 0..8 {
                let diff = (0..3).filter(|&d| nodes[a][d] != nodes[b][d]).count();
                let expect = match diff {
                    0 => 1.0 / 3.0,
                    1 => 0.0,
                    _ => -1.0 / 12.0,
                };
                assert!((k[(a, b)] - expect).abs() < 1e-14, "{a},{b}: {}", k[(a, b)]);
            }
        }
    }

    #[test]
    fn diffusion_kernel_and_linearity() {
        for et in [ElementType::Hex8, ElementType::Serendipity20] {
            let x = stretched(et);
            let t = ElementTables::full(et).unwrap();
            let k = element_stiffness_diffusion(&x, [1.0, 2.0, 0.5], &t).unwrap();
            let ones = DVector::from_element(et.n_nodes(), 1.0);
            assert!((&k * ones).norm() < 1e-12 * k.norm());
            let k10 = element_stiffness_diffusion(&x, [10.0, 20.0, 5.0], &t).unwrap();
            assert!((&k10 - &k * 10.0).abs().max() <= 1e-13 * k10.abs().max());
            assert_eq!(kernel_dim(&k), 1);
        }
    }

    #[test]
    fn inverted_cell_is_rejected() {
        let mut x = cube(ElementType::Hex8);
        x.swap(0, 6);
        let r = element_stiffness_diffusion(&x, [1.0; 3], &ElementTables::full(ElementType::Hex8).unwrap());
        assert!(matches!(r, Err(Error::DegenerateJacobian { .. })));
    }
}
