use nalgebra::{Matrix3, Matrix6, SymmetricEigen};

use crate::error::{Error, Result};

/// Nine engineering constants of an orthotropic material (moduli in MPa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthotropicParams {
    pub e11: f64,
    pub e22: f64,
    pub e33: f64,
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
    pub nu12: f64,
    pub nu13: f64,
    pub nu23: f64,
}

impl OrthotropicParams {
    /// Unidirectional carbon/epoxy ply used by the plate examples.
    pub fn reference_ply() -> Self {
        Self {
            e11: 162_000.0,
            e22: 10_000.0,
            e33: 10_000.0,
            g12: 5_200.0,
            g13: 5_200.0,
            g23: 3_500.0,
            nu12: 0.35,
            nu13: 0.35,
            nu23: 0.5,
        }
    }

    /// Orthotropic parameters of an isotropic material.
    pub fn isotropic(e: f64, nu: f64) -> Self {
        let g = e / (2.0 * (1.0 + nu));
        Self {
            e11: e,
            e22: e,
            e33: e,
            g12: g,
            g13: g,
            g23: g,
            nu12: nu,
            nu13: nu,
            nu23: nu,
        }
    }

    /// Compliance in Voigt order (11,22,33,23,13,12) with engineering shear strains.
    pub fn compliance(&self) -> Matrix6<f64> {
        let mut s = Matrix6::zeros();
        s[(0, 0)] = 1.0 / self.e11;
        s[(1, 1)] = 1.0 / self.e22;
        s[(2, 2)] = 1.0 / self.e33;
        s[(0, 1)] = -self.nu12 / self.e11;
        s[(0, 2)] = -self.nu13 / self.e11;
        s[(1, 2)] = -self.nu23 / self.e22;
        s[(1, 0)] = s[(0, 1)];
        s[(2, 0)] = s[(0, 2)];
        s[(2, 1)] = s[(1, 2)];
        s[(3, 3)] = 1.0 / self.g23;
        s[(4, 4)] = 1.0 / self.g13;
        s[(5, 5)] = 1.0 / self.g12;
        s
    }
}

/// Symmetric 6×6 elasticity matrix in Voigt order (11,22,33,23,13,12), MPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessMatrix(pub Matrix6<f64>);

impl StiffnessMatrix {
    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn max_asymmetry(&self) -> f64 {
        (self.0 - self.0.transpose()).abs().max()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Eigenvalues of the tensor in Mandel form (shear rows and columns scaled
    /// by √2), which are invariant under rotation.
    pub fn mandel_eigenvalues(&self) -> Vec<f64> {
        let mut m = self.0;
        let r2 = std::f64::consts::SQRT_2;
        for i in 0..6 {
            for j in 0..6 {
                let fi = if i >= 3 { r2 } else { 1.0 };
                let fj = if j >= 3 { r2 } else { 1.0 };
                m[(i, j)] *= fi * fj;
            }
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.cholesky().is_some()
    }
}

pub fn orthotropic_stiffness(p: &OrthotropicParams) -> Result<StiffnessMatrix> {
    let all = [p.e11, p.e22, p.e33, p.g12, p.g13, p.g23];
    if all.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("orthotropic moduli must be positive"));
    }
    let s = p.compliance();
    if s.cholesky().is_none() {
        return Err(Error::invalid(
            "orthotropic compliance is not positive definite (inadmissible Poisson ratios)",
        ));
    }
    let c = s
        .try_inverse()
        .ok_or_else(|| Error::invalid("orthotropic compliance is singular"))?;
    Ok(StiffnessMatrix(0.5 * (c + c.transpose())))
}

/// Lamé parameters `(λ, μ)`.
pub fn lame(e: f64, nu: f64) -> (f64, f64) {
    (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
}

pub fn isotropic_stiffness(e: f64, nu: f64) -> Result<StiffnessMatrix> {
    if !(e > 0.0) {
        return Err(Error::invalid("Young's modulus must be positive"));
    }
    if !(nu > -1.0 && nu < 0.5) {
        return Err(Error::invalid(format!("Poisson ratio {nu} outside (-1, 0.5)")));
    }
    let (l, m) = lame(e, nu);
    let mut c = Matrix6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            c[(i, j)] = l;
        }
        c[(i, i)] = l + 2.0 * m;
        c[(i + 3, i + 3)] = m;
    }
    Ok(StiffnessMatrix(c))
}

const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

/// Stress transformation `σ' = T σ` in Voigt form for the rotation `q`
/// (`x' = q x`).
pub fn stress_rotation(q: &Matrix3<f64>) -> Matrix6<f64> {
    let mut t = Matrix6::zeros();
    for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
        for (b, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
            t[(a, b)] = q[(i, k)] * q[(j, l)] + if k != l { q[(i, l)] * q[(j, k)] } else { 0.0 };
        }
    }
    t
}

/// Rotation by `theta_deg` about the z axis (material axis 1 at angle θ from x).
pub fn rotation_z(theta_deg: f64) -> Matrix3<f64> {
    let (s, c) = theta_deg.to_radians().sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Expresses a material-frame stiffness in the global frame for a ply whose
/// fibre direction makes angle `theta_deg` with the x axis.
pub fn rotate_stiffness(c: &StiffnessMatrix, theta_deg: f64) -> StiffnessMatrix {
    let t = stress_rotation(&rotation_z(theta_deg));
    let r = t * c.0 * t.transpose();
    StiffnessMatrix(0.5 * (r + r.transpose()))
}

/// Global-frame Voigt stress expressed in the material frame of a ply at `theta_deg`.
pub fn stress_to_material_frame(sigma: &[f64; 6], theta_deg: f64) -> [f64; 6] {
    let t = stress_rotation(&rotation_z(theta_deg).transpose());
    let s = t * nalgebra::Vector6::from_column_slice(sigma);
    [s[0], s[1], s[2], s[3], s[4], s[5]]
}
