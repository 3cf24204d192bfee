//! Krylov solvers and the direct factorization used for subdomain and coarse
//! solves.
//!
//! [`pcg`] is the workhorse for symmetric positive definite systems with a fixed
//! preconditioner and also estimates the condition number of the preconditioned
//! operator from its CG coefficients. [`fgmres`] accepts a preconditioner that may
//! change from one iteration to the next (for example an inexact coarse solve).

mod fgmres;
mod ldlt;
mod operator;
mod pcg;
mod tridiag;

pub use fgmres::{fgmres, FgmresOptions};
pub use ldlt::{factorize, LdlFactorization};
pub use operator::{FnOperator, IdentityOperator, LinearOperator};
pub use pcg::{pcg, PcgOptions};
pub use tridiag::tridiagonal_extreme_eigenvalues;

use std::io::Write;

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual after each iteration, in the norm used for the stopping test.
    pub residual_history: Vec<f64>,
    /// Relative unpreconditioned 2-norm residual after each iteration.
    pub unpreconditioned_history: Vec<f64>,
    /// Lanczos estimate of `λmax/λmin` of the preconditioned operator (CG only).
    pub condition_estimate: Option<f64>,
    pub extreme_eigenvalues: Option<(f64, f64)>,
    pub converged: bool,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    /// Residual history as CSV: `iteration,rel_residual`.
    pub fn write_history_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iteration,rel_residual")?;
        for (i, r) in self.residual_history.iter().enumerate() {
            writeln!(w, "{},{:.10e}", i + 1, r)?;
        }
        Ok(())
    }
}
