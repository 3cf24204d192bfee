use std::fmt::Write as _;
use std::io::Write;

/// One solve of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n_subdomains: usize,
    pub shape: [usize; 3],
    pub precond: String,
    pub iterations: usize,
    pub kappa: Option<f64>,
    pub coarse_dim: usize,
    pub t_setup: f64,
    pub t_iterate: f64,
    pub qoi: f64,
}

impl ReportRow {
    /// File-name stem for the row's artifacts.
    pub fn label(&self) -> String {
        format!("{}x{}x{}_{}", self.shape[0], self.shape[1], self.shape[2], self.precond)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StudyReport {
    pub rows: Vec<ReportRow>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.6e}"))
}

impl StudyReport {
    pub const HEADER: &'static str = "N,precond,iters,kappa,dimVH,t_setup,t_iterate,qoi";

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::HEADER)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{:.3},{:.3},{:.10e}",
                r.n_subdomains,
                r.precond,
                r.iterations,
                fmt_opt(r.kappa),
                r.coarse_dim,
                r.t_setup,
                r.t_iterate,
                r.qoi
            )?;
        }
        Ok(())
    }

    /// Aligned table for the terminal.
    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:>5} {:>7} {:>6} {:>12} {:>6} {:>9} {:>9} {:>14}\n",
            "N", "precond", "iters", "kappa", "dimVH", "setup[s]", "iter[s]", "qoi"
        );
        for r in &self.rows {
            let kappa = r.kappa.map_or("-".to_string(), |k| format!("{k:.1}"));
            let _ = writeln!(
                s,
                "{:>5} {:>7} {:>6} {:>12} {:>6} {:>9.2} {:>9.2} {:>14.6e}",
                r.n_subdomains, r.precond, r.iterations, kappa, r.coarse_dim, r.t_setup, r.t_iterate, r.qoi
            );
        }
        s
    }

    /// Report with the wall-time columns zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| ReportRow {
                    t_setup: 0.0,
                    t_iterate: 0.0,
                    ..r.clone()
                })
                .collect(),
        }
    }
}
