//! Run configuration: a flat `key = value` file with `#` comments, plus
//! overrides given in the same syntax on the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use geneo::fem::ElementType;
use geneo::geneo::CoarseKind;

use crate::synthetic::Pattern;
use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Clamped laminate, reports the largest vertical displacement.
    Plate1a,
    /// Clamped laminate, reports the interlaminar failure load.
    Plate1b,
    Spe10,
    SyntheticContrast,
}

impl FromStr for ProblemKind {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s {
            "plate_1a" => Ok(Self::Plate1a),
            "plate_1b" => Ok(Self::Plate1b),
            "spe10" => Ok(Self::Spe10),
            "synthetic_contrast" => Ok(Self::SyntheticContrast),
            _ => Err(RunError::Config(format!("unknown problem '{s}'"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plate1a => "plate_1a",
            Self::Plate1b => "plate_1b",
            Self::Spe10 => "spe10",
            Self::SyntheticContrast => "synthetic_contrast",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    /// Unpreconditioned Krylov iteration.
    Identity,
    Schwarz(CoarseKind),
}

impl FromStr for Preconditioner {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(Self::Identity);
        }
        s.parse::<CoarseKind>()
            .map(Self::Schwarz)
            .map_err(|e| RunError::Config(e.to_string()))
    }
}

impl fmt::Display for Preconditioner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("none"),
            Self::Schwarz(k) => k.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Pcg,
    Fgmres,
}

impl FromStr for SolverKind {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s {
            "pcg" | "cg" => Ok(Self::Pcg),
            "fgmres" => Ok(Self::Fgmres),
            _ => Err(RunError::Config(format!("unknown solver '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub element: ElementType,
    /// Plate only: in-plane cell counts are multiplied by `2^refinement`.
    pub refinement: u32,
    /// One run per partition shape and preconditioner.
    pub partitions: Vec<[usize; 3]>,
    pub overlap: usize,
    pub preconditioners: Vec<Preconditioner>,
    pub rho: f64,
    /// `None` uses the trace-based default shift.
    pub shift: Option<f64>,
    pub k_max: usize,
    pub solver: SolverKind,
    pub tol: f64,
    pub max_it: usize,
    pub restart: usize,
    pub output: PathBuf,
    /// 0 lets the thread pool decide.
    pub workers: usize,
    /// Plate pressure in MPa.
    pub pressure: f64,
    /// Synthetic field size, cells per axis.
    pub cells: [usize; 3],
    pub contrast: f64,
    pub pattern: Pattern,
    pub seed: u64,
    /// SPE10 file; falls back to the `GENEO_SPE10` environment variable.
    pub spe10_path: Option<PathBuf>,
    pub stride: usize,
    pub source: f64,
    /// Write VTK output.
    pub vtk: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Plate1b,
            element: ElementType::Hex8,
            refinement: 0,
            partitions: vec![[4, 1, 1]],
            overlap: 1,
            preconditioners: vec![Preconditioner::Schwarz(CoarseKind::Geneo)],
            rho: 1.0,
            shift: None,
            k_max: 20,
            solver: SolverKind::Pcg,
            tol: 1e-5,
            max_it: 1000,
            restart: 100,
            output: PathBuf::from("out"),
            workers: 0,
            pressure: geneo::problems::PLATE_PRESSURE,
            cells: [35, 35, 35],
            contrast: 1e6,
            pattern: Pattern::Layers,
            seed: 1,
            spe10_path: None,
            stride: 4,
            source: 1.0,
            vtk: true,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, RunError> {
    v.parse()
        .map_err(|_| RunError::Config(format!("{key}: cannot parse '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, RunError> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(RunError::Config(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

/// `4x2x1`, or a bare count `4` meaning `4x1x1`.
pub fn parse_shape(v: &str) -> Result<[usize; 3], RunError> {
    let parts: Vec<&str> = v.split('x').map(str::trim).collect();
    let mut shape = [1usize; 3];
    if parts.is_empty() || parts.len() > 3 {
        return Err(RunError::Config(format!("bad shape '{v}'")));
    }
    for (s, p) in shape.iter_mut().zip(&parts) {
        *s = parse_num("shape", p)?;
        if *s == 0 {
            return Err(RunError::Config(format!("bad shape '{v}': zero extent")));
        }
    }
    Ok(shape)
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        let v = value.trim();
        match key.trim() {
            "problem" => self.problem = v.parse()?,
            "element" => self.element = v.parse().map_err(|e: geneo::Error| RunError::Config(e.to_string()))?,
            "refinement" => self.refinement = parse_num(key, v)?,
            "partition" | "partitions" => self.partitions = list(v).map(parse_shape).collect::<Result<_, _>>()?,
            "overlap" => self.overlap = parse_num(key, v)?,
            "preconditioner" | "preconditioners" => {
                self.preconditioners = list(v).map(str::parse).collect::<Result<_, _>>()?
            }
            "rho" => self.rho = parse_num(key, v)?,
            "shift" => {
                self.shift = if v == "auto" { None } else { Some(parse_num(key, v)?) };
            }
            "k_max" => self.k_max = parse_num(key, v)?,
            "solver" => self.solver = v.parse()?,
            "tol" => self.tol = parse_num(key, v)?,
            "max_it" => self.max_it = parse_num(key, v)?,
            "restart" => self.restart = parse_num(key, v)?,
            "output" => self.output = PathBuf::from(v),
            "workers" => self.workers = parse_num(key, v)?,
            "pressure" => self.pressure = parse_num(key, v)?,
            "cells" => self.cells = parse_shape(v).map(|s| if v.contains('x') { s } else { [s[0]; 3] })?,
            "contrast" => self.contrast = parse_num(key, v)?,
            "pattern" => self.pattern = v.parse()?,
            "seed" => self.seed = parse_num(key, v)?,
            "spe10_path" => self.spe10_path = Some(PathBuf::from(v)),
            "stride" => self.stride = parse_num(key, v)?,
            "source" => self.source = parse_num(key, v)?,
            "vtk" => self.vtk = parse_bool(key, v)?,
            other => return Err(RunError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key=value` string.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), RunError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| RunError::Config(format!("expected key=value, got '{assignment}'")))?;
        self.set(k, v)
    }

    pub fn parse(text: &str) -> Result<Self, RunError> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.apply_override(line)
                .map_err(|e| RunError::Config(format!("line {}: {}", i + 1, e.message())))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: &str| Err(RunError::Config(m.to_string()));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("tol must lie in (0, 1)");
        }
        if self.max_it == 0 {
            return bad("max_it must be positive");
        }
        if self.partitions.is_empty() || self.preconditioners.is_empty() {
            return bad("at least one partition and one preconditioner are required");
        }
        let schwarz = self
            .preconditioners
            .iter()
            .any(|p| matches!(p, Preconditioner::Schwarz(_)));
        if schwarz && self.overlap == 0 {
            return bad("Schwarz preconditioners need overlap >= 1");
        }
        if !(self.rho > 0.0) {
            return bad("rho must be positive");
        }
        if let Some(s) = self.shift {
            if !(s < 0.0) {
                return bad("shift must be negative");
            }
        }
        if !(self.contrast >= 1.0) {
            return bad("contrast must be >= 1");
        }
        if self.stride == 0 || self.restart == 0 {
            return bad("stride and restart must be positive");
        }
        if self.cells.contains(&0) {
            return bad("cells must be positive");
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let shapes: Vec<String> = self
            .partitions
            .iter()
            .map(|s| format!("{}x{}x{}", s[0], s[1], s[2]))
            .collect();
        let precs: Vec<String> = self.preconditioners.iter().map(|p| p.to_string()).collect();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("problem", self.problem.to_string());
        kv(
            "element",
            match self.element {
                ElementType::Hex8 => "hex8".into(),
                ElementType::Serendipity20 => "serendipity20".into(),
            },
        );
        kv("refinement", self.refinement.to_string());
        kv("partitions", shapes.join(","));
        kv("overlap", self.overlap.to_string());
        kv("preconditioners", precs.join(","));
        kv("rho", self.rho.to_string());
        kv("shift", self.shift.map_or("auto".into(), |s| s.to_string()));
        kv("k_max", self.k_max.to_string());
        kv(
            "solver",
            if self.solver == SolverKind::Pcg {
                "pcg".into()
            } else {
                "fgmres".into()
            },
        );
        kv("tol", self.tol.to_string());
        kv("max_it", self.max_it.to_string());
        kv("restart", self.restart.to_string());
        kv("output", self.output.display().to_string());
        kv("workers", self.workers.to_string());
        kv("pressure", self.pressure.to_string());
        kv(
            "cells",
            format!("{}x{}x{}", self.cells[0], self.cells[1], self.cells[2]),
        );
        kv("contrast", self.contrast.to_string());
        kv("pattern", self.pattern.to_string());
        kv("seed", self.seed.to_string());
        if let Some(p) = &self.spe10_path {
            kv("spe10_path", p.display().to_string());
        }
        kv("stride", self.stride.to_string());
        kv("source", self.source.to_string());
        kv("vtk", self.vtk.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("partitions", "4x1x1, 8x1x1,16").unwrap();
        cfg.set("preconditioners", "as1,zem,geneo,none").unwrap();
        cfg.set("shift", "-1e-7").unwrap();
        let back = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.partitions[2], [16, 1, 1]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = RunConfig::parse("# sweep\n\nproblem = spe10  # data set\nstride=2\n").unwrap();
        assert_eq!(cfg.problem, ProblemKind::Spe10);
        assert_eq!(cfg.stride, 2);
    }

    #[test]
    fn errors_name_the_line() {
        let e = RunConfig::parse("tol = 1e-5\nbogus = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.tol = 1.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-5;
        cfg.overlap = 0;
        assert!(cfg.validate().is_err());
        cfg.preconditioners = vec![Preconditioner::Identity];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn cube_shorthand_for_cells() {
        let mut cfg = RunConfig::default();
        cfg.set("cells", "12").unwrap();
        assert_eq!(cfg.cells, [12, 12, 12]);
        cfg.set("cells", "4x5x6").unwrap();
        assert_eq!(cfg.cells, [4, 5, 6]);
    }
}
