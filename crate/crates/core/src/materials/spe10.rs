use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Diagonal permeability per cell, cells numbered x-fastest then y then z.
#[derive(Debug, Clone, PartialEq)]
pub struct PermeabilityField {
    pub dims: [usize; 3],
    pub kx: Vec<f64>,
    pub ky: Vec<f64>,
    pub kz: Vec<f64>,
}

/// Cell counts of the full SPE10 model 2 grid.
pub const SPE10_DIMS: [usize; 3] = [60, 220, 85];
/// Physical size of the SPE10 model 2 domain in feet.
pub const SPE10_EXTENTS: [f64; 3] = [1200.0, 2200.0, 170.0];

impl PermeabilityField {
    pub fn uniform(dims: [usize; 3], k: f64) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            kx: vec![k; n],
            ky: vec![k; n],
            kz: vec![k; n],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.kx.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n: usize = self.dims.iter().product();
        if self.kx.len() != n || self.ky.len() != n || self.kz.len() != n {
            return Err(Error::invalid("permeability arrays do not match the grid dimensions"));
        }
        for (name, k) in [("Kx", &self.kx), ("Ky", &self.ky), ("Kz", &self.kz)] {
            if let Some(i) = k.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::invalid(format!("{name}[{i}] = {} is not positive", k[i])));
            }
        }
        Ok(())
    }

    pub fn cell(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    /// `(min, max)` of each component.
    pub fn ranges(&self) -> [(f64, f64); 3] {
        let r = |v: &[f64]| {
            v.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
        };
        [r(&self.kx), r(&self.ky), r(&self.kz)]
    }

    /// Ratio of the largest to the smallest entry over all components.
    pub fn contrast(&self) -> f64 {
        let r = self.ranges();
        let lo = r.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
        let hi = r.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        hi / lo
    }

    /// Every `stride`-th cell per axis, starting from cell 0 (`floor` counts).
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::invalid("stride must be positive"));
        }
        let dims = self.dims.map(|d| (d / stride).max(1));
        let mut out = Self {
            dims,
            kx: Vec::with_capacity(dims.iter().product()),
            ky: Vec::new(),
            kz: Vec::new(),
        };
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let c = self.cell(i * stride, j * stride, k * stride);
                    out.kx.push(self.kx[c]);
                    out.ky.push(self.ky[c]);
                    out.kz.push(self.kz[c]);
                }
            }
        }
        Ok(out)
    }

    /// Writes the three blocks as whitespace-separated values, six per line.
    pub fn write_spe10<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for block in [&self.kx, &self.ky, &self.kz] {
            for chunk in block.chunks(6) {
                let line: Vec<String> = chunk.iter().map(|v| format!("{v:.6e}")).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Reads an SPE10-format permeability file: `Kx`, `Ky`, `Kz` blocks of
/// `prod(dims)` whitespace-separated values each, x-fastest ordering.
pub fn read_spe10<R: Read>(reader: R, dims: [usize; 3], source_name: &str) -> Result<PermeabilityField> {
    let n: usize = dims.iter().product();
    if n == 0 {
        return Err(Error::invalid("SPE10 dimensions must be positive"));
    }
    let mut values = Vec::with_capacity(3 * n);
    let reader = BufReader::new(reader);
    'lines: for (ln, line) in reader.lines().enumerate() {
        let line = line?;
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(source_name, format!("line {}: bad value '{tok}'", ln + 1)))?;
            if !(v > 0.0) {
                return Err(Error::parse(
                    source_name,
                    format!("line {}: non-positive permeability {v}", ln + 1),
                ));
            }
            values.push(v);
            if values.len() == 3 * n {
                break 'lines;
            }
        }
    }
    if values.len() < 3 * n {
        return Err(Error::parse(
            source_name,
            format!("expected {} values for dims {:?}, found {}", 3 * n, dims, values.len()),
        ));
    }
    let kz = values.split_off(2 * n);
    let ky = values.split_off(n);
    Ok(PermeabilityField {
        dims,
        kx: values,
        ky,
        kz,
    })
}

pub fn load_spe10(path: &Path, dims: [usize; 3]) -> Result<PermeabilityField> {
    let f = std::fs::File::open(path)?;
    read_spe10(f, dims, &path.display().to_string())
}
