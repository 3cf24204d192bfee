use std::io::Write;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::decomposition::{
    accumulate, distribute, Communicator, DofMaps, Mailbox, PartitionOfUnity, SubdomainOperators,
};
use crate::error::{Error, Result};
use crate::sparse::{dot, write_dense_market};

/// Pivots of the coarse matrix below this fraction of its largest diagonal
/// entry mark a basis vector as linearly dependent on earlier ones.
const DROP_TOLERANCE: f64 = 1e-12;

pub const TAG_ASSEMBLY: &str = "coarse_assembly";
pub const TAG_RESTRICT: &str = "coarse_restrict";

/// `Φ = X p`, zero on globally constrained dofs, for each local vector `p`.
pub fn build_coarse_basis(
    vectors: &[Vec<Vec<f64>>],
    pou: &PartitionOfUnity,
    ops: &[SubdomainOperators],
) -> Vec<Vec<Vec<f64>>> {
    vectors
        .iter()
        .enumerate()
        .map(|(j, vs)| {
            vs.iter()
                .map(|p| {
                    p.iter()
                        .zip(&pou.weights[j])
                        .zip(&ops[j].global_dirichlet)
                        .map(|((&x, &w), &d)| if d { 0.0 } else { w * x })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Coarse basis stored as local slices on the owning subdomain, with the
/// replicated coarse matrix `A_H = R_H A R_Hᵀ` and its Cholesky factor.
#[derive(Debug, Clone)]
pub struct CoarseSpace {
    basis: Vec<Vec<Vec<f64>>>,
    offsets: Vec<usize>,
    a_h: DMatrix<f64>,
    factor: Option<Cholesky<f64, Dyn>>,
    /// `(subdomain, candidate index)` of vectors removed as linearly dependent.
    pub dropped: Vec<(usize, usize)>,
}

/// Pairs of local indices `(in j, in k)` of the dofs shared by `j` and `k`.
fn shared_dofs(maps: &DofMaps, j: usize, k: usize) -> (Vec<usize>, Vec<usize>) {
    let (a, b) = (&maps.dofs[j], &maps.dofs[k]);
    let (mut p, mut q) = (0, 0);
    let (mut lj, mut lk) = (Vec::new(), Vec::new());
    while p < a.len() && q < b.len() {
        match a[p].cmp(&b[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                lj.push(p);
                lk.push(q);
                p += 1;
                q += 1;
            }
        }
    }
    (lj, lk)
}

impl CoarseSpace {
    pub fn empty(n_sub: usize) -> Self {
        Self {
            basis: vec![Vec::new(); n_sub],
            offsets: vec![0; n_sub + 1],
            a_h: DMatrix::zeros(0, 0),
            factor: None,
            dropped: Vec::new(),
        }
    }

    /// Assembles `(A_H)_{iℓ} = Φ_iᵀ Ã_{j(i)} Φ_ℓ` from local products. Each
    /// subdomain sends its basis restricted to the shared dofs to its
    /// neighbours, computes the rows of its own vectors and the rows are
    /// all-gathered.
    pub fn assemble(
        basis: Vec<Vec<Vec<f64>>>,
        ops: &[SubdomainOperators],
        maps: &DofMaps,
        comm: &Communicator,
    ) -> Result<Self> {
        let n_sub = maps.num_subdomains();
        if basis.len() != n_sub || ops.len() != n_sub {
            return Err(Error::invalid("coarse basis: subdomain count mismatch"));
        }
        let offsets = offsets_of(&basis);
        let n_h = offsets[n_sub];
        if n_h == 0 {
            return Ok(Self::empty(n_sub));
        }
        let neighbors = comm.neighbors();
        let shared: Vec<Vec<(usize, Vec<usize>, Vec<usize>)>> = (0..n_sub)
            .map(|j| {
                neighbors[j]
                    .iter()
                    .map(|&k| {
                        let (lj, lk) = shared_dofs(maps, j, k);
                        (k, lj, lk)
                    })
                    .collect()
            })
            .collect();

        // Send own basis values on shared dofs to every neighbour.
        let outgoing: Mailbox = (0..n_sub)
            .map(|k| {
                shared[k]
                    .iter()
                    .map(|(j, lk, _)| {
                        let payload: Vec<f64> = basis[k]
                            .iter()
                            .flat_map(|phi| lk.iter().map(move |&l| phi[l]))
                            .collect();
                        (*j, payload)
                    })
                    .collect()
            })
            .collect();
        let inbox = comm.neighbor_exchange(outgoing)?;

        let rows: Vec<Vec<f64>> = (0..n_sub)
            .map(|j| -> Result<Vec<f64>> {
                let cols = column_owners(j, neighbors, &offsets);
                let mut out = Vec::new();
                for phi in &basis[j] {
                    let w = ops[j].a_submatrix.mul_vec(phi);
                    for &k in &cols {
                        if k == j {
                            out.extend(basis[j].iter().map(|psi| dot(&w, psi)));
                        } else if shared[j].iter().any(|(kk, lj, _)| *kk == k && lj.is_empty()) {
                            out.extend(std::iter::repeat(0.0).take(offsets[k + 1] - offsets[k]));
                        } else {
                            let (_, payload) = inbox[j]
                                .iter()
                                .find(|(s, _)| *s == k)
                                .ok_or_else(|| Error::ContractViolation(format!("missing basis slices from {k}")))?;
                            let (_, lj, _) = shared[j].iter().find(|(kk, _, _)| *kk == k).expect("neighbour");
                            let len = lj.len();
                            for m in 0..(offsets[k + 1] - offsets[k]) {
                                let slice = &payload[m * len..(m + 1) * len];
                                out.push(lj.iter().zip(slice).map(|(&l, &v)| w[l] * v).sum());
                            }
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let gathered = comm.all_gather(TAG_ASSEMBLY, &rows);

        // Every worker unpacks the same data identically.
        let mut a_h = DMatrix::zeros(n_h, n_h);
        let mut pos = 0;
        for j in 0..n_sub {
            let cols = column_owners(j, neighbors, &offsets);
            for i in offsets[j]..offsets[j + 1] {
                for &k in &cols {
                    for l in offsets[k]..offsets[k + 1] {
                        a_h[(i, l)] = gathered[pos];
                        pos += 1;
                    }
                }
            }
        }
        let a_h = (&a_h + a_h.transpose()) * 0.5;
        let mut space = Self {
            basis,
            offsets,
            a_h,
            factor: None,
            dropped: Vec::new(),
        };
        space.drop_dependent()?;
        Ok(space)
    }

    /// Removes basis vectors whose Cholesky pivot is negligible, then factors.
    fn drop_dependent(&mut self) -> Result<()> {
        let n = self.a_h.nrows();
        let max_diag = (0..n).map(|i| self.a_h[(i, i)]).fold(0.0f64, f64::max);
        let threshold = DROP_TOLERANCE * max_diag;
        let mut kept: Vec<usize> = Vec::with_capacity(n);
        // Rows of L for the kept columns, in kept order.
        let mut l: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut d: Vec<f64> = Vec::with_capacity(n);
        for c in 0..n {
            let mut row = Vec::with_capacity(kept.len());
            for (t, &kt) in kept.iter().enumerate() {
                let mut s = self.a_h[(c, kt)];
                for q in 0..t {
                    s -= row[q] * l[t][q];
                }
                row.push(s / d[t]);
            }
            let pivot = self.a_h[(c, c)] - row.iter().map(|x| x * x).sum::<f64>();
            if pivot > threshold {
                d.push(pivot.sqrt());
                l.push(row);
                kept.push(c);
            }
        }
        if kept.len() < n {
            let owner = self.owner_table();
            let removed: Vec<usize> = (0..n).filter(|c| !kept.contains(c)).collect();
            for &c in &removed {
                let (j, k) = owner[c];
                log::warn!("coarse space: dropping dependent vector {k} of subdomain {j}");
                self.dropped.push((j, k));
            }
            let mut new_basis: Vec<Vec<Vec<f64>>> = vec![Vec::new(); self.basis.len()];
            for &c in &kept {
                let (j, k) = owner[c];
                new_basis[j].push(std::mem::take(&mut self.basis[j][k]));
            }
            self.basis = new_basis;
            self.offsets = offsets_of(&self.basis);
            self.a_h = self.a_h.select_rows(&kept).select_columns(&kept);
        }
        if self.a_h.nrows() > 0 {
            self.factor = Some(self.a_h.clone().cholesky().ok_or(Error::NotPositiveDefinite {
                column: 0,
                pivot: f64::NAN,
                max_pivot: max_diag,
            })?);
        }
        Ok(())
    }

    fn owner_table(&self) -> Vec<(usize, usize)> {
        let mut t = Vec::new();
        for (j, b) in self.basis.iter().enumerate() {
            for k in 0..b.len() {
                t.push((j, k));
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a_h
    }

    /// Number of basis vectors owned by each subdomain.
    pub fn counts(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.len()).collect()
    }

    pub fn local_basis(&self, j: usize) -> &[Vec<f64>] {
        &self.basis[j]
    }

    /// `Φ_i` as a global vector.
    pub fn global_vector(&self, maps: &DofMaps, i: usize) -> Vec<f64> {
        let j = self.offsets.partition_point(|&o| o <= i) - 1;
        let mut v = vec![0.0; maps.n_global];
        for (&g, &x) in maps.dofs[j].iter().zip(&self.basis[j][i - self.offsets[j]]) {
            v[g] = x;
        }
        v
    }

    /// `R_H r` from the local restrictions `R_j r`: local dot products, then
    /// one all-gather.
    pub fn restrict_local(&self, r_local: &[Vec<f64>], comm: &Communicator) -> Vec<f64> {
        let parts: Vec<Vec<f64>> = self
            .basis
            .iter()
            .zip(r_local)
            .map(|(b, r)| b.iter().map(|phi| dot(phi, r)).collect())
            .collect();
        comm.all_gather(TAG_RESTRICT, &parts)
    }

    pub fn solve(&self, r_h: &[f64]) -> Vec<f64> {
        match &self.factor {
            Some(f) => f.solve(&DVector::from_column_slice(r_h)).as_slice().to_vec(),
            None => Vec::new(),
        }
    }

    /// Adds `Σ_i y_i Φ_i` to the local vectors of the owners.
    pub fn prolong_add(&self, y_h: &[f64], local: &mut [Vec<f64>]) {
        for (j, b) in self.basis.iter().enumerate() {
            for (k, phi) in b.iter().enumerate() {
                let c = y_h[self.offsets[j] + k];
                local[j].iter_mut().zip(phi).for_each(|(x, p)| *x += c * p);
            }
        }
    }

    pub fn write_matrix_market<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_dense_market(&self.a_h, w)
    }
}

fn offsets_of(basis: &[Vec<Vec<f64>>]) -> Vec<usize> {
    let mut o = vec![0];
    for b in basis {
        o.push(o.last().unwrap() + b.len());
    }
    o
}

/// Subdomains whose coarse columns appear in the rows of `j`, ascending.
fn column_owners(j: usize, neighbors: &[Vec<usize>], offsets: &[usize]) -> Vec<usize> {
    let mut c: Vec<usize> = neighbors[j].iter().copied().chain(std::iter::once(j)).collect();
    c.sort_unstable();
    c.dedup();
    c.retain(|&k| offsets[k + 1] > offsets[k]);
    c
}

/// `R_H v`.
pub fn coarse_restrict(space: &CoarseSpace, maps: &DofMaps, comm: &Communicator, v: &[f64]) -> Result<Vec<f64>> {
    let local = distribute(maps, comm, v)?;
    Ok(space.restrict_local(&local, comm))
}

/// `R_Hᵀ v_H`.
pub fn coarse_prolong(space: &CoarseSpace, maps: &DofMaps, comm: &Communicator, v_h: &[f64]) -> Result<Vec<f64>> {
    let mut local: Vec<Vec<f64>> = maps.dofs.iter().map(|d| vec![0.0; d.len()]).collect();
    space.prolong_add(v_h, &mut local);
    accumulate(maps, comm, &local)
}
