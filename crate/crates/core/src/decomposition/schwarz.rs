use std::sync::Arc;

use rayon::prelude::*;

use super::exchange::{Communicator, Mailbox};
use super::maps::DofMaps;
use crate::error::{Error, Result};
use crate::krylov::{factorize, LdlFactorization, LinearOperator};
use crate::sparse::CsrMatrix;

/// `R_j v` for every subdomain. Values owned by another subdomain are sent by
/// their owner.
pub fn distribute(maps: &DofMaps, comm: &Communicator, v: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n_sub = maps.num_subdomains();
    let mut outgoing: Mailbox = vec![Vec::new(); n_sub];
    for j in 0..n_sub {
        for (o, ls) in &maps.imports[j] {
            outgoing[*o].push((j, ls.iter().map(|&l| v[maps.dofs[j][l]]).collect()));
        }
    }
    let inbox = comm.neighbor_exchange(outgoing)?;
    let mut local = Vec::with_capacity(n_sub);
    for j in 0..n_sub {
        let mut x = vec![0.0; maps.dofs[j].len()];
        for &l in &maps.owned_local[j] {
            x[l] = v[maps.dofs[j][l]];
        }
        for (sender, payload) in &inbox[j] {
            let ls = import_list(&maps.imports[j], *sender)?;
            for (&l, &val) in ls.iter().zip(payload) {
                x[l] = val;
            }
        }
        local.push(x);
    }
    Ok(local)
}

/// `Σ_j R_jᵀ y_j`, ignoring entries on each interior boundary. Owners add the
/// contributions in increasing subdomain order so the result is reproducible.
pub fn accumulate(maps: &DofMaps, comm: &Communicator, local: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n_sub = maps.num_subdomains();
    let outgoing: Mailbox = (0..n_sub)
        .map(|j| {
            maps.returns[j]
                .iter()
                .map(|(o, ls)| (*o, ls.iter().map(|&l| local[j][l]).collect()))
                .collect()
        })
        .collect();
    let inbox = comm.neighbor_exchange(outgoing)?;
    let mut out = vec![0.0; maps.n_global];
    for o in 0..n_sub {
        let mut own_done = false;
        for (sender, payload) in &inbox[o] {
            if !own_done && *sender > o {
                add_owned(maps, o, &local[o], &mut out);
                own_done = true;
            }
            let ls = import_list(&maps.returns[*sender], o)?;
            for (&l, &val) in ls.iter().zip(payload) {
                out[maps.dofs[*sender][l]] += val;
            }
        }
        if !own_done {
            add_owned(maps, o, &local[o], &mut out);
        }
    }
    Ok(out)
}

fn add_owned(maps: &DofMaps, o: usize, y: &[f64], out: &mut [f64]) {
    for &l in &maps.owned_local[o] {
        out[maps.dofs[o][l]] += y[l];
    }
}

fn import_list(list: &[(usize, Vec<usize>)], peer: usize) -> Result<&[usize]> {
    list.iter()
        .find(|(p, _)| *p == peer)
        .map(|(_, ls)| ls.as_slice())
        .ok_or_else(|| Error::ContractViolation(format!("unexpected message from subdomain {peer}")))
}

/// `M⁻¹ = Σ_j R_jᵀ Ã_j⁻¹ R_j` with `Ã_j` the local Dirichlet matrices.
#[derive(Debug)]
pub struct OneLevelSchwarz {
    maps: Arc<DofMaps>,
    comm: Arc<Communicator>,
    solvers: Vec<LdlFactorization>,
}

impl OneLevelSchwarz {
    pub fn new(maps: Arc<DofMaps>, comm: Arc<Communicator>, a_dirichlet: &[&CsrMatrix]) -> Result<Self> {
        if a_dirichlet.len() != maps.num_subdomains() || comm.size() != maps.num_subdomains() {
            return Err(Error::invalid("subdomain count mismatch"));
        }
        let solvers = a_dirichlet
            .par_iter()
            .map(|a| factorize(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { maps, comm, solvers })
    }

    pub fn maps(&self) -> &Arc<DofMaps> {
        &self.maps
    }

    pub fn communicator(&self) -> &Arc<Communicator> {
        &self.comm
    }

    pub fn local_solver(&self, j: usize) -> &LdlFactorization {
        &self.solvers[j]
    }

    /// `Ã_j⁻¹ r_j` with the interior boundary masked before and after.
    pub fn local_solves(&self, mut r_local: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        r_local.par_iter_mut().enumerate().for_each(|(j, r)| {
            let b = &self.maps.interior_boundary[j];
            mask(r, b);
            self.solvers[j].solve_in_place(r);
            mask(r, b);
        });
        r_local
    }

    pub fn try_apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let local = distribute(&self.maps, &self.comm, r)?;
        let y = self.local_solves(local);
        accumulate(&self.maps, &self.comm, &y)
    }
}

fn mask(v: &mut [f64], flags: &[bool]) {
    for (x, &f) in v.iter_mut().zip(flags) {
        if f {
            *x = 0.0;
        }
    }
}

impl LinearOperator for OneLevelSchwarz {
    fn dim(&self) -> usize {
        self.maps.n_global
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        // Maps only address neighbours by construction.
        let z = self.try_apply(x).expect("one-level exchange");
        y.copy_from_slice(&z);
    }
}
