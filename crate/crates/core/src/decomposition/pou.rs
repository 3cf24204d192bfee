use crate::error::{Error, Result};
use crate::mesh::OverlappingDecomposition;

/// Diagonal partition-of-unity weights, one vector per subdomain in local dof order.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    pub weights: Vec<Vec<f64>>,
}

/// `X_j(d) = 1 / #{k : d lies in the interior of Ω_k}` and zero on the
/// interior boundary of `Ω_j`. Counting only subdomains whose interior holds
/// the dof makes `Σ_j R_jᵀ X_j R_j = I` exact.
pub fn build_pou(decomp: &OverlappingDecomposition, n_nodes: usize, ncomp: usize) -> Result<PartitionOfUnity> {
    let mult = decomp.interior_multiplicity(n_nodes);
    let mut weights = Vec::with_capacity(decomp.num_subdomains());
    for (nodes, flags) in decomp.subdomain_nodes.iter().zip(&decomp.interior_boundary) {
        let mut w = Vec::with_capacity(nodes.len() * ncomp);
        for (&n, &b) in nodes.iter().zip(flags) {
            let x = if b {
                0.0
            } else if mult[n] == 0 {
                return Err(Error::ContractViolation(format!(
                    "node {n} lies in no subdomain interior"
                )));
            } else {
                1.0 / mult[n] as f64
            };
            w.extend(std::iter::repeat(x).take(ncomp));
        }
        weights.push(w);
    }
    Ok(PartitionOfUnity { weights })
}

impl PartitionOfUnity {
    /// `Σ_j R_jᵀ X_j R_j v`.
    pub fn apply_sum(&self, decomp: &OverlappingDecomposition, ncomp: usize, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (j, w) in self.weights.iter().enumerate() {
            for (l, g) in decomp.subdomain_dofs(j, ncomp).into_iter().enumerate() {
                out[g] += w[l] * v[g];
            }
        }
        out
    }
}
