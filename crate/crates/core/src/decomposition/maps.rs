use crate::error::{Error, Result};
use crate::mesh::OverlappingDecomposition;

/// Index bookkeeping for moving dof vectors between the global numbering and
/// the subdomains. Every global dof has one owning subdomain; values owned
/// elsewhere are imported from the owner, and local contributions are
/// returned to the owner for summation.
#[derive(Debug, Clone)]
pub struct DofMaps {
    pub n_global: usize,
    pub ncomp: usize,
    pub dofs: Vec<Vec<usize>>,
    pub interior_boundary: Vec<Vec<bool>>,
    pub dof_owner: Vec<usize>,
    /// `imports[j] = [(owner, local indices in j)]`, owners ascending.
    pub imports: Vec<Vec<(usize, Vec<usize>)>>,
    /// Local indices in `j` of dofs owned by `j`.
    pub owned_local: Vec<Vec<usize>>,
    /// `returns[j] = [(owner, local indices in j)]` restricted to dofs not on
    /// the interior boundary of `j`.
    pub returns: Vec<Vec<(usize, Vec<usize>)>>,
}

impl DofMaps {
    pub fn new(decomp: &OverlappingDecomposition, n_nodes: usize, ncomp: usize) -> Result<Self> {
        let n_sub = decomp.num_subdomains();
        let n_global = n_nodes * ncomp;
        let dof_owner: Vec<usize> = decomp
            .node_owner
            .iter()
            .flat_map(|&o| std::iter::repeat(o).take(ncomp))
            .collect();
        let mut dofs = Vec::with_capacity(n_sub);
        let mut boundary = Vec::with_capacity(n_sub);
        let mut imports = Vec::with_capacity(n_sub);
        let mut returns = Vec::with_capacity(n_sub);
        let mut owned_local = Vec::with_capacity(n_sub);
        for j in 0..n_sub {
            let d = decomp.subdomain_dofs(j, ncomp);
            let b = decomp.interior_boundary_dofs(j, ncomp);
            let mut by_owner: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            let mut own = Vec::new();
            for (l, &g) in d.iter().enumerate() {
                let o = dof_owner[g];
                if o == j {
                    if b[l] {
                        return Err(Error::ContractViolation(format!(
                            "dof {g} owned by subdomain {j} lies on its interior boundary"
                        )));
                    }
                    own.push(l);
                } else {
                    by_owner.entry(o).or_default().push(l);
                }
            }
            let ret: Vec<(usize, Vec<usize>)> = by_owner
                .iter()
                .map(|(&o, ls)| (o, ls.iter().copied().filter(|&l| !b[l]).collect::<Vec<_>>()))
                .filter(|(_, ls)| !ls.is_empty())
                .collect();
            imports.push(by_owner.into_iter().collect());
            returns.push(ret);
            owned_local.push(own);
            dofs.push(d);
            boundary.push(b);
        }
        Ok(Self {
            n_global,
            ncomp,
            dofs,
            interior_boundary: boundary,
            dof_owner,
            imports,
            owned_local,
            returns,
        })
    }

    pub fn num_subdomains(&self) -> usize {
        self.dofs.len()
    }
}
