use crate::decomposition::SubdomainOperators;
use crate::sparse::CsrMatrix;

/// Local generalized eigenproblem `A p = λ B p`.
#[derive(Debug, Clone)]
pub struct EigenPencil {
    /// Neumann matrix of the subdomain.
    pub a: CsrMatrix,
    /// `X A° X` with `A°` the overlap Neumann matrix and `X` the partition of unity.
    pub b: CsrMatrix,
}

pub fn assemble_eigen_pencil(ops: &SubdomainOperators) -> EigenPencil {
    EigenPencil {
        a: ops.a_neumann.clone(),
        b: ops.a_overlap_neumann.scale_symmetric(&ops.pou),
    }
}
