use std::sync::Arc;

use super::coarse::CoarseSpace;
use crate::decomposition::{accumulate, distribute, Communicator, DofMaps, OneLevelSchwarz};
use crate::error::Result;
use crate::krylov::LinearOperator;

/// `M⁻¹ = R_Hᵀ A_H⁻¹ R_H + Σ_j R_jᵀ Ã_j⁻¹ R_j`. With an empty coarse space
/// this is the one-level preconditioner, computed by the same code path.
#[derive(Debug)]
pub struct TwoLevelSchwarz {
    one: OneLevelSchwarz,
    coarse: CoarseSpace,
}

impl TwoLevelSchwarz {
    pub fn new(one: OneLevelSchwarz, coarse: CoarseSpace) -> Self {
        Self { one, coarse }
    }

    pub fn one_level(&self) -> &OneLevelSchwarz {
        &self.one
    }

    pub fn coarse(&self) -> &CoarseSpace {
        &self.coarse
    }

    pub fn maps(&self) -> &Arc<DofMaps> {
        self.one.maps()
    }

    pub fn communicator(&self) -> &Arc<Communicator> {
        self.one.communicator()
    }

    pub fn try_apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let maps = self.one.maps();
        let comm = self.one.communicator();
        let local = distribute(maps, comm, r)?;
        if self.coarse.is_empty() {
            let y = self.one.local_solves(local);
            return accumulate(maps, comm, &y);
        }
        let r_h = self.coarse.restrict_local(&local, comm);
        let mut y = self.one.local_solves(local);
        let y_h = self.coarse.solve(&r_h);
        self.coarse.prolong_add(&y_h, &mut y);
        accumulate(maps, comm, &y)
    }
}

impl LinearOperator for TwoLevelSchwarz {
    fn dim(&self) -> usize {
        self.one.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let z = self.try_apply(x).expect("two-level exchange");
        y.copy_from_slice(&z);
    }
}
