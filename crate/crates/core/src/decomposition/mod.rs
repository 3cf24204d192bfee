//! Overlapping subdomain operators, partition of unity, neighbour exchange
//! and the one-level additive Schwarz preconditioner.

mod exchange;
mod maps;
mod operators;
mod pou;
mod schwarz;

pub use exchange::{AllGatherEvent, Communicator, ExchangeLedger, LinkStats, Mailbox};
pub use maps::DofMaps;
pub use operators::{build_all_subdomain_operators, build_subdomain_operators, SubdomainOperators};
pub use pou::{build_pou, PartitionOfUnity};
pub use schwarz::{accumulate, distribute, OneLevelSchwarz};

#[cfg(test)]
mod tests;
