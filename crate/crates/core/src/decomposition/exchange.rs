use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Mutex;

use crate::error::{Error, Result};

/// Point-to-point traffic on one directed link.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkStats {
    pub messages: u64,
    pub doubles: u64,
}

/// One collective all-gather.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllGatherEvent {
    pub tag: String,
    pub doubles: u64,
}

/// Record of all traffic through a [`Communicator`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExchangeLedger {
    pub point_to_point: BTreeMap<(usize, usize), LinkStats>,
    pub all_gathers: Vec<AllGatherEvent>,
}

impl ExchangeLedger {
    pub fn all_gather_count(&self, tag: &str) -> usize {
        self.all_gathers.iter().filter(|e| e.tag == tag).count()
    }

    /// Links that join subdomains which are not neighbours.
    pub fn non_neighbor_links(&self, neighbors: &[Vec<usize>]) -> Vec<(usize, usize)> {
        self.point_to_point
            .keys()
            .filter(|(s, r)| !neighbors[*s].contains(r))
            .copied()
            .collect()
    }

    pub fn total_messages(&self) -> u64 {
        self.point_to_point.values().map(|l| l.messages).sum()
    }

    /// CSV with header `sender,receiver,messages,doubles_sent`; all-gathers are
    /// listed after a blank line as `allgather,<tag>,1,<doubles>`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "sender,receiver,messages,doubles_sent")?;
        for ((s, r), l) in &self.point_to_point {
            writeln!(w, "{s},{r},{},{}", l.messages, l.doubles)?;
        }
        if !self.all_gathers.is_empty() {
            writeln!(w)?;
            writeln!(w, "collective,tag,events,doubles_sent")?;
            let mut by_tag: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
            for e in &self.all_gathers {
                let t = by_tag.entry(&e.tag).or_default();
                t.0 += 1;
                t.1 += e.doubles;
            }
            for (tag, (n, d)) in by_tag {
                writeln!(w, "allgather,{tag},{n},{d}")?;
            }
        }
        Ok(())
    }
}

/// Per-subdomain outgoing (or incoming) messages: `(peer, payload)`.
pub type Mailbox = Vec<Vec<(usize, Vec<f64>)>>;

/// In-process stand-in for message passing between subdomain workers. Every
/// transfer is recorded; point-to-point messages are only allowed between
/// neighbouring subdomains.
#[derive(Debug)]
pub struct Communicator {
    neighbors: Vec<Vec<usize>>,
    ledger: Mutex<ExchangeLedger>,
}

impl Communicator {
    pub fn new(neighbors: Vec<Vec<usize>>) -> Self {
        Self {
            neighbors,
            ledger: Mutex::new(ExchangeLedger::default()),
        }
    }

    pub fn size(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    /// Delivers `outgoing[sender] = [(receiver, payload)]`; returns
    /// `incoming[receiver] = [(sender, payload)]` ordered by sender. Empty
    /// payloads are dropped without being recorded.
    pub fn neighbor_exchange(&self, outgoing: Mailbox) -> Result<Mailbox> {
        if outgoing.len() != self.size() {
            return Err(Error::ContractViolation(
                "outbox count differs from communicator size".into(),
            ));
        }
        let mut incoming: Mailbox = vec![Vec::new(); self.size()];
        let mut ledger = self.ledger.lock().expect("ledger lock poisoned");
        for (sender, msgs) in outgoing.into_iter().enumerate() {
            for (receiver, payload) in msgs {
                if payload.is_empty() {
                    continue;
                }
                if receiver >= self.size() || !self.neighbors[sender].contains(&receiver) {
                    return Err(Error::ContractViolation(format!(
                        "subdomain {sender} addressed non-neighbour {receiver}"
                    )));
                }
                let link = ledger.point_to_point.entry((sender, receiver)).or_default();
                link.messages += 1;
                link.doubles += payload.len() as u64;
                incoming[receiver].push((sender, payload));
            }
        }
        Ok(incoming)
    }

    /// Concatenates every worker's contribution; all workers receive the result.
    pub fn all_gather(&self, tag: &str, contributions: &[Vec<f64>]) -> Vec<f64> {
        let out: Vec<f64> = contributions.iter().flatten().copied().collect();
        self.ledger
            .lock()
            .expect("ledger lock poisoned")
            .all_gathers
            .push(AllGatherEvent {
                tag: tag.to_string(),
                doubles: out.len() as u64,
            });
        out
    }

    pub fn ledger(&self) -> ExchangeLedger {
        self.ledger.lock().expect("ledger lock poisoned").clone()
    }

    pub fn reset_ledger(&self) {
        *self.ledger.lock().expect("ledger lock poisoned") = ExchangeLedger::default();
    }
}
