use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::HardwareGraph;
use crate::problem::{edge, Edge, LogicalProblem};

/// Chains of physical qubits, indexed by logical qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub chains: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn new(chains: Vec<Vec<usize>>) -> Self {
        Embedding { chains }
    }

    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn chain(&self, i: usize) -> &[usize] {
        &self.chains[i]
    }

    pub fn total_qubits(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// Physical qubit to logical index; the first chain wins on overlap.
    pub fn owner_map(&self) -> BTreeMap<usize, usize> {
        let mut owner = BTreeMap::new();
        for (i, chain) in self.chains.iter().enumerate() {
            for &q in chain {
                owner.entry(q).or_insert(i);
            }
        }
        owner
    }

    /// Hardware edges with both endpoints inside chain `i`.
    pub fn chain_edges(&self, g: &HardwareGraph, i: usize) -> Vec<Edge> {
        let chain = &self.chains[i];
        let mut edges = Vec::new();
        for (x, &a) in chain.iter().enumerate() {
            for &b in &chain[x + 1..] {
                if g.has_edge(a, b) {
                    edges.push(edge(a, b));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Hardware edges joining chain `i` to chain `j`, lexicographically sorted.
    pub fn couplers_between(&self, g: &HardwareGraph, i: usize, j: usize) -> Vec<Edge> {
        let mut edges = Vec::new();
        for &a in &self.chains[i] {
            for &b in &self.chains[j] {
                if g.has_edge(a, b) {
                    edges.push(edge(a, b));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ChainCount { expected: usize, found: usize },
    EmptyChain { logical: usize },
    QubitOutOfRange { logical: usize, qubit: usize },
    InactiveQubit { logical: usize, qubit: usize },
    OverlappingChains { qubit: usize, first: usize, second: usize },
    DisconnectedChain { logical: usize },
    MissingCoupler { i: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ChainCount { expected, found } => {
                write!(f, "expected {expected} chains, found {found}")
            }
            Violation::EmptyChain { logical } => write!(f, "chain {logical} is empty"),
            Violation::QubitOutOfRange { logical, qubit } => {
                write!(f, "chain {logical} uses out-of-range qubit {qubit}")
            }
            Violation::InactiveQubit { logical, qubit } => {
                write!(f, "chain {logical} uses inactive qubit {qubit}")
            }
            Violation::OverlappingChains { qubit, first, second } => {
                write!(f, "qubit {qubit} belongs to chains {first} and {second}")
            }
            Violation::DisconnectedChain { logical } => {
                write!(f, "disconnected chain {logical}")
            }
            Violation::MissingCoupler { i, j } => {
                write!(f, "logical edge ({i}, {j}) has no physical coupler")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        Err(Error::InvalidEmbedding(msgs.join("; ")))
    }
}

/// Checks the embedding contract. Never fails; every problem is a report entry.
pub fn validate_embedding(l: &LogicalProblem, g: &HardwareGraph, e: &Embedding) -> ValidationReport {
    let mut violations = Vec::new();
    if e.num_logical() != l.n() {
        violations.push(Violation::ChainCount {
            expected: l.n(),
            found: e.num_logical(),
        });
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, chain) in e.chains.iter().enumerate() {
        if chain.is_empty() {
            violations.push(Violation::EmptyChain { logical: i });
            continue;
        }
        let mut in_range = true;
        for &q in chain {
            if q >= g.num_qubits() {
                violations.push(Violation::QubitOutOfRange { logical: i, qubit: q });
                in_range = false;
                continue;
            }
            if !g.is_active(q) {
                violations.push(Violation::InactiveQubit { logical: i, qubit: q });
            }
            match owner.get(&q) {
                Some(&first) => violations.push(Violation::OverlappingChains {
                    qubit: q,
                    first,
                    second: i,
                }),
                None => {
                    owner.insert(q, i);
                }
            }
        }
        if in_range && !is_connected(g, chain) {
            violations.push(Violation::DisconnectedChain { logical: i });
        }
    }
    for &(i, j) in l.couplings().keys() {
        if i >= e.num_logical() || j >= e.num_logical() {
            continue;
        }
        let linked = e.chains[i]
            .iter()
            .filter(|&&a| a < g.num_qubits())
            .any(|&a| g.neighbors(a).iter().any(|b| e.chains[j].contains(b)));
        if !linked {
            violations.push(Violation::MissingCoupler { i, j });
        }
    }
    ValidationReport { violations }
}

fn is_connected(g: &HardwareGraph, chain: &[usize]) -> bool {
    let mut seen = vec![false; chain.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for (y, &b) in chain.iter().enumerate() {
            if !seen[y] && g.has_edge(chain[x], b) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
