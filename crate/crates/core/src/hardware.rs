use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chimera::{build_chimera, ChimeraSpec};
use crate::error::{Error, Result};
use crate::problem::{edge, Edge};

/// Physical qubits and couplers. Dead qubits keep their global index and are
/// masked out; no edge touches an inactive qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct HardwareGraph {
    num_qubits: usize,
    active: Vec<bool>,
    edges: BTreeSet<Edge>,
    adjacency: Vec<Vec<usize>>,
    topology: Option<ChimeraSpec>,
}

impl HardwareGraph {
    pub fn new(num_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>, dead: &[usize]) -> Result<Self> {
        let mut active = vec![true; num_qubits];
        for &q in dead {
            if q >= num_qubits {
                return Err(Error::Parameter(format!("dead qubit {q} outside 0..{num_qubits}")));
            }
            active[q] = false;
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Parameter(format!("self-edge on qubit {a}")));
            }
            if a >= num_qubits || b >= num_qubits {
                return Err(Error::Parameter(format!("edge ({a}, {b}) outside 0..{num_qubits}")));
            }
            if active[a] && active[b] {
                set.insert(edge(a, b));
            }
        }
        let mut adjacency = vec![Vec::new(); num_qubits];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(HardwareGraph {
            num_qubits,
            active,
            edges: set,
            adjacency,
            topology: None,
        })
    }

    pub(crate) fn with_topology(mut self, spec: ChimeraSpec) -> Self {
        self.topology = Some(spec);
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn is_active(&self, q: usize) -> bool {
        self.active.get(q).copied().unwrap_or(false)
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn dead(&self) -> Vec<usize> {
        (0..self.num_qubits).filter(|&q| !self.active[q]).collect()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.edges.contains(&edge(a, b))
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn topology(&self) -> Option<&ChimeraSpec> {
        self.topology.as_ref()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Accepts either a Chimera descriptor `{rows, cols, cell_half, dead}` or
    /// an explicit graph `{N, edges: [[a, b], ...], dead}`.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<HardwareFile>(text)? {
            HardwareFile::Chimera(spec) => build_chimera(&spec),
            HardwareFile::Explicit(g) => HardwareGraph::new(g.n, g.edges, &g.dead),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = match &self.topology {
            Some(spec) => HardwareFile::Chimera(spec.clone()),
            None => HardwareFile::Explicit(ExplicitGraph {
                n: self.num_qubits,
                edges: self.edges.iter().copied().collect(),
                dead: self.dead(),
            }),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HardwareFile {
    Chimera(ChimeraSpec),
    Explicit(ExplicitGraph),
}

#[derive(Serialize, Deserialize)]
struct ExplicitGraph {
    #[serde(rename = "N")]
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    dead: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_qubits_drop_their_edges() {
        let g = HardwareGraph::new(3, [(0, 1), (1, 2), (2, 0)], &[2]).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert!(g.has_edge(1, 0));
        assert!(!g.is_active(2));
        assert_eq!(g.active_count(), 2);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(HardwareGraph::new(2, [(0, 0)], &[]).is_err());
        assert!(HardwareGraph::new(2, [(0, 2)], &[]).is_err());
        assert!(HardwareGraph::new(2, [], &[5]).is_err());
    }

    #[test]
    fn explicit_file_round_trip() {
        let g = HardwareGraph::from_json(r#"{"N": 4, "edges": [[0, 1], [1, 2], [2, 3]], "dead": [3]}"#).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(HardwareGraph::from_json(&g.to_json().unwrap()).unwrap(), g);
    }

    #[test]
    fn chimera_file() {
        let g = HardwareGraph::from_json(r#"{"rows": 2, "cols": 2, "cell_half": 4, "dead": [0]}"#).unwrap();
        assert_eq!(g.num_qubits(), 32);
        assert!(!g.is_active(0));
        assert_eq!(HardwareGraph::from_json(&g.to_json().unwrap()).unwrap(), g);
    }
}
