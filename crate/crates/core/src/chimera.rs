//! Chimera hardware graphs and a greedy minor embedder.
//!
//! Qubit indexing is row-major over unit cells, then cell side, then position
//! within the side:
//!
//! ```text
//! q = ((row * cols + col) * 2 + side) * cell_half + k
//! ```
//!
//! Side 0 qubits couple to the same `k` in the cells above and below; side 1
//! qubits couple to the same `k` in the cells left and right. Inside a cell
//! the two sides form a complete bipartite graph.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{validate_embedding, Embedding};
use crate::error::{Error, Result};
use crate::hardware::HardwareGraph;
use crate::problem::LogicalProblem;
use crate::seed;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChimeraSpec {
    pub rows: usize,
    pub cols: usize,
    pub cell_half: usize,
    #[serde(default)]
    pub dead: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ChimeraSpec {
    pub fn ideal(rows: usize, cols: usize, cell_half: usize) -> Self {
        ChimeraSpec {
            rows,
            cols,
            cell_half,
            dead: Vec::new(),
            label: None,
        }
    }

    /// A spec with `dead_count` distinct dead qubits drawn uniformly at random.
    pub fn with_random_dead(
        rows: usize,
        cols: usize,
        cell_half: usize,
        dead_count: usize,
        rng_seed: u64,
    ) -> Result<Self> {
        let mut spec = ChimeraSpec::ideal(rows, cols, cell_half);
        let n = spec.num_qubits();
        if dead_count > n {
            return Err(Error::Parameter(format!("cannot mark {dead_count} of {n} qubits dead")));
        }
        let mut rng = seed::rng(rng_seed);
        let mut dead = rand::seq::index::sample(&mut rng, n, dead_count).into_vec();
        dead.sort_unstable();
        spec.dead = dead;
        Ok(spec)
    }

    /// Named dead-qubit presets sized like the 512- and 1152-qubit chips.
    /// The dead indices are drawn from fixed seeds; they are not real yield maps.
    pub fn preset(name: &str) -> Result<Self> {
        let (rows, cols, dead, seed_value, chip) = match name {
            "dw2-like" => (8, 8, 8, 504, "512-qubit"),
            "dw2x-like" => (12, 12, 54, 1098, "1152-qubit"),
            _ => return Err(Error::Config(format!("unknown hardware preset {name:?}"))),
        };
        let mut spec = ChimeraSpec::with_random_dead(rows, cols, 4, dead, seed_value)?;
        spec.label = Some(format!(
            "{name}: {chip} Chimera with {dead} randomly chosen dead qubits; not a real chip yield map"
        ));
        Ok(spec)
    }

    pub fn num_qubits(&self) -> usize {
        self.rows * self.cols * 2 * self.cell_half
    }

    pub fn qubit(&self, row: usize, col: usize, side: usize, k: usize) -> usize {
        ((row * self.cols + col) * 2 + side) * self.cell_half + k
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.cell_half == 0 {
            return Err(Error::Parameter(format!(
                "chimera dimensions must be positive, got {}x{}x{}",
                self.rows, self.cols, self.cell_half
            )));
        }
        let n = self.num_qubits();
        if let Some(&q) = self.dead.iter().find(|&&q| q >= n) {
            return Err(Error::Parameter(format!("dead qubit {q} outside 0..{n}")));
        }
        Ok(())
    }
}

/// Builds the Chimera graph for `spec`, removing dead qubits and their edges.
pub fn build_chimera(spec: &ChimeraSpec) -> Result<HardwareGraph> {
    spec.validate()?;
    let l = spec.cell_half;
    let mut edges = Vec::new();
    for row in 0..spec.rows {
        for col in 0..spec.cols {
            for a in 0..l {
                for b in 0..l {
                    edges.push((spec.qubit(row, col, 0, a), spec.qubit(row, col, 1, b)));
                }
                if row + 1 < spec.rows {
                    edges.push((spec.qubit(row, col, 0, a), spec.qubit(row + 1, col, 0, a)));
                }
                if col + 1 < spec.cols {
                    edges.push((spec.qubit(row, col, 1, a), spec.qubit(row, col + 1, 1, a)));
                }
            }
        }
    }
    Ok(HardwareGraph::new(spec.num_qubits(), edges, &spec.dead)?.with_topology(spec.clone()))
}

/// Default retry budget for [`greedy_embed`].
pub const DEFAULT_EMBED_TRIES: usize = 16;

/// Rerouting rounds per attempt before giving up on remaining overlaps.
const REROUTE_ROUNDS: usize = 100;

/// Growth of the present-congestion factor per rerouting round.
const PRESENT_GROWTH: f64 = 1.2;

/// Finds an embedding of `l` into `g` by growing chains along shortest paths.
///
/// Logical qubits are placed in a randomized breadth-first order. A qubit
/// with no placed neighbors takes a random unused hardware qubit. Otherwise a
/// shortest-path search runs from each placed neighbor chain; the root
/// minimizing the summed path costs is chosen (ties broken at random) and the
/// paths from the root back to every neighbor chain become the new chain.
///
/// Chains may overlap while routing. Overlaps are negotiated away in the
/// manner of PathFinder congestion routing: entering qubit `q` costs
/// `(1 + history_q) * (1 + present * usage_q)`, and while overlaps remain every
/// chain is ripped up and rerouted in random order, after which `present`
/// grows and every overused qubit's `history` is incremented. The number of
/// rounds is bounded. Attempt `t` uses the seed
/// `derive(rng_seed, [t])`; the first attempt that validates is returned.
pub fn greedy_embed(l: &LogicalProblem, g: &HardwareGraph, rng_seed: u64, max_tries: usize) -> Result<Embedding> {
    if l.n() <= g.active_count() {
        for attempt in 0..max_tries {
            let mut rng = seed::rng(seed::derive(rng_seed, &[attempt as u64]));
            if let Some(e) = Router::new(l, g).run(&mut rng) {
                let report = validate_embedding(l, g, &e);
                debug_assert!(report.is_valid(), "{:?}", report.violations);
                if report.is_valid() {
                    return Ok(e);
                }
            }
        }
    }
    Err(Error::EmbedFailure { tries: max_tries })
}

fn placement_order<R: Rng>(adj: &[Vec<usize>], rng: &mut R) -> Vec<usize> {
    let n = adj.len();
    let mut starts: Vec<usize> = (0..n).collect();
    starts.shuffle(rng);
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next = adj[v].clone();
            next.shuffle(rng);
            for u in next {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order
}

#[derive(PartialEq)]
struct Visit(f64, usize);

impl Eq for Visit {}

impl Ord for Visit {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Visit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Router<'a> {
    g: &'a HardwareGraph,
    adj: Vec<Vec<usize>>,
    chains: Vec<Vec<usize>>,
    usage: Vec<u32>,
    history: Vec<f64>,
    present: f64,
}

impl<'a> Router<'a> {
    fn new(l: &LogicalProblem, g: &'a HardwareGraph) -> Self {
        Router {
            g,
            adj: l.neighbors(),
            chains: vec![Vec::new(); l.n()],
            usage: vec![0; g.num_qubits()],
            history: vec![0.0; g.num_qubits()],
            present: 0.5,
        }
    }

    fn run<R: Rng>(mut self, rng: &mut R) -> Option<Embedding> {
        for v in placement_order(&self.adj, rng) {
            self.route(v, rng)?;
        }
        for _ in 0..REROUTE_ROUNDS {
            if self.usage.iter().all(|&u| u <= 1) {
                return Some(Embedding::new(self.chains));
            }
            for (h, &u) in self.history.iter_mut().zip(&self.usage) {
                if u > 1 {
                    *h += 0.5;
                }
            }
            self.present *= PRESENT_GROWTH;
            let mut order: Vec<usize> = (0..self.chains.len()).collect();
            order.shuffle(rng);
            for v in order {
                for &q in &self.chains[v] {
                    self.usage[q] -= 1;
                }
                self.chains[v].clear();
                self.route(v, rng)?;
            }
        }
        self.usage.iter().all(|&u| u <= 1).then(|| Embedding::new(self.chains))
    }

    fn cost(&self, q: usize) -> f64 {
        (1.0 + self.history[q]) * (1.0 + self.present * self.usage[q] as f64)
    }

    /// Path costs from chain `u` to every active qubit, plus predecessors.
    fn search(&self, u: usize) -> (Vec<f64>, Vec<usize>) {
        let n = self.g.num_qubits();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        for &q in &self.chains[u] {
            dist[q] = 0.0;
            heap.push(Visit(0.0, q));
        }
        while let Some(Visit(d, q)) = heap.pop() {
            if d > dist[q] {
                continue;
            }
            for &p in self.g.neighbors(q) {
                let nd = d + self.cost(p);
                if nd < dist[p] {
                    dist[p] = nd;
                    parent[p] = q;
                    heap.push(Visit(nd, p));
                }
            }
        }
        (dist, parent)
    }

    fn route<R: Rng>(&mut self, v: usize, rng: &mut R) -> Option<()> {
        let placed: Vec<usize> = self.adj[v]
            .iter()
            .copied()
            .filter(|&u| !self.chains[u].is_empty())
            .collect();
        let candidates = (0..self.g.num_qubits()).filter(|&q| self.g.is_active(q));
        let chain = if placed.is_empty() {
            let least = candidates.clone().map(|q| self.usage[q]).min()?;
            let pool: Vec<usize> = candidates.filter(|&q| self.usage[q] == least).collect();
            vec![*pool.choose(rng)?]
        } else {
            let searches: Vec<(Vec<f64>, Vec<usize>)> = placed.iter().map(|&u| self.search(u)).collect();
            let extra = (placed.len() - 1) as f64;
            let mut best = f64::INFINITY;
            let mut roots = Vec::new();
            for q in candidates {
                let total: f64 = searches.iter().map(|(d, _)| d[q]).sum();
                // Roots inside a neighbor chain are never useful.
                if !total.is_finite() || searches.iter().any(|(d, _)| d[q] == 0.0) {
                    continue;
                }
                // The root's own cost is counted once, not once per search.
                let total = total - extra * self.cost(q);
                if total < best {
                    best = total;
                    roots.clear();
                }
                if total == best {
                    roots.push(q);
                }
            }
            let root = *roots.choose(rng)?;
            let mut chain = vec![root];
            for (dist, parent) in &searches {
                let mut q = root;
                while dist[q] > 0.0 && dist[parent[q]] > 0.0 {
                    q = parent[q];
                    chain.push(q);
                }
            }
            chain.sort_unstable();
            chain.dedup();
            chain
        };
        for &q in &chain {
            self.usage[q] += 1;
        }
        self.chains[v] = chain;
        Some(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> LogicalProblem {
        LogicalProblem::from_terms(3, &[0.0; 3], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn dw2_sized_grid() {
        let g = build_chimera(&ChimeraSpec::ideal(8, 8, 4)).unwrap();
        assert_eq!(g.num_qubits(), 512);
        // 64 cells x 16 intra-cell edges plus 2 * 7 * 8 * 4 ladder edges.
        assert_eq!(g.edges().len(), 64 * 16 + 2 * 7 * 8 * 4);
        let spec = ChimeraSpec::ideal(8, 8, 4);
        let intra = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|&(a, b)| g.has_edge(spec.qubit(3, 5, 0, a), spec.qubit(3, 5, 1, b)))
            .count();
        assert_eq!(intra, 16);
    }

    #[test]
    fn dw2x_sized_grid() {
        let g = build_chimera(&ChimeraSpec::ideal(12, 12, 4)).unwrap();
        assert_eq!(g.num_qubits(), 1152);
    }

    #[test]
    fn smallest_cell() {
        let g = build_chimera(&ChimeraSpec::ideal(1, 1, 1)).unwrap();
        assert_eq!(g.num_qubits(), 2);
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn invalid_specs() {
        assert!(build_chimera(&ChimeraSpec::ideal(0, 1, 4)).is_err());
        let mut spec = ChimeraSpec::ideal(1, 1, 4);
        spec.dead = vec![8];
        assert!(build_chimera(&spec).is_err());
        assert!(ChimeraSpec::with_random_dead(1, 1, 1, 3, 0).is_err());
    }

    #[test]
    fn degree_bound_and_masking() {
        let ideal = build_chimera(&ChimeraSpec::ideal(4, 3, 4)).unwrap();
        let spec = ChimeraSpec::with_random_dead(4, 3, 4, 10, 99).unwrap();
        assert_eq!(spec.dead.len(), 10);
        let masked = build_chimera(&spec).unwrap();
        for q in 0..ideal.num_qubits() {
            assert!(ideal.degree(q) <= 4 + 2);
        }
        assert!(masked.edges().is_subset(ideal.edges()));
        for &q in &spec.dead {
            assert_eq!(masked.degree(q), 0);
        }
    }

    #[test]
    fn triangle_on_one_cell() {
        let g = build_chimera(&ChimeraSpec::ideal(1, 1, 4)).unwrap();
        // Smallest valid total chain length, found by exhaustive search over
        // all chain assignments with at most 4 qubits in total.
        let minimum = exhaustive_min_total(&triangle(), &g, 4).expect("triangle embeds in one cell");
        assert_eq!(minimum, 4);
        for s in 0..20 {
            let e = greedy_embed(&triangle(), &g, s, DEFAULT_EMBED_TRIES).unwrap();
            assert!(validate_embedding(&triangle(), &g, &e).is_valid());
            assert!(e.total_qubits() <= 4);
        }
    }

    fn exhaustive_min_total(l: &LogicalProblem, g: &HardwareGraph, limit: usize) -> Option<usize> {
        // Assign each physical qubit to one logical chain or to none.
        let n = g.num_qubits();
        let k = l.n() + 1;
        let mut best: Option<usize> = None;
        let mut assign = vec![0usize; n];
        loop {
            let used = assign.iter().filter(|&&a| a > 0).count();
            if used <= limit && best.is_none_or(|b| used < b) {
                let chains = (1..k).map(|c| (0..n).filter(|&q| assign[q] == c).collect()).collect();
                if validate_embedding(l, g, &Embedding::new(chains)).is_valid() {
                    best = Some(used);
                }
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    return best;
                }
                assign[pos] += 1;
                if assign[pos] < k {
                    break;
                }
                assign[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn single_logical_qubit() {
        let g = build_chimera(&ChimeraSpec::ideal(2, 2, 4)).unwrap();
        let e = greedy_embed(&LogicalProblem::new(1), &g, 3, 1).unwrap();
        assert_eq!(e.chains.len(), 1);
        assert_eq!(e.chains[0].len(), 1);
    }

    #[test]
    fn same_seed_same_embedding() {
        let mut l = LogicalProblem::new(8);
        for i in 0..8 {
            for j in i + 1..8 {
                if (i * 7 + j * 3) % 4 != 0 {
                    l.add_coupling(i, j, 1.0).unwrap();
                }
            }
        }
        let g = build_chimera(&ChimeraSpec::ideal(4, 4, 4)).unwrap();
        let a = greedy_embed(&l, &g, 42, 8).unwrap();
        let b = greedy_embed(&l, &g, 42, 8).unwrap();
        assert_eq!(a, b);
        assert!(validate_embedding(&l, &g, &a).is_valid());
    }

    #[test]
    fn complete_graph_embeds_on_chimera() {
        let n = 8;
        let mut l = LogicalProblem::new(n);
        for i in 0..n {
            for j in i + 1..n {
                l.add_coupling(i, j, 1.0).unwrap();
            }
        }
        let g = build_chimera(&ChimeraSpec::with_random_dead(8, 8, 4, 8, 5).unwrap()).unwrap();
        let e = greedy_embed(&l, &g, 1, DEFAULT_EMBED_TRIES).unwrap();
        assert!(validate_embedding(&l, &g, &e).is_valid());
    }

    #[test]
    fn too_many_logical_qubits_fails() {
        let g = build_chimera(&ChimeraSpec::ideal(1, 1, 1)).unwrap();
        let r = greedy_embed(&LogicalProblem::new(3), &g, 0, 4);
        assert!(matches!(r, Err(Error::EmbedFailure { tries: 4 })));
    }
}
