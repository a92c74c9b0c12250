//! Logical and physical Ising problems, spin vectors and energy evaluation.
//!
//! Spins take values in {-1, +1}; energies are minimized. A logical problem is
//!
//! ```text
//! E(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j
//! ```
//!
//! and a physical problem has the same form over hardware qubits, with the
//! couplings split into problem couplings and (ferromagnetic) chain couplings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for energy comparisons.
pub const ENERGY_TOL: f64 = 1e-9;

/// Coupling magnitudes below this are treated as absent.
pub(crate) const ZERO_TOL: f64 = 1e-12;

/// Unordered pair of indices, stored as `(min, max)`.
pub type Edge = (usize, usize);

pub fn edge(a: usize, b: usize) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::Parameter(format!(
                "spin {pos} has value {}, expected -1 or +1",
                values[pos]
            )));
        }
        Ok(SpinVector(values))
    }

    pub fn filled(len: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        SpinVector(vec![value; len])
    }

    /// Spin `i` is +1 iff bit `i` of `bits` is set.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        SpinVector((0..len).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn set(&mut self, i: usize, v: i8) {
        assert!(v == 1 || v == -1);
        self.0[i] = v;
    }

    /// `'1'` for +1 and `'0'` for -1, index 0 first.
    pub fn bitstring(&self) -> String {
        self.0.iter().map(|&v| if v > 0 { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '1' => Ok(1),
                '0' => Ok(-1),
                _ => Err(Error::Parameter(format!(
                    "invalid character {ch:?} at position {i} of bitstring"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SpinVector)
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }
}

impl fmt::Display for SpinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bitstring())
    }
}

pub trait Energy {
    fn num_spins(&self) -> usize;

    fn energy(&self, s: &SpinVector) -> Result<f64>;
}

fn check_len(expected: usize, s: &SpinVector) -> Result<()> {
    if s.len() != expected {
        return Err(Error::Dimension {
            expected,
            found: s.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalProblem {
    n: usize,
    h: Vec<f64>,
    couplings: BTreeMap<Edge, f64>,
    offset: f64,
}

impl LogicalProblem {
    pub fn new(n: usize) -> Self {
        LogicalProblem {
            n,
            h: vec![0.0; n],
            couplings: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn from_terms(n: usize, h: &[f64], couplings: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if h.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: h.len(),
            });
        }
        let mut p = LogicalProblem::new(n);
        p.h.copy_from_slice(h);
        for (i, j, v) in couplings {
            p.add_coupling(i, j, v)?;
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn biases(&self) -> &[f64] {
        &self.h
    }

    pub fn bias(&self, i: usize) -> f64 {
        self.h[i]
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn add_bias(&mut self, i: usize, v: f64) -> Result<()> {
        if i >= self.n {
            return Err(Error::Problem(format!("bias index {i} out of range 0..{}", self.n)));
        }
        self.h[i] += v;
        Ok(())
    }

    /// Adds `v` to `J_ij`. A coupling that cancels to zero leaves the edge set.
    pub fn add_coupling(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i == j {
            return Err(Error::Problem(format!("self-coupling on spin {i}")));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::Problem(format!(
                "coupling ({i}, {j}) out of range 0..{}",
                self.n
            )));
        }
        let key = edge(i, j);
        let entry = self.couplings.entry(key).or_insert(0.0);
        *entry += v;
        if entry.abs() < ZERO_TOL {
            self.couplings.remove(&key);
        }
        Ok(())
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings.get(&edge(i, j)).copied().unwrap_or(0.0)
    }

    /// Logical edge set with coupling values, in lexicographic order.
    pub fn couplings(&self) -> &BTreeMap<Edge, f64> {
        &self.couplings
    }

    /// Adjacency lists of the logical edge set.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in self.couplings.keys() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    pub fn compact(&self) -> CompactIsing {
        let mut model = CompactIsing::with_variables((0..self.n).collect());
        model.h.copy_from_slice(&self.h);
        for (&(i, j), &v) in &self.couplings {
            model.push_edge(i, j, v);
        }
        model.offset = self.offset;
        model
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: LogicalFile = serde_json::from_str(text)?;
        let mut p = LogicalProblem::new(file.n);
        for t in file.h {
            p.add_bias(t.i, t.v)?;
        }
        for t in file.j {
            p.add_coupling(t.i, t.j, t.v)?;
        }
        p.offset = file.offset;
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = LogicalFile {
            n: self.n,
            h: self
                .h
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| BiasTerm { i, v })
                .collect(),
            j: self
                .couplings
                .iter()
                .map(|(&(i, j), &v)| CouplingTerm { i, j, v })
                .collect(),
            offset: self.offset,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

impl Energy for LogicalProblem {
    fn num_spins(&self) -> usize {
        self.n
    }

    fn energy(&self, s: &SpinVector) -> Result<f64> {
        check_len(self.n, s)?;
        let linear: f64 = self.h.iter().zip(s.values()).map(|(h, &v)| h * v as f64).sum();
        let quadratic: f64 = self
            .couplings
            .iter()
            .map(|(&(i, j), &v)| v * (s.get(i) * s.get(j)) as f64)
            .sum();
        Ok(self.offset + linear + quadratic)
    }
}

#[derive(Serialize, Deserialize)]
struct BiasTerm {
    i: usize,
    v: f64,
}

#[derive(Serialize, Deserialize)]
struct CouplingTerm {
    i: usize,
    j: usize,
    v: f64,
}

#[derive(Serialize, Deserialize)]
struct LogicalFile {
    n: usize,
    #[serde(default)]
    h: Vec<BiasTerm>,
    #[serde(default, rename = "J")]
    j: Vec<CouplingTerm>,
    #[serde(default, skip_serializing_if = "is_zero")]
    offset: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// An embedded problem over hardware qubits.
///
/// Every qubit that belongs to a chain carries a bias entry, possibly zero.
/// Problem and chain couplings are keyed by disjoint sets of hardware edges.
/// `scale` is the cumulative factor applied to the logical terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalProblem {
    num_qubits: usize,
    biases: BTreeMap<usize, f64>,
    problem_couplings: BTreeMap<Edge, f64>,
    chain_couplings: BTreeMap<Edge, f64>,
    scale: f64,
}

impl PhysicalProblem {
    pub fn new(
        num_qubits: usize,
        biases: BTreeMap<usize, f64>,
        problem_couplings: BTreeMap<Edge, f64>,
        chain_couplings: BTreeMap<Edge, f64>,
        scale: f64,
    ) -> Result<Self> {
        if let Some((&q, _)) = biases.range(num_qubits..).next() {
            return Err(Error::Problem(format!("bias on qubit {q} outside 0..{num_qubits}")));
        }
        for (&(a, b), _) in problem_couplings.iter().chain(chain_couplings.iter()) {
            if a >= b {
                return Err(Error::Problem(format!(
                    "edge ({a}, {b}) is not a normalized pair of distinct qubits"
                )));
            }
            if b >= num_qubits {
                return Err(Error::Problem(format!("edge ({a}, {b}) outside 0..{num_qubits}")));
            }
        }
        if let Some(e) = problem_couplings.keys().find(|e| chain_couplings.contains_key(e)) {
            return Err(Error::Problem(format!(
                "edge {e:?} is both a problem and a chain coupling"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Problem(format!("scale must be positive, got {scale}")));
        }
        Ok(PhysicalProblem {
            num_qubits,
            biases,
            problem_couplings,
            chain_couplings,
            scale,
        })
    }

    /// The logical problem placed one-to-one on qubits `0..n`, without chains.
    /// The constant offset is dropped.
    pub fn from_logical(l: &LogicalProblem) -> Self {
        let biases = l
            .biases()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        PhysicalProblem {
            num_qubits: l.n(),
            biases,
            problem_couplings: l.couplings().clone(),
            chain_couplings: BTreeMap::new(),
            scale: 1.0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn biases(&self) -> &BTreeMap<usize, f64> {
        &self.biases
    }

    pub fn bias(&self, q: usize) -> f64 {
        self.biases.get(&q).copied().unwrap_or(0.0)
    }

    pub fn problem_couplings(&self) -> &BTreeMap<Edge, f64> {
        &self.problem_couplings
    }

    pub fn chain_couplings(&self) -> &BTreeMap<Edge, f64> {
        &self.chain_couplings
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Sorted set of qubits referenced by any term.
    pub fn variables(&self) -> Vec<usize> {
        let mut set: BTreeSet<usize> = self.biases.keys().copied().collect();
        for &(a, b) in self.problem_couplings.keys().chain(self.chain_couplings.keys()) {
            set.insert(a);
            set.insert(b);
        }
        set.into_iter().collect()
    }

    /// Every programmed value: biases, problem couplings, then chain couplings.
    pub fn programmed_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.biases
            .values()
            .chain(self.problem_couplings.values())
            .chain(self.chain_couplings.values())
            .copied()
    }

    /// Largest magnitude over biases and problem couplings (chains excluded).
    pub fn max_problem_term(&self) -> (f64, f64) {
        let max_h = self.biases.values().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_j = self.problem_couplings.values().fold(0.0f64, |m, v| m.max(v.abs()));
        (max_h, max_j)
    }

    /// Scales problem terms by one factor so that the largest bias magnitude
    /// is at most `h_range`, the largest problem coupling at most `j_range`,
    /// and at least one of them meets its bound. Chain couplings are left
    /// untouched: they are expressed in the rescaled units.
    pub fn rescale_to_hardware(&self, h_range: f64, j_range: f64) -> Result<Rescaled> {
        if !(h_range > 0.0 && j_range > 0.0) {
            return Err(Error::Parameter(format!(
                "hardware ranges must be positive, got h={h_range}, J={j_range}"
            )));
        }
        let (max_h, max_j) = self.max_problem_term();
        let need = (max_h / h_range).max(max_j / j_range);
        if need < ZERO_TOL {
            return Ok(Rescaled {
                problem: self.clone(),
                factor: 1.0,
                all_zero: true,
            });
        }
        let factor = 1.0 / need;
        let mut problem = self.clone();
        problem.biases.values_mut().for_each(|v| *v *= factor);
        problem.problem_couplings.values_mut().for_each(|v| *v *= factor);
        problem.scale *= factor;
        Ok(Rescaled {
            problem,
            factor,
            all_zero: false,
        })
    }

    /// Dense view of the symmetric coupling matrix `A`, biases on the diagonal.
    pub fn to_matrix(&self) -> CouplingMatrix {
        let mut entries = BTreeMap::new();
        for (&q, &v) in &self.biases {
            entries.insert((q, q), v);
        }
        for (&e, &v) in self.problem_couplings.iter().chain(self.chain_couplings.iter()) {
            entries.insert(e, v);
        }
        CouplingMatrix {
            n: self.num_qubits,
            entries,
        }
    }

    /// Inverse of [`to_matrix`](Self::to_matrix); off-diagonal entries listed
    /// in `chain_edges` become chain couplings.
    pub fn from_matrix(matrix: &CouplingMatrix, chain_edges: &BTreeSet<Edge>, scale: f64) -> Result<Self> {
        let mut biases = BTreeMap::new();
        let mut problem = BTreeMap::new();
        let mut chain = BTreeMap::new();
        for (&(a, b), &v) in &matrix.entries {
            if a == b {
                biases.insert(a, v);
            } else if chain_edges.contains(&(a, b)) {
                chain.insert((a, b), v);
            } else {
                problem.insert((a, b), v);
            }
        }
        PhysicalProblem::new(matrix.n, biases, problem, chain, scale)
    }

    pub fn compact(&self) -> CompactIsing {
        let vars = self.variables();
        let mut model = CompactIsing::with_variables(vars);
        for (&q, &v) in &self.biases {
            let i = model.local(q).expect("bias qubit is a variable");
            model.h[i] += v;
        }
        for (&(a, b), &v) in self.problem_couplings.iter().chain(self.chain_couplings.iter()) {
            let (i, j) = (model.local(a).unwrap(), model.local(b).unwrap());
            model.push_edge(i, j, v);
        }
        model
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PhysicalFile = serde_json::from_str(text)?;
        let mut biases = BTreeMap::new();
        for t in file.biases {
            biases.insert(t.q, t.v);
        }
        let to_map = |terms: Vec<PhysicalCoupling>| -> Result<BTreeMap<Edge, f64>> {
            let mut map = BTreeMap::new();
            for t in terms {
                if map.insert(edge(t.a, t.b), t.v).is_some() {
                    return Err(Error::Problem(format!("duplicate edge ({}, {})", t.a, t.b)));
                }
            }
            Ok(map)
        };
        PhysicalProblem::new(
            file.num_qubits,
            biases,
            to_map(file.problem_couplings)?,
            to_map(file.chain_couplings)?,
            file.scale,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let couplings =
            |map: &BTreeMap<Edge, f64>| map.iter().map(|(&(a, b), &v)| PhysicalCoupling { a, b, v }).collect();
        let file = PhysicalFile {
            num_qubits: self.num_qubits,
            scale: self.scale,
            biases: self.biases.iter().map(|(&q, &v)| PhysicalBias { q, v }).collect(),
            problem_couplings: couplings(&self.problem_couplings),
            chain_couplings: couplings(&self.chain_couplings),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub(crate) fn biases_mut(&mut self) -> &mut BTreeMap<usize, f64> {
        &mut self.biases
    }

    pub(crate) fn problem_couplings_mut(&mut self) -> &mut BTreeMap<Edge, f64> {
        &mut self.problem_couplings
    }

    pub(crate) fn chain_couplings_mut(&mut self) -> &mut BTreeMap<Edge, f64> {
        &mut self.chain_couplings
    }
}

impl Energy for PhysicalProblem {
    fn num_spins(&self) -> usize {
        self.num_qubits
    }

    fn energy(&self, s: &SpinVector) -> Result<f64> {
        check_len(self.num_qubits, s)?;
        let linear: f64 = self.biases.iter().map(|(&q, &v)| v * s.get(q) as f64).sum();
        let quadratic: f64 = self
            .problem_couplings
            .iter()
            .chain(self.chain_couplings.iter())
            .map(|(&(a, b), &v)| v * (s.get(a) * s.get(b)) as f64)
            .sum();
        Ok(linear + quadratic)
    }
}

#[derive(Serialize, Deserialize)]
struct PhysicalBias {
    q: usize,
    v: f64,
}

#[derive(Serialize, Deserialize)]
struct PhysicalCoupling {
    a: usize,
    b: usize,
    v: f64,
}

#[derive(Serialize, Deserialize)]
struct PhysicalFile {
    num_qubits: usize,
    #[serde(default = "unit_scale")]
    scale: f64,
    #[serde(default)]
    biases: Vec<PhysicalBias>,
    #[serde(default)]
    problem_couplings: Vec<PhysicalCoupling>,
    #[serde(default)]
    chain_couplings: Vec<PhysicalCoupling>,
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Clone, Debug)]
pub struct Rescaled {
    pub problem: PhysicalProblem,
    pub factor: f64,
    /// Set when every problem term was zero and nothing was scaled.
    pub all_zero: bool,
}

/// Sparse symmetric matrix; `(i, i)` holds biases, `(i, j)` with `i < j` holds
/// couplings, so `E(s) = sum_i A_ii s_i + sum_{i<j} A_ij s_i s_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    pub n: usize,
    pub entries: BTreeMap<Edge, f64>,
}

impl CouplingMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(&edge(i, j)).copied().unwrap_or(0.0)
    }
}

/// Dense-indexed Ising model over a subset of spins, used by the solvers.
#[derive(Clone, Debug)]
pub struct CompactIsing {
    /// Original index of each local variable.
    pub variables: Vec<usize>,
    pub h: Vec<f64>,
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub edges: Vec<(usize, usize, f64)>,
    pub offset: f64,
}

impl CompactIsing {
    fn with_variables(variables: Vec<usize>) -> Self {
        let n = variables.len();
        CompactIsing {
            variables,
            h: vec![0.0; n],
            neighbors: vec![Vec::new(); n],
            edges: Vec::new(),
            offset: 0.0,
        }
    }

    fn local(&self, q: usize) -> Option<usize> {
        self.variables.binary_search(&q).ok()
    }

    fn push_edge(&mut self, i: usize, j: usize, v: f64) {
        self.neighbors[i].push((j, v));
        self.neighbors[j].push((i, v));
        self.edges.push((i, j, v));
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn energy(&self, s: &[i8]) -> f64 {
        let linear: f64 = self.h.iter().zip(s).map(|(h, &v)| h * v as f64).sum();
        let quadratic: f64 = self.edges.iter().map(|&(i, j, v)| v * (s[i] * s[j]) as f64).sum();
        self.offset + linear + quadratic
    }

    /// `h_i + sum_j J_ij s_j`.
    pub fn local_field(&self, s: &[i8], i: usize) -> f64 {
        self.neighbors[i]
            .iter()
            .fold(self.h[i], |acc, &(j, v)| acc + v * s[j] as f64)
    }

    /// Lifts a local assignment to a full vector of `len` spins; spins that
    /// are not variables of the model are set to +1.
    pub fn expand(&self, s: &[i8], len: usize) -> SpinVector {
        let mut full = vec![1i8; len];
        for (&q, &v) in self.variables.iter().zip(s) {
            full[q] = v;
        }
        SpinVector(full)
    }
}
