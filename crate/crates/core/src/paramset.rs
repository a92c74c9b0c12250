//! Parameter setting: distributing logical terms over chains, chain couplings
//! and spin-reversal transformations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{validate_embedding, Embedding};
use crate::error::{Error, Result};
use crate::hardware::HardwareGraph;
use crate::problem::{Edge, LogicalProblem, PhysicalProblem, SpinVector};
use crate::seed;

pub const DEFAULT_H_MIN: f64 = 1.0 / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Single,
    Even,
    Weighted,
    WeightedRegularized,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::Single,
        StrategyKind::Even,
        StrategyKind::Weighted,
        StrategyKind::WeightedRegularized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Single => "single",
            StrategyKind::Even => "even",
            StrategyKind::Weighted => "weighted",
            StrategyKind::WeightedRegularized => "weighted-regularized",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SrtMode {
    /// Biases, problem couplings and chain couplings are all transformed;
    /// the energy spectrum is preserved under `s -> r * s`.
    #[default]
    AllTerms,
    /// Chain couplings are left as programmed.
    ProblemTermsOnly,
}

impl FromStr for SrtMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-terms" => Ok(SrtMode::AllTerms),
            "problem-terms-only" => Ok(SrtMode::ProblemTermsOnly),
            _ => Err(Error::Config(format!("unknown SRT mode {s:?}"))),
        }
    }
}

impl fmt::Display for SrtMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SrtMode::AllTerms => "all-terms",
            SrtMode::ProblemTermsOnly => "problem-terms-only",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Srt {
    pub vector: SpinVector,
    pub mode: SrtMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamConfig {
    pub strategy: StrategyKind,
    /// Chain-coupling magnitude; chains are programmed with `-chain_coupling`.
    pub chain_coupling: f64,
    pub h_min: f64,
    pub srt: Option<Srt>,
}

impl ParamConfig {
    pub fn new(strategy: StrategyKind, chain_coupling: f64) -> Self {
        ParamConfig {
            strategy,
            chain_coupling,
            h_min: DEFAULT_H_MIN,
            srt: None,
        }
    }

    pub fn with_h_min(mut self, h_min: f64) -> Self {
        self.h_min = h_min;
        self
    }

    pub fn with_srt(mut self, vector: SpinVector, mode: SrtMode) -> Self {
        self.srt = Some(Srt { vector, mode });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chain_coupling > 0.0 && self.chain_coupling.is_finite()) {
            return Err(Error::Parameter(format!(
                "chain coupling must be positive, got {}",
                self.chain_coupling
            )));
        }
        if !(0.0..1.0).contains(&self.h_min) {
            return Err(Error::Parameter(format!(
                "h_min must lie in [0, 1), got {}",
                self.h_min
            )));
        }
        Ok(())
    }
}

/// Per-member weights `w = d / D`, aligned with the embedding's chain order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    pub weights: Vec<Vec<f64>>,
    /// Active problem couplers from each member to logically adjacent chains.
    pub degrees: Vec<Vec<usize>>,
    pub totals: Vec<usize>,
}

impl WeightTable {
    /// Uniform weights `1/K_i`; what [`compute_weights`] falls back to when a
    /// chain has no problem couplers.
    pub fn uniform(e: &Embedding) -> Self {
        WeightTable {
            weights: e.chains.iter().map(|c| vec![1.0 / c.len() as f64; c.len()]).collect(),
            degrees: e.chains.iter().map(|c| vec![0; c.len()]).collect(),
            totals: vec![0; e.num_logical()],
        }
    }
}

/// Counts, for every chain member, the hardware couplers reaching chains of
/// logically adjacent qubits. Chain-internal couplers are excluded.
pub fn compute_weights(l: &LogicalProblem, g: &HardwareGraph, e: &Embedding) -> WeightTable {
    let owner = e.owner_map();
    let mut degrees = Vec::with_capacity(e.num_logical());
    for (i, chain) in e.chains.iter().enumerate() {
        let d: Vec<usize> = chain
            .iter()
            .map(|&q| {
                g.neighbors(q)
                    .iter()
                    .filter(|p| match owner.get(p) {
                        Some(&j) => j != i && l.coupling(i, j) != 0.0,
                        None => false,
                    })
                    .count()
            })
            .collect();
        degrees.push(d);
    }
    let totals: Vec<usize> = degrees.iter().map(|d| d.iter().sum()).collect();
    let weights = degrees
        .iter()
        .zip(&totals)
        .map(|(d, &total)| {
            if total == 0 {
                vec![1.0 / d.len() as f64; d.len()]
            } else {
                d.iter().map(|&x| x as f64 / total as f64).collect()
            }
        })
        .collect();
    WeightTable {
        weights,
        degrees,
        totals,
    }
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Splits `value` evenly over `k` ranked slots. When the even share falls
/// below `h_min`, the first `floor(|value| / h_min)` slots get `h_min` with
/// the sign of `value`, the next slot gets the remainder and the rest get 0.
pub fn even_split(value: f64, k: usize, h_min: f64) -> Vec<f64> {
    if value == 0.0 || k == 0 {
        return vec![0.0; k];
    }
    let share = value / k as f64;
    if h_min == 0.0 || share.abs() >= h_min {
        return vec![share; k];
    }
    let full = ((value.abs() / h_min).floor() as usize).min(k - 1);
    let unit = h_min * sign(value);
    let mut out = vec![0.0; k];
    out[..full].fill(unit);
    out[full] = value - full as f64 * unit;
    out
}

/// Splits `value` proportionally to `weights`. Shares below `h_min` are
/// zeroed and the value is redistributed over the surviving weights until no
/// share is clipped. If every share would be clipped, the largest weight
/// (first on ties) takes the whole value.
pub fn weighted_split(value: f64, weights: &[f64], h_min: f64) -> Vec<f64> {
    let mut out = vec![0.0; weights.len()];
    if value == 0.0 || weights.is_empty() {
        return out;
    }
    let mut alive: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > 0.0).collect();
    loop {
        let total: f64 = alive.iter().map(|&k| weights[k]).sum();
        let survivors: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&k| (value * weights[k] / total).abs() >= h_min)
            .collect();
        if survivors.len() == alive.len() {
            for &k in &alive {
                out[k] = value * weights[k] / total;
            }
            return out;
        }
        if survivors.is_empty() {
            let top = alive
                .iter()
                .copied()
                .fold(alive[0], |best, k| if weights[k] > weights[best] { k } else { best });
            out[top] = value;
            return out;
        }
        alive = survivors;
    }
}

/// Chain positions ranked by decreasing problem-coupler count, ties by
/// increasing physical index.
fn ranked_members(chain: &[usize], degrees: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..chain.len()).collect();
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(chain[a].cmp(&chain[b])));
    order
}

fn scatter(ranked: &[usize], values: Vec<f64>) -> Vec<f64> {
    let mut out = vec![0.0; ranked.len()];
    for (&k, v) in ranked.iter().zip(values) {
        out[k] = v;
    }
    out
}

fn distribute_bias(strategy: StrategyKind, h: f64, chain: &[usize], w: &WeightTable, i: usize, h_min: f64) -> Vec<f64> {
    let k = chain.len();
    let degrees = &w.degrees[i];
    if h == 0.0 {
        return vec![0.0; k];
    }
    match strategy {
        StrategyKind::Single => {
            if k > 1 && w.totals[i] == 0 {
                log::warn!("logical qubit {i} has no problem couplers; single strategy uses its lowest-index member");
            }
            let target = ranked_members(chain, degrees)[0];
            let mut out = vec![0.0; k];
            out[target] = h;
            out
        }
        StrategyKind::Even => {
            let ranked = ranked_members(chain, degrees);
            scatter(&ranked, even_split(h, k, h_min))
        }
        StrategyKind::Weighted => weighted_split(h, &w.weights[i], h_min),
        StrategyKind::WeightedRegularized => {
            if h.abs() < k as f64 * h_min {
                let ranked = ranked_members(chain, degrees);
                return scatter(&ranked, even_split(h, k, h_min));
            }
            let base = h_min * sign(h);
            let remainder = h - k as f64 * base;
            w.weights[i].iter().map(|wk| base + remainder * wk).collect()
        }
    }
}

/// Distributes the logical terms over the embedding without chain couplings
/// or rescaling. Every chain member gets a bias entry and every hardware
/// coupler between logically adjacent chains a coupling entry, zeros included.
pub fn distribute_terms(
    l: &LogicalProblem,
    g: &HardwareGraph,
    e: &Embedding,
    strategy: StrategyKind,
    h_min: f64,
) -> Result<PhysicalProblem> {
    validate_embedding(l, g, e).into_result()?;
    let w = compute_weights(l, g, e);
    let mut biases = BTreeMap::new();
    for (i, chain) in e.chains.iter().enumerate() {
        let values = distribute_bias(strategy, l.bias(i), chain, &w, i, h_min);
        for (&q, v) in chain.iter().zip(values) {
            biases.insert(q, v);
        }
    }
    let mut couplings: BTreeMap<Edge, f64> = BTreeMap::new();
    for (&(i, j), &value) in l.couplings() {
        let couplers = e.couplers_between(g, i, j);
        let values = match strategy {
            StrategyKind::Single => {
                let mut v = vec![0.0; couplers.len()];
                v[0] = value;
                v
            }
            _ => even_split(value, couplers.len(), h_min),
        };
        couplings.extend(couplers.into_iter().zip(values));
    }
    PhysicalProblem::new(g.num_qubits(), biases, couplings, BTreeMap::new(), 1.0)
}

/// Full parameterization: distribute, rescale problem terms to unit maximum,
/// program every chain-internal coupler with `-c`, then apply the optional
/// spin-reversal transformation.
pub fn parameterize(
    l: &LogicalProblem,
    g: &HardwareGraph,
    e: &Embedding,
    cfg: &ParamConfig,
) -> Result<PhysicalProblem> {
    cfg.validate()?;
    let distributed = distribute_terms(l, g, e, cfg.strategy, cfg.h_min)?;
    let rescaled = distributed.rescale_to_hardware(1.0, 1.0)?;
    if rescaled.all_zero {
        log::warn!("all problem terms are zero; no rescaling applied");
    }
    let mut p = rescaled.problem;
    for i in 0..e.num_logical() {
        for edge in e.chain_edges(g, i) {
            p.chain_couplings_mut().insert(edge, -cfg.chain_coupling);
        }
    }
    match &cfg.srt {
        Some(srt) => apply_srt(&p, &srt.vector, srt.mode),
        None => Ok(p),
    }
}

/// Largest total magnitude of problem terms (biases and problem couplings)
/// touching any one chain. A chain coupling strictly above this keeps every
/// chain intact in all ground states.
pub fn chain_break_bound(p: &PhysicalProblem, e: &Embedding) -> f64 {
    let owner = e.owner_map();
    let mut load = vec![0.0f64; e.num_logical()];
    for (q, v) in p.biases() {
        if let Some(&i) = owner.get(q) {
            load[i] += v.abs();
        }
    }
    for (&(a, b), v) in p.problem_couplings() {
        for q in [a, b] {
            if let Some(&i) = owner.get(&q) {
                load[i] += v.abs();
            }
        }
    }
    load.into_iter().fold(0.0, f64::max)
}

/// Applies `r`: biases become `r_q h_q`, problem couplings `r_a r_b J_ab`, and
/// chain couplings likewise in [`SrtMode::AllTerms`].
pub fn apply_srt(p: &PhysicalProblem, r: &SpinVector, mode: SrtMode) -> Result<PhysicalProblem> {
    if r.len() != p.num_qubits() {
        return Err(Error::Dimension {
            expected: p.num_qubits(),
            found: r.len(),
        });
    }
    let mut out = p.clone();
    for (&q, v) in out.biases_mut().iter_mut() {
        *v *= r.get(q) as f64;
    }
    for (&(a, b), v) in out.problem_couplings_mut().iter_mut() {
        *v *= (r.get(a) * r.get(b)) as f64;
    }
    if mode == SrtMode::AllTerms {
        for (&(a, b), v) in out.chain_couplings_mut().iter_mut() {
            *v *= (r.get(a) * r.get(b)) as f64;
        }
    }
    Ok(out)
}

/// `count` reversal vectors of length `n`; the first is the identity. With
/// `chain_constant`, each chain of `e` is flipped as a unit and qubits outside
/// every chain stay +1.
pub fn srt_set(
    n: usize,
    count: usize,
    rng_seed: u64,
    chain_constant: bool,
    e: Option<&Embedding>,
) -> Result<Vec<SpinVector>> {
    if count == 0 {
        return Err(Error::Parameter("SRT count must be at least 1".into()));
    }
    let chains = match (chain_constant, e) {
        (true, None) => return Err(Error::Parameter("chain-constant SRTs need an embedding".into())),
        (true, Some(e)) => Some(e),
        (false, _) => None,
    };
    let mut rng = seed::rng(rng_seed);
    let mut out = vec![SpinVector::filled(n, 1)];
    for _ in 1..count {
        let mut r = SpinVector::filled(n, 1);
        match chains {
            Some(e) => {
                for chain in &e.chains {
                    let flip: i8 = if rng.gen_bool(0.5) { -1 } else { 1 };
                    for &q in chain {
                        if q < n {
                            r.set(q, flip);
                        }
                    }
                }
            }
            None => {
                for q in 0..n {
                    if rng.gen_bool(0.5) {
                        r.flip(q);
                    }
                }
            }
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::{build_chimera, greedy_embed, ChimeraSpec, DEFAULT_EMBED_TRIES};
    use crate::problem::{Energy, ENERGY_TOL};

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    /// Path graph 0-1-2-3-4 with logical qubit 0 on chain [0, 1, 2], logical
    /// qubit 1 on chain [3], logical qubit 2 on chain [4].
    fn path_fixture(h0: f64) -> (LogicalProblem, HardwareGraph, Embedding) {
        let g = HardwareGraph::new(6, [(0, 1), (1, 2), (2, 3), (0, 4), (3, 5)], &[]).unwrap();
        let l = LogicalProblem::from_terms(3, &[h0, 0.0, 0.0], [(0, 1, 0.5), (0, 2, -0.5)]).unwrap();
        let e = Embedding::new(vec![vec![0, 1, 2], vec![3], vec![4]]);
        (l, g, e)
    }

    #[test]
    fn weights_from_degrees() {
        let (l, g, e) = path_fixture(0.5);
        let w = compute_weights(&l, &g, &e);
        assert_eq!(w.degrees[0], vec![1, 0, 1]);
        assert_eq!(w.totals[0], 2);
        assert!(close(&w.weights[0], &[0.5, 0.0, 0.5]));
        assert!(close(&w.weights[1], &[1.0]));
    }

    #[test]
    fn two_member_chain_weights() {
        // Qubit 0 touches three couplers into chain 1, qubit 1 touches one.
        let g = HardwareGraph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 4)], &[]).unwrap();
        let l = LogicalProblem::from_terms(2, &[0.0, 0.0], [(0, 1, 1.0)]).unwrap();
        let e = Embedding::new(vec![vec![0, 1], vec![2, 3, 4]]);
        let w = compute_weights(&l, &g, &e);
        assert_eq!(w.degrees[0], vec![3, 1]);
        assert!(close(&w.weights[0], &[0.75, 0.25]));
    }

    #[test]
    fn isolated_chain_gets_uniform_weights() {
        let g = HardwareGraph::new(3, [(0, 1), (1, 2)], &[]).unwrap();
        let l = LogicalProblem::new(1);
        let e = Embedding::new(vec![vec![0, 1, 2]]);
        let w = compute_weights(&l, &g, &e);
        assert!(close(&w.weights[0], &[1.0 / 3.0; 3]));
        assert_eq!(w, WeightTable::uniform(&e));
    }

    #[test]
    fn single_puts_bias_on_best_connected_member() {
        let (l, g, e) = path_fixture(0.5);
        let p = distribute_terms(&l, &g, &e, StrategyKind::Single, DEFAULT_H_MIN).unwrap();
        // Members 0 and 2 tie at one coupler; the lower index wins.
        assert_eq!([p.bias(0), p.bias(1), p.bias(2)], [0.5, 0.0, 0.0]);
    }

    #[test]
    fn even_clipping_example() {
        assert!(close(&even_split(0.25, 4, 0.1), &[0.1, 0.1, 0.05, 0.0]));
        assert!(close(&even_split(-0.25, 4, 0.1), &[-0.1, -0.1, -0.05, 0.0]));
        assert!(close(&even_split(0.8, 4, 0.1), &[0.2; 4]));
        assert!(close(&even_split(0.25, 4, 0.0), &[0.0625; 4]));
    }

    #[test]
    fn weighted_regularized_example() {
        let chain = [0, 1];
        let w = WeightTable {
            weights: vec![vec![0.75, 0.25]],
            degrees: vec![vec![3, 1]],
            totals: vec![4],
        };
        let v = distribute_bias(StrategyKind::WeightedRegularized, 0.8, &chain, &w, 0, 0.1);
        assert!(close(&v, &[0.55, 0.25]));
        // Below K * h_min the even clipping rule applies.
        let v = distribute_bias(StrategyKind::WeightedRegularized, 0.15, &chain, &w, 0, 0.1);
        assert!(close(&v, &[0.1, 0.05]));
    }

    #[test]
    fn weighted_redistributes_clipped_shares() {
        let v = weighted_split(1.0, &[0.5, 0.45, 0.05], 0.1);
        assert!(close(&v, &[0.5 / 0.95, 0.45 / 0.95, 0.0]));
        let v = weighted_split(0.05, &[0.5, 0.3, 0.2], 0.1);
        assert!(close(&v, &[0.05, 0.0, 0.0]));
        let v = weighted_split(0.6, &[0.5, 0.5], 0.0);
        assert!(close(&v, &[0.3, 0.3]));
    }

    #[test]
    fn zero_bias_stays_zero() {
        for s in StrategyKind::ALL {
            let (l, g, e) = path_fixture(0.0);
            let p = distribute_terms(&l, &g, &e, s, 0.1).unwrap();
            assert_eq!([p.bias(0), p.bias(1), p.bias(2)], [0.0; 3]);
        }
    }

    #[test]
    fn parameterize_programs_chains_and_rescales() {
        let (l, g, e) = path_fixture(0.25);
        let cfg = ParamConfig::new(StrategyKind::Even, 1.6).with_h_min(0.0);
        let p = parameterize(&l, &g, &e, &cfg).unwrap();
        assert_eq!(p.chain_couplings().len(), 2);
        assert!(p.chain_couplings().values().all(|&v| v == -1.6));
        let (mh, mj) = p.max_problem_term();
        assert!((mh.max(mj) - 1.0).abs() < 1e-12);
        assert!((p.scale() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parameterize_rejects_invalid_inputs() {
        let (l, g, _) = path_fixture(0.25);
        let bad = Embedding::new(vec![vec![0, 2], vec![3], vec![4]]);
        assert!(parameterize(&l, &g, &bad, &ParamConfig::new(StrategyKind::Even, 2.0)).is_err());
        let (l, g, e) = path_fixture(0.25);
        assert!(parameterize(&l, &g, &e, &ParamConfig::new(StrategyKind::Even, 0.0)).is_err());
        assert!(parameterize(&l, &g, &e, &ParamConfig::new(StrategyKind::Even, 1.0).with_h_min(1.0)).is_err());
    }

    #[test]
    fn identity_srt_is_noop() {
        let (l, g, e) = path_fixture(0.25);
        let p = parameterize(&l, &g, &e, &ParamConfig::new(StrategyKind::Weighted, 2.0)).unwrap();
        let r = SpinVector::filled(p.num_qubits(), 1);
        assert_eq!(apply_srt(&p, &r, SrtMode::AllTerms).unwrap(), p);
        assert!(apply_srt(&p, &SpinVector::filled(2, 1), SrtMode::AllTerms).is_err());
    }

    #[test]
    fn single_flip_negates_incident_terms() {
        let (l, g, e) = path_fixture(0.25);
        let p = parameterize(&l, &g, &e, &ParamConfig::new(StrategyKind::Even, 2.0).with_h_min(0.0)).unwrap();
        let mut r = SpinVector::filled(p.num_qubits(), 1);
        r.flip(0);
        let t = apply_srt(&p, &r, SrtMode::AllTerms).unwrap();
        assert_eq!(t.bias(0), -p.bias(0));
        assert_eq!(t.problem_couplings()[&(0, 4)], -p.problem_couplings()[&(0, 4)]);
        assert_eq!(t.chain_couplings()[&(0, 1)], -p.chain_couplings()[&(0, 1)]);
        assert_eq!(t.chain_couplings()[&(1, 2)], p.chain_couplings()[&(1, 2)]);
        let u = apply_srt(&p, &r, SrtMode::ProblemTermsOnly).unwrap();
        assert_eq!(u.chain_couplings(), p.chain_couplings());
    }

    #[test]
    fn srt_sets() {
        let set = srt_set(10, 4, 7, false, None).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(set[0], SpinVector::filled(10, 1));
        assert_eq!(srt_set(10, 1, 7, false, None).unwrap().len(), 1);
        assert!(srt_set(10, 0, 7, false, None).is_err());
        assert!(srt_set(10, 2, 7, true, None).is_err());
        let e = Embedding::new(vec![vec![0, 1, 2], vec![5, 6], vec![9]]);
        for r in srt_set(10, 8, 3, true, Some(&e)).unwrap() {
            for chain in &e.chains {
                assert!(chain.iter().all(|&q| r.get(q) == r.get(chain[0])));
            }
        }
    }

    #[test]
    fn all_terms_srt_preserves_spectrum() {
        let (l, g, e) = path_fixture(0.25);
        let p = parameterize(&l, &g, &e, &ParamConfig::new(StrategyKind::Even, 1.8)).unwrap();
        for r in srt_set(6, 6, 11, false, None).unwrap() {
            let t = apply_srt(&p, &r, SrtMode::AllTerms).unwrap();
            for bits in 0..64u64 {
                let s = SpinVector::from_bits(bits, 6);
                let rs = SpinVector::new(s.values().iter().zip(r.values()).map(|(a, b)| a * b).collect()).unwrap();
                assert!((p.energy(&s).unwrap() - t.energy(&rs).unwrap()).abs() < ENERGY_TOL);
            }
        }
    }

    #[test]
    fn chain_bound_counts_whole_chain() {
        let (l, g, e) = path_fixture(0.25);
        let p = distribute_terms(&l, &g, &e, StrategyKind::Even, 0.0).unwrap();
        // Chain 0: biases sum to 0.25 in magnitude, plus couplers 0.5 and 0.5.
        assert!((chain_break_bound(&p, &e) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in StrategyKind::ALL {
            assert_eq!(s.name().parse::<StrategyKind>().unwrap(), s);
        }
        assert!("bogus".parse::<StrategyKind>().is_err());
        assert_eq!(
            "problem-terms-only".parse::<SrtMode>().unwrap(),
            SrtMode::ProblemTermsOnly
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest, ProptestConfig};

        fn embedded_instance(seed: u64) -> (LogicalProblem, HardwareGraph, Embedding) {
            let mut rng = seed::rng(seed);
            let n = rng.gen_range(2..9);
            let mut l = LogicalProblem::new(n);
            for i in 0..n {
                if rng.gen_bool(0.8) {
                    l.add_bias(i, rng.gen_range(-1.0..1.0)).unwrap();
                }
                for j in i + 1..n {
                    if rng.gen_bool(0.5) {
                        l.add_coupling(i, j, rng.gen_range(-1.0..1.0)).unwrap();
                    }
                }
            }
            let g = build_chimera(&ChimeraSpec::ideal(3, 3, 4)).unwrap();
            let e = greedy_embed(&l, &g, seed, DEFAULT_EMBED_TRIES).unwrap();
            (l, g, e)
        }

        fn chain_sums(p: &PhysicalProblem, e: &Embedding) -> Vec<f64> {
            e.chains.iter().map(|c| c.iter().map(|&q| p.bias(q)).sum()).collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]

            #[test]
            fn conservation(seed in 0u64..100_000, h_min in prop::sample::select(vec![0.0, 1.0 / 16.0, 0.125, 0.3])) {
                let (l, g, e) = embedded_instance(seed);
                for s in StrategyKind::ALL {
                    let p = distribute_terms(&l, &g, &e, s, h_min).unwrap();
                    for (i, sum) in chain_sums(&p, &e).into_iter().enumerate() {
                        prop_assert!((sum - l.bias(i)).abs() <= 1e-9);
                    }
                    for (&(i, j), &v) in l.couplings() {
                        let sum: f64 = e.couplers_between(&g, i, j).iter().map(|c| p.problem_couplings()[c]).sum();
                        prop_assert!((sum - v).abs() <= 1e-9);
                    }
                }
            }

            #[test]
            fn single_uses_one_device_per_term(seed in 0u64..100_000) {
                let (l, g, e) = embedded_instance(seed);
                let p = distribute_terms(&l, &g, &e, StrategyKind::Single, 0.0).unwrap();
                for c in &e.chains {
                    prop_assert!(c.iter().filter(|&&q| p.bias(q) != 0.0).count() <= 1);
                }
                for &(i, j) in l.couplings().keys() {
                    let nonzero = e.couplers_between(&g, i, j).iter().filter(|c| p.problem_couplings()[c] != 0.0).count();
                    prop_assert_eq!(nonzero, 1);
                }
            }

            #[test]
            fn even_is_uniform_and_weighted_is_proportional(seed in 0u64..100_000) {
                let (l, g, e) = embedded_instance(seed);
                let even = distribute_terms(&l, &g, &e, StrategyKind::Even, 0.0).unwrap();
                let weighted = distribute_terms(&l, &g, &e, StrategyKind::Weighted, 0.0).unwrap();
                let w = compute_weights(&l, &g, &e);
                for (i, c) in e.chains.iter().enumerate() {
                    prop_assert!(c.iter().all(|&q| even.bias(q) == even.bias(c[0])));
                    prop_assert!((w.weights[i].iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    for (k, &q) in c.iter().enumerate() {
                        prop_assert!((weighted.bias(q) - l.bias(i) * w.weights[i][k]).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
