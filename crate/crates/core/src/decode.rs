//! Physical readouts to logical assignments.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::paramset::WeightTable;
use crate::problem::{SpinVector, ZERO_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Single,
    Majority,
    WeightedMajority,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Single => "single",
            DecoderKind::Majority => "majority",
            DecoderKind::WeightedMajority => "weighted-majority",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedSample {
    pub values: SpinVector,
    pub broken_chains: Vec<usize>,
    pub decoder: DecoderKind,
    pub tie_count: usize,
}

/// How the three concert candidates of one read combine into success.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConcertPolicy {
    /// Any candidate that passes counts.
    #[default]
    Any,
    /// Only the majority-vote candidate counts.
    MajorityOnly,
}

impl ConcertPolicy {
    /// Candidates the policy looks at.
    pub fn accepted<'a>(&self, candidates: &'a [DecodedSample]) -> Vec<&'a DecodedSample> {
        match self {
            ConcertPolicy::Any => candidates.iter().collect(),
            ConcertPolicy::MajorityOnly => candidates
                .iter()
                .filter(|c| c.decoder == DecoderKind::Majority)
                .collect(),
        }
    }

    pub fn succeeds(&self, candidates: &[DecodedSample], pass: impl Fn(&SpinVector) -> bool) -> bool {
        self.accepted(candidates).into_iter().any(|c| pass(&c.values))
    }
}

impl FromStr for ConcertPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any" => Ok(ConcertPolicy::Any),
            "majority-only" => Ok(ConcertPolicy::MajorityOnly),
            _ => Err(Error::Config(format!("unknown concert policy {s:?}"))),
        }
    }
}

impl fmt::Display for ConcertPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConcertPolicy::Any => "any",
            ConcertPolicy::MajorityOnly => "majority-only",
        })
    }
}

fn check_readout(s: &SpinVector, e: &Embedding) -> Result<()> {
    for chain in &e.chains {
        if let Some(&q) = chain.iter().find(|&&q| q >= s.len()) {
            return Err(Error::Dimension {
                expected: q + 1,
                found: s.len(),
            });
        }
    }
    Ok(())
}

fn check_weights(e: &Embedding, w: &WeightTable) -> Result<()> {
    let shaped = w.weights.len() == e.num_logical() && w.weights.iter().zip(&e.chains).all(|(w, c)| w.len() == c.len());
    if shaped {
        Ok(())
    } else {
        Err(Error::Parameter("weight table does not match the embedding".into()))
    }
}

fn broken(s: &SpinVector, chain: &[usize]) -> bool {
    chain.iter().any(|&q| s.get(q) != s.get(chain[0]))
}

fn decode_with(
    s: &SpinVector,
    e: &Embedding,
    decoder: DecoderKind,
    mut vote: impl FnMut(usize, &[usize]) -> (i8, bool),
) -> DecodedSample {
    let mut values = Vec::with_capacity(e.num_logical());
    let mut broken_chains = Vec::new();
    let mut tie_count = 0;
    for (i, chain) in e.chains.iter().enumerate() {
        if broken(s, chain) {
            broken_chains.push(i);
        }
        let (v, tied) = vote(i, chain);
        tie_count += tied as usize;
        values.push(v);
    }
    DecodedSample {
        values: SpinVector::new(values).expect("votes are +-1"),
        broken_chains,
        decoder,
        tie_count,
    }
}

fn coin(rng: &mut impl Rng) -> i8 {
    if rng.gen_bool(0.5) {
        1
    } else {
        -1
    }
}

/// Value of each chain's highest-weight member, ties to the lowest qubit index.
pub fn decode_single(s: &SpinVector, e: &Embedding, w: &WeightTable) -> Result<DecodedSample> {
    check_readout(s, e)?;
    check_weights(e, w)?;
    Ok(decode_with(s, e, DecoderKind::Single, |i, chain| {
        let best = (0..chain.len())
            .reduce(|a, b| {
                let (wa, wb) = (w.weights[i][a], w.weights[i][b]);
                if wb > wa || (wb == wa && chain[b] < chain[a]) {
                    b
                } else {
                    a
                }
            })
            .expect("chains are nonempty");
        (s.get(chain[best]), false)
    }))
}

/// Sign of the chain sum; a zero sum draws a fair coin from `rng`.
pub fn decode_majority(s: &SpinVector, e: &Embedding, rng: &mut impl Rng) -> Result<DecodedSample> {
    check_readout(s, e)?;
    Ok(decode_with(s, e, DecoderKind::Majority, |_, chain| {
        let sum: i64 = chain.iter().map(|&q| s.get(q) as i64).sum();
        match sum.signum() {
            0 => (coin(rng), true),
            v => (v as i8, false),
        }
    }))
}

/// Sign of the weighted chain sum; sums within 1e-12 of zero draw a coin.
pub fn decode_weighted_majority(
    s: &SpinVector,
    e: &Embedding,
    w: &WeightTable,
    rng: &mut impl Rng,
) -> Result<DecodedSample> {
    check_readout(s, e)?;
    check_weights(e, w)?;
    Ok(decode_with(s, e, DecoderKind::WeightedMajority, |i, chain| {
        let sum: f64 = chain
            .iter()
            .zip(&w.weights[i])
            .map(|(&q, wk)| wk * s.get(q) as f64)
            .sum();
        if sum.abs() < ZERO_TOL {
            (coin(rng), true)
        } else if sum > 0.0 {
            (1, false)
        } else {
            (-1, false)
        }
    }))
}

/// Single, majority and weighted-majority decodings of one readout, in that
/// order. Ties draw from `rng` in the same order.
pub fn decode_concert(
    s: &SpinVector,
    e: &Embedding,
    w: &WeightTable,
    rng: &mut impl Rng,
) -> Result<Vec<DecodedSample>> {
    Ok(vec![
        decode_single(s, e, w)?,
        decode_majority(s, e, rng)?,
        decode_weighted_majority(s, e, w, rng)?,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedRow {
    pub instance_id: String,
    pub read_index: usize,
    pub decoder: String,
    pub bitstring: String,
    pub broken_chain_count: usize,
    pub satisfied: bool,
}

pub fn write_decoded_csv(path: &Path, rows: &[DecodedRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{other:?}")),
    })?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
