//! Figures of merit over sampled and decoded runs.

use serde::{Deserialize, Serialize};

use crate::annealer::SampleSet;
use crate::decode::{ConcertPolicy, DecodedSample};
use crate::error::{Error, Result};
use crate::problem::{PhysicalProblem, ZERO_TOL};
use crate::sat::CnfFormula;

/// Distinct values of `values`: sorted, zeros dropped, and each value within
/// 1e-12 of the last kept one merged into it.
pub fn distinct_values(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.abs() >= ZERO_TOL).collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(&last) if x - last <= ZERO_TOL => {}
            _ => out.push(x),
        }
    }
    out
}

/// Minimum parameter distance over distinct programmed values; `+inf` when
/// fewer than two distinct values are programmed.
pub fn mpd(p: &PhysicalProblem) -> Result<f64> {
    mpd_of_values(p.programmed_values())
}

pub fn mpd_of_values(values: impl IntoIterator<Item = f64>) -> Result<f64> {
    let v = distinct_values(values);
    if v.is_empty() {
        return Err(Error::UndefinedMpd);
    }
    Ok(v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}

/// Multiplicity-weighted fraction of reads whose concert candidates satisfy
/// `f` under `policy`. `decoded[k]` holds the candidates of read `k`.
pub fn success_probability(
    samples: &SampleSet,
    decoded: &[Vec<DecodedSample>],
    f: &CnfFormula,
    policy: ConcertPolicy,
) -> Result<f64> {
    if decoded.len() != samples.reads.len() {
        return Err(Error::Dimension {
            expected: samples.reads.len(),
            found: decoded.len(),
        });
    }
    let total = samples.total_reads();
    if total == 0 {
        return Ok(0.0);
    }
    let hits: u64 = samples
        .reads
        .iter()
        .zip(decoded)
        .filter(|(_, c)| policy.succeeds(c, |v| f.is_satisfied_by_spins(v.values())))
        .map(|(r, _)| r.multiplicity)
        .sum();
    Ok(hits as f64 / total as f64)
}

/// `P(c) / P(baseline)` for each `(c, P)` pair; `None` when the baseline is
/// missing or zero, in which case the instance is left out of aggregates.
pub fn success_ratio(per_c: &[(f64, f64)], baseline_c: f64) -> Option<Vec<(f64, f64)>> {
    let base = per_c.iter().find(|(c, _)| (c - baseline_c).abs() < ZERO_TOL)?.1;
    if base <= 0.0 {
        return None;
    }
    Some(per_c.iter().map(|&(c, p)| (c, p / base)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalCHistogram {
    pub c_values: Vec<f64>,
    pub counts: Vec<usize>,
    /// Instances whose peak was shared by several c values.
    pub ties: usize,
    /// Instances with zero success at every c; they are not counted.
    pub no_success: usize,
}

impl OptimalCHistogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Each instance adds one at its best c. `instances` holds per-instance
/// success probabilities aligned with `c_values`; ties go to the lowest c.
pub fn optimal_c_histogram(c_values: &[f64], instances: &[Vec<f64>]) -> Result<OptimalCHistogram> {
    let mut order: Vec<usize> = (0..c_values.len()).collect();
    order.sort_by(|&a, &b| c_values[a].total_cmp(&c_values[b]));
    let mut h = OptimalCHistogram {
        c_values: order.iter().map(|&k| c_values[k]).collect(),
        counts: vec![0; c_values.len()],
        ties: 0,
        no_success: 0,
    };
    for p in instances {
        if p.len() != c_values.len() {
            return Err(Error::Dimension {
                expected: c_values.len(),
                found: p.len(),
            });
        }
        let best = p.iter().copied().fold(0.0f64, f64::max);
        if best <= 0.0 {
            h.no_success += 1;
            continue;
        }
        let winners: Vec<usize> = (0..order.len()).filter(|&r| p[order[r]] == best).collect();
        if winners.len() > 1 {
            h.ties += 1;
        }
        h.counts[winners[0]] += 1;
    }
    Ok(h)
}

/// Observed distinct satisfying assignments over the exact solution count.
pub fn answer_set_fraction(unique_observed: u64, total_known: u64) -> Result<f64> {
    if total_known == 0 {
        return Err(Error::Parameter(
            "answer set fraction needs a nonzero solution count".into(),
        ));
    }
    if unique_observed > total_known {
        return Err(Error::Parameter(format!(
            "observed {unique_observed} distinct answers but only {total_known} exist"
        )));
    }
    Ok(unique_observed as f64 / total_known as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// One sweep cell: an instance under one strategy, chain coupling and SRT.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance_id: String,
    pub strategy: String,
    pub c: f64,
    pub srt_index: usize,
    pub success_probability: f64,
    pub unique_answers: usize,
    pub mpd: f64,
    pub reads: u64,
}
