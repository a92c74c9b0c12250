//! Sampling backends: exact ground-state enumeration and simulated annealing.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{CompactIsing, Energy, PhysicalProblem, SpinVector, ENERGY_TOL};
use crate::seed;

/// Largest number of coupled qubits the exact solver enumerates.
pub const MAX_EXACT_VARS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaSchedule {
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub reads: usize,
}

impl Default for SaSchedule {
    fn default() -> Self {
        SaSchedule {
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: 5.0,
            reads: 1000,
        }
    }
}

impl SaSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.reads == 0 {
            return Err(Error::Parameter("SA needs at least one sweep and one read".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_end >= self.beta_start && self.beta_end.is_finite()) {
            return Err(Error::Parameter(format!(
                "SA betas must satisfy 0 < beta_start <= beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    /// Geometric ladder from `beta_start` to `beta_end`, one entry per sweep.
    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_end];
        }
        let ratio = (self.beta_end / self.beta_start).powf(1.0 / (self.sweeps - 1) as f64);
        (0..self.sweeps)
            .map(|k| self.beta_start * ratio.powi(k as i32))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
pub enum BackendConfig {
    Exact { reads: usize },
    Sa(SaSchedule),
}

impl BackendConfig {
    pub fn from_name(name: &str, reads: usize, schedule: Option<SaSchedule>) -> Result<Self> {
        match name {
            "exact" => Ok(BackendConfig::Exact { reads }),
            "sa" => Ok(BackendConfig::Sa(SaSchedule {
                reads,
                ..schedule.unwrap_or_default()
            })),
            _ => Err(Error::Config(format!("unknown backend {name:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BackendConfig::Exact { .. } => "exact",
            BackendConfig::Sa(_) => "sa",
        }
    }

    pub fn reads(&self) -> usize {
        match self {
            BackendConfig::Exact { reads } => *reads,
            BackendConfig::Sa(s) => s.reads,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub backend: String,
    pub seed: u64,
    pub schedule: Option<SaSchedule>,
    pub strategy: Option<String>,
    pub chain_coupling: Option<f64>,
    pub srt_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Read {
    pub spins: SpinVector,
    pub multiplicity: u64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub num_qubits: usize,
    pub reads: Vec<Read>,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct ReadRow {
    read_index: usize,
    bitstring: String,
    energy: f64,
    multiplicity: u64,
}

impl SampleSet {
    pub fn total_reads(&self) -> u64 {
        self.reads.iter().map(|r| r.multiplicity).sum()
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.reads.iter().map(|r| r.energy).reduce(f64::min)
    }

    /// Path of the provenance sidecar written next to a samples CSV.
    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("provenance.json")
    }

    pub fn save(&self, csv_path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(csv_path)?;
        for (read_index, r) in self.reads.iter().enumerate() {
            w.serialize(ReadRow {
                read_index,
                bitstring: r.spins.bitstring(),
                energy: r.energy,
                multiplicity: r.multiplicity,
            })?;
        }
        w.flush().map_err(|e| Error::io(csv_path, e))?;
        let sidecar = Self::sidecar_path(csv_path);
        let text = serde_json::to_string_pretty(&self.provenance)?;
        fs::write(&sidecar, text).map_err(|e| Error::io(&sidecar, e))
    }

    pub fn load(csv_path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(csv_path)?;
        let mut reads = Vec::new();
        for row in r.deserialize() {
            let row: ReadRow = row?;
            reads.push(Read {
                spins: SpinVector::from_bitstring(&row.bitstring)?,
                multiplicity: row.multiplicity,
                energy: row.energy,
            });
        }
        let num_qubits = reads.first().map_or(0, |r| r.spins.len());
        if reads.iter().any(|r| r.spins.len() != num_qubits) {
            return Err(Error::Config("samples have differing lengths".into()));
        }
        let sidecar = Self::sidecar_path(csv_path);
        let provenance = match fs::read_to_string(&sidecar) {
            Ok(text) => serde_json::from_str(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Provenance::default(),
            Err(e) => return Err(Error::io(&sidecar, e)),
        };
        Ok(SampleSet {
            num_qubits,
            reads,
            provenance,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStates {
    /// Sorted by bitstring. Qubits without any term are fixed to +1.
    pub states: Vec<SpinVector>,
    pub energy: f64,
    /// Qubits without any term; every value of these is also a ground state.
    pub free_qubits: Vec<usize>,
}

/// Enumerates one block: the top `fixed_bits` bits of the local index are
/// `block`, the rest run through a Gray code.
fn enumerate_block(m: &CompactIsing, block: u64, free: usize, slack: f64) -> (f64, Vec<Vec<i8>>) {
    let n = m.len();
    let mut s: Vec<i8> = (0..n)
        .map(|i| {
            if i < free {
                -1
            } else if block >> (i - free) & 1 == 1 {
                1
            } else {
                -1
            }
        })
        .collect();
    let mut e = m.energy(&s);
    let mut best = e;
    let mut keep = vec![s.clone()];
    for step in 1u64..1 << free {
        let i = step.trailing_zeros() as usize;
        e -= 2.0 * s[i] as f64 * m.local_field(&s, i);
        s[i] = -s[i];
        if e < best - slack {
            best = e;
            keep.retain(|_| false);
            keep.push(s.clone());
        } else if e <= best + slack {
            best = best.min(e);
            keep.push(s.clone());
        }
    }
    (best, keep)
}

/// All global minimizers of `p`, exact to 1e-9.
pub fn exact_ground_states(p: &PhysicalProblem) -> Result<GroundStates> {
    let m = p.compact();
    let n = m.len();
    if n > MAX_EXACT_VARS {
        return Err(Error::Capacity {
            what: "coupled qubits for exact enumeration",
            found: n,
            limit: MAX_EXACT_VARS,
        });
    }
    // Loose slack during incremental updates; the final cut is recomputed.
    let slack = 1e-6;
    let fixed = n.saturating_sub(14).min(12);
    let free = n - fixed;
    let blocks: Vec<(f64, Vec<Vec<i8>>)> = (0..1u64 << fixed)
        .into_par_iter()
        .map(|b| enumerate_block(&m, b, free, slack))
        .collect();
    let mut candidates: Vec<(f64, Vec<i8>)> = Vec::new();
    let floor = blocks.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    for (best, states) in blocks {
        if best <= floor + slack {
            candidates.extend(states.into_iter().map(|s| (m.energy(&s), s)));
        }
    }
    let energy = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let mut states: Vec<SpinVector> = candidates
        .into_iter()
        .filter(|c| c.0 <= energy + ENERGY_TOL)
        .map(|c| m.expand(&c.1, p.num_qubits()))
        .collect();
    states.sort_by_key(|s| s.bitstring());
    states.dedup();
    let free_qubits = (0..p.num_qubits())
        .filter(|q| m.variables.binary_search(q).is_err())
        .collect();
    Ok(GroundStates {
        states,
        energy: if n == 0 { 0.0 } else { energy },
        free_qubits,
    })
}

fn random_spin(rng: &mut impl Rng) -> i8 {
    if rng.gen_bool(0.5) {
        1
    } else {
        -1
    }
}

fn anneal(m: &CompactIsing, betas: &[f64], s: &mut [i8], rng: &mut impl Rng) {
    let mut field: Vec<f64> = (0..m.len()).map(|i| m.local_field(s, i)).collect();
    for &beta in betas {
        for i in 0..m.len() {
            let delta = -2.0 * s[i] as f64 * field[i];
            // Zero-cost flips take a fair coin; always accepting them lets
            // domain walls ride along with the fixed sweep order forever.
            let accept = if delta < 0.0 {
                true
            } else if delta == 0.0 {
                rng.gen_bool(0.5)
            } else {
                rng.gen::<f64>() < (-beta * delta).exp()
            };
            if accept {
                s[i] = -s[i];
                let change = 2.0 * s[i] as f64;
                for &(j, v) in &m.neighbors[i] {
                    field[j] += change * v;
                }
            }
        }
    }
}

/// Simulated annealing: `sched.reads` independent restarts from uniformly
/// random states, each sweeping the qubits in index order once per beta.
/// Read `k` draws from the stream `derive(rng_seed, [STAGE_READ, k])`.
/// Qubits without any term are left uniformly random.
pub fn sample_sa(p: &PhysicalProblem, sched: &SaSchedule, rng_seed: u64) -> Result<SampleSet> {
    anneal_reads(p, sched, rng_seed, None)
}

/// As [`sample_sa`], but every read starts from `initial`.
pub fn sample_sa_from(
    p: &PhysicalProblem,
    sched: &SaSchedule,
    rng_seed: u64,
    initial: &SpinVector,
) -> Result<SampleSet> {
    if initial.len() != p.num_qubits() {
        return Err(Error::Dimension {
            expected: p.num_qubits(),
            found: initial.len(),
        });
    }
    anneal_reads(p, sched, rng_seed, Some(initial))
}

fn anneal_reads(
    p: &PhysicalProblem,
    sched: &SaSchedule,
    rng_seed: u64,
    initial: Option<&SpinVector>,
) -> Result<SampleSet> {
    sched.validate()?;
    let m = p.compact();
    let betas = sched.betas();
    let n = p.num_qubits();
    let reads = (0..sched.reads)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed::rng(seed::derive(rng_seed, &[seed::STAGE_READ, k as u64]));
            let mut full: Vec<i8> = match initial {
                Some(init) => init.values().to_vec(),
                None => (0..n).map(|_| random_spin(&mut rng)).collect(),
            };
            let mut local: Vec<i8> = m.variables.iter().map(|&q| full[q]).collect();
            anneal(&m, &betas, &mut local, &mut rng);
            for (&q, &v) in m.variables.iter().zip(&local) {
                full[q] = v;
            }
            let spins = SpinVector::new(full).expect("spins stay +-1");
            let energy = p.energy(&spins).expect("length matches");
            Read {
                spins,
                multiplicity: 1,
                energy,
            }
        })
        .collect();
    Ok(SampleSet {
        num_qubits: n,
        reads,
        provenance: Provenance {
            backend: "sa".into(),
            seed: rng_seed,
            schedule: Some(*sched),
            ..Provenance::default()
        },
    })
}

/// Dispatches to a backend. The exact backend spreads `reads` evenly over
/// the ground states, giving the remainder one each to the lexicographically
/// smallest bitstrings; states left with no reads are dropped.
pub fn sample(p: &PhysicalProblem, cfg: &BackendConfig, rng_seed: u64) -> Result<SampleSet> {
    match cfg {
        BackendConfig::Sa(sched) => sample_sa(p, sched, rng_seed),
        BackendConfig::Exact { reads } => {
            if *reads == 0 {
                return Err(Error::Parameter("exact backend needs at least one read".into()));
            }
            let ground = exact_ground_states(p)?;
            let count = ground.states.len() as u64;
            let (base, extra) = (*reads as u64 / count, *reads as u64 % count);
            let reads = ground
                .states
                .into_iter()
                .enumerate()
                .map(|(k, spins)| {
                    let energy = p.energy(&spins).expect("length matches");
                    Read {
                        spins,
                        multiplicity: base + u64::from((k as u64) < extra),
                        energy,
                    }
                })
                .filter(|r| r.multiplicity > 0)
                .collect();
            Ok(SampleSet {
                num_qubits: p.num_qubits(),
                reads,
                provenance: Provenance {
                    backend: "exact".into(),
                    seed: rng_seed,
                    ..Provenance::default()
                },
            })
        }
    }
}
