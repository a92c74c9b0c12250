//! Sweep orchestration: embed, parameterize, sample, decode and score every
//! (instance, strategy, chain coupling, SRT) cell, then aggregate.
//!
//! Seeds, all below the master seed:
//!
//! * embedding of instance `id`: `derive(master, [STAGE_EMBED, hash(id)])`
//! * SRT vectors: `derive(master, [STAGE_SRT, hash(id)])`, or
//!   `derive(srt_seed, [hash(id)])` when an SRT seed is given
//! * cell sampling: `derive(master, [STAGE_SAMPLE, hash(id), hash(strategy), bits(c), srt])`
//! * tie-breaks of read `k`: `derive(cell_seed, [STAGE_DECODE, k])`

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annealer::{sample, BackendConfig, SaSchedule};
use crate::chimera::{greedy_embed, DEFAULT_EMBED_TRIES};
use crate::corpus::Instance;
use crate::decode::{decode_concert, ConcertPolicy};
use crate::embedding::{validate_embedding, Embedding};
use crate::error::{Error, Result};
use crate::hardware::HardwareGraph;
use crate::metrics::{answer_set_fraction, median, mpd, optimal_c_histogram, success_ratio, OptimalCHistogram};
use crate::paramset::{
    compute_weights, parameterize, srt_set, ParamConfig, SrtMode, StrategyKind, WeightTable, DEFAULT_H_MIN,
};
use crate::problem::{LogicalProblem, SpinVector};
use crate::reduction::sat_to_ising;
use crate::sat::spins_to_assignment;
use crate::seed;

pub const DEFAULT_C_GRID: [f64; 5] = [1.6, 1.8, 2.0, 2.2, 2.4];
pub const DEFAULT_BASELINE_C: f64 = 1.6;
pub const RESULTS_FILE: &str = "results.csv";
pub const REPORT_FILE: &str = "report.json";
pub const SKIPPED_FILE: &str = "skipped.json";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub strategies: Vec<StrategyKind>,
    pub chain_couplings: Vec<f64>,
    pub h_min: f64,
    pub srt_count: usize,
    pub srt_mode: SrtMode,
    pub srt_chain_constant: bool,
    pub srt_seed: Option<u64>,
    pub backend: BackendConfig,
    pub master_seed: u64,
    pub concert_policy: ConcertPolicy,
    pub baseline_c: f64,
    pub embed_tries: usize,
    /// Directory of `<instance_id>.json` embeddings; when set, instances
    /// without a file are skipped instead of embedded.
    pub embeddings_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl SweepPlan {
    pub fn new(master_seed: u64, backend: BackendConfig) -> Self {
        SweepPlan {
            strategies: StrategyKind::ALL.to_vec(),
            chain_couplings: DEFAULT_C_GRID.to_vec(),
            h_min: DEFAULT_H_MIN,
            srt_count: 1,
            srt_mode: SrtMode::AllTerms,
            srt_chain_constant: false,
            srt_seed: None,
            backend,
            master_seed,
            concert_policy: ConcertPolicy::Any,
            baseline_c: DEFAULT_BASELINE_C,
            embed_tries: DEFAULT_EMBED_TRIES,
            embeddings_dir: None,
            workers: None,
        }
    }

    pub fn default_sa(master_seed: u64) -> Self {
        SweepPlan::new(master_seed, BackendConfig::Sa(SaSchedule::default()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() || self.chain_couplings.is_empty() {
            return Err(Error::Config(
                "sweep needs at least one strategy and one chain coupling".into(),
            ));
        }
        if self.srt_count == 0 {
            return Err(Error::Config("SRT count must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be positive".into()));
        }
        for &c in &self.chain_couplings {
            ParamConfig::new(self.strategies[0], c)
                .with_h_min(self.h_min)
                .validate()?;
        }
        if let BackendConfig::Sa(s) = &self.backend {
            s.validate()?;
        }
        Ok(())
    }

    pub fn embed_seed(&self, instance_id: &str) -> u64 {
        seed::derive(self.master_seed, &[seed::STAGE_EMBED, seed::hash_str(instance_id)])
    }

    pub fn srt_seed_for(&self, instance_id: &str) -> u64 {
        match self.srt_seed {
            Some(s) => seed::derive(s, &[seed::hash_str(instance_id)]),
            None => seed::derive(self.master_seed, &[seed::STAGE_SRT, seed::hash_str(instance_id)]),
        }
    }

    pub fn cell_seed(&self, instance_id: &str, strategy: StrategyKind, c: f64, srt_index: usize) -> u64 {
        seed::derive(
            self.master_seed,
            &[
                seed::STAGE_SAMPLE,
                seed::hash_str(instance_id),
                seed::hash_str(strategy.name()),
                c.to_bits(),
                srt_index as u64,
            ],
        )
    }
}

/// One results-CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub n: usize,
    pub alpha: usize,
    pub solution_count: u64,
    pub strategy: StrategyKind,
    pub chain_coupling: f64,
    pub srt_index: usize,
    pub seed: u64,
    pub reads: u64,
    pub success_probability: f64,
    pub unique_answers: usize,
    pub mpd: f64,
    pub broken_chain_fraction: f64,
    /// Distinct satisfying assignments seen, as space-separated bit masks
    /// (bit `v` set when variable `v + 1` is true).
    pub answers: String,
}

impl ResultRow {
    pub fn answer_set(&self) -> Result<BTreeSet<u64>> {
        self.answers
            .split_whitespace()
            .map(|a| {
                a.parse()
                    .map_err(|_| Error::Config(format!("bad answer {a:?} in row for {}", self.instance_id)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub instance_id: String,
    pub stage: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub skipped: Vec<Skipped>,
}

/// Per-instance state shared by all of its cells.
pub struct Prepared<'a> {
    pub instance: &'a Instance,
    pub logical: LogicalProblem,
    pub embedding: Embedding,
    pub weights: WeightTable,
    pub srts: Vec<SpinVector>,
}

fn skip(instance: &Instance, stage: &str, err: impl ToString) -> Skipped {
    Skipped {
        instance_id: instance.entry.instance_id.clone(),
        stage: stage.into(),
        reason: err.to_string(),
    }
}

pub fn prepare<'a>(
    plan: &SweepPlan,
    instance: &'a Instance,
    g: &HardwareGraph,
) -> std::result::Result<Prepared<'a>, Skipped> {
    let id = &instance.entry.instance_id;
    let (logical, _) = sat_to_ising(&instance.formula).map_err(|e| skip(instance, "reduce", e))?;
    let embedding = match &plan.embeddings_dir {
        Some(dir) => {
            let path = dir.join(format!("{id}.json"));
            if !path.exists() {
                return Err(skip(instance, "embed", format!("no embedding at {}", path.display())));
            }
            let e = Embedding::load(&path).map_err(|e| skip(instance, "embed", e))?;
            validate_embedding(&logical, g, &e)
                .into_result()
                .map_err(|e| skip(instance, "embed", e))?;
            e
        }
        None => {
            greedy_embed(&logical, g, plan.embed_seed(id), plan.embed_tries).map_err(|e| skip(instance, "embed", e))?
        }
    };
    let weights = compute_weights(&logical, g, &embedding);
    let srts = srt_set(
        g.num_qubits(),
        plan.srt_count,
        plan.srt_seed_for(id),
        plan.srt_chain_constant,
        Some(&embedding),
    )
    .map_err(|e| skip(instance, "srt", e))?;
    Ok(Prepared {
        instance,
        logical,
        embedding,
        weights,
        srts,
    })
}

/// Runs one cell with the given sampling seed.
pub fn run_cell(
    plan: &SweepPlan,
    prep: &Prepared,
    g: &HardwareGraph,
    strategy: StrategyKind,
    c: f64,
    srt_index: usize,
    cell_seed: u64,
) -> Result<ResultRow> {
    let r = prep
        .srts
        .get(srt_index)
        .ok_or_else(|| Error::Config(format!("SRT index {srt_index} out of range")))?;
    let cfg = ParamConfig::new(strategy, c)
        .with_h_min(plan.h_min)
        .with_srt(r.clone(), plan.srt_mode);
    let p = parameterize(&prep.logical, g, &prep.embedding, &cfg)?;
    let distance = mpd(&p)?;
    let samples = sample(&p, &plan.backend, cell_seed)?;
    let f = &prep.instance.formula;
    let n_logical = prep.embedding.num_logical().max(1);
    let mut hits = 0u64;
    let mut broken = 0u64;
    let mut answers = BTreeSet::new();
    for (k, read) in samples.reads.iter().enumerate() {
        // Undo the SRT so readouts are in the original problem's frame.
        let s = SpinVector::new(read.spins.values().iter().zip(r.values()).map(|(a, b)| a * b).collect())?;
        let mut rng = seed::rng(seed::derive(cell_seed, &[seed::STAGE_DECODE, k as u64]));
        let candidates = decode_concert(&s, &prep.embedding, &prep.weights, &mut rng)?;
        broken += read.multiplicity * candidates[0].broken_chains.len() as u64;
        let mut success = false;
        for cand in plan.concert_policy.accepted(&candidates) {
            if f.is_satisfied_by_spins(cand.values.values()) {
                success = true;
                answers.insert(spins_to_assignment(cand.values.values(), f.n_vars));
            }
        }
        if success {
            hits += read.multiplicity;
        }
    }
    let total = samples.total_reads();
    let entry = &prep.instance.entry;
    Ok(ResultRow {
        instance_id: entry.instance_id.clone(),
        n: entry.n,
        alpha: entry.alpha,
        solution_count: entry.solution_count,
        strategy,
        chain_coupling: c,
        srt_index,
        seed: cell_seed,
        reads: total,
        success_probability: hits as f64 / total as f64,
        unique_answers: answers.len(),
        mpd: distance,
        broken_chain_fraction: broken as f64 / (total * n_logical as u64) as f64,
        answers: answers.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
    })
}

fn run_instance(
    plan: &SweepPlan,
    instance: &Instance,
    g: &HardwareGraph,
) -> std::result::Result<Vec<ResultRow>, Skipped> {
    let prep = prepare(plan, instance, g)?;
    let id = &instance.entry.instance_id;
    let mut cells = Vec::new();
    for &strategy in &plan.strategies {
        for &c in &plan.chain_couplings {
            for srt_index in 0..plan.srt_count {
                cells.push((strategy, c, srt_index));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(strategy, c, srt_index)| {
            let s = plan.cell_seed(id, strategy, c, srt_index);
            run_cell(plan, &prep, g, strategy, c, srt_index, s)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| skip(instance, "cell", e))
}

/// Runs every cell of every instance. Rows come back in corpus order, then
/// strategy, chain coupling and SRT order, whatever the worker count.
/// Instances that fail any stage are dropped whole and listed as skipped.
pub fn run_sweep(plan: &SweepPlan, instances: &[Instance], g: &HardwareGraph) -> Result<SweepOutcome> {
    plan.validate()?;
    let work = || -> Vec<std::result::Result<Vec<ResultRow>, Skipped>> {
        instances.par_iter().map(|inst| run_instance(plan, inst, g)).collect()
    };
    let results = match plan.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut outcome = SweepOutcome {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for r in results {
        match r {
            Ok(rows) => outcome.rows.extend(rows),
            Err(s) => {
                log::warn!("skipping {} at {}: {}", s.instance_id, s.stage, s.reason);
                outcome.skipped.push(s);
            }
        }
    }
    Ok(outcome)
}

/// Recomputes a row from its recorded provenance.
pub fn replay_row(plan: &SweepPlan, instance: &Instance, g: &HardwareGraph, row: &ResultRow) -> Result<ResultRow> {
    let prep = prepare(plan, instance, g).map_err(|s| Error::Config(format!("{}: {}", s.stage, s.reason)))?;
    run_cell(
        plan,
        &prep,
        g,
        row.strategy,
        row.chain_coupling,
        row.srt_index,
        row.seed,
    )
}

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyHistogram {
    pub strategy: StrategyKind,
    pub histogram: OptimalCHistogram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioCurve {
    pub strategy: StrategyKind,
    /// Median of `P(c) / P(baseline)` per c, aligned with the report's c values.
    pub median_ratio: Vec<Option<f64>>,
    pub included: usize,
    /// Instances with zero success at the baseline.
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpdPoint {
    pub strategy: StrategyKind,
    pub chain_coupling: f64,
    pub instance_id: String,
    /// `None` when fewer than two distinct values were programmed.
    pub mpd: Option<f64>,
    pub success_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrtDiversity {
    pub strategy: StrategyKind,
    pub unique_answers: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiversityEntry {
    pub instance_id: String,
    pub solution_count: u64,
    /// Union over strategies at the baseline c, identity SRT only.
    pub parameterization_unique: usize,
    pub parameterization_fraction: f64,
    /// Union over SRTs at the baseline c, one entry per strategy.
    pub srt: Vec<SrtDiversity>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub baseline_c: f64,
    pub c_values: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
    pub instances: usize,
    pub srt_count: usize,
    pub optimal_c: Vec<StrategyHistogram>,
    pub success_ratio: Vec<RatioCurve>,
    pub mpd_scatter: Vec<MpdPoint>,
    pub answer_diversity: Vec<DiversityEntry>,
}

fn push_unique<T: PartialEq + Clone>(v: &mut Vec<T>, x: &T) {
    if !v.contains(x) {
        v.push(x.clone());
    }
}

fn cell_rows<'a>(rows: &'a [ResultRow], id: &'a str, s: StrategyKind, c: f64) -> impl Iterator<Item = &'a ResultRow> {
    rows.iter()
        .filter(move |r| r.instance_id == id && r.strategy == s && r.chain_coupling == c)
}

/// Aggregates rows into the report. Success per (instance, strategy, c) is
/// the mean over SRTs. The answer-diversity comparison uses the baseline c
/// when it was swept and the smallest c otherwise.
pub fn build_report(rows: &[ResultRow], baseline_c: f64) -> Result<Report> {
    let mut ids: Vec<String> = Vec::new();
    let mut strategies = Vec::new();
    let mut c_values: Vec<f64> = Vec::new();
    let mut srt_count = 0;
    for r in rows {
        push_unique(&mut ids, &r.instance_id);
        push_unique(&mut strategies, &r.strategy);
        push_unique(&mut c_values, &r.chain_coupling);
        srt_count = srt_count.max(r.srt_index + 1);
    }
    strategies.sort();
    c_values.sort_by(f64::total_cmp);
    let mean_success = |id: &str, s: StrategyKind, c: f64| -> f64 {
        let v: Vec<f64> = cell_rows(rows, id, s, c).map(|r| r.success_probability).collect();
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };

    let mut optimal_c = Vec::new();
    let mut curves = Vec::new();
    for &s in &strategies {
        let per_instance: Vec<Vec<f64>> = ids
            .iter()
            .map(|id| c_values.iter().map(|&c| mean_success(id, s, c)).collect())
            .collect();
        optimal_c.push(StrategyHistogram {
            strategy: s,
            histogram: optimal_c_histogram(&c_values, &per_instance)?,
        });
        let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); c_values.len()];
        let mut excluded = 0;
        for p in &per_instance {
            let pairs: Vec<(f64, f64)> = c_values.iter().copied().zip(p.iter().copied()).collect();
            match success_ratio(&pairs, baseline_c) {
                Some(rs) => {
                    for (k, (_, ratio)) in rs.into_iter().enumerate() {
                        ratios[k].push(ratio);
                    }
                }
                None => excluded += 1,
            }
        }
        curves.push(RatioCurve {
            strategy: s,
            median_ratio: ratios.iter().map(|v| median(v)).collect(),
            included: per_instance.len() - excluded,
            excluded,
        });
    }

    let mpd_scatter = rows
        .iter()
        .filter(|r| r.srt_index == 0)
        .map(|r| MpdPoint {
            strategy: r.strategy,
            chain_coupling: r.chain_coupling,
            instance_id: r.instance_id.clone(),
            mpd: r.mpd.is_finite().then_some(r.mpd),
            success_probability: r.success_probability,
        })
        .collect();

    let diversity_c = c_values
        .iter()
        .copied()
        .find(|&c| c == baseline_c)
        .or_else(|| c_values.first().copied());
    let mut answer_diversity = Vec::new();
    if let Some(dc) = diversity_c {
        for id in &ids {
            let total = rows
                .iter()
                .find(|r| &r.instance_id == id)
                .map_or(0, |r| r.solution_count);
            let mut param = BTreeSet::new();
            let mut srt = Vec::new();
            for &s in &strategies {
                let mut union = BTreeSet::new();
                for r in cell_rows(rows, id, s, dc) {
                    let answers = r.answer_set()?;
                    if r.srt_index == 0 {
                        param.extend(answers.iter().copied());
                    }
                    union.extend(answers);
                }
                srt.push(SrtDiversity {
                    strategy: s,
                    unique_answers: union.len(),
                    fraction: answer_set_fraction(union.len() as u64, total)?,
                });
            }
            answer_diversity.push(DiversityEntry {
                instance_id: id.clone(),
                solution_count: total,
                parameterization_unique: param.len(),
                parameterization_fraction: answer_set_fraction(param.len() as u64, total)?,
                srt,
            });
        }
    }

    Ok(Report {
        baseline_c,
        c_values,
        strategies,
        instances: ids.len(),
        srt_count,
        optimal_c,
        success_ratio: curves,
        mpd_scatter,
        answer_diversity,
    })
}

/// Writes `results.csv`, `report.json` and `skipped.json` into `dir`.
pub fn write_outputs(dir: &Path, outcome: &SweepOutcome, report: &Report) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_results_csv(&dir.join(RESULTS_FILE), &outcome.rows)?;
    write_report(&dir.join(REPORT_FILE), report)?;
    let path = dir.join(SKIPPED_FILE);
    let text = serde_json::to_string_pretty(&outcome.skipped)?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

pub fn write_report(path: &Path, report: &Report) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::{build_chimera, ChimeraSpec};
    use crate::corpus::{generate_corpus, CorpusConfig};

    fn small_corpus(count: usize) -> Vec<Instance> {
        generate_corpus(&CorpusConfig::new(vec![5], vec![4], count, 3)).unwrap()
    }

    fn exact_plan() -> SweepPlan {
        let mut plan = SweepPlan::new(17, BackendConfig::Exact { reads: 20 });
        plan.strategies = vec![StrategyKind::Even];
        plan
    }

    #[test]
    fn one_instance_one_strategy_gives_five_rows() {
        let g = build_chimera(&ChimeraSpec::ideal(4, 4, 4)).unwrap();
        let corpus = small_corpus(1);
        let out = run_sweep(&exact_plan(), &corpus, &g).unwrap();
        assert!(out.skipped.is_empty(), "{:?}", out.skipped);
        assert_eq!(out.rows.len(), 5);
        let cs: Vec<f64> = out.rows.iter().map(|r| r.chain_coupling).collect();
        assert_eq!(cs, DEFAULT_C_GRID);
    }

    #[test]
    fn exact_backend_with_strong_chains_always_succeeds() {
        let g = build_chimera(&ChimeraSpec::ideal(4, 4, 4)).unwrap();
        let corpus = small_corpus(3);
        let mut plan = exact_plan();
        plan.chain_couplings = vec![8.0];
        plan.strategies = StrategyKind::ALL.to_vec();
        let out = run_sweep(&plan, &corpus, &g).unwrap();
        for r in out.rows {
            assert_eq!(r.success_probability, 1.0, "{r:?}");
            assert!(r.unique_answers as u64 <= r.solution_count);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let g = build_chimera(&ChimeraSpec::ideal(4, 4, 4)).unwrap();
        let corpus = small_corpus(2);
        let mut plan = SweepPlan::new(
            5,
            BackendConfig::Sa(SaSchedule {
                sweeps: 50,
                reads: 20,
                ..SaSchedule::default()
            }),
        );
        plan.srt_count = 2;
        plan.workers = Some(1);
        let a = run_sweep(&plan, &corpus, &g).unwrap();
        plan.workers = Some(3);
        let b = run_sweep(&plan, &corpus, &g).unwrap();
        assert_eq!(a, b);
        let row = &a.rows[7];
        let inst = corpus.iter().find(|i| i.entry.instance_id == row.instance_id).unwrap();
        assert_eq!(&replay_row(&plan, inst, &g, row).unwrap(), row);
    }

    #[test]
    fn missing_embedding_skips_instance() {
        let g = build_chimera(&ChimeraSpec::ideal(4, 4, 4)).unwrap();
        let corpus = small_corpus(1);
        let dir = tempfile::tempdir().unwrap();
        let mut plan = exact_plan();
        plan.embeddings_dir = Some(dir.path().to_path_buf());
        let out = run_sweep(&plan, &corpus, &g).unwrap();
        assert!(out.rows.is_empty());
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].stage, "embed");
    }

    #[test]
    fn csv_round_trip_and_report_recompute() {
        let g = build_chimera(&ChimeraSpec::ideal(4, 4, 4)).unwrap();
        let corpus = small_corpus(2);
        let out = run_sweep(&exact_plan(), &corpus, &g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(RESULTS_FILE);
        write_results_csv(&path, &out.rows).unwrap();
        let back = read_results_csv(&path).unwrap();
        assert_eq!(back, out.rows);
        let report = build_report(&back, DEFAULT_BASELINE_C).unwrap();
        assert_eq!(report, build_report(&out.rows, DEFAULT_BASELINE_C).unwrap());
        let header = fs::read_to_string(&path).unwrap();
        assert!(header.starts_with(
            "instance_id,n,alpha,solution_count,strategy,chain_coupling,srt_index,seed,reads,success_probability,unique_answers,mpd,broken_chain_fraction,answers\n"
        ));
        assert_eq!(report.instances, 2);
        for curve in &report.success_ratio {
            if curve.included > 0 {
                assert_eq!(curve.median_ratio[0], Some(1.0));
            }
        }
    }
}
