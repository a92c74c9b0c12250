//! Mixed-SAT instance corpora with solution-count downselection.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sat::{count_solutions, generate_mixed_sat, CnfFormula, DEFAULT_MAX_CLAUSE_LEN, DEFAULT_SOLUTION_CAP};
use crate::seed;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub instance_id: String,
    pub n: usize,
    pub alpha: usize,
    pub seed: u64,
    pub solution_count: u64,
    pub capped: bool,
    pub max_len: usize,
}

impl ManifestEntry {
    pub fn file_name(&self) -> String {
        format!("{}.cnf", self.instance_id)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub entry: ManifestEntry,
    pub formula: CnfFormula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusConfig {
    pub n_values: Vec<usize>,
    pub alpha_values: Vec<usize>,
    /// Accepted instances per (n, alpha) cell.
    pub per_cell: usize,
    pub max_len: usize,
    pub cap: u64,
    pub master_seed: u64,
    /// Candidates tried per cell before giving up, as a multiple of `per_cell`.
    pub attempt_factor: usize,
}

impl CorpusConfig {
    pub fn new(n_values: Vec<usize>, alpha_values: Vec<usize>, per_cell: usize, master_seed: u64) -> Self {
        CorpusConfig {
            n_values,
            alpha_values,
            per_cell,
            max_len: DEFAULT_MAX_CLAUSE_LEN,
            cap: DEFAULT_SOLUTION_CAP,
            master_seed,
            attempt_factor: 50,
        }
    }
}

/// Seed of candidate `k` in cell `(n, alpha)`.
pub fn instance_seed(master_seed: u64, n: usize, alpha: usize, k: usize) -> u64 {
    seed::derive(master_seed, &[seed::STAGE_CORPUS, n as u64, alpha as u64, k as u64])
}

fn candidate(cfg: &CorpusConfig, n: usize, alpha: usize, k: usize) -> Result<Option<Instance>> {
    let s = instance_seed(cfg.master_seed, n, alpha, k);
    let formula = generate_mixed_sat(n, alpha, cfg.max_len.min(n), s)?;
    let count = count_solutions(&formula, cfg.cap)?;
    if !count.passes_downselection(cfg.cap) {
        return Ok(None);
    }
    Ok(Some(Instance {
        entry: ManifestEntry {
            instance_id: format!("n{n}-a{alpha}-{k:04}"),
            n,
            alpha,
            seed: s,
            solution_count: count.count,
            capped: count.capped,
            max_len: cfg.max_len.min(n),
        },
        formula,
    }))
}

/// Generates candidates in index order per cell and keeps the first
/// `per_cell` that have at least one and fewer than `cap` solutions.
/// Candidates are evaluated in parallel batches; the result does not depend
/// on the worker count.
pub fn generate_corpus(cfg: &CorpusConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for &n in &cfg.n_values {
        for &alpha in &cfg.alpha_values {
            let budget = cfg.per_cell * cfg.attempt_factor.max(1);
            let batch = (cfg.per_cell * 2).max(8);
            let mut kept = Vec::new();
            let mut next = 0;
            while kept.len() < cfg.per_cell && next < budget {
                let end = (next + batch).min(budget);
                let found: Vec<Option<Instance>> = (next..end)
                    .into_par_iter()
                    .map(|k| candidate(cfg, n, alpha, k))
                    .collect::<Result<_>>()?;
                kept.extend(found.into_iter().flatten());
                next = end;
            }
            kept.truncate(cfg.per_cell);
            if kept.len() < cfg.per_cell {
                log::warn!(
                    "cell n={n} alpha={alpha}: only {} of {} instances passed downselection",
                    kept.len(),
                    cfg.per_cell
                );
            }
            out.extend(kept);
        }
    }
    Ok(out)
}

/// Writes `manifest.json` and one DIMACS file per instance into `dir`.
pub fn write_corpus(dir: &Path, instances: &[Instance]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for inst in instances {
        inst.formula.save(&dir.join(inst.entry.file_name()))?;
    }
    let entries: Vec<&ManifestEntry> = instances.iter().map(|i| &i.entry).collect();
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&entries)?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Accepts a manifest file or the directory holding one.
pub fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

/// Loads a manifest and the DIMACS files next to it.
pub fn load_corpus(path: &Path) -> Result<Vec<Instance>> {
    let path = manifest_path(path);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    entries
        .into_iter()
        .map(|entry| {
            let formula = CnfFormula::load(&dir.join(entry.file_name()))?;
            if formula.n_vars != entry.n {
                return Err(Error::Config(format!(
                    "{}: manifest says n={}, file has {}",
                    entry.instance_id, entry.n, formula.n_vars
                )));
            }
            Ok(Instance { entry, formula })
        })
        .collect()
}
