use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use chainsmith::annealer::{sample, BackendConfig, SaSchedule, SampleSet};
use chainsmith::chimera::{build_chimera, greedy_embed, ChimeraSpec, DEFAULT_EMBED_TRIES};
use chainsmith::corpus::{generate_corpus, load_corpus, write_corpus, CorpusConfig};
use chainsmith::decode::{decode_concert, write_decoded_csv, ConcertPolicy, DecodedRow};
use chainsmith::embedding::Embedding;
use chainsmith::hardware::HardwareGraph;
use chainsmith::harness::{
    build_report, read_results_csv, run_sweep, write_outputs, write_report, SweepPlan, DEFAULT_BASELINE_C,
    DEFAULT_C_GRID, REPORT_FILE,
};
use chainsmith::paramset::{compute_weights, parameterize, srt_set, ParamConfig, SrtMode, StrategyKind, DEFAULT_H_MIN};
use chainsmith::problem::{LogicalProblem, PhysicalProblem, SpinVector};
use chainsmith::reduction::sat_to_ising;
use chainsmith::sat::{count_solutions, CnfFormula, DEFAULT_MAX_CLAUSE_LEN, DEFAULT_SOLUTION_CAP};
use chainsmith::seed;

#[derive(Parser)]
#[command(
    name = "chainsmith",
    version,
    about = "Embedded Ising parameter setting and sweep analysis"
)]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 2016)]
    seed: u64,

    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = "CHAINSMITH_WORKERS")]
    workers: Option<usize>,

    /// Sampler backend: exact or sa.
    #[arg(long, global = true, default_value = "sa")]
    backend: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a downselected mixed-SAT corpus.
    Gen(GenArgs),
    /// Count satisfying assignments of a DIMACS formula.
    Count {
        cnf: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SOLUTION_CAP)]
        cap: u64,
    },
    /// Reduce a DIMACS formula to a logical Ising problem.
    Reduce {
        cnf: PathBuf,
        /// Also write the ancilla map here.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Write a Chimera hardware description.
    Hardware(HardwareArgs),
    /// Embed a logical problem into a hardware graph.
    Embed {
        logical: PathBuf,
        #[arg(long)]
        hardware: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_EMBED_TRIES)]
        tries: usize,
    },
    /// Build the physical problem for one strategy and chain coupling.
    Parametrize(ParametrizeArgs),
    /// Sample a physical problem.
    Sample {
        physical: PathBuf,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Decode a samples file back to logical assignments.
    Decode(DecodeArgs),
    /// Run the full strategy x chain coupling x SRT sweep over a corpus.
    Sweep(SweepArgs),
    /// Recompute the report from a results CSV.
    Report {
        results: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BASELINE_C)]
        baseline_c: f64,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![8, 10])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 20])]
    alpha: Vec<usize>,
    /// Instances per (n, alpha) cell.
    #[arg(long, default_value_t = 10)]
    per_cell: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_CLAUSE_LEN)]
    max_len: usize,
    #[arg(long, default_value_t = DEFAULT_SOLUTION_CAP)]
    cap: u64,
}

#[derive(Args)]
struct HardwareArgs {
    /// dw2-like or dw2x-like.
    #[arg(long, conflicts_with_all = ["rows", "cols", "dead_count"])]
    preset: Option<String>,
    #[arg(long, default_value_t = 8)]
    rows: usize,
    #[arg(long, default_value_t = 8)]
    cols: usize,
    #[arg(long, default_value_t = 4)]
    cell_half: usize,
    /// Random dead qubits drawn from --seed.
    #[arg(long, default_value_t = 0)]
    dead_count: usize,
}

#[derive(Args)]
struct SrtArgs {
    /// Instance id the SRT seed is derived from, matching the sweep.
    #[arg(long, default_value = "instance")]
    instance_id: String,
    #[arg(long, default_value = "all-terms")]
    srt_mode: SrtMode,
    /// Seed for the SRT vectors; derived from --seed when absent.
    #[arg(long)]
    srt_seed: Option<u64>,
    /// Flip whole chains together.
    #[arg(long)]
    srt_chain_constant: bool,
}

#[derive(Args)]
struct ParametrizeArgs {
    logical: PathBuf,
    #[arg(long)]
    hardware: Option<PathBuf>,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long, default_value = "even")]
    strategy: StrategyKind,
    #[arg(long, default_value_t = 1.6)]
    chain_coupling: f64,
    #[arg(long, default_value_t = DEFAULT_H_MIN)]
    h_min: f64,
    /// Which SRT of the set to apply; 0 is the identity.
    #[arg(long, default_value_t = 0)]
    srt_index: usize,
    #[command(flatten)]
    srt: SrtArgs,
}

#[derive(Args)]
struct SamplerArgs {
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long, default_value_t = 0.1)]
    beta_start: f64,
    #[arg(long, default_value_t = 5.0)]
    beta_end: f64,
}

impl SamplerArgs {
    fn backend(&self, name: &str) -> Result<BackendConfig> {
        let schedule = SaSchedule {
            sweeps: self.sweeps,
            beta_start: self.beta_start,
            beta_end: self.beta_end,
            reads: self.reads,
        };
        Ok(BackendConfig::from_name(name, self.reads, Some(schedule))?)
    }
}

#[derive(Args)]
struct DecodeArgs {
    samples: PathBuf,
    #[arg(long)]
    logical: PathBuf,
    #[arg(long)]
    hardware: Option<PathBuf>,
    #[arg(long)]
    embedding: PathBuf,
    /// Formula for the satisfied column.
    #[arg(long)]
    cnf: PathBuf,
    /// SRT the samples were drawn under; undone before decoding.
    #[arg(long, default_value_t = 0)]
    srt_index: usize,
    #[command(flatten)]
    srt: SrtArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Corpus directory or manifest file.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    hardware: Option<PathBuf>,
    /// Directory of <instance_id>.json embeddings to use instead of embedding.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = StrategyKind::ALL.to_vec())]
    strategies: Vec<StrategyKind>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_C_GRID.to_vec())]
    chain_couplings: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_H_MIN)]
    h_min: f64,
    #[arg(long, default_value_t = 1)]
    srt_count: usize,
    #[command(flatten)]
    srt: SrtArgs,
    #[arg(long, default_value = "any")]
    concert_policy: ConcertPolicy,
    #[arg(long, default_value_t = DEFAULT_BASELINE_C)]
    baseline_c: f64,
    #[arg(long, default_value_t = DEFAULT_EMBED_TRIES)]
    embed_tries: usize,
    #[command(flatten)]
    sampler: SamplerArgs,
}

fn load_hardware(path: Option<&Path>) -> Result<HardwareGraph> {
    match path {
        Some(p) => HardwareGraph::load(p).with_context(|| format!("loading hardware {}", p.display())),
        None => Ok(build_chimera(&ChimeraSpec::ideal(8, 8, 4))?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn srt_vector(seed_value: u64, srt: &SrtArgs, index: usize, n: usize, e: &Embedding) -> Result<SpinVector> {
    let id = seed::hash_str(&srt.instance_id);
    let s = match srt.srt_seed {
        Some(s) => seed::derive(s, &[id]),
        None => seed::derive(seed_value, &[seed::STAGE_SRT, id]),
    };
    let mut set = srt_set(n, index + 1, s, srt.srt_chain_constant, Some(e))?;
    Ok(set.pop().expect("set is nonempty"))
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gen(a) => {
            let mut cfg = CorpusConfig::new(a.n, a.alpha, a.per_cell, cli.seed);
            cfg.max_len = a.max_len;
            cfg.cap = a.cap;
            let corpus = generate_corpus(&cfg)?;
            let dir = out.unwrap_or(Path::new("corpus"));
            write_corpus(dir, &corpus)?;
            eprintln!("wrote {} instances to {}", corpus.len(), dir.display());
        }
        Command::Count { cnf, cap } => {
            let f = CnfFormula::load(&cnf)?;
            let c = count_solutions(&f, cap)?;
            emit(out, &(serde_json::to_string(&c)? + "\n"))?;
        }
        Command::Reduce { cnf, map } => {
            let f = CnfFormula::load(&cnf)?;
            let (l, m) = sat_to_ising(&f)?;
            if let Some(p) = map {
                fs::write(&p, serde_json::to_string_pretty(&m)?).with_context(|| format!("writing {}", p.display()))?;
            }
            emit(out, &(l.to_json()? + "\n"))?;
        }
        Command::Hardware(a) => {
            let spec = match &a.preset {
                Some(name) => ChimeraSpec::preset(name)?,
                None if a.dead_count > 0 => {
                    let mut spec = ChimeraSpec::with_random_dead(a.rows, a.cols, a.cell_half, a.dead_count, cli.seed)?;
                    spec.label = Some(format!("{} random dead qubits from seed {}", a.dead_count, cli.seed));
                    spec
                }
                None => ChimeraSpec::ideal(a.rows, a.cols, a.cell_half),
            };
            let g = build_chimera(&spec)?;
            emit(out, &(g.to_json()? + "\n"))?;
        }
        Command::Embed {
            logical,
            hardware,
            tries,
        } => {
            let l = LogicalProblem::load(&logical)?;
            let g = load_hardware(hardware.as_deref())?;
            let e = greedy_embed(&l, &g, seed::derive(cli.seed, &[seed::STAGE_EMBED]), tries)?;
            emit(out, &(serde_json::to_string(&e)? + "\n"))?;
        }
        Command::Parametrize(a) => {
            let l = LogicalProblem::load(&a.logical)?;
            let g = load_hardware(a.hardware.as_deref())?;
            let e = Embedding::load(&a.embedding)?;
            let mut cfg = ParamConfig::new(a.strategy, a.chain_coupling).with_h_min(a.h_min);
            if a.srt_index > 0 {
                cfg = cfg.with_srt(
                    srt_vector(cli.seed, &a.srt, a.srt_index, g.num_qubits(), &e)?,
                    a.srt.srt_mode,
                );
            }
            let p = parameterize(&l, &g, &e, &cfg)?;
            emit(out, &(p.to_json()? + "\n"))?;
        }
        Command::Sample { physical, sampler } => {
            let p = PhysicalProblem::load(&physical)?;
            let cfg = sampler.backend(&cli.backend)?;
            let set = with_workers(cli.workers, || {
                sample(&p, &cfg, seed::derive(cli.seed, &[seed::STAGE_SAMPLE]))
            })??;
            let path = out.unwrap_or(Path::new("samples.csv"));
            set.save(path)?;
            eprintln!("wrote {} reads to {}", set.total_reads(), path.display());
        }
        Command::Decode(a) => decode(cli.seed, out, a)?,
        Command::Sweep(a) => sweep(&cli.backend, cli.seed, cli.workers, out, a)?,
        Command::Report { results, baseline_c } => {
            let rows = read_results_csv(&results)?;
            let report = build_report(&rows, baseline_c)?;
            let path = match out {
                Some(p) => p.to_path_buf(),
                None => results.with_file_name(REPORT_FILE),
            };
            write_report(&path, &report)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(w) => Ok(rayon::ThreadPoolBuilder::new().num_threads(w).build()?.install(f)),
        None => Ok(f()),
    }
}

fn decode(seed_value: u64, out: Option<&Path>, a: DecodeArgs) -> Result<()> {
    let set = SampleSet::load(&a.samples)?;
    let l = LogicalProblem::load(&a.logical)?;
    let g = load_hardware(a.hardware.as_deref())?;
    let e = Embedding::load(&a.embedding)?;
    let f = CnfFormula::load(&a.cnf)?;
    let w = compute_weights(&l, &g, &e);
    let r = srt_vector(seed_value, &a.srt, a.srt_index, g.num_qubits(), &e)?;
    if set.num_qubits != g.num_qubits() {
        bail!(
            "samples have {} qubits, hardware has {}",
            set.num_qubits,
            g.num_qubits()
        );
    }
    let mut rows = Vec::new();
    for (k, read) in set.reads.iter().enumerate() {
        let s = SpinVector::new(read.spins.values().iter().zip(r.values()).map(|(x, y)| x * y).collect())?;
        let mut rng = seed::rng(seed::derive(set.provenance.seed, &[seed::STAGE_DECODE, k as u64]));
        for cand in decode_concert(&s, &e, &w, &mut rng)? {
            rows.push(DecodedRow {
                instance_id: a.srt.instance_id.clone(),
                read_index: k,
                decoder: cand.decoder.to_string(),
                bitstring: cand.values.bitstring(),
                broken_chain_count: cand.broken_chains.len(),
                satisfied: f.is_satisfied_by_spins(cand.values.values()),
            });
        }
    }
    let path = out.unwrap_or(Path::new("decoded.csv"));
    write_decoded_csv(path, &rows)?;
    eprintln!("wrote {} decoded rows to {}", rows.len(), path.display());
    Ok(())
}

fn sweep(backend: &str, seed_value: u64, workers: Option<usize>, out: Option<&Path>, a: SweepArgs) -> Result<()> {
    let instances = load_corpus(&a.corpus).with_context(|| format!("loading corpus {}", a.corpus.display()))?;
    let g = load_hardware(a.hardware.as_deref())?;
    let mut plan = SweepPlan::new(seed_value, a.sampler.backend(backend)?);
    plan.strategies = a.strategies;
    plan.chain_couplings = a.chain_couplings;
    plan.h_min = a.h_min;
    plan.srt_count = a.srt_count;
    plan.srt_mode = a.srt.srt_mode;
    plan.srt_seed = a.srt.srt_seed;
    plan.srt_chain_constant = a.srt.srt_chain_constant;
    plan.concert_policy = a.concert_policy;
    plan.baseline_c = a.baseline_c;
    plan.embed_tries = a.embed_tries;
    plan.embeddings_dir = a.embeddings;
    plan.workers = workers;
    let outcome = run_sweep(&plan, &instances, &g)?;
    let report = build_report(&outcome.rows, plan.baseline_c)?;
    let dir = out.unwrap_or(Path::new("sweep"));
    write_outputs(dir, &outcome, &report)?;
    eprintln!(
        "{} instances swept, {} skipped, {} rows written to {}",
        report.instances,
        outcome.skipped.len(),
        outcome.rows.len(),
        dir.display()
    );
    for s in &outcome.skipped {
        eprintln!("  skipped {} at {}: {}", s.instance_id, s.stage, s.reason);
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
