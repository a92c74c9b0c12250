//! Mixed-SAT formulas: random generation, DIMACS I/O and capped model counting.
//!
//! Literals are DIMACS-style signed integers: `v` is variable `v` (1-based)
//! and `-v` its negation. Assignments are bit masks where bit `v - 1` set
//! means variable `v` is true.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Largest variable count [`count_solutions`] will enumerate.
pub const MAX_COUNT_VARS: usize = 30;

/// Solution-count cap used for downselection: instances must have strictly
/// fewer satisfying assignments than this.
pub const DEFAULT_SOLUTION_CAP: u64 = 1_000_000;

pub const DEFAULT_MAX_CLAUSE_LEN: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (c, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > n_vars {
                    return Err(Error::Parameter(format!(
                        "clause {c}: literal {lit} out of range for {n_vars} variables"
                    )));
                }
            }
        }
        Ok(CnfFormula { n_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_satisfied_by(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = assignment >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    }

    /// Evaluates against spins where +1 means true; extra spins are ignored.
    pub fn is_satisfied_by_spins(&self, spins: &[i8]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|&lit| (spins[lit.unsigned_abs() as usize - 1] > 0) == (lit > 0))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_dimacs(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, emit_dimacs(self)).map_err(|e| Error::io(path, e))
    }
}

/// Packs the first `n_vars` spins (+1 = true) into an assignment mask.
pub fn spins_to_assignment(spins: &[i8], n_vars: usize) -> u64 {
    spins[..n_vars]
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &v)| if v > 0 { acc | 1 << i } else { acc })
}

/// Random mixed-length formula: `alpha` clauses, each of length uniform in
/// `[1, max_len]`, over distinct variables with uniform polarities.
pub fn generate_mixed_sat(n: usize, alpha: usize, max_len: usize, rng_seed: u64) -> Result<CnfFormula> {
    if n == 0 {
        return Err(Error::Parameter("formula needs at least one variable".into()));
    }
    if max_len == 0 || max_len > n {
        return Err(Error::Parameter(format!(
            "clause length bound {max_len} must lie in 1..={n}"
        )));
    }
    let mut rng = seed::rng(rng_seed);
    let clauses = (0..alpha)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            rand::seq::index::sample(&mut rng, n, len)
                .into_iter()
                .map(|v| {
                    let var = v as i32 + 1;
                    if rng.gen_bool(0.5) {
                        var
                    } else {
                        -var
                    }
                })
                .collect()
        })
        .collect();
    Ok(CnfFormula { n_vars: n, clauses })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCount {
    pub count: u64,
    pub capped: bool,
}

impl SolutionCount {
    /// Keeps instances with at least one and strictly fewer than `cap` solutions.
    pub fn passes_downselection(&self, cap: u64) -> bool {
        !self.capped && self.count > 0 && self.count < cap
    }
}

/// Bit-sliced clause: 64 assignments sharing their high bits are evaluated at
/// once, one per lane of a `u64`.
struct SlicedClause {
    /// Literals on variables 0..6, as (lane pattern, positive).
    low: Vec<(u64, bool)>,
    /// Literals on higher variables, as (variable, positive).
    high: Vec<(u32, bool)>,
}

const LANE_PATTERNS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

impl SlicedClause {
    fn new(clause: &[i32]) -> Self {
        let mut low = Vec::new();
        let mut high = Vec::new();
        for &lit in clause {
            let var = lit.unsigned_abs() - 1;
            if var < 6 {
                low.push((LANE_PATTERNS[var as usize], lit > 0));
            } else {
                high.push((var, lit > 0));
            }
        }
        SlicedClause { low, high }
    }

    /// Lanes satisfied for the block whose high bits are `block << 6`.
    fn eval(&self, block: u64) -> u64 {
        let base = block << 6;
        if self.high.iter().any(|&(var, pos)| (base >> var & 1 == 1) == pos) {
            return u64::MAX;
        }
        self.low
            .iter()
            .fold(0u64, |acc, &(pattern, pos)| acc | if pos { pattern } else { !pattern })
    }
}

const BLOCKS_PER_CHUNK: u64 = 1 << 12;

/// Exact number of satisfying assignments, or `cap` with `capped = true` once
/// more than `cap` solutions have been seen.
pub fn count_solutions(f: &CnfFormula, cap: u64) -> Result<SolutionCount> {
    if f.n_vars > MAX_COUNT_VARS {
        return Err(Error::Capacity {
            what: "variable count",
            found: f.n_vars,
            limit: MAX_COUNT_VARS,
        });
    }
    if f.clauses.iter().any(Vec::is_empty) {
        return Ok(SolutionCount {
            count: 0,
            capped: false,
        });
    }
    let clauses: Vec<SlicedClause> = f.clauses.iter().map(|c| SlicedClause::new(c)).collect();
    let lanes = if f.n_vars >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << f.n_vars)) - 1
    };
    let blocks = 1u64 << f.n_vars.saturating_sub(6);
    let count_chunk = |chunk: u64| -> u64 {
        let start = chunk * BLOCKS_PER_CHUNK;
        let end = (start + BLOCKS_PER_CHUNK).min(blocks);
        (start..end)
            .map(|block| {
                let sat = clauses
                    .iter()
                    .fold(lanes, |acc, c| if acc == 0 { 0 } else { acc & c.eval(block) });
                sat.count_ones() as u64
            })
            .sum()
    };
    let chunks = blocks.div_ceil(BLOCKS_PER_CHUNK);
    // Chunks are processed in parallel waves so the cap can abort early.
    let wave = rayon::current_num_threads().max(1) as u64 * 4;
    let mut total = 0u64;
    let mut next = 0u64;
    while next < chunks {
        let end = (next + wave).min(chunks);
        total += (next..end).into_par_iter().map(count_chunk).sum::<u64>();
        if total > cap {
            return Ok(SolutionCount {
                count: cap,
                capped: true,
            });
        }
        next = end;
    }
    Ok(SolutionCount {
        count: total,
        capped: false,
    })
}

/// Parses DIMACS CNF. Comment lines start with `c`; `%` ends the input.
/// Clauses may span lines and must each be terminated by `0`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(parse_err(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let vars = parts[2]
                .parse()
                .map_err(|_| parse_err(line_no, "invalid variable count"))?;
            let count = parts[3]
                .parse()
                .map_err(|_| parse_err(line_no, "invalid clause count"))?;
            header = Some((vars, count));
            continue;
        }
        let (n_vars, _) = header.ok_or_else(|| parse_err(line_no, "clause before problem line"))?;
        for token in line.split_whitespace() {
            let lit: i32 = token
                .parse()
                .map_err(|_| parse_err(line_no, &format!("invalid literal {token:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(parse_err(line_no, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > n_vars {
                    return Err(parse_err(
                        line_no,
                        &format!("literal {lit} out of range for {n_vars} variables"),
                    ));
                }
                current.push(lit);
            }
        }
    }
    let (n_vars, count) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if !current.is_empty() {
        return Err(parse_err(0, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(parse_err(
            0,
            &format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfFormula { n_vars, clauses })
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

/// Canonical DIMACS text: the header `p cnf <vars> <clauses>`, then one clause
/// per line with literals separated by single spaces and a trailing ` 0`.
/// Every line ends with `\n`; no comments are written.
pub fn emit_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.n_vars, f.clauses.len());
    for clause in &f.clauses {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_count(f: &CnfFormula) -> u64 {
        (0..1u64 << f.n_vars).filter(|&a| f.is_satisfied_by(a)).count() as u64
    }

    #[test]
    fn ten_variable_instance() {
        let f = generate_mixed_sat(10, 10, 3, 1).unwrap();
        assert_eq!(f.clauses.len(), 10);
        assert!(f.clauses.iter().flatten().all(|l| l.unsigned_abs() <= 10));
    }

    #[test]
    fn generator_bounds_and_determinism() {
        for s in 0..50 {
            let f = generate_mixed_sat(12, 30, 4, s).unwrap();
            for c in &f.clauses {
                assert!((1..=4).contains(&c.len()));
                let mut vars: Vec<u32> = c.iter().map(|l| l.unsigned_abs()).collect();
                vars.sort_unstable();
                vars.dedup();
                assert_eq!(vars.len(), c.len());
            }
            let again = generate_mixed_sat(12, 30, 4, s).unwrap();
            assert_eq!(emit_dimacs(&f), emit_dimacs(&again));
        }
    }

    #[test]
    fn generator_rejects_bad_bounds() {
        assert!(generate_mixed_sat(3, 5, 4, 0).is_err());
        assert!(generate_mixed_sat(3, 5, 0, 0).is_err());
        assert!(generate_mixed_sat(0, 5, 1, 0).is_err());
    }

    #[test]
    fn empty_formula_counts_all() {
        let f = generate_mixed_sat(3, 0, 3, 9).unwrap();
        assert!(f.clauses.is_empty());
        let c = count_solutions(&f, DEFAULT_SOLUTION_CAP).unwrap();
        assert_eq!(
            c,
            SolutionCount {
                count: 8,
                capped: false
            }
        );
    }

    #[test]
    fn contradiction_counts_zero() {
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(count_solutions(&f, 10).unwrap().count, 0);
    }

    #[test]
    fn sixteen_variable_count_matches_enumeration() {
        for s in 0..4 {
            let f = generate_mixed_sat(16, 20, 3, s).unwrap();
            let c = count_solutions(&f, u64::MAX).unwrap();
            assert!(!c.capped);
            assert_eq!(c.count, naive_count(&f));
        }
    }

    #[test]
    fn small_variable_counts_mask_lanes() {
        for n in 1..=7 {
            let f = generate_mixed_sat(n, 2, 1, n as u64).unwrap();
            assert_eq!(count_solutions(&f, u64::MAX).unwrap().count, naive_count(&f));
        }
    }

    #[test]
    fn cap_and_capacity() {
        let f = CnfFormula::new(21, vec![]).unwrap();
        let c = count_solutions(&f, DEFAULT_SOLUTION_CAP).unwrap();
        assert!(c.capped);
        assert_eq!(c.count, DEFAULT_SOLUTION_CAP);
        assert!(!c.passes_downselection(DEFAULT_SOLUTION_CAP));
        // Exactly reaching the cap is not over it.
        let f = CnfFormula::new(3, vec![]).unwrap();
        assert!(!count_solutions(&f, 8).unwrap().capped);
        assert!(count_solutions(&f, 7).unwrap().capped);
        let big = CnfFormula::new(31, vec![]).unwrap();
        assert!(matches!(count_solutions(&big, 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn parse_simple() {
        let f = parse_dimacs("p cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(f.clauses, vec![vec![1, -2]]);
    }

    #[test]
    fn parse_multiline_and_comments() {
        let f = parse_dimacs("c hello\np cnf 3 2\n1 2\n 3 0 -1\n0\n").unwrap();
        assert_eq!(f.clauses, vec![vec![1, 2, 3], vec![-1]]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_dimacs("p cnf 2 1\n1 3 0\n").is_err());
        assert!(parse_dimacs("p dnf 2 1\n1 0\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2\n").is_err());
    }

    #[test]
    fn emit_format() {
        let f = CnfFormula::new(3, vec![vec![1, -3], vec![2]]).unwrap();
        assert_eq!(emit_dimacs(&f), "p cnf 3 2\n1 -3 0\n2 0\n");
    }

    #[test]
    fn round_trip_fixed_corpus() {
        for s in 0..20 {
            let f = generate_mixed_sat(1 + (s as usize % 12), 1 + s as usize, 1, s).unwrap();
            let text = emit_dimacs(&f);
            let back = parse_dimacs(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(emit_dimacs(&back), text);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn count_invariant_under_clause_order(seed in 0u64..10_000, perm_seed in 0u64..1000) {
                use rand::seq::SliceRandom;
                let f = generate_mixed_sat(11, 12, 3, seed).unwrap();
                let mut shuffled = f.clone();
                shuffled.clauses.shuffle(&mut crate::seed::rng(perm_seed));
                let a = count_solutions(&f, u64::MAX).unwrap();
                let b = count_solutions(&shuffled, u64::MAX).unwrap();
                prop_assert_eq!(a, b);
                prop_assert_eq!(a.count, naive_count(&f));
            }
        }
    }
}
