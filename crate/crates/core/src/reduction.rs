//! CNF to Ising reduction by clause penalties.
//!
//! With `s = +1` meaning true, the indicator that literal `l` is false is
//! `f_l = (1 - sigma_l s)/2`, where `sigma_l` is the literal's sign. A clause
//! is violated iff the product of its `f_l` is 1.
//!
//! * 1- and 2-literal clauses use the product directly; it is at most
//!   quadratic in the spins.
//! * 3-literal clauses introduce one ancilla `y` (true iff `s_y = +1`) and the
//!   product-linearization penalty
//!   `y f3 + f1 f2 - 2 f1 y - 2 f2 y + 3 y`,
//!   whose minimum over `y` is exactly `f1 f2 f3`, attained only at `y = f1 f2`.
//! * Longer clauses are first split into a chain of 3-literal clauses joined
//!   by chaining ancillas.
//!
//! Every clause penalty is scaled by its weight (1 by default) and the
//! constant parts are collected in the problem offset, so a satisfying
//! assignment with optimal ancillas has energy exactly 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::LogicalProblem;
use crate::sat::CnfFormula;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionMap {
    pub original_vars: usize,
    pub ancilla_count: usize,
    /// Logical indices of the ancillas introduced for each input clause.
    pub clause_ancillas: Vec<Vec<usize>>,
    pub penalty_weights: Vec<f64>,
}

impl ReductionMap {
    pub fn logical_size(&self) -> usize {
        self.original_vars + self.ancilla_count
    }

    /// Assignment mask of the original variables in a logical spin vector.
    pub fn project(&self, logical: &[i8]) -> u64 {
        crate::sat::spins_to_assignment(logical, self.original_vars)
    }
}

/// `constant + sum coeff * s_var`.
#[derive(Clone, Debug)]
struct Affine {
    constant: f64,
    terms: Vec<(usize, f64)>,
}

impl Affine {
    fn literal_false(var: usize, positive: bool) -> Self {
        let sigma = if positive { 1.0 } else { -1.0 };
        Affine {
            constant: 0.5,
            terms: vec![(var, -0.5 * sigma)],
        }
    }

    fn spin_true(var: usize) -> Self {
        Affine {
            constant: 0.5,
            terms: vec![(var, 0.5)],
        }
    }
}

struct Accumulator {
    problem: LogicalProblem,
    offset: f64,
}

impl Accumulator {
    fn add_affine(&mut self, weight: f64, a: &Affine) {
        self.offset += weight * a.constant;
        for &(v, c) in &a.terms {
            self.problem.add_bias(v, weight * c).expect("variable in range");
        }
    }

    fn add_product(&mut self, weight: f64, a: &Affine, b: &Affine) {
        self.offset += weight * a.constant * b.constant;
        for &(v, c) in &b.terms {
            self.problem.add_bias(v, weight * a.constant * c).unwrap();
        }
        for &(v, c) in &a.terms {
            self.problem.add_bias(v, weight * b.constant * c).unwrap();
        }
        for &(u, cu) in &a.terms {
            for &(v, cv) in &b.terms {
                if u == v {
                    self.offset += weight * cu * cv;
                } else {
                    self.problem.add_coupling(u, v, weight * cu * cv).unwrap();
                }
            }
        }
    }
}

/// Literal over logical indices: (index, positive).
type Lit = (usize, bool);

fn normalize_clause(clause: &[i32]) -> Option<Vec<Lit>> {
    let mut lits: Vec<Lit> = Vec::with_capacity(clause.len());
    for &lit in clause {
        let l = (lit.unsigned_abs() as usize - 1, lit > 0);
        if lits.contains(&(l.0, !l.1)) {
            return None;
        }
        if !lits.contains(&l) {
            lits.push(l);
        }
    }
    Some(lits)
}

/// Reduces `f` to a logical Ising problem whose ground energy is 0 iff `f` is
/// satisfiable and whose ground states project onto the satisfying
/// assignments of the original variables.
pub fn sat_to_ising(f: &CnfFormula) -> Result<(LogicalProblem, ReductionMap)> {
    if let Some(c) = f.clauses.iter().position(Vec::is_empty) {
        return Err(Error::Unsatisfiable(format!("clause {c} is empty")));
    }
    let normalized: Vec<Option<Vec<Lit>>> = f.clauses.iter().map(|c| normalize_clause(c)).collect();

    // Ancilla layout: chaining ancillas for long clauses, then one product
    // ancilla per resulting 3-literal piece.
    let mut next = f.n_vars;
    let mut pieces: Vec<Vec<(Vec<Lit>, Option<usize>)>> = Vec::with_capacity(normalized.len());
    let mut clause_ancillas = vec![Vec::new(); normalized.len()];
    for (c, lits) in normalized.iter().enumerate() {
        let Some(lits) = lits else {
            pieces.push(Vec::new());
            continue;
        };
        let mut parts = Vec::new();
        if lits.len() <= 3 {
            parts.push(lits.clone());
        } else {
            let k = lits.len();
            let mut link = next;
            next += 1;
            clause_ancillas[c].push(link);
            parts.push(vec![lits[0], lits[1], (link, true)]);
            for &lit in &lits[2..k - 2] {
                let fresh = next;
                next += 1;
                clause_ancillas[c].push(fresh);
                parts.push(vec![(link, false), lit, (fresh, true)]);
                link = fresh;
            }
            parts.push(vec![(link, false), lits[k - 2], lits[k - 1]]);
        }
        let parts = parts
            .into_iter()
            .map(|part| {
                let product = (part.len() == 3).then(|| {
                    next += 1;
                    clause_ancillas[c].push(next - 1);
                    next - 1
                });
                (part, product)
            })
            .collect();
        pieces.push(parts);
    }

    let penalty_weights = vec![1.0; f.clauses.len()];
    let mut acc = Accumulator {
        problem: LogicalProblem::new(next),
        offset: 0.0,
    };
    for (parts, &weight) in pieces.iter().zip(&penalty_weights) {
        for (part, product) in parts {
            let fs: Vec<Affine> = part.iter().map(|&(v, pos)| Affine::literal_false(v, pos)).collect();
            match (fs.as_slice(), product) {
                ([a], None) => acc.add_affine(weight, a),
                ([a, b], None) => acc.add_product(weight, a, b),
                ([a, b, c3], Some(y)) => {
                    let y = Affine::spin_true(*y);
                    acc.add_product(weight, &y, c3);
                    acc.add_product(weight, a, b);
                    acc.add_product(-2.0 * weight, a, &y);
                    acc.add_product(-2.0 * weight, b, &y);
                    acc.add_affine(3.0 * weight, &y);
                }
                _ => unreachable!("clause pieces have one to three literals"),
            }
        }
    }
    let mut problem = acc.problem;
    problem.set_offset(acc.offset);
    let map = ReductionMap {
        original_vars: f.n_vars,
        ancilla_count: next - f.n_vars,
        clause_ancillas,
        penalty_weights,
    };
    Ok((problem, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Energy, SpinVector, ENERGY_TOL};
    use crate::sat::generate_mixed_sat;
    use std::collections::BTreeSet;

    fn energies(p: &LogicalProblem) -> Vec<f64> {
        (0..1u64 << p.n())
            .map(|b| p.energy(&SpinVector::from_bits(b, p.n())).unwrap())
            .collect()
    }

    /// Minimum energy over ancillas for each assignment of the originals.
    fn min_over_ancillas(p: &LogicalProblem, originals: usize) -> Vec<f64> {
        let e = energies(p);
        let mut best = vec![f64::INFINITY; 1 << originals];
        for (b, v) in e.into_iter().enumerate() {
            let key = b & ((1 << originals) - 1);
            best[key] = best[key].min(v);
        }
        best
    }

    #[test]
    fn unit_clause_ground_state() {
        let f = CnfFormula::new(1, vec![vec![1]]).unwrap();
        let (p, map) = sat_to_ising(&f).unwrap();
        assert_eq!(map.ancilla_count, 0);
        let e = energies(&p);
        assert!((e[1] - 0.0).abs() < ENERGY_TOL);
        assert!((e[0] - 1.0).abs() < ENERGY_TOL);
    }

    #[test]
    fn two_clause_penalty() {
        let f = CnfFormula::new(2, vec![vec![1, 2]]).unwrap();
        let (p, _) = sat_to_ising(&f).unwrap();
        let e = energies(&p);
        // Bit 0 is x1, bit 1 is x2; only (false, false) violates.
        assert!(e[0] > 0.5);
        assert!(e[1..4].iter().all(|v| v.abs() < ENERGY_TOL));
    }

    #[test]
    fn three_clause_gadget() {
        let f = CnfFormula::new(3, vec![vec![1, -2, 3]]).unwrap();
        let (p, map) = sat_to_ising(&f).unwrap();
        assert_eq!(map.ancilla_count, 1);
        assert_eq!(map.clause_ancillas, vec![vec![3]]);
        let best = min_over_ancillas(&p, 3);
        for (a, &v) in best.iter().enumerate() {
            if f.is_satisfied_by(a as u64) {
                assert!(v.abs() < ENERGY_TOL, "assignment {a:03b} penalized {v}");
            } else {
                assert!(v >= 1.0 - ENERGY_TOL);
            }
        }
        assert_eq!(best.iter().filter(|v| v.abs() < ENERGY_TOL).count(), 7);
    }

    #[test]
    fn long_clause_is_chained() {
        let f = CnfFormula::new(5, vec![vec![1, 2, -3, 4, 5]]).unwrap();
        let (p, map) = sat_to_ising(&f).unwrap();
        // Two chaining ancillas and three product ancillas.
        assert_eq!(map.ancilla_count, 5);
        assert_eq!(map.clause_ancillas[0].len(), 5);
        let best = min_over_ancillas(&p, 5);
        for (a, &v) in best.iter().enumerate() {
            if f.is_satisfied_by(a as u64) {
                assert!(v.abs() < ENERGY_TOL);
            } else {
                assert!(v >= 1.0 - ENERGY_TOL);
            }
        }
    }

    #[test]
    fn tautology_and_duplicates() {
        let f = CnfFormula::new(2, vec![vec![1, -1], vec![2, 2]]).unwrap();
        let (p, map) = sat_to_ising(&f).unwrap();
        assert_eq!(map.ancilla_count, 0);
        let e = energies(&p);
        assert!(e[0b10].abs() < ENERGY_TOL && e[0b11].abs() < ENERGY_TOL);
        assert!(e[0] > 0.5 && e[1] > 0.5);
    }

    #[test]
    fn empty_clause_rejected() {
        let f = CnfFormula {
            n_vars: 1,
            clauses: vec![vec![]],
        };
        assert!(matches!(sat_to_ising(&f), Err(Error::Unsatisfiable(_))));
    }

    #[test]
    fn ground_states_project_to_solutions() {
        for s in 0..40 {
            let f = generate_mixed_sat(6, 4 + s as usize % 6, 3, s).unwrap();
            let (p, map) = sat_to_ising(&f).unwrap();
            if p.n() > 16 {
                continue;
            }
            let e = energies(&p);
            let min = e.iter().cloned().fold(f64::INFINITY, f64::min);
            let solutions: BTreeSet<u64> = (0..1u64 << 6).filter(|&a| f.is_satisfied_by(a)).collect();
            if solutions.is_empty() {
                assert!(min >= 1.0 - ENERGY_TOL);
                continue;
            }
            assert!(min.abs() < ENERGY_TOL);
            let projected: BTreeSet<u64> = (0..e.len())
                .filter(|&b| e[b] <= min + ENERGY_TOL)
                .map(|b| map.project(SpinVector::from_bits(b as u64, p.n()).values()))
                .collect();
            assert_eq!(projected, solutions);
        }
    }
}
