//! Bounded searches over pp-formulas built from one binary relation.
//!
//! The formula family has `m` free variables `x_0..x_{m-1}`, a single bound
//! variable `y` (index `m`) and atoms `ρ(v_i, v_j)` for ordered pairs of
//! distinct variables. For every assignment of the free variables we keep
//! the set of admissible `y` values as a bitmask, so adding an atom is one
//! AND per free tuple.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::analysis::is_gquord;
use crate::error::{GqError, Result};
use crate::formula::{in_qfpp_closure, qfpp_atoms, qfpp_closure, Atom, PpFormula};
use crate::partition::EquivPartition;
use crate::relation::{diagonal_relation, point_count, FiniteRelation, Universe};

/// Relation name used for the order in reported formulas.
pub const ORDER_NAME: &str = "order";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PpSweepConfig {
    pub free: usize,
    pub max_atoms: usize,
}

impl Default for PpSweepConfig {
    fn default() -> Self {
        PpSweepConfig {
            free: 4,
            max_atoms: 6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PpSweepOutcome {
    pub formulas: usize,
    pub distinct: usize,
    pub inside_closure: usize,
    /// Outputs outside the qf-pp closure that are not generalized quasiorders.
    pub outside_not_gquord: Vec<(PpFormula, FiniteRelation)>,
    /// Outputs outside the qf-pp closure that are generalized quasiorders.
    pub candidates: Vec<(PpFormula, FiniteRelation)>,
}

impl PpSweepOutcome {
    pub fn outside_closure(&self) -> usize {
        self.outside_not_gquord.len() + self.candidates.len()
    }
}

struct Sweep {
    pairs: Vec<(usize, usize)>,
    masks: Vec<Vec<u64>>,
    max_atoms: usize,
    free_points: usize,
    seen: HashMap<Vec<u64>, Vec<usize>>,
    order: Vec<Vec<u64>>,
    formulas: usize,
    chosen: Vec<usize>,
}

impl Sweep {
    fn record(&mut self, cur: &[u64]) {
        self.formulas += 1;
        let words = self.free_points.div_ceil(64);
        let mut key = vec![0u64; words];
        for (x, &mask) in cur.iter().enumerate() {
            if mask != 0 {
                key[x / 64] |= 1 << (x % 64);
            }
        }
        if !self.seen.contains_key(&key) {
            self.order.push(key.clone());
            self.seen.insert(key, self.chosen.clone());
        }
    }

    fn descend(&mut self, start: usize, cur: &[u64]) {
        self.record(cur);
        if self.chosen.len() == self.max_atoms {
            return;
        }
        let mut next = vec![0u64; cur.len()];
        for a in start..self.pairs.len() {
            for ((slot, &c), &m) in next.iter_mut().zip(cur).zip(&self.masks[a]) {
                *slot = c & m;
            }
            self.chosen.push(a);
            let snapshot = next.clone();
            self.descend(a + 1, &snapshot);
            self.chosen.pop();
        }
    }
}

fn formula_of(pairs: &[(usize, usize)], chosen: &[usize], free: usize) -> PpFormula {
    PpFormula {
        free_count: free,
        bound_count: 1,
        atoms: chosen
            .iter()
            .map(|&a| {
                let (i, j) = pairs[a];
                Atom::new(ORDER_NAME, vec![i, j], free + 1).expect("indices below free + 1")
            })
            .collect(),
    }
}

/// Evaluates every formula of the family, deduplicates the outputs and
/// tests each against the qf-pp closure of `{ρ}`.
pub fn pp_sweep(rho: &FiniteRelation, config: PpSweepConfig) -> Result<PpSweepOutcome> {
    if rho.arity() != 2 {
        return Err(GqError::ArityMismatch {
            expected: 2,
            actual: rho.arity(),
        });
    }
    let n = rho.n();
    if n > 64 {
        return Err(GqError::Resource {
            what: "universe size for the pp sweep".into(),
            required: n as u128,
            limit: 64,
            partial: 0,
        });
    }
    let m = config.free;
    let free_points = point_count(n, m)?;
    point_count(n, m + 1)?;
    let y = m;
    let all_y = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let up: Vec<u64> = (0..n)
        .map(|a| (0..n).filter(|&b| rho.contains(&[a, b])).fold(0, |acc, b| acc | 1 << b))
        .collect();
    let down: Vec<u64> = (0..n)
        .map(|a| (0..n).filter(|&b| rho.contains(&[b, a])).fold(0, |acc, b| acc | 1 << b))
        .collect();

    let mut pairs = Vec::new();
    for i in 0..=m {
        for j in 0..=m {
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    let mut masks = Vec::with_capacity(pairs.len());
    let mut t = vec![0; m];
    for &(i, j) in &pairs {
        let mut v = Vec::with_capacity(free_points);
        for x in 0..free_points {
            crate::relation::decode_into(x, n, &mut t);
            v.push(if i == y {
                down[t[j]]
            } else if j == y {
                up[t[i]]
            } else if rho.contains(&[t[i], t[j]]) {
                all_y
            } else {
                0
            });
        }
        masks.push(v);
    }

    let mut sweep = Sweep {
        pairs,
        masks,
        max_atoms: config.max_atoms,
        free_points,
        seen: HashMap::new(),
        order: Vec::new(),
        formulas: 0,
        chosen: Vec::new(),
    };
    let start = vec![all_y; free_points];
    sweep.descend(0, &start);

    let universe = rho.universe();
    let atoms = qfpp_atoms(std::slice::from_ref(rho), universe, m)?;
    let outputs: Vec<(Vec<usize>, FiniteRelation)> = sweep
        .order
        .iter()
        .map(|key| {
            let mut bits = FixedBitSet::with_capacity(free_points);
            for x in (0..free_points).filter(|&x| key[x / 64] >> (x % 64) & 1 == 1) {
                bits.insert(x);
            }
            let rel = FiniteRelation::from_bits(universe, m, bits);
            (sweep.seen[key].clone(), rel)
        })
        .collect();
    let classified: Vec<(bool, bool)> = outputs
        .par_iter()
        .map(|(_, rel)| {
            let inside = in_qfpp_closure(rel, &atoms);
            (inside, inside || is_gquord(rel))
        })
        .collect();

    let mut outcome = PpSweepOutcome {
        formulas: sweep.formulas,
        distinct: outputs.len(),
        inside_closure: 0,
        outside_not_gquord: Vec::new(),
        candidates: Vec::new(),
    };
    for ((chosen, rel), (inside, gq)) in outputs.into_iter().zip(classified) {
        if inside {
            outcome.inside_closure += 1;
            continue;
        }
        let phi = formula_of(&sweep.pairs, &chosen, m);
        if gq {
            outcome.candidates.push((phi, rel));
        } else {
            outcome.outside_not_gquord.push((phi, rel));
        }
    }
    Ok(outcome)
}

/// Whether `rel` is a diagonal relation (defined by equalities of coordinates only).
pub fn is_diagonal(rel: &FiniteRelation) -> bool {
    let Ok(positions) = Universe::new(rel.arity()) else {
        return false;
    };
    EquivPartition::all(positions)
        .iter()
        .any(|eps| diagonal_relation(rel.universe(), eps).is_ok_and(|d| d == *rel))
}

#[derive(Debug, Clone)]
pub struct GpordSweep {
    pub checked: usize,
    pub nontrivial: usize,
    /// Nontrivial gQuords that are not generalized partial orders.
    pub violations: Vec<FiniteRelation>,
}

/// Lists the nontrivial members of the qf-pp closure of `{ρ}` at arity `m`
/// and reports those that are not generalized partial orders. Nothing is
/// asserted here; callers decide what to do with violations.
pub fn gpord_sweep(rho: &FiniteRelation, m: usize, budget: usize) -> Result<GpordSweep> {
    let closure = qfpp_closure(std::slice::from_ref(rho), rho.universe(), m, budget)?;
    let mut out = GpordSweep {
        checked: closure.len(),
        nontrivial: 0,
        violations: Vec::new(),
    };
    for rel in closure {
        if is_diagonal(&rel) {
            continue;
        }
        out.nontrivial += 1;
        if !crate::analysis::classify(&rel).is_gpord {
            out.violations.push(rel);
        }
    }
    Ok(out)
}

/// Chain `0 < 1 < … < n-1`.
pub fn chain(n: usize) -> Result<FiniteRelation> {
    FiniteRelation::from_predicate(Universe::new(n)?, 2, |p| p[0] <= p[1])
}

/// The four-element lattice `2 × 2`, with `(a,b)` encoded as `2a + b`.
pub fn square_lattice() -> FiniteRelation {
    FiniteRelation::from_predicate(Universe::new(4).unwrap(), 2, |p| {
        p[0] / 2 <= p[1] / 2 && p[0] % 2 <= p[1] % 2
    })
    .unwrap()
}
