//! Enumeration of generalized quasiorders and their subclasses.
//!
//! Both gQuords and gEqs are closed under intersection, so they are the
//! closed sets of a closure operator on `A^m` and NextClosure lists them
//! without touching non-closed sets.

use std::str::FromStr;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{classify, lift_partition, transitive_closure};
use crate::error::{GqError, Result};
use crate::partition::EquivPartition;
use crate::relation::{point_count, FiniteRelation, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    GQuord,
    GEq,
    GPord,
    WgPord,
    /// Lifts `ψ^↕m` of all equivalence relations (for `m = 2` the
    /// equivalence relations themselves).
    Equivalences,
    /// Binary generalized quasiorders; requires `m = 2`.
    Preorders,
}

impl FromStr for Kind {
    type Err = GqError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gquord" => Kind::GQuord,
            "geq" => Kind::GEq,
            "gpord" => Kind::GPord,
            "wgpord" => Kind::WgPord,
            "equivalences" => Kind::Equivalences,
            "preorders" => Kind::Preorders,
            other => return Err(GqError::Invalid(format!("unknown kind `{other}`"))),
        })
    }
}

/// Ganter's NextClosure: all closed sets of `close` on `0..size`, in lectic order.
fn next_closure(
    size: usize,
    close: impl Fn(&FixedBitSet) -> FixedBitSet,
    limit: usize,
) -> Result<Vec<FixedBitSet>> {
    let mut current = close(&FixedBitSet::with_capacity(size));
    let mut out = vec![current.clone()];
    loop {
        let mut advanced = false;
        for i in (0..size).rev() {
            if current.contains(i) {
                continue;
            }
            let mut seed = FixedBitSet::with_capacity(size);
            for j in current.ones().take_while(|&j| j < i) {
                seed.insert(j);
            }
            seed.insert(i);
            let candidate = close(&seed);
            // canonicity: nothing new below i
            if candidate.ones().take_while(|&j| j < i).eq(seed.ones().take_while(|&j| j < i)) {
                current = candidate;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Ok(out);
        }
        if out.len() >= limit {
            return Err(GqError::Resource {
                what: "enumerated relations".into(),
                required: out.len() as u128 + 1,
                limit: limit as u128,
                partial: out.len(),
            });
        }
        out.push(current.clone());
    }
}

fn gquord_closure(universe: Universe, m: usize) -> impl Fn(&FixedBitSet) -> FixedBitSet {
    let delta = FiniteRelation::constant_tuples(universe, m).expect("checked size");
    move |x| {
        let mut r = FiniteRelation::from_bits(universe, m, x.clone());
        r.union_in_place(&delta);
        transitive_closure(&r).bits().clone()
    }
}

fn symmetric_closure(rel: &FiniteRelation) -> FiniteRelation {
    let m = rel.arity();
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    let mut out = rel.clone();
    let mut image = vec![0; m];
    for t in rel.tuples() {
        for p in &perms {
            for (slot, &i) in image.iter_mut().zip(p) {
                *slot = t[i];
            }
            out.insert(&image).expect("same shape");
        }
    }
    out
}

fn geq_closure(universe: Universe, m: usize) -> impl Fn(&FixedBitSet) -> FixedBitSet {
    let delta = FiniteRelation::constant_tuples(universe, m).expect("checked size");
    move |x| {
        let mut r = symmetric_closure(&FiniteRelation::from_bits(universe, m, x.clone()));
        r.union_in_place(&delta);
        transitive_closure(&r).bits().clone()
    }
}

/// All relations of the given kind on `n` elements with arity `m`, sorted.
/// Fails when more than `limit` relations would be produced.
pub fn enumerate(kind: Kind, n: usize, m: usize, limit: usize) -> Result<Vec<FiniteRelation>> {
    let universe = Universe::new(n)?;
    let size = point_count(n, m)?;
    if m == 0 {
        return Err(GqError::Invalid("arity must be positive".into()));
    }
    let to_rel = |bits: Vec<FixedBitSet>| -> Vec<FiniteRelation> {
        bits.into_iter()
            .map(|b| FiniteRelation::from_bits(universe, m, b))
            .collect()
    };
    let mut out = match kind {
        Kind::GQuord => to_rel(next_closure(size, gquord_closure(universe, m), limit)?),
        Kind::Preorders => {
            if m != 2 {
                return Err(GqError::ArityMismatch {
                    expected: 2,
                    actual: m,
                });
            }
            to_rel(next_closure(size, gquord_closure(universe, m), limit)?)
        }
        Kind::GEq => to_rel(next_closure(size, geq_closure(universe, m), limit)?),
        Kind::GPord | Kind::WgPord => {
            let all = to_rel(next_closure(size, gquord_closure(universe, m), limit)?);
            all.into_iter()
                .filter(|r| {
                    let rep = classify(r);
                    if kind == Kind::GPord {
                        rep.is_gpord
                    } else {
                        rep.is_wgpord
                    }
                })
                .collect()
        }
        Kind::Equivalences => EquivPartition::all(universe)
            .iter()
            .map(|psi| lift_partition(psi, m))
            .collect::<Result<Vec<_>>>()?,
    };
    out.sort();
    Ok(out)
}

/// A random generalized quasiorder: the transitive closure of the diagonal
/// plus each other tuple independently with probability `density`.
pub fn random_gquord<R: Rng>(rng: &mut R, universe: Universe, m: usize, density: f64) -> Result<FiniteRelation> {
    let mut seed = FiniteRelation::from_predicate(universe, m, |_| rng.gen_bool(density))?;
    seed.union_in_place(&FiniteRelation::constant_tuples(universe, m)?);
    Ok(transitive_closure(&seed))
}

/// `count` closure-generated gQuords from a fixed seed. Densities cycle
/// through a small range so both sparse and dense results appear.
pub fn sample_gquords(n: usize, m: usize, count: usize, seed: u64) -> Result<Vec<FiniteRelation>> {
    const DENSITIES: [f64; 4] = [0.02, 0.05, 0.1, 0.2];
    let universe = Universe::new(n)?;
    point_count(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| random_gquord(&mut rng, universe, m, DENSITIES[i % DENSITIES.len()]))
        .collect()
}
