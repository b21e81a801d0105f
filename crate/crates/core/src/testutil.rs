use fixedbitset::FixedBitSet;

use crate::analysis::is_gquord;
use crate::relation::{checked_pow, FiniteRelation, Universe};

pub fn u(n: usize) -> Universe {
    Universe::new(n).unwrap()
}

/// All `2^(n^m)` relations, ascending by bitmask.
pub fn all_relations(n: usize, m: usize) -> impl Iterator<Item = FiniteRelation> {
    let points = checked_pow(n, m).unwrap();
    assert!(points < 64);
    (0..1u64 << points).map(move |mask| {
        let mut bits = FixedBitSet::with_capacity(points);
        for i in 0..points {
            if mask >> i & 1 == 1 {
                bits.insert(i);
            }
        }
        FiniteRelation::from_bits(u(n), m, bits)
    })
}

/// Generalized quasiorders by brute-force filtering.
pub fn brute_gquords(n: usize, m: usize) -> Vec<FiniteRelation> {
    all_relations(n, m).filter(is_gquord).collect()
}
