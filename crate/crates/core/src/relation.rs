//! Finite universes, tuple encoding and dense m-ary relations.
//!
//! A tuple `(t_0, …, t_{m-1})` over `{0, …, n-1}` is stored as the base-`n`
//! integer `Σ t_i · n^(m-1-i)`, so the first coordinate is the most
//! significant digit and ascending indices enumerate tuples in
//! lexicographic order.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use fixedbitset::FixedBitSet;

use crate::error::{GqError, Result};

/// Default bound on `n^m` for any relation or operation table.
pub const DEFAULT_MAX_POINTS: usize = 1 << 24;

static MAX_POINTS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_POINTS);

/// Current bound on the number of encodable points `n^m`.
pub fn max_points() -> usize {
    MAX_POINTS.load(Ordering::Relaxed)
}

/// Overrides the encodable-point guard for the whole process.
pub fn set_max_points(limit: usize) {
    MAX_POINTS.store(limit.max(1), Ordering::Relaxed);
}

/// `n^m`, or `None` on overflow.
pub fn checked_pow(n: usize, m: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..m {
        acc = acc.checked_mul(n)?;
    }
    Some(acc)
}

/// `n^m` checked against the point guard.
pub fn point_count(n: usize, m: usize) -> Result<usize> {
    let limit = max_points();
    match checked_pow(n, m) {
        Some(p) if p <= limit => Ok(p),
        other => Err(GqError::Resource {
            what: format!("{n}^{m} encodable points"),
            required: other.map_or(u128::MAX, |p| p as u128),
            limit: limit as u128,
            partial: 0,
        }),
    }
}

/// The base set `{0, …, n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Universe(usize);

impl Universe {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(GqError::EmptyUniverse);
        }
        Ok(Universe(size))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    pub fn elements(self) -> std::ops::Range<usize> {
        0..self.0
    }

    pub(crate) fn check(self, value: usize) -> Result<usize> {
        if value < self.0 {
            Ok(value)
        } else {
            Err(GqError::OutOfRange {
                value,
                size: self.0,
            })
        }
    }
}

/// Encodes `tuple` as a base-`n` integer, first coordinate most significant.
pub fn encode_tuple(tuple: &[usize], universe: Universe, arity: usize) -> Result<usize> {
    if tuple.len() != arity {
        return Err(GqError::ArityMismatch {
            expected: arity,
            actual: tuple.len(),
        });
    }
    let n = universe.size();
    let mut idx = 0usize;
    for &x in tuple {
        universe.check(x)?;
        idx = idx * n + x;
    }
    Ok(idx)
}

/// Inverse of [`encode_tuple`].
pub fn decode_tuple(index: usize, universe: Universe, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    decode_into(index, universe.size(), &mut out);
    out
}

#[inline]
pub(crate) fn decode_into(mut index: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
}

/// Odometer over all `n^m` tuples in ascending encoded order.
pub(crate) fn for_each_tuple(n: usize, m: usize, mut f: impl FnMut(usize, &[usize])) {
    let mut t = vec![0usize; m];
    let total = checked_pow(n, m).expect("point count checked by caller");
    for idx in 0..total {
        f(idx, &t);
        for slot in t.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
}

/// An m-ary relation over a finite universe, stored as a dense bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteRelation {
    universe: Universe,
    arity: usize,
    bits: FixedBitSet,
}

impl FiniteRelation {
    pub fn empty(universe: Universe, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(GqError::Invalid("relations must have arity at least 1".into()));
        }
        let points = point_count(universe.size(), arity)?;
        Ok(FiniteRelation {
            universe,
            arity,
            bits: FixedBitSet::with_capacity(points),
        })
    }

    /// `A^m`.
    pub fn full(universe: Universe, arity: usize) -> Result<Self> {
        let mut rel = Self::empty(universe, arity)?;
        rel.bits.insert_range(..);
        Ok(rel)
    }

    /// `Δ_A^(m)`, the constant tuples.
    pub fn constant_tuples(universe: Universe, arity: usize) -> Result<Self> {
        let mut rel = Self::empty(universe, arity)?;
        for a in universe.elements() {
            rel.bits.insert(rel.constant_index(a));
        }
        Ok(rel)
    }

    pub fn from_tuples<T: AsRef<[usize]>>(
        universe: Universe,
        arity: usize,
        tuples: impl IntoIterator<Item = T>,
    ) -> Result<Self> {
        let mut rel = Self::empty(universe, arity)?;
        for t in tuples {
            rel.insert(t.as_ref())?;
        }
        Ok(rel)
    }

    /// All tuples satisfying `pred`.
    pub fn from_predicate(
        universe: Universe,
        arity: usize,
        mut pred: impl FnMut(&[usize]) -> bool,
    ) -> Result<Self> {
        let mut rel = Self::empty(universe, arity)?;
        for_each_tuple(universe.size(), arity, |idx, t| {
            if pred(t) {
                rel.bits.insert(idx);
            }
        });
        Ok(rel)
    }

    pub(crate) fn from_bits(universe: Universe, arity: usize, bits: FixedBitSet) -> Self {
        debug_assert_eq!(Some(bits.len()), checked_pow(universe.size(), arity));
        FiniteRelation {
            universe,
            arity,
            bits,
        }
    }

    #[inline]
    pub fn universe(&self) -> Universe {
        self.universe
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.universe.size()
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `n^m`.
    #[inline]
    pub fn point_count(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    pub fn insert(&mut self, tuple: &[usize]) -> Result<bool> {
        let idx = encode_tuple(tuple, self.universe, self.arity)?;
        Ok(!self.bits.put(idx))
    }

    pub fn remove(&mut self, tuple: &[usize]) -> Result<bool> {
        let idx = encode_tuple(tuple, self.universe, self.arity)?;
        let was = self.bits.contains(idx);
        self.bits.set(idx, false);
        Ok(was)
    }

    #[inline]
    pub(crate) fn insert_index(&mut self, idx: usize) {
        self.bits.insert(idx);
    }

    /// Membership; tuples of the wrong length or with out-of-range
    /// coordinates are simply not members.
    pub fn contains(&self, tuple: &[usize]) -> bool {
        match encode_tuple(tuple, self.universe, self.arity) {
            Ok(idx) => self.bits.contains(idx),
            Err(_) => false,
        }
    }

    #[inline]
    pub fn contains_index(&self, idx: usize) -> bool {
        self.bits.contains(idx)
    }

    #[inline]
    pub(crate) fn constant_index(&self, a: usize) -> usize {
        (0..self.arity).fold(0, |acc, _| acc * self.n() + a)
    }

    pub fn encode(&self, tuple: &[usize]) -> Result<usize> {
        encode_tuple(tuple, self.universe, self.arity)
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        decode_tuple(index, self.universe, self.arity)
    }

    /// Encoded indices of the members, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    /// Member tuples in ascending encoded order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.bits.ones().map(|i| self.decode(i))
    }

    pub fn is_subset(&self, other: &FiniteRelation) -> bool {
        self.same_shape(other) && self.bits.is_subset(&other.bits)
    }

    pub fn same_shape(&self, other: &FiniteRelation) -> bool {
        self.universe == other.universe && self.arity == other.arity
    }

    pub(crate) fn check_shape(&self, other: &FiniteRelation) -> Result<()> {
        if self.universe != other.universe {
            return Err(GqError::UniverseMismatch {
                expected: self.n(),
                actual: other.n(),
            });
        }
        if self.arity != other.arity {
            return Err(GqError::ArityMismatch {
                expected: self.arity,
                actual: other.arity,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &FiniteRelation) -> Result<FiniteRelation> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn difference(&self, other: &FiniteRelation) -> Result<FiniteRelation> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        Ok(out)
    }

    pub(crate) fn intersect_in_place(&mut self, other: &FiniteRelation) {
        self.bits.intersect_with(&other.bits);
    }

    pub(crate) fn union_in_place(&mut self, other: &FiniteRelation) {
        self.bits.union_with(&other.bits);
    }
}

impl fmt::Debug for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRelation(n={}, m={}, {{", self.n(), self.arity)?;
        for (k, t) in self.tuples().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (i, x) in t.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}})")
    }
}

/// The diagonal relation `{t ∈ A^m : i ~ j ⇒ t_i = t_j}` for a partition of
/// the coordinate positions `0..m`.
pub fn diagonal_relation(
    universe: Universe,
    index_equiv: &crate::partition::EquivPartition,
) -> Result<FiniteRelation> {
    let m = index_equiv.universe().size();
    FiniteRelation::from_predicate(universe, m, |t| {
        (0..m).all(|i| t[i] == t[index_equiv.block_of(i)])
    })
}
