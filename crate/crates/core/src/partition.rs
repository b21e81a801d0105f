use std::fmt;

use crate::error::{GqError, Result};
use crate::relation::{FiniteRelation, Universe};

/// An equivalence relation on a universe, kept as a block partition.
///
/// `block_id[x]` is the minimal element of the block of `x`. Blocks are
/// numbered `0..block_count()` in order of their minimal representative;
/// that numbering is the canonical element order of the quotient `A/ψ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivPartition {
    universe: Universe,
    block_id: Vec<usize>,
    class: Vec<usize>,
    block_count: usize,
}

impl EquivPartition {
    /// Builds a partition from any labelling; elements with equal labels
    /// share a block.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Result<Self> {
        let universe = Universe::new(labels.len())?;
        let mut first: std::collections::HashMap<L, usize> = Default::default();
        let block_id = labels
            .iter()
            .enumerate()
            .map(|(x, l)| *first.entry(l.clone()).or_insert(x))
            .collect();
        Ok(Self::from_canonical(universe, block_id))
    }

    /// Validated constructor from a canonical `block_id` array.
    pub fn from_block_ids(block_id: Vec<usize>) -> Result<Self> {
        let universe = Universe::new(block_id.len())?;
        for (x, &b) in block_id.iter().enumerate() {
            universe.check(b)?;
            if block_id[b] != b || b > x {
                return Err(GqError::Invalid(format!(
                    "block_id is not canonical at element {x}"
                )));
            }
        }
        Ok(Self::from_canonical(universe, block_id))
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let universe = Universe::new(n)?;
        let mut label = vec![usize::MAX; n];
        for (k, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(GqError::Invalid("empty block".into()));
            }
            for &x in block {
                universe.check(x)?;
                if label[x] != usize::MAX {
                    return Err(GqError::Invalid(format!("element {x} in two blocks")));
                }
                label[x] = k;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(GqError::Invalid(format!("element {x} not covered")));
        }
        Self::from_labels(&label)
    }

    fn from_canonical(universe: Universe, block_id: Vec<usize>) -> Self {
        let mut class = vec![0; block_id.len()];
        let mut block_count = 0;
        for x in 0..block_id.len() {
            if block_id[x] == x {
                class[x] = block_count;
                block_count += 1;
            } else {
                class[x] = class[block_id[x]];
            }
        }
        EquivPartition {
            universe,
            block_id,
            class,
            block_count,
        }
    }

    /// `Δ_A`: all singletons.
    pub fn discrete(universe: Universe) -> Self {
        Self::from_canonical(universe, universe.elements().collect())
    }

    /// `A²`: one block.
    pub fn indiscrete(universe: Universe) -> Self {
        Self::from_canonical(universe, vec![0; universe.size()])
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.block_id
    }

    /// Minimal member of the block containing `x`.
    pub fn block_of(&self, x: usize) -> usize {
        self.block_id[x]
    }

    /// Index of the block of `x` in the quotient universe.
    #[inline]
    pub fn class_of(&self, x: usize) -> usize {
        self.class[x]
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn quotient_universe(&self) -> Universe {
        Universe::new(self.block_count).expect("nonempty universe has a block")
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.block_id[a] == self.block_id[b]
    }

    pub fn is_discrete(&self) -> bool {
        self.block_count == self.universe.size()
    }

    /// Blocks in canonical order, members ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count];
        for x in self.universe.elements() {
            out[self.class[x]].push(x);
        }
        out
    }

    /// `self ⊆ other` as binary relations.
    pub fn is_finer_than(&self, other: &EquivPartition) -> bool {
        self.universe == other.universe
            && self
                .universe
                .elements()
                .all(|x| other.related(x, self.block_id[x]))
    }

    pub fn to_relation(&self) -> FiniteRelation {
        FiniteRelation::from_predicate(self.universe, 2, |t| self.related(t[0], t[1]))
            .expect("binary relation on a valid universe")
    }

    /// Converts a binary equivalence relation; names the first violated axiom otherwise.
    pub fn from_relation(rel: &FiniteRelation) -> Result<Self> {
        if rel.arity() != 2 {
            return Err(GqError::ArityMismatch {
                expected: 2,
                actual: rel.arity(),
            });
        }
        let n = rel.n();
        for a in 0..n {
            if !rel.contains(&[a, a]) {
                return Err(GqError::classification("reflexive", format!("({a},{a}) missing")));
            }
        }
        for t in rel.tuples() {
            if !rel.contains(&[t[1], t[0]]) {
                return Err(GqError::classification(
                    "symmetric",
                    format!("({},{}) present but ({},{}) missing", t[0], t[1], t[1], t[0]),
                ));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !rel.contains(&[a, b]) {
                    continue;
                }
                for c in 0..n {
                    if rel.contains(&[b, c]) && !rel.contains(&[a, c]) {
                        return Err(GqError::classification(
                            "transitive",
                            format!("({a},{b}),({b},{c}) present but ({a},{c}) missing"),
                        ));
                    }
                }
            }
        }
        let block_id = (0..n)
            .map(|x| (0..=x).find(|&y| rel.contains(&[x, y])).unwrap())
            .collect();
        Ok(Self::from_canonical(rel.universe(), block_id))
    }

    /// Every partition of `{0..n-1}`, via restricted growth strings.
    pub fn all(universe: Universe) -> Vec<EquivPartition> {
        let n = universe.size();
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        loop {
            out.push(Self::from_labels(&rgs).expect("nonempty"));
            // next restricted growth string
            let mut i = n;
            loop {
                if i <= 1 {
                    return out;
                }
                i -= 1;
                let max_prefix = *rgs[..i].iter().max().unwrap();
                if rgs[i] <= max_prefix {
                    rgs[i] += 1;
                    for slot in rgs.iter_mut().skip(i + 1) {
                        *slot = 0;
                    }
                    break;
                }
            }
        }
    }
}

impl fmt::Debug for EquivPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EquivPartition{:?}", self.blocks())
    }
}
