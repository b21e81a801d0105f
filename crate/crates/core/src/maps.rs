use crate::error::{GqError, Result};
use crate::partition::EquivPartition;
use crate::relation::Universe;

/// A map `α: {0..s-1} → {0..m-1}` on coordinate positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexMap {
    target_arity: usize,
    map: Vec<usize>,
}

impl IndexMap {
    pub fn new(map: Vec<usize>, target_arity: usize) -> Result<Self> {
        if let Some(&bad) = map.iter().find(|&&v| v >= target_arity) {
            return Err(GqError::InvalidMap(format!(
                "index {bad} not below target arity {target_arity}"
            )));
        }
        Ok(IndexMap { target_arity, map })
    }

    pub fn identity(m: usize) -> Self {
        IndexMap {
            target_arity: m,
            map: (0..m).collect(),
        }
    }

    pub fn source_arity(&self) -> usize {
        self.map.len()
    }

    pub fn target_arity(&self) -> usize {
        self.target_arity
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_bijection(&self) -> bool {
        if self.map.len() != self.target_arity {
            return false;
        }
        let mut seen = vec![false; self.target_arity];
        self.map
            .iter()
            .all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    /// Every map `{0..s-1} → {0..m-1}`, in lexicographic order.
    pub fn all(source_arity: usize, target_arity: usize) -> Vec<IndexMap> {
        let mut out = Vec::new();
        if target_arity == 0 {
            return out;
        }
        let mut cur = vec![0usize; source_arity];
        loop {
            out.push(IndexMap {
                target_arity,
                map: cur.clone(),
            });
            let mut i = source_arity;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < target_arity {
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

/// A surjection `λ: A → B` between finite universes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurjectiveMap {
    source: Universe,
    target: Universe,
    map: Vec<usize>,
}

impl SurjectiveMap {
    pub fn new(map: Vec<usize>, target_size: usize) -> Result<Self> {
        let source = Universe::new(map.len())?;
        let target = Universe::new(target_size)?;
        let mut hit = vec![false; target_size];
        for &b in &map {
            target.check(b)?;
            hit[b] = true;
        }
        if let Some(b) = hit.iter().position(|&h| !h) {
            return Err(GqError::InvalidMap(format!("target element {b} has no preimage")));
        }
        Ok(SurjectiveMap {
            source,
            target,
            map,
        })
    }

    /// The canonical map `x ↦ [x]_ψ` onto the quotient.
    pub fn canonical(psi: &EquivPartition) -> Self {
        SurjectiveMap {
            source: psi.universe(),
            target: psi.quotient_universe(),
            map: psi.universe().elements().map(|x| psi.class_of(x)).collect(),
        }
    }

    pub fn source(&self) -> Universe {
        self.source
    }

    pub fn target(&self) -> Universe {
        self.target
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn kernel(&self) -> EquivPartition {
        EquivPartition::from_labels(&self.map).expect("nonempty source")
    }

    /// All surjections from an `n`-set onto a `k`-set.
    pub fn all(n: usize, k: usize) -> Vec<SurjectiveMap> {
        IndexMap::all(n, k)
            .into_iter()
            .filter_map(|m| SurjectiveMap::new(m.as_slice().to_vec(), k).ok())
            .collect()
    }
}
