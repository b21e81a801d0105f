//! Reflexivity, generalized transitivity and the derived relations
//! (`∂`, transitive closure, symmetric parts, exchange equivalence).
//!
//! Transitivity is decided by a depth-first search that picks the rows of
//! an `m×m` matrix one at a time from the members of `ρ`. After `i` rows
//! every column is a length-`i` prefix, and a branch is cut as soon as a
//! column prefix is not a prefix of some member. A second cut drops
//! branches whose diagonal prefix can no longer leave the target set.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use itertools::Itertools;

use crate::error::{GqError, Result};
use crate::matrix::Matrix;
use crate::partition::EquivPartition;
use crate::relation::{checked_pow, decode_into, FiniteRelation};

/// Evidence for a failed property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `(a,…,a)` is missing.
    MissingConstant(usize),
    /// `member ∈ ρ` but `image ∉ ρ` for some coordinate map.
    Tuple { member: Vec<usize>, image: Vec<usize> },
    /// `ρ ⊨ M` while the diagonal of `M` is not in `ρ`.
    Matrix(Matrix),
    /// A pair that should be trivial but is not.
    Pair(usize, usize),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tup = |t: &[usize]| t.iter().map(|x| x.to_string()).join(",");
        match self {
            Witness::MissingConstant(a) => write!(f, "constant tuple of {a} missing"),
            Witness::Tuple { member, image } => {
                write!(f, "({}) in relation but ({}) not", tup(member), tup(image))
            }
            Witness::Matrix(m) => {
                let rows = (0..m.order()).map(|i| tup(&m.row(i))).join(";");
                write!(f, "matrix [{rows}] modeled, diagonal ({}) missing", tup(&m.diagonal()))
            }
            Witness::Pair(a, b) => write!(f, "pair ({a},{b})"),
        }
    }
}

struct SearchTables {
    n: usize,
    m: usize,
    /// `prefixes[k]`: length-`k` prefixes of members (`prefixes[m]` = `ρ`).
    prefixes: Vec<FixedBitSet>,
    /// Members grouped by first coordinate, decoded.
    by_first: Vec<Vec<Vec<usize>>>,
    /// `n^(m-k)` for `k = 0..=m`.
    block: Vec<usize>,
}

impl SearchTables {
    fn new(rel: &FiniteRelation) -> Self {
        let n = rel.n();
        let m = rel.arity();
        let block: Vec<usize> = (0..=m).map(|k| checked_pow(n, m - k).unwrap()).collect();
        let mut prefixes: Vec<FixedBitSet> = (0..=m)
            .map(|k| FixedBitSet::with_capacity(checked_pow(n, k).unwrap()))
            .collect();
        let mut by_first = vec![Vec::new(); n];
        let mut buf = vec![0; m];
        for idx in rel.indices() {
            for k in 0..=m {
                prefixes[k].insert(idx / block[k]);
            }
            decode_into(idx, n, &mut buf);
            by_first[buf[0]].push(buf.clone());
        }
        SearchTables {
            n,
            m,
            prefixes,
            by_first,
            block,
        }
    }
}

/// Callbacks for the model search.
trait ModelVisitor {
    /// Skip all matrices whose diagonal starts with `diag_prefix` (length `depth`).
    fn prune(&self, _depth: usize, _diag_prefix: usize) -> bool {
        false
    }
    /// Called for every modeled matrix; return `false` to stop.
    fn leaf(&mut self, rows: &[Vec<usize>], diag: usize) -> bool;
}

fn search<V: ModelVisitor>(tables: &SearchTables, visitor: &mut V) {
    if tables.by_first.iter().all(|g| g.is_empty()) {
        return;
    }
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(tables.m);
    let cols = vec![0usize; tables.m];
    descend(tables, visitor, &mut rows, &cols, 0);
}

fn descend<V: ModelVisitor>(
    t: &SearchTables,
    visitor: &mut V,
    rows: &mut Vec<Vec<usize>>,
    cols: &[usize],
    diag_prefix: usize,
) -> bool {
    let depth = rows.len();
    if depth == t.m {
        return visitor.leaf(rows, diag_prefix);
    }
    if visitor.prune(depth, diag_prefix) {
        return true;
    }
    let next_level = &t.prefixes[depth + 1];
    let mut next_cols = vec![0usize; t.m];
    for first in 0..t.n {
        if !next_level.contains(cols[0] * t.n + first) {
            continue;
        }
        for row in &t.by_first[first] {
            let mut ok = true;
            for j in 0..t.m {
                let c = cols[j] * t.n + row[j];
                if !next_level.contains(c) {
                    ok = false;
                    break;
                }
                next_cols[j] = c;
            }
            if !ok {
                continue;
            }
            let next_diag = diag_prefix * t.n + row[depth];
            rows.push(row.clone());
            let keep_going = descend(t, visitor, rows, &next_cols, next_diag);
            rows.pop();
            if !keep_going {
                return false;
            }
        }
    }
    true
}

/// Prefix sets whose every completion lies in the given relation.
fn full_prefixes(rel: &FiniteRelation) -> Vec<FixedBitSet> {
    let n = rel.n();
    let m = rel.arity();
    let mut levels = vec![FixedBitSet::new(); m + 1];
    levels[m] = rel.bits().clone();
    for k in (0..m).rev() {
        let size = checked_pow(n, k).unwrap();
        let mut level = FixedBitSet::with_capacity(size);
        for p in 0..size {
            if (0..n).all(|v| levels[k + 1].contains(p * n + v)) {
                level.insert(p);
            }
        }
        levels[k] = level;
    }
    levels
}

struct TransitivityCheck<'a> {
    rel: &'a FiniteRelation,
    full: Vec<FixedBitSet>,
    witness: Option<Matrix>,
}

impl ModelVisitor for TransitivityCheck<'_> {
    fn prune(&self, depth: usize, diag_prefix: usize) -> bool {
        self.full[depth].contains(diag_prefix)
    }

    fn leaf(&mut self, rows: &[Vec<usize>], diag: usize) -> bool {
        if self.rel.contains_index(diag) {
            return true;
        }
        let entries = rows.iter().flatten().copied().collect();
        self.witness = Some(Matrix::from_entries(self.rel.universe(), rows.len(), entries));
        false
    }
}

/// Collects diagonals into `out`, skipping subtrees already covered by `out`.
struct DiagonalCollector {
    n: usize,
    m: usize,
    out: FixedBitSet,
    counts: Vec<Vec<u32>>,
    capacity: Vec<u32>,
    block: Vec<usize>,
}

impl DiagonalCollector {
    fn new(t: &SearchTables, seed: &FixedBitSet) -> Self {
        let counts = (0..=t.m)
            .map(|k| vec![0u32; checked_pow(t.n, k).unwrap()])
            .collect();
        let capacity = (0..=t.m).map(|k| t.block[k] as u32).collect();
        let mut c = DiagonalCollector {
            n: t.n,
            m: t.m,
            out: FixedBitSet::with_capacity(seed.len()),
            counts,
            capacity,
            block: t.block.clone(),
        };
        for idx in seed.ones() {
            c.add(idx);
        }
        c
    }

    fn add(&mut self, idx: usize) {
        if self.out.put(idx) {
            return;
        }
        for k in 0..=self.m {
            self.counts[k][idx / self.block[k]] += 1;
        }
    }
}

impl ModelVisitor for DiagonalCollector {
    fn prune(&self, depth: usize, diag_prefix: usize) -> bool {
        debug_assert!(depth <= self.m && self.n > 0);
        self.counts[depth][diag_prefix] == self.capacity[depth]
    }

    fn leaf(&mut self, _rows: &[Vec<usize>], diag: usize) -> bool {
        self.add(diag);
        true
    }
}

/// Reflexivity; on failure the least element whose constant tuple is missing.
pub fn is_reflexive(rel: &FiniteRelation) -> std::result::Result<(), usize> {
    match rel
        .universe()
        .elements()
        .find(|&a| !rel.contains_index(rel.constant_index(a)))
    {
        Some(a) => Err(a),
        None => Ok(()),
    }
}

/// `ρ ⊨ M`: every row and every column of `M` is a member.
pub fn models_matrix(rel: &FiniteRelation, matrix: &Matrix) -> Result<bool> {
    if matrix.order() != rel.arity() {
        return Err(GqError::ArityMismatch {
            expected: rel.arity(),
            actual: matrix.order(),
        });
    }
    if matrix.universe() != rel.universe() {
        return Err(GqError::UniverseMismatch {
            expected: rel.n(),
            actual: matrix.universe().size(),
        });
    }
    Ok((0..rel.arity()).all(|i| rel.contains(&matrix.row(i)) && rel.contains(&matrix.column(i))))
}

/// Generalized transitivity, decided exhaustively. On failure returns the
/// first violating matrix in search order.
pub fn is_transitive(rel: &FiniteRelation) -> std::result::Result<(), Matrix> {
    let tables = SearchTables::new(rel);
    let mut check = TransitivityCheck {
        rel,
        full: full_prefixes(rel),
        witness: None,
    };
    search(&tables, &mut check);
    match check.witness {
        Some(w) => Err(w),
        None => Ok(()),
    }
}

/// `∂(ρ)`: the diagonals of all matrices modeled by `ρ`.
pub fn delta_step(rel: &FiniteRelation) -> FiniteRelation {
    let tables = SearchTables::new(rel);
    let mut collector = DiagonalCollector::new(&tables, &FixedBitSet::with_capacity(rel.point_count()));
    search(&tables, &mut collector);
    FiniteRelation::from_bits(rel.universe(), rel.arity(), collector.out)
}

/// `ρ ∪ ∂(ρ)`.
fn extend_by_delta(rel: &FiniteRelation) -> FiniteRelation {
    let tables = SearchTables::new(rel);
    let mut collector = DiagonalCollector::new(&tables, rel.bits());
    search(&tables, &mut collector);
    FiniteRelation::from_bits(rel.universe(), rel.arity(), collector.out)
}

/// Least transitive relation containing `ρ`, as the fixpoint of `ρ ↦ ρ ∪ ∂(ρ)`.
pub fn transitive_closure(rel: &FiniteRelation) -> FiniteRelation {
    let mut cur = rel.clone();
    loop {
        let next = extend_by_delta(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    (0..m).permutations(m).collect()
}

/// First member `t` and permutation image missing from `ρ`.
fn total_symmetry_violation(rel: &FiniteRelation) -> Option<Witness> {
    let perms = permutations(rel.arity());
    let mut image = vec![0; rel.arity()];
    for t in rel.tuples() {
        for p in &perms {
            for (slot, &i) in image.iter_mut().zip(p) {
                *slot = t[i];
            }
            if !rel.contains(&image) {
                return Some(Witness::Tuple {
                    member: t,
                    image: image.clone(),
                });
            }
        }
    }
    None
}

/// First tuple of `{t_1..t_m}^m` missing from `ρ` for a member `t`.
fn cube_violation(rel: &FiniteRelation, t: &[usize]) -> Option<Vec<usize>> {
    let m = rel.arity();
    let elems: Vec<usize> = t.iter().copied().sorted().dedup().collect();
    let mut image = vec![0; m];
    let k = elems.len();
    let total = checked_pow(k, m).unwrap();
    for code in 0..total {
        decode_into(code, k, &mut image);
        for slot in image.iter_mut() {
            *slot = elems[*slot];
        }
        if !rel.contains(&image) {
            return Some(image);
        }
    }
    None
}

/// `tos(ρ)`: tuples all of whose coordinate permutations lie in `ρ`.
pub fn tos(rel: &FiniteRelation) -> FiniteRelation {
    let perms = permutations(rel.arity());
    let mut out = FiniteRelation::empty(rel.universe(), rel.arity()).unwrap();
    let mut image = vec![0; rel.arity()];
    for idx in rel.indices() {
        let t = rel.decode(idx);
        let all = perms.iter().all(|p| {
            for (slot, &i) in image.iter_mut().zip(p) {
                *slot = t[i];
            }
            rel.contains(&image)
        });
        if all {
            out.insert_index(idx);
        }
    }
    out
}

/// `abs(ρ)`: tuples `t` with `{t_1,…,t_m}^m ⊆ ρ`.
pub fn abs(rel: &FiniteRelation) -> FiniteRelation {
    let mut out = FiniteRelation::empty(rel.universe(), rel.arity()).unwrap();
    for idx in rel.indices() {
        if cube_violation(rel, &rel.decode(idx)).is_none() {
            out.insert_index(idx);
        }
    }
    out
}

/// `ρ^[2]`: pairs `(a,b)` with `{a,b}^m ⊆ ρ`.
pub fn bin_sym(rel: &FiniteRelation) -> FiniteRelation {
    let m = rel.arity();
    FiniteRelation::from_predicate(rel.universe(), 2, |p| {
        let (a, b) = (p[0], p[1]);
        let mut t = vec![0; m];
        (0..1usize << m).all(|mask| {
            for (i, slot) in t.iter_mut().enumerate() {
                *slot = if mask >> (m - 1 - i) & 1 == 1 { b } else { a };
            }
            rel.contains(&t)
        })
    })
    .unwrap()
}

/// `ρ^⟨2⟩`: `a ~ b` iff exchanging `a` for `b` in any single position never
/// changes membership.
///
/// Each element gets a signature concatenating, for every position `i`, the
/// membership bits of all "tuples with a hole at `i`" filled with that
/// element; equal signatures are exactly exchangeable pairs.
pub fn exchange_eq(rel: &FiniteRelation) -> EquivPartition {
    let n = rel.n();
    let m = rel.arity();
    let contexts = checked_pow(n, m - 1).unwrap();
    let mut signatures = vec![FixedBitSet::with_capacity(m * contexts); n];
    let mut t = vec![0; m];
    for idx in rel.indices() {
        decode_into(idx, n, &mut t);
        for i in 0..m {
            // context code: t with position i removed
            let ctx = t
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(0, |acc, (_, &x)| acc * n + x);
            signatures[t[i]].insert(i * contexts + ctx);
        }
    }
    let mut first_with: HashMap<&FixedBitSet, usize> = HashMap::new();
    let labels: Vec<usize> = signatures
        .iter()
        .enumerate()
        .map(|(a, sig)| *first_with.entry(sig).or_insert(a))
        .collect();
    EquivPartition::from_labels(&labels).expect("nonempty universe")
}

/// `β^↕m`: tuples all of whose coordinate pairs lie in the binary relation `β`.
pub fn lift_relation(binary: &FiniteRelation, m: usize) -> Result<FiniteRelation> {
    if binary.arity() != 2 {
        return Err(GqError::ArityMismatch {
            expected: 2,
            actual: binary.arity(),
        });
    }
    FiniteRelation::from_predicate(binary.universe(), m, |t| {
        t.iter()
            .all(|&a| t.iter().all(|&b| binary.contains(&[a, b])))
    })
}

/// `ψ^↕m` for an equivalence relation.
pub fn lift_partition(psi: &EquivPartition, m: usize) -> Result<FiniteRelation> {
    FiniteRelation::from_predicate(psi.universe(), m, |t| {
        t.iter().all(|&a| psi.related(a, t[0]))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Reflexive,
    TotallySymmetric,
    AbsolutelySymmetric,
    Transitive,
    Antisymmetric,
    GQuord,
    GEq,
    GTolerance,
    GPord,
    WgPord,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Reflexive,
        Property::TotallySymmetric,
        Property::AbsolutelySymmetric,
        Property::Transitive,
        Property::Antisymmetric,
        Property::GQuord,
        Property::GEq,
        Property::GTolerance,
        Property::GPord,
        Property::WgPord,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Property::Reflexive => "reflexive",
            Property::TotallySymmetric => "totally_symmetric",
            Property::AbsolutelySymmetric => "absolutely_symmetric",
            Property::Transitive => "transitive",
            Property::Antisymmetric => "antisymmetric",
            Property::GQuord => "gquord",
            Property::GEq => "geq",
            Property::GTolerance => "gtolerance",
            Property::GPord => "gpord",
            Property::WgPord => "wgpord",
        }
    }
}

/// Every classification flag of a relation, with a witness for each false one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub arity: usize,
    pub size: usize,
    pub empty: bool,
    pub reflexive: bool,
    pub totally_symmetric: bool,
    pub absolutely_symmetric: bool,
    pub transitive: bool,
    /// `tos(ρ) ⊆ Δ^(m)`.
    pub antisymmetric: bool,
    /// `ρ^[2] = Δ_A`; agrees with `antisymmetric` on generalized quasiorders.
    pub bin_sym_trivial: bool,
    pub is_gquord: bool,
    pub is_geq: bool,
    pub is_gtolerance: bool,
    pub is_gpord: bool,
    pub is_wgpord: bool,
    pub witnesses: Vec<(Property, Witness)>,
}

impl ClassificationReport {
    pub fn get(&self, property: Property) -> bool {
        match property {
            Property::Reflexive => self.reflexive,
            Property::TotallySymmetric => self.totally_symmetric,
            Property::AbsolutelySymmetric => self.absolutely_symmetric,
            Property::Transitive => self.transitive,
            Property::Antisymmetric => self.antisymmetric,
            Property::GQuord => self.is_gquord,
            Property::GEq => self.is_geq,
            Property::GTolerance => self.is_gtolerance,
            Property::GPord => self.is_gpord,
            Property::WgPord => self.is_wgpord,
        }
    }

    pub fn witness(&self, property: Property) -> Option<&Witness> {
        self.witnesses
            .iter()
            .find(|(p, _)| *p == property)
            .map(|(_, w)| w)
    }

    /// `key=value` lines, one per flag and witness.
    pub fn to_kv(&self) -> String {
        let mut out = format!(
            "arity={}\nsize={}\nempty={}\n",
            self.arity, self.size, self.empty
        );
        for p in Property::ALL {
            out.push_str(&format!("{}={}\n", p.key(), self.get(p)));
        }
        out.push_str(&format!("bin_sym_trivial={}\n", self.bin_sym_trivial));
        for (p, w) in &self.witnesses {
            out.push_str(&format!("witness.{}={}\n", p.key(), w));
        }
        out
    }
}

fn first_nontrivial_pair(rel: &FiniteRelation) -> Option<(usize, usize)> {
    rel.tuples().find(|p| p[0] != p[1]).map(|p| (p[0], p[1]))
}

fn first_exchangeable_pair(psi: &EquivPartition) -> Option<(usize, usize)> {
    psi.universe()
        .elements()
        .find(|&x| psi.block_of(x) != x)
        .map(|x| (psi.block_of(x), x))
}

pub fn classify(rel: &FiniteRelation) -> ClassificationReport {
    let mut witnesses = Vec::new();

    let reflexive = match is_reflexive(rel) {
        Ok(()) => true,
        Err(a) => {
            witnesses.push((Property::Reflexive, Witness::MissingConstant(a)));
            false
        }
    };
    let ts_violation = total_symmetry_violation(rel);
    let totally_symmetric = ts_violation.is_none();
    if let Some(w) = ts_violation.clone() {
        witnesses.push((Property::TotallySymmetric, w));
    }
    let abs_violation = rel.tuples().find_map(|t| {
        cube_violation(rel, &t).map(|image| Witness::Tuple { member: t, image })
    });
    let absolutely_symmetric = abs_violation.is_none();
    if let Some(w) = abs_violation {
        witnesses.push((Property::AbsolutelySymmetric, w));
    }
    let transitive = match is_transitive(rel) {
        Ok(()) => true,
        Err(m) => {
            witnesses.push((Property::Transitive, Witness::Matrix(m)));
            false
        }
    };

    let tos_rel = tos(rel);
    let anti_violation = tos_rel.tuples().find(|t| t.iter().any(|&x| x != t[0]));
    let antisymmetric = anti_violation.is_none();
    if let Some(t) = anti_violation {
        witnesses.push((
            Property::Antisymmetric,
            Witness::Tuple {
                member: t.clone(),
                image: t,
            },
        ));
    }
    let sym2 = bin_sym(rel);
    let bin_sym_pair = first_nontrivial_pair(&sym2);
    let exch = exchange_eq(rel);
    let exch_pair = first_exchangeable_pair(&exch);

    let is_gquord = reflexive && transitive;
    let gquord_witness = || {
        if !reflexive {
            witnesses_for(&witnesses, Property::Reflexive)
        } else {
            witnesses_for(&witnesses, Property::Transitive)
        }
    };
    let mut derived = Vec::new();
    if !is_gquord {
        derived.push((Property::GQuord, gquord_witness()));
    }
    let is_geq = is_gquord && totally_symmetric;
    if !is_geq {
        let w = if !is_gquord {
            gquord_witness()
        } else {
            witnesses_for(&witnesses, Property::TotallySymmetric)
        };
        derived.push((Property::GEq, w));
    }
    let is_gtolerance = reflexive && totally_symmetric;
    if !is_gtolerance {
        let w = if !reflexive {
            witnesses_for(&witnesses, Property::Reflexive)
        } else {
            witnesses_for(&witnesses, Property::TotallySymmetric)
        };
        derived.push((Property::GTolerance, w));
    }
    let is_gpord = is_gquord && bin_sym_pair.is_none();
    if !is_gpord {
        let w = match bin_sym_pair {
            Some((a, b)) if is_gquord => Witness::Pair(a, b),
            _ => gquord_witness(),
        };
        derived.push((Property::GPord, w));
    }
    let is_wgpord = is_gquord && exch_pair.is_none();
    if !is_wgpord {
        let w = match exch_pair {
            Some((a, b)) if is_gquord => Witness::Pair(a, b),
            _ => gquord_witness(),
        };
        derived.push((Property::WgPord, w));
    }
    witnesses.extend(derived);

    ClassificationReport {
        arity: rel.arity(),
        size: rel.len(),
        empty: rel.is_empty(),
        reflexive,
        totally_symmetric,
        absolutely_symmetric,
        transitive,
        antisymmetric,
        bin_sym_trivial: bin_sym_pair.is_none(),
        is_gquord,
        is_geq,
        is_gtolerance,
        is_gpord,
        is_wgpord,
        witnesses,
    }
}

fn witnesses_for(list: &[(Property, Witness)], p: Property) -> Witness {
    list.iter()
        .find(|(q, _)| *q == p)
        .map(|(_, w)| w.clone())
        .expect("failed flag recorded a witness")
}

/// Reflexive and transitive, without building a full report.
pub fn is_gquord(rel: &FiniteRelation) -> bool {
    is_reflexive(rel).is_ok() && is_transitive(rel).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Universe;

    fn u(n: usize) -> Universe {
        Universe::new(n).unwrap()
    }

    fn rel<const M: usize>(n: usize, tuples: &[[usize; M]]) -> FiniteRelation {
        FiniteRelation::from_tuples(u(n), M, tuples.iter()).unwrap()
    }

    fn le2() -> FiniteRelation {
        rel(2, &[[0, 0], [0, 1], [1, 1]])
    }

    /// `{0,1}^3 ∪ δ_3` and the same plus `(0,2,3)`, on four elements.
    fn sigma_rho() -> (FiniteRelation, FiniteRelation) {
        let sigma = FiniteRelation::from_predicate(u(4), 3, |t| {
            t.iter().all(|&x| x <= 1) || (t[0] == t[1] && t[1] == t[2])
        })
        .unwrap();
        let mut rho = sigma.clone();
        rho.insert(&[0, 2, 3]).unwrap();
        (sigma, rho)
    }

    /// Brute-force oracle: all `n^(m·m)` matrices.
    fn transitive_by_all_matrices(r: &FiniteRelation) -> bool {
        let n = r.n();
        let m = r.arity();
        let total = checked_pow(n, m * m).unwrap();
        let mut e = vec![0; m * m];
        (0..total).all(|code| {
            decode_into(code, n, &mut e);
            let mat = Matrix::from_entries(r.universe(), m, e.clone());
            !models_matrix(r, &mat).unwrap() || r.contains(&mat.diagonal())
        })
    }

    fn delta_by_all_matrices(r: &FiniteRelation) -> FiniteRelation {
        let n = r.n();
        let m = r.arity();
        let total = checked_pow(n, m * m).unwrap();
        let mut out = FiniteRelation::empty(r.universe(), m).unwrap();
        let mut e = vec![0; m * m];
        for code in 0..total {
            decode_into(code, n, &mut e);
            let mat = Matrix::from_entries(r.universe(), m, e.clone());
            if models_matrix(r, &mat).unwrap() {
                out.insert(&mat.diagonal()).unwrap();
            }
        }
        out
    }

    fn binary_transitive_oracle(r: &FiniteRelation) -> bool {
        let n = r.n();
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| !(r.contains(&[a, b]) && r.contains(&[b, c])) || r.contains(&[a, c]))
            })
        })
    }

    fn warshall(r: &FiniteRelation) -> FiniteRelation {
        let n = r.n();
        let mut reach = vec![vec![false; n]; n];
        for t in r.tuples() {
            reach[t[0]][t[1]] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        FiniteRelation::from_predicate(r.universe(), 2, |p| reach[p[0]][p[1]]).unwrap()
    }

    fn all_relations(n: usize, m: usize) -> impl Iterator<Item = FiniteRelation> {
        let points = checked_pow(n, m).unwrap();
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

    #[test]
    fn reflexivity_examples() {
        assert!(is_reflexive(&FiniteRelation::constant_tuples(u(3), 3).unwrap()).is_ok());
        assert_eq!(is_reflexive(&FiniteRelation::empty(u(2), 2).unwrap()), Err(0));
    }

    #[test]
    fn models_matrix_examples() {
        let m1 = Matrix::new(u(2), &[vec![0, 1], vec![0, 1]]).unwrap();
        assert!(models_matrix(&le2(), &m1).unwrap());
        let delta = rel(2, &[[0, 0], [1, 1]]);
        let m2 = Matrix::new(u(2), &[vec![0, 0], vec![1, 1]]).unwrap();
        assert!(!models_matrix(&delta, &m2).unwrap());
        let m3 = Matrix::new(u(2), &[vec![0]]).unwrap();
        assert!(models_matrix(&delta, &m3).is_err());
    }

    #[test]
    fn transitivity_matches_binary_oracle_exhaustively() {
        for n in 1..=3 {
            for r in all_relations(n, 2) {
                assert_eq!(is_transitive(&r).is_ok(), binary_transitive_oracle(&r), "{r:?}");
            }
        }
    }

    #[test]
    fn transitivity_matches_binary_oracle_sampled_n4_n5() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 4..=5 {
            for _ in 0..3000 {
                let density: f64 = rng.gen_range(0.05..0.9);
                let r = FiniteRelation::from_predicate(u(n), 2, |_| rng.gen_bool(density)).unwrap();
                assert_eq!(is_transitive(&r).is_ok(), binary_transitive_oracle(&r));
            }
        }
    }

    #[test]
    fn transitivity_matches_matrix_oracle_ternary() {
        // n = 2, m = 3: all 256 relations against the 2^9-matrix brute force.
        for r in all_relations(2, 3) {
            let got = is_transitive(&r);
            assert_eq!(got.is_ok(), transitive_by_all_matrices(&r), "{r:?}");
            if let Err(w) = got {
                assert!(models_matrix(&r, &w).unwrap());
                assert!(!r.contains(&w.diagonal()));
            }
        }
    }

    #[test]
    fn delta_matches_matrix_oracle() {
        for r in all_relations(2, 3).step_by(7) {
            assert_eq!(delta_step(&r), delta_by_all_matrices(&r));
        }
        for r in all_relations(3, 2).step_by(5) {
            assert_eq!(delta_step(&r), delta_by_all_matrices(&r));
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_step(&le2()), le2());
        let r = rel(3, &[[0, 0], [1, 1], [2, 2], [0, 1], [1, 2]]);
        let mut want = r.clone();
        want.insert(&[0, 2]).unwrap();
        assert_eq!(delta_step(&r), want);
        assert_eq!(delta_by_all_matrices(&r), want);
    }

    #[test]
    fn binary_delta_is_composition() {
        for r in all_relations(3, 2).step_by(3) {
            let comp = FiniteRelation::from_predicate(u(3), 2, |p| {
                (0..3).any(|c| r.contains(&[p[0], c]) && r.contains(&[c, p[1]]))
            })
            .unwrap();
            assert_eq!(delta_step(&r), comp);
        }
    }

    #[test]
    fn closure_matches_warshall() {
        for r in all_relations(3, 2) {
            assert_eq!(transitive_closure(&r), warshall(&r));
        }
    }

    #[test]
    fn closure_is_least_transitive_superset() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let r = FiniteRelation::from_predicate(u(2), 3, |_| rng.gen_bool(0.3)).unwrap();
            let c = transitive_closure(&r);
            assert!(r.is_subset(&c));
            assert!(is_transitive(&c).is_ok());
            // minimality: every transitive superset of r contains c
            for s in all_relations(2, 3) {
                if r.is_subset(&s) && is_transitive(&s).is_ok() {
                    assert!(c.is_subset(&s));
                }
            }
        }
    }

    #[test]
    fn closure_fixes_transitive_relations() {
        let (sigma, rho) = sigma_rho();
        assert_eq!(transitive_closure(&sigma), sigma);
        assert_eq!(transitive_closure(&rho), rho);
    }

    #[test]
    fn reflexive_relation_contained_in_delta() {
        for r in all_relations(2, 3) {
            if is_reflexive(&r).is_ok() {
                assert!(r.is_subset(&delta_step(&r)));
            }
        }
    }

    #[test]
    fn tolerance_closure_is_equivalence() {
        for r in all_relations(2, 3) {
            let rep = classify(&r);
            if rep.is_gtolerance {
                assert!(classify(&transitive_closure(&r)).is_geq);
            }
        }
    }

    #[test]
    fn remark_relations_are_gquords() {
        let (sigma, rho) = sigma_rho();
        assert!(is_gquord(&sigma));
        assert!(is_gquord(&rho));
    }

    #[test]
    fn symmetric_parts() {
        let (sigma, rho) = sigma_rho();
        assert_eq!(tos(&rho), sigma);
        assert_eq!(abs(&rho), sigma);
        let full = FiniteRelation::full(u(3), 3).unwrap();
        assert_eq!(tos(&full), full);
        assert_eq!(abs(&full), full);
        for r in all_relations(3, 2).step_by(3) {
            let mut inv_meet = r.clone();
            inv_meet.intersect_in_place(&FiniteRelation::from_predicate(u(3), 2, |p| r.contains(&[p[1], p[0]])).unwrap());
            assert_eq!(tos(&r), inv_meet);
        }
    }

    #[test]
    fn bin_sym_examples() {
        let (_, rho) = sigma_rho();
        assert_eq!(bin_sym(&rho), rel(4, &[[0, 0], [0, 1], [1, 0], [1, 1], [2, 2], [3, 3]]));
        assert!(bin_sym(&FiniteRelation::full(u(3), 4).unwrap()).is_full());
        assert_eq!(
            bin_sym(&FiniteRelation::constant_tuples(u(3), 3).unwrap()),
            EquivPartition::discrete(u(3)).to_relation()
        );
    }

    #[test]
    fn exchange_examples() {
        let (sigma, rho) = sigma_rho();
        assert!(exchange_eq(&rho).is_discrete());
        assert_eq!(exchange_eq(&sigma).blocks(), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(exchange_eq(&FiniteRelation::full(u(3), 3).unwrap()).block_count(), 1);
    }

    /// Definitional check of exchangeability for one pair.
    fn exchangeable(r: &FiniteRelation, a: usize, b: usize) -> bool {
        let m = r.arity();
        let mut ok = true;
        crate::relation::for_each_tuple(r.n(), m, |_, t| {
            for i in 0..m {
                let mut ta = t.to_vec();
                ta[i] = a;
                let mut tb = t.to_vec();
                tb[i] = b;
                if r.contains(&ta) != r.contains(&tb) {
                    ok = false;
                }
            }
        });
        ok
    }

    #[test]
    fn exchange_matches_definition() {
        for r in all_relations(2, 3).chain(all_relations(3, 2)) {
            let p = exchange_eq(&r);
            for a in 0..r.n() {
                for b in 0..r.n() {
                    assert_eq!(p.related(a, b), exchangeable(&r, a, b));
                }
            }
        }
    }

    #[test]
    fn lift_examples() {
        let d = EquivPartition::discrete(u(3));
        assert_eq!(lift_partition(&d, 3).unwrap(), FiniteRelation::constant_tuples(u(3), 3).unwrap());
        assert!(lift_partition(&EquivPartition::indiscrete(u(3)), 3).unwrap().is_full());
        let psi = EquivPartition::from_blocks(3, &[vec![0, 1], vec![2]]).unwrap();
        let want = FiniteRelation::from_predicate(u(3), 3, |t| {
            t.iter().all(|&x| x <= 1) || t == [2, 2, 2]
        })
        .unwrap();
        assert_eq!(lift_partition(&psi, 3).unwrap(), want);
        assert_eq!(lift_relation(&psi.to_relation(), 3).unwrap(), want);
        assert_eq!(bin_sym(&want), psi.to_relation());
    }

    #[test]
    fn classify_remark_relation() {
        let (_, rho) = sigma_rho();
        let rep = classify(&rho);
        assert!(rep.is_gquord && rep.is_wgpord && !rep.is_gpord);
        assert_eq!(rep.witness(Property::GPord), Some(&Witness::Pair(0, 1)));
    }

    #[test]
    fn classify_diagonals_and_full() {
        for n in 2..=3 {
            for m in 1..=3 {
                let full = FiniteRelation::full(u(n), m).unwrap();
                for eps in EquivPartition::all(u(m)) {
                    let d = crate::relation::diagonal_relation(u(n), &eps).unwrap();
                    let rep = classify(&d);
                    assert!(rep.is_gquord);
                    assert_eq!(rep.is_gpord, d != full, "n={n} m={m} {eps:?}");
                }
                let rep = classify(&full);
                assert!(rep.is_geq && !rep.is_gpord);
            }
        }
    }

    #[test]
    fn report_invariants_hold() {
        for r in all_relations(2, 3).chain(all_relations(3, 2)) {
            let rep = classify(&r);
            assert_eq!(rep.is_gquord, rep.reflexive && rep.transitive);
            assert_eq!(rep.is_geq, rep.is_gquord && rep.totally_symmetric);
            assert_eq!(rep.is_gtolerance, rep.reflexive && rep.totally_symmetric);
            assert!(!rep.is_gpord || rep.is_wgpord);
            for p in Property::ALL {
                assert_eq!(rep.get(p), rep.witness(p).is_none(), "{p:?} {r:?}");
            }
            if rep.is_gquord {
                assert_eq!(rep.antisymmetric, rep.bin_sym_trivial);
            }
        }
    }

    #[test]
    fn unary_relations() {
        let a = FiniteRelation::full(u(3), 1).unwrap();
        assert!(is_gquord(&a));
        let part = FiniteRelation::from_tuples(u(3), 1, [[0], [2]]).unwrap();
        assert!(is_transitive(&part).is_ok());
        assert!(is_reflexive(&part).is_err());
        assert_eq!(delta_step(&part), part);
    }
}
