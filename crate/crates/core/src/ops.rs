//! Finite operations: preservation, translations, bounded polymorphism
//! enumeration, lattice operations of an order and the identities of
//! rectangular algebras.
//!
//! Operation text format: `op <k> <n>` followed by the `n^k` table values in
//! ascending encoded-argument order (any whitespace layout).

use std::fmt;

use rayon::prelude::*;

use crate::analysis::classify;
use crate::error::{GqError, Result};
use crate::relation::{checked_pow, decode_into, FiniteRelation, Universe};
use crate::text::{content_lines, parse_usize};

/// A `k`-ary operation on `{0..n-1}` stored as a flat table indexed by the
/// base-`n` encoding of its arguments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteOperation {
    universe: Universe,
    arity: usize,
    table: Vec<usize>,
}

impl FiniteOperation {
    pub fn new(universe: Universe, arity: usize, table: Vec<usize>) -> Result<Self> {
        let size = crate::relation::point_count(universe.size(), arity)?;
        if table.len() != size {
            return Err(GqError::Invalid(format!(
                "table has {} entries, expected {size}",
                table.len()
            )));
        }
        for &v in &table {
            universe.check(v)?;
        }
        Ok(FiniteOperation {
            universe,
            arity,
            table,
        })
    }

    pub fn from_fn(universe: Universe, arity: usize, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let size = crate::relation::point_count(universe.size(), arity)?;
        let mut args = vec![0; arity];
        let table = (0..size)
            .map(|idx| {
                decode_into(idx, universe.size(), &mut args);
                f(&args)
            })
            .collect();
        Self::new(universe, arity, table)
    }

    /// `e^k_i(x) = x_i`, 0-based `i`.
    pub fn projection(universe: Universe, arity: usize, i: usize) -> Result<Self> {
        if i >= arity {
            return Err(GqError::Invalid(format!("projection index {i} not below arity {arity}")));
        }
        Self::from_fn(universe, arity, |x| x[i])
    }

    pub fn identity(universe: Universe) -> Self {
        Self::from_fn(universe, 1, |x| x[0]).expect("unary")
    }

    /// The unary constant map with value `a`.
    pub fn constant(universe: Universe, a: usize) -> Result<Self> {
        universe.check(a)?;
        Self::from_fn(universe, 1, |_| a)
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    fn index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &x| acc * self.universe.size() + x)
    }

    pub fn apply(&self, args: &[usize]) -> Result<usize> {
        if args.len() != self.arity {
            return Err(GqError::ArityMismatch {
                expected: self.arity,
                actual: args.len(),
            });
        }
        for &x in args {
            self.universe.check(x)?;
        }
        Ok(self.table[self.index(args)])
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, args: &[usize]) -> usize {
        self.table[self.index(args)]
    }

    /// Componentwise application to `k` rows of equal length.
    pub fn apply_rows(&self, rows: &[Vec<usize>]) -> Result<Vec<usize>> {
        if rows.len() != self.arity {
            return Err(GqError::ArityMismatch {
                expected: self.arity,
                actual: rows.len(),
            });
        }
        let m = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != m) {
            return Err(GqError::ArityMismatch {
                expected: m,
                actual: r.len(),
            });
        }
        let mut args = vec![0; self.arity];
        (0..m)
            .map(|j| {
                for (slot, row) in args.iter_mut().zip(rows) {
                    *slot = row[j];
                }
                self.apply(&args)
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("op {} {}\n", self.arity, self.universe.size());
        let n = self.universe.size();
        for chunk in self.table.chunks(n) {
            let vals: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            out.push_str(&vals.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or_else(|| GqError::parse(0, "missing `op <k> <n>` header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "op" {
            return Err(GqError::parse(hline, "expected `op <k> <n>`"));
        }
        let k = parse_usize(fields[1], hline)?;
        let n = parse_usize(fields[2], hline)?;
        let universe = Universe::new(n).map_err(|e| GqError::parse(hline, e.to_string()))?;
        let mut table = Vec::new();
        let mut last = hline;
        for (lineno, line) in lines {
            last = lineno;
            for f in line.split_whitespace() {
                let v = parse_usize(f, lineno)?;
                if v >= n {
                    return Err(GqError::parse(lineno, format!("value {v} out of range")));
                }
                table.push(v);
            }
        }
        Self::new(universe, k, table).map_err(|e| GqError::parse(last, e.to_string()))
    }
}

impl fmt::Debug for FiniteOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Op(k={}, n={}, {:?})", self.arity, self.universe.size(), self.table)
    }
}

/// Boolean meet on `{0,1}`.
pub fn and() -> FiniteOperation {
    FiniteOperation::from_fn(Universe::new(2).unwrap(), 2, |x| x[0] & x[1]).unwrap()
}

/// Boolean join on `{0,1}`.
pub fn or() -> FiniteOperation {
    FiniteOperation::from_fn(Universe::new(2).unwrap(), 2, |x| x[0] | x[1]).unwrap()
}

pub fn not() -> FiniteOperation {
    FiniteOperation::from_fn(Universe::new(2).unwrap(), 1, |x| 1 - x[0]).unwrap()
}

/// `(a,b)*(c,d) = (a,d)` on `n0 × n0`, the pair `(a,b)` encoded as `a·n0 + b`.
pub fn rect_band(n0: usize) -> Result<FiniteOperation> {
    let universe = Universe::new(n0 * n0)?;
    FiniteOperation::from_fn(universe, 2, |x| (x[0] / n0) * n0 + x[1] % n0)
}

/// A finite list of operations on one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationSet {
    universe: Universe,
    ops: Vec<FiniteOperation>,
}

impl OperationSet {
    pub fn new(universe: Universe, ops: Vec<FiniteOperation>) -> Result<Self> {
        if let Some(f) = ops.iter().find(|f| f.universe != universe) {
            return Err(GqError::UniverseMismatch {
                expected: universe.size(),
                actual: f.universe.size(),
            });
        }
        Ok(OperationSet { universe, ops })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn ops(&self) -> &[FiniteOperation] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// `{∧, ∨, c₀, c₁}` on `{0,1}`.
pub fn boolean_monotone_generators() -> OperationSet {
    let u = Universe::new(2).unwrap();
    OperationSet::new(
        u,
        vec![
            and(),
            or(),
            FiniteOperation::constant(u, 0).unwrap(),
            FiniteOperation::constant(u, 1).unwrap(),
        ],
    )
    .unwrap()
}

struct Preservation<'a> {
    f: &'a FiniteOperation,
    rel: &'a FiniteRelation,
    members: Vec<Vec<usize>>,
    chosen: Vec<usize>,
}

impl Preservation<'_> {
    /// Depth-first over `k`-tuples of members; `codes[j]` is the partial
    /// table index of column `j`.
    fn descend(&mut self, codes: &[usize]) -> bool {
        let n = self.rel.n();
        if self.chosen.len() == self.f.arity {
            let mut image = 0;
            for &c in codes {
                image = image * n + self.f.table[c];
            }
            return self.rel.contains_index(image);
        }
        let mut next = vec![0; codes.len()];
        for r in 0..self.members.len() {
            for (j, slot) in next.iter_mut().enumerate() {
                *slot = codes[j] * n + self.members[r][j];
            }
            self.chosen.push(r);
            if !self.descend(&next) {
                return false;
            }
            self.chosen.pop();
        }
        true
    }
}

/// `f ▷ ρ`. On failure returns the first `k` member rows (in search order)
/// whose image leaves `ρ`.
pub fn preserves(f: &FiniteOperation, rel: &FiniteRelation) -> Result<std::result::Result<(), Vec<Vec<usize>>>> {
    if f.universe != rel.universe() {
        return Err(GqError::UniverseMismatch {
            expected: rel.n(),
            actual: f.universe.size(),
        });
    }
    let mut p = Preservation {
        f,
        rel,
        members: rel.tuples().collect(),
        chosen: Vec::with_capacity(f.arity),
    };
    let codes = vec![0; rel.arity()];
    if p.descend(&codes) {
        Ok(Ok(()))
    } else {
        Ok(Err(p.chosen.iter().map(|&r| p.members[r].clone()).collect()))
    }
}

fn preserves_all(f: &FiniteOperation, rels: &[&FiniteRelation]) -> bool {
    rels.iter()
        .all(|r| matches!(preserves(f, r), Ok(Ok(()))))
}

/// All unary maps obtained from `f` by fixing every argument but one,
/// deduplicated and sorted by table.
pub fn translations(f: &FiniteOperation) -> Vec<FiniteOperation> {
    let n = f.universe.size();
    let k = f.arity;
    let mut out = std::collections::BTreeSet::new();
    if k == 0 {
        let c = f.table[0];
        out.insert(FiniteOperation::from_fn(f.universe, 1, |_| c).unwrap());
    }
    let others = checked_pow(n, k.saturating_sub(1)).unwrap();
    let mut consts = vec![0; k.saturating_sub(1)];
    let mut args = vec![0; k];
    for i in 0..k {
        for code in 0..others {
            decode_into(code, n, &mut consts);
            let table = (0..n)
                .map(|x| {
                    args[..i].copy_from_slice(&consts[..i]);
                    args[i] = x;
                    args[i + 1..].copy_from_slice(&consts[i..]);
                    f.apply_unchecked(&args)
                })
                .collect();
            out.insert(FiniteOperation {
                universe: f.universe,
                arity: 1,
                table,
            });
        }
    }
    out.into_iter().collect()
}

/// Whether `f ▷ ρ` agrees with "every translation of `f` preserves `ρ`".
pub fn xi_holds(f: &FiniteOperation, rel: &FiniteRelation) -> Result<bool> {
    let direct = preserves(f, rel)?.is_ok();
    let mut via_translations = true;
    for t in translations(f) {
        if preserves(&t, rel)?.is_err() {
            via_translations = false;
            break;
        }
    }
    Ok(direct == via_translations)
}

fn check_universe(universe: Universe, rels: &[FiniteRelation]) -> Result<()> {
    if let Some(r) = rels.iter().find(|r| r.universe() != universe) {
        return Err(GqError::UniverseMismatch {
            expected: universe.size(),
            actual: r.n(),
        });
    }
    Ok(())
}

/// `End Q`: unary operations preserving every relation of `Q`.
pub fn end_monoid(rels: &[FiniteRelation], universe: Universe) -> Result<OperationSet> {
    pol_bounded(rels, universe, 1, usize::MAX)
}

/// `Pol^(k) Q` by enumerating all `n^(n^k)` tables. Fails with the required
/// count when that exceeds `budget`.
pub fn pol_bounded(
    rels: &[FiniteRelation],
    universe: Universe,
    k: usize,
    budget: usize,
) -> Result<OperationSet> {
    check_universe(universe, rels)?;
    let n = universe.size();
    let args = checked_pow(n, k).filter(|&a| a <= 64);
    let required = args.and_then(|a| (n as u128).checked_pow(a as u32));
    let total = match required {
        Some(t) if t <= budget as u128 => t as usize,
        _ => {
            return Err(GqError::Resource {
                what: format!("{k}-ary operations on {n} elements"),
                required: required.unwrap_or(u128::MAX),
                limit: budget as u128,
                partial: 0,
            })
        }
    };
    let args = args.unwrap();
    let mut ordered: Vec<&FiniteRelation> = rels.iter().collect();
    ordered.sort_by_key(|r| r.len());
    let ops: Vec<FiniteOperation> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let mut table = vec![0; args];
            decode_into(code, n, &mut table);
            let f = FiniteOperation {
                universe,
                arity: k,
                table,
            };
            preserves_all(&f, &ordered).then_some(f)
        })
        .collect();
    OperationSet::new(universe, ops)
}

/// Whether every generator preserves `ρ`, i.e. `ρ ∈ Inv ⟨gens⟩`.
pub fn invariant_under(rel: &FiniteRelation, gens: &OperationSet) -> Result<bool> {
    for f in gens.ops() {
        if preserves(f, rel)?.is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingBound {
    LeastUpper,
    GreatestLower,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeOps {
    Lattice {
        meet: FiniteOperation,
        join: FiniteOperation,
        majority: FiniteOperation,
    },
    /// The first pair `a < b` (lexicographic) lacking a bound.
    NotLattice {
        pair: (usize, usize),
        missing: MissingBound,
    },
}

fn is_partial_order(rel: &FiniteRelation) -> Result<()> {
    if rel.arity() != 2 {
        return Err(GqError::ArityMismatch {
            expected: 2,
            actual: rel.arity(),
        });
    }
    let report = classify(rel);
    if !report.is_gquord {
        let w = report.witness(crate::analysis::Property::GQuord).unwrap();
        return Err(GqError::classification("a partial order", w.to_string()));
    }
    if let Some(t) = rel.tuples().find(|t| t[0] != t[1] && rel.contains(&[t[1], t[0]])) {
        return Err(GqError::classification(
            "a partial order",
            format!("antisymmetry fails at ({},{})", t[0], t[1]),
        ));
    }
    Ok(())
}

/// Meet, join and the majority `(x∧y)∨(y∧z)∨(z∧x)` of a lattice order.
pub fn lattice_ops_from_order(rel: &FiniteRelation) -> Result<LatticeOps> {
    is_partial_order(rel)?;
    let n = rel.n();
    let le = |a: usize, b: usize| rel.contains(&[a, b]);
    let lub = |a: usize, b: usize| {
        let ups: Vec<usize> = (0..n).filter(|&u| le(a, u) && le(b, u)).collect();
        ups.iter().copied().find(|&u| ups.iter().all(|&v| le(u, v)))
    };
    let glb = |a: usize, b: usize| {
        let downs: Vec<usize> = (0..n).filter(|&l| le(l, a) && le(l, b)).collect();
        downs.iter().copied().find(|&l| downs.iter().all(|&v| le(v, l)))
    };
    let mut meet = vec![0; n * n];
    let mut join = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let (lo, hi) = (a.min(b), a.max(b));
            match lub(a, b) {
                Some(j) => join[a * n + b] = j,
                None => {
                    return Ok(LatticeOps::NotLattice {
                        pair: (lo, hi),
                        missing: MissingBound::LeastUpper,
                    })
                }
            }
            match glb(a, b) {
                Some(m) => meet[a * n + b] = m,
                None => {
                    return Ok(LatticeOps::NotLattice {
                        pair: (lo, hi),
                        missing: MissingBound::GreatestLower,
                    })
                }
            }
        }
    }
    let u = rel.universe();
    let meet = FiniteOperation::new(u, 2, meet)?;
    let join = FiniteOperation::new(u, 2, join)?;
    let majority = FiniteOperation::from_fn(u, 3, |x| {
        let m = |a: usize, b: usize| meet.table[a * n + b];
        let j = |a: usize, b: usize| join.table[a * n + b];
        j(j(m(x[0], x[1]), m(x[1], x[2])), m(x[2], x[0]))
    })?;
    Ok(LatticeOps::Lattice {
        meet,
        join,
        majority,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `f(x,…,x) ≈ x`.
    Idempotent,
    /// Absorption at position `i` (0-based).
    AbsorbAt(usize),
    /// `f(f(x_11..x_1k),…,f(x_k1..x_kk)) ≈ f(x_11,…,x_kk)`.
    Absorb,
    /// `f` and `g` commute.
    Commute,
}

impl Identity {
    pub fn tag(self) -> String {
        match self {
            Identity::Idempotent => "ID".into(),
            Identity::AbsorbAt(i) => format!("AB^{i}"),
            Identity::Absorb => "AB".into(),
            Identity::Commute => "C".into(),
        }
    }
}

/// Checks an identity over all assignments. `Ok(None)` when it holds,
/// otherwise the first violating assignment of its variables.
///
/// Variable order: `Idempotent` has `x`; `AbsorbAt(i)` has `x_1..x_k`
/// followed by the `k-1` inner `y`s; `Absorb` has `x_11..x_kk` row-major;
/// `Commute` has `x_11..x_kl` row-major with `k = arity f`, `l = arity g`.
pub fn check_identity(
    f: &FiniteOperation,
    g: Option<&FiniteOperation>,
    identity: Identity,
) -> Result<Option<Vec<usize>>> {
    let n = f.universe.size();
    let k = f.arity;
    if k == 0 {
        return Err(GqError::ArityMismatch {
            expected: 1,
            actual: 0,
        });
    }
    let g = g.unwrap_or(f);
    if g.universe != f.universe {
        return Err(GqError::UniverseMismatch {
            expected: n,
            actual: g.universe.size(),
        });
    }
    let vars = match identity {
        Identity::Idempotent => 1,
        Identity::AbsorbAt(i) => {
            if i >= k {
                return Err(GqError::ArityMismatch {
                    expected: k,
                    actual: i + 1,
                });
            }
            2 * k - 1
        }
        Identity::Absorb => k * k,
        Identity::Commute => k * g.arity,
    };
    let total = crate::relation::point_count(n, vars)?;
    let mut v = vec![0; vars];
    let mut args = vec![0; k];
    let mut inner = vec![0; k.max(g.arity)];
    for code in 0..total {
        decode_into(code, n, &mut v);
        let holds = match identity {
            Identity::Idempotent => {
                args.fill(v[0]);
                f.apply_unchecked(&args) == v[0]
            }
            Identity::AbsorbAt(i) => {
                let (x, y) = v.split_at(k);
                inner[..i].copy_from_slice(&y[..i]);
                inner[i] = x[i];
                inner[i + 1..k].copy_from_slice(&y[i..]);
                args.copy_from_slice(x);
                args[i] = f.apply_unchecked(&inner[..k]);
                f.apply_unchecked(&args) == f.apply_unchecked(x)
            }
            Identity::Absorb => {
                for r in 0..k {
                    args[r] = f.apply_unchecked(&v[r * k..(r + 1) * k]);
                }
                let lhs = f.apply_unchecked(&args);
                for (r, slot) in args.iter_mut().enumerate() {
                    *slot = v[r * k + r];
                }
                lhs == f.apply_unchecked(&args)
            }
            Identity::Commute => {
                let l = g.arity;
                for r in 0..k {
                    args[r] = g.apply_unchecked(&v[r * l..(r + 1) * l]);
                }
                let lhs = f.apply_unchecked(&args);
                let mut outer = vec![0; l];
                for (c, slot) in outer.iter_mut().enumerate() {
                    for r in 0..k {
                        inner[r] = v[r * l + c];
                    }
                    *slot = f.apply_unchecked(&inner[..k]);
                }
                lhs == g.apply_unchecked(&outer)
            }
        };
        if !holds {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// `{(a_1,…,a_k,b) : f(a) = b}`.
pub fn graph_of(f: &FiniteOperation) -> FiniteRelation {
    let n = f.universe.size();
    let mut out = FiniteRelation::empty(f.universe, f.arity + 1).expect("graph fits when the table does");
    for (idx, &b) in f.table.iter().enumerate() {
        out.insert_index(idx * n + b);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectangularReport {
    pub entropic: bool,
    pub idempotent: bool,
    pub absorptive: bool,
    /// Equivalent to idempotence.
    pub graph_reflexive: bool,
    pub graph_transitive: bool,
    pub graph_gquord: bool,
    pub graph_gpord: bool,
}

impl RectangularReport {
    /// For entropic `f`: absorption holds iff the graph is transitive.
    /// `None` when `f` is not entropic.
    pub fn transitivity_equivalence(&self) -> Option<bool> {
        self.entropic.then_some(self.absorptive == self.graph_transitive)
    }

    /// For entropic `f`: absorption holds iff the graph is a generalized
    /// quasiorder. Only expected when `f` is also idempotent, since the
    /// graph is reflexive exactly then.
    pub fn gquord_equivalence(&self) -> Option<bool> {
        self.entropic.then_some(self.absorptive == self.graph_gquord)
    }

    /// Idempotent entropic absorptive operations must have a graph that is
    /// a generalized partial order.
    pub fn partial_order_expectation(&self) -> bool {
        !(self.entropic && self.idempotent && self.absorptive) || self.graph_gpord
    }

    pub fn consistent(&self) -> bool {
        self.transitivity_equivalence() != Some(false)
            && (!self.idempotent || self.gquord_equivalence() != Some(false))
            && self.partial_order_expectation()
    }
}

pub fn rectangular_theorem_check(f: &FiniteOperation) -> Result<RectangularReport> {
    let entropic = check_identity(f, None, Identity::Commute)?.is_none();
    let idempotent = check_identity(f, None, Identity::Idempotent)?.is_none();
    let absorptive = check_identity(f, None, Identity::Absorb)?.is_none();
    let graph = graph_of(f);
    let graph_reflexive = crate::analysis::is_reflexive(&graph).is_ok();
    let graph_transitive = crate::analysis::is_transitive(&graph).is_ok();
    let graph_gquord = graph_reflexive && graph_transitive;
    let graph_gpord = graph_gquord && classify(&graph).is_gpord;
    Ok(RectangularReport {
        entropic,
        idempotent,
        absorptive,
        graph_reflexive,
        graph_transitive,
        graph_gquord,
        graph_gpord,
    })
}
