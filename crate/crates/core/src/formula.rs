//! Conjunctive formulas over named relations.
//!
//! An atom `σ(x_α(0),…,x_α(s-1))` is stored as a relation name plus an
//! [`IndexMap`] into the formula's variables. Evaluation intersects the
//! atoms' cylinders; pp-formulas then project away the bound variables.
//!
//! Text format:
//!
//! ```text
//! free <m> bound <s>
//! atom <name> <i_1> … <i_k>
//! ```

use std::collections::{BTreeMap, HashSet};

use crate::error::{GqError, Result};
use crate::maps::IndexMap;
use crate::relation::{checked_pow, max_points, point_count, FiniteRelation, Universe};
use crate::text::{content_lines, parse_usize};

/// Name of the builtin equality relation.
pub const EQ: &str = "eq";

/// Default limit on existentially bound variables.
pub const DEFAULT_MAX_BOUND: usize = 4;

/// Named relations over a common universe. `eq` always resolves to `Δ_A`.
#[derive(Debug, Clone)]
pub struct RelationStore {
    universe: Universe,
    relations: BTreeMap<String, FiniteRelation>,
    equality: FiniteRelation,
}

impl RelationStore {
    pub fn new(universe: Universe) -> Self {
        RelationStore {
            universe,
            relations: BTreeMap::new(),
            equality: FiniteRelation::constant_tuples(universe, 2).expect("binary"),
        }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn insert(&mut self, name: &str, rel: FiniteRelation) -> Result<()> {
        if name == EQ {
            return Err(GqError::Invalid(format!("`{EQ}` is reserved")));
        }
        if rel.universe() != self.universe {
            return Err(GqError::UniverseMismatch {
                expected: self.universe.size(),
                actual: rel.n(),
            });
        }
        self.relations.insert(name.to_string(), rel);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&FiniteRelation> {
        if name == EQ {
            return Ok(&self.equality);
        }
        self.relations
            .get(name)
            .ok_or_else(|| GqError::UnknownRelation(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: String,
    pub vars: IndexMap,
}

impl Atom {
    pub fn new(relation: &str, vars: Vec<usize>, variable_count: usize) -> Result<Self> {
        Ok(Atom {
            relation: relation.to_string(),
            vars: IndexMap::new(vars, variable_count)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QfPpFormula {
    pub free_count: usize,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpFormula {
    pub free_count: usize,
    pub bound_count: usize,
    pub atoms: Vec<Atom>,
}

impl From<QfPpFormula> for PpFormula {
    fn from(f: QfPpFormula) -> Self {
        PpFormula {
            free_count: f.free_count,
            bound_count: 0,
            atoms: f.atoms,
        }
    }
}

/// `{a ∈ A^m : (a_α(0),…,a_α(s-1)) ∈ σ}`.
pub fn cylinder(sigma: &FiniteRelation, alpha: &IndexMap) -> Result<FiniteRelation> {
    if alpha.source_arity() != sigma.arity() {
        return Err(GqError::ArityMismatch {
            expected: sigma.arity(),
            actual: alpha.source_arity(),
        });
    }
    let mut sub = vec![0; sigma.arity()];
    FiniteRelation::from_predicate(sigma.universe(), alpha.target_arity(), |t| {
        for (i, slot) in sub.iter_mut().enumerate() {
            *slot = t[alpha.get(i)];
        }
        sigma.contains(&sub)
    })
}

fn eval_body(atoms: &[Atom], arity: usize, store: &RelationStore) -> Result<FiniteRelation> {
    let mut out = FiniteRelation::full(store.universe(), arity)?;
    for atom in atoms {
        if atom.vars.target_arity() != arity {
            return Err(GqError::ArityMismatch {
                expected: arity,
                actual: atom.vars.target_arity(),
            });
        }
        out.intersect_in_place(&cylinder(store.get(&atom.relation)?, &atom.vars)?);
    }
    Ok(out)
}

pub fn eval_qfpp(phi: &QfPpFormula, store: &RelationStore) -> Result<FiniteRelation> {
    eval_body(&phi.atoms, phi.free_count, store)
}

pub fn eval_pp(phi: &PpFormula, store: &RelationStore) -> Result<FiniteRelation> {
    eval_pp_limited(phi, store, DEFAULT_MAX_BOUND)
}

pub fn eval_pp_limited(
    phi: &PpFormula,
    store: &RelationStore,
    max_bound: usize,
) -> Result<FiniteRelation> {
    if phi.bound_count > max_bound {
        return Err(GqError::Resource {
            what: "bound variables".into(),
            required: phi.bound_count as u128,
            limit: max_bound as u128,
            partial: 0,
        });
    }
    let n = store.universe().size();
    let total = phi.free_count + phi.bound_count;
    point_count(n, total)?;
    let body = eval_body(&phi.atoms, total, store)?;
    let tail = checked_pow(n, phi.bound_count).expect("checked above");
    let mut out = FiniteRelation::empty(store.universe(), phi.free_count)?;
    for idx in body.indices() {
        out.insert_index(idx / tail);
    }
    Ok(out)
}

/// Every cylinder `σ^α` with `σ ∈ Q ∪ {Δ_A}` and `α` any map into `0..m`,
/// deduplicated, in first-seen order.
pub fn qfpp_atoms(relations: &[FiniteRelation], universe: Universe, m: usize) -> Result<Vec<FiniteRelation>> {
    let eq = FiniteRelation::constant_tuples(universe, 2)?;
    let mut seen = HashSet::new();
    let mut atoms = Vec::new();
    for sigma in relations.iter().chain(std::iter::once(&eq)) {
        if sigma.universe() != universe {
            return Err(GqError::UniverseMismatch {
                expected: universe.size(),
                actual: sigma.n(),
            });
        }
        for alpha in IndexMap::all(sigma.arity(), m) {
            let c = cylinder(sigma, &alpha)?;
            if seen.insert(c.clone()) {
                atoms.push(c);
            }
        }
    }
    Ok(atoms)
}

/// All `m`-ary relations definable from `Q` by quantifier-free pp-formulas:
/// the meet closure of [`qfpp_atoms`] together with `A^m`. Sorted.
pub fn qfpp_closure(
    relations: &[FiniteRelation],
    universe: Universe,
    m: usize,
    budget: usize,
) -> Result<Vec<FiniteRelation>> {
    let atoms = qfpp_atoms(relations, universe, m)?;
    let full = FiniteRelation::full(universe, m)?;
    let mut members: HashSet<FiniteRelation> = HashSet::from([full.clone()]);
    let mut list = vec![full];
    for atom in &atoms {
        let mut added = Vec::new();
        for x in &list {
            let mut y = x.clone();
            y.intersect_in_place(atom);
            if !members.contains(&y) {
                members.insert(y.clone());
                added.push(y);
            }
        }
        list.extend(added);
        if list.len() > budget {
            return Err(GqError::Resource {
                what: "qf-pp closure size".into(),
                required: list.len() as u128,
                limit: budget as u128,
                partial: list.len(),
            });
        }
    }
    list.sort();
    Ok(list)
}

/// Least member of the qf-pp closure containing `rel`: the meet of all
/// atoms that contain it.
pub fn qfpp_hull(rel: &FiniteRelation, atoms: &[FiniteRelation]) -> FiniteRelation {
    let mut hull = FiniteRelation::full(rel.universe(), rel.arity()).expect("valid shape");
    for a in atoms.iter().filter(|a| rel.is_subset(a)) {
        hull.intersect_in_place(a);
    }
    hull
}

/// Whether `rel` is definable from the atoms by a quantifier-free pp-formula.
pub fn in_qfpp_closure(rel: &FiniteRelation, atoms: &[FiniteRelation]) -> bool {
    qfpp_hull(rel, atoms) == *rel
}

pub fn parse_formula(text: &str) -> Result<PpFormula> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| GqError::parse(0, "missing `free <m> bound <s>` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (free_count, bound_count) = match fields.as_slice() {
        ["free", m] => (parse_usize(m, hline)?, 0),
        ["free", m, "bound", s] => (parse_usize(m, hline)?, parse_usize(s, hline)?),
        _ => return Err(GqError::parse(hline, "expected `free <m> bound <s>`")),
    };
    let total = free_count + bound_count;
    let mut atoms = Vec::new();
    for (lineno, line) in lines {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("atom") {
            return Err(GqError::parse(lineno, "expected `atom <name> <indices…>`"));
        }
        let name = parts
            .next()
            .ok_or_else(|| GqError::parse(lineno, "missing relation name"))?;
        let vars = parts
            .map(|f| parse_usize(f, lineno))
            .collect::<Result<Vec<_>>>()?;
        let atom = Atom::new(name, vars, total).map_err(|e| GqError::parse(lineno, e.to_string()))?;
        atoms.push(atom);
    }
    Ok(PpFormula {
        free_count,
        bound_count,
        atoms,
    })
}

pub fn serialize_formula(phi: &PpFormula) -> String {
    let mut out = format!("free {} bound {}\n", phi.free_count, phi.bound_count);
    for atom in &phi.atoms {
        out.push_str("atom ");
        out.push_str(&atom.relation);
        for v in atom.vars.as_slice() {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}

/// Arity checks against the store, without evaluating.
pub fn check_formula(phi: &PpFormula, store: &RelationStore) -> Result<()> {
    for atom in &phi.atoms {
        let rel = store.get(&atom.relation)?;
        if rel.arity() != atom.vars.source_arity() {
            return Err(GqError::ArityMismatch {
                expected: rel.arity(),
                actual: atom.vars.source_arity(),
            });
        }
    }
    let points = checked_pow(store.universe().size(), phi.free_count + phi.bound_count);
    if points.map_or(true, |p| p > max_points()) {
        return Err(GqError::Resource {
            what: "formula body points".into(),
            required: points.map_or(u128::MAX, |p| p as u128),
            limit: max_points() as u128,
            partial: 0,
        });
    }
    Ok(())
}
