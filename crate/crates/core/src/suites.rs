//! Named verification suites. Each suite runs a fixed list of exhaustive or
//! seeded checks and reports pass/fail per check with a witness on failure.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rayon::prelude::*;

use crate::analysis::{
    abs, bin_sym, classify, exchange_eq, is_gquord, is_reflexive, is_transitive, lift_partition,
    lift_relation, models_matrix, tos, transitive_closure,
};
use crate::construct::{
    add_fictitious, block_factor, decompose, direct_product, factor, has_exchange_property,
    identify_first_two, image, intersect, permute, preimage, recompose, restrict,
};
use crate::corpus;
use crate::enumerate::{enumerate, sample_gquords, Kind};
use crate::error::{GqError, Result};
use crate::formula::{eval_pp, qfpp_closure, serialize_formula, RelationStore};
use crate::maps::{IndexMap, SurjectiveMap};
use crate::ops::{
    boolean_monotone_generators, end_monoid, invariant_under, lattice_ops_from_order,
    pol_bounded, rect_band, rectangular_theorem_check, xi_holds, FiniteOperation, LatticeOps,
    MissingBound, RectangularReport,
};
use crate::partition::EquivPartition;
use crate::relation::{checked_pow, point_count, FiniteRelation, Universe};
use crate::search::{chain, gpord_sweep, pp_sweep, square_lattice, PpSweepConfig};

const CLOSURE_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Boolean,
    PosetExample,
    Decomposition,
    ClosureProps,
    FactorProps,
    GeqIso,
    Rectangular,
    Xi,
    CandidateSearch,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Boolean,
        Suite::PosetExample,
        Suite::Decomposition,
        Suite::ClosureProps,
        Suite::FactorProps,
        Suite::GeqIso,
        Suite::Rectangular,
        Suite::Xi,
        Suite::CandidateSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Boolean => "boolean-thm",
            Suite::PosetExample => "example-5-3",
            Suite::Decomposition => "decomposition",
            Suite::ClosureProps => "closure-props",
            Suite::FactorProps => "factor-props",
            Suite::GeqIso => "geq-iso",
            Suite::Rectangular => "rectangular",
            Suite::Xi => "xi",
            Suite::CandidateSearch => "conjecture-search",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = GqError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| GqError::Invalid(format!("unknown suite `{s}`")))
    }
}

/// `n` and `m` narrow a suite to one size where that makes sense; `None`
/// runs the default grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteParams {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            n: None,
            m: None,
            samples: 10_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub params: SuiteParams,
    pub checks: Vec<Check>,
    pub info: Vec<(String, String)>,
}

fn one_line(s: &str) -> String {
    s.trim_end().replace('\n', "; ")
}

impl SuiteReport {
    fn new(suite: Suite, params: SuiteParams) -> Self {
        SuiteReport {
            suite,
            params,
            checks: Vec::new(),
            info: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn info_value(&self, key: &str) -> Option<&str> {
        self.info.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn add(&mut self, name: impl Into<String>, detail: impl Into<String>, failure: Option<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: failure.is_none(),
            detail: detail.into(),
            witness: failure,
        });
    }

    fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.info.push((key.into(), value.to_string()));
    }

    /// `key=value` lines ending in `RESULT=PASS` or `RESULT=FAIL`.
    pub fn to_kv(&self) -> String {
        let mut out = format!("suite={}\n", self.suite);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("check.{}={status}\n", c.name));
            out.push_str(&format!("check.{}.detail={}\n", c.name, one_line(&c.detail)));
            if let Some(w) = &c.witness {
                out.push_str(&format!("check.{}.witness={}\n", c.name, one_line(w)));
            }
        }
        for (k, v) in &self.info {
            out.push_str(&format!("info.{k}={}\n", one_line(v)));
        }
        out.push_str(if self.passed() { "RESULT=PASS\n" } else { "RESULT=FAIL\n" });
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{status}] {}: {}\n", c.name, one_line(&c.detail)));
            if let Some(w) = &c.witness {
                out.push_str(&format!("       witness: {}\n", one_line(w)));
            }
        }
        for (k, v) in &self.info {
            out.push_str(&format!("  {k}: {}\n", one_line(v)));
        }
        out.push_str(if self.passed() { "RESULT: PASS\n" } else { "RESULT: FAIL\n" });
        out
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(suite, *params);
    match suite {
        Suite::Boolean => boolean(params, &mut report)?,
        Suite::PosetExample => poset_example(&mut report)?,
        Suite::Decomposition => decomposition(params, &mut report)?,
        Suite::ClosureProps => closure_props(params, &mut report)?,
        Suite::FactorProps => factor_props(&mut report)?,
        Suite::GeqIso => geq_iso(params, &mut report)?,
        Suite::Rectangular => rectangular(params, &mut report)?,
        Suite::Xi => xi(&mut report)?,
        Suite::CandidateSearch => candidate_search(params, &mut report)?,
    }
    Ok(report)
}

/// First failure in input order; an error counts as a failure.
fn first_failure<T, F>(items: &[T], f: F) -> Option<String>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<String>> + Sync,
{
    items.par_iter().find_map_first(|x| match f(x) {
        Ok(w) => w,
        Err(e) => Some(format!("error: {e}")),
    })
}

fn fail_if(cond: bool, witness: impl FnOnce() -> String) -> Option<String> {
    cond.then(witness)
}

fn u(n: usize) -> Result<Universe> {
    Universe::new(n)
}

/// Every relation of the given shape, in encoding order of the bitmask.
pub fn all_relations(n: usize, m: usize) -> Result<Vec<FiniteRelation>> {
    let universe = u(n)?;
    let points = point_count(n, m)?;
    if points > 20 {
        return Err(GqError::Resource {
            what: "relations to list exhaustively".into(),
            required: 1u128 << points.min(127),
            limit: 1 << 20,
            partial: 0,
        });
    }
    Ok((0u32..1 << points)
        .map(|mask| {
            let mut bits = FixedBitSet::with_capacity(points);
            for i in (0..points).filter(|i| mask >> i & 1 == 1) {
                bits.insert(i);
            }
            FiniteRelation::from_bits(universe, m, bits)
        })
        .collect())
}

/// Every `k`-ary operation on `n` elements.
pub fn all_operations(n: usize, k: usize) -> Result<Vec<FiniteOperation>> {
    let universe = u(n)?;
    let args = checked_pow(n, k).filter(|&a| a <= 16).ok_or_else(|| GqError::Resource {
        what: "operations to list exhaustively".into(),
        required: u128::MAX,
        limit: 1 << 20,
        partial: 0,
    })?;
    let count = checked_pow(n, args).filter(|&c| c <= 1 << 20).ok_or_else(|| GqError::Resource {
        what: "operations to list exhaustively".into(),
        required: (n as u128).saturating_pow(args as u32),
        limit: 1 << 20,
        partial: 0,
    })?;
    (0..count)
        .map(|code| {
            let mut table = vec![0; args];
            crate::relation::decode_into(code, n, &mut table);
            FiniteOperation::new(universe, k, table)
        })
        .collect()
}

fn gquords(n: usize, m: usize) -> Result<Vec<FiniteRelation>> {
    enumerate(Kind::GQuord, n, m, usize::MAX)
}

fn permutations(m: usize) -> Vec<IndexMap> {
    IndexMap::all(m, m).into_iter().filter(IndexMap::is_bijection).collect()
}

fn boolean(p: &SuiteParams, r: &mut SuiteReport) -> Result<()> {
    let arities: Vec<usize> = match p.m {
        Some(m) => vec![m],
        None => (1..=4).collect(),
    };
    let gens = boolean_monotone_generators();
    let le = chain(2)?;
    for m in arities {
        let rels = all_relations(2, m)?;
        let flags: Vec<(bool, bool)> = rels
            .par_iter()
            .map(|rel| {
                let inv = invariant_under(rel, &gens).unwrap_or(false);
                (is_gquord(rel), inv)
            })
            .collect();
        let gq: Vec<&FiniteRelation> = rels.iter().zip(&flags).filter(|(_, f)| f.0).map(|(x, _)| x).collect();
        let invs = flags.iter().filter(|f| f.1).count();
        let empty_survives = flags[0].1;
        let mismatch = rels
            .iter()
            .zip(&flags)
            .find(|(rel, (g, i))| *g != (*i && !rel.is_empty()))
            .map(|(rel, (g, _))| format!("{rel:?} gquord={g}"));
        r.add(
            format!("m{m}.gquords_equal_nonempty_invariants"),
            format!("{} relations, {} gQuords, {} invariants (empty relation survives: {empty_survives})", rels.len(), gq.len(), invs),
            mismatch,
        );
        let closure = qfpp_closure(std::slice::from_ref(&le), le.universe(), m, CLOSURE_BUDGET)?;
        let mut sorted: Vec<FiniteRelation> = gq.into_iter().cloned().collect();
        sorted.sort();
        let diff = closure
            .iter()
            .find(|x| sorted.binary_search(x).is_err())
            .or_else(|| sorted.iter().find(|x| closure.binary_search(x).is_err()))
            .map(|x| format!("{x:?}"));
        r.add(
            format!("m{m}.qfpp_closure_of_order_equals_gquords"),
            format!("closure has {} members", closure.len()),
            diff,
        );
        r.note(format!("m{m}.gquords"), sorted.len());
    }
    Ok(())
}

fn poset_example(r: &mut SuiteReport) -> Result<()> {
    let order = corpus::poset_order()?;
    let phi = corpus::poset_sigma_formula()?;
    let matrix = corpus::poset_matrix()?;
    let mut store = RelationStore::new(order.universe());
    store.insert(corpus::POSET_NAME, order.clone())?;
    let sigma = eval_pp(&phi, &store)?;

    let lat = lattice_ops_from_order(&order);
    r.add("order_is_partial_order", "six-element bounded poset", lat.as_ref().err().map(|e| e.to_string()));
    let expected = LatticeOps::NotLattice {
        pair: (corpus::A, corpus::B),
        missing: MissingBound::LeastUpper,
    };
    r.add(
        "order_is_not_lattice",
        "a and b have no least upper bound",
        match &lat {
            Ok(l) if *l == expected => None,
            Ok(LatticeOps::Lattice { .. }) => Some("order is a lattice".into()),
            Ok(other) => Some(format!("{other:?}")),
            Err(e) => Some(e.to_string()),
        },
    );
    let stored = corpus::poset_sigma()?;
    r.add(
        "sigma_matches_corpus",
        format!("{} tuples", sigma.len()),
        fail_if(sigma != stored, || format!("evaluated {} tuples, stored {}", sigma.len(), stored.len())),
    );
    r.add(
        "sigma_reflexive",
        "all constant tuples present",
        is_reflexive(&sigma).err().map(|a| format!("missing constant {a}")),
    );
    let models = models_matrix(&sigma, &matrix)?;
    r.add(
        "sigma_models_matrix",
        format!("{matrix:?}"),
        fail_if(!models, || "a row or column is not in sigma".into()),
    );
    let diagonal = matrix.diagonal();
    r.add(
        "diagonal_excluded",
        format!("{diagonal:?}"),
        fail_if(sigma.contains(&diagonal), || "diagonal is a member".into()),
    );
    let trans = is_transitive(&sigma);
    r.add(
        "sigma_not_transitive",
        "generalized transitivity fails",
        fail_if(trans.is_ok(), || "sigma is transitive".into()),
    );
    if let Err(w) = trans {
        r.note("transitivity_witness", format!("{w:?}"));
    }
    r.note("sigma.size", sigma.len());
    Ok(())
}

fn round_trip_failure(rho: &FiniteRelation) -> Result<Option<String>> {
    let dec = decompose(rho)?;
    if !classify(&dec.tau).is_wgpord {
        return Ok(Some(format!("{rho:?} factor {:?} is not a wgPord", dec.tau)));
    }
    let back = recompose(&dec.sigma, &dec.tau)?;
    Ok(fail_if(back != *rho, || format!("{rho:?} recomposes to {back:?}")))
}

fn decomposition(p: &SuiteParams, r: &mut SuiteReport) -> Result<()> {
    let narrowed = p.n.is_some() || p.m.is_some();
    let sizes: Vec<(usize, usize)> = if narrowed {
        vec![(p.n.unwrap_or(3), p.m.unwrap_or(2))]
    } else {
        vec![(2, 1), (2, 2), (2, 3), (3, 2), (4, 2), (3, 3)]
    };
    for &(n, m) in &sizes {
        let all = gquords(n, m)?;
        let failure = first_failure(&all, |rho| round_trip_failure(rho));
        r.add(format!("n{n}m{m}.round_trip"), format!("{} round trips", all.len()), failure);
        let distinct: HashSet<_> = all
            .par_iter()
            .filter_map(|rho| decompose(rho).ok())
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        r.add(
            format!("n{n}m{m}.decompose_injective"),
            format!("{} distinct decompositions", distinct.len()),
            fail_if(distinct.len() != all.len(), || format!("{} relations share a decomposition", all.len() - distinct.len())),
        );
    }

    let pair_sizes: Vec<(usize, usize)> = if narrowed {
        sizes.iter().copied().filter(|&(n, _)| n <= 3).collect()
    } else {
        (1..=3).cartesian_product(2..=3).collect()
    };
    for (n, m) in pair_sizes {
        let mut pairs = Vec::new();
        let mut taus: Vec<Option<Vec<FiniteRelation>>> = vec![None; n + 1];
        for sigma in EquivPartition::all(u(n)?) {
            let k = sigma.block_count();
            if taus[k].is_none() {
                taus[k] = Some(enumerate(Kind::WgPord, k, m, usize::MAX)?);
            }
            for tau in taus[k].as_ref().unwrap() {
                pairs.push((sigma.clone(), tau.clone()));
            }
        }
        let failure = first_failure(&pairs, |(sigma, tau)| {
            let rho = recompose(sigma, tau)?;
            let dec = decompose(&rho)?;
            Ok(fail_if(dec.sigma != *sigma || dec.tau != *tau, || {
                format!("{sigma:?} {tau:?} comes back as {:?} {:?}", dec.sigma, dec.tau)
            }))
        });
        r.add(format!("n{n}m{m}.pairs_round_trip"), format!("{} pairs", pairs.len()), failure);
        let failure = first_failure(&pairs, |(sigma, tau)| {
            let rho = recompose(sigma, tau)?;
            let lhs = classify(tau).is_gpord;
            let rhs = exchange_eq(&rho).to_relation() == bin_sym(&rho);
            Ok(fail_if(lhs != rhs, || format!("{sigma:?} {tau:?} gpord={lhs} exchange=bin_sym:{rhs}")))
        });
        r.add(
            format!("n{n}m{m}.gpord_factor_iff_exchange_is_bin_sym"),
            format!("{} pairs", pairs.len()),
            failure,
        );
    }

    if !narrowed && p.samples > 0 {
        let samples = sample_gquords(3, 3, p.samples, p.seed)?;
        let failure = first_failure(&samples, |rho| round_trip_failure(rho));
        let distinct: HashSet<&FiniteRelation> = samples.iter().collect();
        r.add(
            "n3m3.sampled_round_trip",
            format!("{} samples, {} distinct, seed {}", samples.len(), distinct.len(), p.seed),
            failure,
        );
    }
    Ok(())
}

fn closure_props(p: &SuiteParams, r: &mut SuiteReport) -> Result<()> {
    let mut inputs = Vec::new();
    for m in 1..=3 {
        inputs.extend(gquords(2, m)?);
    }
    let exhaustive = inputs.len();
    let sample_count = p.samples.min(200);
    inputs.extend(sample_gquords(3, 2, sample_count, p.seed)?);
    inputs.extend(sample_gquords(3, 3, sample_count, p.seed)?);
    let detail = format!("{exhaustive} gQuords at n=2, {} samples at n=3", 2 * sample_count);

    let not_gq = |what: &str, input: &FiniteRelation, out: &FiniteRelation| {
        fail_if(!is_gquord(out), || format!("{what} of {input:?} gives {out:?}"))
    };
    r.add(
        "permute_preserves",
        detail.clone(),
        first_failure(&inputs, |rho| {
            for pi in permutations(rho.arity()) {
                if let Some(w) = not_gq("permutation", rho, &permute(rho, &pi)?) {
                    return Ok(Some(w));
                }
            }
            Ok(None)
        }),
    );
    r.add(
        "fictitious_preserves",
        detail.clone(),
        first_failure(&inputs, |rho| Ok(not_gq("fictitious coordinate", rho, &add_fictitious(rho)?))),
    );
    r.add(
        "identify_preserves",
        detail.clone(),
        first_failure(&inputs, |rho| {
            if rho.arity() < 2 {
                return Ok(None);
            }
            Ok(not_gq("identification", rho, &identify_first_two(rho)?))
        }),
    );
    r.add(
        "intersect_preserves",
        detail.clone(),
        first_failure(&inputs, |rho| {
            for sigma in inputs.iter().filter(|s| s.same_shape(rho)) {
                if let Some(w) = not_gq("intersection", rho, &intersect(rho, sigma)?) {
                    return Ok(Some(format!("{w} with {sigma:?}")));
                }
            }
            Ok(None)
        }),
    );
    let mut small = inputs[..exhaustive].to_vec();
    small.extend(gquords(3, 2)?);
    r.add(
        "qfpp_closure_preserves",
        format!("closures of {} single gQuords", small.len()),
        first_failure(&small, |rho| {
            let members = qfpp_closure(std::slice::from_ref(rho), rho.universe(), rho.arity(), CLOSURE_BUDGET)?;
            Ok(members.iter().find(|x| !is_gquord(x)).map(|x| format!("{x:?} from {rho:?}")))
        }),
    );

    for m in 1..=3 {
        let rels = all_relations(2, m)?;
        let flags: Vec<bool> = rels.iter().map(is_gquord).collect();
        let pairs: Vec<(usize, usize)> = (0..rels.len()).cartesian_product(0..rels.len()).collect();
        let failure = first_failure(&pairs, |&(i, j)| {
            let prod = direct_product(&rels[i], &rels[j])?;
            let lhs = is_gquord(&prod);
            Ok(fail_if(lhs != (flags[i] && flags[j]), || {
                format!("{:?} x {:?} product gquord={lhs}", rels[i], rels[j])
            }))
        });
        r.add(format!("m{m}.product_iff_factors"), format!("{} pairs over 2x2", pairs.len()), failure);
    }

    for m in 1..=3 {
        let big = gquords(3, m)?;
        let target: BTreeSet<FiniteRelation> = gquords(2, m)?.into_iter().collect();
        let mut failure = None;
        for subset in (0..3).combinations(2) {
            let images: BTreeSet<FiniteRelation> =
                big.iter().map(|rho| restrict(rho, &subset)).collect::<Result<_>>()?;
            if images != target {
                let extra = images.symmetric_difference(&target).next().cloned();
                failure = Some(format!("subset {subset:?}: {extra:?}"));
                break;
            }
        }
        r.add(
            format!("m{m}.restrictions_onto"),
            format!("{} gQuords on 3 elements onto {} on 2", big.len(), target.len()),
            failure,
        );
    }

    let mut jobs = Vec::new();
    for n in 1..=4 {
        for psi in EquivPartition::all(u(n)?) {
            for m in 1..=3 {
                jobs.push((psi.clone(), m));
            }
        }
    }
    let total = std::sync::atomic::AtomicUsize::new(0);
    let failure = first_failure(&jobs, |(psi, m)| {
        let rel = psi.to_relation();
        let members = qfpp_closure(std::slice::from_ref(&rel), rel.universe(), *m, CLOSURE_BUDGET)?;
        total.fetch_add(members.len(), std::sync::atomic::Ordering::Relaxed);
        let end = end_monoid(std::slice::from_ref(&rel), rel.universe())?;
        for x in &members {
            if !is_gquord(x) || !invariant_under(x, &end)? {
                return Ok(Some(format!("{x:?} from {psi:?}")));
            }
        }
        Ok(None)
    });
    r.add(
        "equivalence_closures_invariant_under_end",
        format!("{} (partition, arity) jobs, n<=4, m<=3", jobs.len()),
        failure,
    );
    r.note("equivalence_closure_members", total.into_inner());

    let mut tolerances = Vec::new();
    for (n, m) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        tolerances.extend(all_relations(n, m)?.into_iter().filter(|x| classify(x).is_gtolerance));
    }
    r.add(
        "tolerance_closure_is_geq",
        format!("{} tolerances", tolerances.len()),
        first_failure(&tolerances, |t| {
            let c = transitive_closure(t);
            Ok(fail_if(!classify(&c).is_geq, || format!("{t:?} closes to {c:?}")))
        }),
    );
    Ok(())
}

fn factor_props(r: &mut SuiteReport) -> Result<()> {
    let mut cache = std::collections::HashMap::new();
    for (n, m) in (1..=3).cartesian_product(1..=3) {
        cache.insert((n, m), gquords(n, m)?);
    }
    let cached = |n: usize, m: usize| -> &Vec<FiniteRelation> { &cache[&(n, m)] };
    let mut inputs = Vec::new();
    for (n, m) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        inputs.extend(gquords(n, m)?);
    }
    let detail = format!("{} gQuords (n=2 m<=3, n=3 m=2) x all partitions", inputs.len());
    let parts = |rho: &FiniteRelation| EquivPartition::all(rho.universe());

    r.add(
        "block_factor_gquord_iff_below_bin_sym",
        detail.clone(),
        first_failure(&inputs, |rho| {
            let b2 = bin_sym(rho);
            for psi in parts(rho) {
                let lhs = psi.to_relation().is_subset(&b2);
                let rhs = is_gquord(&block_factor(rho, &psi)?);
                if lhs != rhs {
                    return Ok(Some(format!("{rho:?} {psi:?}")));
                }
            }
            Ok(None)
        }),
    );
    r.add(
        "factor_gquord_and_exact_iff_below_exchange",
        detail.clone(),
        first_failure(&inputs, |rho| {
            let e = exchange_eq(rho);
            for psi in parts(rho) {
                let lhs = psi.is_finer_than(&e);
                let f = factor(rho, &psi)?;
                let rhs = is_gquord(&f) && f == block_factor(rho, &psi)?;
                if lhs != rhs {
                    return Ok(Some(format!("{rho:?} {psi:?}")));
                }
            }
            Ok(None)
        }),
    );
    r.add(
        "quotients_are_trivial",
        detail.clone(),
        first_failure(&inputs, |rho| {
            let b2 = EquivPartition::from_relation(&bin_sym(rho))?;
            let q = b2.quotient_universe();
            let m = rho.arity();
            let first = bin_sym(&block_factor(rho, &b2)?) == FiniteRelation::constant_tuples(q, 2)?;
            let second = abs(&factor(rho, &b2)?) == FiniteRelation::constant_tuples(q, m)?;
            let e = exchange_eq(rho);
            let third = exchange_eq(&factor(rho, &e)?).is_discrete();
            Ok(fail_if(!(first && second && third), || {
                format!("{rho:?}: {first} {second} {third}")
            }))
        }),
    );

    let mut any = Vec::new();
    for (n, m) in [(2, 1), (2, 2), (3, 2)] {
        any.extend(all_relations(n, m)?);
    }
    any.extend(gquords(2, 3)?);
    let any_detail = format!("{} relations", any.len());
    r.add(
        "exchange_eq_is_largest_with_exchange_property",
        any_detail.clone(),
        first_failure(&any, |rho| {
            let e = exchange_eq(rho);
            if !has_exchange_property(&e, rho)? {
                return Ok(Some(format!("{rho:?} lacks exchange for {e:?}")));
            }
            for psi in parts(rho) {
                if has_exchange_property(&psi, rho)? && !psi.is_finer_than(&e) {
                    return Ok(Some(format!("{rho:?} {psi:?} not below {e:?}")));
                }
            }
            Ok(None)
        }),
    );
    r.add(
        "exchange_quotient_recovers_relation",
        any_detail.clone(),
        first_failure(&any, |rho| {
            let e = exchange_eq(rho);
            let f = factor(rho, &e)?;
            let back = preimage(&f, &SurjectiveMap::canonical(&e))?;
            Ok(fail_if(back != *rho || f != block_factor(rho, &e)?, || format!("{rho:?}")))
        }),
    );
    r.add(
        "exchange_within_bin_sym",
        detail.clone(),
        first_failure(&inputs, |rho| {
            Ok(fail_if(!exchange_eq(rho).to_relation().is_subset(&bin_sym(rho)), || format!("{rho:?}")))
        }),
    );
    let mut pairs = Vec::new();
    for (n, m) in [(2, 1), (2, 2)] {
        let rels = all_relations(n, m)?;
        pairs.extend(rels.iter().cloned().cartesian_product(rels.clone()));
    }
    for (n, m) in [(2, 3), (3, 2)] {
        let g = gquords(n, m)?;
        pairs.extend(g.iter().cloned().cartesian_product(g.clone()));
    }
    r.add(
        "exchange_of_intersection_contains_intersection",
        format!("{} pairs", pairs.len()),
        first_failure(&pairs, |(a, b)| {
            let lhs = exchange_eq(a).to_relation().bits().clone();
            let mut lhs = FiniteRelation::from_bits(a.universe(), 2, lhs);
            lhs.intersect_in_place(&exchange_eq(b).to_relation());
            let rhs = exchange_eq(&intersect(a, b)?).to_relation();
            Ok(fail_if(!lhs.is_subset(&rhs), || format!("{a:?} {b:?}")))
        }),
    );

    let mut hom_jobs = Vec::new();
    for (n, m) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)] {
        for k in 1..=n {
            for lambda in SurjectiveMap::all(n, k) {
                hom_jobs.push((lambda, m));
            }
        }
    }
    r.add(
        "homomorphic_images_and_preimages",
        format!("{} (map, arity) jobs", hom_jobs.len()),
        first_failure(&hom_jobs, |(lambda, m)| {
            let (n, k) = (lambda.source().size(), lambda.target().size());
            for rho in cached(n, *m) {
                let img = image(&rho, lambda)?;
                if preimage(&img, lambda)? == *rho && !is_gquord(&img) {
                    return Ok(Some(format!("{rho:?} under {:?}", lambda.as_slice())));
                }
            }
            for sigma in cached(k, *m) {
                let pre = preimage(sigma, lambda)?;
                if !is_gquord(&pre) || preimage(&image(&pre, lambda)?, lambda)? != pre {
                    return Ok(Some(format!("{sigma:?} pulled back along {:?}", lambda.as_slice())));
                }
            }
            Ok(None)
        }),
    );
    let mut sat_jobs = Vec::new();
    for (n, m) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        let rels = all_relations(n, m)?;
        for k in 1..=n {
            for lambda in SurjectiveMap::all(n, k) {
                sat_jobs.push((lambda, rels.clone()));
            }
        }
    }
    r.add(
        "saturation_iff_kernel_has_exchange",
        "all relations at n=2 m<=3 and n=3 m=2, all surjections",
        first_failure(&sat_jobs, |(lambda, rels)| {
            let kernel = lambda.kernel();
            for rho in rels {
                let lhs = preimage(&image(rho, lambda)?, lambda)? == *rho;
                if lhs != has_exchange_property(&kernel, rho)? {
                    return Ok(Some(format!("{rho:?} under {:?}", lambda.as_slice())));
                }
            }
            Ok(None)
        }),
    );
    r.add(
        "canonical_saturation_iff_exchange_is_bin_sym",
        detail.clone(),
        first_failure(&inputs, |rho| {
            let b2 = EquivPartition::from_relation(&bin_sym(rho))?;
            let lambda = SurjectiveMap::canonical(&b2);
            let tau = image(rho, &lambda)?;
            let i = exchange_eq(rho) == b2;
            let ii = preimage(&tau, &lambda)? == *rho;
            let iii = cached(rho.n(), rho.arity())
                .iter()
                .filter(|s| image(s, &lambda).is_ok_and(|x| x == tau))
                .all(|s| s.is_subset(rho));
            Ok(fail_if(i != ii || ii != iii, || format!("{rho:?}: {i} {ii} {iii}")))
        }),
    );
    let geqs: Vec<FiniteRelation> = inputs.iter().filter(|x| classify(x).is_geq).cloned().collect();
    r.add(
        "geq_exchange_equals_bin_sym",
        format!("{} gEqs", geqs.len()),
        first_failure(&geqs, |theta| {
            Ok(fail_if(exchange_eq(theta).to_relation() != bin_sym(theta), || format!("{theta:?}")))
        }),
    );
    r.add(
        "geq_block_factor_is_lift",
        format!("{} gEqs", geqs.len()),
        first_failure(&geqs, |theta| {
            for psi in parts(theta) {
                let lhs = block_factor(theta, &psi)?;
                let rhs = lift_relation(&block_factor(&bin_sym(theta), &psi)?, theta.arity())?;
                if lhs != rhs {
                    return Ok(Some(format!("{theta:?} {psi:?}")));
                }
            }
            Ok(None)
        }),
    );

    let sigma = corpus::nonmonotone_sigma()?;
    let rho = corpus::nonmonotone_rho()?;
    let es = exchange_eq(&sigma).to_relation();
    let er = exchange_eq(&rho).to_relation();
    let pinned = sigma.is_subset(&rho) && is_gquord(&sigma) && is_gquord(&rho) && !es.is_subset(&er);
    r.add(
        "exchange_not_monotone_pinned",
        format!("sigma {} tuples inside rho {} tuples", sigma.len(), rho.len()),
        fail_if(!pinned, || format!("sigma exchange {:?} rho exchange {:?}", exchange_eq(&sigma), exchange_eq(&rho))),
    );

    let mut ideal_sets = Vec::new();
    for (n, m) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        ideal_sets.push(gquords(n, m)?);
    }
    let ideal_pairs: Vec<(FiniteRelation, FiniteRelation)> = ideal_sets
        .iter()
        .flat_map(|g| {
            let gp: Vec<&FiniteRelation> = g.iter().filter(|x| classify(x).is_gpord).collect();
            g.iter()
                .cartesian_product(gp)
                .filter(|(s, p)| s.is_subset(p))
                .map(|(s, p)| (s.clone(), p.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    r.add(
        "gpords_form_order_ideal",
        format!("{} pairs below a gPord", ideal_pairs.len()),
        first_failure(&ideal_pairs, |(s, p)| {
            Ok(fail_if(!classify(s).is_gpord, || format!("{s:?} inside {p:?}")))
        }),
    );
    Ok(())
}

fn geq_iso(p: &SuiteParams, r: &mut SuiteReport) -> Result<()> {
    let sizes: Vec<usize> = match p.n {
        Some(n) => vec![n],
        None => (1..=4).collect(),
    };
    let arities: Vec<usize> = match p.m {
        Some(m) => vec![m],
        None => vec![2, 3],
    };
    let mut all_geqs = Vec::new();
    for &n in &sizes {
        for &m in &arities {
            let parts = EquivPartition::all(u(n)?);
            let geq = enumerate(Kind::GEq, n, m, usize::MAX)?;
            let lifts: Vec<FiniteRelation> = parts.iter().map(|psi| lift_partition(psi, m)).collect::<Result<_>>()?;
            let mut sorted = lifts.clone();
            sorted.sort();
            sorted.dedup();
            r.add(
                format!("n{n}m{m}.lift_is_bijection"),
                format!("{} partitions, {} gEqs", parts.len(), geq.len()),
                fail_if(sorted.len() != parts.len() || sorted != geq, || {
                    format!("{} distinct lifts vs {} gEqs", sorted.len(), geq.len())
                }),
            );
            let mut inverse = None;
            for (psi, lift) in parts.iter().zip(&lifts) {
                if EquivPartition::from_relation(&bin_sym(lift))? != *psi {
                    inverse = Some(format!("{psi:?}"));
                    break;
                }
            }
            for theta in &geq {
                if inverse.is_none() && lift_partition(&EquivPartition::from_relation(&bin_sym(theta))?, m)? != *theta {
                    inverse = Some(format!("{theta:?}"));
                }
            }
            r.add(format!("n{n}m{m}.bin_sym_inverts_lift"), "both compositions are identities", inverse);
            let mut monotone = None;
            for ((a, la), (b, lb)) in parts.iter().zip(&lifts).cartesian_product(parts.iter().zip(&lifts)) {
                if a.is_finer_than(b) != la.is_subset(lb) {
                    monotone = Some(format!("{a:?} {b:?}"));
                    break;
                }
            }
            r.add(
                format!("n{n}m{m}.inclusion_preserved"),
                format!("{} pairs", parts.len() * parts.len()),
                monotone,
            );
            r.note(format!("n{n}m{m}.geqs"), geq.len());
            all_geqs.extend(geq);
        }
    }

    let mut inputs = Vec::new();
    for m in 1..=3 {
        inputs.extend(gquords(2, m)?);
    }
    inputs.extend(sample_gquords(3, 3, p.samples.min(1000), p.seed)?);
    r.add(
        "abs_of_gquord_is_geq_and_equals_tos",
        format!("{} gQuords", inputs.len()),
        first_failure(&inputs, |rho| {
            let a = abs(rho);
            Ok(fail_if(!classify(&a).is_geq || tos(rho) != a, || format!("{rho:?}")))
        }),
    );
    r.add(
        "geq_contains_pair_cubes",
        format!("{} gEqs", all_geqs.len()),
        first_failure(&all_geqs, |theta| {
            let m = theta.arity();
            for t in theta.tuples() {
                for (i, j) in (0..m).cartesian_product(0..m) {
                    let pair = [t[i], t[j]];
                    let missing = (0..m).map(|_| pair).multi_cartesian_product().find(|x| !theta.contains(x));
                    if let Some(x) = missing {
                        return Ok(Some(format!("{theta:?} lacks {x:?}")));
                    }
                }
            }
            Ok(None)
        }),
    );
    r.add(
        "geq_determined_by_bin_sym",
        format!("{} gEqs", all_geqs.len()),
        first_failure(&all_geqs, |theta| {
            let b2 = bin_sym(theta);
            let m = theta.arity();
            let rebuilt = FiniteRelation::from_predicate(theta.universe(), m, |t| {
                (0..m).cartesian_product(0..m).all(|(i, j)| b2.contains(&[t[i], t[j]]))
            })?;
            Ok(fail_if(rebuilt != *theta || abs(theta) != *theta, || format!("{theta:?}")))
        }),
    );
    let mut reflexive = Vec::new();
    for (n, m) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        reflexive.extend(all_relations(n, m)?.into_iter().filter(|x| is_reflexive(x).is_ok()));
    }
    r.add(
        "abs_is_lift_of_bin_sym",
        format!("{} reflexive relations", reflexive.len()),
        first_failure(&reflexive, |rho| {
            Ok(fail_if(abs(rho) != lift_relation(&bin_sym(rho), rho.arity())?, || format!("{rho:?}")))
        }),
    );
    let mut pairs = Vec::new();
    for (n, m) in [(2, 1), (2, 2)] {
        let rels = all_relations(n, m)?;
        pairs.extend(rels.iter().cloned().cartesian_product(rels.clone()));
    }
    let g = gquords(2, 3)?;
    pairs.extend(g.iter().cloned().cartesian_product(g.clone()));
    r.add(
        "symmetric_parts_commute_with_intersection",
        format!("{} pairs", pairs.len()),
        first_failure(&pairs, |(a, b)| {
            let both = intersect(a, b)?;
            let ok = tos(&both) == intersect(&tos(a), &tos(b))?
                && abs(&both) == intersect(&abs(a), &abs(b))?
                && bin_sym(&both) == intersect(&bin_sym(a), &bin_sym(b))?
                && (!a.is_subset(b) || bin_sym(a).is_subset(&bin_sym(b)));
            Ok(fail_if(!ok, || format!("{a:?} {b:?}")))
        }),
    );
    Ok(())
}

fn all_binary_reports(n: usize) -> Result<Vec<(FiniteOperation, RectangularReport)>> {
    all_operations(n, 2)?
        .into_par_iter()
        .map(|f| rectangular_theorem_check(&f).map(|rep| (f, rep)))
        .collect()
}

fn rectangular(p: &SuiteParams, r: &mut SuiteReport) -> Result<()> {
    let sizes: Vec<usize> = match p.n {
        Some(n) => vec![n],
        None => vec![2, 3],
    };
    for n in sizes {
        let reports = all_binary_reports(n)?;
        let entropic: Vec<_> = reports.iter().filter(|(_, x)| x.entropic).collect();
        let find = |pred: &dyn Fn(&RectangularReport) -> bool| {
            entropic.iter().find(|(_, x)| !pred(x)).map(|(f, x)| format!("{f:?} {x:?}"))
        };
        r.add(
            format!("n{n}.absorption_iff_transitive_graph"),
            format!("{} entropic of {} operations", entropic.len(), reports.len()),
            find(&|x| x.transitivity_equivalence() == Some(true)),
        );
        let idem = entropic.iter().filter(|(_, x)| x.idempotent).count();
        r.add(
            format!("n{n}.idempotent_absorption_iff_gquord_graph"),
            format!("{idem} idempotent entropic operations"),
            find(&|x| !x.idempotent || x.gquord_equivalence() == Some(true)),
        );
        r.add(
            format!("n{n}.idempotent_absorptive_graph_is_gpord"),
            format!("{} idempotent absorptive", entropic.iter().filter(|(_, x)| x.idempotent && x.absorptive).count()),
            find(&|x| x.partial_order_expectation()),
        );
        let literal: Vec<_> = entropic.iter().filter(|(_, x)| x.gquord_equivalence() == Some(false)).collect();
        r.note(format!("n{n}.entropic"), entropic.len());
        r.note(
            format!("n{n}.gquord_form_without_idempotence_fails"),
            format!(
                "{} operations, {} of them idempotent",
                literal.len(),
                literal.iter().filter(|(_, x)| x.idempotent).count()
            ),
        );
        if let Some((f, _)) = literal.first() {
            r.note(format!("n{n}.gquord_form_example"), format!("{f:?}"));
        }
    }
    let band = rect_band(2)?;
    let rep = rectangular_theorem_check(&band)?;
    r.add(
        "band_graph_is_gpord",
        "standard rectangular band on 2x2",
        fail_if(
            !(rep.entropic && rep.idempotent && rep.absorptive && rep.graph_gpord) || band != corpus::rect_band()?,
            || format!("{rep:?}"),
        ),
    );
    Ok(())
}

fn xi(r: &mut SuiteReport) -> Result<()> {
    let mut rels = Vec::new();
    for m in 1..=3 {
        rels.extend(gquords(2, m)?);
    }
    let mut ops = Vec::new();
    for k in 1..=3 {
        ops.extend(all_operations(2, k)?);
    }
    r.add(
        "xi_on_gquords",
        format!("{} gQuords x {} operations", rels.len(), ops.len()),
        first_failure(&rels, |rho| {
            for f in &ops {
                if !xi_holds(f, rho)? {
                    return Ok(Some(format!("{f:?} {rho:?}")));
                }
            }
            Ok(None)
        }),
    );

    let mut others: Vec<FiniteRelation> = Vec::new();
    for m in 1..=2 {
        others.extend(all_relations(2, m)?.into_iter().filter(|x| !is_gquord(x)));
    }
    let binary_ops: Vec<FiniteOperation> = ops.iter().filter(|f| f.arity() <= 2).cloned().collect();
    let failing: Vec<(FiniteRelation, FiniteOperation)> = others
        .par_iter()
        .filter_map(|rho| {
            binary_ops
                .iter()
                .find(|f| !xi_holds(f, rho).unwrap_or(true))
                .map(|f| (rho.clone(), f.clone()))
        })
        .collect();
    r.note(
        "xi_fails_off_gquords",
        format!("{} of {} non-gQuords at n=2 m<=2", failing.len(), others.len()),
    );
    if let Some((rho, f)) = failing.first() {
        r.note("xi_failure_example", format!("{f:?} {rho:?}"));
    }

    let mut binaries = Vec::new();
    for n in 1..=3 {
        binaries.extend(all_relations(n, 2)?);
    }
    r.add(
        "unary_polymorphisms_are_endomorphisms",
        format!("{} binary relations, n<=3", binaries.len()),
        first_failure(&binaries, |rho| {
            let rels = std::slice::from_ref(rho);
            let pol = pol_bounded(rels, rho.universe(), 1, CLOSURE_BUDGET)?;
            let end = end_monoid(rels, rho.universe())?;
            let a: BTreeSet<&FiniteOperation> = pol.ops().iter().collect();
            let b: BTreeSet<&FiniteOperation> = end.ops().iter().collect();
            Ok(fail_if(a != b, || format!("{rho:?}: {} vs {}", a.len(), b.len())))
        }),
    );
    Ok(())
}

fn candidate_search(p: &SuiteParams, r: &mut SuiteReport) -> Result<()> {
    let config = PpSweepConfig {
        free: p.m.unwrap_or(PpSweepConfig::default().free),
        ..PpSweepConfig::default()
    };
    let lattices = [
        ("chain2", chain(2)?),
        ("chain3", chain(3)?),
        ("chain4", chain(4)?),
        ("square", square_lattice()),
    ];
    for (name, rho) in &lattices {
        let out = pp_sweep(rho, config)?;
        let first = out
            .outside_not_gquord
            .iter()
            .chain(&out.candidates)
            .next()
            .map(|(phi, rel)| format!("{} gives {rel:?}", serialize_formula(phi)));
        r.add(
            format!("{name}.sweep_inside_closure"),
            format!("{} formulas, {} distinct outputs", out.formulas, out.distinct),
            first,
        );
        for m in 2..=3 {
            if rho.n() > 3 && m > 2 {
                continue;
            }
            match gpord_sweep(rho, m, CLOSURE_BUDGET) {
                Ok(s) => r.note(
                    format!("{name}.m{m}.gpord_sweep"),
                    format!("{} members, {} nontrivial, {} not gPord", s.checked, s.nontrivial, s.violations.len()),
                ),
                Err(e) => r.note(format!("{name}.m{m}.gpord_sweep"), format!("skipped: {e}")),
            }
        }
    }

    let order = corpus::poset_order()?;
    let sigma = corpus::poset_sigma()?;
    let out = pp_sweep(&order, config)?;
    let found = out.outside_not_gquord.iter().any(|(_, rel)| *rel == sigma);
    r.add(
        "poset.sweep_leaves_gquords",
        format!("{} formulas, {} distinct, {} outside closure", out.formulas, out.distinct, out.outside_closure()),
        fail_if(!(found || config.free != 4), || "sigma not among outputs outside the gQuords".into()),
    );
    r.note("poset.outside_not_gquord", out.outside_not_gquord.len());
    r.note("poset.candidates", out.candidates.len());
    for (i, (phi, rel)) in out.candidates.iter().enumerate() {
        r.note(format!("poset.candidate.{i}"), format!("{} gives {rel:?}", serialize_formula(phi)));
    }
    Ok(())
}
