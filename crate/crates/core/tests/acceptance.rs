//! Acceptance criteria. Each criterion prints one `[PASS]`/`[FAIL]` line.
//! Library results are compared against small brute-force oracles written
//! here from the definitions.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use gq_core::analysis::{classify, exchange_eq, is_gquord, is_transitive};
use gq_core::construct::{decompose, recompose};
use gq_core::corpus;
use gq_core::enumerate::{enumerate, Kind};
use gq_core::formula::{eval_pp, RelationStore};
use gq_core::ops::{check_identity, graph_of, preserves, translations, xi_holds, FiniteOperation, Identity};
use gq_core::suites::{all_operations, all_relations, run_suite, Suite, SuiteParams, SuiteReport};
use gq_core::{EquivPartition, FiniteRelation, Universe};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(s: Suite) -> Result<SuiteReport, String> {
    let r = run_suite(s, &SuiteParams::default()).map_err(|e| e.to_string())?;
    if let Some(c) = r.checks.iter().find(|c| !c.passed) {
        return Err(format!("{}: {} ({})", c.name, c.detail, c.witness.clone().unwrap_or_default()));
    }
    Ok(r)
}

fn u(n: usize) -> Universe {
    Universe::new(n).unwrap()
}

fn members(rel: &FiniteRelation) -> Vec<Vec<usize>> {
    rel.tuples().collect()
}

fn reflexive_oracle(rel: &FiniteRelation) -> bool {
    (0..rel.n()).all(|a| rel.contains(&vec![a; rel.arity()]))
}

/// Pick `m` member rows; if every column is a member the diagonal must be.
fn transitive_oracle(rel: &FiniteRelation) -> bool {
    let m = rel.arity();
    let rows = members(rel);
    let mut pick = vec![0usize; m];
    if rows.is_empty() {
        return true;
    }
    loop {
        let cols_ok = (0..m).all(|j| {
            let col: Vec<usize> = (0..m).map(|i| rows[pick[i]][j]).collect();
            rel.contains(&col)
        });
        if cols_ok {
            let diag: Vec<usize> = (0..m).map(|i| rows[pick[i]][i]).collect();
            if !rel.contains(&diag) {
                return false;
            }
        }
        let mut i = 0;
        loop {
            if i == m {
                return true;
            }
            pick[i] += 1;
            if pick[i] < rows.len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

fn gquord_oracle(rel: &FiniteRelation) -> bool {
    reflexive_oracle(rel) && transitive_oracle(rel)
}

fn tuples_of(n: usize, len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|t| (0..n).map(move |x| [t.clone(), vec![x]].concat()))
            .collect()
    })
}

/// `f` applied coordinatewise to every choice of `k` members stays inside.
fn preserves_oracle(f: &FiniteOperation, rel: &FiniteRelation) -> bool {
    let rows = members(rel);
    let k = f.arity();
    tuples_of(rows.len().max(1), k).into_iter().all(|pick| {
        if rows.is_empty() {
            return true;
        }
        let out: Vec<usize> = (0..rel.arity())
            .map(|j| f.apply(&pick.iter().map(|&r| rows[r][j]).collect::<Vec<_>>()).unwrap())
            .collect();
        rel.contains(&out)
    })
}

fn poset_leq(x: usize, y: usize) -> bool {
    x == y || x == 0 || y == 5 || ((x == 1 || x == 2) && (y == 3 || y == 4))
}

fn ac1() -> Outcome {
    let (a, b, c, d, zero, one) = (1, 2, 3, 4, 0, 5);
    let order = corpus::poset_order().map_err(|e| e.to_string())?;
    let direct = FiniteRelation::from_predicate(u(6), 2, |p| poset_leq(p[0], p[1])).unwrap();
    ensure(order == direct, || "stored order differs from the element map".into())?;
    let mut store = RelationStore::new(u(6));
    store.insert(corpus::POSET_NAME, order).unwrap();
    let sigma = eval_pp(&corpus::poset_sigma_formula().unwrap(), &store).map_err(|e| e.to_string())?;
    let oracle = FiniteRelation::from_predicate(u(6), 4, |x| {
        (0..6).any(|y| poset_leq(x[0], y) && poset_leq(x[1], y) && poset_leq(y, x[2]) && poset_leq(y, x[3]))
    })
    .unwrap();
    ensure(sigma == oracle, || "evaluated formula differs from the definition".into())?;
    ensure(reflexive_oracle(&sigma), || "(a) not reflexive".into())?;
    let matrix = [[a, zero, c, d], [zero, b, c, d], [c, c, c, one], [d, d, one, d]];
    for i in 0..4 {
        let col: Vec<usize> = (0..4).map(|r| matrix[r][i]).collect();
        ensure(sigma.contains(&matrix[i]) && sigma.contains(&col), || format!("(b) row/column {i} missing"))?;
    }
    ensure(!sigma.contains(&[a, b, c, d]), || "(c) diagonal present".into())?;
    ensure(is_transitive(&sigma).is_err(), || "is_transitive reported true".into())?;
    suite(Suite::PosetExample)?;
    Ok(format!("{} tuples", sigma.len()))
}

fn ac2() -> Outcome {
    let expected = [1, 4, 29, 355];
    let mut counts = Vec::new();
    for m in 1..=4 {
        let rels = all_relations(2, m).map_err(|e| e.to_string())?;
        let mut gq = BTreeSet::new();
        let mut inv = BTreeSet::new();
        for r in &rels {
            if is_gquord(r) {
                if m <= 3 {
                    ensure(gquord_oracle(r), || format!("library and oracle disagree on {r:?}"))?;
                }
                gq.insert(r.clone());
            } else if m <= 3 {
                ensure(!gquord_oracle(r), || format!("library and oracle disagree on {r:?}"))?;
            }
            let rows = members(r);
            let closed = |g: fn(usize, usize) -> usize| {
                rows.iter().all(|x| {
                    rows.iter()
                        .all(|y| r.contains(&x.iter().zip(y).map(|(&p, &q)| g(p, q)).collect::<Vec<_>>()))
                })
            };
            let consts = r.contains(&vec![0; m]) && r.contains(&vec![1; m]);
            if !rows.is_empty() && consts && closed(|p, q| p & q) && closed(|p, q| p | q) {
                inv.insert(r.clone());
            }
        }
        ensure(gq == inv, || format!("m={m}: {} gQuords vs {} nonempty invariants", gq.len(), inv.len()))?;
        ensure(gq.len() == expected[m - 1], || format!("m={m}: {} gQuords", gq.len()))?;
        counts.push(gq.len());
    }
    suite(Suite::Boolean)?;
    Ok(format!("m=1..4 counts {counts:?}"))
}

fn preorders_oracle(n: usize) -> Vec<FiniteRelation> {
    all_relations(n, 2)
        .unwrap()
        .into_iter()
        .filter(|r| {
            (0..n).all(|a| r.contains(&[a, a]))
                && (0..n).all(|a| {
                    (0..n).all(|b| (0..n).all(|c| !(r.contains(&[a, b]) && r.contains(&[b, c])) || r.contains(&[a, c])))
                })
        })
        .collect()
}

fn ac3() -> Outcome {
    let mut counts = Vec::new();
    for n in [3, 4] {
        let pre = preorders_oracle(n);
        for r in &pre {
            let dec = decompose(r).map_err(|e| e.to_string())?;
            let back = recompose(&dec.sigma, &dec.tau).map_err(|e| e.to_string())?;
            ensure(back == *r, || format!("round trip fails on {r:?}"))?;
        }
        counts.push(pre.len());
    }
    ensure(counts == [29, 355], || format!("preorder counts {counts:?}"))?;
    let r = suite(Suite::Decomposition)?;
    Ok(format!(
        "preorders n=3: {}, n=4: {}; {} checks incl. {}",
        counts[0],
        counts[1],
        r.checks.len(),
        r.check("n3m3.sampled_round_trip").map_or(String::new(), |c| c.detail.clone())
    ))
}

/// Set partitions counted by restricted growth strings.
fn bell_oracle(n: usize) -> usize {
    fn go(pos: usize, n: usize, max: usize) -> usize {
        if pos == n {
            return 1;
        }
        (0..=max + 1).map(|b| go(pos + 1, n, max.max(b))).sum()
    }
    if n == 0 {
        1
    } else {
        go(1, n, 0)
    }
}

fn ac4() -> Outcome {
    for n in 1..=4 {
        for m in 2..=3 {
            let geq = enumerate(Kind::GEq, n, m, usize::MAX).map_err(|e| e.to_string())?;
            ensure(geq.len() == bell_oracle(n), || format!("n={n} m={m}: {} gEqs", geq.len()))?;
            ensure(geq.iter().all(|t| classify(t).is_geq), || "non-gEq listed".into())?;
        }
    }
    suite(Suite::GeqIso)?;
    Ok(format!("|gEq(4)| = {}", bell_oracle(4)))
}

fn ac5() -> Outcome {
    let r = suite(Suite::ClosureProps)?;
    Ok(format!("{} checks", r.checks.len()))
}

/// Largest partition with the exchange property, found by trying all.
fn exchange_oracle(rel: &FiniteRelation) -> EquivPartition {
    let m = rel.arity();
    let has = |psi: &EquivPartition| {
        rel.tuples().all(|t| {
            tuples_of(rel.n(), m)
                .into_iter()
                .filter(|s| (0..m).all(|i| psi.related(t[i], s[i])))
                .all(|s| rel.contains(&s))
        })
    };
    let good: Vec<EquivPartition> = EquivPartition::all(rel.universe()).into_iter().filter(has).collect();
    good.iter()
        .find(|p| good.iter().all(|q| q.is_finer_than(p)))
        .cloned()
        .expect("exchange partitions have a largest member")
}

fn ac6() -> Outcome {
    let sigma = corpus::nonmonotone_sigma().unwrap();
    let rho = corpus::nonmonotone_rho().unwrap();
    ensure(gquord_oracle(&sigma) && gquord_oracle(&rho) && sigma.is_subset(&rho), || {
        "pinned pair is not two nested gQuords".into()
    })?;
    let (es, er) = (exchange_oracle(&sigma), exchange_oracle(&rho));
    ensure(es == exchange_eq(&sigma) && er == exchange_eq(&rho), || "exchange equivalence disagrees with oracle".into())?;
    ensure(!es.is_finer_than(&er), || "monotone on the pinned pair".into())?;
    let r = suite(Suite::FactorProps)?;
    Ok(format!("{} checks; pinned pair {:?} vs {:?}", r.checks.len(), es, er))
}

fn ac7() -> Outcome {
    let mut rels = Vec::new();
    for m in 1..=3 {
        rels.extend(enumerate(Kind::GQuord, 2, m, usize::MAX).unwrap());
    }
    let mut ops = Vec::new();
    for k in 1..=3 {
        ops.extend(all_operations(2, k).unwrap());
    }
    ensure(ops.len() == 4 + 16 + 256, || format!("{} operations", ops.len()))?;
    for rho in &rels {
        ensure(gquord_oracle(rho), || format!("{rho:?} is not a gQuord"))?;
        for f in &ops {
            let direct = preserves_oracle(f, rho);
            ensure(direct == preserves(f, rho).unwrap().is_ok(), || format!("preservation mismatch {f:?} {rho:?}"))?;
            let via = translations(f).iter().all(|t| preserves_oracle(t, rho));
            ensure(direct == via, || format!("{f:?} {rho:?}"))?;
            ensure(xi_holds(f, rho).unwrap(), || format!("xi_holds false for {f:?} {rho:?}"))?;
        }
    }
    suite(Suite::Xi)?;
    Ok(format!("{} gQuords x {} operations", rels.len(), ops.len()))
}

fn ac8() -> Outcome {
    let mut literal_failures = 0;
    let mut entropic_counts = Vec::new();
    for n in 2..=3 {
        let mut entropic = 0;
        for f in all_operations(n, 2).unwrap() {
            let g = |x: usize, y: usize| f.apply(&[x, y]).unwrap();
            let elems: Vec<usize> = (0..n).collect();
            let is_entropic = tuples_of(n, 4)
                .iter()
                .all(|v| g(g(v[0], v[1]), g(v[2], v[3])) == g(g(v[0], v[2]), g(v[1], v[3])));
            if !is_entropic {
                continue;
            }
            entropic += 1;
            let ab = tuples_of(n, 4)
                .iter()
                .all(|v| g(g(v[0], v[1]), g(v[2], v[3])) == g(v[0], v[3]));
            let idem = elems.iter().all(|&x| g(x, x) == x);
            ensure(ab == check_identity(&f, None, Identity::Absorb).unwrap().is_none(), || format!("AB mismatch {f:?}"))?;
            let graph = graph_of(&f);
            let trans = transitive_oracle(&graph);
            ensure(ab == trans, || format!("AB={ab} but graph transitive={trans} for {f:?}"))?;
            let gq = reflexive_oracle(&graph) && trans;
            ensure(reflexive_oracle(&graph) == idem, || format!("graph reflexivity vs idempotence {f:?}"))?;
            if ab != gq {
                ensure(!idem, || format!("idempotent {f:?} breaks AB <=> gQuord"))?;
                literal_failures += 1;
            }
            if idem && ab {
                ensure(classify(&graph).is_gpord, || format!("graph of {f:?} not a gPord"))?;
            }
        }
        entropic_counts.push(entropic);
    }
    let band = gq_core::ops::rect_band(2).unwrap();
    ensure(classify(&graph_of(&band)).is_gpord, || "band graph is not a gPord".into())?;
    suite(Suite::Rectangular)?;
    Ok(format!(
        "entropic ops n=2: {}, n=3: {}; AB <=> transitive graph throughout; gQuord form fails only on {literal_failures} non-idempotent ops",
        entropic_counts[0], entropic_counts[1]
    ))
}

fn ac9(report: &SuiteReport) -> Outcome {
    for name in ["chain2", "chain3", "chain4", "square"] {
        let c = report
            .check(&format!("{name}.sweep_inside_closure"))
            .ok_or_else(|| format!("{name} missing"))?;
        ensure(c.passed, || format!("{name}: {}", c.witness.clone().unwrap_or_default()))?;
    }
    let poset = report.check("poset.sweep_leaves_gquords").ok_or("poset check missing")?;
    ensure(poset.passed, || poset.witness.clone().unwrap_or_default())?;
    let sigma = corpus::poset_sigma().unwrap();
    ensure(!gquord_oracle(&sigma), || "sigma passes the transitivity oracle".into())?;
    Ok(format!("lattices empty; poset {}", poset.detail))
}

fn ac10(report: &SuiteReport) -> Outcome {
    let kv = report.to_kv();
    let lines: Vec<&str> = kv.lines().collect();
    ensure(lines.iter().all(|l| l.split_once('=').is_some_and(|(k, _)| !k.is_empty())), || {
        "malformed report line".into()
    })?;
    ensure(matches!(lines.last(), Some(&"RESULT=PASS") | Some(&"RESULT=FAIL")), || "missing RESULT line".into())?;
    let count: usize = report
        .info_value("poset.candidates")
        .ok_or("candidate count missing")?
        .parse()
        .map_err(|_| "candidate count not a number".to_string())?;
    let listed = lines.iter().filter(|l| l.starts_with("info.poset.candidate.")).count();
    ensure(listed == count, || format!("{count} candidates but {listed} listed"))?;
    Ok(format!("{count} candidates"))
}

fn run(id: usize, desc: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    match outcome {
        Ok(detail) => {
            println!("[PASS] AC-{id} {desc} ({detail})");
            true
        }
        Err(why) => {
            println!("[FAIL] AC-{id} {desc}: {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run(1, "six-element poset formula: reflexive, models matrix, diagonal excluded", ac1);
    ok &= run(2, "Boolean gQuords equal nonempty invariants of meet, join and constants, m=1..4", ac2);
    ok &= run(3, "decomposition round trips", ac3);
    ok &= run(4, "equivalences and gEqs correspond by lifting, n<=4, m=2,3", ac4);
    ok &= run(5, "closure properties of constructions", ac5);
    ok &= run(6, "factor relation properties and pinned non-monotone pair", ac6);
    ok &= run(7, "translations decide preservation of gQuords", ac7);
    ok &= run(8, "entropic binary operations: absorption and graphs", ac8);
    let search = catch_unwind(|| run_suite(Suite::CandidateSearch, &SuiteParams::default()));
    match search {
        Ok(Ok(report)) => {
            ok &= run(9, "bounded pp sweep: lattices stay in closure, poset leaves gQuords", || ac9(&report));
            ok &= run(10, "candidate harness on the six-element poset", || ac10(&report));
        }
        other => {
            let why = match other {
                Ok(Err(e)) => e.to_string(),
                _ => "panic".into(),
            };
            println!("[FAIL] AC-9 bounded pp sweep: {why}");
            println!("[FAIL] AC-10 candidate harness: {why}");
            ok = false;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
