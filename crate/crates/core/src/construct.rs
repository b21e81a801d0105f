//! Coordinate operations, products, restrictions, images under surjections,
//! factor relations and the decomposition into an exchange equivalence and
//! a weak generalized partial order.

use crate::analysis::{classify, exchange_eq, Property};
use crate::error::{GqError, Result};
use crate::maps::{IndexMap, SurjectiveMap};
use crate::partition::EquivPartition;
use crate::relation::{checked_pow, decode_into, FiniteRelation, Universe};

/// `ρ^π = {(a_π(0),…,a_π(m-1)) : a ∈ ρ}`.
pub fn permute(rel: &FiniteRelation, pi: &IndexMap) -> Result<FiniteRelation> {
    if pi.source_arity() != rel.arity() || !pi.is_bijection() {
        return Err(GqError::InvalidMap(format!(
            "{:?} is not a permutation of {} positions",
            pi.as_slice(),
            rel.arity()
        )));
    }
    let m = rel.arity();
    let mut out = FiniteRelation::empty(rel.universe(), m)?;
    let mut image = vec![0; m];
    for t in rel.tuples() {
        for (i, slot) in image.iter_mut().enumerate() {
            *slot = t[pi.get(i)];
        }
        out.insert(&image)?;
    }
    Ok(out)
}

/// `∇ρ`: a fictitious last coordinate.
pub fn add_fictitious(rel: &FiniteRelation) -> Result<FiniteRelation> {
    let n = rel.n();
    let mut out = FiniteRelation::empty(rel.universe(), rel.arity() + 1)?;
    for idx in rel.indices() {
        for x in 0..n {
            out.insert_index(idx * n + x);
        }
    }
    Ok(out)
}

/// `Δρ = {(a_1,…,a_{m-1}) : (a_1,a_1,a_2,…,a_{m-1}) ∈ ρ}`.
pub fn identify_first_two(rel: &FiniteRelation) -> Result<FiniteRelation> {
    let m = rel.arity();
    if m < 2 {
        return Err(GqError::ArityMismatch {
            expected: 2,
            actual: m,
        });
    }
    let mut long = vec![0; m];
    FiniteRelation::from_predicate(rel.universe(), m - 1, |t| {
        long[0] = t[0];
        long[1..].copy_from_slice(t);
        rel.contains(&long)
    })
}

pub fn intersect(rho: &FiniteRelation, sigma: &FiniteRelation) -> Result<FiniteRelation> {
    rho.check_shape(sigma)?;
    let mut out = rho.clone();
    out.intersect_in_place(sigma);
    Ok(out)
}

/// `ρ1 ⊗ ρ2` over `A1 × A2`, with the pair `(a,b)` encoded as `a·n2 + b`.
pub fn direct_product(rho1: &FiniteRelation, rho2: &FiniteRelation) -> Result<FiniteRelation> {
    let m = rho1.arity();
    if rho2.arity() != m {
        return Err(GqError::ArityMismatch {
            expected: m,
            actual: rho2.arity(),
        });
    }
    let n2 = rho2.n();
    let universe = Universe::new(rho1.n() * n2)?;
    let mut out = FiniteRelation::empty(universe, m)?;
    let mut pair = vec![0; m];
    for a in rho1.tuples() {
        for b in rho2.tuples() {
            for i in 0..m {
                pair[i] = a[i] * n2 + b[i];
            }
            out.insert(&pair)?;
        }
    }
    Ok(out)
}

/// `ρ ∩ B^m`, re-indexed over `B` with the order-preserving renaming
/// (the `k`-th smallest element of `B` becomes `k`).
pub fn restrict(rel: &FiniteRelation, subset: &[usize]) -> Result<FiniteRelation> {
    let mut b: Vec<usize> = subset.to_vec();
    b.sort_unstable();
    b.dedup();
    for &x in &b {
        rel.universe().check(x)?;
    }
    let universe = Universe::new(b.len())
        .map_err(|_| GqError::Invalid("restriction to the empty set".into()))?;
    let mut orig = vec![0; rel.arity()];
    FiniteRelation::from_predicate(universe, rel.arity(), |t| {
        for (slot, &k) in orig.iter_mut().zip(t) {
            *slot = b[k];
        }
        rel.contains(&orig)
    })
}

fn check_source(rel: &FiniteRelation, lambda: &SurjectiveMap) -> Result<()> {
    if lambda.source() != rel.universe() {
        return Err(GqError::UniverseMismatch {
            expected: rel.n(),
            actual: lambda.source().size(),
        });
    }
    Ok(())
}

/// `λ(ρ) = {(λa_1,…,λa_m) : a ∈ ρ}`.
pub fn image(rel: &FiniteRelation, lambda: &SurjectiveMap) -> Result<FiniteRelation> {
    check_source(rel, lambda)?;
    let mut out = FiniteRelation::empty(lambda.target(), rel.arity())?;
    let mut t = vec![0; rel.arity()];
    for idx in rel.indices() {
        decode_into(idx, rel.n(), &mut t);
        for x in t.iter_mut() {
            *x = lambda.apply(*x);
        }
        out.insert(&t)?;
    }
    Ok(out)
}

/// `λ⁻¹(σ) = {a : (λa_1,…,λa_m) ∈ σ}`.
pub fn preimage(sigma: &FiniteRelation, lambda: &SurjectiveMap) -> Result<FiniteRelation> {
    if lambda.target() != sigma.universe() {
        return Err(GqError::UniverseMismatch {
            expected: sigma.n(),
            actual: lambda.target().size(),
        });
    }
    let mut mapped = vec![0; sigma.arity()];
    FiniteRelation::from_predicate(lambda.source(), sigma.arity(), |t| {
        for (slot, &x) in mapped.iter_mut().zip(t) {
            *slot = lambda.apply(x);
        }
        sigma.contains(&mapped)
    })
}

fn check_partition(rel: &FiniteRelation, psi: &EquivPartition) -> Result<()> {
    if psi.universe() != rel.universe() {
        return Err(GqError::UniverseMismatch {
            expected: rel.n(),
            actual: psi.universe().size(),
        });
    }
    Ok(())
}

/// Whether `[a_1]_ψ × … × [a_m]_ψ ⊆ ρ` for every member `a`.
pub fn has_exchange_property(psi: &EquivPartition, rel: &FiniteRelation) -> Result<bool> {
    check_partition(rel, psi)?;
    let blocks = psi.blocks();
    let m = rel.arity();
    let mut choice = vec![0; m];
    let mut t = vec![0; m];
    for a in rel.tuples() {
        let sides: Vec<&Vec<usize>> = a.iter().map(|&x| &blocks[psi.class_of(x)]).collect();
        let total: usize = sides.iter().map(|s| s.len()).product();
        for code in 0..total {
            let mut rest = code;
            for i in (0..m).rev() {
                choice[i] = rest % sides[i].len();
                rest /= sides[i].len();
            }
            for i in 0..m {
                t[i] = sides[i][choice[i]];
            }
            if !rel.contains(&t) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `ρ/ψ`, over `A/ψ` with blocks numbered by minimal representative.
pub fn factor(rel: &FiniteRelation, psi: &EquivPartition) -> Result<FiniteRelation> {
    check_partition(rel, psi)?;
    image(rel, &SurjectiveMap::canonical(psi))
}

/// `ρ/[ψ]`: block tuples whose whole box lies in `ρ`.
///
/// A box is contained in `ρ` exactly when the number of members mapping
/// onto it equals the box size.
pub fn block_factor(rel: &FiniteRelation, psi: &EquivPartition) -> Result<FiniteRelation> {
    check_partition(rel, psi)?;
    let q = psi.quotient_universe();
    let k = q.size();
    let m = rel.arity();
    let sizes: Vec<usize> = psi.blocks().iter().map(Vec::len).collect();
    let mut counts = vec![0usize; checked_pow(k, m).expect("quotient no larger than A")];
    let mut t = vec![0; m];
    for idx in rel.indices() {
        decode_into(idx, rel.n(), &mut t);
        let code = t.iter().fold(0, |acc, &x| acc * k + psi.class_of(x));
        counts[code] += 1;
    }
    let mut out = FiniteRelation::empty(q, m)?;
    for (code, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        decode_into(code, k, &mut t);
        if c == t.iter().map(|&b| sizes[b]).product::<usize>() {
            out.insert_index(code);
        }
    }
    Ok(out)
}

/// A generalized quasiorder split into its exchange equivalence and the
/// factor relation over the corresponding quotient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub sigma: EquivPartition,
    pub tau: FiniteRelation,
}

fn classification_error(rel: &FiniteRelation, property: Property) -> GqError {
    let report = classify(rel);
    let witness = report
        .witness(property)
        .map(|w| w.to_string())
        .unwrap_or_default();
    GqError::classification(property.key(), witness)
}

/// `ρ ↦ (ρ^⟨2⟩, ρ/ρ^⟨2⟩)`; `ρ` must be a generalized quasiorder.
pub fn decompose(rel: &FiniteRelation) -> Result<Decomposition> {
    if !crate::analysis::is_gquord(rel) {
        return Err(classification_error(rel, Property::GQuord));
    }
    let sigma = exchange_eq(rel);
    let tau = factor(rel, &sigma)?;
    Ok(Decomposition { sigma, tau })
}

/// The union of the boxes `B_1 × … × B_m` over `(B_1,…,B_m) ∈ τ`;
/// `τ` must be a weak generalized partial order on `A/σ`.
pub fn recompose(sigma: &EquivPartition, tau: &FiniteRelation) -> Result<FiniteRelation> {
    if tau.universe() != sigma.quotient_universe() {
        return Err(GqError::UniverseMismatch {
            expected: sigma.block_count(),
            actual: tau.n(),
        });
    }
    if !classify(tau).is_wgpord {
        return Err(classification_error(tau, Property::WgPord));
    }
    preimage(tau, &SurjectiveMap::canonical(sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{abs, bin_sym, is_gquord, lift_relation};
    use crate::testutil::{all_relations, brute_gquords, u};

    fn sigma_rho() -> (FiniteRelation, FiniteRelation) {
        let sigma = FiniteRelation::from_predicate(u(4), 3, |t| {
            t.iter().all(|&x| x <= 1) || (t[0] == t[1] && t[1] == t[2])
        })
        .unwrap();
        let mut rho = sigma.clone();
        rho.insert(&[0, 2, 3]).unwrap();
        (sigma, rho)
    }

    fn le(n: usize) -> FiniteRelation {
        FiniteRelation::from_predicate(u(n), 2, |p| p[0] <= p[1]).unwrap()
    }

    fn delta(n: usize, m: usize) -> FiniteRelation {
        FiniteRelation::constant_tuples(u(n), m).unwrap()
    }

    #[test]
    fn permute_examples() {
        let r = FiniteRelation::from_tuples(u(3), 3, [[0, 1, 2]]).unwrap();
        let pi = IndexMap::new(vec![2, 0, 1], 3).unwrap();
        assert_eq!(
            permute(&r, &pi).unwrap(),
            FiniteRelation::from_tuples(u(3), 3, [[2, 0, 1]]).unwrap()
        );
        let swap = IndexMap::new(vec![1, 0], 2).unwrap();
        let ge = FiniteRelation::from_predicate(u(3), 2, |p| p[0] >= p[1]).unwrap();
        assert_eq!(permute(&le(3), &swap).unwrap(), ge);
        assert_eq!(permute(&r, &IndexMap::identity(3)).unwrap(), r);
        assert!(permute(&r, &IndexMap::new(vec![0, 0, 1], 3).unwrap()).is_err());
    }

    #[test]
    fn fictitious_examples() {
        let d = add_fictitious(&delta(2, 2)).unwrap();
        let want =
            FiniteRelation::from_tuples(u(2), 3, [[0, 0, 0], [0, 0, 1], [1, 1, 0], [1, 1, 1]]).unwrap();
        assert_eq!(d, want);
        assert!(add_fictitious(&FiniteRelation::empty(u(2), 2).unwrap()).unwrap().is_empty());
        for r in all_relations(3, 2).step_by(37) {
            assert_eq!(add_fictitious(&r).unwrap().len(), 3 * r.len());
        }
    }

    #[test]
    fn identify_examples() {
        assert_eq!(identify_first_two(&delta(3, 3)).unwrap(), delta(3, 2));
        assert!(identify_first_two(&FiniteRelation::full(u(3), 3).unwrap()).unwrap().is_full());
        let (_, rho) = sigma_rho();
        let want =
            FiniteRelation::from_predicate(u(4), 2, |p| (p[0] <= 1 && p[1] <= 1) || p[0] == p[1]).unwrap();
        assert_eq!(identify_first_two(&rho).unwrap(), want);
        assert!(identify_first_two(&FiniteRelation::full(u(2), 1).unwrap()).is_err());
    }

    #[test]
    fn intersect_examples() {
        let ge = permute(&le(3), &IndexMap::new(vec![1, 0], 2).unwrap()).unwrap();
        assert_eq!(intersect(&le(3), &ge).unwrap(), delta(3, 2));
        let full = FiniteRelation::full(u(3), 2).unwrap();
        assert_eq!(intersect(&le(3), &full).unwrap(), le(3));
        assert!(intersect(&le(3), &le(2)).is_err());
    }

    #[test]
    fn constructions_preserve_gquords() {
        for m in 1..=3 {
            let gq = brute_gquords(2, m);
            for r in &gq {
                for pi in IndexMap::all(m, m).iter().filter(|p| p.is_bijection()) {
                    assert!(is_gquord(&permute(r, pi).unwrap()));
                }
                assert!(is_gquord(&add_fictitious(r).unwrap()));
                if m >= 2 {
                    assert!(is_gquord(&identify_first_two(r).unwrap()));
                }
                for s in &gq {
                    assert!(is_gquord(&intersect(r, s).unwrap()));
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        assert_eq!(direct_product(&delta(2, 2), &delta(2, 2)).unwrap(), delta(4, 2));
        // (a,b) ↦ 2a+b; componentwise order on the 2×2 lattice
        let want = FiniteRelation::from_predicate(u(4), 2, |p| {
            p[0] / 2 <= p[1] / 2 && p[0] % 2 <= p[1] % 2
        })
        .unwrap();
        assert_eq!(direct_product(&le(2), &le(2)).unwrap(), want);
    }

    #[test]
    fn product_gquord_iff_both_factors() {
        let all: Vec<FiniteRelation> = all_relations(2, 2).collect();
        for a in &all {
            for b in &all {
                if a.is_empty() || b.is_empty() {
                    continue;
                }
                let p = direct_product(a, b).unwrap();
                assert_eq!(is_gquord(&p), is_gquord(a) && is_gquord(b), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn restriction_examples_and_surjectivity() {
        let r = le(3);
        assert_eq!(restrict(&r, &[0, 1, 2]).unwrap(), r);
        assert_eq!(restrict(&delta(3, 3), &[0, 2]).unwrap(), delta(2, 3));
        assert!(restrict(&r, &[]).is_err());
        let small = brute_gquords(2, 2);
        let big = brute_gquords(3, 2);
        for subset in [[0, 1], [0, 2], [1, 2]] {
            let mut hit = std::collections::BTreeSet::new();
            for rho in &big {
                let res = restrict(rho, &subset).unwrap();
                assert!(is_gquord(&res));
                hit.insert(res);
            }
            assert_eq!(hit.len(), small.len());
        }
    }

    #[test]
    fn image_preimage_sweep() {
        let lambdas = SurjectiveMap::all(3, 2);
        let id = SurjectiveMap::new(vec![0, 1, 2], 3).unwrap();
        for m in 1..=3 {
            for sigma in brute_gquords(2, m) {
                for lam in &lambdas {
                    let rho = preimage(&sigma, lam).unwrap();
                    assert!(is_gquord(&rho));
                    assert_eq!(preimage(&image(&rho, lam).unwrap(), lam).unwrap(), rho);
                    assert_eq!(image(&rho, lam).unwrap(), sigma);
                }
            }
            for rho in brute_gquords(3, m.min(2)) {
                assert_eq!(image(&rho, &id).unwrap(), rho);
                for lam in &lambdas {
                    let img = image(&rho, lam).unwrap();
                    let saturated = preimage(&img, lam).unwrap() == rho;
                    assert_eq!(saturated, has_exchange_property(&lam.kernel(), &rho).unwrap());
                    if saturated {
                        assert!(is_gquord(&img));
                    }
                }
            }
        }
    }

    #[test]
    fn exchange_property_examples() {
        let (_, rho) = sigma_rho();
        assert!(has_exchange_property(&EquivPartition::discrete(u(4)), &rho).unwrap());
        for r in all_relations(2, 3).chain(all_relations(3, 2)) {
            assert!(has_exchange_property(&exchange_eq(&r), &r).unwrap());
        }
    }

    #[test]
    fn factor_examples() {
        let (_, rho) = sigma_rho();
        let d = EquivPartition::discrete(u(4));
        assert_eq!(factor(&rho, &d).unwrap(), rho);
        assert_eq!(block_factor(&rho, &d).unwrap(), rho);
        for r in brute_gquords(3, 2).iter().chain(&brute_gquords(2, 3)) {
            let e = exchange_eq(r);
            assert_eq!(factor(r, &e).unwrap(), block_factor(r, &e).unwrap());
        }
    }

    #[test]
    fn block_factor_matches_box_definition() {
        for r in all_relations(3, 2).step_by(3) {
            for psi in EquivPartition::all(u(3)) {
                let blocks = psi.blocks();
                let want = FiniteRelation::from_predicate(psi.quotient_universe(), 2, |b| {
                    blocks[b[0]]
                        .iter()
                        .all(|&x| blocks[b[1]].iter().all(|&y| r.contains(&[x, y])))
                })
                .unwrap();
                let got = block_factor(&r, &psi).unwrap();
                assert_eq!(got, want);
                assert!(got.is_subset(&factor(&r, &psi).unwrap()));
            }
        }
    }

    #[test]
    fn block_factor_of_geq_is_lifted() {
        for m in 2..=3 {
            for theta in brute_gquords(2, m).into_iter().filter(|r| classify(r).is_geq) {
                for psi in EquivPartition::all(u(2)) {
                    let lhs = block_factor(&theta, &psi).unwrap();
                    let rhs = lift_relation(&block_factor(&bin_sym(&theta), &psi).unwrap(), m).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        for theta in brute_gquords(3, 2).into_iter().filter(|r| classify(r).is_geq) {
            for psi in EquivPartition::all(u(3)) {
                let lhs = block_factor(&theta, &psi).unwrap();
                let rhs = lift_relation(&block_factor(&bin_sym(&theta), &psi).unwrap(), 2).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let (_, rho) = sigma_rho();
        let dec = decompose(&rho).unwrap();
        assert!(dec.sigma.is_discrete());
        assert_eq!(dec.tau, rho);
        let full = FiniteRelation::full(u(3), 3).unwrap();
        let dec = decompose(&full).unwrap();
        assert_eq!(dec.sigma.block_count(), 1);
        assert!(dec.tau.is_full() && dec.tau.n() == 1);
        assert_eq!(recompose(&dec.sigma, &dec.tau).unwrap(), full);
    }

    #[test]
    fn decomposition_round_trips() {
        for (n, m) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
            for rho in brute_gquords(n, m) {
                let dec = decompose(&rho).unwrap();
                assert!(classify(&dec.tau).is_wgpord);
                assert_eq!(recompose(&dec.sigma, &dec.tau).unwrap(), rho);
            }
        }
    }

    #[test]
    fn decomposition_preconditions() {
        let not_refl = FiniteRelation::from_tuples(u(2), 2, [[0, 0]]).unwrap();
        assert!(matches!(decompose(&not_refl), Err(GqError::Classification { .. })));
        let full = FiniteRelation::full(u(2), 2).unwrap();
        let d = EquivPartition::discrete(u(2));
        assert!(matches!(recompose(&d, &full), Err(GqError::Classification { .. })));
        let one = EquivPartition::indiscrete(u(2));
        assert!(recompose(&one, &full).is_err());
    }

    #[test]
    fn quotient_by_symmetric_part_is_trivial() {
        for (n, m) in [(2, 2), (2, 3), (3, 2)] {
            for rho in brute_gquords(n, m) {
                let b2 = EquivPartition::from_relation(&bin_sym(&rho)).unwrap();
                let q = b2.quotient_universe();
                let bf = block_factor(&rho, &b2).unwrap();
                assert_eq!(bin_sym(&bf), FiniteRelation::constant_tuples(q, 2).unwrap());
                let f = factor(&rho, &b2).unwrap();
                assert_eq!(abs(&f), FiniteRelation::constant_tuples(q, m).unwrap());
                let e = exchange_eq(&rho);
                assert!(exchange_eq(&factor(&rho, &e).unwrap()).is_discrete());
            }
        }
    }
}
