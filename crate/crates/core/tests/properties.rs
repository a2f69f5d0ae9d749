use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use poset_cube::characterization::{check_property, find_violation, in_miir, property_violation, Property};
use poset_cube::generators::random_representation;
use poset_cube::poset::{
    are_isomorphic, block_decomposition, canonical_form, component_decomposition, disjoint_sum, parse_poset,
    vertical_sum, write_poset, Poset, Relation,
};
use poset_cube::representation::{
    canonical_representation, compare_profiles, compose_disjoint_reps, compose_vertical_reps, is_valid,
    key_step_reduce, parse_representation, representation_to_json, split_block_reps, split_component_reps,
    strict_reduction_from_violation, PropertyViolation, Representation,
};
use poset_cube::solvers::{MethodChoice, Param, Solver};
use poset_cube::Elem;

fn poset(max_n: usize) -> impl Strategy<Value = Poset> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
        })
        .prop_map(|(bits, perm)| {
            let n = perm.len();
            let mut rel = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        rel.push((perm[i], perm[j]));
                    }
                    k += 1;
                }
            }
            Poset::from_relations(Poset::default_labels(n), &rel).unwrap()
        })
}

fn with_rep(max_n: usize) -> impl Strategy<Value = (Poset, Representation)> {
    (poset(max_n), any::<u64>()).prop_map(|(p, seed)| {
        let r = random_representation(&p, &mut ChaCha8Rng::seed_from_u64(seed));
        (p, r)
    })
}

fn relabel(p: &Poset, prefix: &str) -> Poset {
    p.with_labels(p.labels().iter().map(|l| format!("{prefix}{l}")))
        .unwrap()
}

/// The permutation `perm` applied to element ids.
fn permuted(p: &Poset, perm: &[usize]) -> Poset {
    let n = p.len();
    let mut inv = vec![0; n];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    Poset::from_fn(Poset::default_labels(n), |a, b| p.lt(inv[a], inv[b])).unwrap()
}

fn valid_by_definition(p: &Poset, r: &Representation) -> bool {
    p.elements()
        .all(|x| p.elements().all(|y| r.set(x).is_subset(r.set(y)) == p.le(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn order_is_a_strict_partial_order(p in poset(7)) {
        for x in p.elements() {
            prop_assert!(!p.lt(x, x));
            for y in p.elements() {
                prop_assert!(!(p.lt(x, y) && p.lt(y, x)));
                let rel = p.relation(x, y).unwrap();
                let expect = if x == y {
                    Relation::Eq
                } else if p.lt(x, y) {
                    Relation::Lt
                } else if p.lt(y, x) {
                    Relation::Gt
                } else {
                    Relation::Incomparable
                };
                prop_assert_eq!(rel, expect);
                for z in p.elements() {
                    prop_assert!(!(p.lt(x, y) && p.lt(y, z)) || p.lt(x, z));
                }
            }
        }
    }

    #[test]
    fn text_format_round_trips(p in poset(7)) {
        prop_assert_eq!(parse_poset(&write_poset(&p)).unwrap(), p);
    }

    #[test]
    fn canonical_form_is_relabeling_invariant(
        (p, perm) in poset(7).prop_flat_map(|p| {
            let n = p.len();
            (Just(p), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        })
    ) {
        let q = permuted(&p, &perm);
        prop_assert_eq!(canonical_form(&p), canonical_form(&q));
        prop_assert!(are_isomorphic(&p, &q));
        prop_assert!(are_isomorphic(&p, &canonical_form(&p).to_poset()));
    }

    #[test]
    fn decompositions_partition_and_recompose(p in poset(7)) {
        for d in [block_decomposition(&p), component_decomposition(&p)] {
            let mut seen: Vec<Elem> = d.embeddings.iter().flatten().copied().collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, p.elements().collect::<Vec<_>>());
            prop_assert!(are_isomorphic(&d.recompose(), &p));
        }
        let b = block_decomposition(&p);
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                for &x in &b.embeddings[i] {
                    for &y in &b.embeddings[j] {
                        prop_assert!(p.lt(x, y));
                    }
                }
            }
        }
        let c = component_decomposition(&p);
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                for &x in &c.embeddings[i] {
                    for &y in &c.embeddings[j] {
                        prop_assert!(p.parallel(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn representations_are_valid((p, r) in with_rep(7)) {
        prop_assert!(is_valid(&p, &r));
        prop_assert!(valid_by_definition(&p, &r));
        let canon = canonical_representation(&p);
        prop_assert!(valid_by_definition(&p, &canon));
        let text = representation_to_json(&p, &r).to_string();
        prop_assert_eq!(parse_representation(&p, &text).unwrap(), r);
    }

    #[test]
    fn reduction_order((_, r) in with_rep(6), (_, r2) in with_rep(6)) {
        let (a, b) = (r.profile(), r2.profile());
        let same = compare_profiles(&a, &a);
        prop_assert!(same.is_reduction && same.is_equivalent && !same.is_strict);
        if a.sizes.len() == b.sizes.len() {
            let ab = compare_profiles(&a, &b);
            let ba = compare_profiles(&b, &a);
            prop_assert_eq!(ab.is_strict, ab.is_reduction && !ab.is_equivalent);
            prop_assert!(!(ab.is_strict && ba.is_reduction));
            prop_assert_eq!(ab.is_reduction && ba.is_reduction, a == b);
        }
    }

    #[test]
    fn disjoint_compose_and_split((p1, r1) in with_rep(4), (p2, r2) in with_rep(4)) {
        let (p1, p2) = (relabel(&p1, "l"), relabel(&p2, "r"));
        let (r1, r2) = (r1.prefixed("l"), r2.prefixed("r"));
        let sum = disjoint_sum(&[p1.clone(), p2.clone()]).unwrap();
        let r = compose_disjoint_reps(&[(p1.clone(), r1.clone()), (p2.clone(), r2.clone())]).unwrap();
        prop_assert!(valid_by_definition(&sum, &r));
        let extra = [&r1, &r2].iter().filter(|q| q.sets().iter().any(|s| s.is_clear())).count();
        prop_assert_eq!(r.ground_size(), r1.ground_size() + r2.ground_size() + extra);

        let d = component_decomposition(&sum);
        let parts = split_component_reps(&sum, &r).unwrap();
        prop_assert_eq!(parts.len(), d.len());
        for (q, rq) in d.parts.iter().zip(&parts) {
            prop_assert!(valid_by_definition(q, rq));
        }
    }

    #[test]
    fn vertical_compose_and_split((p1, r1) in with_rep(4), (p2, r2) in with_rep(4)) {
        let (p1, p2) = (relabel(&p1, "l"), relabel(&p2, "u"));
        let (r1, r2) = (r1.prefixed("l"), r2.prefixed("u"));
        let sum = vertical_sum(&[p1.clone(), p2.clone()]).unwrap();
        let clash = r1.sets().iter().any(|s| s.count_ones(..) == r1.ground_size())
            && r2.sets().iter().any(|s| s.is_clear());
        let composed = compose_vertical_reps(&[(p1.clone(), r1.clone()), (p2.clone(), r2.clone())]);
        prop_assert_eq!(composed.is_err(), clash);
        let Ok(r) = composed else { return Ok(()) };
        prop_assert!(valid_by_definition(&sum, &r));
        prop_assert_eq!(r.ground_size(), r1.ground_size() + r2.ground_size());

        let d = block_decomposition(&sum);
        let parts = split_block_reps(&sum, &r).unwrap();
        prop_assert_eq!(parts.len(), d.len());
        for (q, rq) in d.parts.iter().zip(&parts) {
            prop_assert!(valid_by_definition(q, rq));
        }
        let single_blocks = block_decomposition(&p1).len() == 1 && block_decomposition(&p2).len() == 1;
        if single_blocks && !(p1.is_chain() && p2.is_chain()) {
            prop_assert_eq!(&parts[0], &r1);
            prop_assert_eq!(&parts[1], &r2);
        }
        let total: usize = parts.iter().map(Representation::ground_size).sum();
        prop_assert!(total <= r.ground_size());

        let back: Vec<(Poset, Representation)> =
            d.parts.iter().cloned().zip(parts.iter().cloned()).collect();
        let again = compose_vertical_reps(&back).unwrap();
        prop_assert_eq!(again.ground_size(), total);
    }

    #[test]
    fn miir_iff_no_violation(p in poset(7)) {
        prop_assert_eq!(in_miir(&p).holds, find_violation(&p).is_none());
    }

    #[test]
    fn violation_witnesses_recheck(p in poset(7)) {
        for w in Property::ALL {
            let report = check_property(&p, w);
            prop_assert_eq!(report.holds, property_violation(&p, w).is_none());
            let Some(v) = property_violation(&p, w) else { continue };
            match v {
                PropertyViolation::ChainBlock { element: x } => {
                    prop_assert!(p.elements().all(|y| p.le(x, y) || p.le(y, x)));
                }
                PropertyViolation::TwoDown { element: y } => {
                    prop_assert!(p.lower_covers(y).len() >= 2);
                    prop_assert!(!p.elements().any(|z| p.parallel(y, z)
                        && p.elements().all(|u| !p.lt(u, y) || p.lt(u, z))));
                }
                PropertyViolation::ParallelPair { x, y } => {
                    prop_assert!(p.parallel(x, y));
                    let side = |x: Elem, y: Elem| p.elements().any(|u| p.le(y, u) && p.parallel(x, u)
                        && p.elements().all(|t| !p.lt(t, x) || p.lt(t, u)));
                    prop_assert!(!side(x, y) && !side(y, x));
                }
            }
            let reduced = strict_reduction_from_violation(&p, v).unwrap();
            prop_assert!(valid_by_definition(&p, &reduced));
            let canon = canonical_representation(&p);
            prop_assert!(compare_profiles(&reduced.profile(), &canon.profile()).is_strict);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn key_step_invariants((p, r) in with_rep(6), pick in any::<prop::sample::Index>()) {
        let admissible: Vec<Elem> =
            p.elements().filter(|&y| p.closed_below(y).count_ones(..) < p.len()).collect();
        prop_assume!(!admissible.is_empty());
        let y = admissible[pick.index(admissible.len())];
        let s = Solver::default();
        let ks = key_step_reduce(&p, &r, y, &s).unwrap();
        let out = &ks.representation;
        prop_assert!(valid_by_definition(&p, out));
        prop_assert!(out.profile().le(&r.profile()));
        let bound = s.iir(&ks.q_prime).unwrap().value + ks.epsilon + r.set_size(y);
        prop_assert!(out.ground_size() <= bound);
        prop_assert_eq!(ks.epsilon == 1, ks.q_prime.minimal_elements().len() == 1);
        for x in p.closed_below(y).ones() {
            let before: Vec<&str> = r.set_labels(x);
            prop_assert_eq!(out.set_labels(x), before);
        }
    }

    #[test]
    fn reduce_gives_irreducible_reduction((p, r) in with_rep(6)) {
        let s = Solver::default();
        let out = s.reduce_to_irreducible(&p, &r).unwrap();
        prop_assert!(valid_by_definition(&p, &out));
        prop_assert!(out.profile().le(&r.profile()));
        prop_assert!(s.is_irreducible(&p, &out).unwrap().irreducible);
        prop_assert!(out.ground().iter().all(|l| r.ground().contains(l)));
    }

    #[test]
    fn parameters_chain_and_witnesses(p in poset(6)) {
        let s = Solver::default();
        let brute = s.params(&p, MethodChoice::Brute).unwrap();
        let n = p.len();
        prop_assert!(brute.ch <= brute.dim2 && brute.dim2 <= brute.cw);
        prop_assert!(brute.cw <= brute.iir && brute.iir <= n);
        for choice in [MethodChoice::Auto, MethodChoice::Decompose] {
            let r = s.params(&p, choice).unwrap();
            prop_assert_eq!((r.ch, r.dim2, r.cw, r.iir), (brute.ch, brute.dim2, brute.cw, brute.iir));
            for w in Param::ALL {
                prop_assert!(valid_by_definition(&p, r.witness(w)));
            }
            prop_assert_eq!(r.witness(Param::Ch).max_set_size(), r.ch);
            prop_assert_eq!(r.witness(Param::Dim2).ground_size(), r.dim2);
            prop_assert_eq!(r.witness(Param::Cw).ground_size(), r.cw);
            prop_assert!(r.witness(Param::Cw).max_set_size() <= r.ch);
            prop_assert_eq!(r.witness(Param::Iir).ground_size(), r.iir);
            prop_assert!(s.is_irreducible(&p, r.witness(Param::Iir)).unwrap().irreducible);
        }
    }

    #[test]
    fn subposets_do_not_raise_dim2_or_ch(
        (p, keep) in poset(6).prop_flat_map(|p| {
            let n = p.len();
            (Just(p), proptest::collection::vec(any::<bool>(), n))
        })
    ) {
        let ids: Vec<Elem> = p.elements().filter(|&x| keep[x]).collect();
        let Some(q) = p.induced_subposet(&ids).unwrap() else { return Ok(()) };
        let s = Solver::default();
        let (rp, rq) = (s.params(&p, MethodChoice::Brute).unwrap(), s.params(&q, MethodChoice::Brute).unwrap());
        prop_assert!(rq.dim2 <= rp.dim2);
        prop_assert!(rq.ch <= rp.ch);
    }

    #[test]
    fn disjoint_sum_cube_height_rule(parts in proptest::collection::vec(poset(3), 2..=3)) {
        let parts: Vec<Poset> = parts
            .iter()
            .flat_map(|q| component_decomposition(q).parts)
            .enumerate()
            .map(|(i, q)| relabel(&q, &format!("c{i}.")))
            .collect();
        prop_assume!(parts.len() >= 2 && parts.iter().map(Poset::len).sum::<usize>() <= 7);
        let sum = disjoint_sum(&parts).unwrap();
        let s = Solver::default();
        prop_assert_eq!(s.disjoint_sum_cube_height(&parts).unwrap(), s.params(&sum, MethodChoice::Brute).unwrap().ch);
    }
}
