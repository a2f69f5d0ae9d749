use std::collections::BTreeSet;

use poset_cube::characterization::in_miir;
use poset_cube::generators::{
    enumerate_forms, enumerate_posets, gen_basic, gen_equivalence_example, gen_example_1_4, gen_sigma,
    random_representations, sample_posets, BasicKind, SigmaSpec,
};
use poset_cube::poset::{are_isomorphic, canonical_form, disjoint_sum, is_block, vertical_sum, Poset};
use poset_cube::representation::{canonical_representation, compose_vertical_reps, is_valid, Representation};
use poset_cube::Solver;

fn by_label(p: &Poset, l: &str) -> usize {
    p.elements().find(|&x| p.label(x) == l).unwrap()
}

#[test]
fn basic_shapes() {
    let v = gen_basic(BasicKind::V, 3).unwrap();
    assert_eq!(v.len(), 4);
    let bot = by_label(&v, "bot");
    assert!(v.elements().all(|x| x == bot || v.lt(bot, x)));
    assert_eq!(v.maximal_elements().len(), 3);

    let l = gen_basic(BasicKind::Lambda, 3).unwrap();
    let top = by_label(&l, "top");
    assert!(l.elements().all(|x| x == top || l.lt(x, top)));
    assert_eq!(l.minimal_elements().len(), 3);

    let z = gen_basic(BasicKind::Z, 0).unwrap();
    assert!(z.lt(by_label(&z, "c0"), by_label(&z, "c1")));
    assert_eq!(z.comparable_pairs(), 1);

    let b = gen_basic(BasicKind::B, 3).unwrap();
    assert_eq!(b.len(), 4);
    assert_eq!(b.comparable_pairs(), 3);
    assert!(b
        .elements()
        .all(|x| b.parallel(x, by_label(&b, "s")) || b.label(x) == "s"));

    assert!(gen_basic(BasicKind::Chain, 4).unwrap().is_chain());
    assert!(gen_basic(BasicKind::Antichain, 4).unwrap().is_antichain());
    assert!(gen_basic(BasicKind::B, 1).is_err());
    assert!(gen_basic(BasicKind::V, 0).is_err());
}

#[test]
fn example_1_4_sizes() {
    let sizes: Vec<usize> = (1..=3).map(|t| gen_example_1_4(t).unwrap().len()).collect();
    assert_eq!(sizes, [4, 11, 36]);
    let p = gen_example_1_4(2).unwrap();
    assert!(are_isomorphic(&p, &gen_basic(BasicKind::Lambda, 10).unwrap()));
    assert!(gen_example_1_4(0).is_err());
}

#[test]
fn sigma_posets_are_in_miir() {
    let specs = SigmaSpec::all_up_to(10);
    assert!(!specs.is_empty());
    for spec in &specs {
        spec.validate().unwrap();
        let p = gen_sigma(spec).unwrap();
        assert_eq!(p.len(), spec.n + spec.a.len());
        assert!(in_miir(&p).holds, "{spec:?}");
        let back = SigmaSpec::recognize(&p).unwrap();
        assert_eq!(&back, spec);
    }
    let fig = SigmaSpec::figure_2();
    let p = gen_sigma(&fig).unwrap();
    assert_eq!(p.len(), 20);
    assert!(in_miir(&p).holds);
}

#[test]
fn sigma_rejects_bad_sequences() {
    for (n, a) in [
        (2, vec![1, 2, 2]),
        (3, vec![3, 3]),
        (3, vec![2, 1, 3, 3]),
        (3, vec![0, 3, 3]),
        (3, vec![3, 3, 3]),
        (4, vec![1, 3, 4]),
    ] {
        assert!(SigmaSpec::new(n, a.clone()).is_err(), "{n} {a:?}");
    }
}

#[test]
fn equivalence_examples() {
    for s in 3..=6 {
        let mut first: Option<Poset> = None;
        for i in 3..=s {
            let (p, r) = gen_equivalence_example(s, i).unwrap();
            assert!(is_valid(&p, &r), "s = {s}, i = {i}");
            assert_eq!(r.ground_size(), 2 * s);
            let (y1, y2) = (by_label(&p, "y1"), by_label(&p, "y2"));
            let below = |y: usize| -> BTreeSet<usize> { p.elements().filter(|&x| p.lt(x, y)).collect() };
            assert!(below(y1).is_disjoint(&below(y2)));
            assert_eq!(below(y1).len(), s + 1);
            match &first {
                None => first = Some(p),
                Some(q) => assert_eq!(q, &p),
            }
        }
    }
    assert!(gen_equivalence_example(2, 2).is_err());
    assert!(gen_equivalence_example(4, 5).is_err());
}

#[test]
fn enumeration_counts() {
    let counts: Vec<usize> = (1..=7).map(|n| enumerate_forms(n).unwrap().len()).collect();
    assert_eq!(counts, [1, 2, 5, 16, 63, 318, 2045]);
    assert!(enumerate_forms(0).is_err());
    assert!(enumerate_forms(8).is_err());
}

#[test]
fn enumeration_contains_sums() {
    for n in 2..=5 {
        let forms: BTreeSet<_> = enumerate_forms(n).unwrap().into_iter().collect();
        assert!(forms.contains(&canonical_form(&Poset::chain(n).unwrap())));
        assert!(forms.contains(&canonical_form(&Poset::antichain(n).unwrap())));
        for k in 1..n {
            for a in enumerate_posets(k).unwrap() {
                for b in enumerate_posets(n - k).unwrap() {
                    let b = b.with_labels((0..n - k).map(|i| format!("u{i}"))).unwrap();
                    assert!(forms.contains(&canonical_form(&disjoint_sum(&[a.clone(), b.clone()]).unwrap())));
                    assert!(forms.contains(&canonical_form(&vertical_sum(&[a.clone(), b]).unwrap())));
                }
            }
        }
    }
}

#[test]
fn sampling_is_seeded_and_distinct() {
    let a = sample_posets(6, 50, 7).unwrap();
    let b = sample_posets(6, 50, 7).unwrap();
    assert_eq!(a, b);
    let forms: BTreeSet<_> = a.iter().map(canonical_form).collect();
    assert_eq!(forms.len(), 50);
    assert_ne!(a, sample_posets(6, 50, 8).unwrap());
    assert_eq!(sample_posets(3, 100, 0).unwrap().len(), 5);
}

#[test]
fn random_representations_are_seeded_and_valid() {
    let p = gen_basic(BasicKind::B, 3).unwrap();
    let a = random_representations(&p, 10, 3);
    assert_eq!(a, random_representations(&p, 10, 3));
    assert!(a.iter().all(|r| is_valid(&p, r)));
}

fn prefixed(p: &Poset, r: &Representation, tag: &str) -> (Poset, Representation) {
    (
        p.with_labels(p.labels().iter().map(|l| format!("{tag}{l}")))
            .unwrap(),
        r.prefixed(tag),
    )
}

#[test]
fn vertical_composition_preserves_irreducibility() {
    let s = Solver::default();
    let posets: Vec<Poset> = (1..=4).flat_map(|n| enumerate_posets(n).unwrap()).collect();
    let reps = |p: &Poset| {
        let mut v = random_representations(p, 4, p.len() as u64);
        v.push(canonical_representation(p));
        v.push(
            s.params(p, poset_cube::MethodChoice::Brute)
                .unwrap()
                .witness(poset_cube::Param::Iir)
                .clone(),
        );
        v
    };
    let mut checked = 0;
    for a in &posets {
        for b in posets.iter().filter(|b| a.len() + b.len() <= 5) {
            if !(is_block(a) && is_block(b)) || (a.is_chain() && b.is_chain()) {
                continue;
            }
            for ra in reps(a) {
                for rb in reps(b) {
                    let parts = [prefixed(a, &ra, "l"), prefixed(b, &rb, "u")];
                    let Ok(r) = compose_vertical_reps(&parts) else {
                        continue;
                    };
                    let sum = vertical_sum(&[parts[0].0.clone(), parts[1].0.clone()]).unwrap();
                    let whole = s.is_irreducible(&sum, &r).unwrap().irreducible;
                    let each = s.is_irreducible(a, &ra).unwrap().irreducible
                        && s.is_irreducible(b, &rb).unwrap().irreducible;
                    assert_eq!(whole, each, "{a:?} {ra:?} / {b:?} {rb:?}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000);
}
