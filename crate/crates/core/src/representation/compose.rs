//! Building representations of sums from representations of the parts, and
//! splitting them back.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use super::{fresh_label, validate_representation, RepError, Representation, Violation};
use crate::poset::{block_decomposition, component_decomposition, Poset};

fn check_disjoint<'a>(grounds: impl IntoIterator<Item = &'a [String]>) -> Result<(), RepError> {
    let mut seen = HashSet::new();
    for g in grounds {
        for l in g {
            if !seen.insert(l.as_str()) {
                return Err(RepError::OverlappingGrounds(l.clone()));
            }
        }
    }
    Ok(())
}

/// Representation of the disjoint sum of the parts, element order matching
/// [`crate::poset::disjoint_sum`]. Every part holding an empty set gets a
/// fresh label `@k` added to all its sets.
pub fn compose_disjoint_reps(parts: &[(Poset, Representation)]) -> Result<Representation, RepError> {
    for (p, r) in parts {
        validate_representation(p, r)?;
    }
    check_disjoint(parts.iter().map(|(_, r)| r.ground()))?;
    let mut taken: HashSet<String> = parts
        .iter()
        .flat_map(|(_, r)| r.ground().iter().cloned())
        .collect();
    let mut next = 0;

    let mut ground = Vec::new();
    let mut part_sets = Vec::new();
    for (_, r) in parts {
        let offset = ground.len();
        ground.extend(r.ground().iter().cloned());
        let fresh = if r.sets().iter().any(|s| s.is_clear()) {
            let l = fresh_label(&taken, &mut next);
            taken.insert(l.clone());
            ground.push(l);
            Some(ground.len() - 1)
        } else {
            None
        };
        part_sets.push((offset, fresh, r));
    }
    let w = ground.len();
    let mut sets = Vec::new();
    for (offset, fresh, r) in part_sets {
        for s in r.sets() {
            let mut b = FixedBitSet::with_capacity(w);
            for i in s.ones() {
                b.insert(offset + i);
            }
            if let Some(f) = fresh {
                b.insert(f);
            }
            sets.push(b);
        }
    }
    Representation::new(ground, sets)
}

/// One representation per component (ordered as in
/// [`component_decomposition`]), each keeping its sets verbatim.
pub fn split_component_reps(p: &Poset, r: &Representation) -> Result<Vec<Representation>, RepError> {
    validate_representation(p, r)?;
    let d = component_decomposition(p);
    Ok(d.embeddings
        .iter()
        .map(|emb| Representation::compact(r.ground(), emb.iter().map(|&x| r.set(x).clone()).collect()))
        .collect())
}

/// Representation of the vertical sum of the parts: an element of part `i`
/// gets its own set plus the grounds of all earlier parts.
/// Fails if a full set of a lower part would coincide with an empty set of
/// the part above it.
pub fn compose_vertical_reps(parts: &[(Poset, Representation)]) -> Result<Representation, RepError> {
    for (p, r) in parts {
        validate_representation(p, r)?;
    }
    check_disjoint(parts.iter().map(|(_, r)| r.ground()))?;
    for (i, (p, r)) in parts.iter().enumerate() {
        let Some(top) = p.elements().find(|&x| r.set(x).count_ones(..) == r.ground_size()) else {
            continue;
        };
        for (q, rq) in &parts[i + 1..] {
            if let Some(bot) = q.elements().find(|&y| rq.set(y).is_clear()) {
                return Err(RepError::Invalid(Violation {
                    x: q.label(bot).to_string(),
                    y: p.label(top).to_string(),
                    missing_inclusion: false,
                }));
            }
            if rq.ground_size() > 0 {
                break;
            }
        }
    }
    let ground: Vec<String> = parts
        .iter()
        .flat_map(|(_, r)| r.ground().iter().cloned())
        .collect();
    let w = ground.len();
    let mut sets = Vec::new();
    let mut offset = 0;
    for (_, r) in parts {
        for s in r.sets() {
            let mut b = FixedBitSet::with_capacity(w);
            b.insert_range(..offset);
            for i in s.ones() {
                b.insert(offset + i);
            }
            sets.push(b);
        }
        offset += r.ground_size();
    }
    Representation::new(ground, sets)
}

/// One representation per block, bottom to top: block `i` gets
/// `S_x - W_i` where `W_i` is the union of the sets of block `i - 1`.
pub fn split_block_reps(p: &Poset, r: &Representation) -> Result<Vec<Representation>, RepError> {
    validate_representation(p, r)?;
    let d = block_decomposition(p);
    let mut out = Vec::with_capacity(d.len());
    let mut below = FixedBitSet::with_capacity(r.ground_size());
    for emb in &d.embeddings {
        let sets = emb
            .iter()
            .map(|&x| {
                let mut s = r.set(x).clone();
                s.difference_with(&below);
                s
            })
            .collect();
        out.push(Representation::compact(r.ground(), sets));
        below.clear();
        for &x in emb {
            below.union_with(r.set(x));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{disjoint_sum, vertical_sum};
    use crate::representation::{canonical_representation, is_valid};

    fn rep(sets: &[&[&str]]) -> Representation {
        let owned: Vec<Vec<&str>> = sets.iter().map(|s| s.to_vec()).collect();
        Representation::from_label_sets(&owned)
    }

    fn a(n: usize) -> Poset {
        Poset::antichain(n).unwrap()
    }

    #[test]
    fn disjoint_with_fresh_labels() {
        let c2 = Poset::chain(2).unwrap();
        let one = Poset::single();
        let parts = vec![(c2.clone(), rep(&[&[], &["1"]])), (one.clone(), rep(&[&[]]))];
        let r = compose_disjoint_reps(&parts).unwrap();
        let sum = disjoint_sum(&[c2, one]).unwrap();
        assert!(is_valid(&sum, &r));
        assert_eq!(r.set_labels(0), vec!["@0"]);
        assert_eq!(r.set_labels(1), vec!["1", "@0"]);
        assert_eq!(r.set_labels(2), vec!["@1"]);
    }

    #[test]
    fn disjoint_without_fresh_labels() {
        let parts = vec![(a(2), rep(&[&["1"], &["2"]])), (a(2), rep(&[&["3"], &["4"]]))];
        let r = compose_disjoint_reps(&parts).unwrap();
        assert_eq!(r.ground_size(), 4);
        assert!(is_valid(&a(4), &r));
        let back = split_component_reps(&a(4), &r).unwrap();
        assert_eq!(back.len(), 4);
        assert!(back.iter().all(|b| b.ground_size() == 1));
    }

    #[test]
    fn disjoint_fresh_only_where_needed() {
        let v = vertical_sum(&[Poset::single(), a(2)]).unwrap();
        let parts = vec![
            (v.clone(), rep(&[&[], &["1"], &["2"]])),
            (Poset::single(), rep(&[&["9"]])),
        ];
        let r = compose_disjoint_reps(&parts).unwrap();
        assert_eq!(r.ground_size(), 4);
        assert!(is_valid(&disjoint_sum(&[v, Poset::single()]).unwrap(), &r));
        assert_eq!(r.set_labels(3), vec!["9"]);
    }

    #[test]
    fn overlapping_grounds_rejected() {
        let parts = vec![
            (Poset::single(), rep(&[&["1"]])),
            (Poset::single(), rep(&[&["1"]])),
        ];
        assert_eq!(
            compose_disjoint_reps(&parts),
            Err(RepError::OverlappingGrounds("1".into()))
        );
    }

    #[test]
    fn vertical_examples() {
        let v = vertical_sum(&[Poset::single(), a(2)]).unwrap();
        let r =
            compose_vertical_reps(&[(Poset::single(), rep(&[&[]])), (a(2), rep(&[&["1"], &["2"]]))]).unwrap();
        assert!(is_valid(&v, &r));
        assert_eq!(r.profile().sizes, vec![0, 1, 1]);

        let l = vertical_sum(&[a(2), Poset::single()]).unwrap();
        let r =
            compose_vertical_reps(&[(a(2), rep(&[&["1"], &["2"]])), (Poset::single(), rep(&[&[]]))]).unwrap();
        assert!(is_valid(&l, &r));
        assert_eq!(r.set_labels(2), vec!["1", "2"]);

        let singles: Vec<(Poset, Representation)> = (0..3)
            .map(|i| {
                let q = Poset::with_labels(&Poset::single(), [format!("s{i}")]).unwrap();
                let c = canonical_representation(&q);
                (q, c)
            })
            .collect();
        let r = compose_vertical_reps(&singles).unwrap();
        assert!(is_valid(&Poset::chain(3).unwrap(), &r));
        assert_eq!(r.profile().sizes, vec![1, 2, 3]);
    }

    #[test]
    fn block_splits() {
        let l = vertical_sum(&[a(2), Poset::single()]).unwrap();
        let parts = split_block_reps(&l, &rep(&[&["1"], &["2"], &["1", "2"]])).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].profile().sizes, vec![1, 1]);
        assert_eq!(parts[1].profile().sizes, vec![0]);
        assert_eq!(parts[1].ground_size(), 0);

        let c3 = Poset::chain(3).unwrap();
        let r = rep(&[&[], &["1"], &["1", "2"]]);
        assert_eq!(split_block_reps(&c3, &r).unwrap(), vec![r]);

        let v = vertical_sum(&[Poset::single(), a(2)]).unwrap();
        let parts = split_block_reps(&v, &rep(&[&[], &["1"], &["2"]])).unwrap();
        assert_eq!(parts[0].profile().sizes, vec![0]);
        assert_eq!(parts[1].set_labels(0), vec!["1"]);
        assert_eq!(parts[1].set_labels(1), vec!["2"]);
    }
}
