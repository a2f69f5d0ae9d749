//! Constructive reductions: the key step that shrinks the part of a
//! representation above a fixed element, and the explicit strict reductions
//! of the canonical representation attached to each failed property.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{
    canonical_representation, compose_vertical_reps, validate_representation, RepError, Representation,
};
use crate::characterization::{is_chain_block_element, parallel_pair_holds_at, two_down_holds_at};
use crate::poset::{block_decomposition, Elem, Poset};
use crate::solvers::{SolveError, Solver};

/// Output of [`key_step_reduce`] together with the quantities in its bound.
#[derive(Debug, Clone)]
pub struct KeyStep {
    pub representation: Representation,
    /// Inclusion order on the distinct sets `S_x - S_y`, `x` not below `y`.
    pub q_prime: Poset,
    /// 1 when `q_prime` has a unique minimal element.
    pub epsilon: usize,
    /// Ground size of the irreducible representation used for `q_prime`.
    pub inner_ground: usize,
}

/// Rebuilds every set outside `D[y]` as `R'_α ∪ (S_x ∩ S_y) ∪ A'`, where
/// `α = S_x - S_y`, `A` is the least `α` (if unique), `R'` is an irreducible
/// reduction of `{α - A}` and `A'` is the smallest label of `A` (or nothing).
pub fn key_step_reduce(
    p: &Poset,
    r: &Representation,
    y: Elem,
    solver: &Solver,
) -> Result<KeyStep, SolveError> {
    validate_representation(p, r)?;
    if y >= p.len() {
        return Err(RepError::OutOfRange(y).into());
    }
    let below_y = p.closed_below(y);
    if below_y.count_ones(..) == p.len() {
        return Err(RepError::UniqueMaximal(p.label(y).to_owned()).into());
    }
    let sy = r.set(y);

    let mut alphas: Vec<FixedBitSet> = Vec::new();
    let mut alpha_of = vec![usize::MAX; p.len()];
    for x in p.elements().filter(|&x| !below_y.contains(x)) {
        let mut d = r.set(x).clone();
        d.difference_with(sy);
        alpha_of[x] = match alphas.iter().position(|a| *a == d) {
            Some(i) => i,
            None => {
                alphas.push(d);
                alphas.len() - 1
            }
        };
    }
    let m = alphas.len();
    let q_prime = Poset::from_fn((0..m).map(|i| format!("q{i}")), |i, j| {
        alphas[i].is_subset(&alphas[j])
    })
    .expect("distinct sets under inclusion form a poset");

    let minimals = q_prime.minimal_elements();
    let (epsilon, a) = if minimals.len() == 1 {
        (1, alphas[minimals[0]].clone())
    } else {
        (0, FixedBitSet::with_capacity(r.ground_size()))
    };
    let shifted: Vec<FixedBitSet> = alphas
        .iter()
        .map(|al| {
            let mut s = al.clone();
            s.difference_with(&a);
            s
        })
        .collect();
    let t = Representation::compact(r.ground(), shifted);
    let reduced = solver.reduce_nested(&q_prime, &t)?;
    let inner_ground = reduced.ground_size();

    let index: HashMap<&str, usize> = r
        .ground()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let a_prime = if epsilon == 1 { a.ones().next() } else { None };
    let w = r.ground_size();
    let sets = p
        .elements()
        .map(|x| {
            if below_y.contains(x) {
                return r.set(x).clone();
            }
            let mut s = FixedBitSet::with_capacity(w);
            for l in reduced.set_labels(alpha_of[x]) {
                s.insert(index[l]);
            }
            let mut common = r.set(x).clone();
            common.intersect_with(sy);
            s.union_with(&common);
            if let Some(i) = a_prime {
                s.insert(i);
            }
            s
        })
        .collect();
    Ok(KeyStep {
        representation: Representation::compact(r.ground(), sets),
        q_prime,
        epsilon,
        inner_ground,
    })
}

/// A concrete failure of one of the three properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PropertyViolation {
    /// An element comparable to every other element, i.e. a member of a
    /// chain block.
    ChainBlock { element: Elem },
    /// An element covering at least two elements with no `z` parallel to it
    /// whose open down set contains its open down set.
    TwoDown { element: Elem },
    /// An incomparable pair for which neither alternative holds.
    ParallelPair { x: Elem, y: Elem },
}

/// A strict reduction of the canonical representation built from the given
/// violation. The violation is re-checked first.
pub fn strict_reduction_from_violation(
    p: &Poset,
    violation: PropertyViolation,
) -> Result<Representation, RepError> {
    let check = |x: Elem| {
        if x < p.len() {
            Ok(())
        } else {
            Err(RepError::OutOfRange(x))
        }
    };
    let canon = canonical_representation(p);
    match violation {
        PropertyViolation::TwoDown { element: y } => {
            check(y)?;
            if p.lower_covers(y).len() < 2 || two_down_holds_at(p, y) {
                return Err(RepError::NotAViolation(format!(
                    "two-down holds at {}",
                    p.label(y)
                )));
            }
            let mut sets = canon.sets().to_vec();
            sets[y] = p.strict_below(y).clone();
            Ok(Representation::compact(canon.ground(), sets))
        }
        PropertyViolation::ParallelPair { x, y } => {
            check(x)?;
            check(y)?;
            if !p.parallel(x, y) || parallel_pair_holds_at(p, x, y) {
                return Err(RepError::NotAViolation(format!(
                    "parallel-pair holds at ({}, {})",
                    p.label(x),
                    p.label(y)
                )));
            }
            let mut sets = canon.sets().to_vec();
            for u in p.closed_above(y).ones() {
                sets[u].set(y, false);
                sets[u].insert(x);
            }
            Ok(Representation::compact(canon.ground(), sets))
        }
        PropertyViolation::ChainBlock { element } => {
            check(element)?;
            if !is_chain_block_element(p, element) {
                return Err(RepError::NotAViolation(format!(
                    "{} is parallel to some element",
                    p.label(element)
                )));
            }
            let d = block_decomposition(p);
            let parts: Vec<(Poset, Representation)> = d
                .parts
                .iter()
                .zip(&d.embeddings)
                .map(|(q, emb)| {
                    let rep = if emb.contains(&element) {
                        prefix_representation(q)
                    } else {
                        canonical_representation(q)
                    };
                    (q.clone(), rep)
                })
                .collect();
            let composite = compose_vertical_reps(&parts)?;
            let mut sets = vec![FixedBitSet::new(); p.len()];
            let mut k = 0;
            for emb in &d.embeddings {
                for &x in emb {
                    sets[x] = composite.set(k).clone();
                    k += 1;
                }
            }
            Representation::new(composite.ground().to_vec(), sets)
        }
    }
}

/// For a chain: the element at height `k` gets the labels of the `k`
/// elements below it.
fn prefix_representation(chain: &Poset) -> Representation {
    let sets = chain.elements().map(|x| chain.strict_below(x).clone()).collect();
    Representation::compact(chain.labels(), sets)
}
