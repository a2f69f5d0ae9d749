//! Finite posets over dense element ids `0..n`.
//!
//! A [`Poset`] stores the strict order as two tables of bit sets: for each
//! element the elements strictly below it and strictly above it. Both are
//! transitively closed at construction time, so every order query is a
//! single bit lookup.

mod decompose;
mod format;
mod iso;

use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use decompose::{
    block_decomposition, component_decomposition, is_block, is_vertical_prime, vertical_cuts, Decomposition,
    DecompositionKind,
};
pub use format::{parse_poset, write_poset, ParseError};
pub use iso::{are_isomorphic, canonical_form, isomorphism, CanonicalForm};

/// Element id inside a poset.
pub type Elem = usize;

/// A set of element ids (or ground labels) as a bit set.
pub type ElemSet = FixedBitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("a poset needs at least one element")]
    Empty,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("element id {id} out of range for a poset with {n} elements")]
    OutOfRange { id: Elem, n: usize },
    #[error("relations form a cycle through `{0}`")]
    Cycle(String),
    #[error("at least one part is required")]
    NoParts,
}

/// Outcome of comparing two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Gt,
    Eq,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    below: Vec<ElemSet>,
    above: Vec<ElemSet>,
}

impl Poset {
    /// Builds a poset from a generating set of strict relations `(a, b)`
    /// meaning `a < b`. The transitive closure is taken.
    pub fn from_relations<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        relations: &[(Elem, Elem)],
    ) -> Result<Self, PosetError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(PosetError::Empty);
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(PosetError::DuplicateElement(l.clone()));
            }
        }
        // above[a] = elements reachable from a
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in relations {
            for id in [a, b] {
                if id >= n {
                    return Err(PosetError::OutOfRange { id, n });
                }
            }
            above[a].insert(b);
        }
        for k in 0..n {
            let row_k = above[k].clone();
            for row in above.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| above[x].contains(x)) {
            return Err(PosetError::Cycle(labels[x].clone()));
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (x, row) in above.iter().enumerate() {
            for y in row.ones() {
                below[y].insert(x);
            }
        }
        Ok(Poset { labels, below, above })
    }

    /// Builds a poset from a predicate `lt(x, y)`; the closure is taken.
    pub fn from_fn<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        lt: impl Fn(Elem, Elem) -> bool,
    ) -> Result<Self, PosetError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let mut rel = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && lt(x, y) {
                    rel.push((x, y));
                }
            }
        }
        Self::from_relations(labels, &rel)
    }

    /// Element labels `x0, x1, ...`.
    pub fn default_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    pub fn chain(n: usize) -> Result<Self, PosetError> {
        Self::from_fn(Self::default_labels(n), |x, y| x < y)
    }

    pub fn antichain(n: usize) -> Result<Self, PosetError> {
        Self::from_relations(Self::default_labels(n), &[])
    }

    pub fn single() -> Self {
        Self::antichain(1).expect("one element")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false; posets are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: Elem) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    /// Returns a copy with new element labels.
    pub fn with_labels<S: Into<String>>(
        &self,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self, PosetError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        assert_eq!(labels.len(), self.len(), "label count must match");
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(PosetError::DuplicateElement(l.clone()));
            }
        }
        Ok(Poset {
            labels,
            below: self.below.clone(),
            above: self.above.clone(),
        })
    }

    fn check(&self, x: Elem) -> Result<(), PosetError> {
        if x < self.len() {
            Ok(())
        } else {
            Err(PosetError::OutOfRange { id: x, n: self.len() })
        }
    }

    /// `x < y`. Panics on out-of-range ids.
    #[inline]
    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        self.above[x].contains(y)
    }

    #[inline]
    pub fn le(&self, x: Elem, y: Elem) -> bool {
        x == y || self.lt(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: Elem, y: Elem) -> bool {
        self.le(x, y) || self.lt(y, x)
    }

    /// `x ∥ y`: distinct and incomparable.
    #[inline]
    pub fn parallel(&self, x: Elem, y: Elem) -> bool {
        !self.comparable(x, y)
    }

    pub fn relation(&self, x: Elem, y: Elem) -> Result<Relation, PosetError> {
        self.check(x)?;
        self.check(y)?;
        Ok(if x == y {
            Relation::Eq
        } else if self.lt(x, y) {
            Relation::Lt
        } else if self.lt(y, x) {
            Relation::Gt
        } else {
            Relation::Incomparable
        })
    }

    /// Strict down set `D(x)`.
    pub fn strict_below(&self, x: Elem) -> &ElemSet {
        &self.below[x]
    }

    /// Strict up set `U(x)`.
    pub fn strict_above(&self, x: Elem) -> &ElemSet {
        &self.above[x]
    }

    /// Closed down set `D[x]`.
    pub fn closed_below(&self, x: Elem) -> ElemSet {
        let mut s = self.below[x].clone();
        s.insert(x);
        s
    }

    pub fn closed_above(&self, x: Elem) -> ElemSet {
        let mut s = self.above[x].clone();
        s.insert(x);
        s
    }

    pub fn down_up_set(&self, x: Elem, direction: Direction, closed: bool) -> Result<ElemSet, PosetError> {
        self.check(x)?;
        Ok(match (direction, closed) {
            (Direction::Down, false) => self.below[x].clone(),
            (Direction::Down, true) => self.closed_below(x),
            (Direction::Up, false) => self.above[x].clone(),
            (Direction::Up, true) => self.closed_above(x),
        })
    }

    /// `|D[x]|`.
    pub fn down_size(&self, x: Elem) -> usize {
        self.below[x].count_ones(..) + 1
    }

    /// `y` covers `x`.
    pub fn covers_pair(&self, x: Elem, y: Elem) -> bool {
        self.lt(x, y) && self.above[x].is_disjoint(&self.below[y])
    }

    /// All cover pairs `(x, y)` with `y` covering `x`, sorted.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for x in self.elements() {
            for y in self.above[x].ones() {
                if self.above[x].is_disjoint(&self.below[y]) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Elements covered by `y`.
    pub fn lower_covers(&self, y: Elem) -> Vec<Elem> {
        self.below[y]
            .ones()
            .filter(|&x| self.above[x].is_disjoint(&self.below[y]))
            .collect()
    }

    pub fn minimal_elements(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.below[x].is_clear()).collect()
    }

    pub fn maximal_elements(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.above[x].is_clear()).collect()
    }

    pub fn has_unique_minimal(&self) -> bool {
        self.minimal_elements().len() == 1
    }

    pub fn is_chain(&self) -> bool {
        self.elements()
            .all(|x| self.below[x].count_ones(..) + self.above[x].count_ones(..) + 1 == self.len())
    }

    pub fn is_antichain(&self) -> bool {
        self.below.iter().all(|b| b.is_clear())
    }

    /// Number of pairs `x < y`.
    pub fn comparable_pairs(&self) -> usize {
        self.above.iter().map(|a| a.count_ones(..)).sum()
    }

    /// For every element, the number of elements in a longest chain strictly below it.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.len()];
        for x in self.linear_extension() {
            rank[x] = self.below[x].ones().map(|z| rank[z] + 1).max().unwrap_or(0);
        }
        rank
    }

    /// Elements of a linear extension, sorted by `|D[x]|` with ties broken by id.
    pub fn linear_extension(&self) -> Vec<Elem> {
        let mut order: Vec<Elem> = self.elements().collect();
        order.sort_by_key(|&x| (self.below[x].count_ones(..), x));
        order
    }

    /// Subposet induced on `keep`, with elements in increasing id order.
    /// `None` is the empty subposet.
    pub fn induced_subposet(&self, keep: &[Elem]) -> Result<Option<Poset>, PosetError> {
        for &x in keep {
            self.check(x)?;
        }
        let mut ids: Vec<Elem> = keep.to_vec();
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            return Ok(None);
        }
        let labels: Vec<String> = ids.iter().map(|&x| self.labels[x].clone()).collect();
        Poset::from_fn(labels, |a, b| self.lt(ids[a], ids[b])).map(Some)
    }

    /// Subposet induced on the complement of `drop`.
    pub fn without(&self, drop: &ElemSet) -> Result<Option<Poset>, PosetError> {
        let keep: Vec<Elem> = self.elements().filter(|&x| !drop.contains(x)).collect();
        self.induced_subposet(&keep)
    }

    /// Set of all elements.
    pub fn full_set(&self) -> ElemSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Is `set` an up set?
    pub fn is_up_set(&self, set: &ElemSet) -> bool {
        set.ones().all(|x| self.above[x].is_subset(set))
    }

    pub fn is_down_set(&self, set: &ElemSet) -> bool {
        set.ones().all(|x| self.below[x].is_subset(set))
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(x, y)| format!("{}<{}", self.labels[x], self.labels[y]))
            .collect();
        write!(f, "Poset[{}; {}]", self.labels.join(" "), rels.join(" "))
    }
}

fn combined_labels(parts: &[Poset]) -> Vec<String> {
    let mut seen = HashSet::new();
    let distinct = parts
        .iter()
        .flat_map(|p| p.labels.iter())
        .all(|l| seen.insert(l.as_str()));
    if distinct {
        parts.iter().flat_map(|p| p.labels.iter().cloned()).collect()
    } else {
        parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.labels.iter().map(move |l| format!("p{i}.{l}")))
            .collect()
    }
}

fn offsets(parts: &[Poset]) -> Vec<usize> {
    let mut acc = 0;
    parts
        .iter()
        .map(|p| {
            let o = acc;
            acc += p.len();
            o
        })
        .collect()
}

/// `Q_1 + ... + Q_t`. Labels are kept when distinct, else prefixed `p{i}.`.
pub fn disjoint_sum(parts: &[Poset]) -> Result<Poset, PosetError> {
    if parts.is_empty() {
        return Err(PosetError::NoParts);
    }
    let offs = offsets(parts);
    let mut rel = Vec::new();
    for (p, &o) in parts.iter().zip(&offs) {
        for (x, y) in p.covers() {
            rel.push((o + x, o + y));
        }
    }
    Poset::from_relations(combined_labels(parts), &rel)
}

/// `Q_1 < ... < Q_t`.
pub fn vertical_sum(parts: &[Poset]) -> Result<Poset, PosetError> {
    if parts.is_empty() {
        return Err(PosetError::NoParts);
    }
    let offs = offsets(parts);
    let mut rel = Vec::new();
    for (i, (p, &o)) in parts.iter().zip(&offs).enumerate() {
        for (x, y) in p.covers() {
            rel.push((o + x, o + y));
        }
        if let Some(next) = parts.get(i + 1) {
            let no = offs[i + 1];
            for x in p.maximal_elements() {
                for y in next.minimal_elements() {
                    rel.push((o + x, no + y));
                }
            }
        }
    }
    Poset::from_relations(combined_labels(parts), &rel)
}
