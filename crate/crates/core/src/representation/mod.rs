//! Inclusion representations: an assignment of a finite set `S_x` of ground
//! labels to every poset element such that `x <= y` iff `S_x ⊆ S_y`.
//!
//! Sets are bit sets over the indices of [`Representation::ground`]. The
//! ground is always exactly the union of the sets.

mod compose;
mod json;
mod reduce;

use std::collections::{HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::poset::{Elem, ElemSet, Poset};

pub use compose::{compose_disjoint_reps, compose_vertical_reps, split_block_reps, split_component_reps};
pub use json::{parse_representation, representation_to_json};
pub use reduce::{key_step_reduce, strict_reduction_from_violation, KeyStep, PropertyViolation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("ground label `{0}` listed twice")]
    DuplicateLabel(String),
    #[error("ground label `{0}` is not used by any set")]
    OrphanLabel(String),
    #[error("set member `{0}` is not in the ground")]
    UnknownLabel(String),
    #[error("representation has {got} sets but the poset has {expected} elements")]
    WrongElementCount { expected: usize, got: usize },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("no set given for element `{0}`")]
    MissingElement(String),
    #[error("not an inclusion representation: {0}")]
    Invalid(Violation),
    #[error("ground label `{0}` appears in more than one part")]
    OverlappingGrounds(String),
    #[error("element `{0}` is the unique maximal element")]
    UniqueMaximal(String),
    #[error("supplied witness is not a violation: {0}")]
    NotAViolation(String),
    #[error("element id {0} out of range")]
    OutOfRange(Elem),
    #[error("malformed representation JSON: {0}")]
    Json(String),
}

/// The first pair of elements on which a family fails to represent a poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub x: String,
    pub y: String,
    /// `true`: `x < y` in the poset but `S_x ⊄ S_y`.
    /// `false`: `x ≰ y` but `S_x ⊆ S_y`.
    pub missing_inclusion: bool,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.missing_inclusion {
            write!(
                f,
                "{} < {} but its set is not contained in the other",
                self.x, self.y
            )
        } else {
            write!(
                f,
                "{} is not below {} but its set is contained in the other",
                self.x, self.y
            )
        }
    }
}

/// Ground size together with every set size; two representations are
/// equivalent iff their profiles are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Profile {
    pub ground: usize,
    pub sizes: Vec<usize>,
}

impl Profile {
    /// Componentwise `<=`.
    pub fn le(&self, other: &Profile) -> bool {
        self.ground <= other.ground && self.sizes.iter().zip(&other.sizes).all(|(a, b)| a <= b)
    }

    /// `le` and not equal.
    pub fn strictly_below(&self, other: &Profile) -> bool {
        self.le(other) && self != other
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Representation {
    ground: Vec<String>,
    sets: Vec<FixedBitSet>,
}

impl Representation {
    /// `sets[x]` holds indices into `ground`. Every ground label must occur
    /// in some set.
    pub fn new(ground: Vec<String>, sets: Vec<FixedBitSet>) -> Result<Self, RepError> {
        let w = ground.len();
        let mut seen = HashSet::with_capacity(w);
        for l in &ground {
            if !seen.insert(l.as_str()) {
                return Err(RepError::DuplicateLabel(l.clone()));
            }
        }
        let mut used = FixedBitSet::with_capacity(w);
        let sets: Vec<FixedBitSet> = sets
            .into_iter()
            .map(|mut s| {
                if let Some(bad) = s.ones().find(|&i| i >= w) {
                    return Err(RepError::UnknownLabel(format!("#{bad}")));
                }
                s.grow(w);
                used.union_with(&s);
                Ok(s)
            })
            .collect::<Result<_, _>>()?;
        if let Some(i) = (0..w).find(|&i| !used.contains(i)) {
            return Err(RepError::OrphanLabel(ground[i].clone()));
        }
        Ok(Representation { ground, sets })
    }

    /// Builds a representation from labelled sets; the ground lists labels in
    /// order of first appearance.
    pub fn from_label_sets<S: AsRef<str>>(sets: &[Vec<S>]) -> Self {
        let mut ground: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for set in sets {
            for l in set {
                let l = l.as_ref();
                if !index.contains_key(l) {
                    index.insert(l.to_owned(), ground.len());
                    ground.push(l.to_owned());
                }
            }
        }
        let w = ground.len();
        let sets = sets
            .iter()
            .map(|set| {
                let mut b = FixedBitSet::with_capacity(w);
                for l in set {
                    b.insert(index[l.as_ref()]);
                }
                b
            })
            .collect();
        Representation { ground, sets }
    }

    /// Builds a representation from sets over `ground` that may leave some
    /// labels unused; unused labels are dropped.
    pub fn compact(ground: &[String], sets: Vec<FixedBitSet>) -> Self {
        let mut used = FixedBitSet::with_capacity(ground.len());
        for s in &sets {
            used.union_with(s);
        }
        let keep: Vec<usize> = used.ones().collect();
        let mut remap = vec![usize::MAX; ground.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let w = keep.len();
        let sets = sets
            .into_iter()
            .map(|s| {
                let mut b = FixedBitSet::with_capacity(w);
                for i in s.ones() {
                    b.insert(remap[i]);
                }
                b
            })
            .collect();
        Representation {
            ground: keep.iter().map(|&i| ground[i].clone()).collect(),
            sets,
        }
    }

    /// Number of represented elements.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn ground_size(&self) -> usize {
        self.ground.len()
    }

    pub fn set(&self, x: Elem) -> &FixedBitSet {
        &self.sets[x]
    }

    pub fn sets(&self) -> &[FixedBitSet] {
        &self.sets
    }

    pub fn set_size(&self, x: Elem) -> usize {
        self.sets[x].count_ones(..)
    }

    pub fn max_set_size(&self) -> usize {
        (0..self.len()).map(|x| self.set_size(x)).max().unwrap_or(0)
    }

    pub fn set_labels(&self, x: Elem) -> Vec<&str> {
        self.sets[x].ones().map(|i| self.ground[i].as_str()).collect()
    }

    pub fn profile(&self) -> Profile {
        Profile {
            ground: self.ground_size(),
            sizes: (0..self.len()).map(|x| self.set_size(x)).collect(),
        }
    }

    /// Renames ground labels positionally.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Self, RepError> {
        assert_eq!(labels.len(), self.ground.len(), "label count must match");
        Representation::new(labels, self.sets.clone())
    }

    /// Renames ground labels with `prefix` prepended.
    pub fn prefixed(&self, prefix: &str) -> Self {
        Representation {
            ground: self.ground.iter().map(|l| format!("{prefix}{l}")).collect(),
            sets: self.sets.clone(),
        }
    }

    /// Membership column of ground label `a`: the elements whose set holds it.
    pub fn column(&self, a: usize) -> ElemSet {
        let mut col = FixedBitSet::with_capacity(self.len());
        for (x, s) in self.sets.iter().enumerate() {
            if s.contains(a) {
                col.insert(x);
            }
        }
        col
    }

    /// Builds the representation whose labels are the given membership
    /// columns (each an up set of the represented poset).
    pub(crate) fn from_columns(n: usize, columns: &[ElemSet], labels: Vec<String>) -> Self {
        let w = columns.len();
        let mut sets = vec![FixedBitSet::with_capacity(w); n];
        for (a, col) in columns.iter().enumerate() {
            for x in col.ones() {
                sets[x].insert(a);
            }
        }
        Representation { ground: labels, sets }
    }

    /// Reuses `pool` labels for a representation with at most that many
    /// labels, falling back to fresh `@k` labels when the pool is short.
    pub(crate) fn with_labels_from(&self, pool: &[String]) -> Self {
        let mut labels: Vec<String> = pool.iter().take(self.ground_size()).cloned().collect();
        let mut taken: HashSet<String> = labels.iter().cloned().collect();
        let mut k = 0;
        while labels.len() < self.ground_size() {
            let fresh = fresh_label(&taken, &mut k);
            taken.insert(fresh.clone());
            labels.push(fresh);
        }
        Representation {
            ground: labels,
            sets: self.sets.clone(),
        }
    }
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = (0..self.len())
            .map(|x| format!("{{{}}}", self.set_labels(x).join(",")))
            .collect();
        write!(f, "Rep[{}]", sets.join(" "))
    }
}

/// Smallest `@k` (starting the scan at `*next`) not in `taken`.
pub(crate) fn fresh_label(taken: &HashSet<String>, next: &mut usize) -> String {
    loop {
        let cand = format!("@{next}");
        *next += 1;
        if !taken.contains(&cand) {
            return cand;
        }
    }
}

/// `⟨D_P[x] : x ∈ P⟩`, with the element labels as ground labels.
pub fn canonical_representation(p: &Poset) -> Representation {
    Representation {
        ground: p.labels().to_vec(),
        sets: p.elements().map(|x| p.closed_below(x)).collect(),
    }
}

fn check_len(p: &Poset, r: &Representation) -> Result<(), RepError> {
    if p.len() != r.len() {
        return Err(RepError::WrongElementCount {
            expected: p.len(),
            got: r.len(),
        });
    }
    Ok(())
}

/// Checks both directions of `x <= y iff S_x ⊆ S_y` over all ordered pairs.
pub fn validate_representation(p: &Poset, r: &Representation) -> Result<(), RepError> {
    check_len(p, r)?;
    for x in p.elements() {
        for y in p.elements() {
            if x == y {
                continue;
            }
            let sub = r.sets[x].is_subset(&r.sets[y]);
            if sub != p.lt(x, y) {
                return Err(RepError::Invalid(Violation {
                    x: p.label(x).to_owned(),
                    y: p.label(y).to_owned(),
                    missing_inclusion: !sub,
                }));
            }
        }
    }
    Ok(())
}

pub fn is_valid(p: &Poset, r: &Representation) -> bool {
    validate_representation(p, r).is_ok()
}

/// Why a comparison came out as it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SizeWitness {
    /// Not a reduction: the first ground is larger.
    GroundLarger { first: usize, second: usize },
    /// Not a reduction: this element's set is larger.
    SetLarger {
        element: Elem,
        first: usize,
        second: usize,
    },
    /// Strict: the first ground is smaller.
    GroundSmaller { first: usize, second: usize },
    /// Strict: this element's set is smaller.
    SetSmaller {
        element: Elem,
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComparisonVerdict {
    pub is_reduction: bool,
    pub is_strict: bool,
    pub is_equivalent: bool,
    pub witness: Option<SizeWitness>,
}

/// Compares size profiles: is `r` a (strict) reduction of `r2`, and are
/// they equivalent?
pub fn compare_profiles(r: &Profile, r2: &Profile) -> ComparisonVerdict {
    let mut not_reduction = None;
    if r.ground > r2.ground {
        not_reduction = Some(SizeWitness::GroundLarger {
            first: r.ground,
            second: r2.ground,
        });
    } else if let Some((x, (&a, &b))) = r
        .sizes
        .iter()
        .zip(&r2.sizes)
        .enumerate()
        .find(|(_, (a, b))| a > b)
    {
        not_reduction = Some(SizeWitness::SetLarger {
            element: x,
            first: a,
            second: b,
        });
    }
    let is_reduction = not_reduction.is_none();
    let is_equivalent = r == r2;
    let is_strict = is_reduction && !is_equivalent;
    let witness = if !is_reduction {
        not_reduction
    } else if is_strict {
        if r.ground < r2.ground {
            Some(SizeWitness::GroundSmaller {
                first: r.ground,
                second: r2.ground,
            })
        } else {
            r.sizes
                .iter()
                .zip(&r2.sizes)
                .enumerate()
                .find(|(_, (a, b))| a < b)
                .map(|(x, (&a, &b))| SizeWitness::SetSmaller {
                    element: x,
                    first: a,
                    second: b,
                })
        }
    } else {
        None
    };
    ComparisonVerdict {
        is_reduction,
        is_strict,
        is_equivalent,
        witness,
    }
}

pub fn compare_representations(
    p: &Poset,
    r: &Representation,
    r2: &Representation,
) -> Result<ComparisonVerdict, RepError> {
    validate_representation(p, r)?;
    validate_representation(p, r2)?;
    Ok(compare_profiles(&r.profile(), &r2.profile()))
}

/// A bijection between the grounds carrying every `r.S_x` onto `r2.S_x`.
/// Entry `a` is the index in `r2.ground()` of the image of `r.ground()[a]`.
///
/// Backtracking over labels; a label may only map to a label with the same
/// membership column.
pub fn representation_isomorphism(
    p: &Poset,
    r: &Representation,
    r2: &Representation,
) -> Result<Option<Vec<usize>>, RepError> {
    validate_representation(p, r)?;
    validate_representation(p, r2)?;
    if r.ground_size() != r2.ground_size() {
        return Ok(None);
    }
    let cols: Vec<ElemSet> = (0..r.ground_size()).map(|a| r.column(a)).collect();
    let cols2: Vec<ElemSet> = (0..r2.ground_size()).map(|b| r2.column(b)).collect();

    fn search(
        a: usize,
        cols: &[ElemSet],
        cols2: &[ElemSet],
        used: &mut [bool],
        image: &mut Vec<usize>,
    ) -> bool {
        if a == cols.len() {
            return true;
        }
        for b in 0..cols2.len() {
            if used[b] || cols[a] != cols2[b] {
                continue;
            }
            used[b] = true;
            image.push(b);
            if search(a + 1, cols, cols2, used, image) {
                return true;
            }
            image.pop();
            used[b] = false;
        }
        false
    }
    let mut used = vec![false; cols2.len()];
    let mut image = Vec::with_capacity(cols.len());
    Ok(search(0, &cols, &cols2, &mut used, &mut image).then_some(image))
}

pub fn representations_isomorphic(
    p: &Poset,
    r: &Representation,
    r2: &Representation,
) -> Result<bool, RepError> {
    representation_isomorphism(p, r, r2).map(|f| f.is_some())
}
