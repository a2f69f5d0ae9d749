//! Isomorphism testing and canonical forms.
//!
//! Both start from a color refinement: elements are colored by
//! `(|D(x)|, |U(x)|)` and colors are refined by the multisets of colors
//! strictly below and above until stable. Color ids are assigned by sorting
//! the signatures, so isomorphic posets receive identical colorings.

use std::cmp::Ordering;
use std::fmt;

use super::{Elem, Poset};

fn reindex<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
    let mut distinct: Vec<T> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    sigs.iter()
        .map(|s| distinct.binary_search(s).expect("present") as u32)
        .collect()
}

fn class_count(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&m| m as usize + 1)
}

pub(crate) fn refine(p: &Poset) -> Vec<u32> {
    let init: Vec<(usize, usize)> = p
        .elements()
        .map(|x| (p.strict_below(x).count_ones(..), p.strict_above(x).count_ones(..)))
        .collect();
    let mut colors = reindex(&init);
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = p
            .elements()
            .map(|x| {
                let mut d: Vec<u32> = p.strict_below(x).ones().map(|z| colors[z]).collect();
                let mut u: Vec<u32> = p.strict_above(x).ones().map(|z| colors[z]).collect();
                d.sort_unstable();
                u.sort_unstable();
                (colors[x], d, u)
            })
            .collect();
        let next = reindex(&sigs);
        if class_count(&next) == class_count(&colors) {
            return next;
        }
        colors = next;
    }
}

/// An order-preserving bijection `p -> q`, if one exists. Entry `x` of the
/// result is the image of element `x`.
pub fn isomorphism(p: &Poset, q: &Poset) -> Option<Vec<Elem>> {
    let n = p.len();
    if n != q.len() || p.comparable_pairs() != q.comparable_pairs() {
        return None;
    }
    let cp = refine(p);
    let cq = refine(q);
    let mut sp = cp.clone();
    let mut sq = cq.clone();
    sp.sort_unstable();
    sq.sort_unstable();
    if sp != sq {
        return None;
    }
    let mut class_size = vec![0usize; class_count(&cp)];
    for &c in &cp {
        class_size[c as usize] += 1;
    }
    let mut order: Vec<Elem> = p.elements().collect();
    order.sort_by_key(|&x| (class_size[cp[x] as usize], cp[x], x));

    struct Search<'a> {
        p: &'a Poset,
        q: &'a Poset,
        cp: &'a [u32],
        cq: &'a [u32],
        order: &'a [Elem],
        image: Vec<Option<Elem>>,
        used: Vec<bool>,
    }
    impl Search<'_> {
        fn run(&mut self, k: usize) -> bool {
            let Some(&x) = self.order.get(k) else {
                return true;
            };
            for y in self.q.elements() {
                if self.used[y] || self.cq[y] != self.cp[x] {
                    continue;
                }
                let consistent = self.order[..k].iter().all(|&a| {
                    let b = self.image[a].expect("mapped");
                    self.p.lt(a, x) == self.q.lt(b, y) && self.p.lt(x, a) == self.q.lt(y, b)
                });
                if !consistent {
                    continue;
                }
                self.image[x] = Some(y);
                self.used[y] = true;
                if self.run(k + 1) {
                    return true;
                }
                self.image[x] = None;
                self.used[y] = false;
            }
            false
        }
    }
    let mut s = Search {
        p,
        q,
        cp: &cp,
        cq: &cq,
        order: &order,
        image: vec![None; n],
        used: vec![false; n],
    };
    s.run(0)
        .then(|| s.image.into_iter().map(|y| y.expect("complete")).collect())
}

pub fn are_isomorphic(p: &Poset, q: &Poset) -> bool {
    isomorphism(p, q).is_some()
}

/// Canonical code of a poset: equal for two posets iff they are isomorphic.
///
/// The code is the lexicographically largest relation bit string over all
/// element orderings that list color classes in increasing color order.
/// Cost grows with the factorials of the color class sizes, so this is
/// meant for small posets (up to about ten elements).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    n: usize,
    bits: Vec<bool>,
}

impl CanonicalForm {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Hex digest used for file names.
    pub fn to_hex(&self) -> String {
        let mut out = format!("{:02}-", self.n);
        for chunk in self.bits.chunks(4) {
            let v = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (3 - i)));
            out.push(char::from_digit(v as u32, 16).expect("nibble"));
        }
        out
    }

    /// Decodes the canonical representative with labels `x0, x1, ...`.
    pub fn to_poset(&self) -> Poset {
        let n = self.n;
        let mut rel = Vec::new();
        let mut idx = 0;
        for k in 0..n {
            for i in 0..k {
                if self.bits[idx] {
                    rel.push((i, k));
                }
                if self.bits[idx + 1] {
                    rel.push((k, i));
                }
                idx += 2;
            }
        }
        Poset::from_relations(Poset::default_labels(n), &rel).expect("valid code")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

pub fn canonical_form(p: &Poset) -> CanonicalForm {
    let n = p.len();
    let colors = refine(p);
    let mut class_seq = colors.clone();
    class_seq.sort_unstable();

    struct Search<'a> {
        p: &'a Poset,
        colors: &'a [u32],
        class_seq: &'a [u32],
        perm: Vec<Elem>,
        used: Vec<bool>,
        cur: Vec<bool>,
        best: Option<Vec<bool>>,
    }
    impl Search<'_> {
        // `ahead`: the current prefix already beats the best one.
        fn run(&mut self, ahead: bool) {
            let k = self.perm.len();
            if k == self.p.len() {
                if self.best.as_ref().is_none_or(|b| self.cur > *b) {
                    self.best = Some(self.cur.clone());
                }
                return;
            }
            for x in self.p.elements() {
                if self.used[x] || self.colors[x] != self.class_seq[k] {
                    continue;
                }
                let start = self.cur.len();
                for i in 0..k {
                    let y = self.perm[i];
                    self.cur.push(self.p.lt(y, x));
                    self.cur.push(self.p.lt(x, y));
                }
                let cmp = match (&self.best, ahead) {
                    (Some(best), false) => self.cur[start..].cmp(&best[start..self.cur.len()]),
                    _ => Ordering::Greater,
                };
                if cmp != Ordering::Less {
                    self.perm.push(x);
                    self.used[x] = true;
                    self.run(cmp == Ordering::Greater);
                    self.used[x] = false;
                    self.perm.pop();
                }
                self.cur.truncate(start);
            }
        }
    }
    let mut s = Search {
        p,
        colors: &colors,
        class_seq: &class_seq,
        perm: Vec::with_capacity(n),
        used: vec![false; n],
        cur: Vec::with_capacity(n * n),
        best: None,
    };
    s.run(false);
    CanonicalForm {
        n,
        bits: s.best.expect("at least one ordering"),
    }
}
