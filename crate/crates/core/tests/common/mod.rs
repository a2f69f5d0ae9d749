//! Brute-force oracles that share no code with the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use poset_cube::Poset;

/// Strict order as bit rows: bit `y` of `lt[x]` is set iff `x < y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rel {
    pub n: usize,
    pub lt: Vec<u32>,
}

impl Rel {
    pub fn of(p: &Poset) -> Rel {
        let n = p.len();
        let lt = (0..n)
            .map(|x| (0..n).filter(|&y| p.lt(x, y)).fold(0u32, |m, y| m | 1 << y))
            .collect();
        Rel { n, lt }
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.lt[x] >> y & 1 == 1
    }

    pub fn to_poset(&self) -> Poset {
        Poset::from_fn(Poset::default_labels(self.n), |x, y| self.lt(x, y)).unwrap()
    }

    pub fn permuted(&self, perm: &[usize]) -> Rel {
        let mut lt = vec![0u32; self.n];
        for x in 0..self.n {
            for y in 0..self.n {
                if self.lt(x, y) {
                    lt[perm[x]] |= 1 << perm[y];
                }
            }
        }
        Rel { n: self.n, lt }
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Smallest relation code over all relabelings.
pub fn iso_code(r: &Rel, perms: &[Vec<usize>]) -> Vec<u32> {
    perms.iter().map(|p| r.permuted(p).lt).min().unwrap()
}

/// Every strict order on `{0..n-1}`, by adding element `k` with a down set
/// `D` and an up set `U` among `0..k`.
pub fn labeled_posets(n: usize) -> Vec<Rel> {
    let mut level = vec![Rel { n: 0, lt: vec![] }];
    for k in 0..n {
        let mut next = Vec::new();
        for r in &level {
            for d in 0u32..1 << k {
                for u in 0u32..1 << k {
                    if d & u != 0 {
                        continue;
                    }
                    let down_closed =
                        (0..k).all(|x| d >> x & 1 == 0 || (0..k).all(|z| !r.lt(z, x) || d >> z & 1 == 1));
                    let up_closed = (0..k).all(|x| u >> x & 1 == 0 || r.lt[x] & !u == 0);
                    let below_all = (0..k).all(|x| d >> x & 1 == 0 || r.lt[x] & u == u);
                    if !(down_closed && up_closed && below_all) {
                        continue;
                    }
                    let mut lt: Vec<u32> = r.lt.clone();
                    for (x, row) in lt.iter_mut().enumerate() {
                        if d >> x & 1 == 1 {
                            *row |= 1 << k;
                        }
                    }
                    lt.push(u);
                    next.push(Rel { n: k + 1, lt });
                }
            }
        }
        level = next;
    }
    level
}

/// Isomorphism classes of `n`-element posets as codes.
pub fn iso_classes(n: usize) -> BTreeSet<Vec<u32>> {
    let perms = permutations(n);
    labeled_posets(n).iter().map(|r| iso_code(r, &perms)).collect()
}

/// Every valid assignment of subsets of `[w]` using all of `[w]`, as masks.
pub fn for_each_rep(r: &Rel, w: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(r: &Rel, w: usize, sets: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        let x = sets.len();
        if x == r.n {
            let full = if w == 32 { u32::MAX } else { (1u32 << w) - 1 };
            if sets.iter().fold(0, |a, s| a | s) == full {
                f(sets);
            }
            return;
        }
        for s in 0u32..1 << w {
            let ok = (0..x).all(|y| {
                let t = sets[y];
                (t & !s == 0) == r.lt(y, x) && (s & !t == 0) == r.lt(x, y)
            });
            if ok {
                sets.push(s);
                rec(r, w, sets, f);
                sets.pop();
            }
        }
    }
    rec(r, w, &mut Vec::new(), f);
}

/// `(ground, sizes)` of every representation with ground at most `max_w`.
pub fn profiles(r: &Rel, max_w: usize) -> HashSet<(usize, Vec<usize>)> {
    let mut out = HashSet::new();
    for w in 0..=max_w {
        for_each_rep(r, w, &mut |sets| {
            out.insert((w, sets.iter().map(|s| s.count_ones() as usize).collect()));
        });
    }
    out
}

pub fn below(a: &(usize, Vec<usize>), b: &(usize, Vec<usize>)) -> bool {
    a != b && a.0 <= b.0 && a.1.iter().zip(&b.1).all(|(x, y)| x <= y)
}

#[derive(Debug, PartialEq, Eq)]
pub struct Values {
    pub ch: usize,
    pub dim2: usize,
    pub cw: usize,
    pub iir: usize,
}

/// The four parameters over representations with ground at most `n + 1`.
pub fn values(r: &Rel) -> Values {
    let all = profiles(r, r.n + 1);
    let max_size = |p: &(usize, Vec<usize>)| p.1.iter().copied().max().unwrap_or(0);
    let ch = all.iter().map(max_size).min().unwrap();
    let dim2 = all.iter().map(|p| p.0).min().unwrap();
    let cw = all
        .iter()
        .filter(|p| max_size(p) <= ch)
        .map(|p| p.0)
        .min()
        .unwrap();
    let iir = all
        .iter()
        .filter(|p| !all.iter().any(|q| below(q, p)))
        .map(|p| p.0)
        .max()
        .unwrap();
    Values { ch, dim2, cw, iir }
}
