//! Named poset families, small-poset enumeration and random inputs.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::poset::{canonical_form, disjoint_sum, vertical_sum, CanonicalForm, Elem, Poset};
use crate::representation::Representation;
use crate::solvers::{binomial, colex_subsets};

/// Largest poset [`gen_example_1_4`] will build.
pub const MAX_GENERATED: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("invalid sigma sequence: {0}")]
    InvalidSigma(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicKind {
    Chain,
    Antichain,
    /// One element below an antichain of the given size.
    V,
    /// An antichain of the given size below one element.
    Lambda,
    /// A 2-chain plus two single elements; the size is ignored.
    Z,
    /// A chain of the given size plus one single element.
    B,
}

fn labelled(p: Poset, labels: Vec<String>) -> Poset {
    p.with_labels(labels).expect("distinct labels")
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

pub fn gen_basic(kind: BasicKind, size: usize) -> Result<Poset, GenError> {
    let need = |min: usize| {
        if size < min {
            Err(GenError::OutOfRange(format!("size {size} < {min} for {kind:?}")))
        } else {
            Ok(())
        }
    };
    let anti = |k: usize| Poset::antichain(k).expect("positive");
    Ok(match kind {
        BasicKind::Chain => {
            need(1)?;
            Poset::chain(size).expect("positive")
        }
        BasicKind::Antichain => {
            need(1)?;
            anti(size)
        }
        BasicKind::V => {
            need(1)?;
            let mut l = vec!["bot".to_owned()];
            l.extend(names("a", size));
            labelled(vertical_sum(&[Poset::single(), anti(size)]).expect("parts"), l)
        }
        BasicKind::Lambda => {
            need(1)?;
            let mut l = names("a", size);
            l.push("top".to_owned());
            labelled(vertical_sum(&[anti(size), Poset::single()]).expect("parts"), l)
        }
        BasicKind::Z => {
            let p = disjoint_sum(&[Poset::chain(2).expect("2"), Poset::single(), Poset::single()])
                .expect("parts");
            labelled(p, vec!["c0".into(), "c1".into(), "s0".into(), "s1".into()])
        }
        BasicKind::B => {
            need(2)?;
            let p = disjoint_sum(&[Poset::chain(size).expect("positive"), Poset::single()]).expect("parts");
            let mut l = names("c", size);
            l.push("s".to_owned());
            labelled(p, l)
        }
    })
}

/// An antichain of `C(2t+1, t)` elements below one top element.
pub fn gen_example_1_4(t: usize) -> Result<Poset, GenError> {
    if t == 0 {
        return Err(GenError::OutOfRange("t must be positive".into()));
    }
    let s = binomial(2 * t as u64 + 1, t as u64);
    if s >= MAX_GENERATED as u64 {
        return Err(GenError::OutOfRange(format!(
            "t = {t} gives {s} elements, above the limit of {MAX_GENERATED}"
        )));
    }
    gen_basic(BasicKind::Lambda, s as usize)
}

/// Height-2 poset with minimals `x1..xn` and maximals `y1..ym`, where
/// `x_i < y_j` iff `i <= a_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaSpec {
    pub n: usize,
    pub a: Vec<usize>,
}

impl SigmaSpec {
    pub fn new(n: usize, a: Vec<usize>) -> Result<Self, GenError> {
        let spec = SigmaSpec { n, a };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidSigma(m));
        let m = self.a.len();
        if m < 3 || self.n < 3 {
            return bad(format!("need m >= 3 and n >= 3, got m = {m}, n = {}", self.n));
        }
        if self.a.windows(2).any(|w| w[0] > w[1]) {
            return bad("sequence must be non-decreasing".into());
        }
        if self.a[0] == 0 {
            return bad("entries must be positive".into());
        }
        if self.a[0] >= self.n {
            return bad(format!("a1 = {} must be below n = {}", self.a[0], self.n));
        }
        if self.a[m - 2] != self.n || self.a[m - 1] != self.n {
            return bad("the last two entries must equal n".into());
        }
        Ok(())
    }

    /// The 20-element instance `σ = (1,1,1,2,2,2,2,4,4,4,8,8)`, `n = 8`.
    pub fn figure_2() -> Self {
        SigmaSpec {
            n: 8,
            a: vec![1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 8, 8],
        }
    }

    /// Every valid spec with at most `max_elements` elements.
    pub fn all_up_to(max_elements: usize) -> Vec<SigmaSpec> {
        let mut out = Vec::new();
        for n in 3..max_elements {
            for m in 3..=max_elements.saturating_sub(n) {
                // a_1..a_{m-2} non-decreasing in [1, n]; a_1 < n
                let mut prefix = Vec::new();
                fn rec(n: usize, len: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                    if prefix.len() == len {
                        out.push(prefix.clone());
                        return;
                    }
                    let lo = prefix.last().copied().unwrap_or(1);
                    let hi = if prefix.is_empty() { n - 1 } else { n };
                    for v in lo..=hi {
                        prefix.push(v);
                        rec(n, len, prefix, out);
                        prefix.pop();
                    }
                }
                let mut seqs = Vec::new();
                rec(n, m - 2, &mut prefix, &mut seqs);
                for mut a in seqs {
                    a.extend([n, n]);
                    out.push(SigmaSpec { n, a });
                }
            }
        }
        out
    }

    /// The sequence behind a height-2 poset whose maximal elements have
    /// nested down sets, read off up to isomorphism. The result is not
    /// validated, so shapes with too few minimal or maximal elements come
    /// back as well.
    pub fn recognize(p: &Poset) -> Option<SigmaSpec> {
        let mins = p.minimal_elements();
        let tops: Vec<Elem> = p.elements().filter(|x| !mins.contains(x)).collect();
        if tops.is_empty() || tops.iter().any(|&y| !p.strict_above(y).is_clear()) {
            return None;
        }
        let mut downs: Vec<&FixedBitSet> = tops.iter().map(|&y| p.strict_below(y)).collect();
        downs.sort_by_key(|d| d.count_ones(..));
        if downs.windows(2).any(|w| !w[0].is_subset(w[1])) {
            return None;
        }
        let a = downs.iter().map(|d| d.count_ones(..)).collect();
        Some(SigmaSpec { n: mins.len(), a })
    }
}

pub fn gen_sigma(spec: &SigmaSpec) -> Result<Poset, GenError> {
    spec.validate()?;
    let n = spec.n;
    let m = spec.a.len();
    let mut labels: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    labels.extend((1..=m).map(|j| format!("y{j}")));
    let mut rel = Vec::new();
    for (j, &aj) in spec.a.iter().enumerate() {
        for i in 0..aj {
            rel.push((i, n + j));
        }
    }
    Ok(Poset::from_relations(labels, &rel).expect("height-2 relation"))
}

/// The poset and representation behind the equivalent-but-not-isomorphic
/// example: `C(2s, s)` minimals carrying the `s`-subsets of `[2s]`, and two
/// maximals carrying `{1..s+1}` and `{i..i+s}`.
///
/// Minimals are indexed so that the poset does not depend on `i`: first the
/// `s + 1` below the first maximal, then the `s + 1` below the second, then
/// the rest, each group in colex order of its sets.
pub fn gen_equivalence_example(s: usize, i: usize) -> Result<(Poset, Representation), GenError> {
    if !(3..=6).contains(&s) {
        return Err(GenError::OutOfRange(format!("s = {s} not in 3..=6")));
    }
    if !(3..=s).contains(&i) {
        return Err(GenError::OutOfRange(format!("i = {i} not in 3..={s}")));
    }
    let ground = 2 * s;
    let t = binomial(ground as u64, s as u64) as usize;
    let mut s1 = FixedBitSet::with_capacity(ground);
    s1.insert_range(0..s + 1);
    let mut s2 = FixedBitSet::with_capacity(ground);
    s2.insert_range(i - 1..i + s);

    let subsets = colex_subsets(ground, s, t);
    let under = |top: &FixedBitSet| -> Vec<FixedBitSet> {
        subsets.iter().filter(|b| b.is_subset(top)).cloned().collect()
    };
    let (g1, g2) = (under(&s1), under(&s2));
    if g1.iter().any(|b| g2.contains(b)) {
        return Err(GenError::OutOfRange(
            "the two maximals share a lower cover".into(),
        ));
    }
    let rest: Vec<FixedBitSet> = subsets
        .iter()
        .filter(|b| !g1.contains(b) && !g2.contains(b))
        .cloned()
        .collect();

    let mut labels = names("m", t);
    labels.extend(["y1".to_owned(), "y2".to_owned()]);
    let k = s + 1;
    let mut rel = Vec::new();
    for x in 0..k {
        rel.push((x, t));
        rel.push((k + x, t + 1));
    }
    let p = Poset::from_relations(labels, &rel).expect("height-2 relation");

    let mut sets = g1;
    sets.extend(g2);
    sets.extend(rest);
    sets.push(s1);
    sets.push(s2);
    let r = Representation::new((1..=ground).map(|v| v.to_string()).collect(), sets)
        .expect("every label is used");
    Ok((p, r))
}

/// Every poset on `n` elements up to isomorphism, as canonical
/// representatives sorted by canonical form.
///
/// Size `k + 1` posets come from size `k` posets by adding a maximal
/// element above an arbitrary down set.
pub fn enumerate_posets(n: usize) -> Result<Vec<Poset>, GenError> {
    Ok(enumerate_forms(n)?.into_iter().map(|f| f.to_poset()).collect())
}

/// Canonical forms of all `n`-element posets, sorted.
pub fn enumerate_forms(n: usize) -> Result<Vec<CanonicalForm>, GenError> {
    if !(1..=7).contains(&n) {
        return Err(GenError::OutOfRange(format!("n = {n} not in 1..=7")));
    }
    let mut level = vec![canonical_form(&Poset::single())];
    for _ in 1..n {
        let next: Vec<Vec<CanonicalForm>> = level
            .par_iter()
            .map(|f| {
                let q = f.to_poset();
                let k = q.len();
                let below: Vec<u64> = q
                    .elements()
                    .map(|x| q.strict_below(x).ones().fold(0u64, |m, z| m | 1 << z))
                    .collect();
                (0u64..1 << k)
                    .filter(|&d| (0..k).all(|x| d >> x & 1 == 0 || below[x] & !d == 0))
                    .map(|d| {
                        let ext = Poset::from_fn(Poset::default_labels(k + 1), |a, b| {
                            if b == k {
                                a < k && d >> a & 1 == 1
                            } else {
                                a < k && q.lt(a, b)
                            }
                        })
                        .expect("extension is a poset");
                        canonical_form(&ext)
                    })
                    .collect()
            })
            .collect();
        let mut all: Vec<CanonicalForm> = next.into_iter().flatten().collect();
        all.sort();
        all.dedup();
        level = all;
    }
    Ok(level)
}

/// `count` distinct posets drawn uniformly from the enumeration of size `n`
/// (all of them when `count` is at least the total), in draw order.
pub fn sample_posets(n: usize, count: usize, seed: u64) -> Result<Vec<Poset>, GenError> {
    let all = enumerate_forms(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = count.min(all.len());
    Ok(rand::seq::index::sample(&mut rng, all.len(), k)
        .into_iter()
        .map(|i| all[i].to_poset())
        .collect())
}

/// A random valid representation of `p`: random up sets are added until
/// every pair `x ≰ y` is separated, a few extra up sets are mixed in, and
/// the ground is shuffled.
pub fn random_representation<R: Rng + ?Sized>(p: &Poset, rng: &mut R) -> Representation {
    let n = p.len();
    let up_closure = |seed: &[Elem]| -> FixedBitSet {
        let mut u = FixedBitSet::with_capacity(n);
        for &z in seed {
            u.union_with(&p.closed_above(z));
        }
        u
    };
    let mut columns: Vec<FixedBitSet> = Vec::new();
    let separated =
        |cols: &[FixedBitSet], x: Elem, y: Elem| cols.iter().any(|c| c.contains(x) && !c.contains(y));
    loop {
        let open: Vec<(Elem, Elem)> = p
            .elements()
            .flat_map(|x| p.elements().map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && !p.lt(x, y) && !separated(&columns, x, y))
            .collect();
        let Some(&(x, y)) = open.choose(rng) else {
            break;
        };
        let mut seed = vec![x];
        seed.extend(p.elements().filter(|&z| !p.le(z, y) && rng.gen_bool(0.3)));
        columns.push(up_closure(&seed));
    }
    let extra = rng.gen_range(0..=2);
    for _ in 0..extra {
        let seed: Vec<Elem> = p.elements().filter(|_| rng.gen_bool(0.4)).collect();
        if !seed.is_empty() {
            columns.push(up_closure(&seed));
        }
    }
    columns.shuffle(rng);
    let labels: Vec<String> = (0..columns.len()).map(|i| format!("g{i}")).collect();
    Representation::from_columns(n, &columns, labels)
}

/// Seeded stream of random representations of `p`.
pub fn random_representations(p: &Poset, count: usize, seed: u64) -> Vec<Representation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_representation(p, &mut rng)).collect()
}

/// Posets keyed by canonical form; helper for membership tests.
pub fn index_by_form(posets: &[Poset]) -> BTreeMap<CanonicalForm, usize> {
    posets
        .iter()
        .enumerate()
        .map(|(i, p)| (canonical_form(p), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterization::in_miir;
    use crate::poset::component_decomposition;
    use crate::representation::{is_valid, validate_representation};

    #[test]
    fn basics() {
        assert_eq!(gen_basic(BasicKind::Chain, 3).unwrap().covers().len(), 2);
        let z = gen_basic(BasicKind::Z, 0).unwrap();
        assert_eq!((z.len(), component_decomposition(&z).len()), (4, 3));
        let b = gen_basic(BasicKind::B, 2).unwrap();
        assert_eq!((b.len(), component_decomposition(&b).len()), (3, 2));
        assert!(gen_basic(BasicKind::B, 1).is_err());
        assert!(gen_basic(BasicKind::Chain, 0).is_err());
    }

    #[test]
    fn example_1_4_sizes() {
        assert_eq!(gen_example_1_4(1).unwrap().len(), 4);
        assert_eq!(gen_example_1_4(2).unwrap().len(), 11);
        assert_eq!(gen_example_1_4(3).unwrap().len(), 36);
        assert!(gen_example_1_4(9).is_err());
    }

    #[test]
    fn sigma() {
        let p = gen_sigma(&SigmaSpec::figure_2()).unwrap();
        assert_eq!(p.len(), 20);
        assert!(in_miir(&p).holds);
        let small = gen_sigma(&SigmaSpec::new(3, vec![1, 3, 3]).unwrap()).unwrap();
        assert_eq!(small.len(), 6);
        assert!(SigmaSpec::new(2, vec![2, 2, 2]).is_err());
        assert!(SigmaSpec::new(3, vec![3, 3, 3]).is_err());
        assert!(SigmaSpec::new(3, vec![2, 1, 3, 3]).is_err());
    }

    #[test]
    fn equivalence_example() {
        let (p, r) = gen_equivalence_example(3, 3).unwrap();
        assert_eq!(p.len(), 22);
        assert_eq!(r.ground_size(), 6);
        validate_representation(&p, &r).unwrap();
        let (p4, r4) = gen_equivalence_example(4, 4).unwrap();
        let (p3, r3) = gen_equivalence_example(4, 3).unwrap();
        assert_eq!(p3, p4);
        assert!(is_valid(&p3, &r3) && is_valid(&p4, &r4));
        assert!(gen_equivalence_example(3, 2).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| enumerate_posets(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 63]);
        assert!(enumerate_posets(0).is_err());
        assert!(enumerate_posets(8).is_err());
    }

    #[test]
    fn samples_are_deterministic() {
        let a = sample_posets(5, 10, 7).unwrap();
        let b = sample_posets(5, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(index_by_form(&a).len(), 10);
    }

    #[test]
    fn random_representations_are_valid() {
        for p in enumerate_posets(4).unwrap() {
            for r in random_representations(&p, 5, 1) {
                assert!(is_valid(&p, &r), "{p:?} {r:?}");
            }
        }
    }
}
