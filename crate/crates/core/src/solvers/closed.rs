//! Closed forms for chains and antichains.

use fixedbitset::FixedBitSet;

use super::{Computed, Method, Param};
use crate::poset::Poset;
use crate::representation::Representation;

/// Least `s` with `C(s, ⌊s/2⌋) >= count`; 0 for a single element.
pub fn sperner_dim2_antichain(count: u64) -> usize {
    assert!(count >= 1, "count must be positive");
    let mut s = 0usize;
    while central_binomial(s) < count {
        s += 1;
    }
    s
}

/// `C(s, ⌊s/2⌋)`, saturating.
pub fn central_binomial(s: usize) -> u64 {
    binomial(s as u64, (s / 2) as u64)
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn numbered(w: usize) -> Vec<String> {
    (1..=w).map(|i| i.to_string()).collect()
}

/// The `count` first `k`-subsets of `[s]` in colex order, as bit sets.
pub(crate) fn colex_subsets(s: usize, k: usize, count: usize) -> Vec<FixedBitSet> {
    let mut out = Vec::with_capacity(count);
    let mut mask: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    while out.len() < count {
        let mut b = FixedBitSet::with_capacity(s);
        for i in 0..s {
            if mask >> i & 1 == 1 {
                b.insert(i);
            }
        }
        out.push(b);
        if mask == 0 {
            break;
        }
        // next mask with the same popcount
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

fn singletons(n: usize) -> Representation {
    let sets = (0..n)
        .map(|x| {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert(x);
            b
        })
        .collect();
    Representation::compact(&numbered(n), sets)
}

/// Prefix representation of a chain in its linear order.
fn prefixes(p: &Poset) -> Representation {
    let n = p.len();
    let mut sets = vec![FixedBitSet::with_capacity(n - 1); n];
    for (k, &x) in p.linear_extension().iter().enumerate() {
        sets[x].insert_range(..k);
    }
    Representation::compact(&numbered(n - 1), sets)
}

/// Value and witness when `p` is a chain or an antichain.
pub(crate) fn closed_form(p: &Poset, which: Param) -> Option<Computed> {
    let n = p.len();
    let (value, witness) = if p.is_chain() {
        (n - 1, prefixes(p))
    } else if p.is_antichain() {
        match which {
            Param::Ch => (1, singletons(n)),
            Param::Dim2 => {
                let s = sperner_dim2_antichain(n as u64);
                let sets = colex_subsets(s, s / 2, n);
                (s, Representation::compact(&numbered(s), sets))
            }
            Param::Cw | Param::Iir => (n, singletons(n)),
        }
    } else {
        return None;
    };
    Some(Computed {
        value,
        witness,
        method: Method::ClosedForm,
    })
}
