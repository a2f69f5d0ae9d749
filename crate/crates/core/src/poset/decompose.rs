//! Component and block decompositions.

use super::{disjoint_sum, vertical_sum, Elem, Poset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    Component,
    Block,
}

/// Parts of a poset together with their embeddings into the parent.
///
/// For blocks the parts are listed bottom to top; for components they are
/// ordered by their smallest element id.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub kind: DecompositionKind,
    pub parts: Vec<Poset>,
    /// `embeddings[i][k]` is the parent id of element `k` of `parts[i]`.
    pub embeddings: Vec<Vec<Elem>>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part index containing each parent element.
    pub fn part_of(&self, n: usize) -> Vec<usize> {
        let mut owner = vec![usize::MAX; n];
        for (i, emb) in self.embeddings.iter().enumerate() {
            for &x in emb {
                owner[x] = i;
            }
        }
        owner
    }

    /// Recomposes the parts with the matching sum.
    pub fn recompose(&self) -> Poset {
        match self.kind {
            DecompositionKind::Component => disjoint_sum(&self.parts),
            DecompositionKind::Block => vertical_sum(&self.parts),
        }
        .expect("a decomposition has at least one part")
    }
}

fn build(p: &Poset, kind: DecompositionKind, groups: Vec<Vec<Elem>>) -> Decomposition {
    let parts = groups
        .iter()
        .map(|g| {
            p.induced_subposet(g)
                .expect("ids in range")
                .expect("parts are non-empty")
        })
        .collect();
    Decomposition {
        kind,
        parts,
        embeddings: groups,
    }
}

/// Connected components of the comparability graph.
pub fn component_decomposition(p: &Poset) -> Decomposition {
    let n = p.len();
    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<Elem>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut members = Vec::new();
        while let Some(x) = stack.pop() {
            members.push(x);
            for y in p.strict_below(x).ones().chain(p.strict_above(x).ones()) {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    build(p, DecompositionKind::Component, groups)
}

/// Sizes `k` (with `0 < k < n`) such that the first `k` elements of
/// [`Poset::linear_extension`] lie entirely below the rest.
///
/// A prefix of size `k` is a cut iff exactly `k * (n - k)` comparable pairs
/// cross it.
pub fn vertical_cuts(p: &Poset) -> Vec<usize> {
    let n = p.len();
    let order = p.linear_extension();
    let mut pos = vec![0; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    // crossing[k] = number of pairs x < y with pos[x] < k <= pos[y]
    let mut delta = vec![0i64; n + 1];
    for x in 0..n {
        for y in p.strict_above(x).ones() {
            delta[pos[x] + 1] += 1;
            delta[pos[y] + 1] -= 1;
        }
    }
    let mut cuts = Vec::new();
    let mut crossing = 0i64;
    for (k, d) in delta.iter().enumerate().take(n).skip(1) {
        crossing += d;
        if crossing == (k * (n - k)) as i64 {
            cuts.push(k);
        }
    }
    cuts
}

/// True when `p` is not a vertical sum of two non-empty posets.
pub fn is_vertical_prime(p: &Poset) -> bool {
    vertical_cuts(p).is_empty()
}

/// A chain or a vertical prime.
pub fn is_block(p: &Poset) -> bool {
    p.is_chain() || is_vertical_prime(p)
}

/// Shortest factorization into blocks.
///
/// Cuts the linear extension at every vertical cut, then merges maximal runs
/// of single-element segments into chain blocks.
pub fn block_decomposition(p: &Poset) -> Decomposition {
    let order = p.linear_extension();
    let mut bounds = vec![0];
    bounds.extend(vertical_cuts(p));
    bounds.push(p.len());
    let segments: Vec<&[Elem]> = bounds.windows(2).map(|w| &order[w[0]..w[1]]).collect();

    let mut groups: Vec<Vec<Elem>> = Vec::new();
    let mut run: Vec<Elem> = Vec::new();
    for seg in segments {
        if seg.len() == 1 {
            run.push(seg[0]);
            continue;
        }
        if !run.is_empty() {
            groups.push(std::mem::take(&mut run));
        }
        groups.push(seg.to_vec());
    }
    if !run.is_empty() {
        groups.push(run);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    build(p, DecompositionKind::Block, groups)
}
