//! Exact search over families of up sets.
//!
//! Reading a representation column by column, each ground label `a` gives
//! the up set `{x : a ∈ S_x}`. A family of up sets is a representation iff
//! every ordered pair `(x, y)` with `x ≰ y` is separated by some member
//! (a member containing `x` but not `y`), and `|S_x|` is the number of
//! members containing `x`. Families are sets, so relabelings of the ground
//! are never explored twice.

use std::collections::HashMap;
use std::time::Instant;

use super::SolveError;
use crate::poset::{Elem, Poset};

/// Largest number of up sets the search will index.
const MAX_UPSETS: usize = 1 << 16;

/// Per-call clock; checks the deadline every few thousand nodes.
#[derive(Debug)]
pub(crate) struct Clock {
    deadline: Option<Instant>,
    ticks: u32,
}

impl Clock {
    pub(crate) fn new(deadline: Option<Instant>) -> Self {
        Clock { deadline, ticks: 0 }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> Result<(), SolveError> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(SolveError::Timeout);
                }
            }
        }
        Ok(())
    }
}

/// Up sets of a poset and the pairs they separate.
#[derive(Debug)]
pub(crate) struct Space {
    pub n: usize,
    pub upsets: Vec<u64>,
    sep: Vec<u128>,
    pair_seps: Vec<Vec<u32>>,
    all: u128,
}

#[inline]
fn bits64(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

#[inline]
fn bits128(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

impl Space {
    pub(crate) fn new(p: &Poset) -> Result<Self, SolveError> {
        let n = p.len();
        if n > 64 {
            return Err(SolveError::TooLarge(format!("{n} elements")));
        }
        let mut pairs: Vec<(Elem, Elem)> = Vec::new();
        for x in p.elements() {
            for y in p.elements() {
                if x != y && !p.lt(x, y) {
                    pairs.push((x, y));
                }
            }
        }
        if pairs.len() > 128 {
            return Err(SolveError::TooLarge(format!("{} separation pairs", pairs.len())));
        }
        let above: Vec<u64> = p
            .elements()
            .map(|x| p.strict_above(x).ones().fold(0u64, |m, y| m | 1 << y))
            .collect();
        let mut order = p.linear_extension();
        order.reverse();

        let mut upsets = Vec::new();
        fn walk(
            i: usize,
            cur: u64,
            order: &[Elem],
            above: &[u64],
            out: &mut Vec<u64>,
        ) -> Result<(), SolveError> {
            if i == order.len() {
                if cur != 0 {
                    if out.len() >= MAX_UPSETS {
                        return Err(SolveError::TooLarge("too many up sets".into()));
                    }
                    out.push(cur);
                }
                return Ok(());
            }
            let x = order[i];
            walk(i + 1, cur, order, above, out)?;
            if above[x] & !cur == 0 {
                walk(i + 1, cur | 1 << x, order, above, out)?;
            }
            Ok(())
        }
        walk(0, 0, &order, &above, &mut upsets)?;
        upsets.sort_by_key(|&u| (std::cmp::Reverse(u.count_ones()), u));

        let mut sep = vec![0u128; upsets.len()];
        let mut pair_seps = vec![Vec::new(); pairs.len()];
        for (ui, &u) in upsets.iter().enumerate() {
            for (pi, &(x, y)) in pairs.iter().enumerate() {
                if u >> x & 1 == 1 && u >> y & 1 == 0 {
                    sep[ui] |= 1 << pi;
                    pair_seps[pi].push(ui as u32);
                }
            }
        }
        let all = if pairs.is_empty() {
            0
        } else {
            u128::MAX >> (128 - pairs.len())
        };
        Ok(Space {
            n,
            upsets,
            sep,
            pair_seps,
            all,
        })
    }

    /// Number of members of `family` containing each element.
    pub(crate) fn counts(&self, family: &[u32]) -> Vec<u32> {
        let mut c = vec![0; self.n];
        for &u in family {
            for x in bits64(self.upsets[u as usize]) {
                c[x] += 1;
            }
        }
        c
    }
}

/// Ground size plus set sizes.
pub(crate) type Prof = (usize, Vec<u32>);

fn le(a: &Prof, b: &Prof) -> bool {
    a.0 <= b.0 && a.1.iter().zip(&b.1).all(|(x, y)| x <= y)
}

pub(crate) const UNBOUNDED: u32 = u32::MAX;

/// Feasibility oracle: is there a family with at most `w` members and
/// `|S_x| <= budget[x]`? Answers are cached and reused monotonically.
pub(crate) struct Oracle<'a> {
    pub sp: &'a Space,
    yes: Vec<(Prof, Vec<u32>)>,
    no: Vec<Prof>,
    exact: HashMap<Prof, Option<Vec<u32>>>,
}

struct Feas<'a> {
    sp: &'a Space,
    budget: &'a [u32],
    used: Vec<u32>,
    exhausted: u64,
    covered: u128,
    chosen: Vec<u32>,
    forbidden: Vec<bool>,
}

impl Feas<'_> {
    #[inline]
    fn ok(&self, u: u32) -> bool {
        !self.forbidden[u as usize] && self.sp.upsets[u as usize] & self.exhausted == 0
    }

    fn apply(&mut self, u: u32) {
        self.covered |= self.sp.sep[u as usize];
        for x in bits64(self.sp.upsets[u as usize]) {
            self.used[x] += 1;
            if self.used[x] >= self.budget[x] {
                self.exhausted |= 1 << x;
            }
        }
        self.chosen.push(u);
    }

    fn undo(&mut self, u: u32, covered: u128) {
        self.chosen.pop();
        self.covered = covered;
        for x in bits64(self.sp.upsets[u as usize]) {
            self.used[x] -= 1;
            if self.used[x] < self.budget[x] {
                self.exhausted &= !(1 << x);
            }
        }
    }

    fn dfs(&mut self, slots: usize, clock: &mut Clock) -> Result<bool, SolveError> {
        clock.tick()?;
        let uncovered = self.sp.all & !self.covered;
        if uncovered == 0 {
            return Ok(true);
        }
        if slots == 0 {
            return Ok(false);
        }
        let mut best = usize::MAX;
        let mut best_pair = 0;
        for pi in bits128(uncovered) {
            let c = self.sp.pair_seps[pi].iter().filter(|&&u| self.ok(u)).count();
            if c == 0 {
                return Ok(false);
            }
            if c < best {
                best = c;
                best_pair = pi;
            }
        }
        let need = uncovered.count_ones() as usize;
        if slots < need {
            let gain = (0..self.sp.upsets.len() as u32)
                .filter(|&u| self.ok(u))
                .map(|u| (self.sp.sep[u as usize] & uncovered).count_ones() as usize)
                .max()
                .unwrap_or(0);
            if gain.saturating_mul(slots) < need {
                return Ok(false);
            }
        }
        let mut cands: Vec<(u32, u32)> = self.sp.pair_seps[best_pair]
            .iter()
            .filter(|&&u| self.ok(u))
            .map(|&u| ((self.sp.sep[u as usize] & uncovered).count_ones(), u))
            .collect();
        cands.sort_by_key(|&(g, u)| (std::cmp::Reverse(g), u));
        let covered = self.covered;
        let mut found = false;
        let mut tried = 0;
        for &(_, u) in &cands {
            self.apply(u);
            let r = self.dfs(slots - 1, clock);
            if matches!(r, Ok(true)) {
                found = true;
                break;
            }
            self.undo(u, covered);
            self.forbidden[u as usize] = true;
            tried += 1;
            r?;
        }
        for &(_, u) in &cands[..tried] {
            self.forbidden[u as usize] = false;
        }
        Ok(found)
    }
}

impl<'a> Oracle<'a> {
    pub(crate) fn new(sp: &'a Space) -> Self {
        Oracle {
            sp,
            yes: Vec::new(),
            no: Vec::new(),
            exact: HashMap::new(),
        }
    }

    /// A family with at most `w` members and `|S_x| <= budget[x]`.
    pub(crate) fn feasible(
        &mut self,
        w: usize,
        budget: &[u32],
        clock: &mut Clock,
    ) -> Result<Option<Vec<u32>>, SolveError> {
        let key: Prof = (w, budget.to_vec());
        if let Some(hit) = self.exact.get(&key) {
            return Ok(hit.clone());
        }
        if let Some((_, fam)) = self.yes.iter().find(|(prof, _)| le(prof, &key)) {
            return Ok(Some(fam.clone()));
        }
        if self.no.iter().any(|prof| le(&key, prof)) {
            return Ok(None);
        }
        let mut f = Feas {
            sp: self.sp,
            budget,
            used: vec![0; self.sp.n],
            exhausted: (0..self.sp.n)
                .filter(|&x| budget[x] == 0)
                .fold(0, |m, x| m | 1 << x),
            covered: 0,
            chosen: Vec::new(),
            forbidden: vec![false; self.sp.upsets.len()],
        };
        let result = if f.dfs(w, clock)? { Some(f.chosen) } else { None };
        match &result {
            Some(fam) => {
                let prof = (fam.len(), self.sp.counts(fam));
                self.yes.push((prof, fam.clone()));
            }
            None => self.no.push(key.clone()),
        }
        self.exact.insert(key, result.clone());
        Ok(result)
    }

    /// A family strictly below the profile `(w, sizes)`, if any. Such a
    /// family exists iff the profile is not minimal among feasible ones.
    pub(crate) fn strictly_below(
        &mut self,
        w: usize,
        sizes: &[u32],
        clock: &mut Clock,
    ) -> Result<Option<Vec<u32>>, SolveError> {
        if w > 0 {
            if let Some(f) = self.feasible(w - 1, sizes, clock)? {
                return Ok(Some(f));
            }
        }
        let mut s = sizes.to_vec();
        for x in 0..s.len() {
            if s[x] == 0 {
                continue;
            }
            s[x] -= 1;
            let f = self.feasible(w, &s, clock)?;
            s[x] += 1;
            if f.is_some() {
                return Ok(f);
            }
        }
        Ok(None)
    }
}

/// What to do after visiting an enumerated family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

pub(crate) type Visit<'a> = dyn FnMut(&[u32], &[u32], &mut Clock) -> Result<Flow, SolveError> + 'a;

/// Enumerates irredundant families (every member separates some pair no
/// other member separates) covering all pairs, with at most `max_size`
/// members. Partial families whose profile strictly dominates a known
/// feasible profile are cut, since no extension of them can be minimal.
pub(crate) struct Irredundant<'a> {
    sp: &'a Space,
    max_size: usize,
    refs: Vec<Prof>,
    chosen: Vec<u32>,
    counts: Vec<u32>,
    once: u128,
    multi: u128,
    forbidden: Vec<bool>,
}

impl<'a> Irredundant<'a> {
    pub(crate) fn new(sp: &'a Space, max_size: usize, refs: Vec<Prof>) -> Self {
        Irredundant {
            sp,
            max_size,
            refs,
            chosen: Vec::new(),
            counts: vec![0; sp.n],
            once: 0,
            multi: 0,
            forbidden: vec![false; sp.upsets.len()],
        }
    }

    pub(crate) fn add_reference(&mut self, prof: Prof) {
        if self.refs.iter().any(|r| le(r, &prof)) {
            return;
        }
        self.refs.retain(|r| !le(&prof, r));
        self.refs.push(prof);
    }

    fn dominated(&self, complete: bool) -> bool {
        let len = self.chosen.len();
        self.refs.iter().any(|(w, s)| {
            len >= *w
                && self.counts.iter().zip(s).all(|(a, b)| a >= b)
                && !(complete && len == *w && self.counts == *s)
        })
    }

    pub(crate) fn run(&mut self, clock: &mut Clock, visit: &mut Visit<'_>) -> Result<Flow, SolveError> {
        clock.tick()?;
        let covered = self.once | self.multi;
        let uncovered = self.sp.all & !covered;
        if self.dominated(uncovered == 0) {
            return Ok(Flow::Continue);
        }
        if uncovered == 0 {
            let flow = visit(&self.chosen, &self.counts, clock)?;
            self.add_reference((self.chosen.len(), self.counts.clone()));
            return Ok(flow);
        }
        if self.chosen.len() >= self.max_size {
            return Ok(Flow::Continue);
        }
        let usable = |u: u32| !self.forbidden[u as usize];
        let mut best = usize::MAX;
        let mut best_pair = 0;
        for pi in bits128(uncovered) {
            let c = self.sp.pair_seps[pi].iter().filter(|&&u| usable(u)).count();
            if c == 0 {
                return Ok(Flow::Continue);
            }
            if c < best {
                best = c;
                best_pair = pi;
            }
        }
        let cands: Vec<u32> = self.sp.pair_seps[best_pair]
            .iter()
            .copied()
            .filter(|&u| usable(u))
            .collect();
        let (once, multi) = (self.once, self.multi);
        let mut flow = Flow::Continue;
        let mut tried = 0;
        for &u in &cands {
            tried += 1;
            let s = self.sp.sep[u as usize];
            let new_once = (once & !s) | (s & !once & !multi);
            let new_multi = multi | (once & s);
            let keeps_private = self
                .chosen
                .iter()
                .all(|&v| self.sp.sep[v as usize] & new_once != 0);
            if keeps_private {
                self.once = new_once;
                self.multi = new_multi;
                self.chosen.push(u);
                for x in bits64(self.sp.upsets[u as usize]) {
                    self.counts[x] += 1;
                }
                let r = self.run(clock, visit);
                for x in bits64(self.sp.upsets[u as usize]) {
                    self.counts[x] -= 1;
                }
                self.chosen.pop();
                self.once = once;
                self.multi = multi;
                match r {
                    Ok(Flow::Continue) => {}
                    other => {
                        flow = other?;
                        break;
                    }
                }
            }
            self.forbidden[u as usize] = true;
        }
        for &u in &cands[..tried] {
            self.forbidden[u as usize] = false;
        }
        Ok(flow)
    }
}
