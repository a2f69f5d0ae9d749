//! Exact computation of cube height, 2-dimension, cube width and `iir`,
//! irreducibility tests and reduction to an irreducible representation.

mod closed;
mod search;

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::characterization::find_violation;
use crate::poset::{block_decomposition, Poset};
use crate::representation::{
    canonical_representation, compare_profiles, compose_vertical_reps, key_step_reduce,
    representation_to_json, strict_reduction_from_violation, validate_representation, RepError,
    Representation,
};
use search::{Clock, Flow, Irredundant, Oracle, Space, UNBOUNDED};

pub(crate) use closed::colex_subsets;
pub use closed::{binomial, central_binomial, sperner_dim2_antichain};

pub const DEFAULT_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("{n} elements exceeds the brute-force cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error("time budget exhausted")]
    Timeout,
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brute,
    Decomposition,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Closed form when available, blockwise when `p` is not a block,
    /// brute force otherwise.
    #[default]
    Auto,
    Brute,
    Decompose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Param {
    Ch,
    Dim2,
    Cw,
    Iir,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Ch, Param::Dim2, Param::Cw, Param::Iir];
}

/// A parameter value with a representation attaining it.
#[derive(Debug, Clone)]
pub struct Computed {
    pub value: usize,
    pub witness: Representation,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub struct ParamReport {
    pub n: usize,
    pub ch: usize,
    pub dim2: usize,
    pub cw: usize,
    pub iir: usize,
    /// Witnesses in the order ch, dim2, cw, iir.
    pub witnesses: [Representation; 4],
    pub method: Method,
}

impl ParamReport {
    pub fn value(&self, which: Param) -> usize {
        match which {
            Param::Ch => self.ch,
            Param::Dim2 => self.dim2,
            Param::Cw => self.cw,
            Param::Iir => self.iir,
        }
    }

    pub fn witness(&self, which: Param) -> &Representation {
        &self.witnesses[which as usize]
    }

    pub fn to_json(&self, p: &Poset, with_witnesses: bool) -> Value {
        let mut v = json!({
            "n": self.n,
            "ch": self.ch,
            "dim2": self.dim2,
            "cw": self.cw,
            "iir": self.iir,
            "method": self.method,
        });
        if with_witnesses {
            v["witnesses"] = json!({
                "ch": representation_to_json(p, &self.witnesses[0]),
                "dim2": representation_to_json(p, &self.witnesses[1]),
                "cw": representation_to_json(p, &self.witnesses[2]),
                "iir": representation_to_json(p, &self.witnesses[3]),
            });
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct IrreducibilityVerdict {
    pub irreducible: bool,
    /// A strict reduction when not irreducible.
    pub witness: Option<Representation>,
}

/// Search configuration: brute-force cap on `|P|` and an optional wall-clock
/// budget per call.
#[derive(Debug, Clone)]
pub struct Solver {
    pub cap: usize,
    pub time_budget: Option<Duration>,
    deadline: Option<Instant>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver {
            cap: DEFAULT_CAP,
            time_budget: None,
            deadline: None,
        }
    }
}

fn numbered(w: usize) -> Vec<String> {
    (1..=w).map(|i| i.to_string()).collect()
}

impl Solver {
    /// Default configuration with the cap overridden by `POSET_CUBE_CAP`.
    pub fn from_env() -> Self {
        let cap = std::env::var("POSET_CUBE_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_CAP);
        Solver::default().with_cap(cap)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_time_budget(mut self, budget: Option<Duration>) -> Self {
        self.time_budget = budget;
        self
    }

    /// Fixes the deadline for a top-level call; nested calls share it.
    fn started(&self) -> Solver {
        let mut s = self.clone();
        if s.deadline.is_none() {
            s.deadline = self.time_budget.map(|b| Instant::now() + b);
        }
        s
    }

    fn clock(&self) -> Clock {
        Clock::new(self.deadline)
    }

    fn space(&self, p: &Poset) -> Result<Space, SolveError> {
        if p.len() > self.cap {
            return Err(SolveError::CapExceeded {
                n: p.len(),
                cap: self.cap,
            });
        }
        Space::new(p)
    }

    fn family_rep(sp: &Space, family: &[u32], labels: Option<&[String]>) -> Representation {
        let mut fam = family.to_vec();
        fam.sort_unstable();
        let cols: Vec<FixedBitSet> = fam
            .iter()
            .map(|&u| {
                let mask = sp.upsets[u as usize];
                let mut b = FixedBitSet::with_capacity(sp.n);
                for x in 0..sp.n {
                    if mask >> x & 1 == 1 {
                        b.insert(x);
                    }
                }
                b
            })
            .collect();
        let labels = match labels {
            Some(l) => l[..fam.len()].to_vec(),
            None => numbered(fam.len()),
        };
        Representation::from_columns(sp.n, &cols, labels)
    }

    /// Whether `r` has no strict reduction, with one when it does.
    pub fn is_irreducible(&self, p: &Poset, r: &Representation) -> Result<IrreducibilityVerdict, SolveError> {
        validate_representation(p, r)?;
        let s = self.started();
        let sp = s.space(p)?;
        let mut oracle = Oracle::new(&sp);
        let mut clock = s.clock();
        let prof = r.profile();
        let sizes: Vec<u32> = prof.sizes.iter().map(|&v| v as u32).collect();
        let below = oracle.strictly_below(prof.ground, &sizes, &mut clock)?;
        Ok(IrreducibilityVerdict {
            irreducible: below.is_none(),
            witness: below.map(|f| Self::family_rep(&sp, &f, Some(r.ground()))),
        })
    }

    /// An irreducible reduction of `r`. Cheap constructive reductions are
    /// tried first: the canonical representation, the key step at each
    /// element, and the reduction attached to a failed property. The
    /// exhaustive search decides the rest.
    pub fn reduce_to_irreducible(&self, p: &Poset, r: &Representation) -> Result<Representation, SolveError> {
        self.started().reduce_inner(p, r, true)
    }

    pub(crate) fn reduce_nested(&self, p: &Poset, r: &Representation) -> Result<Representation, SolveError> {
        self.started().reduce_inner(p, r, false)
    }

    fn reduce_inner(
        &self,
        p: &Poset,
        r: &Representation,
        key_steps: bool,
    ) -> Result<Representation, SolveError> {
        validate_representation(p, r)?;
        let canon = canonical_representation(p);
        let canon_prof = canon.profile();
        let unique_max = p.maximal_elements().len() == 1;
        let mut cur = r.clone();
        loop {
            let prof = cur.profile();
            let mut next = None;
            if compare_profiles(&canon_prof, &prof).is_strict {
                next = Some(canon.clone());
            }
            if next.is_none() && key_steps {
                for y in p.elements() {
                    if unique_max && p.strict_above(y).is_clear() {
                        continue;
                    }
                    let ks = key_step_reduce(p, &cur, y, self)?;
                    if compare_profiles(&ks.representation.profile(), &prof).is_strict {
                        next = Some(ks.representation);
                        break;
                    }
                }
            }
            if next.is_none() && prof == canon_prof {
                if let Some(v) = find_violation(p) {
                    next = Some(strict_reduction_from_violation(p, v)?);
                }
            }
            if next.is_none() {
                next = self.is_irreducible(p, &cur)?.witness;
            }
            match next {
                Some(rep) => cur = rep.with_labels_from(cur.ground()),
                None => return Ok(cur),
            }
        }
    }

    /// Brute-force values for the requested parameters, sharing one
    /// feasibility cache.
    fn brute(&self, p: &Poset, wanted: &[Param]) -> Result<Vec<Computed>, SolveError> {
        let sp = self.space(p)?;
        let mut oracle = Oracle::new(&sp);
        let mut clock = self.clock();
        let n = p.len();
        let want = |w: Param| wanted.contains(&w);
        let mut out: [Option<Computed>; 4] = Default::default();
        let done = |fam: Vec<u32>, value: usize| Computed {
            value,
            witness: Self::family_rep(&sp, &fam, None),
            method: Method::Brute,
        };

        if want(Param::Ch) || want(Param::Dim2) || want(Param::Cw) {
            let mut h = p.ranks().into_iter().max().unwrap_or(0);
            let fam = loop {
                if let Some(f) = oracle.feasible(usize::MAX, &vec![h as u32; n], &mut clock)? {
                    break f;
                }
                h += 1;
            };
            let ch = done(fam, h);

            let mut dim2 = None;
            if want(Param::Dim2) || want(Param::Cw) {
                let mut w = h.max(usize::BITS as usize - (n - 1).leading_zeros() as usize);
                let fam = loop {
                    if let Some(f) = oracle.feasible(w, &vec![UNBOUNDED; n], &mut clock)? {
                        break f;
                    }
                    w += 1;
                };
                dim2 = Some(done(fam, w));
            }
            if want(Param::Cw) {
                let mut w = dim2.as_ref().map_or(0, |d| d.value);
                let fam = loop {
                    if let Some(f) = oracle.feasible(w, &vec![h as u32; n], &mut clock)? {
                        break f;
                    }
                    w += 1;
                };
                out[Param::Cw as usize] = Some(done(fam, w));
            }
            out[Param::Dim2 as usize] = dim2;
            out[Param::Ch as usize] = Some(ch);
        }
        if want(Param::Iir) {
            let (w, fam) = Self::max_irreducible(p, &sp, &mut oracle, &mut clock, n, true)?
                .expect("some representation is irreducible");
            out[Param::Iir as usize] = Some(done(fam, w));
        }
        Ok(wanted
            .iter()
            .map(|&w| out[w as usize].clone().expect("computed"))
            .collect())
    }

    /// Largest irreducible family with at most `max_size` members.
    fn max_irreducible(
        p: &Poset,
        sp: &Space,
        oracle: &mut Oracle,
        clock: &mut Clock,
        max_size: usize,
        stop_at_max: bool,
    ) -> Result<Option<(usize, Vec<u32>)>, SolveError> {
        let canon = canonical_representation(p).profile();
        let refs = vec![(canon.ground, canon.sizes.iter().map(|&s| s as u32).collect())];
        let mut en = Irredundant::new(sp, max_size, refs);
        let mut best: Option<(usize, Vec<u32>)> = None;
        en.run(clock, &mut |fam, counts, clock| {
            let len = fam.len();
            if best.as_ref().is_some_and(|(b, _)| *b >= len) {
                return Ok(Flow::Continue);
            }
            if oracle.strictly_below(len, counts, clock)?.is_none() {
                best = Some((len, fam.to_vec()));
                if stop_at_max && len == max_size {
                    return Ok(Flow::Stop);
                }
            }
            Ok(Flow::Continue)
        })?;
        Ok(best)
    }

    /// Every irreducible representation of `p` up to relabeling of the
    /// ground, found by enumerating all irredundant families without any
    /// a priori bound on the ground size.
    pub fn irreducible_representations(&self, p: &Poset) -> Result<Vec<Representation>, SolveError> {
        let s = self.started();
        let sp = s.space(p)?;
        let mut oracle = Oracle::new(&sp);
        let mut clock = s.clock();
        let canon = canonical_representation(p).profile();
        let refs = vec![(canon.ground, canon.sizes.iter().map(|&v| v as u32).collect())];
        let pairs = p.len() * p.len() - p.len() - p.comparable_pairs();
        let mut en = Irredundant::new(&sp, pairs, refs);
        let mut found = Vec::new();
        en.run(&mut clock, &mut |fam, counts, clock| {
            if oracle.strictly_below(fam.len(), counts, clock)?.is_none() {
                found.push(fam.to_vec());
            }
            Ok(Flow::Continue)
        })?;
        Ok(found.iter().map(|f| Self::family_rep(&sp, f, None)).collect())
    }

    /// `iir` from [`Solver::irreducible_representations`]; does not assume
    /// any bound on the answer.
    pub fn iir_exhaustive(&self, p: &Poset) -> Result<usize, SolveError> {
        Ok(self
            .irreducible_representations(p)?
            .iter()
            .map(Representation::ground_size)
            .max()
            .expect("some representation is irreducible"))
    }

    fn block_values(&self, q: &Poset, wanted: &[Param]) -> Result<Vec<Computed>, SolveError> {
        let closed: Option<Vec<Computed>> = wanted.iter().map(|&w| closed::closed_form(q, w)).collect();
        match closed {
            Some(c) => Ok(c),
            None => self.brute(q, wanted),
        }
    }

    /// Blockwise computation: each block by closed form or brute force,
    /// combined with the vertical-sum formulas.
    fn via_blocks(&self, p: &Poset, wanted: &[Param]) -> Result<Vec<Computed>, SolveError> {
        let d = block_decomposition(p);
        let t = d.len();
        let mut per_block: Vec<Vec<Computed>> = Vec::with_capacity(t);
        for (i, q) in d.parts.iter().enumerate() {
            let mut need: Vec<Param> = Vec::new();
            for &w in wanted {
                let bw = match w {
                    Param::Ch if i + 1 < t => Param::Dim2,
                    Param::Cw if i + 1 < t => Param::Dim2,
                    other => other,
                };
                if !need.contains(&bw) {
                    need.push(bw);
                }
            }
            let vals = self.block_values(q, &need)?;
            let mut row = Vec::with_capacity(wanted.len());
            for &w in wanted {
                let bw = match w {
                    Param::Ch | Param::Cw if i + 1 < t => Param::Dim2,
                    other => other,
                };
                row.push(vals[need.iter().position(|&n| n == bw).expect("requested")].clone());
            }
            per_block.push(row);
        }
        let method = if t > 1 {
            Method::Decomposition
        } else {
            per_block[0][0].method
        };
        let mut out = Vec::with_capacity(wanted.len());
        for k in 0..wanted.len() {
            let parts: Vec<(Poset, Representation)> = d
                .parts
                .iter()
                .zip(&per_block)
                .enumerate()
                .map(|(i, (q, row))| (q.clone(), row[k].witness.prefixed(&format!("b{i}:"))))
                .collect();
            let composite = compose_vertical_reps(&parts)?;
            let mut sets = vec![FixedBitSet::new(); p.len()];
            let mut idx = 0;
            for emb in &d.embeddings {
                for &x in emb {
                    sets[x] = composite.set(idx).clone();
                    idx += 1;
                }
            }
            let witness = Representation::new(numbered(composite.ground_size()), sets)?;
            out.push(Computed {
                value: per_block.iter().map(|row| row[k].value).sum(),
                witness,
                method,
            });
        }
        Ok(out)
    }

    /// Values for the requested parameters using the chosen method.
    pub fn compute(
        &self,
        p: &Poset,
        wanted: &[Param],
        choice: MethodChoice,
    ) -> Result<Vec<Computed>, SolveError> {
        let s = self.started();
        match choice {
            MethodChoice::Brute => s.brute(p, wanted),
            MethodChoice::Decompose => s.via_blocks(p, wanted),
            MethodChoice::Auto => {
                if let Some(c) = wanted.iter().map(|&w| closed::closed_form(p, w)).collect() {
                    return Ok(c);
                }
                s.via_blocks(p, wanted)
            }
        }
    }

    pub fn params(&self, p: &Poset, choice: MethodChoice) -> Result<ParamReport, SolveError> {
        let vals = self.compute(p, &Param::ALL, choice)?;
        let method = vals[0].method;
        let [ch, dim2, cw, iir]: [Computed; 4] = vals.try_into().expect("four values");
        Ok(ParamReport {
            n: p.len(),
            ch: ch.value,
            dim2: dim2.value,
            cw: cw.value,
            iir: iir.value,
            method,
            witnesses: [ch.witness, dim2.witness, cw.witness, iir.witness],
        })
    }

    /// Parameters of every block combined by the vertical-sum formulas.
    pub fn params_via_block_decomposition(&self, p: &Poset) -> Result<ParamReport, SolveError> {
        self.params(p, MethodChoice::Decompose)
    }

    fn one(&self, p: &Poset, which: Param) -> Result<Computed, SolveError> {
        Ok(self.compute(p, &[which], MethodChoice::Auto)?.remove(0))
    }

    pub fn cube_height(&self, p: &Poset) -> Result<Computed, SolveError> {
        self.one(p, Param::Ch)
    }

    pub fn two_dimension(&self, p: &Poset) -> Result<Computed, SolveError> {
        self.one(p, Param::Dim2)
    }

    pub fn cube_width(&self, p: &Poset) -> Result<Computed, SolveError> {
        self.one(p, Param::Cw)
    }

    pub fn iir(&self, p: &Poset) -> Result<Computed, SolveError> {
        self.one(p, Param::Iir)
    }

    /// Cube height of a disjoint sum from the cube heights of its parts:
    /// `h0 = max ch(Q_i)`, plus one if some part with a unique minimal
    /// element reaches `h0`.
    pub fn disjoint_sum_cube_height(&self, parts: &[Poset]) -> Result<usize, SolveError> {
        let mut hs = Vec::with_capacity(parts.len());
        for q in parts {
            hs.push(self.cube_height(q)?.value);
        }
        let h0 = hs.iter().copied().max().unwrap_or(0);
        let bump = parts
            .iter()
            .zip(&hs)
            .any(|(q, &h)| q.has_unique_minimal() && h == h0);
        Ok(if bump { h0 + 1 } else { h0 })
    }
}
