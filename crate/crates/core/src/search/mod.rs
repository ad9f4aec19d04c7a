//! Maximizing the permanent over all matrices of order `n` with `tau` zeros.
//!
//! * `naive` walks every placement of the ones (orders up to 5).
//! * `bnb` builds rows in nonincreasing row-sum order, merges columns that
//!   are indistinguishable so far, and prunes with a Brègman-type bound on
//!   every completion (orders up to 7).
//! * `hillclimb` is a seeded random-restart local search that only ever
//!   yields a lower bound.
//!
//! `regular` enumerates the matrices with all line sums equal.

mod bnb;
mod hillclimb;
mod naive;
mod regular;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::matrix::BinMatrix;

pub use bnb::BNB_MAX_ORDER;
pub use hillclimb::{hillclimb_lower_bound, DEFAULT_RESTARTS, HILLCLIMB_MAX_ORDER};
pub use naive::NAIVE_MAX_ORDER;
pub use regular::{regular_exhaustive_max, REGULAR_MAX_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Naive,
    Bnb,
    Hillclimb,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Naive => "naive",
            Engine::Bnb => "bnb",
            Engine::Hillclimb => "hillclimb",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Engine::Naive),
            "bnb" => Ok(Engine::Bnb),
            "hillclimb" => Ok(Engine::Hillclimb),
            _ => Err(Error::Domain(format!(
                "unknown engine '{s}' (naive, bnb, hillclimb)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub engine: Engine,
    /// Node cap for the exhaustive engines, restart count for hillclimb.
    /// `None` means unlimited (exhaustive) or [`DEFAULT_RESTARTS`].
    pub budget: Option<u64>,
    pub seed: u64,
    pub collect_maximizers: bool,
    pub parallel_shards: usize,
    /// Bound-based pruning in `bnb`. Only switched off to cross-check.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            engine: Engine::Bnb,
            budget: None,
            seed: 1,
            collect_maximizers: false,
            parallel_shards: 1,
            prune: true,
        }
    }
}

impl SearchOptions {
    pub fn engine(engine: Engine) -> Self {
        SearchOptions {
            engine,
            ..Default::default()
        }
    }

    pub fn with_maximizers(mut self) -> Self {
        self.collect_maximizers = true;
        self
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.parallel_shards = shards;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallel_shards.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WallStats {
    pub elapsed_ms: f64,
    pub shards: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub tau: usize,
    pub sigma: usize,
    pub engine: Engine,
    #[serde(with = "crate::serde_str")]
    pub max_per: BigUint,
    /// False for hillclimb and for exhaustive runs cut short by the budget.
    pub is_exact: bool,
    /// Canonical maximizers, one per equivalence class, in ascending text
    /// order. Empty unless maximizers were requested.
    pub maximizer_classes: Vec<BinMatrix>,
    /// Number of classes, present when maximizers were collected.
    pub class_count: Option<usize>,
    /// Search nodes (matrices for naive, restarts for hillclimb). With more
    /// than one shard this depends on scheduling.
    pub nodes_explored: u64,
    pub wall_stats: WallStats,
}

/// Exact maximum with the naive or bnb engine.
pub fn exhaustive_max(n: usize, tau: usize, opts: &SearchOptions) -> Result<SearchResult> {
    match opts.engine {
        Engine::Naive => naive::naive_max(n, tau, opts),
        Engine::Bnb => bnb::bnb_max(n, tau, opts),
        Engine::Hillclimb => Err(Error::Domain(
            "hillclimb is not exhaustive; use hillclimb_lower_bound".into(),
        )),
    }
}

/// Runs whichever engine the options name.
pub fn search(n: usize, tau: usize, opts: &SearchOptions) -> Result<SearchResult> {
    match opts.engine {
        Engine::Hillclimb => hillclimb_lower_bound(n, tau, opts),
        _ => exhaustive_max(n, tau, opts),
    }
}

pub(crate) fn check_window(n: usize, tau: usize, max: usize, what: &'static str) -> Result<usize> {
    if n == 0 {
        return Err(Error::OrderOutOfRange(n));
    }
    if n > max {
        return Err(Error::OverBudget { what, n, max });
    }
    if tau > n * n {
        return Err(Error::Domain(format!("tau={tau} exceeds n^2={}", n * n)));
    }
    Ok(n * n - tau)
}

/// Best value and canonical maximizers seen by one worker.
#[derive(Default)]
pub(crate) struct Incumbent {
    pub best: u128,
    pub seen_any: bool,
    pub classes: HashSet<BinMatrix>,
}

impl Incumbent {
    /// Records a candidate. Canonical forms are only computed for ties with
    /// the current best when `collect` is set.
    pub fn offer(&mut self, per: u128, rows: &[u64], collect: bool) -> Result<()> {
        if self.seen_any && per < self.best {
            return Ok(());
        }
        if !self.seen_any || per > self.best {
            self.best = per;
            self.seen_any = true;
            self.classes.clear();
        }
        if collect {
            let m = BinMatrix::from_rows(rows.len(), rows.to_vec())?;
            self.classes.insert(canonical_form(&m)?);
        }
        Ok(())
    }

    /// Merges workers in order; the result does not depend on the order.
    pub fn merge(parts: impl IntoIterator<Item = Incumbent>) -> Incumbent {
        let mut out = Incumbent::default();
        for p in parts {
            if !p.seen_any {
                continue;
            }
            if !out.seen_any || p.best > out.best {
                out = p;
            } else if p.best == out.best {
                out.classes.extend(p.classes);
            }
        }
        out
    }
}

pub(crate) struct Finish<'a> {
    pub n: usize,
    pub tau: usize,
    pub engine: Engine,
    pub opts: &'a SearchOptions,
    pub exact: bool,
    pub nodes: u64,
    pub started: Instant,
}

impl Finish<'_> {
    pub fn result(self, inc: Incumbent) -> SearchResult {
        let mut classes: Vec<BinMatrix> = inc.classes.into_iter().collect();
        classes.sort_by_key(BinMatrix::to_text);
        let collect = self.opts.collect_maximizers;
        SearchResult {
            n: self.n,
            tau: self.tau,
            sigma: self.n * self.n - self.tau,
            engine: self.engine,
            max_per: BigUint::from(inc.best),
            is_exact: self.exact,
            class_count: collect.then_some(classes.len()),
            maximizer_classes: if collect { classes } else { Vec::new() },
            nodes_explored: self.nodes,
            wall_stats: WallStats {
                elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
                shards: self.opts.parallel_shards.max(1),
            },
        }
    }
}

/// Number of ways to match the rows so far into each column set, indexed by
/// column mask. One step adds a row.
pub(crate) fn extend_matchings(
    dp: &[u64],
    row: u64,
    depth: usize,
    by_pop: &[Vec<u64>],
    out: &mut [u64],
) {
    out.iter_mut().for_each(|v| *v = 0);
    for &s in &by_pop[depth] {
        let ways = dp[s as usize];
        if ways == 0 {
            continue;
        }
        let mut free = row & !s;
        while free != 0 {
            let bit = free & free.wrapping_neg();
            out[(s | bit) as usize] += ways;
            free ^= bit;
        }
    }
}

/// Column masks of an `n`-set grouped by popcount.
pub(crate) fn masks_by_popcount(n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new(); n + 1];
    for s in 0..(1u64 << n) {
        out[s.count_ones() as usize].push(s);
    }
    out
}

/// Lowest `k` set bits of `mask`.
pub(crate) fn lowest_bits(mut mask: u64, k: u32) -> u64 {
    let mut out = 0;
    for _ in 0..k {
        let bit = mask & mask.wrapping_neg();
        out |= bit;
        mask ^= bit;
    }
    out
}

/// Calls `f(row)` for every row with `r` ones that uses the lowest positions
/// of each column class (so column-permuted duplicates are skipped).
pub(crate) fn class_rows(classes: &[u64], r: u32, caps: Option<&[u32]>, f: &mut impl FnMut(u64)) {
    fn go(
        classes: &[u64],
        caps: Option<&[u32]>,
        idx: usize,
        left: u32,
        room: u32,
        acc: u64,
        f: &mut impl FnMut(u64),
    ) {
        if idx == classes.len() {
            if left == 0 {
                f(acc);
            }
            return;
        }
        let size = classes[idx].count_ones();
        let room_after = room - size;
        let hi = size.min(left).min(caps.map_or(u32::MAX, |c| c[idx]));
        let lo = left.saturating_sub(room_after);
        for c in (lo..=hi).rev() {
            go(
                classes,
                caps,
                idx + 1,
                left - c,
                room_after,
                acc | lowest_bits(classes[idx], c),
                f,
            );
        }
    }
    let room = classes.iter().map(|c| c.count_ones()).sum();
    if r <= room {
        go(classes, caps, 0, r, room, 0, f);
    }
}

/// Splits every class by whether `row` covers it.
pub(crate) fn refine(classes: &[u64], row: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(classes.len() + 1);
    for &c in classes {
        let hit = c & row;
        if hit != 0 {
            out.push(hit);
        }
        if hit != c {
            out.push(c & !hit);
        }
    }
    out
}
