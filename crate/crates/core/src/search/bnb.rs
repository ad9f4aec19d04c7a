//! Branch and bound over row-sorted, column-deduplicated matrices.
//!
//! Every matrix can be brought by a row permutation to nonincreasing row
//! sums, and then by a column permutation to a form where each row puts its
//! ones first inside every class of columns that agree on all earlier rows.
//! The search walks exactly those forms.
//!
//! For a prefix of `i` rows let `P` be its number of partial matchings
//! (injective row-to-column maps inside the support). Any completion has
//! permanent at most `P` times the largest permanent of the remaining rows on
//! `n - i` columns, and each of those rows has at most
//! `min(last row sum, n - i)` ones there. Brègman's bound is maximized by the
//! most even split, which gives the pruning bound.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::{
    check_window, class_rows, extend_matchings, masks_by_popcount, refine, Engine, Finish,
    Incumbent, SearchOptions, SearchResult,
};
use crate::bound::{bound_at_least, ln_row_factor, BoundValue};
use crate::error::Result;
use crate::matrix::full_mask;

pub const BNB_MAX_ORDER: usize = 7;

/// Depth at which the tree is cut into independent tasks.
const SPLIT_DEPTH: usize = 2;
/// Nodes counted locally before touching the shared counter.
const NODE_BATCH: u64 = 4096;
const LOG_MARGIN: f64 = 1e-9;

#[derive(Clone)]
struct Prefix {
    rows: Vec<u64>,
    classes: Vec<u64>,
    dp: Vec<u64>,
    used: usize,
}

struct Shared {
    n: usize,
    sigma: usize,
    collect: bool,
    prune: bool,
    budget: u64,
    by_pop: Vec<Vec<u64>>,
    ln_g: Vec<f64>,
    incumbent: AtomicU64,
    nodes: AtomicU64,
    exhausted: AtomicBool,
}

struct Worker<'a> {
    sh: &'a Shared,
    inc: Incumbent,
    pending_nodes: u64,
    dp_stack: Vec<Vec<u64>>,
    rows: Vec<u64>,
}

impl Shared {
    /// Balanced split of the remaining ones: `(q + 1, extra)` and `(q, rest)`.
    fn completion_split(&self, depth: usize, used: usize, last: usize) -> (usize, usize, usize) {
        let left = self.n - depth;
        let cap = last.min(left);
        let ones = (self.sigma - used).min(left * cap);
        (ones / left, ones % left, left)
    }

    /// False when no completion of the prefix can reach the threshold.
    fn may_reach(&self, partial: u64, depth: usize, used: usize, last: usize) -> bool {
        if !self.prune || depth == self.n {
            return true;
        }
        let threshold = if self.collect {
            self.incumbent.load(Ordering::Relaxed)
        } else {
            self.incumbent.load(Ordering::Relaxed) + 1
        };
        if threshold == 0 {
            return true;
        }
        if partial == 0 {
            return false;
        }
        let (q, extra, left) = self.completion_split(depth, used, last);
        if q == 0 && extra < left {
            return false;
        }
        let log_bound = (partial as f64).ln()
            + extra as f64 * self.ln_g[q + 1]
            + (left - extra) as f64 * self.ln_g[q];
        let rhs = (threshold as f64).ln();
        let slack = LOG_MARGIN * (1.0 + rhs.abs().max(log_bound.abs()));
        if log_bound > rhs + slack {
            return true;
        }
        if log_bound < rhs - slack {
            return false;
        }
        let bound = BoundValue::from_factors(vec![(q + 1, extra), (q, left - extra)])
            .scaled(&BigUint::from(partial));
        bound_at_least(&bound, &BigUint::from(threshold))
    }
}

impl Worker<'_> {
    fn tick(&mut self) -> bool {
        self.pending_nodes += 1;
        if self.pending_nodes >= NODE_BATCH {
            self.flush();
        }
        !self.sh.exhausted.load(Ordering::Relaxed)
    }

    fn flush(&mut self) {
        let total = self
            .sh
            .nodes
            .fetch_add(self.pending_nodes, Ordering::Relaxed)
            + self.pending_nodes;
        self.pending_nodes = 0;
        if total >= self.sh.budget {
            self.sh.exhausted.store(true, Ordering::Relaxed);
        }
    }

    fn descend(&mut self, depth: usize, classes: &[u64], used: usize, last: usize) -> Result<()> {
        let sh = self.sh;
        let n = sh.n;
        if depth == n {
            let per = self.dp_stack[n][full_mask(n) as usize] as u128;
            self.sh.incumbent.fetch_max(per as u64, Ordering::Relaxed);
            let rows = self.rows.clone();
            return self.inc.offer(per, &rows, sh.collect);
        }
        let left = n - depth;
        let rem = sh.sigma - used;
        let lo = rem.div_ceil(left);
        let hi = last.min(rem).min(n);
        // most even row sums first: they tend to give good incumbents early
        for r in lo..=hi {
            let mut candidates = Vec::new();
            class_rows(classes, r as u32, None, &mut |row| candidates.push(row));
            for row in candidates {
                if !self.tick() {
                    return Ok(());
                }
                let (head, tail) = self.dp_stack.split_at_mut(depth + 1);
                extend_matchings(&head[depth], row, depth, &sh.by_pop, &mut tail[0]);
                let partial: u64 = sh.by_pop[depth + 1]
                    .iter()
                    .map(|&s| self.dp_stack[depth + 1][s as usize])
                    .sum();
                if !sh.may_reach(partial, depth + 1, used + r, r) {
                    continue;
                }
                self.rows[depth] = row;
                let next = refine(classes, row);
                self.descend(depth + 1, &next, used + r, r)?;
            }
        }
        Ok(())
    }

    fn run_prefix(&mut self, p: &Prefix) -> Result<()> {
        let depth = p.rows.len();
        self.rows[..depth].copy_from_slice(&p.rows);
        self.dp_stack[depth].copy_from_slice(&p.dp);
        let last = p.rows.last().map_or(self.sh.n, |r| r.count_ones() as usize);
        self.descend(depth, &p.classes, p.used, last)
    }
}

/// All prefixes of `depth` rows that survive pruning against an empty
/// incumbent, in search order.
fn split(sh: &Shared, depth: usize) -> Vec<Prefix> {
    let n = sh.n;
    let size = 1usize << n;
    let mut root_dp = vec![0u64; size];
    root_dp[0] = 1;
    let mut out = Vec::new();
    let root = Prefix {
        rows: Vec::new(),
        classes: vec![full_mask(n)],
        dp: root_dp,
        used: 0,
    };
    fn go(sh: &Shared, p: Prefix, depth: usize, out: &mut Vec<Prefix>) {
        let i = p.rows.len();
        if i == depth || i == sh.n {
            out.push(p);
            return;
        }
        let left = sh.n - i;
        let rem = sh.sigma - p.used;
        let last = p.rows.last().map_or(sh.n, |r| r.count_ones() as usize);
        for r in rem.div_ceil(left)..=last.min(rem).min(sh.n) {
            let mut candidates = Vec::new();
            class_rows(&p.classes, r as u32, None, &mut |row| candidates.push(row));
            for row in candidates {
                let mut dp = vec![0u64; p.dp.len()];
                extend_matchings(&p.dp, row, i, &sh.by_pop, &mut dp);
                let mut rows = p.rows.clone();
                rows.push(row);
                let child = Prefix {
                    rows,
                    classes: refine(&p.classes, row),
                    dp,
                    used: p.used + r,
                };
                go(sh, child, depth, out);
            }
        }
    }
    go(sh, root, depth, &mut out);
    out
}

pub(crate) fn bnb_max(n: usize, tau: usize, opts: &SearchOptions) -> Result<SearchResult> {
    let sigma = check_window(n, tau, BNB_MAX_ORDER, "branch-and-bound search")?;
    let started = Instant::now();
    let sh = Shared {
        n,
        sigma,
        collect: opts.collect_maximizers,
        prune: opts.prune,
        budget: opts.budget.unwrap_or(u64::MAX),
        by_pop: masks_by_popcount(n),
        ln_g: (0..=n + 1).map(ln_row_factor).collect(),
        incumbent: AtomicU64::new(0),
        nodes: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
    };
    let tasks = split(&sh, SPLIT_DEPTH.min(n));
    let pool = opts.pool()?;
    let parts: Vec<Result<Incumbent>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|p| {
                let mut w = Worker {
                    sh: &sh,
                    inc: Incumbent::default(),
                    pending_nodes: 0,
                    dp_stack: vec![vec![0u64; 1 << n]; n + 1],
                    rows: vec![0u64; n],
                };
                w.run_prefix(p)?;
                w.flush();
                Ok(w.inc)
            })
            .collect()
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let inc = Incumbent::merge(parts);
    let exact = !sh.exhausted.load(Ordering::Relaxed);
    Ok(Finish {
        n,
        tau,
        engine: Engine::Bnb,
        opts,
        exact,
        nodes: sh.nodes.load(Ordering::Relaxed),
        started,
    }
    .result(inc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::naive::naive_max;

    fn opts() -> SearchOptions {
        SearchOptions::engine(Engine::Bnb).with_maximizers()
    }

    #[test]
    fn agrees_with_naive_small() {
        for n in 1..=3 {
            for tau in 0..=n * n {
                let a = naive_max(
                    n,
                    tau,
                    &SearchOptions::engine(Engine::Naive).with_maximizers(),
                )
                .unwrap();
                let b = bnb_max(n, tau, &opts()).unwrap();
                assert_eq!(a.max_per, b.max_per, "n={n} tau={tau}");
                assert_eq!(a.maximizer_classes, b.maximizer_classes, "n={n} tau={tau}");
            }
        }
    }

    #[test]
    fn known_values() {
        let r = bnb_max(6, 24, &SearchOptions::engine(Engine::Bnb)).unwrap();
        assert_eq!(r.max_per, 8u32.into());
        let r = bnb_max(4, 8, &opts()).unwrap();
        assert_eq!(r.max_per, 4u32.into());
        assert!(r.is_exact);
    }

    #[test]
    fn pruning_does_not_change_answer() {
        for (n, tau) in [(4, 6), (5, 12), (5, 15), (6, 26)] {
            let on = bnb_max(n, tau, &opts()).unwrap();
            let mut o = opts();
            o.prune = false;
            let off = bnb_max(n, tau, &o).unwrap();
            assert_eq!(on.max_per, off.max_per);
            assert_eq!(on.maximizer_classes, off.maximizer_classes);
            assert!(on.nodes_explored <= off.nodes_explored);
        }
    }
}
