//! Random-restart steepest ascent over one-for-zero swaps.
//!
//! A swap clears a one at `(a, b)` and sets a zero at `(c, d)`. Writing
//! `M_ij` for the permanent of the minor without row `i` and column `j`, the
//! permanent changes by `M_cd - M_ab - Z`, where `Z` is the permanent of the
//! matrix without rows `a, c` and columns `b, d` when those are distinct and
//! zero otherwise. Since `Z >= 0`, `M_cd - M_ab` bounds every swap from
//! above, so only the swaps whose bound can still win need `Z`.
//!
//! Every restart starts from a random permutation matrix plus random extra
//! ones, so the walk never starts on the zero plateau. Restart `k` draws from
//! its own ChaCha stream, which makes the outcome independent of how the
//! restarts are spread over threads.

use std::time::Instant;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_window, Engine, Finish, Incumbent, SearchOptions, SearchResult};
use crate::canon::CANON_MAX_ORDER;
use crate::error::Result;
use crate::permanent::permanent_rows_u128;

pub const HILLCLIMB_MAX_ORDER: usize = 30;
pub const DEFAULT_RESTARTS: u64 = 10_000;

/// Deletes bit `j`, shifting the higher bits down.
#[inline]
fn drop_bit(row: u64, j: usize) -> u64 {
    let low = (1u64 << j) - 1;
    (row & low) | ((row >> 1) & !low)
}

fn minor(rows: &[u64], skip_rows: &[usize], skip_cols: &[usize]) -> Vec<u64> {
    let mut cols = skip_cols.to_vec();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    rows.iter()
        .enumerate()
        .filter(|(i, _)| !skip_rows.contains(i))
        .map(|(_, &r)| cols.iter().fold(r, |acc, &j| drop_bit(acc, j)))
        .collect()
}

fn all_minors(rows: &[u64]) -> Vec<u128> {
    let n = rows.len();
    let mut out = vec![0u128; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = permanent_rows_u128(&minor(rows, &[i], &[j]));
        }
    }
    out
}

// (gain or bound, move index, cleared one, set zero)
type Move = (i128, usize, (usize, usize), (usize, usize));

/// Climbs from `rows` until no swap increases the permanent.
fn climb(rows: &mut [u64], mut per: u128) -> u128 {
    let n = rows.len();
    loop {
        let m = all_minors(rows);
        let mut ones = Vec::new();
        let mut zeros = Vec::new();
        for (i, &row) in rows.iter().enumerate() {
            for j in 0..n {
                if row >> j & 1 == 1 {
                    ones.push((i, j));
                } else {
                    zeros.push((i, j));
                }
            }
        }
        // (upper bound, move index, from, to), best bound first
        let mut moves: Vec<Move> = Vec::with_capacity(ones.len() * zeros.len());
        for (oi, &(a, b)) in ones.iter().enumerate() {
            for (zi, &(c, d)) in zeros.iter().enumerate() {
                let ub = m[c * n + d] as i128 - m[a * n + b] as i128;
                if ub > 0 {
                    moves.push((ub, oi * zeros.len() + zi, (a, b), (c, d)));
                }
            }
        }
        moves.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        let mut best: Option<Move> = None;
        for &(ub, idx, (a, b), (c, d)) in &moves {
            if let Some((bd, _, _, _)) = best {
                if ub < bd {
                    break;
                }
            }
            let z = if a != c && b != d {
                permanent_rows_u128(&minor(rows, &[a, c], &[b, d])) as i128
            } else {
                0
            };
            let delta = ub - z;
            if delta <= 0 {
                continue;
            }
            match best {
                Some((bd, bi, _, _)) if delta < bd || (delta == bd && idx > bi) => {}
                _ => best = Some((delta, idx, (a, b), (c, d))),
            }
        }
        let Some((delta, _, (a, b), (c, d))) = best else {
            return per;
        };
        rows[a] ^= 1 << b;
        rows[c] ^= 1 << d;
        per = (per as i128 + delta) as u128;
        debug_assert_eq!(per, permanent_rows_u128(rows));
    }
}

fn restart(n: usize, sigma: usize, seed: u64, k: u64) -> (u128, Vec<u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut rows = vec![0u64; n];
    for (i, &j) in perm.iter().enumerate() {
        rows[i] |= 1 << j;
    }
    let free: Vec<usize> = (0..n * n)
        .filter(|&c| rows[c / n] >> (c % n) & 1 == 0)
        .collect();
    for pick in sample(&mut rng, free.len(), sigma - n) {
        let c = free[pick];
        rows[c / n] |= 1 << (c % n);
    }
    let start = permanent_rows_u128(&rows);
    let per = climb(&mut rows, start);
    (per, rows)
}

/// Best permanent found by seeded random-restart hill climbing. Never exact.
pub fn hillclimb_lower_bound(n: usize, tau: usize, opts: &SearchOptions) -> Result<SearchResult> {
    let sigma = check_window(n, tau, HILLCLIMB_MAX_ORDER, "hillclimb")?;
    let started = Instant::now();
    let restarts = opts.budget.unwrap_or(DEFAULT_RESTARTS);
    let collect = opts.collect_maximizers && n <= CANON_MAX_ORDER;
    let mut inc = Incumbent::default();
    if sigma < n {
        // some row is empty in every matrix of the class
        let rows: Vec<u64> = (0..n).map(|i| if i < sigma { 1 << i } else { 0 }).collect();
        inc.offer(0, &rows, collect)?;
    } else {
        let pool = opts.pool()?;
        let found: Vec<(u128, Vec<u64>)> = pool.install(|| {
            (0..restarts)
                .into_par_iter()
                .map(|k| restart(n, sigma, opts.seed, k))
                .collect()
        });
        let best = found.iter().map(|(p, _)| *p).max().unwrap_or(0);
        for (per, rows) in &found {
            if *per == best {
                inc.offer(*per, rows, collect)?;
            }
        }
    }
    let mut o = opts.clone();
    o.collect_maximizers = collect;
    Ok(Finish {
        n,
        tau,
        engine: Engine::Hillclimb,
        opts: &o,
        exact: false,
        nodes: if sigma < n { 0 } else { restarts },
        started,
    }
    .result(inc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minors_and_bits() {
        assert_eq!(drop_bit(0b1011, 1), 0b101);
        assert_eq!(drop_bit(0b1011, 0), 0b101);
        let rows = [0b011u64, 0b111, 0b110];
        let m = all_minors(&rows);
        // minor without row 1, column 1: [[1,0],[0,1]] in compressed form
        assert_eq!(m[4], 1);
    }

    #[test]
    fn finds_small_optima() {
        let o = SearchOptions::engine(Engine::Hillclimb).with_budget(200);
        let r = hillclimb_lower_bound(4, 8, &o).unwrap();
        assert_eq!(r.max_per, 4u32.into());
        assert!(!r.is_exact);
        let r = hillclimb_lower_bound(6, 18, &o).unwrap();
        assert_eq!(r.max_per, 36u32.into());
        let r = hillclimb_lower_bound(5, 22, &o).unwrap();
        assert_eq!(r.max_per, 0u32.into());
    }

    #[test]
    fn shard_count_does_not_matter() {
        let base = SearchOptions::engine(Engine::Hillclimb)
            .with_budget(64)
            .with_seed(7)
            .with_maximizers();
        let one = hillclimb_lower_bound(6, 20, &base).unwrap();
        let four = hillclimb_lower_bound(6, 20, &base.clone().with_shards(4)).unwrap();
        assert_eq!(one.max_per, four.max_per);
        assert_eq!(one.maximizer_classes, four.maximizer_classes);
    }
}
