use std::time::Instant;

use super::{check_window, Engine, Finish, Incumbent, SearchOptions, SearchResult};
use crate::error::Result;
use crate::matrix::full_mask;
use crate::permanent::permanent_rows_u128;

pub const NAIVE_MAX_ORDER: usize = 5;

/// Next integer with the same popcount (Gosper's hack).
fn next_same_popcount(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

pub(crate) fn naive_max(n: usize, tau: usize, opts: &SearchOptions) -> Result<SearchResult> {
    let sigma = check_window(n, tau, NAIVE_MAX_ORDER, "naive search")?;
    let started = Instant::now();
    let cells = n * n;
    let row_mask = full_mask(n);
    let limit = 1u64 << cells;
    let budget = opts.budget.unwrap_or(u64::MAX);
    let mut inc = Incumbent::default();
    let mut rows = vec![0u64; n];
    let mut nodes = 0u64;
    let mut exact = true;
    let mut mask = full_mask(sigma);
    while mask < limit {
        if nodes == budget {
            exact = false;
            break;
        }
        nodes += 1;
        for (i, r) in rows.iter_mut().enumerate() {
            *r = (mask >> (i * n)) & row_mask;
        }
        let per = permanent_rows_u128(&rows);
        inc.offer(per, &rows, opts.collect_maximizers)?;
        if mask == 0 {
            break;
        }
        mask = next_same_popcount(mask);
    }
    Ok(Finish {
        n,
        tau,
        engine: Engine::Naive,
        opts,
        exact,
        nodes,
        started,
    }
    .result(inc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: usize, tau: usize) -> SearchResult {
        naive_max(
            n,
            tau,
            &SearchOptions::engine(Engine::Naive).with_maximizers(),
        )
        .unwrap()
    }

    #[test]
    fn gosper_steps() {
        assert_eq!(next_same_popcount(0b0111), 0b1011);
        assert_eq!(next_same_popcount(0b1011), 0b1101);
    }

    #[test]
    fn small_cases() {
        let r = run(3, 3);
        assert_eq!(r.max_per, 2u32.into());
        assert_eq!(r.nodes_explored, 84);
        let d3 = crate::BinMatrix::identity(3).unwrap().complement();
        assert!(r.maximizer_classes.contains(&d3.canonical_form().unwrap()));
        let r = run(4, 8);
        assert_eq!(r.max_per, 4u32.into());
        let j2j2 = crate::BinMatrix::all_ones(2)
            .unwrap()
            .direct_sum(&crate::BinMatrix::all_ones(2).unwrap())
            .unwrap();
        assert!(r
            .maximizer_classes
            .contains(&j2j2.canonical_form().unwrap()));
        let r = run(5, 20);
        assert_eq!(r.max_per, 1u32.into());
        assert!(r.is_exact);
        let r = run(2, 4);
        assert_eq!(r.max_per, 0u32.into());
        assert_eq!(r.class_count, Some(1));
        let r = run(2, 0);
        assert_eq!(r.max_per, 2u32.into());
    }

    #[test]
    fn budget_cuts_short() {
        let r = naive_max(3, 3, &SearchOptions::engine(Engine::Naive).with_budget(10)).unwrap();
        assert!(!r.is_exact);
        assert_eq!(r.nodes_explored, 10);
    }
}
