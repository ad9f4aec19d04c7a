//! Exhaustive maximum over matrices whose row and column sums all equal
//! one degree.

use std::time::Instant;

use super::{
    class_rows, extend_matchings, masks_by_popcount, refine, Engine, Finish, Incumbent,
    SearchOptions, SearchResult,
};
use crate::bound::ln_row_factor;
use crate::error::{Error, Result};
use crate::matrix::full_mask;

pub const REGULAR_MAX_ORDER: usize = 7;

struct Walk {
    n: usize,
    degree: usize,
    by_pop: Vec<Vec<u64>>,
    ln_g: f64,
    dp_stack: Vec<Vec<u64>>,
    rows: Vec<u64>,
    col_sums: Vec<usize>,
    inc: Incumbent,
    nodes: u64,
}

impl Walk {
    fn descend(&mut self, depth: usize, classes: &[u64]) -> Result<()> {
        let n = self.n;
        if depth == n {
            let per = self.dp_stack[n][full_mask(n) as usize] as u128;
            let rows = self.rows.clone();
            return self.inc.offer(per, &rows, true);
        }
        let left_after = n - depth - 1;
        // columns in one class share their column sum
        let mut caps = Vec::with_capacity(classes.len());
        let mut forced = 0u64;
        for &c in classes {
            let need = self.degree - self.col_sums[c.trailing_zeros() as usize];
            if need > left_after + 1 {
                return Ok(());
            }
            if need == left_after + 1 {
                forced |= c;
            }
            caps.push(if need > 0 { c.count_ones() } else { 0 });
        }
        let mut candidates = Vec::new();
        class_rows(classes, self.degree as u32, Some(&caps), &mut |row| {
            if row & forced == forced {
                candidates.push(row);
            }
        });
        for row in candidates {
            self.nodes += 1;
            let (head, tail) = self.dp_stack.split_at_mut(depth + 1);
            extend_matchings(&head[depth], row, depth, &self.by_pop, &mut tail[0]);
            let partial: u64 = self.by_pop[depth + 1]
                .iter()
                .map(|&s| self.dp_stack[depth + 1][s as usize])
                .sum();
            if self.inc.seen_any {
                let left = n - depth - 1;
                let g = self.ln_g.min(ln_row_factor(left.max(1)));
                let log_bound = (partial as f64).ln() + left as f64 * g;
                if partial == 0 || log_bound < (self.inc.best as f64).ln() - 1e-9 {
                    continue;
                }
            }
            self.rows[depth] = row;
            for j in 0..n {
                self.col_sums[j] += (row >> j & 1) as usize;
            }
            let next = refine(classes, row);
            self.descend(depth + 1, &next)?;
            for j in 0..n {
                self.col_sums[j] -= (row >> j & 1) as usize;
            }
        }
        Ok(())
    }
}

/// Maximum permanent over the `n x n` matrices with every line sum equal
/// to `degree`, with all maximizer classes.
pub fn regular_exhaustive_max(n: usize, degree: usize) -> Result<SearchResult> {
    if n == 0 {
        return Err(Error::OrderOutOfRange(n));
    }
    if n > REGULAR_MAX_ORDER {
        return Err(Error::OverBudget {
            what: "regular search",
            n,
            max: REGULAR_MAX_ORDER,
        });
    }
    if degree == 0 || degree > n {
        return Err(Error::Domain(format!(
            "degree must lie in 1..={n}, got {degree}"
        )));
    }
    let started = Instant::now();
    let mut dp_stack = vec![vec![0u64; 1 << n]; n + 1];
    dp_stack[0][0] = 1;
    let mut w = Walk {
        n,
        degree,
        by_pop: masks_by_popcount(n),
        ln_g: ln_row_factor(degree),
        dp_stack,
        rows: vec![0; n],
        col_sums: vec![0; n],
        inc: Incumbent::default(),
        nodes: 0,
    };
    w.descend(0, &[full_mask(n)])?;
    let opts = SearchOptions::engine(Engine::Bnb).with_maximizers();
    Ok(Finish {
        n,
        tau: n * n - n * degree,
        engine: Engine::Bnb,
        opts: &opts,
        exact: true,
        nodes: w.nodes,
        started,
    }
    .result(w.inc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BinMatrix;

    #[test]
    fn small_regular_values() {
        let r = regular_exhaustive_max(4, 2).unwrap();
        assert_eq!(r.max_per, 4u32.into());
        let j2 = BinMatrix::all_ones(2).unwrap();
        assert_eq!(
            r.maximizer_classes,
            vec![j2.direct_sum(&j2).unwrap().canonical_form().unwrap()]
        );
        let r = regular_exhaustive_max(5, 2).unwrap();
        assert_eq!(r.max_per, 4u32.into());
        assert_eq!(r.class_count, Some(1));
        let r = regular_exhaustive_max(4, 4).unwrap();
        assert_eq!(r.max_per, 24u32.into());
        let r = regular_exhaustive_max(3, 1).unwrap();
        assert_eq!(r.max_per, 1u32.into());
        for row in r.maximizer_classes[0].rows() {
            assert_eq!(row.count_ones(), 1);
        }
        assert!(regular_exhaustive_max(4, 0).is_err());
        assert!(regular_exhaustive_max(8, 3).is_err());
    }
}
