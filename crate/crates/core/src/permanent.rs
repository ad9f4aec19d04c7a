//! Exact permanents of (0,1)-matrices.
//!
//! Two engines with separate code paths:
//!
//! * [`permanent_ryser`]: Ryser inclusion–exclusion in the Nijenhuis–Wilf
//!   half-lattice form (2^(n-1) column subsets visited in Gray-code order,
//!   row partial sums updated incrementally). Accumulates in `i64`, `i128`
//!   or `BigInt` depending on the order so that no intermediate overflows.
//! * [`permanent_expansion`]: first-row Laplace expansion memoised on the
//!   set of surviving columns. Used as the independent oracle.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::BinMatrix;

/// Orders above this are refused outright.
pub const RYSER_HARD_MAX: usize = 34;
/// Largest order the expansion oracle accepts.
pub const EXPANSION_MAX: usize = 12;

// Every doubled partial sum lies in [-n, n], so the accumulator never
// exceeds 2^(n-1) * n^n in magnitude.
const I64_MAX_ORDER: usize = 13;
const I128_MAX_ORDER: usize = 23;

/// Exact permanent by Ryser's formula.
pub fn permanent_ryser(a: &BinMatrix) -> Result<BigUint> {
    let n = a.order();
    if n > RYSER_HARD_MAX {
        return Err(Error::OverBudget {
            what: "Ryser permanent",
            n,
            max: RYSER_HARD_MAX,
        });
    }
    if a.has_zero_line() {
        return Ok(BigUint::zero());
    }
    let rows = a.rows();
    if n <= I64_MAX_ORDER {
        Ok(BigUint::from(ryser_i64(rows) as u64))
    } else if n <= I128_MAX_ORDER {
        Ok(BigUint::from(ryser_i128(rows) as u128))
    } else {
        Ok(ryser_big(rows))
    }
}

/// Permanent as a machine integer (`34! < 2^128`, so every order the Ryser
/// engine accepts fits). Returns `None` above [`RYSER_HARD_MAX`].
pub fn permanent_u128(a: &BinMatrix) -> Option<u128> {
    let n = a.order();
    if n > RYSER_HARD_MAX {
        return None;
    }
    if a.has_zero_line() {
        return Some(0);
    }
    Some(permanent_rows_u128(a.rows()))
}

/// Same as [`permanent_u128`] but on raw row masks; `rows.len()` is the order.
/// Panics above [`RYSER_HARD_MAX`].
pub(crate) fn permanent_rows_u128(rows: &[u64]) -> u128 {
    let n = rows.len();
    assert!(
        n <= RYSER_HARD_MAX,
        "order {n} too large for the Ryser engine"
    );
    if n <= I64_MAX_ORDER {
        ryser_i64(rows) as u128
    } else if n <= I128_MAX_ORDER {
        ryser_i128(rows) as u128
    } else {
        ryser_big(rows).to_u128().expect("34! fits in u128")
    }
}

macro_rules! ryser_prim {
    ($name:ident, $t:ty) => {
        fn $name(rows: &[u64]) -> $t {
            let n = rows.len();
            if n == 0 {
                return 1;
            }
            let last = n - 1;
            // doubled partial sums: 2*a[i][n-1] - rowsum_i
            let mut y = [0 as $t; 64];
            for (i, &r) in rows.iter().enumerate() {
                y[i] = 2 * ((r >> last) & 1) as $t - r.count_ones() as $t;
            }
            let mut total: $t = y[..n].iter().product();
            let mut included: u64 = 0;
            for k in 1u64..(1u64 << last) {
                let j = k.trailing_zeros();
                let bit = 1u64 << j;
                included ^= bit;
                if included & bit != 0 {
                    for (i, &r) in rows.iter().enumerate() {
                        y[i] += 2 * ((r >> j) & 1) as $t;
                    }
                } else {
                    for (i, &r) in rows.iter().enumerate() {
                        y[i] -= 2 * ((r >> j) & 1) as $t;
                    }
                }
                let p: $t = y[..n].iter().product();
                if included.count_ones() & 1 == 1 {
                    total -= p;
                } else {
                    total += p;
                }
            }
            let signed = if last % 2 == 1 { -total } else { total };
            let per = signed >> last;
            debug_assert!(per >= 0 && (signed & ((1 << last) - 1)) == 0);
            assert!(per >= 0, "Ryser accumulator produced a negative permanent");
            per
        }
    };
}

ryser_prim!(ryser_i64, i64);
ryser_prim!(ryser_i128, i128);

fn ryser_big(rows: &[u64]) -> BigUint {
    let n = rows.len();
    let last = n - 1;
    let mut y: Vec<i64> = rows
        .iter()
        .map(|&r| 2 * ((r >> last) & 1) as i64 - r.count_ones() as i64)
        .collect();
    let product = |y: &[i64]| -> BigInt {
        y.iter()
            .fold(BigInt::one(), |acc, &v| acc * BigInt::from(v))
    };
    let mut total = product(&y);
    let mut included: u64 = 0;
    for k in 1u64..(1u64 << last) {
        let j = k.trailing_zeros();
        let bit = 1u64 << j;
        included ^= bit;
        let delta = if included & bit != 0 { 2 } else { -2 };
        for (i, &r) in rows.iter().enumerate() {
            if (r >> j) & 1 == 1 {
                y[i] += delta;
            }
        }
        let p = product(&y);
        if included.count_ones() & 1 == 1 {
            total -= p;
        } else {
            total += p;
        }
    }
    if last % 2 == 1 {
        total = -total;
    }
    let per: BigInt = total >> last;
    assert!(
        !per.is_negative(),
        "Ryser accumulator produced a negative permanent"
    );
    let (sign, mag) = per.into_parts();
    debug_assert!(sign != Sign::Minus);
    mag
}

/// Exact permanent by recursive first-row expansion, memoised on the mask of
/// columns already used. Oracle only: orders up to 12.
pub fn permanent_expansion(a: &BinMatrix) -> Result<BigUint> {
    let n = a.order();
    if n > EXPANSION_MAX {
        return Err(Error::OverBudget {
            what: "expansion oracle",
            n,
            max: EXPANSION_MAX,
        });
    }
    let mut memo: HashMap<u64, u64> = HashMap::new();
    Ok(BigUint::from(expand(a.rows(), 0, &mut memo)))
}

// Row index equals the number of used columns.
fn expand(rows: &[u64], used: u64, memo: &mut HashMap<u64, u64>) -> u64 {
    let i = used.count_ones() as usize;
    if i == rows.len() {
        return 1;
    }
    if let Some(&v) = memo.get(&used) {
        return v;
    }
    let mut sum = 0u64;
    for j in 0..rows.len() {
        if rows[i] >> j & 1 == 1 && used >> j & 1 == 0 {
            sum += expand(rows, used | 1 << j, memo);
        }
    }
    memo.insert(used, sum);
    sum
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}
