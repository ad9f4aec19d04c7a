//! Brègman's upper bound `per A <= prod_i (r_i!)^(1/r_i)` and exact
//! comparisons against integer thresholds.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{BinMatrix, RowProfile};
use crate::permanent::factorial;

/// Above this many bits in either side of an exact comparison we fall back
/// to comparing logarithms.
pub const EXACT_BITS_BUDGET: f64 = (1u64 << 24) as f64;

/// Relative slack under which two logarithms are considered tied.
const LOG_MARGIN: f64 = 1e-9;

/// Natural log of `r!`.
pub fn ln_factorial(r: usize) -> f64 {
    (2..=r).map(|k| (k as f64).ln()).sum()
}

/// `(r!)^(1/r)` in log form; `r = 0` is `-inf` (a zero line forces per = 0).
pub fn ln_row_factor(r: usize) -> f64 {
    if r == 0 {
        f64::NEG_INFINITY
    } else {
        ln_factorial(r) / r as f64
    }
}

/// A Brègman-type bound `scale * prod (r!)^(count/r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    /// Natural log of the bound (`-inf` when some factor has `r = 0`).
    pub log_value: f64,
    /// `(r, count)` pairs, `r` distinct and decreasing.
    pub exact_factors: Vec<(usize, usize)>,
    /// Integer prefactor; 1 for the plain bound of a matrix.
    #[serde(default = "one_big")]
    pub scale: BigUint,
}

fn one_big() -> BigUint {
    BigUint::one()
}

impl BoundValue {
    pub fn from_profile(profile: &RowProfile) -> Self {
        Self::from_factors(profile.counts())
    }

    pub fn from_factors(mut factors: Vec<(usize, usize)>) -> Self {
        factors.retain(|&(_, c)| c > 0);
        factors.sort_unstable_by_key(|f| std::cmp::Reverse(f.0));
        let log_value = factors
            .iter()
            .map(|&(r, c)| c as f64 * ln_row_factor(r))
            .sum();
        BoundValue {
            log_value,
            exact_factors: factors,
            scale: BigUint::one(),
        }
    }

    /// Multiplies the bound by an integer.
    pub fn scaled(mut self, factor: &BigUint) -> Self {
        self.scale *= factor;
        if self.scale.is_zero() {
            self.log_value = f64::NEG_INFINITY;
        } else {
            self.log_value += ln_big(factor);
        }
        self
    }

    /// True when the bound is exactly zero (a zero line or zero scale).
    pub fn is_zero(&self) -> bool {
        self.scale.is_zero() || self.exact_factors.iter().any(|&(r, _)| r == 0)
    }

    pub fn value_f64(&self) -> f64 {
        self.log_value.exp()
    }

    /// Exact three-way comparison with an integer, or `None` when the powers
    /// involved exceed [`EXACT_BITS_BUDGET`].
    pub fn cmp_exact(&self, threshold: &BigUint) -> Option<Ordering> {
        if self.is_zero() {
            return Some(BigUint::zero().cmp(threshold));
        }
        if threshold.is_zero() {
            return Some(Ordering::Greater);
        }
        let l = self
            .exact_factors
            .iter()
            .fold(1usize, |acc, &(r, _)| acc.lcm(&r));
        let lhs_bits = l as f64 * self.log_value / std::f64::consts::LN_2;
        let rhs_bits = l as f64 * threshold.bits() as f64;
        if lhs_bits.max(rhs_bits) > EXACT_BITS_BUDGET {
            return None;
        }
        let l32 = u32::try_from(l).ok()?;
        let mut lhs = self.scale.pow(l32);
        for &(r, c) in &self.exact_factors {
            let e = u32::try_from((l / r) * c).ok()?;
            lhs *= factorial(r).pow(e);
        }
        let rhs = threshold.pow(l32);
        Some(lhs.cmp(&rhs))
    }

    /// Comparison with an integer. Decided from logarithms when they are
    /// clearly apart, otherwise exactly; if the exact route is over budget
    /// the result is `None` (an unresolved near-tie).
    pub fn compare(&self, threshold: &BigUint) -> Option<Ordering> {
        if self.is_zero() || threshold.is_zero() {
            return self.cmp_exact(threshold);
        }
        let rhs = ln_big(threshold);
        let slack = LOG_MARGIN * (1.0 + rhs.abs().max(self.log_value.abs()));
        if self.log_value > rhs + slack {
            return Some(Ordering::Greater);
        }
        if self.log_value < rhs - slack {
            return Some(Ordering::Less);
        }
        self.cmp_exact(threshold)
    }
}

/// Natural log of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Brègman bound over the row sums of `a`.
pub fn bregman_bound(a: &BinMatrix) -> BoundValue {
    BoundValue::from_profile(&a.row_sums())
}

/// True iff the bound is strictly greater than `threshold`. Near-ties that
/// cannot be resolved exactly answer `true`, so a pruning caller never
/// discards a branch on a tie.
pub fn bound_exceeds(bound: &BoundValue, threshold: &BigUint) -> bool {
    match bound.compare(threshold) {
        Some(Ordering::Greater) | None => true,
        Some(_) => false,
    }
}

/// True iff the bound is at least `threshold`, with the same conservative
/// treatment of unresolved near-ties.
pub fn bound_at_least(bound: &BoundValue, threshold: &BigUint) -> bool {
    !matches!(bound.compare(threshold), Some(Ordering::Less))
}
