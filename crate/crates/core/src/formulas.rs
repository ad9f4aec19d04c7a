//! Closed forms for the maximum permanent `mu(n, tau)` over (0,1)-matrices
//! of order `n` with `tau` zeros, evaluated in exact rational arithmetic.
//!
//! Three regimes are covered, named after the density window they apply to
//! and tagged `11`, `15`, `16` on the command line:
//!
//! * [`Regime::Sparse`] (`11`): `n <= sigma <= 2n`, value `2^floor((sigma-n)/2)`.
//! * [`Regime::Balanced`] (`15`): `kn <= sigma <= (k+1)n` with
//!   `sigma - kn = 0 (mod k+1)` and `(k+1)n - sigma = 0 (mod k)`; value
//!   `((k+1)!)^((sigma-kn)/(k+1)) * (k!)^(((k+1)n-sigma)/k)`.
//! * [`Regime::Mid`] (`16`): `2n+1 <= sigma <= 3n`, value
//!   `c * 6^floor((sigma-2n)/3) * 2^floor((3n-sigma)/2)` with `c` picked from
//!   `{1, 3/2, 2, 3, 4}` by the residue of `sigma - 2n` and the parity of
//!   `3n - sigma`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permanent::factorial;

/// Which closed form produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "11")]
    Sparse,
    #[serde(rename = "15")]
    Balanced,
    #[serde(rename = "16")]
    Mid,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::Sparse => "11",
            Regime::Balanced => "15",
            Regime::Mid => "16",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Case classification inside the mid-density window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTag {
    /// `(sigma - 2n) mod 3`.
    pub residue: u8,
    /// Whether `3n - sigma` is even.
    pub parity_even: bool,
    /// Leading coefficient, one of `1, 3/2, 2, 3, 4`.
    #[serde(with = "ratio_str")]
    pub k_coeff: Ratio<u64>,
}

/// Counts behind a balanced-blocks value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDerivation {
    pub k_block: usize,
    /// Rows with sum `k`: `x = nk + n - sigma`.
    pub x: usize,
    /// Rows with sum `k + 1`: `y = sigma - nk`.
    pub y: usize,
    /// Number of `J_{k+1}` blocks.
    pub big_blocks: usize,
    /// Number of `J_k` blocks.
    pub small_blocks: usize,
}

/// An exact value of `mu(n, tau)` together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuValue {
    pub n: usize,
    pub tau: usize,
    pub sigma: usize,
    #[serde(with = "rational_str")]
    pub value: BigRational,
    pub theorem: Regime,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<CaseTag>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub derivation: Option<BlockDerivation>,
    /// Identity-block size `e = n - 2 floor((sigma-n)/2)` for the sparse regime.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub e: Option<usize>,
    /// Precondition warnings (the value is still computed).
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl MuValue {
    /// The value as an integer. Panics if it is not integral, which would be
    /// an arithmetic bug: every closed form here is integral on its window.
    pub fn integer(&self) -> BigUint {
        assert!(
            self.value.is_integer(),
            "non-integral mu value {}",
            self.value
        );
        self.value
            .to_integer()
            .to_biguint()
            .expect("mu values are nonnegative")
    }
}

/// Outcome of routing `(n, tau)` to a closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Coverage {
    Covered(MuValue),
    NotCovered {
        n: usize,
        tau: usize,
        sigma: usize,
        reason: String,
    },
}

fn sigma_of(n: usize, tau: usize) -> Result<usize> {
    let nn = n * n;
    if n == 0 || n > 64 {
        return Err(Error::OrderOutOfRange(n));
    }
    if tau > nn {
        return Err(Error::Domain(format!("tau={tau} exceeds n^2={nn}")));
    }
    Ok(nn - tau)
}

fn pow_big(base: u64, exp: usize) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

fn int_rational(v: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Case tag for `2n+1 <= sigma <= 3n`.
pub fn classify_sigma(n: usize, sigma: usize) -> Result<CaseTag> {
    if sigma < 2 * n + 1 || sigma > 3 * n {
        return Err(Error::Window(format!(
            "sigma={sigma} outside [2n+1, 3n] = [{}, {}]",
            2 * n + 1,
            3 * n
        )));
    }
    let residue = ((sigma - 2 * n) % 3) as u8;
    let parity_even = (3 * n - sigma).is_multiple_of(2);
    let k_coeff = match (residue, parity_even) {
        (0, _) => Ratio::from_integer(1),
        (1, true) => Ratio::new(3, 2),
        (1, false) => Ratio::from_integer(2),
        (2, true) => Ratio::from_integer(3),
        (2, false) => Ratio::from_integer(4),
        _ => unreachable!(),
    };
    Ok(CaseTag {
        residue,
        parity_even,
        k_coeff,
    })
}

/// Mid-density closed form, `2n+1 <= sigma <= 3n`. Orders below 8 are
/// evaluated with a warning.
pub fn mu_mid(n: usize, tau: usize) -> Result<MuValue> {
    let sigma = sigma_of(n, tau)?;
    if n < 3 {
        return Err(Error::Window(format!("n={n} below 3")));
    }
    let case = classify_sigma(n, sigma)?;
    let six = pow_big(6, (sigma - 2 * n) / 3);
    let two = pow_big(2, (3 * n - sigma) / 2);
    let coeff = BigRational::new(
        BigInt::from(*case.k_coeff.numer()),
        BigInt::from(*case.k_coeff.denom()),
    );
    let value = coeff * int_rational(six * two);
    assert!(
        value.is_integer(),
        "non-integral mid-density value at n={n}, sigma={sigma}"
    );
    let mut warnings = Vec::new();
    if n < 8 {
        warnings.push(format!("n={n} below 8: outside the proven range"));
    }
    Ok(MuValue {
        n,
        tau,
        sigma,
        value,
        theorem: Regime::Mid,
        case: Some(case),
        derivation: None,
        e: None,
        warnings,
    })
}

/// Reasons a block size `k` does not apply at `(n, sigma)`, empty if it does.
pub fn balanced_violations(n: usize, sigma: usize, k: usize) -> Vec<String> {
    let mut out = Vec::new();
    if k == 0 {
        out.push("k must be at least 1".to_string());
        return out;
    }
    if sigma < k * n || sigma > (k + 1) * n {
        out.push(format!(
            "sigma={sigma} outside [kn, (k+1)n] = [{}, {}]",
            k * n,
            (k + 1) * n
        ));
        return out;
    }
    if !(sigma - k * n).is_multiple_of(k + 1) {
        out.push(format!(
            "sigma - kn = {} is not divisible by k+1 = {}",
            sigma - k * n,
            k + 1
        ));
    }
    if !((k + 1) * n - sigma).is_multiple_of(k) {
        out.push(format!(
            "(k+1)n - sigma = {} is not divisible by k = {k}",
            (k + 1) * n - sigma
        ));
    }
    out
}

/// Balanced-blocks closed form for block size `k_block`.
pub fn mu_balanced(n: usize, tau: usize, k_block: usize) -> Result<MuValue> {
    let sigma = sigma_of(n, tau)?;
    let k = k_block;
    let problems = balanced_violations(n, sigma, k);
    if !problems.is_empty() {
        return Err(Error::Window(problems.join("; ")));
    }
    let big_blocks = (sigma - k * n) / (k + 1);
    let small_blocks = ((k + 1) * n - sigma) / k;
    let x = n * k + n - sigma;
    let y = sigma - n * k;
    debug_assert_eq!(x + y, n);
    debug_assert_eq!(big_blocks * (k + 1) + small_blocks * k, n);
    let value = factorial(k + 1).pow(big_blocks as u32) * factorial(k).pow(small_blocks as u32);
    let mut warnings = Vec::new();
    if n < 3 {
        warnings.push(format!("n={n} below 3: outside the proven range"));
    }
    Ok(MuValue {
        n,
        tau,
        sigma,
        value: int_rational(value),
        theorem: Regime::Balanced,
        case: None,
        derivation: Some(BlockDerivation {
            k_block: k,
            x,
            y,
            big_blocks,
            small_blocks,
        }),
        e: None,
        warnings,
    })
}

/// Smallest block size for which the balanced form applies, if any.
pub fn balanced_block_size(n: usize, sigma: usize) -> Option<usize> {
    (1..=n.max(1)).find(|&k| balanced_violations(n, sigma, k).is_empty())
}

/// Sparse closed form, `n <= sigma <= 2n`.
pub fn mu_sparse(n: usize, tau: usize) -> Result<MuValue> {
    let sigma = sigma_of(n, tau)?;
    if sigma < n || sigma > 2 * n {
        return Err(Error::Window(format!(
            "sigma={sigma} outside [n, 2n] = [{n}, {}]",
            2 * n
        )));
    }
    let half = (sigma - n) / 2;
    let mut warnings = Vec::new();
    if n < 3 {
        warnings.push(format!("n={n} below 3: outside the proven range"));
    }
    Ok(MuValue {
        n,
        tau,
        sigma,
        value: int_rational(pow_big(2, half)),
        theorem: Regime::Sparse,
        case: None,
        derivation: None,
        e: Some(n - 2 * half),
        warnings,
    })
}

/// Routes to the applicable closed form: mid-density first, then balanced
/// blocks (smallest `k`), then sparse.
pub fn mu_dispatch(n: usize, tau: usize) -> Result<Coverage> {
    let sigma = sigma_of(n, tau)?;
    if n >= 3 && sigma > 2 * n && sigma <= 3 * n {
        return mu_mid(n, tau).map(Coverage::Covered);
    }
    if let Some(k) = balanced_block_size(n, sigma) {
        return mu_balanced(n, tau, k).map(Coverage::Covered);
    }
    if sigma >= n && sigma <= 2 * n {
        return mu_sparse(n, tau).map(Coverage::Covered);
    }
    let reason = if sigma < n {
        format!("sigma={sigma} < n: every matrix has a zero line or too few ones; no closed form listed")
    } else {
        format!("sigma={sigma} outside every closed-form window (no block size k satisfies both congruences)")
    };
    Ok(Coverage::NotCovered {
        n,
        tau,
        sigma,
        reason,
    })
}

/// Every closed form that applies at `(n, tau)`; used for overlap checks.
pub fn mu_all(n: usize, tau: usize) -> Result<Vec<MuValue>> {
    let sigma = sigma_of(n, tau)?;
    let mut out = Vec::new();
    if n >= 3 && sigma > 2 * n && sigma <= 3 * n {
        out.push(mu_mid(n, tau)?);
    }
    for k in 1..=n {
        if balanced_violations(n, sigma, k).is_empty() {
            out.push(mu_balanced(n, tau, k)?);
        }
    }
    if sigma >= n && sigma <= 2 * n {
        out.push(mu_sparse(n, tau)?);
    }
    Ok(out)
}

/// Largest exponent size (in bits) accepted by [`factorial_root_inequality_holds`].
pub const INEQUALITY_BITS_BUDGET: f64 = (1u64 << 22) as f64;

/// Exact truth of
/// `((m+t-1)!)^(1/(m+t-1)) (m!)^(1/m) > ((m+t)!)^(1/(m+t)) ((m-1)!)^(1/(m-1))`,
/// decided by raising both sides to `L = lcm(m-1, m, m+t-1, m+t)`.
pub fn factorial_root_inequality_holds(m: usize, t: usize) -> Result<bool> {
    if m < 2 || t < 1 {
        return Err(Error::Domain(format!(
            "need m >= 2 and t >= 1, got m={m}, t={t}"
        )));
    }
    let exps = [m - 1, m, m + t - 1, m + t];
    let l = exps.iter().fold(1usize, |acc, &v| acc.lcm(&v));
    let approx_bits: f64 = exps
        .iter()
        .map(|&r| (l / r) as f64 * crate::bound::ln_factorial(r) / std::f64::consts::LN_2)
        .sum();
    if approx_bits > INEQUALITY_BITS_BUDGET {
        return Err(Error::ComparisonBudget(format!(
            "m={m}, t={t}: L={l} needs about {approx_bits:.0} bits"
        )));
    }
    let side = |a: usize, b: usize| -> BigUint {
        factorial(a).pow((l / a) as u32) * factorial(b).pow((l / b) as u32)
    };
    let lhs = side(m + t - 1, m);
    let rhs = side(m + t, m - 1);
    Ok(lhs > rhs)
}

mod ratio_str {
    use num_rational::Ratio;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

mod rational_str {
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Convenience for tests and reports: the value as `u128` if it fits.
pub fn as_u128(v: &MuValue) -> Option<u128> {
    v.integer().to_u128()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(v: &MuValue) -> u128 {
        as_u128(v).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c = classify_sigma(8, 17).unwrap();
        assert_eq!((c.residue, c.parity_even), (1, false));
        assert_eq!(c.k_coeff, Ratio::from_integer(2));
        let c = classify_sigma(8, 21).unwrap();
        assert_eq!(
            (c.residue, c.parity_even, c.k_coeff),
            (2, false, Ratio::from_integer(4))
        );
        let c = classify_sigma(8, 24).unwrap();
        assert_eq!(
            (c.residue, c.parity_even, c.k_coeff),
            (2, true, Ratio::from_integer(3))
        );
        let c = classify_sigma(8, 20).unwrap();
        assert_eq!(c.k_coeff, Ratio::new(3, 2));
        assert!(classify_sigma(8, 16).is_err());
        assert!(classify_sigma(8, 25).is_err());
    }

    #[test]
    fn mid_values() {
        assert_eq!(val(&mu_mid(8, 44).unwrap()), 36);
        assert_eq!(val(&mu_mid(8, 42).unwrap()), 72);
        assert_eq!(val(&mu_mid(8, 46).unwrap()), 24);
        assert!(mu_mid(8, 44).unwrap().warnings.is_empty());
        assert!(!mu_mid(5, 25 - 12).unwrap().warnings.is_empty());
        assert!(mu_mid(8, 48).is_err());
    }

    #[test]
    fn balanced_values() {
        let v = mu_balanced(6, 36 - 18, 2).unwrap();
        assert_eq!(val(&v), 36);
        let d = v.derivation.unwrap();
        assert_eq!((d.big_blocks, d.small_blocks, d.x, d.y), (2, 0, 0, 6));
        let v = mu_balanced(6, 36 - 12, 2).unwrap();
        assert_eq!(val(&v), 8);
        assert_eq!(v.derivation.as_ref().unwrap().small_blocks, 3);
        assert_eq!(val(&mu_balanced(12, 144 - 30, 2).unwrap()), 288);
        let err = mu_balanced(6, 36 - 13, 2).unwrap_err().to_string();
        assert!(err.contains("divisible by k+1"), "{err}");
        let err = mu_balanced(6, 36 - 15, 2).unwrap_err().to_string();
        assert!(err.contains("divisible by k = 2"), "{err}");
    }

    #[test]
    fn sparse_values() {
        let v = mu_sparse(5, 20).unwrap();
        assert_eq!((val(&v), v.e), (1, Some(5)));
        let v = mu_sparse(5, 16).unwrap();
        assert_eq!((val(&v), v.e), (4, Some(1)));
        assert_eq!(val(&mu_sparse(6, 24).unwrap()), 8);
        assert!(mu_sparse(5, 21).is_err());
    }

    #[test]
    fn dispatch() {
        match mu_dispatch(8, 47).unwrap() {
            Coverage::Covered(v) => {
                assert_eq!(v.theorem, Regime::Mid);
                assert_eq!(val(&v), 16);
            }
            other => panic!("{other:?}"),
        }
        match mu_dispatch(6, 24).unwrap() {
            Coverage::Covered(v) => {
                assert_eq!(v.theorem, Regime::Balanced);
                assert_eq!(val(&v), 8);
            }
            other => panic!("{other:?}"),
        }
        let all = mu_all(6, 24).unwrap();
        assert!(all.iter().any(|v| v.theorem == Regime::Sparse));
        assert!(all.iter().all(|v| val(v) == 8));
        assert!(matches!(
            mu_dispatch(10, 60).unwrap(),
            Coverage::NotCovered { .. }
        ));
    }

    #[test]
    fn inequality_small_cases() {
        assert!(factorial_root_inequality_holds(2, 1).unwrap());
        assert!(factorial_root_inequality_holds(3, 1).unwrap());
        assert!(factorial_root_inequality_holds(1, 1).is_err());
        assert!(factorial_root_inequality_holds(2, 0).is_err());
    }

    #[test]
    fn inequality_by_hand() {
        // L = lcm(1,2,2,3) = 6: lhs = (2!)^3 (2!)^3 = 64, rhs = (3!)^2 (1!)^6 = 36
        let lhs = factorial(2).pow(3) * factorial(2).pow(3);
        let rhs = factorial(3).pow(2) * factorial(1).pow(6);
        assert_eq!(lhs, BigUint::from(64u32));
        assert_eq!(rhs, BigUint::from(36u32));
    }
}
