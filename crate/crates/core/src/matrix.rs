//! Square (0,1)-matrices of order at most 64, stored one `u64` per row.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A square (0,1)-matrix. Bit `j` of `rows[i]` is the entry in row `i`,
/// column `j` (both zero-based).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BinMatrix {
    n: usize,
    rows: Vec<u64>,
}

/// Multiset of line sums, kept in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RowProfile {
    pub sums: Vec<usize>,
}

impl RowProfile {
    fn from_unsorted(mut sums: Vec<usize>) -> Self {
        sums.sort_unstable_by(|a, b| b.cmp(a));
        RowProfile { sums }
    }

    pub fn total(&self) -> usize {
        self.sums.iter().sum()
    }

    /// `(value, multiplicity)` pairs in decreasing value order.
    pub fn counts(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &s in &self.sums {
            match out.last_mut() {
                Some((v, c)) if *v == s => *c += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        Err(Error::OrderOutOfRange(n))
    } else {
        Ok(())
    }
}

impl BinMatrix {
    /// The zero matrix of order `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        check_order(n)?;
        Ok(BinMatrix {
            n,
            rows: vec![0; n],
        })
    }

    /// Builds a matrix from row bitmasks, rejecting stray high bits.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self> {
        check_order(n)?;
        if rows.len() != n {
            return Err(Error::OrderMismatch(n, rows.len()));
        }
        let mask = full_mask(n);
        if let Some(i) = rows.iter().position(|&r| r & !mask != 0) {
            return Err(Error::Domain(format!(
                "row {i} has bits at or above column {n}"
            )));
        }
        Ok(BinMatrix { n, rows })
    }

    /// Builds from nested 0/1 values, e.g. a literal in a test.
    pub fn from_entries<R: AsRef<[u8]>>(entries: &[R]) -> Result<Self> {
        let n = entries.len();
        check_order(n)?;
        let mut rows = Vec::with_capacity(n);
        for (i, row) in entries.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            let mut bits = 0u64;
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => bits |= 1 << j,
                    _ => {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("entry {v} is not 0 or 1"),
                        })
                    }
                }
            }
            rows.push(bits);
        }
        Ok(BinMatrix { n, rows })
    }

    /// `J_k`.
    pub fn all_ones(k: usize) -> Result<Self> {
        check_order(k)?;
        Ok(BinMatrix {
            n: k,
            rows: vec![full_mask(k); k],
        })
    }

    /// `I_k`.
    pub fn identity(k: usize) -> Result<Self> {
        check_order(k)?;
        Ok(BinMatrix {
            n: k,
            rows: (0..k).map(|i| 1u64 << i).collect(),
        })
    }

    /// `C_k`: ones at `(i, i+1 mod k)`.
    pub fn cycle(k: usize) -> Result<Self> {
        check_order(k)?;
        Ok(BinMatrix {
            n: k,
            rows: (0..k).map(|i| 1u64 << ((i + 1) % k)).collect(),
        })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn ones_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn zeros_count(&self) -> usize {
        self.n * self.n - self.ones_count()
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &BinMatrix) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_ORDER {
            return Err(Error::CombinedOrderTooLarge(n));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().map(|&r| r << self.n));
        Ok(BinMatrix { n, rows })
    }

    /// Direct sum of a nonempty sequence of blocks, left to right.
    pub fn direct_sum_all<'a, I>(blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BinMatrix>,
    {
        let mut iter = blocks.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::Domain("direct sum of zero blocks".into()))?
            .clone();
        iter.try_fold(first, |acc, b| acc.direct_sum(b))
    }

    pub fn complement(&self) -> Self {
        let mask = full_mask(self.n);
        BinMatrix {
            n: self.n,
            rows: self.rows.iter().map(|&r| !r & mask).collect(),
        }
    }

    /// Entrywise sum restricted to (0,1) values; fails if both have a one
    /// in the same cell.
    pub fn disjoint_union(&self, other: &BinMatrix) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::OrderMismatch(self.n, other.n));
        }
        let mut rows = Vec::with_capacity(self.n);
        for (i, (&a, &b)) in self.rows.iter().zip(&other.rows).enumerate() {
            if a & b != 0 {
                return Err(Error::Domain(format!("overlapping ones in row {i}")));
            }
            rows.push(a | b);
        }
        Ok(BinMatrix { n: self.n, rows })
    }

    /// Toggles entry `(i, j)`.
    pub fn flip(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange { i, j, n: self.n });
        }
        let mut out = self.clone();
        out.rows[i] ^= 1 << j;
        Ok(out)
    }

    pub fn row_sums(&self) -> RowProfile {
        RowProfile::from_unsorted(self.rows.iter().map(|r| r.count_ones() as usize).collect())
    }

    pub fn col_sums(&self) -> RowProfile {
        RowProfile::from_unsorted(self.column_sums_in_order())
    }

    /// Column sums indexed by column (not sorted).
    pub fn column_sums_in_order(&self) -> Vec<usize> {
        (0..self.n)
            .map(|j| self.rows.iter().filter(|&&r| r >> j & 1 == 1).count())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![0u64; self.n];
        for (i, &r) in self.rows.iter().enumerate() {
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                rows[j] |= 1 << i;
            }
        }
        BinMatrix { n: self.n, rows }
    }

    /// `P A Q`: row `i` of the result is row `row_perm[i]` of `self`, and
    /// column `j` of the result is column `col_perm[j]` of `self`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        let n = self.n;
        if !is_permutation(row_perm, n) || !is_permutation(col_perm, n) {
            return Err(Error::Domain(format!("not a permutation of 0..{n}")));
        }
        let rows = row_perm
            .iter()
            .map(|&src| permute_bits(self.rows[src], col_perm))
            .collect();
        Ok(BinMatrix { n, rows })
    }

    pub fn has_zero_line(&self) -> bool {
        let mask = full_mask(self.n);
        self.rows.contains(&0) || self.rows.iter().fold(0, |acc, &r| acc | r) != mask
    }

    /// Row-major text, one line per row, no separators.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1));
        for &r in &self.rows {
            for j in 0..self.n {
                s.push(if r >> j & 1 == 1 { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses `n` lines of `n` characters from `{0,1}`; entries may be
    /// separated by single spaces. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<u64> = Vec::new();
        let mut width: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() {
                continue;
            }
            let spaced = line.contains(' ');
            let mut bits = 0u64;
            let mut count = 0usize;
            for (pos, ch) in line.chars().enumerate() {
                if spaced && pos % 2 == 1 {
                    if ch != ' ' {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: "expected single-space separation".into(),
                        });
                    }
                    continue;
                }
                let v = match ch {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("illegal character {other:?}"),
                        })
                    }
                };
                if count >= MAX_ORDER {
                    return Err(Error::OrderOutOfRange(count + 1));
                }
                bits |= v << count;
                count += 1;
            }
            match width {
                None => width = Some(count),
                Some(w) if w != count => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("ragged row: expected {w} entries, found {count}"),
                    })
                }
                _ => {}
            }
            rows.push(bits);
        }
        let n = width.ok_or(Error::Parse {
            line: 0,
            msg: "empty matrix".into(),
        })?;
        if rows.len() != n {
            return Err(Error::Parse {
                line: rows.len(),
                msg: format!("ragged matrix: {} rows of width {n}", rows.len()),
            });
        }
        check_order(n)?;
        Ok(BinMatrix { n, rows })
    }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = 0u64;
    for &x in p {
        if x >= n || seen >> x & 1 == 1 {
            return false;
        }
        seen |= 1 << x;
    }
    true
}

/// Output bit `j` takes input bit `perm[j]`.
#[inline]
pub(crate) fn permute_bits(row: u64, perm: &[usize]) -> u64 {
    perm.iter()
        .enumerate()
        .fold(0, |acc, (j, &src)| acc | ((row >> src & 1) << j))
}

impl fmt::Display for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinMatrix({}; ", self.n)?;
        for (i, &r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for j in 0..self.n {
                f.write_str(if r >> j & 1 == 1 { "1" } else { "0" })?;
            }
        }
        f.write_str(")")
    }
}

impl FromStr for BinMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BinMatrix::parse(s)
    }
}

impl TryFrom<String> for BinMatrix {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        BinMatrix::parse(&s)
    }
}

impl From<BinMatrix> for String {
    fn from(m: BinMatrix) -> String {
        m.to_text()
    }
}
