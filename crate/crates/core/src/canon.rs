//! Canonical forms under independent row and column permutations.
//!
//! The canonical form of `A` is the lexicographically greatest row-major bit
//! string among all `PAQ`. For a fixed row order the best column order is
//! forced: sort columns by their top-to-bottom bit vectors, ones first. So
//! the search runs over row orders only, keeping at each depth every partial
//! order whose prefix is maximal. Partial states are `(remaining rows,
//! ordered column classes)`; within a state, candidate rows related by a
//! column transposition that fixes the state are explored once.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::matrix::{full_mask, BinMatrix};

/// Largest order accepted by [`canonical_form`].
pub const CANON_MAX_ORDER: usize = 16;
/// Cap on simultaneously live partial states.
pub const CANON_MAX_STATES: usize = 4_000_000;

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    remaining: Vec<u64>,
    classes: Vec<u64>,
}

/// Row string key: column 0 is the most significant bit.
#[inline]
pub(crate) fn row_key(row: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        row.reverse_bits() >> (64 - n)
    }
}

/// Places `row` against the ordered column classes. Returns the row in
/// canonical coordinates and the refined class list.
fn place(row: u64, classes: &[u64]) -> (u64, Vec<u64>) {
    let mut out = 0u64;
    let mut pos = 0u32;
    let mut refined = Vec::with_capacity(classes.len() + 1);
    for &c in classes {
        let hit = row & c;
        let k = hit.count_ones();
        let size = c.count_ones();
        if k > 0 {
            out |= full_mask(k as usize) << pos;
            refined.push(hit);
        }
        if k < size {
            refined.push(c & !hit);
        }
        pos += size;
    }
    (out, refined)
}

fn swap_bits(row: u64, b: u32, c: u32) -> u64 {
    let x = (row >> b ^ row >> c) & 1;
    row ^ (x << b | x << c)
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Distinct candidate rows of a state, one per orbit of the transpositions
/// that fix the state.
fn orbit_representatives(state: &State) -> Vec<u64> {
    let mut cands: Vec<u64> = state.remaining.clone();
    cands.dedup();
    if cands.len() <= 1 {
        return cands;
    }
    let mut dsu = Dsu((0..cands.len()).collect());
    let mut scratch: Vec<u64> = Vec::with_capacity(state.remaining.len());
    for &class in &state.classes {
        if class.count_ones() < 2 {
            continue;
        }
        let cols: Vec<u32> = (0..64).filter(|&j| class >> j & 1 == 1).collect();
        for (ib, &b) in cols.iter().enumerate() {
            for &c in &cols[ib + 1..] {
                scratch.clear();
                scratch.extend(state.remaining.iter().map(|&r| swap_bits(r, b, c)));
                scratch.sort_unstable();
                if scratch != state.remaining {
                    continue;
                }
                for (i, &x) in cands.iter().enumerate() {
                    let y = swap_bits(x, b, c);
                    if y != x {
                        if let Ok(j) = cands.binary_search(&y) {
                            dsu.union(i, j);
                        }
                    }
                }
            }
        }
    }
    (0..cands.len())
        .filter(|&i| dsu.find(i) == i)
        .map(|i| cands[i])
        .collect()
}

/// Lexicographically greatest `PAQ` (row-major, ones packed early).
pub fn canonical_form(a: &BinMatrix) -> Result<BinMatrix> {
    let n = a.order();
    if n > CANON_MAX_ORDER {
        return Err(Error::OverBudget {
            what: "canonical form",
            n,
            max: CANON_MAX_ORDER,
        });
    }
    let mut remaining = a.rows().to_vec();
    remaining.sort_unstable();
    let mut states = vec![State {
        remaining,
        classes: vec![full_mask(n)],
    }];
    let mut out_rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(u64, u64)> = None;
        let mut next: HashSet<State> = HashSet::new();
        for st in &states {
            for x in orbit_representatives(st) {
                let (placed, classes) = place(x, &st.classes);
                let key = row_key(placed, n);
                match best {
                    Some((bk, _)) if key < bk => continue,
                    Some((bk, _)) if key > bk => {
                        next.clear();
                        best = Some((key, placed));
                    }
                    None => best = Some((key, placed)),
                    _ => {}
                }
                let mut remaining = st.remaining.clone();
                let pos = remaining.binary_search(&x).expect("candidate present");
                remaining.remove(pos);
                next.insert(State { remaining, classes });
                if next.len() > CANON_MAX_STATES {
                    return Err(Error::OverBudget {
                        what: "canonical form state",
                        n: next.len(),
                        max: CANON_MAX_STATES,
                    });
                }
            }
        }
        let (_, placed) = best.expect("at least one state");
        out_rows.push(placed);
        states = next.into_iter().collect();
    }
    BinMatrix::from_rows(n, out_rows)
}

/// `A ~ B` iff `B = PAQ` for permutation matrices `P`, `Q`.
pub fn is_equivalent(a: &BinMatrix, b: &BinMatrix) -> Result<bool> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch(a.order(), b.order()));
    }
    if a.ones_count() != b.ones_count()
        || a.row_sums() != b.row_sums()
        || a.col_sums() != b.col_sums()
    {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// Equivalence that also allows transposition. Exploration only.
pub fn is_equivalent_with_transpose(a: &BinMatrix, b: &BinMatrix) -> Result<bool> {
    Ok(is_equivalent(a, b)? || is_equivalent(&a.transpose(), b)?)
}

impl BinMatrix {
    pub fn canonical_form(&self) -> Result<BinMatrix> {
        canonical_form(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> BinMatrix {
        BinMatrix::parse(s).unwrap()
    }

    /// Brute force over all row and column permutations.
    fn brute_canon(a: &BinMatrix) -> BinMatrix {
        let n = a.order();
        let perms = all_perms(n);
        let mut best: Option<(Vec<u64>, BinMatrix)> = None;
        for rp in &perms {
            for cp in &perms {
                let b = a.permute(rp, cp).unwrap();
                let key: Vec<u64> = b.rows().iter().map(|&r| row_key(r, n)).collect();
                if best.as_ref().is_none_or(|(k, _)| key > *k) {
                    best = Some((key, b));
                }
            }
        }
        best.unwrap().1
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn identity_swap() {
        let i2 = BinMatrix::identity(2).unwrap();
        let swapped = m("01\n10");
        assert_eq!(
            canonical_form(&i2).unwrap(),
            canonical_form(&swapped).unwrap()
        );
        assert_eq!(canonical_form(&i2).unwrap().to_text(), "10\n01\n");
    }

    #[test]
    fn block_reorder() {
        let j2 = BinMatrix::all_ones(2).unwrap();
        let j3 = BinMatrix::all_ones(3).unwrap();
        let a = j2.direct_sum(&j3).unwrap();
        let b = j3.direct_sum(&j2).unwrap();
        assert!(is_equivalent(&a, &b).unwrap());
        assert_eq!(
            canonical_form(&a).unwrap().to_text(),
            "11100\n11100\n11100\n00011\n00011\n"
        );
    }

    #[test]
    fn different_row_profiles() {
        let d3 = BinMatrix::identity(3).unwrap().complement();
        let v = m("011\n111\n111");
        assert!(!is_equivalent(&d3, &v).unwrap());
        assert_ne!(canonical_form(&d3).unwrap(), canonical_form(&v).unwrap());
        assert!(is_equivalent(&d3, &BinMatrix::identity(2).unwrap()).is_err());
    }

    #[test]
    fn matches_brute_force_on_samples() {
        let samples = [
            "0011\n1101\n1110\n1101",
            "0011\n1011\n1101\n1110",
            "0011\n1011\n1100\n1111",
            "1000\n0100\n0010\n0001",
            "0110\n1001\n1001\n0110",
            "10100\n01010\n00101\n10010\n01001",
            "11000\n11000\n00110\n00101\n00011",
            "00000\n01000\n00110\n10000\n00000",
        ];
        for s in samples {
            let a = m(s);
            assert_eq!(canonical_form(&a).unwrap(), brute_canon(&a), "{s}");
        }
    }

    #[test]
    fn transpose_mode() {
        let a = m("110\n100\n000");
        let t = a.transpose();
        // This one is its own transpose up to PAQ.
        assert!(is_equivalent(&a, &t).unwrap());
        let b = m("111\n100\n000");
        assert!(!is_equivalent(&b, &b.transpose()).unwrap());
        assert!(is_equivalent_with_transpose(&b, &b.transpose()).unwrap());
    }

    #[test]
    fn symmetric_inputs_stay_cheap() {
        let i16 = BinMatrix::identity(16).unwrap();
        assert_eq!(canonical_form(&i16).unwrap(), i16);
        let c = BinMatrix::cycle(12)
            .unwrap()
            .disjoint_union(&BinMatrix::identity(12).unwrap())
            .unwrap();
        let canon = canonical_form(&c).unwrap();
        assert_eq!(canon.ones_count(), 24);
        assert!(canonical_form(&BinMatrix::identity(17).unwrap()).is_err());
    }
}
