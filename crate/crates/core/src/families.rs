//! Named extremal matrix families.
//!
//! Most families are a fixed leading block followed by `J_3 ⊕ ... ⊕ J_3 ⊕
//! J_2 ⊕ ... ⊕ J_2` (or `J_{k+1}`/`J_k` blocks for `K`). The numbers of
//! trailing blocks are never free: with `n'` rows and `sigma'` ones left
//! after the leading block, `3a + 2b = n'` and `9a + 4b = sigma'` force
//! `a = (sigma' - 2n')/3` and `b = (3n' - sigma')/2`, and the family exists
//! only when both are nonnegative integers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::balanced_block_size;
use crate::matrix::BinMatrix;

/// Family identifiers. The string forms are the command-line names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    K,
    F,
    #[serde(rename = "Fstar")]
    FStar,
    U,
    V,
    W,
    X,
    Y,
    R,
    S,
    T,
    Q,
    #[serde(rename = "Pstar")]
    PStar,
    M,
    N,
    #[serde(rename = "BGM_F")]
    SparseF,
    #[serde(rename = "BGM_Fstar")]
    SparseFStar,
    #[serde(rename = "BGM_U")]
    SparseU,
    #[serde(rename = "BGM_V")]
    SparseV,
    #[serde(rename = "REG2_even")]
    Reg2Even,
    #[serde(rename = "REG2_odd")]
    Reg2Odd,
    #[serde(rename = "REG3")]
    Reg3,
    #[serde(rename = "REGn2_small")]
    RegCoSmall,
    #[serde(rename = "REGn2_split")]
    RegCoSplit,
}

impl FamilyId {
    pub const ALL: [FamilyId; 24] = [
        FamilyId::K,
        FamilyId::F,
        FamilyId::FStar,
        FamilyId::U,
        FamilyId::V,
        FamilyId::W,
        FamilyId::X,
        FamilyId::Y,
        FamilyId::R,
        FamilyId::S,
        FamilyId::T,
        FamilyId::Q,
        FamilyId::PStar,
        FamilyId::M,
        FamilyId::N,
        FamilyId::SparseF,
        FamilyId::SparseFStar,
        FamilyId::SparseU,
        FamilyId::SparseV,
        FamilyId::Reg2Even,
        FamilyId::Reg2Odd,
        FamilyId::Reg3,
        FamilyId::RegCoSmall,
        FamilyId::RegCoSplit,
    ];

    /// Families of the mid-density window `2n+1 <= sigma <= 3n`.
    pub const MID: [FamilyId; 14] = [
        FamilyId::F,
        FamilyId::U,
        FamilyId::V,
        FamilyId::W,
        FamilyId::X,
        FamilyId::Y,
        FamilyId::FStar,
        FamilyId::R,
        FamilyId::S,
        FamilyId::T,
        FamilyId::Q,
        FamilyId::PStar,
        FamilyId::M,
        FamilyId::N,
    ];

    pub const SPARSE: [FamilyId; 4] = [
        FamilyId::SparseF,
        FamilyId::SparseFStar,
        FamilyId::SparseU,
        FamilyId::SparseV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::K => "K",
            FamilyId::F => "F",
            FamilyId::FStar => "Fstar",
            FamilyId::U => "U",
            FamilyId::V => "V",
            FamilyId::W => "W",
            FamilyId::X => "X",
            FamilyId::Y => "Y",
            FamilyId::R => "R",
            FamilyId::S => "S",
            FamilyId::T => "T",
            FamilyId::Q => "Q",
            FamilyId::PStar => "Pstar",
            FamilyId::M => "M",
            FamilyId::N => "N",
            FamilyId::SparseF => "BGM_F",
            FamilyId::SparseFStar => "BGM_Fstar",
            FamilyId::SparseU => "BGM_U",
            FamilyId::SparseV => "BGM_V",
            FamilyId::Reg2Even => "REG2_even",
            FamilyId::Reg2Odd => "REG2_odd",
            FamilyId::Reg3 => "REG3",
            FamilyId::RegCoSmall => "REGn2_small",
            FamilyId::RegCoSplit => "REGn2_split",
        }
    }

    /// Families built by flipping one zero of a base matrix.
    pub fn is_flip_family(self) -> bool {
        matches!(
            self,
            FamilyId::FStar | FamilyId::PStar | FamilyId::SparseFStar
        )
    }

    pub fn is_regular(self) -> bool {
        matches!(
            self,
            FamilyId::Reg2Even
                | FamilyId::Reg2Odd
                | FamilyId::Reg3
                | FamilyId::RegCoSmall
                | FamilyId::RegCoSplit
        )
    }

    /// Common row and column sum of a regular family of order `n`.
    pub fn regular_degree(self, n: usize) -> Option<usize> {
        match self {
            FamilyId::Reg2Even | FamilyId::Reg2Odd => Some(2),
            FamilyId::Reg3 => Some(3),
            FamilyId::RegCoSmall | FamilyId::RegCoSplit => n.checked_sub(2),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .iter()
            .copied()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// A family identifier with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub n: usize,
    pub sigma: usize,
    /// Zero to flip for the `*` families (row, column, zero-based). `None`
    /// picks the first zero in row-major order.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flip: Option<(usize, usize)>,
    /// Block size for `K`. `None` picks the smallest admissible one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_block: Option<usize>,
}

impl FamilySpec {
    pub fn new(id: FamilyId, n: usize, sigma: usize) -> Self {
        FamilySpec {
            id,
            n,
            sigma,
            flip: None,
            k_block: None,
        }
    }

    pub fn with_flip(mut self, i: usize, j: usize) -> Self {
        self.flip = Some((i, j));
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_block = Some(k);
        self
    }

    pub fn tau(&self) -> usize {
        self.n * self.n - self.sigma
    }

    /// Checks the family's window without building it.
    pub fn validate(&self) -> Result<()> {
        plan(self).map(|_| ())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{{{},{}}}", self.id, self.n, self.sigma)
    }
}

#[derive(Clone, Debug)]
enum Block {
    Ones(usize),
    Identity(usize),
    Explicit(&'static [&'static [u8]]),
    /// `J_k - I_k`.
    Derangement(usize),
}

impl Block {
    fn build(&self) -> Result<BinMatrix> {
        match *self {
            Block::Ones(k) => BinMatrix::all_ones(k),
            Block::Identity(k) => BinMatrix::identity(k),
            Block::Explicit(rows) => BinMatrix::from_entries(rows),
            Block::Derangement(k) => Ok(BinMatrix::identity(k)?.complement()),
        }
    }

    fn order(&self) -> usize {
        match *self {
            Block::Ones(k) | Block::Identity(k) | Block::Derangement(k) => k,
            Block::Explicit(rows) => rows.len(),
        }
    }

    fn ones(&self) -> usize {
        match *self {
            Block::Ones(k) => k * k,
            Block::Identity(k) => k,
            Block::Derangement(k) => k * k - k,
            Block::Explicit(rows) => rows
                .iter()
                .map(|r| r.iter().filter(|&&v| v == 1).count())
                .sum(),
        }
    }
}

/// `J_3` with one zero in the corner.
const CORNER3: &[&[u8]] = &[&[0, 1, 1], &[1, 1, 1], &[1, 1, 1]];
/// `J_4` with one zero in the corner.
const CORNER4: &[&[u8]] = &[&[0, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1]];
const W_LEAD: &[&[u8]] = &[&[0, 0, 1, 1], &[1, 1, 0, 1], &[1, 1, 1, 0], &[1, 1, 0, 1]];
const X_LEAD: &[&[u8]] = &[&[0, 0, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 1], &[1, 1, 1, 0]];
const Y_LEAD: &[&[u8]] = &[&[0, 0, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 0], &[1, 1, 1, 1]];

/// Blueprint of a family member: blocks in order plus an optional flip.
struct Plan {
    blocks: Vec<Block>,
    flip: bool,
}

fn invalid(spec: &FamilySpec, reason: impl Into<String>) -> Error {
    Error::InvalidFamily {
        family: spec.id.name().to_string(),
        n: spec.n,
        sigma: spec.sigma,
        reason: reason.into(),
    }
}

/// Nonnegative `(a, b)` with `3a + 2b = rows`, `9a + 4b = ones`.
fn three_two_mix(rows: isize, ones: isize) -> std::result::Result<(usize, usize), String> {
    let a3 = ones - 2 * rows;
    let b2 = 3 * rows - ones;
    if a3 < 0 || b2 < 0 || a3 % 3 != 0 || b2 % 2 != 0 {
        return Err(format!(
            "no nonnegative J_3/J_2 mix for {rows} rows and {ones} ones \
             (J_3 count {a3}/3, J_2 count {b2}/2)"
        ));
    }
    Ok(((a3 / 3) as usize, (b2 / 2) as usize))
}

fn mid_window(spec: &FamilySpec, residue: usize, even: bool) -> Result<()> {
    let (n, s) = (spec.n, spec.sigma);
    if s < 2 * n + 1 || s > 3 * n {
        return Err(invalid(
            spec,
            format!("sigma outside [2n+1, 3n] = [{}, {}]", 2 * n + 1, 3 * n),
        ));
    }
    if (s - 2 * n) % 3 != residue {
        return Err(invalid(
            spec,
            format!(
                "needs sigma - 2n = {residue} (mod 3), got {}",
                (s - 2 * n) % 3
            ),
        ));
    }
    let parity_even = (3 * n - s) % 2 == 0;
    if parity_even != even {
        return Err(invalid(
            spec,
            format!("needs 3n - sigma {}", if even { "even" } else { "odd" }),
        ));
    }
    Ok(())
}

fn sparse_window(spec: &FamilySpec, odd: bool) -> Result<(usize, usize)> {
    let (n, s) = (spec.n, spec.sigma);
    if s < n || s > 2 * n {
        return Err(invalid(
            spec,
            format!("sigma outside [n, 2n] = [{n}, {}]", 2 * n),
        ));
    }
    if ((s - n) % 2 == 1) != odd {
        return Err(invalid(
            spec,
            format!("needs sigma - n {}", if odd { "odd" } else { "even" }),
        ));
    }
    let c = (s - n) / 2;
    Ok((c, n - 2 * c))
}

/// Leading blocks then the forced `J_3`/`J_2` mix, then trailing blocks.
fn lead_mix_tail(
    spec: &FamilySpec,
    lead: Vec<Block>,
    tail: Vec<Block>,
    extra_ones: usize,
) -> Result<Vec<Block>> {
    let fixed_rows: usize = lead.iter().chain(&tail).map(Block::order).sum();
    let fixed_ones: usize = lead.iter().chain(&tail).map(Block::ones).sum::<usize>() + extra_ones;
    let rows = spec.n as isize - fixed_rows as isize;
    let ones = spec.sigma as isize - fixed_ones as isize;
    let (a, b) = three_two_mix(rows, ones).map_err(|e| invalid(spec, e))?;
    let mut blocks = lead;
    blocks.extend(std::iter::repeat_n(Block::Ones(3), a));
    blocks.extend(std::iter::repeat_n(Block::Ones(2), b));
    blocks.extend(tail);
    Ok(blocks)
}

fn plan(spec: &FamilySpec) -> Result<Plan> {
    use FamilyId::*;
    let (n, s) = (spec.n, spec.sigma);
    if n == 0 || n > 64 {
        return Err(Error::OrderOutOfRange(n));
    }
    if s > n * n {
        return Err(invalid(spec, "sigma exceeds n^2"));
    }
    if spec.flip.is_some() && !spec.id.is_flip_family() {
        return Err(invalid(
            spec,
            "a flip position only applies to the * families",
        ));
    }
    if spec.k_block.is_some() && spec.id != K {
        return Err(invalid(spec, "a block size only applies to K"));
    }
    let plain = |blocks| {
        Ok(Plan {
            blocks,
            flip: false,
        })
    };
    match spec.id {
        K => {
            let k = match spec.k_block {
                Some(k) => k,
                None => balanced_block_size(n, s)
                    .ok_or_else(|| invalid(spec, "no block size k satisfies both congruences"))?,
            };
            let problems = crate::formulas::balanced_violations(n, s, k);
            if !problems.is_empty() {
                return Err(invalid(spec, problems.join("; ")));
            }
            let big = (s - k * n) / (k + 1);
            let small = ((k + 1) * n - s) / k;
            let mut blocks: Vec<Block> = std::iter::repeat_n(Block::Ones(k + 1), big).collect();
            blocks.extend(std::iter::repeat_n(Block::Ones(k), small));
            plain(blocks)
        }
        F => {
            mid_window(spec, 0, true)?;
            plain(lead_mix_tail(spec, vec![], vec![], 0)?)
        }
        FStar => {
            mid_window(spec, 0, false)?;
            Ok(Plan {
                blocks: lead_mix_tail(spec, vec![], vec![Block::Identity(1)], 1)?,
                flip: true,
            })
        }
        U => {
            mid_window(spec, 0, false)?;
            plain(lead_mix_tail(spec, vec![Block::Derangement(3)], vec![], 0)?)
        }
        V => {
            mid_window(spec, 0, false)?;
            plain(lead_mix_tail(
                spec,
                vec![Block::Explicit(CORNER3), Block::Identity(2)],
                vec![],
                0,
            )?)
        }
        W | X | Y => {
            mid_window(spec, 0, false)?;
            let lead = match spec.id {
                W => W_LEAD,
                X => X_LEAD,
                _ => Y_LEAD,
            };
            plain(lead_mix_tail(spec, vec![Block::Explicit(lead)], vec![], 0)?)
        }
        R => {
            mid_window(spec, 1, true)?;
            plain(lead_mix_tail(spec, vec![Block::Derangement(4)], vec![], 0)?)
        }
        S => {
            mid_window(spec, 1, true)?;
            plain(lead_mix_tail(
                spec,
                vec![Block::Ones(3), Block::Identity(2)],
                vec![],
                0,
            )?)
        }
        T => {
            mid_window(spec, 1, false)?;
            plain(lead_mix_tail(
                spec,
                vec![Block::Explicit(CORNER3), Block::Identity(1)],
                vec![],
                0,
            )?)
        }
        Q => {
            mid_window(spec, 1, false)?;
            plain(lead_mix_tail(
                spec,
                vec![Block::Explicit(CORNER4), Block::Ones(2)],
                vec![],
                0,
            )?)
        }
        PStar => {
            mid_window(spec, 1, false)?;
            // base J_3 ⊕ ... ⊕ J_2 ⊕ J_2 with at least one J_2
            Ok(Plan {
                blocks: lead_mix_tail(spec, vec![], vec![Block::Ones(2)], 1)?,
                flip: true,
            })
        }
        M => {
            mid_window(spec, 2, true)?;
            plain(lead_mix_tail(
                spec,
                vec![Block::Ones(3), Block::Identity(1)],
                vec![],
                0,
            )?)
        }
        N => {
            mid_window(spec, 2, false)?;
            plain(lead_mix_tail(
                spec,
                vec![Block::Explicit(CORNER3)],
                vec![],
                0,
            )?)
        }
        SparseF => {
            let (c, e) = sparse_window(spec, false)?;
            let mut blocks: Vec<Block> = std::iter::repeat_n(Block::Ones(2), c).collect();
            if e > 0 {
                blocks.push(Block::Identity(e));
            }
            plain(blocks)
        }
        SparseFStar => {
            let (c, e) = sparse_window(spec, true)?;
            if n < 2 {
                return Err(invalid(spec, "no zero to flip"));
            }
            let mut blocks: Vec<Block> = std::iter::repeat_n(Block::Ones(2), c).collect();
            if e > 0 {
                blocks.push(Block::Identity(e));
            }
            Ok(Plan { blocks, flip: true })
        }
        SparseU => {
            let (c, e) = sparse_window(spec, true)?;
            if c < 1 {
                return Err(invalid(spec, "needs sigma - n >= 3"));
            }
            let mut blocks = vec![Block::Derangement(3)];
            blocks.extend(std::iter::repeat_n(Block::Ones(2), c - 1));
            if e > 1 {
                blocks.push(Block::Identity(e - 1));
            }
            plain(blocks)
        }
        SparseV => {
            let (c, e) = sparse_window(spec, true)?;
            if c < 2 {
                return Err(invalid(spec, "needs sigma - n >= 5"));
            }
            let mut blocks = vec![Block::Explicit(CORNER3)];
            blocks.extend(std::iter::repeat_n(Block::Ones(2), c - 2));
            blocks.push(Block::Identity(e + 1));
            plain(blocks)
        }
        Reg2Even | Reg2Odd | Reg3 | RegCoSmall | RegCoSplit => plain(regular_blocks(spec)?),
    }
}

fn regular_blocks(spec: &FamilySpec) -> Result<Vec<Block>> {
    use FamilyId::*;
    let n = spec.n;
    let degree = spec.id.regular_degree(n).unwrap_or(0);
    match spec.id {
        Reg2Even if !n.is_multiple_of(2) || n < 2 => return Err(invalid(spec, "needs n even")),
        Reg2Odd if n % 2 != 1 || n < 3 => return Err(invalid(spec, "needs n odd and n >= 3")),
        Reg3 if n % 3 != 1 || n < 4 => return Err(invalid(spec, "needs n = 1 (mod 3) and n >= 4")),
        RegCoSmall if !(3..=4).contains(&n) => return Err(invalid(spec, "needs n in {3, 4}")),
        RegCoSplit if n % 2 != 1 || n < 5 => return Err(invalid(spec, "needs n = 2t + 1 >= 5")),
        _ => {}
    }
    if spec.sigma != n * degree {
        return Err(invalid(
            spec,
            format!("sigma must equal n * degree = {}", n * degree),
        ));
    }
    Ok(match spec.id {
        Reg2Even => std::iter::repeat_n(Block::Ones(2), n / 2).collect(),
        Reg2Odd => {
            let mut b = vec![Block::Derangement(3)];
            b.extend(std::iter::repeat_n(Block::Ones(2), (n - 3) / 2));
            b
        }
        Reg3 => {
            let mut b = vec![Block::Derangement(4)];
            b.extend(std::iter::repeat_n(Block::Ones(3), (n - 4) / 3));
            b
        }
        // complements are assembled in build_regular_family
        _ => Vec::new(),
    })
}

/// `I_k + C_k` as a (0,1)-matrix (for `k = 2` this is `J_2`).
fn identity_plus_cycle(k: usize) -> Result<BinMatrix> {
    let i = BinMatrix::identity(k)?;
    let c = BinMatrix::cycle(k)?;
    let rows = i.rows().iter().zip(c.rows()).map(|(a, b)| a | b).collect();
    BinMatrix::from_rows(k, rows)
}

fn apply_flip(spec: &FamilySpec, base: BinMatrix) -> Result<BinMatrix> {
    let n = base.order();
    let (i, j) = match spec.flip {
        Some((i, j)) => {
            if i >= n || j >= n {
                return Err(invalid(spec, format!("flip ({i}, {j}) out of range")));
            }
            if base.get(i, j) {
                return Err(invalid(
                    spec,
                    format!("flip ({i}, {j}) is not a zero of the base matrix"),
                ));
            }
            (i, j)
        }
        None => first_zero(&base).ok_or_else(|| invalid(spec, "base matrix has no zero"))?,
    };
    base.flip(i, j)
}

fn first_zero(m: &BinMatrix) -> Option<(usize, usize)> {
    let n = m.order();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !m.get(i, j))
}

/// The base matrix of a `*` family before its flip.
pub fn flip_base(spec: &FamilySpec) -> Result<BinMatrix> {
    if !spec.id.is_flip_family() {
        return Err(invalid(spec, "not a * family"));
    }
    let p = plan(spec)?;
    let blocks: Vec<BinMatrix> = p.blocks.iter().map(Block::build).collect::<Result<_>>()?;
    BinMatrix::direct_sum_all(&blocks)
}

/// All zeros of the base matrix of a `*` family, row-major.
pub fn admissible_flips(spec: &FamilySpec) -> Result<Vec<(usize, usize)>> {
    let base = flip_base(spec)?;
    let n = base.order();
    Ok((0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !base.get(i, j))
        .collect())
}

/// Builds a member of any family.
pub fn build_family(spec: &FamilySpec) -> Result<BinMatrix> {
    if spec.id.is_regular() {
        return build_regular_family(spec);
    }
    let p = plan(spec)?;
    let blocks: Vec<BinMatrix> = p.blocks.iter().map(Block::build).collect::<Result<_>>()?;
    let mut m = BinMatrix::direct_sum_all(&blocks)?;
    if p.flip {
        m = apply_flip(spec, m)?;
    }
    debug_assert_eq!(m.order(), spec.n);
    debug_assert_eq!(m.ones_count(), spec.sigma);
    Ok(m)
}

/// Builds a member of a regular family; every row and column sum equals
/// the family's degree.
pub fn build_regular_family(spec: &FamilySpec) -> Result<BinMatrix> {
    if !spec.id.is_regular() {
        return Err(invalid(spec, "not a regular family"));
    }
    let blocks = regular_blocks(spec)?;
    let n = spec.n;
    let m = match spec.id {
        FamilyId::RegCoSmall => identity_plus_cycle(n)?.complement(),
        FamilyId::RegCoSplit => {
            let t = (n - 1) / 2;
            identity_plus_cycle(t)?
                .direct_sum(&identity_plus_cycle(t + 1)?)?
                .complement()
        }
        _ => {
            let built: Vec<BinMatrix> = blocks.iter().map(Block::build).collect::<Result<_>>()?;
            BinMatrix::direct_sum_all(&built)?
        }
    };
    Ok(m)
}

/// Families the governing closed form names at `(n, tau)`.
///
/// Inside `2n+1 <= sigma <= 3n` these are the mid-density families. Outside
/// it, the sparse families (for `n <= sigma <= 2n`) and `K` (when some block
/// size satisfies both congruences). Empty when nothing applies.
pub fn list_valid_families(n: usize, tau: usize) -> Vec<FamilySpec> {
    if n == 0 || n > 64 || tau > n * n {
        return Vec::new();
    }
    let sigma = n * n - tau;
    let ids: Vec<FamilyId> = if sigma > 2 * n && sigma <= 3 * n {
        FamilyId::MID.to_vec()
    } else {
        let mut v = FamilyId::SPARSE.to_vec();
        v.push(FamilyId::K);
        v
    };
    ids.into_iter()
        .map(|id| FamilySpec::new(id, n, sigma))
        .filter(FamilySpec::is_valid)
        .collect()
}
