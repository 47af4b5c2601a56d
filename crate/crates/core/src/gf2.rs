//! Linear algebra over GF(2).
//!
//! [`BitVec`] is a packed bit vector (index 0 is the least significant bit)
//! and [`BitMatrix`] a list of equal-width rows. Elimination works on whole
//! 64-bit words; a 512 x 512 system reduces in well under a millisecond.
//!
//! The text form of a [`BitVec`] is a binary string written most significant
//! bit first, so `"101"` has bits 0 and 2 set and `"001"` is the unit vector
//! at index 0.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid bit string {0:?}: only '0' and '1' are allowed")]
    Parse(String),
}

/// Packed vector over GF(2). Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// The unit vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Builds a vector from bits listed in index order; any nonzero entry is a 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// The low `len` bits of `value`, bit i of `value` at index i. `len <= 64`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    /// Inverse of [`BitVec::from_u64`]; `None` if the vector is wider than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=WORD => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = rng.gen();
        }
        v.clear_tail();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn lowest_set_bit(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    /// Bits in index order.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD + tz)
            })
        })
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> Result<bool, Gf2Error> {
        self.check_len(other)?;
        let parity = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
        Ok(parity & 1 == 1)
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec, Gf2Error> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitVec) -> Result<(), Gf2Error> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Reads `count <= 64` bits starting at `offset` as an integer (bit `offset` lowest).
    pub fn get_bits(&self, offset: usize, count: usize) -> u64 {
        assert!(count <= WORD && offset + count <= self.len);
        if count == 0 {
            return 0;
        }
        let (k, sh) = (offset / WORD, offset % WORD);
        let mut v = self.words[k] >> sh;
        if sh + count > WORD {
            v |= self.words[k + 1] << (WORD - sh);
        }
        v & low_mask(count)
    }

    /// Writes the low `count <= 64` bits of `value` starting at `offset`.
    pub fn set_bits(&mut self, offset: usize, count: usize, value: u64) {
        assert!(count <= WORD && offset + count <= self.len);
        if count == 0 {
            return;
        }
        let value = value & low_mask(count);
        let (k, sh) = (offset / WORD, offset % WORD);
        let lo_mask = low_mask(count.min(WORD - sh)) << sh;
        self.words[k] = (self.words[k] & !lo_mask) | ((value << sh) & lo_mask);
        if sh + count > WORD {
            let spill = sh + count - WORD;
            let hi_mask = low_mask(spill);
            self.words[k + 1] = (self.words[k + 1] & !hi_mask) | (value >> (WORD - sh));
        }
    }

    /// Copy of bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len);
        let mut out = BitVec::zeros(end - start);
        let mut pos = 0;
        while pos < out.len {
            let take = (out.len - pos).min(WORD);
            out.set_bits(pos, take, self.get_bits(start + pos, take));
            pos += take;
        }
        out
    }

    /// Appends all bits of `other`.
    pub fn extend_from(&mut self, other: &BitVec) {
        let start = self.len;
        self.len += other.len;
        self.words.resize(words_for(self.len), 0);
        let mut pos = 0;
        while pos < other.len {
            let take = (other.len - pos).min(WORD);
            self.set_bits(start + pos, take, other.get_bits(pos, take));
            pos += take;
        }
    }

    /// Splits off bits `at..`, leaving `0..at` in place.
    pub fn split_off(&mut self, at: usize) -> BitVec {
        let tail = self.slice(at, self.len);
        self.len = at;
        self.words.truncate(words_for(at));
        self.clear_tail();
        tail
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub(crate) fn clear_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(r);
            }
        }
    }

    fn check_len(&self, other: &BitVec) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn low_mask(count: usize) -> u64 {
    if count >= WORD {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.len();
        let mut v = BitVec::zeros(n);
        for (k, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => v.set(n - 1 - k, true),
                _ => return Err(Gf2Error::Parse(s.to_owned())),
            }
        }
        Ok(v)
    }
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rows of equal width over GF(2).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BitMatrix {
    width: usize,
    rows: Vec<BitVec>,
}

/// Reduced row echelon form: `rows[i]` has its leading one in column `pivots[i]`,
/// and that column is zero in every other row.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<BitVec>,
    pub pivots: Vec<usize>,
    pub width: usize,
}

impl BitMatrix {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(width: usize, rows: Vec<BitVec>) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != width) {
            return Err(Gf2Error::LengthMismatch {
                expected: width,
                found: bad.len(),
            });
        }
        Ok(Self { width, rows })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            width: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn push(&mut self, row: BitVec) -> Result<(), Gf2Error> {
        if row.len() != self.width {
            return Err(Gf2Error::LengthMismatch {
                expected: self.width,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    /// `self · v`: bit i is the inner product of row i with `v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, Gf2Error> {
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Reduces a copy of the rows; `self` is untouched.
    ///
    /// Columns are scanned left to right and each pivot is taken from the
    /// lowest-indexed remaining row with a one in that column.
    pub fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.width {
            if rank == rows.len() {
                break;
            }
            let (word, bit) = (col / WORD, 1u64 << (col % WORD));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].words[word] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank);
            let (pivot, tail) = tail.split_first_mut().expect("pivot row");
            for r in head.iter_mut().chain(tail.iter_mut()) {
                if r.words[word] & bit != 0 {
                    // Columns left of `col` are already clear in the pivot row.
                    for k in word..r.words.len() {
                        r.words[k] ^= pivot.words[k];
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        Echelon {
            rows,
            pivots,
            width: self.width,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// A basis of `{v : self · v = 0}`, one vector per free column.
    pub fn nullspace_basis(&self) -> BitMatrix {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.width];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut out = BitMatrix::new(self.width);
        for free in (0..self.width).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.width, free);
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            out.rows.push(v);
        }
        out
    }
}

/// Canonical basis of `{v : v · s = 0}`.
///
/// With `j` the lowest set bit of `s`, the basis is `e_i ^ (s_i · e_j)` for
/// every `i != j`, in increasing `i`. For `s = 0` it is the standard basis.
pub fn orthogonal_complement_basis(s: &BitVec) -> BitMatrix {
    let n = s.len();
    let Some(j) = s.lowest_set_bit() else {
        return BitMatrix::identity(n);
    };
    let rows = (0..n)
        .filter(|&i| i != j)
        .map(|i| {
            let mut v = BitVec::unit(n, i);
            if s.get(i) {
                v.set(j, true);
            }
            v
        })
        .collect();
    BitMatrix { width: n, rows }
}

/// Outcome of solving the Simon system `ys · s = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SecretSolution {
    /// Rank `n - 1`: exactly one nonzero solution.
    Unique(BitVec),
    /// Rank `n`: only `s = 0` solves the system.
    OnlyTrivial,
    /// Rank below `n - 1`; more rows are needed.
    Underdetermined { rank: usize },
}

pub fn solve_secret(ys: &BitMatrix) -> SecretSolution {
    let n = ys.width();
    let null = ys.nullspace_basis();
    match null.num_rows() {
        0 => SecretSolution::OnlyTrivial,
        1 => SecretSolution::Unique(null.rows[0].clone()),
        d => SecretSolution::Underdetermined { rank: n - d },
    }
}

/// Incrementally maintained row space, for streaming rank checks.
#[derive(Clone, Debug)]
pub struct XorBasis {
    width: usize,
    // Indexed by pivot = lowest set bit of the stored vector.
    by_pivot: Vec<Option<BitVec>>,
    rank: usize,
}

impl XorBasis {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            by_pivot: vec![None; width],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Adds `v` to the span. Returns `true` if the rank grew.
    pub fn insert(&mut self, v: &BitVec) -> Result<bool, Gf2Error> {
        if v.len() != self.width {
            return Err(Gf2Error::LengthMismatch {
                expected: self.width,
                found: v.len(),
            });
        }
        let mut v = v.clone();
        while let Some(p) = v.lowest_set_bit() {
            match &self.by_pivot[p] {
                Some(b) => v.xor_assign(b)?,
                None => {
                    self.by_pivot[p] = Some(v);
                    self.rank += 1;
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}
