//! GF(2) strings, matrices, and linear-code machinery.
//!
//! Everything in this module is exact: bit strings are word-packed, matrix
//! products reduce to XOR/popcount, and the brute-force operations (row-space
//! enumeration, coset enumeration, minimal weight, coset-leader decode tables)
//! are capped at sizes where exhaustive sweeps finish in seconds.
//!
//! Positions are 1-indexed in all public documentation and serialized output,
//! matching the usual {1..N} labelling of photon slots; internally bit `i`
//! of a [`BitVec`] is addressed as `get(i)` with `i` in `0..len`, i.e. the
//! 0-indexed twin of position `i+1`.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Enumeration cap for operations that sweep all 2^n strings of length n.
pub const MAX_ENUM_BITS: usize = 22;
/// Cap on row counts for operations that sweep all 2^rows combinations.
pub const MAX_ENUM_ROWS: usize = 22;

/// Errors from GF(2) operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Decode failures, reported distinctly so callers can tell an overloaded
/// code from a genuinely ambiguous correction.
#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum DecodeFailure {
    /// The nearest candidate is farther than the allowed correction cap.
    #[error("too many errors: nearest candidate at distance {distance} exceeds cap {cap}")]
    TooManyErrors { distance: usize, cap: usize },
    /// Two or more candidates are tied at the minimal distance.
    #[error("ambiguous decode: multiple nearest candidates at distance {distance}")]
    Ambiguous { distance: usize },
    /// No string at all has the requested syndrome (dependent checks).
    #[error("unattainable syndrome")]
    Unattainable,
}

// ---------------------------------------------------------------------------
// BitVec
// ---------------------------------------------------------------------------

/// A binary string over GF(2), word-packed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    /// The all-zero string of length `n`.
    pub fn zeros(n: usize) -> Self {
        BitVec {
            len: n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    /// Builds a string from booleans, index 0 first.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a '0'/'1' string, leftmost character = bit 0 (position 1).
    pub fn parse(s: &str) -> Result<Self, Gf2Error> {
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => {
                    return Err(Gf2Error::InvalidInput(format!(
                        "bit string may contain only '0'/'1', found {c:?}"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Builds a length-`n` string from the low `n` bits of `x`
    /// (bit 0 of `x` becomes bit 0 of the string).
    pub fn from_u64_lsb(x: u64, n: usize) -> Self {
        assert!(n <= 64);
        let mut v = BitVec::zeros(n);
        if n > 0 {
            let mask = if n == 64 { !0 } else { (1u64 << n) - 1 };
            if !v.words.is_empty() {
                v.words[0] = x & mask;
            }
        }
        v
    }

    /// The inverse of [`BitVec::from_u64_lsb`]; requires `len <= 64`.
    pub fn to_u64_lsb(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    /// Length of the string.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when the length is zero.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 0-indexed position `i`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Sets bit at 0-indexed position `i`.
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Hamming weight #(x).
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True when every bit is zero.
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Bitwise sum x ⊕ y.
    pub fn xor(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "xor length mismatch");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        BitVec {
            len: self.len,
            words,
        }
    }

    /// In-place x ⊕= y.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product x·y over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    /// Hamming distance, i.e. weight(x ⊕ y).
    pub fn hamming_distance(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "distance length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Restriction x[E]: the sub-string on the listed 0-indexed positions,
    /// in the given order. Callers keep the position list to preserve the
    /// original labels.
    pub fn restrict(&self, positions: &[usize]) -> BitVec {
        let mut v = BitVec::zeros(positions.len());
        for (j, &i) in positions.iter().enumerate() {
            v.set(j, self.get(i));
        }
        v
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
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

// ---------------------------------------------------------------------------
// BitMatrix
// ---------------------------------------------------------------------------

/// A matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    /// Matrix with no rows and `cols` columns (useful as an "empty F").
    pub fn empty(cols: usize) -> Self {
        BitMatrix { cols, rows: vec![] }
    }

    /// Builds a matrix from rows; all rows must share a length.
    pub fn from_rows(rows: Vec<BitVec>) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, BitVec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch(
                "matrix rows have unequal lengths".into(),
            ));
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Parses rows given as '0'/'1' strings.
    pub fn parse_rows(rows: &[&str]) -> Result<Self, Gf2Error> {
        let rows = rows
            .iter()
            .map(|s| BitVec::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        BitMatrix::from_rows(rows)
    }

    /// The n×n identity.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = BitVec::zeros(n);
                r.set(i, true);
                r
            })
            .collect();
        BitMatrix { cols: n, rows }
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    /// Row count r.
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Column count n.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at (row `i`, column `j`), 0-indexed.
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    /// Sets entry (row `i`, column `j`).
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    /// Borrow of row `i`.
    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            cols: self.cols,
            rows,
        })
    }

    /// Horizontal concatenation [self | other] (same row count).
    pub fn hconcat(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows() != other.rows() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "cannot concatenate {} rows with {} rows",
                other.rows(),
                self.rows()
            )));
        }
        let cols = self.cols + other.cols;
        let rows = (0..self.rows())
            .map(|i| {
                let mut r = BitVec::zeros(cols);
                for j in 0..self.cols {
                    r.set(j, self.get(i, j));
                }
                for j in 0..other.cols {
                    r.set(self.cols + j, other.get(i, j));
                }
                r
            })
            .collect();
        Ok(BitMatrix { cols, rows })
    }

    /// Transpose M^T.
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for i in 0..self.rows() {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Matrix-vector product M·x: entry i is the GF(2) inner product of row i
    /// with x.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if self.cols != x.len() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "M has {} columns but x has length {}",
                self.cols,
                x.len()
            )));
        }
        let mut out = BitVec::zeros(self.rows());
        for (i, row) in self.rows.iter().enumerate() {
            out.set(i, row.dot(x));
        }
        Ok(out)
    }

    /// Row-side product x·M: the XOR of the rows selected by x.
    pub fn vec_mul(&self, x: &BitVec) -> Result<BitVec, Gf2Error> {
        if self.rows() != x.len() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "M has {} rows but x has length {}",
                self.rows(),
                x.len()
            )));
        }
        let mut out = BitVec::zeros(self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            if x.get(i) {
                out.xor_assign(row);
            }
        }
        Ok(out)
    }

    /// Matrix product G·H.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols,
                other.rows(),
                other.cols
            )));
        }
        let ot = other.transpose();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = BitVec::zeros(other.cols);
                for (j, col) in ot.rows.iter().enumerate() {
                    out.set(j, r.dot(col));
                }
                out
            })
            .collect();
        Ok(BitMatrix {
            cols: other.cols,
            rows,
        })
    }

    /// Rank over GF(2) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BitVec> = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if let Some(pivot) = (rank..rows.len()).find(|&i| rows[i].get(col)) {
                rows.swap(rank, pivot);
                let pivot_row = rows[rank].clone();
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != rank && row.get(col) {
                        row.xor_assign(&pivot_row);
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    /// Serializes as text: first line `r n`, then `r` lines of '0'/'1'.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows(), self.cols);
        for row in &self.rows {
            s.push_str(&row.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the [`BitMatrix::to_text`] format.
    pub fn from_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::InvalidInput("empty matrix text".into()))?;
        let mut parts = header.split_whitespace();
        let r: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Gf2Error::InvalidInput("bad matrix header".into()))?;
        let n: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Gf2Error::InvalidInput("bad matrix header".into()))?;
        let mut rows = Vec::with_capacity(r);
        for _ in 0..r {
            let line = lines
                .next()
                .ok_or_else(|| Gf2Error::InvalidInput("truncated matrix text".into()))?;
            let row = BitVec::parse(line.trim())?;
            if row.len() != n {
                return Err(Gf2Error::InvalidInput(format!(
                    "row length {} does not match header width {n}",
                    row.len()
                )));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Ok(BitMatrix::empty(n));
        }
        BitMatrix::from_rows(rows)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{})", self.rows(), self.cols)
    }
}

// ---------------------------------------------------------------------------
// Free operations
// ---------------------------------------------------------------------------

/// The product M·x. Thin named wrapper over [`BitMatrix::mul_vec`] so the
/// operation is discoverable by name; the row-side form is
/// [`BitMatrix::vec_mul`].
pub fn gf2_mul(m: &BitMatrix, x: &BitVec) -> Result<BitVec, Gf2Error> {
    m.mul_vec(x)
}

/// The row space C⊥[M]: all 2^rank linear combinations of the rows of `M`.
///
/// Enumerates all 2^rows coefficient patterns, so `rows(M)` is capped at
/// [`MAX_ENUM_ROWS`].
pub fn row_space(m: &BitMatrix) -> Result<Vec<BitVec>, Gf2Error> {
    if m.rows() > MAX_ENUM_ROWS {
        return Err(Gf2Error::CapacityExceeded(format!(
            "row_space sweeps 2^rows combinations; {} rows exceeds the cap {MAX_ENUM_ROWS}",
            m.rows()
        )));
    }
    let mut seen: HashMap<BitVec, ()> = HashMap::new();
    let mut out = Vec::new();
    for lambda in 0u64..(1u64 << m.rows()) {
        let coeffs = BitVec::from_u64_lsb(lambda, m.rows());
        let w = m.vec_mul(&coeffs)?;
        if seen.insert(w.clone(), ()).is_none() {
            out.push(w);
        }
    }
    out.sort();
    Ok(out)
}

/// The set G* = C⊥[F,K] − C⊥[F] together with its minimal weight d_W.
///
/// Returns `(d_W, members)`; `d_W = 0` with an empty member list when every
/// K-combination already lies in C⊥[F] (the key is then fully determined by
/// the syndrome — the downstream security constraint must fail, which is the
/// intended outcome of the 0 convention).
pub fn g_star(f: &BitMatrix, k: &BitMatrix) -> Result<(usize, Vec<BitVec>), Gf2Error> {
    if f.cols() != k.cols() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "F has {} columns, K has {}",
            f.cols(),
            k.cols()
        )));
    }
    let total_rows = f.rows() + k.rows();
    if total_rows > MAX_ENUM_ROWS {
        return Err(Gf2Error::CapacityExceeded(format!(
            "minimal-weight sweep needs 2^(rows F + rows K) combinations; \
             {total_rows} rows exceeds the cap {MAX_ENUM_ROWS}"
        )));
    }
    let f_space = row_space(f)?;
    let f_set: HashMap<&BitVec, ()> = f_space.iter().map(|w| (w, ())).collect();
    let mut members: HashMap<BitVec, ()> = HashMap::new();
    for lf in 0u64..(1u64 << f.rows()) {
        let base = f.vec_mul(&BitVec::from_u64_lsb(lf, f.rows()))?;
        for lk in 1u64..(1u64 << k.rows()) {
            let w = base.xor(&k.vec_mul(&BitVec::from_u64_lsb(lk, k.rows()))?);
            if !f_set.contains_key(&w) {
                members.insert(w, ());
            }
        }
    }
    let mut members: Vec<BitVec> = members.into_keys().collect();
    members.sort();
    let d_w = members.iter().map(BitVec::weight).min().unwrap_or(0);
    Ok((d_w, members))
}

/// Minimal weight d_W of G* = C⊥[F,K] − C⊥[F]; 0 when G* is empty.
pub fn minimal_weight_dw(f: &BitMatrix, k: &BitMatrix) -> Result<usize, Gf2Error> {
    g_star(f, k).map(|(d, _)| d)
}

/// The coset C[F, s] = {w : F·w = s}, by direct enumeration of all 2^n
/// strings (n capped at [`MAX_ENUM_BITS`]). Empty when `s` is unattainable.
pub fn coset_enumerate(f: &BitMatrix, s: &BitVec) -> Result<Vec<BitVec>, Gf2Error> {
    if f.cols() > MAX_ENUM_BITS {
        return Err(Gf2Error::CapacityExceeded(format!(
            "coset enumeration sweeps 2^n strings; n={} exceeds the cap {MAX_ENUM_BITS}",
            f.cols()
        )));
    }
    if s.len() != f.rows() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "syndrome length {} does not match {} check rows",
            s.len(),
            f.rows()
        )));
    }
    let n = f.cols();
    // Precompute per-position syndrome masks so each candidate costs one pass
    // of XORs instead of a full matrix product.
    let col_syndromes: Vec<u64> = (0..n)
        .map(|j| {
            let mut mask = 0u64;
            for i in 0..f.rows() {
                if f.get(i, j) {
                    mask |= 1 << i;
                }
            }
            mask
        })
        .collect();
    let target = s.to_u64_lsb();
    let mut out = Vec::new();
    for w in 0u64..(1u64 << n) {
        let mut syn = 0u64;
        let mut bits = w;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            syn ^= col_syndromes[j];
            bits &= bits - 1;
        }
        if syn == target {
            out.push(BitVec::from_u64_lsb(w, n));
        }
    }
    Ok(out)
}

/// Finds a coefficient string λ with λ·M = w, if one exists.
pub fn solve_row_combination(m: &BitMatrix, w: &BitVec) -> Result<Option<BitVec>, Gf2Error> {
    if m.cols() != w.len() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "target length {} does not match {} columns",
            w.len(),
            m.cols()
        )));
    }
    // Solve M^T · λ = w by elimination on the augmented system.
    let r = m.rows();
    let n = m.cols();
    // Each equation: XOR over selected rows must reproduce bit j of w.
    let mut aug: Vec<(BitVec, bool)> = (0..n)
        .map(|j| {
            let mut eq = BitVec::zeros(r);
            for i in 0..r {
                eq.set(i, m.get(i, j));
            }
            (eq, w.get(j))
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (eq index, variable)
    let mut used = vec![false; n];
    for var in 0..r {
        if let Some(eq_idx) = (0..n).find(|&j| !used[j] && aug[j].0.get(var)) {
            used[eq_idx] = true;
            pivots.push((eq_idx, var));
            let (pivot_eq, pivot_rhs) = aug[eq_idx].clone();
            for (j, (eq, rhs)) in aug.iter_mut().enumerate() {
                if j != eq_idx && eq.get(var) {
                    eq.xor_assign(&pivot_eq);
                    *rhs ^= pivot_rhs;
                }
            }
        }
    }
    // Inconsistent equation means no solution.
    if aug.iter().any(|(eq, rhs)| eq.is_zero() && *rhs) {
        return Ok(None);
    }
    let mut lambda = BitVec::zeros(r);
    for &(eq_idx, var) in &pivots {
        lambda.set(var, aug[eq_idx].1);
    }
    Ok(Some(lambda))
}

/// Finds one particular solution x of M·x = s, if one exists.
pub fn solve_linear(m: &BitMatrix, s: &BitVec) -> Result<Option<BitVec>, Gf2Error> {
    solve_row_combination(&m.transpose(), s)
}

/// A basis of the null space {x : M·x = 0}.
pub fn null_space(m: &BitMatrix) -> Vec<BitVec> {
    let n = m.cols();
    // Row-reduce a copy of M, tracking pivot columns.
    let mut rows: Vec<BitVec> = m
        .rows
        .iter()
        .cloned()
        .filter(|r| !r.is_zero())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) {
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
    }
    rows.truncate(rank);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..n {
        if is_pivot[free] {
            continue;
        }
        let mut x = BitVec::zeros(n);
        x.set(free, true);
        for (i, &pc) in pivot_cols.iter().enumerate() {
            if rows[i].get(free) {
                x.set(pc, true);
            }
        }
        basis.push(x);
    }
    basis
}

/// Exact sphere size |S_d| = Σ_{w ≤ d} C(n, w).
pub fn sphere_size(n: usize, d: usize) -> u128 {
    let d = d.min(n);
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(n, 0)
    for w in 0..=d {
        total = total.checked_add(binom).expect("sphere size overflows u128");
        if w < n {
            binom = binom * (n as u128 - w as u128) / (w as u128 + 1);
        }
    }
    total
}

/// The entropy-based sphere bounds `(2^{H(p)n}/sqrt(8pqn), 2^{H(p)n})` with
/// `p = d/n`, valid for `0 < d < n/2` (and trivially `(1,1)` at `d = 0`).
pub fn sphere_entropy_bounds(n: usize, d: usize) -> Result<(f64, f64), Gf2Error> {
    if n == 0 || 2 * d >= n {
        return Err(Gf2Error::InvalidInput(format!(
            "sphere bounds need 0 <= d < n/2, got n={n}, d={d}"
        )));
    }
    if d == 0 {
        return Ok((1.0, 1.0));
    }
    let p = d as f64 / n as f64;
    let q = 1.0 - p;
    let h = crate::secbounds::binary_entropy(p).expect("p in (0, 1/2)");
    let high = (h * n as f64).exp2();
    let low = high / (8.0 * p * q * n as f64).sqrt();
    Ok((low, high))
}

/// A uniformly random rows×cols matrix, deterministic in the seed.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> BitMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    random_matrix_from(rows, cols, &mut rng)
}

/// As [`random_matrix`] but drawing from a caller-supplied stream.
pub fn random_matrix_from<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.random::<bool>() {
                m.set(i, j, true);
            }
        }
    }
    m
}

// ---------------------------------------------------------------------------
// LinearCode
// ---------------------------------------------------------------------------

/// A binary linear code given by its parity-check matrix, with an on-demand
/// coset-leader decode table.
#[derive(Clone, Debug)]
pub struct LinearCode {
    parity_check: BitMatrix,
    rank: usize,
    /// syndrome (packed) → (leader pattern packed, leader weight, ambiguous)
    decode_table: Option<HashMap<u64, (u64, usize, bool)>>,
}

impl LinearCode {
    /// Wraps a parity-check matrix. The decode table is built lazily by
    /// [`LinearCode::with_decode_table`].
    pub fn new(parity_check: BitMatrix) -> Self {
        let rank = parity_check.rank();
        LinearCode {
            parity_check,
            rank,
            decode_table: None,
        }
    }

    /// Block length n.
    pub fn len(&self) -> usize {
        self.parity_check.cols()
    }

    /// True for the degenerate zero-length code.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of check rows r.
    pub fn check_rows(&self) -> usize {
        self.parity_check.rows()
    }

    /// Rank of the parity-check matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The parity-check matrix F.
    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// Syndrome F·w.
    pub fn syndrome(&self, w: &BitVec) -> Result<BitVec, Gf2Error> {
        self.parity_check.mul_vec(w)
    }

    /// All codewords {w : F·w = 0}; capped by the enumeration limit.
    pub fn codewords(&self) -> Result<Vec<BitVec>, Gf2Error> {
        coset_enumerate(&self.parity_check, &BitVec::zeros(self.check_rows()))
    }

    /// The minimum distance of the code (minimum nonzero codeword weight),
    /// or `None` for the full space {0,1}^n with no constraints.
    pub fn min_distance(&self) -> Result<Option<usize>, Gf2Error> {
        let d = self
            .codewords()?
            .iter()
            .filter(|w| !w.is_zero())
            .map(BitVec::weight)
            .min();
        Ok(d)
    }

    /// Builds the coset-leader table (syndrome → minimal-weight error
    /// pattern), enumerating error patterns in order of increasing weight.
    /// Ties at the leader's weight are flagged so decoding can report an
    /// ambiguous correction instead of guessing.
    pub fn with_decode_table(mut self) -> Result<Self, Gf2Error> {
        if self.decode_table.is_some() {
            return Ok(self);
        }
        let n = self.len();
        if n > MAX_ENUM_BITS {
            return Err(Gf2Error::CapacityExceeded(format!(
                "coset-leader table needs an error-pattern sweep; n={n} exceeds the cap {MAX_ENUM_BITS}"
            )));
        }
        let r = self.check_rows();
        if r > 63 {
            return Err(Gf2Error::CapacityExceeded(format!(
                "syndromes wider than 63 bits are unsupported (got {r})"
            )));
        }
        let col_syndromes: Vec<u64> = (0..n)
            .map(|j| {
                let mut mask = 0u64;
                for i in 0..r {
                    if self.parity_check.get(i, j) {
                        mask |= 1 << i;
                    }
                }
                mask
            })
            .collect();
        let syn_of = |pattern: u64| -> u64 {
            let mut syn = 0u64;
            let mut bits = pattern;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                syn ^= col_syndromes[j];
                bits &= bits - 1;
            }
            syn
        };
        let num_syndromes = 1usize << self.rank;
        let mut table: HashMap<u64, (u64, usize, bool)> = HashMap::with_capacity(num_syndromes);
        for weight in 0..=n {
            if table.len() == num_syndromes {
                break;
            }
            // Gosper's hack over all patterns of the given weight.
            if weight == 0 {
                table.insert(0, (0, 0, false));
                continue;
            }
            let mut pattern: u64 = (1u64 << weight) - 1;
            let limit: u64 = 1u64 << n;
            while pattern < limit {
                let syn = syn_of(pattern);
                match table.get_mut(&syn) {
                    None => {
                        table.insert(syn, (pattern, weight, false));
                    }
                    Some(entry) => {
                        if entry.1 == weight {
                            entry.2 = true; // tie at the leader's weight
                        }
                    }
                }
                // Next pattern with the same popcount.
                let c = pattern & pattern.wrapping_neg();
                let r2 = pattern + c;
                if r2 >= limit || c == 0 {
                    break;
                }
                pattern = (((r2 ^ pattern) >> 2) / c) | r2;
            }
        }
        self.decode_table = Some(table);
        Ok(self)
    }

    /// Nearest-coset-member decode: returns the member of C[F, target] closest
    /// to `w` in Hamming distance (the codeword itself when `target` is the
    /// zero syndrome). Guaranteed correct when the true error weight is
    /// ≤ `d_cap` and `d_cap` is at most the code's correction radius.
    ///
    /// Fails with [`DecodeFailure::TooManyErrors`] when the nearest candidate
    /// is farther than `d_cap`, and with [`DecodeFailure::Ambiguous`] when two
    /// candidates tie at the minimal distance.
    pub fn decode_toward(
        &self,
        w: &BitVec,
        target: &BitVec,
        d_cap: usize,
    ) -> Result<Result<BitVec, DecodeFailure>, Gf2Error> {
        let table = self.decode_table.as_ref().ok_or_else(|| {
            Gf2Error::InvalidInput("decode table not built; call with_decode_table() first".into())
        })?;
        if w.len() != self.len() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "received word length {} does not match block length {}",
                w.len(),
                self.len()
            )));
        }
        if target.len() != self.check_rows() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "target syndrome length {} does not match {} check rows",
                target.len(),
                self.check_rows()
            )));
        }
        let syn = self.syndrome(w)?.to_u64_lsb() ^ target.to_u64_lsb();
        let Some(&(leader, weight, ambiguous)) = table.get(&syn) else {
            return Ok(Err(DecodeFailure::Unattainable));
        };
        if weight > d_cap {
            return Ok(Err(DecodeFailure::TooManyErrors {
                distance: weight,
                cap: d_cap,
            }));
        }
        if ambiguous {
            return Ok(Err(DecodeFailure::Ambiguous { distance: weight }));
        }
        Ok(Ok(w.xor(&BitVec::from_u64_lsb(leader, self.len()))))
    }

    /// Nearest-codeword decode (zero target syndrome).
    pub fn decode(
        &self,
        w: &BitVec,
        d_cap: usize,
    ) -> Result<Result<BitVec, DecodeFailure>, Gf2Error> {
        let zero = BitVec::zeros(self.check_rows());
        self.decode_toward(w, &zero, d_cap)
    }

    /// The correction radius guaranteed by the minimum distance:
    /// ⌊(d_min − 1)/2⌋ (0 for degenerate codes with no nonzero codeword).
    pub fn correction_radius(&self) -> Result<usize, Gf2Error> {
        match self.min_distance()? {
            Some(d) => Ok((d - 1) / 2),
            None => Ok(0),
        }
    }
}

/// Syndrome decoding as a free operation mirroring the nearest-codeword form.
pub fn syndrome_decode(
    code: &LinearCode,
    w: &BitVec,
    d_cap: usize,
) -> Result<Result<BitVec, DecodeFailure>, Gf2Error> {
    code.decode(w, d_cap)
}

/// Builds the systematic code with parity check F = [F̃ | I_r] from the
/// r × (n−r) block F̃. Messages occupy the first n−r positions; encoding
/// appends the parities F̃·x.
pub fn systematic_code(ftilde: &BitMatrix) -> Result<LinearCode, Gf2Error> {
    let r = ftilde.rows();
    let f = ftilde.hconcat(&BitMatrix::identity(r))?;
    Ok(LinearCode::new(f))
}

/// Systematic encode: message x ↦ (x, F̃·x).
pub fn systematic_encode(ftilde: &BitMatrix, x: &BitVec) -> Result<BitVec, Gf2Error> {
    if ftilde.cols() != x.len() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "message length {} does not match {} message columns",
            x.len(),
            ftilde.cols()
        )));
    }
    let parity = ftilde.mul_vec(x)?;
    let n = x.len() + parity.len();
    let mut out = BitVec::zeros(n);
    for i in 0..x.len() {
        out.set(i, x.get(i));
    }
    for i in 0..parity.len() {
        out.set(x.len() + i, parity.get(i));
    }
    Ok(out)
}

/// Parity-check matrix of the length-`n` repetition code (adjacent-pair
/// checks; n−1 rows).
pub fn repetition_code(n: usize) -> LinearCode {
    assert!(n >= 1);
    let rows = (0..n.saturating_sub(1))
        .map(|i| {
            let mut r = BitVec::zeros(n);
            r.set(i, true);
            r.set(i + 1, true);
            r
        })
        .collect();
    LinearCode::new(BitMatrix { cols: n, rows })
}

/// Parity-check matrix of the Hamming(7,4) code (columns are 1..7 in binary).
pub fn hamming74_code() -> LinearCode {
    let n = 7;
    let r = 3;
    let mut m = BitMatrix::zeros(r, n);
    for j in 0..n {
        let col = j + 1;
        for i in 0..r {
            if col & (1 << i) != 0 {
                m.set(i, j, true);
            }
        }
    }
    LinearCode::new(m)
}
