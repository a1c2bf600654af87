//! Dense bit-packed GF(2) matrices and vectors.
//!
//! Row-major storage, one `u64` word per 64 columns. Everything here is
//! immutable after construction from the caller's point of view; mutating
//! helpers exist for building values up front.

use crate::{Error, Result};
use std::fmt;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// A GF(2) column/row vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BitVector length must be >= 1");
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Build from 0/1 entries.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1);
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Unit vector e_i of the given length.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = BitVector::zeros(len);
        v.set(i, true);
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Copy of entries `[start, start+len)` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len);
        let mut out = BitVector::zeros(len);
        if start & 63 == 0 {
            let nw = words_for(len);
            let sw = start >> 6;
            out.words[..nw].copy_from_slice(&self.words[sw..sw + nw]);
            // mask tail bits beyond len
            let tail = len & 63;
            if tail != 0 {
                out.words[nw - 1] &= (1u64 << tail) - 1;
            }
        } else {
            for i in 0..len {
                if self.get(start + i) {
                    out.set(i, true);
                }
            }
        }
        out
    }

    /// New vector of length `total` with `self` written at `offset`, zeros
    /// elsewhere.
    pub fn embedded(&self, total: usize, offset: usize) -> BitVector {
        assert!(offset + self.len <= total);
        let mut out = BitVector::zeros(total);
        for i in 0..self.len {
            if self.get(i) {
                out.set(offset + i, true);
            }
        }
        out
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.iter_bits().map(|b| b as u8).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A dense GF(2) matrix, row-major and bit-packed.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dims must be >= 1");
        let wpr = words_for(cols);
        BitMatrix {
            rows,
            cols,
            words_per_row: wpr,
            words: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// The 2x2 polarization kernel [[1,0],[1,1]].
    pub fn g2() -> Self {
        BitMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap()
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b > 1 {
                    return Err(Error::Parse(format!("entry {} is not a bit", b)));
                }
                if b == 1 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Parse a text matrix: one row per line, entries `0`/`1`, spaces allowed.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for ch in line.chars() {
                match ch {
                    '0' => row.push(0),
                    '1' => row.push(1),
                    ' ' | '\t' | ',' => {}
                    other => {
                        return Err(Error::Parse(format!("unexpected character '{}'", other)))
                    }
                }
            }
            if !row.is_empty() {
                rows.push(row);
            }
        }
        BitMatrix::from_rows(&rows)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.words[r * self.words_per_row + (c >> 6)] >> (c & 63)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.words_per_row + (c >> 6);
        let mask = 1u64 << (c & 63);
        if value {
            self.words[idx] |= mask;
        } else {
            self.words[idx] &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row(&self, r: usize) -> BitVector {
        let mut v = BitVector::zeros(self.cols);
        v.words.copy_from_slice(self.row_words(r));
        v
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn column_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    /// Assemble a matrix from column vectors (all of equal length).
    pub fn from_columns(cols: &[BitVector]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::InvalidParameter("no columns".into()));
        }
        let rows = cols[0].len();
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("unequal column lengths".into()));
        }
        let mut m = BitMatrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..rows {
                if col.get(i) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Columns as a sorted multiset; used for permutation-equality checks.
    pub fn column_multiset(&self) -> Vec<Vec<u8>> {
        let mut cols: Vec<Vec<u8>> = (0..self.cols)
            .map(|j| self.column(j).to_bytes())
            .collect();
        cols.sort();
        cols
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_bytes()).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Kronecker product over GF(2); dimensions multiply.
pub fn kron(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut out = BitMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            if !a.get(ia, ja) {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    if b.get(ib, jb) {
                        out.set(ia * b.rows + ib, ja * b.cols + jb, true);
                    }
                }
            }
        }
    }
    out
}

/// `n`-fold Kronecker power of `m`.
pub fn kron_power(m: &BitMatrix, n: usize) -> BitMatrix {
    let mut acc = BitMatrix::identity(1);
    for _ in 0..n {
        acc = kron(&acc, m);
    }
    acc
}

/// Row-vector times matrix over GF(2): `u * M`.
pub fn mat_vec_mul(u: &BitVector, m: &BitMatrix) -> Result<BitVector> {
    if u.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs matrix rows {}",
            u.len(),
            m.rows
        )));
    }
    let mut acc = BitVector::zeros(m.cols);
    for r in 0..m.rows {
        if u.get(r) {
            for (a, b) in acc.words.iter_mut().zip(m.row_words(r)) {
                *a ^= b;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_identity_is_noop() {
        let m = BitMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(kron(&BitMatrix::identity(1), &m), m);
        assert_eq!(kron(&m, &BitMatrix::identity(1)), m);
    }

    #[test]
    fn kron_g2_squared() {
        let g2 = BitMatrix::g2();
        let g4 = kron(&g2, &g2);
        // bottom row of G2^{⊗2} is all ones
        assert_eq!(g4.row(3).to_bytes(), vec![1, 1, 1, 1]);
        assert_eq!(g4.column_weight(0), 4);
        assert_eq!(g4.column_weight(3), 1);
    }

    #[test]
    fn kron_associative() {
        let mut rng = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for _ in 0..10 {
            let rand_mat = |next: &mut dyn FnMut() -> u64| {
                let r = 1 + (next() % 3) as usize;
                let c = 1 + (next() % 3) as usize;
                let mut m = BitMatrix::zeros(r, c);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, next() & 1 == 1);
                    }
                }
                m
            };
            let a = rand_mat(&mut next);
            let b = rand_mat(&mut next);
            let c = rand_mat(&mut next);
            assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
        }
    }

    #[test]
    fn mat_vec_basics() {
        let g2 = BitMatrix::g2();
        let zero = BitVector::zeros(2);
        assert!(mat_vec_mul(&zero, &g2).unwrap().is_zero());
        // e_i selects row i
        for i in 0..2 {
            let e = BitVector::unit(2, i);
            assert_eq!(mat_vec_mul(&e, &g2).unwrap(), g2.row(i));
        }
        // [1,1] * G2 = [0,1]
        let u = BitVector::from_bits(&[1, 1]);
        assert_eq!(mat_vec_mul(&u, &g2).unwrap().to_bytes(), vec![0, 1]);
        // dimension mismatch
        let u3 = BitVector::zeros(3);
        assert!(mat_vec_mul(&u3, &g2).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let text = "1 0 1\n0 1 1\n";
        let m = BitMatrix::parse_text(text).unwrap();
        let again = BitMatrix::parse_text(&format!("{}", m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn slice_and_embed() {
        let v = BitVector::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0]);
        assert_eq!(v.slice(0, 4).to_bytes(), vec![1, 0, 1, 1]);
        assert_eq!(v.slice(4, 4).to_bytes(), vec![0, 0, 1, 0]);
        let e = v.slice(4, 4).embedded(8, 0);
        assert_eq!(e.to_bytes(), vec![0, 0, 1, 0, 0, 0, 0, 0]);
    }
}
