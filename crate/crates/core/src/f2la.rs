//! Dense linear algebra over GF(2).
//!
//! [`BitMatrix`] stores rows bit-packed into `u64` words so that row
//! operations during elimination are word-level XORs. [`BitVec`] is the
//! matching vector type; a vector is also read as a subset of its index set
//! (bit `i` set means element `i` is in the subset).
//!
//! Every operation here is pure: inputs are borrowed and results are fresh
//! values.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum F2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rows of the second matrix are not in the kernel of the first (row {row})")]
    NotAComplex { row: usize },
    #[error("malformed matrix text: {0}")]
    Parse(String),
}

/// A bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
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

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with ones exactly at `support`.
    ///
    /// # Panics
    ///
    /// Panics if an index is out of range.
    pub fn from_support(len: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.flip(i);
        }
        v
    }

    fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        Self { len, words }
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
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot product of unequal lengths");
        parity_and(&self.words, &other.words)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        xor_into(&mut self.words, &other.words);
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "and of unequal lengths");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitVec::from_words(self.len, words)
    }

    /// Indices of set bits, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
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

impl FromStr for BitVec {
    type Err = F2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(F2Error::Parse(format!("unexpected character {other:?}"))),
            }
        }
        Ok(v)
    }
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
fn parity_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

/// Dense row-major bit matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Output of [`BitMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Reduced row echelon form; has the same shape as the input, with the
    /// zero rows at the bottom.
    pub reduced: BitMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of equal length `cols`.
    ///
    /// # Panics
    ///
    /// Panics if a row has the wrong length.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has length {} not {cols}", r.len());
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn from_row_strings<S: AsRef<str>>(cols: usize, rows: &[S]) -> Result<Self, F2Error> {
        let parsed = rows
            .iter()
            .map(|s| s.as_ref().parse::<BitVec>())
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(bad) = parsed.iter().find(|r| r.len() != cols) {
            return Err(F2Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self::from_rows(cols, &parsed))
    }

    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.rows).map(|i| self.row(i).to_string()).collect()
    }

    /// Matrix with a single one per row at the given column.
    pub fn from_row_indices(cols: usize, ones: &[usize]) -> Self {
        let mut m = Self::zeros(ones.len(), cols);
        for (i, &c) in ones.iter().enumerate() {
            m.set(i, c, true);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.data[r * self.stride + c / WORD] >> (c % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD);
        let w = &mut self.data[r * self.stride + c / WORD];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        let v = self.get(r, c);
        self.set(r, c, !v);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
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

    pub fn column_weights(&self) -> Vec<usize> {
        let mut out = vec![0; self.cols];
        for r in 0..self.rows {
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut rest = w;
                while rest != 0 {
                    out[wi * WORD + rest.trailing_zeros() as usize] += 1;
                    rest &= rest - 1;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Indices of nonzero entries as `(row, col)` pairs in row-major order.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|r| self.row(r).support().map(move |c| (r, c)).collect::<Vec<_>>())
            .collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).support() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.cols != rhs.rows {
            return Err(F2Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let (lo, hi) = (r * out.stride, (r + 1) * out.stride);
            for k in self.row(r).support() {
                xor_into(&mut out.data[lo..hi], rhs.row_words(k));
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if parity_and(self.row_words(r), v.words()) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Vector-matrix product `vᵀ · self`, i.e. the XOR of the rows selected by `v`.
    pub fn left_mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.rows {
            return Err(F2Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.cols);
        for r in v.support() {
            xor_into(&mut out.words, self.row_words(r));
        }
        Ok(out)
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.cols != below.cols {
            return Err(F2Error::DimensionMismatch {
                expected: self.cols,
                found: below.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(BitMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    /// Places `right` beside `self`.
    pub fn hstack(&self, right: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.rows != right.rows {
            return Err(F2Error::DimensionMismatch {
                expected: self.rows,
                found: right.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + right.cols);
        for r in 0..self.rows {
            for c in self.row(r).support() {
                out.set(r, c, true);
            }
            for c in right.row(r).support() {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &BitMatrix, b: &BitMatrix, c: &BitMatrix, d: &BitMatrix) -> Result<BitMatrix, F2Error> {
        a.hstack(b)?.vstack(&c.hstack(d)?)
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            let src = self.row_words(r).to_vec();
            out.row_words_mut(i).copy_from_slice(&src);
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, next);
            let pivot_row = m.row_words(next).to_vec();
            for r in 0..m.rows {
                if r != next && m.get(r, c) {
                    xor_into(m.row_words_mut(r), &pivot_row);
                }
            }
            pivots.push(c);
            next += 1;
        }
        Rref {
            reduced: m,
            rank: pivots.len(),
            pivot_cols: pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn rank(&self) -> usize {
        RowSpace::new(self).dim()
    }

    /// Rows form a basis of `ker(self)`.
    pub fn kernel_basis(&self) -> BitMatrix {
        let rref = self.rref();
        let is_pivot = {
            let mut v = vec![false; self.cols];
            for &p in &rref.pivot_cols {
                v[p] = true;
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = BitMatrix::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            basis.set(i, f, true);
            for (r, &p) in rref.pivot_cols.iter().enumerate() {
                if rref.reduced.get(r, f) {
                    basis.set(i, p, true);
                }
            }
        }
        basis
    }

    /// Rows spanning the row space, without the zero rows.
    pub fn rowspace_basis(&self) -> BitMatrix {
        let rref = self.rref();
        rref.reduced.select_rows(&(0..rref.rank).collect::<Vec<_>>())
    }

    /// Parses the fixture text format: a `rows cols` header, then one 0/1
    /// string per row.
    pub fn from_text(text: &str) -> Result<BitMatrix, F2Error> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| F2Error::Parse("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| F2Error::Parse(e.to_string())))
            .collect::<Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(F2Error::Parse(format!("bad header {header:?}")));
        };
        let body: Vec<&str> = lines.take(rows).collect();
        if body.len() != rows {
            return Err(F2Error::Parse(format!("expected {rows} rows, found {}", body.len())));
        }
        BitMatrix::from_row_strings(cols, &body)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            s.push_str(&self.row(r).to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// An echelon basis of a row space, kept for repeated membership queries.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(m: &BitMatrix) -> Self {
        let mut space = RowSpace::empty(m.cols());
        for r in 0..m.rows() {
            space.insert_words(m.row_words(r).to_vec());
        }
        space
    }

    pub fn empty(cols: usize) -> Self {
        Self {
            cols,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn reduce_words(&self, words: &mut [u64]) {
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if words[p / WORD] >> (p % WORD) & 1 == 1 {
                xor_into(words, b);
            }
        }
    }

    fn insert_words(&mut self, mut words: Vec<u64>) -> bool {
        self.reduce_words(&mut words);
        let Some(pivot) = words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
        else {
            return false;
        };
        // Keep the basis fully reduced so `reduce_words` is a single pass.
        for b in &mut self.basis {
            if b[pivot / WORD] >> (pivot % WORD) & 1 == 1 {
                xor_into(b, &words);
            }
        }
        self.basis.push(words);
        self.pivots.push(pivot);
        true
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.cols, "row space insert of wrong length");
        self.insert_words(v.words().to_vec())
    }

    /// Residual of `v` after elimination against the basis; zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "row space reduce of wrong length");
        let mut words = v.words().to_vec();
        self.reduce_words(&mut words);
        BitVec::from_words(self.cols, words)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn basis_matrix(&self) -> BitMatrix {
        let rows: Vec<BitVec> = self
            .basis
            .iter()
            .map(|w| BitVec::from_words(self.cols, w.clone()))
            .collect();
        BitMatrix::from_rows(self.cols, &rows)
    }
}

/// Whether `v` lies in the row space of `m`.
pub fn rowspace_contains(m: &BitMatrix, v: &BitVec) -> Result<bool, F2Error> {
    if v.len() != m.cols() {
        return Err(F2Error::DimensionMismatch {
            expected: m.cols(),
            found: v.len(),
        });
    }
    Ok(RowSpace::new(m).contains(v))
}

/// Whether `rs(a) ⊆ rs(b)`.
pub fn subspace_leq(a: &BitMatrix, b: &BitMatrix) -> Result<bool, F2Error> {
    Ok(first_row_outside(a, b)?.is_none())
}

/// First row of `a` outside `rs(b)`, as `(row index, row)`.
pub fn first_row_outside(a: &BitMatrix, b: &BitMatrix) -> Result<Option<(usize, BitVec)>, F2Error> {
    if a.cols() != b.cols() {
        return Err(F2Error::DimensionMismatch {
            expected: b.cols(),
            found: a.cols(),
        });
    }
    let space = RowSpace::new(b);
    Ok((0..a.rows())
        .map(|r| (r, a.row(r)))
        .find(|(_, row)| !space.contains(row)))
}

/// `dim ker(kernel_of) − rank(rowspace_of)`, the dimension of
/// `ker(kernel_of) / rs(rowspace_of)`.
///
/// Requires `kernel_of · rowspace_ofᵀ = 0`.
pub fn quotient_dim(kernel_of: &BitMatrix, rowspace_of: &BitMatrix) -> Result<usize, F2Error> {
    if kernel_of.cols() != rowspace_of.cols() {
        return Err(F2Error::DimensionMismatch {
            expected: kernel_of.cols(),
            found: rowspace_of.cols(),
        });
    }
    for r in 0..rowspace_of.rows() {
        if !kernel_of.mul_vec(&rowspace_of.row(r))?.is_zero() {
            return Err(F2Error::NotAComplex { row: r });
        }
    }
    let ker = kernel_of.cols() - kernel_of.rank();
    Ok(ker - rowspace_of.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(cols: usize, rows: &[&str]) -> BitMatrix {
        BitMatrix::from_row_strings(cols, rows).unwrap()
    }

    fn v(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    /// Every vector in the span, by enumerating all row combinations.
    fn span(mat: &BitMatrix) -> Vec<BitVec> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << mat.rows()) {
            let mut acc = BitVec::zeros(mat.cols());
            for r in 0..mat.rows() {
                if mask >> r & 1 == 1 {
                    acc.xor_assign(&mat.row(r));
                }
            }
            out.push(acc);
        }
        out
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = BitMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivot_cols, vec![0, 1, 2]);

        let z = BitMatrix::zeros(2, 4);
        let r = z.rref();
        assert_eq!(r.reduced, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivot_cols.is_empty());
    }

    #[test]
    fn rref_dependent_rows() {
        let r = m(3, &["110", "011", "101"]).rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.reduced, m(3, &["101", "011", "000"]));
        assert_eq!(r.pivot_cols, vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(BitMatrix::identity(4).kernel_basis().rows(), 0);
        let k = BitMatrix::zeros(2, 3).kernel_basis();
        assert_eq!(k.rows(), 3);
        assert_eq!(k.rank(), 3);

        let single = m(3, &["111"]);
        let k = single.kernel_basis();
        assert_eq!(k.rows(), 2);
        // Oracle: the even-weight vectors of length 3 are exactly the kernel.
        let even: Vec<BitVec> = (0u8..8)
            .map(|x| BitVec::from_bools(&[x & 1 == 1, x & 2 == 2, x & 4 == 4]))
            .filter(|x| x.weight() % 2 == 0)
            .collect();
        let mut spanned = span(&k);
        spanned.sort();
        let mut even_sorted = even.clone();
        even_sorted.sort();
        assert_eq!(spanned, even_sorted);
    }

    #[test]
    fn rowspace_contains_examples() {
        let a = m(3, &["110", "011"]);
        assert!(rowspace_contains(&a, &v("000")).unwrap());
        assert!(rowspace_contains(&a, &v("101")).unwrap());
        assert!(!rowspace_contains(&m(3, &["110"]), &v("011")).unwrap());
        assert!(matches!(
            rowspace_contains(&a, &v("01")),
            Err(F2Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn subspace_leq_examples() {
        let b = m(3, &["110", "011"]);
        assert!(subspace_leq(&BitMatrix::zeros(2, 3), &b).unwrap());
        assert!(subspace_leq(&b, &b).unwrap());
        assert!(!subspace_leq(&m(3, &["100"]), &b).unwrap());
        assert!(subspace_leq(&m(2, &["11"]), &b).is_err());
    }

    #[test]
    fn quotient_dim_examples() {
        assert_eq!(
            quotient_dim(&BitMatrix::zeros(0, 4), &BitMatrix::identity(4)).unwrap(),
            0
        );
        // Repetition code on a 3-cycle: vertex checks, no faces.
        let cycle = m(3, &["110", "011", "101"]);
        assert_eq!(quotient_dim(&cycle, &BitMatrix::zeros(0, 3)).unwrap(), 1);
        assert!(matches!(
            quotient_dim(&m(2, &["11"]), &m(2, &["10"])),
            Err(F2Error::NotAComplex { row: 0 })
        ));
    }

    #[test]
    fn empty_shapes_are_legal() {
        let wide = BitMatrix::zeros(0, 5);
        assert_eq!(wide.rank(), 0);
        assert_eq!(wide.kernel_basis().rows(), 5);
        let tall = BitMatrix::zeros(4, 0);
        assert_eq!(tall.rank(), 0);
        assert_eq!(tall.kernel_basis().shape(), (0, 0));
        assert_eq!(tall.transpose().shape(), (0, 4));
        let p = tall.mul(&BitMatrix::zeros(0, 3)).unwrap();
        assert_eq!(p.shape(), (4, 3));
        assert!(p.is_zero());
    }

    #[test]
    fn text_format() {
        let a = m(3, &["110", "011"]);
        let text = a.to_text();
        assert_eq!(text, "2 3\n110\n011\n");
        assert_eq!(BitMatrix::from_text(&text).unwrap(), a);
        assert_eq!(BitMatrix::from_text("0 4\n").unwrap(), BitMatrix::zeros(0, 4));
        assert!(BitMatrix::from_text("2 3\n110\n").is_err());
        assert!(BitMatrix::from_text("1 3\n1101\n").is_err());
    }

    #[test]
    fn wide_rows_cross_word_boundaries() {
        let mut a = BitMatrix::zeros(3, 130);
        a.set(0, 0, true);
        a.set(0, 129, true);
        a.set(1, 64, true);
        a.set(1, 129, true);
        a.set(2, 0, true);
        a.set(2, 64, true);
        assert_eq!(a.rank(), 2);
        let k = a.kernel_basis();
        assert_eq!(k.rows(), 128);
        assert!(a.mul(&k.transpose()).unwrap().is_zero());
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (0..=max_rows, 0..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                let mut mat = BitMatrix::zeros(r, c);
                for i in 0..r {
                    for j in 0..c {
                        mat.set(i, j, bits[i * c + j]);
                    }
                }
                mat
            })
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(a in arb_matrix(10, 70)) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn rank_nullity(a in arb_matrix(10, 70)) {
            let k = a.kernel_basis();
            prop_assert_eq!(a.rank() + k.rows(), a.cols());
            prop_assert_eq!(k.rank(), k.rows());
            prop_assert!(a.mul(&k.transpose()).unwrap().is_zero());
        }

        #[test]
        fn rref_is_idempotent(a in arb_matrix(8, 20)) {
            let once = a.rref().reduced;
            prop_assert_eq!(once.rref().reduced, once.clone());
            prop_assert!(subspace_leq(&once, &a).unwrap() && subspace_leq(&a, &once).unwrap());
        }

        #[test]
        fn contains_matches_exhaustive_span(a in arb_matrix(6, 12), bits in proptest::collection::vec(any::<bool>(), 12)) {
            let x = BitVec::from_bools(&bits[..a.cols()]);
            let brute = span(&a).contains(&x);
            prop_assert_eq!(rowspace_contains(&a, &x).unwrap(), brute);
        }

        #[test]
        fn subspace_leq_reflexive_transitive(a in arb_matrix(4, 8), b in arb_matrix(4, 8), c in arb_matrix(4, 8)) {
            // Force equal widths by padding to 8 columns.
            let pad = |x: &BitMatrix| x.hstack(&BitMatrix::zeros(x.rows(), 8 - x.cols())).unwrap();
            let (a, b, c) = (pad(&a), pad(&b), pad(&c));
            prop_assert!(subspace_leq(&a, &a).unwrap());
            let ab = a.vstack(&b).unwrap();
            let abc = ab.vstack(&c).unwrap();
            prop_assert!(subspace_leq(&a, &ab).unwrap());
            prop_assert!(subspace_leq(&ab, &abc).unwrap());
            prop_assert!(subspace_leq(&a, &abc).unwrap());
            let brute = span(&a).iter().all(|x| span(&b).contains(x));
            prop_assert_eq!(subspace_leq(&a, &b).unwrap(), brute);
        }
    }
}
