//! Sparse integer matrices with checked arithmetic.
//!
//! Rows are stored as sorted `(col, value)` lists with no explicit zeros.
//! Columns are vectors: a map `A -> B` between modules of ranks `a`, `b` is a
//! `b × a` matrix.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::par::{self, Mode};

const PAR_ROWS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, i64)>>,
}

#[inline]
fn add_i(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("integer overflow in matrix arithmetic")
}

#[inline]
fn mul_i(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("integer overflow in matrix arithmetic")
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix { rows: n, cols: n, data: (0..n).map(|i| vec![(i, 1)]).collect() }
    }

    pub fn scalar(n: usize, c: i64) -> Matrix {
        if c == 0 {
            return Matrix::zeros(n, n);
        }
        Matrix { rows: n, cols: n, data: (0..n).map(|i| vec![(i, c)]).collect() }
    }

    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Matrix {
        let mut acc: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            let e = acc[r].entry(c).or_insert(0);
            *e = add_i(*e, v);
        }
        let data = acc.into_iter().map(|row| row.into_iter().filter(|&(_, v)| v != 0).collect()).collect();
        Matrix { rows, cols, data }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_triplets(r, c, rows.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, v))))
    }

    /// Dense constructor with an explicit column count, for `r × 0` and `0 × c` shapes.
    pub fn from_dense_shape(rows: usize, cols: usize, vals: &[i64]) -> Matrix {
        assert_eq!(vals.len(), rows * cols);
        Matrix::from_triplets(rows, cols, (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j, vals[i * cols + j]))))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.data[i]
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        let row = &self.data[r];
        match row.binary_search_by_key(&c, |&(j, _)| j) {
            Ok(k) => row[k].1,
            Err(_) => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.data.iter().enumerate().all(|(i, r)| r.len() == 1 && r[0] == (i, 1))
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            out[i][j] = v;
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![Vec::new(); self.cols];
        for (i, j, v) in self.entries() {
            data[j].push((i, v));
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> Matrix {
        if c == 0 {
            return Matrix::zeros(self.rows, self.cols);
        }
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|r| r.iter().map(|&(j, v)| (j, mul_i(v, c))).collect()).collect() }
    }

    pub fn signed(&self, positive: bool) -> Matrix {
        if positive {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "add: shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| merge_rows(a, b, 1)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "sub: shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| merge_rows(a, b, -1)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    fn mul_row(&self, other: &Matrix, i: usize) -> Vec<(usize, i64)> {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for &(k, a) in &self.data[i] {
            for &(j, b) in &other.data[k] {
                let e = acc.entry(j).or_insert(0);
                *e = add_i(*e, mul_i(a, b));
            }
        }
        acc.into_iter().filter(|&(_, v)| v != 0).collect()
    }

    /// Product `self · other`, parallel over rows for large left factors.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        let mode = if self.rows >= PAR_ROWS { Mode::default_mode() } else { Mode::Sequential };
        self.mul_with(other, mode)
    }

    pub fn mul_with(&self, other: &Matrix, mode: Mode) -> Matrix {
        assert_eq!(self.cols, other.rows, "mul: {}x{} · {}x{}", self.rows, self.cols, other.rows, other.cols);
        let data = par::map_range(mode, self.rows, |i| self.mul_row(other, i));
        Matrix { rows: self.rows, cols: other.cols, data }
    }

    /// Kronecker product; basis of the result is `(i, j) ↦ i·dim(B) + j`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (br, bc) = other.shape();
        let mut data = vec![Vec::new(); self.rows * br];
        for i in 0..self.rows {
            for k in 0..br {
                let row = &mut data[i * br + k];
                for &(j, a) in &self.data[i] {
                    for &(l, b) in &other.data[k] {
                        row.push((j * bc + l, mul_i(a, b)));
                    }
                }
            }
        }
        Matrix { rows: self.rows * br, cols: self.cols * bc, data }
    }

    /// Block matrix with the given row/column block sizes; missing blocks are zero.
    pub fn blocks(row_sizes: &[usize], col_sizes: &[usize], blocks: &[(usize, usize, &Matrix)]) -> Matrix {
        let roff = offsets(row_sizes);
        let coff = offsets(col_sizes);
        let mut trip = Vec::new();
        for &(bi, bj, m) in blocks {
            assert_eq!(m.shape(), (row_sizes[bi], col_sizes[bj]), "block ({bi},{bj}) has wrong shape");
            trip.extend(m.entries().map(|(i, j, v)| (roff[bi] + i, coff[bj] + j, v)));
        }
        Matrix::from_triplets(roff[row_sizes.len()], coff[col_sizes.len()], trip)
    }

    pub fn block_diag(parts: &[&Matrix]) -> Matrix {
        let rs: Vec<usize> = parts.iter().map(|m| m.rows).collect();
        let cs: Vec<usize> = parts.iter().map(|m| m.cols).collect();
        let bl: Vec<(usize, usize, &Matrix)> = parts.iter().enumerate().map(|(i, m)| (i, i, *m)).collect();
        Matrix::blocks(&rs, &cs, &bl)
    }

    pub fn submatrix(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Matrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols);
        let data = (r0..r0 + nr).map(|i| self.data[i].iter().filter(|&&(j, _)| j >= c0 && j < c0 + nc).map(|&(j, v)| (j - c0, v)).collect()).collect();
        Matrix { rows: nr, cols: nc, data }
    }

    /// Reindexes rows and columns: entry `(i, j)` moves to `(rmap[i], cmap[j])`.
    pub fn permute(&self, rmap: &[usize], cmap: &[usize]) -> Matrix {
        Matrix::from_triplets(self.rows, self.cols, self.entries().map(|(i, j, v)| (rmap[i], cmap[j], v)))
    }

    pub fn trace(&self) -> i64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).fold(0, add_i)
    }

    pub fn max_abs(&self) -> i64 {
        self.entries().map(|(_, _, v)| v.abs()).max().unwrap_or(0)
    }

    pub fn to_big(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            out[i][j] = BigInt::from(v);
        }
        out
    }

    pub fn to_rational(&self) -> Vec<Vec<BigRational>> {
        let mut out = vec![vec![BigRational::zero(); self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            out[i][j] = BigRational::from_integer(BigInt::from(v));
        }
        out
    }

    /// Rank over the rationals (fraction-free elimination).
    pub fn rank(&self) -> usize {
        rank_big(self.to_big())
    }

    /// Determinant via Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "det of non-square matrix");
        det_big(self.to_big())
    }

    pub fn is_idempotent(&self) -> bool {
        self.is_square() && self.mul(self) == *self
    }

    /// Inverse over ℤ, `None` unless square with determinant ±1.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.to_rational();
        let mut inv: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(c, p);
            inv.swap(c, p);
            let piv = a[c][c].clone();
            for j in 0..n {
                a[c][j] = &a[c][j] / &piv;
                inv[c][j] = &inv[c][j] / &piv;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    let (x, y) = (&a[c][j] * &f, &inv[c][j] * &f);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
        let mut trip = Vec::new();
        for (i, row) in inv.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_integer() {
                    return None;
                }
                let v: i64 = v.to_integer().try_into().ok()?;
                if v != 0 {
                    trip.push((i, j, v));
                }
            }
        }
        Some(Matrix::from_triplets(n, n, trip))
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

fn merge_rows(a: &[(usize, i64)], b: &[(usize, i64)], sb: i64) -> Vec<(usize, i64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, mul_i(b[j].1, sb)));
            j += 1;
        } else {
            let v = add_i(a[i].1, mul_i(b[j].1, sb));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn rank_big(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k]) / &prev;
                m[r][k] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn det_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else { return BigInt::zero() };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sign of a big integer as -1, 0, 1.
pub fn sign_of(x: &BigInt) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        if self.rows * self.cols <= 64 {
            write!(f, "{:?}", self.to_dense())
        } else {
            write!(f, "nnz={}", self.nnz())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr { rows: self.rows, cols: self.cols, entries: self.entries().collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        if r.entries.iter().any(|&(i, j, _)| i >= r.rows || j >= r.cols) {
            return Err(serde::de::Error::custom("matrix entry out of range"));
        }
        Ok(Matrix::from_triplets(r.rows, r.cols, r.entries))
    }
}
