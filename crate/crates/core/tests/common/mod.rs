//! Independent rational linear algebra used as test oracles.
#![allow(dead_code)]

pub mod action_oracle;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use transfer_core::chain::ChainComplex;
use transfer_core::Matrix;

pub type R = BigRational;
pub type RMat = Vec<Vec<R>>;

pub fn rat(m: &Matrix) -> RMat {
    m.to_dense().into_iter().map(|r| r.into_iter().map(|v| R::from_integer(BigInt::from(v))).collect()).collect()
}

pub fn zeros(r: usize, c: usize) -> RMat {
    vec![vec![R::zero(); c]; r]
}

pub fn mul(a: &RMat, b: &RMat, inner: usize) -> RMat {
    let (r, c) = (a.len(), b.first().map_or(0, |x| x.len()));
    let mut out = zeros(r, c);
    for i in 0..r {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..c {
                out[i][j] = &out[i][j] + &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// Column indices of a maximal independent set of columns (left to right).
pub fn pivot_columns(m: &RMat, cols: usize) -> Vec<usize> {
    let mut rows: Vec<Vec<R>> = m.clone();
    let mut piv = Vec::new();
    let mut r0 = 0;
    for c in 0..cols {
        let Some(p) = (r0..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r0, p);
        let inv = R::one() / &rows[r0][c];
        for i in 0..rows.len() {
            if i != r0 && !rows[i][c].is_zero() {
                let f = &rows[i][c] * &inv;
                for j in c..cols {
                    let t = &f * &rows[r0][j];
                    rows[i][j] = &rows[i][j] - t;
                }
            }
        }
        piv.push(c);
        r0 += 1;
    }
    piv
}

pub fn inverse(m: &RMat) -> Option<RMat> {
    let n = m.len();
    let mut a: Vec<Vec<R>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { R::one() } else { R::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = R::one() / &a[c][c];
        for j in 0..2 * n {
            a[c][j] = &a[c][j] * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] = &a[i][j] - t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(m: &RMat) -> R {
    let n = m.len();
    let mut a = m.clone();
    let mut d = R::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return R::zero() };
        if p != c {
            a.swap(c, p);
            d = -d;
        }
        d = &d * &a[c][c];
        let inv = R::one() / &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] = &a[i][j] - t;
                }
            }
        }
    }
    d
}

/// Rational contraction of an acyclic complex from pivot sections; returns Γ_n: C_n → C_{n+1}.
pub fn rational_contraction(c: &ChainComplex) -> Option<Vec<(i32, RMat)>> {
    let mut piv = std::collections::BTreeMap::new();
    for n in c.lo..=c.hi() + 1 {
        piv.insert(n, pivot_columns(&rat(&c.d(n)), c.rank(n)));
    }
    let mut out = Vec::new();
    for n in c.degrees() {
        let rn = c.rank(n);
        let up = &piv[&(n + 1)];
        let own = &piv[&n];
        if up.len() + own.len() != rn {
            return None;
        }
        let dn1 = rat(&c.d(n + 1));
        let mut t = zeros(rn, rn);
        let mut m = zeros(c.rank(n + 1), rn);
        for (col, &j) in up.iter().enumerate() {
            for i in 0..rn {
                t[i][col] = dn1[i][j].clone();
            }
            m[j][col] = R::one();
        }
        for (k, &j) in own.iter().enumerate() {
            t[j][up.len() + k] = R::one();
        }
        let ti = inverse(&t)?;
        out.push((n, mul(&m, &ti, rn)));
    }
    Some(out)
}

/// det of (d + Γ): C_odd → C_even with the blocks ordered by ascending degree.
pub fn odd_even_det(c: &ChainComplex, gamma: &[(i32, RMat)]) -> R {
    let odd: Vec<i32> = c.degrees().filter(|n| n.rem_euclid(2) == 1).collect();
    let even: Vec<i32> = c.degrees().filter(|n| n.rem_euclid(2) == 0).collect();
    let off = |list: &[i32], n: i32| -> usize { list.iter().take_while(|&&m| m != n).map(|&m| c.rank(m)).sum() };
    let rows: usize = even.iter().map(|&n| c.rank(n)).sum();
    let cols: usize = odd.iter().map(|&n| c.rank(n)).sum();
    if rows != cols {
        return R::zero();
    }
    let mut a = zeros(rows, cols);
    for &n in &odd {
        let co = off(&odd, n);
        if even.contains(&(n - 1)) {
            let d = rat(&c.d(n));
            let ro = off(&even, n - 1);
            for i in 0..c.rank(n - 1) {
                for j in 0..c.rank(n) {
                    a[ro + i][co + j] = &a[ro + i][co + j] + &d[i][j];
                }
            }
        }
        if even.contains(&(n + 1)) {
            let g = &gamma.iter().find(|(m, _)| *m == n).unwrap().1;
            let ro = off(&even, n + 1);
            for i in 0..c.rank(n + 1) {
                for j in 0..c.rank(n) {
                    a[ro + i][co + j] = &a[ro + i][co + j] + &g[i][j];
                }
            }
        }
    }
    det(&a)
}

pub fn sign(x: &R) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
