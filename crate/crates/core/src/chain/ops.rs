//! Duals, tensor products, flips, the pairing μ, the double-dual ι, cones and shifts.
//!
//! Conventions: (C^{-*})_n = (C_{-n})^* with differential (−1)^n d_{−n+1}^T;
//! (f^{-*}) landing in degree n is (−1)^{nk} f_{−n}^T; tensor differential
//! d⊗1 + (−1)^p 1⊗d on C_p⊗D_q; (f⊗g) on A_p⊗B_q is (−1)^{|g|p} f⊗g;
//! the flip on C_p⊗D_q carries (−1)^{pq}; ι_n = (−1)^n.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::chain::complex::{ChainComplex, ChainMap, Positions};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn sgn(e: i32) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn dual_complex(c: &ChainComplex) -> ChainComplex {
    if c.len() == 0 {
        return ChainComplex::zero();
    }
    let lo = -c.hi();
    let hi = -c.lo;
    let ranks: Vec<usize> = (lo..=hi).map(|n| c.rank(-n)).collect();
    let diffs = (lo + 1..=hi).map(|n| c.d(-n + 1).transpose().scale(sgn(n))).collect();
    let idem = c.idem.as_ref().map(|_| (lo..=hi).map(|n| c.p(-n).transpose()).collect());
    let positions = c.positions.as_ref().map(|p| Positions { npoints: p.npoints, at: (lo..=hi).map(|n| c.positions_in(-n).unwrap().to_vec()).collect() });
    ChainComplex::from_parts(lo, ranks, diffs, idem, positions)
}

/// f^{-*}: D^{-*} → C^{-*} for f: C → D of degree k, between the given dual complexes.
pub fn dual_map_between(f: &ChainMap, dsrc: Arc<ChainComplex>, dtgt: Arc<ChainComplex>) -> ChainMap {
    let k = f.degree;
    let mut comps = BTreeMap::new();
    for (&m, a) in f.comps() {
        // f_m : C_m → D_{m+k}; lands in (C^{-*})_{-m}
        let n = -m;
        comps.insert(n - k, a.transpose().scale(sgn(n * k)));
    }
    ChainMap::new(dsrc, dtgt, k, comps).expect("dual map shapes")
}

pub fn dual_map(f: &ChainMap) -> ChainMap {
    dual_map_between(f, Arc::new(dual_complex(&f.tgt)), Arc::new(dual_complex(&f.src)))
}

/// ι_C: C → (C^{-*})^{-*}, (−1)^n in degree n.
pub fn iota(c: &Arc<ChainComplex>) -> ChainMap {
    let dd = Arc::new(dual_complex(&dual_complex(c)));
    iota_into(c, dd)
}

pub fn iota_into(c: &Arc<ChainComplex>, dd: Arc<ChainComplex>) -> ChainMap {
    ChainMap::from_fn(c.clone(), dd, 0, |n| c.p(n).scale(sgn(n))).expect("iota shapes")
}

/// Summand layout of (C⊗D)_n: `(p, q, offset)` for every p + q = n, p ascending.
pub fn tensor_layout(c: &ChainComplex, d: &ChainComplex, n: i32) -> Vec<(i32, i32, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    if c.len() == 0 || d.len() == 0 {
        return out;
    }
    for p in c.degrees() {
        let q = n - p;
        if q < d.lo || q > d.hi() {
            continue;
        }
        out.push((p, q, off));
        off += c.rank(p) * d.rank(q);
    }
    out
}

fn layout_offset(layout: &[(i32, i32, usize)], p: i32) -> Option<usize> {
    layout.iter().find(|t| t.0 == p).map(|t| t.2)
}

pub fn tensor(c: &ChainComplex, d: &ChainComplex) -> ChainComplex {
    if c.len() == 0 || d.len() == 0 {
        return ChainComplex::zero();
    }
    let lo = c.lo + d.lo;
    let hi = c.hi() + d.hi();
    let layouts: BTreeMap<i32, Vec<(i32, i32, usize)>> = (lo - 1..=hi).map(|n| (n, tensor_layout(c, d, n))).collect();
    let rank = |n: i32| -> usize { (c.lo..=c.hi()).map(|p| c.rank(p) * d.rank(n - p)).sum() };
    let ranks: Vec<usize> = (lo..=hi).map(rank).collect();
    let mut diffs = Vec::new();
    for n in lo + 1..=hi {
        let src = &layouts[&n];
        let tgt = &layouts[&(n - 1)];
        let mut trip = Vec::new();
        for &(p, q, off) in src {
            // d^C ⊗ 1 into C_{p-1} ⊗ D_q
            if let Some(toff) = layout_offset(tgt, p - 1) {
                let m = c.d(p).kron(&Matrix::identity(d.rank(q)));
                trip.extend(m.entries().map(|(i, j, v)| (toff + i, off + j, v)));
            }
            // (−1)^p 1 ⊗ d^D into C_p ⊗ D_{q-1}
            if let Some(toff) = layout_offset(tgt, p) {
                let m = Matrix::identity(c.rank(p)).kron(&d.d(q)).scale(sgn(p));
                trip.extend(m.entries().map(|(i, j, v)| (toff + i, off + j, v)));
            }
        }
        diffs.push(Matrix::from_triplets(rank(n - 1), rank(n), trip));
    }
    let idem = if c.idem.is_some() || d.idem.is_some() {
        Some(
            (lo..=hi)
                .map(|n| block_from_layout(&layouts[&n], &layouts[&n], rank(n), rank(n), |p, _q, pp, _qq| (p == pp).then(|| c.p(p).kron(&d.p(n - p)))))
                .collect(),
        )
    } else {
        None
    };
    let positions = match (&c.positions, &d.positions) {
        (Some(pc), Some(pd)) => Some(Positions {
            npoints: pc.npoints * pd.npoints,
            at: (lo..=hi)
                .map(|n| {
                    let mut v = Vec::with_capacity(rank(n));
                    for &(p, q, _) in &layouts[&n] {
                        let xs = c.positions_in(p).unwrap();
                        let ys = d.positions_in(q).unwrap();
                        for &x in xs {
                            for &y in ys {
                                v.push(x * pd.npoints + y);
                            }
                        }
                    }
                    v
                })
                .collect(),
        }),
        _ => None,
    };
    ChainComplex::from_parts(lo, ranks, diffs, idem, positions)
}

/// Assembles a matrix from per-summand blocks given by `f(p_src, q_src, p_tgt, q_tgt)`.
fn block_from_layout(
    tgt: &[(i32, i32, usize)],
    src: &[(i32, i32, usize)],
    rows: usize,
    cols: usize,
    f: impl Fn(i32, i32, i32, i32) -> Option<Matrix>,
) -> Matrix {
    let mut trip = Vec::new();
    for &(p, q, soff) in src {
        for &(pp, qq, toff) in tgt {
            if let Some(m) = f(p, q, pp, qq) {
                trip.extend(m.entries().map(|(i, j, v)| (toff + i, soff + j, v)));
            }
        }
    }
    Matrix::from_triplets(rows, cols, trip)
}

/// f ⊗ g between the given tensor complexes.
pub fn tensor_map_between(f: &ChainMap, g: &ChainMap, src: Arc<ChainComplex>, tgt: Arc<ChainComplex>) -> ChainMap {
    let (kf, kg) = (f.degree, g.degree);
    let k = kf + kg;
    let (a, b, c, d) = (&f.src, &g.src, &f.tgt, &g.tgt);
    let mut comps = BTreeMap::new();
    if a.len() > 0 && b.len() > 0 {
        for n in src.degrees() {
            let sl = tensor_layout(a, b, n);
            let tl = tensor_layout(c, d, n + k);
            let m = block_from_layout(&tl, &sl, tgt.rank(n + k), src.rank(n), |p, q, pp, qq| {
                (pp == p + kf && qq == q + kg).then(|| f.comp(p).kron(&g.comp(q)).scale(sgn(kg * p)))
            });
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
    }
    ChainMap::new(src, tgt, k, comps).expect("tensor map shapes")
}

pub fn tensor_map(f: &ChainMap, g: &ChainMap) -> ChainMap {
    let src = Arc::new(tensor(&f.src, &g.src));
    let tgt = Arc::new(tensor(&f.tgt, &g.tgt));
    tensor_map_between(f, g, src, tgt)
}

/// Permutation taking the basis of A⊗B (index i·|B| + j) to B⊗A (index j·|A| + i).
fn swap_matrix(ra: usize, rb: usize) -> Matrix {
    Matrix::from_triplets(ra * rb, ra * rb, (0..ra).flat_map(|i| (0..rb).map(move |j| (j * ra + i, i * rb + j, 1))))
}

pub fn flip_between(c: &ChainComplex, d: &ChainComplex, src: Arc<ChainComplex>, tgt: Arc<ChainComplex>) -> ChainMap {
    let mut comps = BTreeMap::new();
    if c.len() > 0 && d.len() > 0 {
        for n in src.degrees() {
            let sl = tensor_layout(c, d, n);
            let tl = tensor_layout(d, c, n);
            let m = block_from_layout(&tl, &sl, tgt.rank(n), src.rank(n), |p, q, qq, pp| {
                (pp == p && qq == q).then(|| {
                    let s = swap_matrix(c.rank(p), d.rank(q)).scale(sgn(p * q));
                    // idempotent-compatible: (p_D ⊗ p_C) ∘ swap = swap ∘ (p_C ⊗ p_D)
                    s.mul(&c.p(p).kron(&d.p(q)))
                })
            });
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
    }
    ChainMap::new(src, tgt, 0, comps).expect("flip shapes")
}

pub fn flip(c: &ChainComplex, d: &ChainComplex) -> ChainMap {
    flip_between(c, d, Arc::new(tensor(c, d)), Arc::new(tensor(d, c)))
}

/// μ_{C,D}: C^{-*} ⊗ D^{-*} → (C⊗D)^{-*}, sign (−1)^{pq} on (C^{-*})_p ⊗ (D^{-*})_q.
pub fn mu_between(c: &ChainComplex, d: &ChainComplex, src: Arc<ChainComplex>, tgt: Arc<ChainComplex>) -> ChainMap {
    let cd = dual_complex(c);
    let dd = dual_complex(d);
    let mut comps = BTreeMap::new();
    if c.len() > 0 && d.len() > 0 {
        for n in src.degrees() {
            let sl = tensor_layout(&cd, &dd, n);
            // (C⊗D)^{-*}_n = ((C⊗D)_{-n})^*, summands C_{-p} ⊗ D_{-q}
            let tl: Vec<(i32, i32, usize)> = tensor_layout(c, d, -n).into_iter().map(|(p, q, o)| (-p, -q, o)).collect();
            let m =
                block_from_layout(&tl, &sl, tgt.rank(n), src.rank(n), |p, q, pp, qq| (pp == p && qq == q).then(|| cd.p(p).kron(&dd.p(q)).scale(sgn(p * q))));
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
    }
    ChainMap::new(src, tgt, 0, comps).expect("mu shapes")
}

pub fn mu(c: &ChainComplex, d: &ChainComplex) -> ChainMap {
    let src = Arc::new(tensor(&dual_complex(c), &dual_complex(d)));
    let tgt = Arc::new(dual_complex(&tensor(c, d)));
    mu_between(c, d, src, tgt)
}

/// Inverse of a map whose components are signed permutations (on the idempotent image).
pub fn signed_perm_inverse(f: &ChainMap) -> Result<ChainMap> {
    if f.degree != 0 {
        return Err(Error::InvalidInput("only degree-0 maps are inverted".into()));
    }
    let mut comps = BTreeMap::new();
    for n in f.src.degrees() {
        let m = f.comp(n);
        let ok = m.is_square() && (0..m.rows()).all(|i| m.row(i).len() <= 1 && m.row(i).iter().all(|&(_, v)| v == 1 || v == -1));
        if !ok {
            return Err(Error::InvalidInput(format!("degree {n} component is not a signed permutation")));
        }
        comps.insert(n, m.transpose());
    }
    let inv = ChainMap::new(f.tgt.clone(), f.src.clone(), 0, comps)?;
    if inv.after(f) != ChainMap::identity(f.src.clone()) || f.after(&inv) != ChainMap::identity(f.tgt.clone()) {
        return Err(Error::InvalidInput("signed permutation does not invert on the retracts".into()));
    }
    Ok(inv)
}

/// Mapping cone of a degree-0 map: cone_n = C_{n−1} ⊕ D_n, d = [[−d, 0], [f, d]].
pub fn cone(f: &ChainMap) -> Result<ChainComplex> {
    if f.degree != 0 {
        return Err(Error::InvalidInput("cone needs a degree-0 map".into()));
    }
    let (c, d) = (&f.src, &f.tgt);
    if c.len() == 0 && d.len() == 0 {
        return Ok(ChainComplex::zero());
    }
    let lo = (c.lo + 1).min(d.lo);
    let hi = (c.hi() + 1).max(d.hi());
    let lo = if c.len() == 0 {
        d.lo
    } else if d.len() == 0 {
        c.lo + 1
    } else {
        lo
    };
    let hi = if c.len() == 0 {
        d.hi()
    } else if d.len() == 0 {
        c.hi() + 1
    } else {
        hi
    };
    let ranks: Vec<usize> = (lo..=hi).map(|n| c.rank(n - 1) + d.rank(n)).collect();
    let diffs = (lo + 1..=hi)
        .map(|n| {
            let rs = [c.rank(n - 2), d.rank(n - 1)];
            let cs = [c.rank(n - 1), d.rank(n)];
            let a = c.d(n - 1).neg();
            let b = f.comp(n - 1);
            let e = d.d(n);
            Matrix::blocks(&rs, &cs, &[(0, 0, &a), (1, 0, &b), (1, 1, &e)])
        })
        .collect();
    let idem = if c.idem.is_some() || d.idem.is_some() { Some((lo..=hi).map(|n| Matrix::block_diag(&[&c.p(n - 1), &d.p(n)])).collect()) } else { None };
    let cc = ChainComplex::from_parts(lo, ranks, diffs, idem, None);
    cc.validate()?;
    Ok(cc)
}

/// C[k]_n = C_{n−k} with differential (−1)^k d.
pub fn shift(c: &ChainComplex, k: i32) -> ChainComplex {
    if c.len() == 0 {
        return ChainComplex::zero();
    }
    let lo = c.lo + k;
    let hi = c.hi() + k;
    let ranks = c.ranks.clone();
    let diffs = (lo + 1..=hi).map(|n| c.d(n - k).scale(sgn(k))).collect();
    ChainComplex::from_parts(lo, ranks, diffs, c.idem.clone(), c.positions.clone())
}

pub fn direct_sum(c: &ChainComplex, d: &ChainComplex) -> ChainComplex {
    if c.len() == 0 {
        return d.clone();
    }
    if d.len() == 0 {
        return c.clone();
    }
    let lo = c.lo.min(d.lo);
    let hi = c.hi().max(d.hi());
    let ranks: Vec<usize> = (lo..=hi).map(|n| c.rank(n) + d.rank(n)).collect();
    let diffs = (lo + 1..=hi).map(|n| Matrix::block_diag(&[&c.d(n), &d.d(n)])).collect();
    let idem = if c.idem.is_some() || d.idem.is_some() { Some((lo..=hi).map(|n| Matrix::block_diag(&[&c.p(n), &d.p(n)])).collect()) } else { None };
    let positions = match (&c.positions, &d.positions) {
        (Some(pc), Some(pd)) if pc.npoints == pd.npoints => Some(Positions {
            npoints: pc.npoints,
            at: (lo..=hi)
                .map(|n| {
                    let mut v = c.positions_in(n).map(|s| s.to_vec()).unwrap_or_default();
                    v.extend(d.positions_in(n).map(|s| s.to_vec()).unwrap_or_default());
                    v
                })
                .collect(),
        }),
        _ => None,
    };
    ChainComplex::from_parts(lo, ranks, diffs, idem, positions)
}
