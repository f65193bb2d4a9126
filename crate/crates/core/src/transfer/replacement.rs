//! Replacing a finitely dominated complex by a finite projective one.
//!
//! Input: i: C → D, r: D → C and h with dh + hd = id − r∘i, D in degrees
//! 0..N. The staircase complex C′_m = ⊕_{j ≤ min(m,N)} D_j has the
//! differential c′ below; it stabilizes above N with c′_{m+1} = id − c′_m,
//! and P is C′ cut at N with the idempotent id − c′_{N+1} on top.

use std::sync::Arc;

use crate::chain::{is_homotopy, ChainComplex, ChainMap};
use crate::control::{chain_map_epsilon, differential_epsilon, ControlSpace};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational::{fmt_q, qi, Q};

#[derive(Clone, Debug)]
pub struct Replacement {
    pub n: i32,
    /// C′ in degrees 0..M with M = max(top of C, N) + 2.
    pub cprime: Arc<ChainComplex>,
    pub p: Arc<ChainComplex>,
    pub fprime: ChainMap,
    pub gprime: ChainMap,
    pub kprime: ChainMap,
    /// Homotopy u∘v → id on C′ (the negative of the displayed l′).
    pub lprime: ChainMap,
    pub u: ChainMap,
    pub v: ChainMap,
    /// f: C → P, g: P → C, k: f∘g → id, l: g∘f → id.
    pub f: ChainMap,
    pub g: ChainMap,
    pub k: ChainMap,
    pub l: ChainMap,
    /// Largest distance bridged by P's differential and idempotent, when positioned.
    pub epsilon: Option<Q>,
}

fn sgn(e: i32) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

struct Staircase<'a> {
    c: &'a ChainComplex,
    d: &'a ChainComplex,
    i: &'a ChainMap,
    r: &'a ChainMap,
    h: &'a ChainMap,
    n: i32,
}

impl Staircase<'_> {
    fn off(&self, j: i32) -> usize {
        (0..j).map(|t| self.d.rank(t)).sum()
    }

    fn rank(&self, m: i32) -> usize {
        if m < 0 {
            0
        } else {
            self.off(m.min(self.n) + 1)
        }
    }

    /// h_{k−1} ∘ … ∘ h_j: C_j → C_k.
    fn hchain(&self, k: i32, j: i32) -> Matrix {
        (j..k).fold(Matrix::identity(self.c.rank(j)), |acc, t| self.h.comp(t).mul(&acc))
    }

    fn ir(&self, j: i32) -> Matrix {
        self.i.comp(j).mul(&self.r.comp(j))
    }

    /// c′_m: C′_m → C′_{m−1}.
    fn diff(&self, m: i32) -> Matrix {
        let mut trip = Vec::new();
        let mut put = |k: i32, j: i32, b: Matrix| {
            let (ro, co) = (self.off(k), self.off(j));
            trip.extend(b.entries().map(|(x, y, v)| (ro + x, co + y, v)));
        };
        for j in 0..=m.min(self.n) {
            for k in 0..=(m - 1).min(self.n) {
                let dj = self.d.rank(j);
                if j == k + 1 {
                    put(k, j, self.d.d(j).scale(sgn(m + k + 1)));
                } else if j == k && (j - m).rem_euclid(2) == 0 {
                    put(k, j, self.ir(j));
                } else if j == k {
                    put(k, j, Matrix::identity(dj).sub(&self.ir(j)));
                } else if j < k {
                    put(k, j, self.i.comp(k).mul(&self.hchain(k, j)).mul(&self.r.comp(j)).scale(sgn(m + k)));
                }
            }
        }
        Matrix::from_triplets(self.rank(m - 1), self.rank(m), trip)
    }
}

/// Builds P with f, g, k, l and verifies every identity exactly. With a
/// control space and the input control ε, P must be (N+2)ε-controlled.
pub fn finite_replacement(
    c: &Arc<ChainComplex>,
    d: &Arc<ChainComplex>,
    i: &ChainMap,
    r: &ChainMap,
    h: &ChainMap,
    control: Option<(&ControlSpace, Q)>,
) -> Result<Replacement> {
    if c.has_idempotents() || d.has_idempotents() {
        return Err(Error::InvalidInput("C and D must be free".into()));
    }
    if d.len() == 0 || d.lo < 0 || (c.len() > 0 && c.lo < 0) {
        return Err(Error::InvalidInput("C and D must live in degrees ≥ 0 and D must be nonzero".into()));
    }
    let ends = |m: &ChainMap, s: &Arc<ChainComplex>, t: &Arc<ChainComplex>, k: i32| m.degree == k && *m.src == **s && *m.tgt == **t;
    if !ends(i, c, d, 0) || !ends(r, d, c, 0) || !ends(h, c, c, 1) {
        return Err(Error::Shape("expected i: C → D, r: D → C and h: C → C of degree 1".into()));
    }
    if !i.is_chain_map() || !r.is_chain_map() {
        return Err(Error::HypothesisViolation("i and r must be chain maps".into()));
    }
    if !is_homotopy(h, &r.after(i), &ChainMap::identity(c.clone())) {
        return Err(Error::HypothesisViolation("dh + hd ≠ id − r∘i".into()));
    }
    let n = d.hi();
    let top = if c.len() == 0 { n } else { c.hi().max(n) } + 2;
    let st = Staircase { c, d, i, r, h, n };

    // tail: c′_m idempotent and c′_{m+1} = id − c′_m above N
    for m in n + 1..=top + 1 {
        let cm = st.diff(m);
        if cm.mul(&cm) != cm {
            return Err(Error::IdempotentFailure(format!("c′_{m} ∘ c′_{m} ≠ c′_{m}")));
        }
        if st.diff(m + 1) != Matrix::identity(cm.rows()).sub(&cm) {
            return Err(Error::IdempotentFailure(format!("c′_{} ≠ id − c′_{m}", m + 1)));
        }
    }

    let ranks: Vec<usize> = (0..=top).map(|m| st.rank(m)).collect();
    let diffs: Vec<Matrix> = (1..=top).map(|m| st.diff(m)).collect();
    let mut cprime = ChainComplex::new(0, ranks, diffs).map_err(|e| Error::IdentityFailure(format!("c′ ∘ c′ ≠ 0: {e}")))?;
    let positioned = match (&c.positions, &d.positions) {
        (Some(pc), Some(pd)) if pc.npoints == pd.npoints => Some(pd.npoints),
        _ => None,
    };
    let stair_pos = |m: i32| -> Vec<usize> { (0..=m.min(n)).flat_map(|j| d.positions_in(j).unwrap().to_vec()).collect() };
    if let Some(np) = positioned {
        cprime = cprime.with_positions(np, (0..=top).map(stair_pos).collect())?;
    }
    let cprime = Arc::new(cprime);

    // P: C′ in degrees 0..N, idempotent id − c′_{N+1} on top
    let proj = Matrix::identity(st.rank(n)).sub(&st.diff(n + 1));
    let pranks: Vec<usize> = (0..=n).map(|m| st.rank(m)).collect();
    let pdiffs: Vec<Matrix> = (1..=n).map(|m| if m == n { st.diff(m).mul(&proj) } else { st.diff(m) }).collect();
    let idem: Vec<Matrix> = (0..=n).map(|m| if m == n { proj.clone() } else { Matrix::identity(st.rank(m)) }).collect();
    let mut p = ChainComplex::new(0, pranks, pdiffs)?.with_idempotents(idem)?;
    if let Some(np) = positioned {
        p = p.with_positions(np, (0..=n).map(stair_pos).collect())?;
    }
    let p = Arc::new(p);

    let fprime = ChainMap::from_fn(c.clone(), cprime.clone(), 0, |m| {
        let mut out = Matrix::zeros(st.rank(m), c.rank(m));
        if m <= n {
            let b = i.comp(m);
            let o = st.off(m);
            out = Matrix::from_triplets(st.rank(m), c.rank(m), b.entries().map(|(x, y, v)| (o + x, y, v)));
        }
        out
    })?;
    let gprime = ChainMap::from_fn(cprime.clone(), c.clone(), 0, |m| {
        let mut trip = Vec::new();
        for j in 0..=m.min(n) {
            let b = st.hchain(m, j).mul(&r.comp(j));
            let o = st.off(j);
            trip.extend(b.entries().map(|(x, y, v)| (x, o + y, v)));
        }
        Matrix::from_triplets(c.rank(m), st.rank(m), trip)
    })?;
    let kprime = ChainMap::from_fn(cprime.clone(), cprime.clone(), 1, |m| {
        let k = st.rank(m);
        Matrix::from_triplets(cprime.rank(m + 1), k, (0..k).filter(|_| m < top).map(|x| (x, x, 1)))
    })?;
    let cn1 = st.diff(n + 1);
    let lprime = ChainMap::from_fn(cprime.clone(), cprime.clone(), 1, |m| {
        if m < n || m >= top {
            Matrix::zeros(cprime.rank(m + 1), cprime.rank(m))
        } else if (m - n).rem_euclid(2) == 0 {
            cn1.neg()
        } else {
            cn1.sub(&Matrix::identity(cn1.rows()))
        }
    })?;
    let u = ChainMap::from_fn(p.clone(), cprime.clone(), 0, |m| p.p(m))?;
    let v = ChainMap::from_fn(cprime.clone(), p.clone(), 0, |m| if m <= n { p.p(m) } else { Matrix::zeros(0, cprime.rank(m)) })?;

    let f = v.after(&fprime);
    let g = gprime.after(&u);
    let k = v.after(&kprime).after(&u);
    let l = h.sub(&gprime.after(&lprime).after(&fprime));

    let rep = Replacement { n, cprime, p, fprime, gprime, kprime, lprime, u, v, f, g, k, l, epsilon: None };
    let failures = rep.identity_failures(i, r);
    if !failures.is_empty() {
        return Err(Error::IdentityFailure(failures.join("; ")));
    }
    let mut rep = rep;
    if positioned.is_some() {
        if let Some((space, eps)) = control {
            let measured = differential_epsilon(&rep.p, space).max(chain_map_epsilon(&ChainMap::identity(rep.p.clone()), space));
            let bound = eps * qi(n as i128 + 2);
            if measured > bound {
                return Err(Error::ControlViolation(format!("P is {}-controlled, bound (N+2)ε = {}", fmt_q(&measured), fmt_q(&bound))));
            }
            rep.epsilon = Some(measured);
        }
    }
    Ok(rep)
}

impl Replacement {
    /// Restricts a map on C′ (or into it) to degrees below the truncation.
    fn below_top(&self, m: &ChainMap) -> ChainMap {
        let top = self.cprime.hi();
        let comps = m.comps().iter().filter(|(&d, _)| d < top - 1).map(|(&d, x)| (d, x.clone())).collect();
        ChainMap::new(m.src.clone(), m.tgt.clone(), m.degree, comps).expect("same shapes")
    }

    /// Names of the identities that fail; empty when all hold.
    pub fn identity_failures(&self, i: &ChainMap, r: &ChainMap) -> Vec<String> {
        let mut out = Vec::new();
        let mut want = |ok: bool, name: &str| {
            if !ok {
                out.push(name.to_string());
            }
        };
        let idp = ChainMap::identity(self.p.clone());
        let idc = ChainMap::identity(self.f.src.clone());
        let idcp = ChainMap::identity(self.cprime.clone());
        want(self.fprime.is_chain_map(), "f′ is a chain map");
        want(self.gprime.is_chain_map(), "g′ is a chain map");
        want(self.gprime.after(&self.fprime) == r.after(i), "g′∘f′ = r∘i");
        let kdef = self.kprime.commutator_with_d().sub(&idcp.sub(&self.fprime.after(&self.gprime)));
        want(self.below_top(&kdef).is_zero(), "dk′ + k′d = id − f′∘g′");
        let ldef = self.lprime.commutator_with_d().sub(&self.u.after(&self.v).sub(&idcp));
        want(self.below_top(&ldef).is_zero(), "dl′ + l′d = u∘v − id");
        want(self.u.check().is_ok() && self.v.check().is_ok(), "u, v are chain maps");
        want(self.v.after(&self.u) == idp, "v∘u = id");
        want(self.f.check().is_ok() && self.g.check().is_ok(), "f, g are chain maps");
        want(is_homotopy(&self.k, &self.f.after(&self.g), &idp), "dk + kd = id − f∘g");
        want(is_homotopy(&self.l, &self.g.after(&self.f), &idc), "dl + ld = id − g∘f");
        out
    }
}
