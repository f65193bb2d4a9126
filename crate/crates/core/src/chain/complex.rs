use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Point labels for the basis of each degree, indexing into a control space with `npoints` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Positions {
    pub npoints: usize,
    /// `at[i][b]`: point of basis element `b` in degree `lo + i`.
    pub at: Vec<Vec<usize>>,
}

/// Bounded chain complex of finitely generated free (or idempotent-completed) ℤ-modules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub lo: i32,
    pub ranks: Vec<usize>,
    /// `diffs[i]`: d at degree `lo + i`, a `rank(lo+i-1) × rank(lo+i)` matrix.
    pub diffs: Vec<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idem: Option<Vec<Matrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Positions>,
}

impl ChainComplex {
    /// `diffs` lists d at degrees `lo+1, …, lo+len-1`.
    pub fn new(lo: i32, ranks: Vec<usize>, diffs: Vec<Matrix>) -> Result<ChainComplex> {
        if !ranks.is_empty() && diffs.len() + 1 != ranks.len() {
            return Err(Error::Shape(format!("{} ranks need {} differentials", ranks.len(), ranks.len() - 1)));
        }
        let mut all = Vec::with_capacity(ranks.len());
        if let Some(&r0) = ranks.first() {
            all.push(Matrix::zeros(0, r0));
        }
        all.extend(diffs);
        let c = ChainComplex { lo, ranks, diffs: all, idem: None, positions: None };
        c.validate()?;
        Ok(c)
    }

    pub fn zero() -> ChainComplex {
        ChainComplex { lo: 0, ranks: Vec::new(), diffs: Vec::new(), idem: None, positions: None }
    }

    /// ℤ in degree `n`.
    pub fn point_at(n: i32) -> ChainComplex {
        ChainComplex { lo: n, ranks: vec![1], diffs: vec![Matrix::zeros(0, 1)], idem: None, positions: None }
    }

    pub fn point() -> ChainComplex {
        ChainComplex::point_at(0)
    }

    /// A single module of rank `r` in degree `n`.
    pub fn concentrated(n: i32, r: usize) -> ChainComplex {
        ChainComplex { lo: n, ranks: vec![r], diffs: vec![Matrix::zeros(0, r)], idem: None, positions: None }
    }

    pub fn with_idempotents(mut self, idem: Vec<Matrix>) -> Result<ChainComplex> {
        self.idem = Some(idem);
        self.validate()?;
        Ok(self)
    }

    pub fn with_positions(mut self, npoints: usize, at: Vec<Vec<usize>>) -> Result<ChainComplex> {
        self.positions = Some(Positions { npoints, at });
        self.validate()?;
        Ok(self)
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.ranks.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    fn idx(&self, n: i32) -> Option<usize> {
        if n < self.lo || n > self.hi() {
            None
        } else {
            Some((n - self.lo) as usize)
        }
    }

    pub fn rank(&self, n: i32) -> usize {
        self.idx(n).map_or(0, |i| self.ranks[i])
    }

    /// d: C_n → C_{n-1}; zero outside the stored range.
    pub fn d(&self, n: i32) -> Matrix {
        match self.idx(n) {
            Some(i) if n > self.lo => self.diffs[i].clone(),
            _ => Matrix::zeros(self.rank(n - 1), self.rank(n)),
        }
    }

    pub fn d_ref(&self, n: i32) -> Option<&Matrix> {
        match self.idx(n) {
            Some(i) if n > self.lo => Some(&self.diffs[i]),
            _ => None,
        }
    }

    /// Idempotent in degree n (identity for free modules).
    pub fn p(&self, n: i32) -> Matrix {
        match (&self.idem, self.idx(n)) {
            (Some(v), Some(i)) => v[i].clone(),
            _ => Matrix::identity(self.rank(n)),
        }
    }

    pub fn has_idempotents(&self) -> bool {
        self.idem.is_some()
    }

    pub fn position(&self, n: i32, b: usize) -> Option<usize> {
        let i = self.idx(n)?;
        self.positions.as_ref().map(|p| p.at[i][b])
    }

    pub fn positions_in(&self, n: i32) -> Option<&[usize]> {
        let i = self.idx(n)?;
        self.positions.as_ref().map(|p| p.at[i].as_slice())
    }

    pub fn npoints(&self) -> Option<usize> {
        self.positions.as_ref().map(|p| p.npoints)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Alternating rank sum (idempotent ranks for projective pieces).
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees()
            .map(|n| {
                let r = if self.idem.is_some() { self.p(n).trace() } else { self.rank(n) as i64 };
                if n.rem_euclid(2) == 0 {
                    r
                } else {
                    -r
                }
            })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.diffs.len() != self.ranks.len() {
            return Err(Error::Shape("one differential slot per degree".into()));
        }
        for n in self.degrees() {
            let i = (n - self.lo) as usize;
            let want = (self.rank(n - 1), self.rank(n));
            if self.diffs[i].shape() != want {
                return Err(Error::Shape(format!("d_{n} has shape {:?}, want {want:?}", self.diffs[i].shape())));
            }
            if n > self.lo && n - 1 > self.lo {
                if !self.diffs[i - 1].mul(&self.diffs[i]).is_zero() {
                    return Err(Error::InvalidInput(format!("d_{} ∘ d_{n} ≠ 0", n - 1)));
                }
            }
        }
        if let Some(idem) = &self.idem {
            if idem.len() != self.ranks.len() {
                return Err(Error::Shape("one idempotent per degree".into()));
            }
            for n in self.degrees() {
                let p = &idem[(n - self.lo) as usize];
                if p.shape() != (self.rank(n), self.rank(n)) || !p.is_idempotent() {
                    return Err(Error::IdempotentFailure(format!("degree {n} idempotent is not p² = p")));
                }
                if n > self.lo {
                    let d = self.d(n);
                    let q = self.p(n - 1);
                    if q.mul(&d).mul(p) != d {
                        return Err(Error::IdempotentFailure(format!("d_{n} is not a morphism of the retracts")));
                    }
                }
            }
        }
        if let Some(pos) = &self.positions {
            if pos.at.len() != self.ranks.len() || pos.at.iter().zip(&self.ranks).any(|(v, &r)| v.len() != r || v.iter().any(|&x| x >= pos.npoints)) {
                return Err(Error::Shape("positions must label every basis element with a valid point".into()));
            }
        }
        Ok(())
    }

    /// Same modules and positions, new differentials (used internally by constructions).
    pub(crate) fn from_parts(lo: i32, ranks: Vec<usize>, diffs: Vec<Matrix>, idem: Option<Vec<Matrix>>, positions: Option<Positions>) -> ChainComplex {
        let mut all = diffs;
        if all.len() + 1 == ranks.len() {
            all.insert(0, Matrix::zeros(0, ranks[0]));
        }
        ChainComplex { lo, ranks, diffs: all, idem, positions }
    }

    /// Drops zero modules at both ends.
    pub fn trimmed(&self) -> ChainComplex {
        let first = self.ranks.iter().position(|&r| r > 0);
        let Some(first) = first else { return ChainComplex::zero() };
        let last = self.ranks.iter().rposition(|&r| r > 0).unwrap();
        let lo = self.lo + first as i32;
        let ranks = self.ranks[first..=last].to_vec();
        let diffs = (lo + 1..=lo + ranks.len() as i32 - 1).map(|n| self.d(n)).collect();
        let idem = self.idem.as_ref().map(|v| v[first..=last].to_vec());
        let positions = self.positions.as_ref().map(|p| Positions { npoints: p.npoints, at: p.at[first..=last].to_vec() });
        ChainComplex::from_parts(lo, ranks, diffs, idem, positions)
    }

    /// Same complex over the range `[lo, hi]` (padding with zero modules).
    pub fn padded(&self, lo: i32, hi: i32) -> ChainComplex {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi());
        let ranks: Vec<usize> = (lo..=hi).map(|n| self.rank(n)).collect();
        let diffs = (lo + 1..=hi).map(|n| self.d(n)).collect();
        let idem = self.idem.as_ref().map(|_| (lo..=hi).map(|n| self.p(n)).collect());
        let positions = self
            .positions
            .as_ref()
            .map(|p| Positions { npoints: p.npoints, at: (lo..=hi).map(|n| self.positions_in(n).map(|s| s.to_vec()).unwrap_or_default()).collect() });
        ChainComplex::from_parts(lo, ranks, diffs, idem, positions)
    }

    /// Same modules, idempotents forgotten.
    pub fn underlying_free(&self) -> ChainComplex {
        let mut c = self.clone();
        c.idem = None;
        c
    }

    pub fn without_positions(&self) -> ChainComplex {
        let mut c = self.clone();
        c.positions = None;
        c
    }

    /// Relabels positions through a point map into a space with `npoints` points.
    pub fn relabel(&self, npoints: usize, f: impl Fn(usize) -> usize) -> Result<ChainComplex> {
        let pos = self.positions.as_ref().ok_or_else(|| Error::InvalidInput("complex carries no positions".into()))?;
        let at = pos.at.iter().map(|v| v.iter().map(|&x| f(x)).collect()).collect();
        let mut c = self.clone();
        c.positions = Some(Positions { npoints, at });
        c.validate()?;
        Ok(c)
    }
}

/// A graded map C → D of degree k; `comps[n]`: C_n → D_{n+k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub src: Arc<ChainComplex>,
    pub tgt: Arc<ChainComplex>,
    pub degree: i32,
    comps: BTreeMap<i32, Matrix>,
}

impl ChainMap {
    pub fn new(src: Arc<ChainComplex>, tgt: Arc<ChainComplex>, degree: i32, comps: BTreeMap<i32, Matrix>) -> Result<ChainMap> {
        for (&n, m) in &comps {
            let want = (tgt.rank(n + degree), src.rank(n));
            if m.shape() != want {
                return Err(Error::Shape(format!("component at degree {n} has shape {:?}, want {want:?}", m.shape())));
            }
        }
        let comps = comps.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(ChainMap { src, tgt, degree, comps })
    }

    pub fn zero(src: Arc<ChainComplex>, tgt: Arc<ChainComplex>, degree: i32) -> ChainMap {
        ChainMap { src, tgt, degree, comps: BTreeMap::new() }
    }

    /// Identity of C: the idempotent in each degree.
    pub fn identity(c: Arc<ChainComplex>) -> ChainMap {
        let comps = c.degrees().map(|n| (n, c.p(n))).filter(|(_, m)| !m.is_zero()).collect();
        ChainMap { src: c.clone(), tgt: c, degree: 0, comps }
    }

    /// Builds a map from a component function over all source degrees.
    pub fn from_fn(src: Arc<ChainComplex>, tgt: Arc<ChainComplex>, degree: i32, mut f: impl FnMut(i32) -> Matrix) -> Result<ChainMap> {
        let comps = src.degrees().map(|n| (n, f(n))).collect();
        ChainMap::new(src, tgt, degree, comps)
    }

    pub fn comp(&self, n: i32) -> Matrix {
        self.comps.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(self.tgt.rank(n + self.degree), self.src.rank(n)))
    }

    pub fn comps(&self) -> &BTreeMap<i32, Matrix> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn same_ends(&self, o: &ChainMap) -> bool {
        self.degree == o.degree && (Arc::ptr_eq(&self.src, &o.src) || self.src == o.src) && (Arc::ptr_eq(&self.tgt, &o.tgt) || self.tgt == o.tgt)
    }

    pub fn add(&self, o: &ChainMap) -> ChainMap {
        assert!(self.same_ends(o), "add: maps have different endpoints or degrees");
        let mut comps = self.comps.clone();
        for (&n, m) in &o.comps {
            let v = match comps.get(&n) {
                Some(a) => a.add(m),
                None => m.clone(),
            };
            comps.insert(n, v);
        }
        comps.retain(|_, m| !m.is_zero());
        ChainMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree, comps }
    }

    pub fn sub(&self, o: &ChainMap) -> ChainMap {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> ChainMap {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> ChainMap {
        let comps = self.comps.iter().map(|(&n, m)| (n, m.scale(c))).filter(|(_, m)| !m.is_zero()).collect();
        ChainMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree, comps }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &ChainMap) -> ChainMap {
        assert!(Arc::ptr_eq(&f.tgt, &self.src) || *f.tgt == *self.src, "compose: target of the first map is not the source of the second");
        let mut comps = BTreeMap::new();
        for (&n, m) in &f.comps {
            if let Some(g) = self.comps.get(&(n + f.degree)) {
                let c = g.mul(m);
                if !c.is_zero() {
                    comps.insert(n, c);
                }
            }
        }
        ChainMap { src: f.src.clone(), tgt: self.tgt.clone(), degree: self.degree + f.degree, comps }
    }

    /// Reinterprets the map between complexes with identical modules.
    pub fn with_ends(&self, src: Arc<ChainComplex>, tgt: Arc<ChainComplex>) -> Result<ChainMap> {
        ChainMap::new(src, tgt, self.degree, self.comps.clone())
    }

    /// `d∘f − (−1)^k f∘d`, zero iff f is a chain map.
    pub fn commutator_with_d(&self) -> ChainMap {
        let k = self.degree;
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        let lo = self.src.lo.min(self.tgt.lo - k) - 1;
        let hi = self.src.hi().max(self.tgt.hi() - k) + 1;
        let mut comps = BTreeMap::new();
        for n in lo..=hi {
            // C_n → D_{n+k-1}
            let a = self.tgt.d(n + k).mul(&self.comp(n));
            let b = self.comp(n - 1).mul(&self.src.d(n)).scale(sign);
            let c = a.sub(&b);
            if !c.is_zero() {
                comps.insert(n, c);
            }
        }
        ChainMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: k - 1, comps }
    }

    /// Graded commutator [d, H] = dH − (−1)^{|H|} H d for a homotopy-degree map.
    pub fn d_commutator(&self) -> ChainMap {
        self.commutator_with_d()
    }

    pub fn is_chain_map(&self) -> bool {
        self.commutator_with_d().is_zero()
    }

    /// q f p = f in every degree.
    pub fn respects_idempotents(&self) -> bool {
        self.comps.iter().all(|(&n, m)| self.tgt.p(n + self.degree).mul(m).mul(&self.src.p(n)) == *m)
    }

    pub fn check(&self) -> Result<()> {
        if !self.is_chain_map() {
            return Err(Error::InvalidInput("map does not commute with the differentials".into()));
        }
        if !self.respects_idempotents() {
            return Err(Error::IdempotentFailure("map is not a morphism of the retracts".into()));
        }
        Ok(())
    }

    /// Support pairs (target point, source point) of nonzero entries, when both ends carry positions.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = std::collections::BTreeSet::new();
        for (&n, m) in &self.comps {
            let (Some(tp), Some(sp)) = (self.tgt.positions_in(n + self.degree), self.src.positions_in(n)) else {
                continue;
            };
            for (i, j, _) in m.entries() {
                out.insert((tp[i], sp[j]));
            }
        }
        out.into_iter().collect()
    }
}

/// A homotopy H from `source` to `target` (maps of degree k) with [d, H] = target − source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainHomotopy {
    pub source: ChainMap,
    pub target: ChainMap,
    pub h: ChainMap,
}

impl ChainHomotopy {
    pub fn new(source: ChainMap, target: ChainMap, h: ChainMap) -> Result<ChainHomotopy> {
        let hty = ChainHomotopy { source, target, h };
        hty.verify()?;
        Ok(hty)
    }

    pub fn defect(&self) -> ChainMap {
        homotopy_defect(&self.h, &self.source, &self.target)
    }

    pub fn verify(&self) -> Result<()> {
        if self.h.degree != self.source.degree + 1 || self.source.degree != self.target.degree {
            return Err(Error::ConventionMismatch("homotopy degree must be one more than the maps".into()));
        }
        if !self.defect().is_zero() {
            return Err(Error::ConventionMismatch("dH + Hd ≠ target − source".into()));
        }
        Ok(())
    }
}

/// [d, H] − (g − f); zero iff H is a homotopy from f to g.
pub fn homotopy_defect(h: &ChainMap, f: &ChainMap, g: &ChainMap) -> ChainMap {
    let lhs = h.d_commutator();
    let rhs = g.sub(f);
    let mut comps = BTreeMap::new();
    let lo = lhs.comps.keys().chain(rhs.comps.keys()).min().copied();
    let hi = lhs.comps.keys().chain(rhs.comps.keys()).max().copied();
    if let (Some(lo), Some(hi)) = (lo, hi) {
        for n in lo..=hi {
            let c = lhs.comp(n).sub(&rhs.comp(n));
            if !c.is_zero() {
                comps.insert(n, c);
            }
        }
    }
    ChainMap { src: f.src.clone(), tgt: f.tgt.clone(), degree: f.degree, comps }
}

pub fn is_homotopy(h: &ChainMap, f: &ChainMap, g: &ChainMap) -> bool {
    homotopy_defect(h, f, g).is_zero()
}

/// Homotopy-equivalence data f: C → D, g: D → C, h: g∘f → id_C, k: f∘g → id_D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub f: ChainMap,
    pub g: ChainMap,
    pub h: ChainMap,
    pub k: ChainMap,
}

impl Equivalence {
    pub fn verify(&self) -> Result<()> {
        self.f.check()?;
        self.g.check()?;
        let idc = ChainMap::identity(self.f.src.clone());
        let idd = ChainMap::identity(self.f.tgt.clone());
        if !is_homotopy(&self.h, &self.g.after(&self.f), &idc) {
            return Err(Error::NotAnEquivalence("h is not a homotopy g∘f → id".into()));
        }
        if !is_homotopy(&self.k, &self.f.after(&self.g), &idd) {
            return Err(Error::NotAnEquivalence("k is not a homotopy f∘g → id".into()));
        }
        Ok(())
    }

    pub fn identity(c: Arc<ChainComplex>) -> Equivalence {
        let id = ChainMap::identity(c.clone());
        let z = ChainMap::zero(c.clone(), c, 1);
        Equivalence { f: id.clone(), g: id, h: z.clone(), k: z }
    }

    /// `other ∘ self`: C → D → E.
    pub fn then(&self, other: &Equivalence) -> Equivalence {
        let f = other.f.after(&self.f);
        let g = self.g.after(&other.g);
        // g₁ h₂ f₁ + h₁ : g₁g₂f₂f₁ → id
        let h = self.g.after(&other.h).after(&self.f).add(&self.h);
        // f₂ k₁ g₂ + k₂ : f₂f₁g₁g₂ → id
        let k = other.f.after(&self.k).after(&other.g).add(&other.k);
        Equivalence { f, g, h, k }
    }

    pub fn inverse(&self) -> Equivalence {
        Equivalence { f: self.g.clone(), g: self.f.clone(), h: self.k.clone(), k: self.h.clone() }
    }
}
