//! Random complexes, chain maps and homotopy equivalences with known structure.
//!
//! Every complex is Q·(⊕ elementary pieces)·Q⁻¹ for unimodular Q, so
//! automorphisms, contractions and equivalences can be written down exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::chain::{ChainComplex, ChainMap, Equivalence};
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    /// ℤ in degree `deg` with zero differential.
    Cell { deg: i32 },
    /// ℤ →[m] ℤ from degree `deg` to `deg − 1`.
    Arrow { deg: i32, m: i64 },
}

/// A complex together with its elementary decomposition.
#[derive(Clone, Debug)]
pub struct Built {
    pub complex: Arc<ChainComplex>,
    pub pieces: Vec<Piece>,
    /// `(Q_n, Q_n⁻¹)` per degree.
    pub q: BTreeMap<i32, (Matrix, Matrix)>,
    /// Basis index of each piece's generator(s) in the elementary sum: `(top, bottom)`.
    slots: Vec<(usize, Option<usize>)>,
}

#[derive(Clone, Copy, Debug)]
pub struct ComplexShape {
    pub max_len: usize,
    pub max_rank: usize,
    pub lo_range: (i32, i32),
    pub max_mult: i64,
}

impl Default for ComplexShape {
    fn default() -> Self {
        ComplexShape { max_len: 4, max_rank: 4, lo_range: (-2, 2), max_mult: 3 }
    }
}

/// Random unimodular matrix and its inverse, built from elementary moves.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize, moves: usize) -> (Matrix, Matrix) {
    let mut q = Matrix::identity(n);
    let mut qi = Matrix::identity(n);
    if n == 0 {
        return (q, qi);
    }
    for _ in 0..moves {
        let i = rng.gen_range(0..n);
        if n > 1 && rng.gen_bool(0.8) {
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = if rng.gen_bool(0.5) { 1 } else { -1 };
            let e = Matrix::identity(n).add(&Matrix::from_triplets(n, n, [(i, j, c)]));
            let ei = Matrix::identity(n).add(&Matrix::from_triplets(n, n, [(i, j, -c)]));
            q = e.mul(&q);
            qi = qi.mul(&ei);
        } else {
            let e = Matrix::identity(n).add(&Matrix::from_triplets(n, n, [(i, i, -2)]));
            q = e.mul(&q);
            qi = qi.mul(&e);
        }
    }
    (q, qi)
}

fn ranks_of(pieces: &[Piece], n: i32) -> usize {
    pieces
        .iter()
        .map(|p| match *p {
            Piece::Cell { deg } => (deg == n) as usize,
            Piece::Arrow { deg, .. } => (deg == n) as usize + (deg - 1 == n) as usize,
        })
        .sum()
}

impl Built {
    /// Assembles Q·(⊕ pieces)·Q⁻¹ over `[lo, hi]`.
    pub fn assemble<R: Rng>(rng: &mut R, lo: i32, hi: i32, pieces: Vec<Piece>, moves: usize) -> Built {
        let mut counters: BTreeMap<i32, usize> = BTreeMap::new();
        let mut slots = Vec::new();
        for p in &pieces {
            match *p {
                Piece::Cell { deg } => {
                    let c = counters.entry(deg).or_insert(0);
                    slots.push((*c, None));
                    *c += 1;
                }
                Piece::Arrow { deg, .. } => {
                    let t = *counters.entry(deg).or_insert(0);
                    *counters.get_mut(&deg).unwrap() += 1;
                    let b = *counters.entry(deg - 1).or_insert(0);
                    *counters.get_mut(&(deg - 1)).unwrap() += 1;
                    slots.push((t, Some(b)));
                }
            }
        }
        let ranks: Vec<usize> = (lo..=hi).map(|n| ranks_of(&pieces, n)).collect();
        let q: BTreeMap<i32, (Matrix, Matrix)> = (lo - 1..=hi + 1).map(|n| (n, unimodular(rng, ranks_of(&pieces, n), moves))).collect();
        let mut diffs = Vec::new();
        for n in lo + 1..=hi {
            let mut trip = Vec::new();
            for (p, &(t, b)) in pieces.iter().zip(&slots) {
                if let Piece::Arrow { deg, m } = *p {
                    if deg == n {
                        trip.push((b.unwrap(), t, m));
                    }
                }
            }
            let e = Matrix::from_triplets(ranks_of(&pieces, n - 1), ranks_of(&pieces, n), trip);
            diffs.push(q[&(n - 1)].0.mul(&e).mul(&q[&n].1));
        }
        let complex = Arc::new(ChainComplex::new(lo, ranks, diffs).expect("elementary sums are complexes"));
        Built { complex, pieces, q, slots }
    }

    fn qn(&self, n: i32) -> Matrix {
        self.q.get(&n).map(|x| x.0.clone()).unwrap_or_else(|| Matrix::identity(self.complex.rank(n)))
    }

    fn qin(&self, n: i32) -> Matrix {
        self.q.get(&n).map(|x| x.1.clone()).unwrap_or_else(|| Matrix::identity(self.complex.rank(n)))
    }

    /// Q·diag(signs)·Q⁻¹ with one sign per piece.
    pub fn sign_automorphism(&self, signs: &[i64]) -> ChainMap {
        let c = self.complex.clone();
        ChainMap::from_fn(c.clone(), c.clone(), 0, |n| {
            let mut trip = Vec::new();
            for ((p, &(t, b)), &s) in self.pieces.iter().zip(&self.slots).zip(signs) {
                match *p {
                    Piece::Cell { deg } if deg == n => trip.push((t, t, s)),
                    Piece::Arrow { deg, .. } if deg == n => trip.push((t, t, s)),
                    Piece::Arrow { deg, .. } if deg - 1 == n => trip.push((b.unwrap(), b.unwrap(), s)),
                    _ => {}
                }
            }
            let r = c.rank(n);
            self.qn(n).mul(&Matrix::from_triplets(r, r, trip)).mul(&self.qin(n))
        })
        .unwrap()
    }

    /// Contraction of the acyclic part: Q·σ·Q⁻¹ with σ inverting unit arrows.
    /// Returns None if some arrow has multiplier other than ±1 or a cell is present.
    pub fn contraction(&self) -> Option<ChainMap> {
        if self.pieces.iter().any(|p| matches!(p, Piece::Cell { .. } | Piece::Arrow { m: 2.., .. } | Piece::Arrow { m: ..=-2, .. })) {
            return None;
        }
        let c = self.complex.clone();
        Some(
            ChainMap::from_fn(c.clone(), c.clone(), 1, |n| {
                let mut trip = Vec::new();
                for (p, &(t, b)) in self.pieces.iter().zip(&self.slots) {
                    if let Piece::Arrow { deg, m } = *p {
                        if deg - 1 == n {
                            trip.push((t, b.unwrap(), m));
                        }
                    }
                }
                let e = Matrix::from_triplets(c.rank(n + 1), c.rank(n), trip);
                self.qn(n + 1).mul(&e).mul(&self.qin(n))
            })
            .unwrap(),
        )
    }
}

/// Random bounded complex with ranks ≤ `max_rank` and length ≤ `max_len`.
pub fn random_built<R: Rng>(rng: &mut R, shape: ComplexShape) -> Built {
    let lo = rng.gen_range(shape.lo_range.0..=shape.lo_range.1);
    let len = rng.gen_range(1..=shape.max_len) as i32;
    let hi = lo + len - 1;
    let mut pieces = Vec::new();
    let attempts = rng.gen_range(1..=3 * len as usize + 2);
    for _ in 0..attempts {
        let deg = rng.gen_range(lo..=hi);
        let p = if deg > lo && rng.gen_bool(0.5) {
            let m = rng.gen_range(1..=shape.max_mult) * if rng.gen_bool(0.5) { 1 } else { -1 };
            Piece::Arrow { deg, m }
        } else {
            Piece::Cell { deg }
        };
        let mut trial = pieces.clone();
        trial.push(p);
        if (lo..=hi).all(|n| ranks_of(&trial, n) <= shape.max_rank) {
            pieces = trial;
        }
    }
    Built::assemble(rng, lo, hi, pieces, 6)
}

pub fn random_complex<R: Rng>(rng: &mut R, shape: ComplexShape) -> Arc<ChainComplex> {
    random_built(rng, shape).complex
}

/// Random degree-`k` graded map with small entries (not a chain map).
pub fn random_graded<R: Rng>(rng: &mut R, src: &Arc<ChainComplex>, tgt: &Arc<ChainComplex>, k: i32, density: f64) -> ChainMap {
    ChainMap::from_fn(src.clone(), tgt.clone(), k, |n| {
        let (r, c) = (tgt.rank(n + k), src.rank(n));
        let mut trip = Vec::new();
        for i in 0..r {
            for j in 0..c {
                if rng.gen_bool(density) {
                    trip.push((i, j, rng.gen_range(-2..=2)));
                }
            }
        }
        Matrix::from_triplets(r, c, trip)
    })
    .unwrap()
}

/// Random chain map of degree `k`: Q_D·F·Q_C⁻¹ for a piece-respecting F, plus a
/// null-homotopic term [d, t].
pub fn random_chain_map<R: Rng>(rng: &mut R, a: &Built, b: &Built, k: i32) -> ChainMap {
    let (src, tgt) = (&a.complex, &b.complex);
    let mut blocks: BTreeMap<i32, Vec<(usize, usize, i64)>> = BTreeMap::new();
    for (pa, &(ta, ba)) in a.pieces.iter().zip(&a.slots) {
        for (pb, &(tb, bb)) in b.pieces.iter().zip(&b.slots) {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let c = rng.gen_range(-2..=2);
            match (*pa, *pb) {
                (Piece::Cell { deg: da }, Piece::Cell { deg: db }) if db == da + k => {
                    blocks.entry(da).or_default().push((tb, ta, c));
                }
                (Piece::Arrow { deg: da, m: ma }, Piece::Arrow { deg: db, m: mb }) if db == da + k && ma == mb => {
                    blocks.entry(da).or_default().push((tb, ta, c));
                    let s = if k.rem_euclid(2) == 0 { c } else { -c };
                    blocks.entry(da - 1).or_default().push((bb.unwrap(), ba.unwrap(), s));
                }
                _ => {}
            }
        }
    }
    let core = ChainMap::from_fn(src.clone(), tgt.clone(), k, |n| {
        let e = Matrix::from_triplets(tgt.rank(n + k), src.rank(n), blocks.get(&n).cloned().unwrap_or_default());
        b.qn(n + k).mul(&e).mul(&a.qin(n))
    })
    .unwrap();
    let t = random_graded(rng, src, tgt, k + 1, 0.3);
    core.add(&t.commutator_with_d())
}

/// Random homotopy equivalence C → D, where D = Q(C ⊕ E) for contractible E,
/// perturbed by null-homotopic terms.
pub fn random_equivalence<R: Rng>(rng: &mut R, c: &Built) -> (Built, Equivalence) {
    let cc = &c.complex;
    let (lo, hi) = (cc.lo, cc.hi());
    let mut e_pieces = Vec::new();
    let extra = rng.gen_range(0..=2);
    for _ in 0..extra {
        let deg = rng.gen_range(lo..=hi + 1);
        e_pieces.push(Piece::Arrow { deg, m: if rng.gen_bool(0.5) { 1 } else { -1 } });
    }
    let dlo = lo.min(e_pieces.iter().map(|p| if let Piece::Arrow { deg, .. } = p { deg - 1 } else { lo }).min().unwrap_or(lo));
    let dhi = hi.max(e_pieces.iter().map(|p| if let Piece::Arrow { deg, .. } = p { *deg } else { hi }).max().unwrap_or(hi));
    // D's pieces: C's pieces first, then E's; Q_D = Q' · (Q_C ⊕ 1)
    let mut pieces = c.pieces.clone();
    pieces.extend(e_pieces.iter().copied());
    let raw = Built::assemble(rng, dlo, dhi, pieces, 6);
    // Fold Q_C into Q_D so that the C block of D is C itself.
    let mut q = BTreeMap::new();
    for n in dlo - 1..=dhi + 1 {
        let rc = cc.rank(n);
        let rd = ranks_of(&raw.pieces, n);
        let (qd, qdi) = raw.q.get(&n).cloned().unwrap_or_else(|| (Matrix::identity(rd), Matrix::identity(rd)));
        // basis of the elementary sum of D lists C's pieces in C's slot order within each degree
        let perm = slot_embedding(c, &raw, n);
        let qc = c.qn(n);
        let qci = c.qin(n);
        let emb = perm_embed(&perm, rd, &qc, rc);
        let embi = perm_embed(&perm, rd, &qci, rc);
        q.insert(n, (qd.mul(&emb), embi.mul(&qdi)));
    }
    let d = Built::from_q(dlo, dhi, raw.pieces.clone(), raw.slots.clone(), q);
    let dd = d.complex.clone();
    // i = Q_D ∘ incl ∘ Q_C⁻¹, r = Q_C ∘ proj ∘ Q_D⁻¹ in elementary coordinates
    let incl = |n: i32| -> Matrix {
        let perm = slot_embedding(c, &d, n);
        Matrix::from_triplets(dd.rank(n), cc.rank(n), perm.iter().enumerate().map(|(j, &i)| (i, j, 1)))
    };
    let i = ChainMap::from_fn(cc.clone(), dd.clone(), 0, |n| d.qn(n).mul(&incl(n)).mul(&c.qin(n))).unwrap();
    let r = ChainMap::from_fn(dd.clone(), cc.clone(), 0, |n| c.qn(n).mul(&incl(n).transpose()).mul(&d.qin(n))).unwrap();
    let k = ChainMap::from_fn(dd.clone(), dd.clone(), 1, |n| {
        let mut trip = Vec::new();
        for (idx, (p, &(t, b))) in d.pieces.iter().zip(&d.slots).enumerate() {
            if idx < c.pieces.len() {
                continue;
            }
            if let Piece::Arrow { deg, m } = *p {
                if deg - 1 == n {
                    trip.push((t, b.unwrap(), m));
                }
            }
        }
        let e = Matrix::from_triplets(dd.rank(n + 1), dd.rank(n), trip);
        d.qn(n + 1).mul(&e).mul(&d.qin(n))
    })
    .unwrap();
    let s = random_graded(rng, &dd, cc, 1, 0.25);
    let t = random_graded(rng, cc, &dd, 1, 0.25);
    let dt = t.commutator_with_d();
    let ds = s.commutator_with_d();
    let f = i.add(&dt);
    let g = r.add(&ds);
    let h = s.after(&i).add(&r.after(&t)).add(&s.after(&dt)).neg();
    let k = k.sub(&i.after(&s)).sub(&t.after(&r)).sub(&t.after(&ds));
    (d, Equivalence { f, g, h, k })
}

/// Positions, in D's elementary basis at degree n, of C's elementary basis vectors.
fn slot_embedding(c: &Built, d: &Built, n: i32) -> Vec<usize> {
    let mut out = vec![0; c.complex.rank(n)];
    for (idx, p) in c.pieces.iter().enumerate() {
        let (tc, bc) = c.slots[idx];
        let (td, bd) = d.slots[idx];
        match *p {
            Piece::Cell { deg } | Piece::Arrow { deg, .. } if deg == n => out[tc] = td,
            Piece::Arrow { deg, .. } if deg - 1 == n => out[bc.unwrap()] = bd.unwrap(),
            _ => {}
        }
    }
    out
}

/// Identity on D's elementary basis except on the C block, where it acts by `m`.
fn perm_embed(perm: &[usize], rd: usize, m: &Matrix, _rc: usize) -> Matrix {
    let inside: std::collections::BTreeSet<usize> = perm.iter().copied().collect();
    let mut trip: Vec<(usize, usize, i64)> = (0..rd).filter(|i| !inside.contains(i)).map(|i| (i, i, 1)).collect();
    for (i, j, v) in m.entries() {
        trip.push((perm[i], perm[j], v));
    }
    Matrix::from_triplets(rd, rd, trip)
}

impl Built {
    fn from_q(lo: i32, hi: i32, pieces: Vec<Piece>, slots: Vec<(usize, Option<usize>)>, q: BTreeMap<i32, (Matrix, Matrix)>) -> Built {
        let ranks: Vec<usize> = (lo..=hi).map(|n| ranks_of(&pieces, n)).collect();
        let diffs = (lo + 1..=hi)
            .map(|n| {
                let mut trip = Vec::new();
                for (p, &(t, b)) in pieces.iter().zip(&slots) {
                    if let Piece::Arrow { deg, m } = *p {
                        if deg == n {
                            trip.push((b.unwrap(), t, m));
                        }
                    }
                }
                let e = Matrix::from_triplets(ranks_of(&pieces, n - 1), ranks_of(&pieces, n), trip);
                q[&(n - 1)].0.mul(&e).mul(&q[&n].1)
            })
            .collect();
        let complex = Arc::new(ChainComplex::new(lo, ranks, diffs).expect("elementary sums are complexes"));
        Built { complex, pieces, q, slots }
    }
}

/// Random automorphism of a built complex by sign flips on pieces, with trivial homotopies.
pub fn random_sign_equivalence<R: Rng>(rng: &mut R, c: &Built) -> Equivalence {
    let signs: Vec<i64> = c.pieces.iter().map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    let a = c.sign_automorphism(&signs);
    let z = ChainMap::zero(c.complex.clone(), c.complex.clone(), 1);
    Equivalence { f: a.clone(), g: a, h: z.clone(), k: z }
}

/// Random projective complex with zero differential: C_n = (ℤ^r, p_n) for random idempotents.
pub fn random_projective<R: Rng>(rng: &mut R, lo: i32, len: usize, max_rank: usize) -> ChainComplex {
    let ranks: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=max_rank)).collect();
    let diffs = ranks.windows(2).map(|w| Matrix::zeros(w[0], w[1])).collect();
    let idem = ranks
        .iter()
        .map(|&r| {
            let (q, qi) = unimodular(rng, r, 4);
            let k = rng.gen_range(0..=r);
            let diag = Matrix::from_triplets(r, r, (0..k).map(|i| (i, i, 1)));
            q.mul(&diag).mul(&qi)
        })
        .collect();
    ChainComplex::new(lo, ranks, diffs).unwrap().with_idempotents(idem).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_equivalences_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let c = random_built(&mut rng, ComplexShape::default());
            let (_, eq) = random_equivalence(&mut rng, &c);
            eq.verify().unwrap();
        }
    }

    #[test]
    fn generated_chain_maps_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in -1..=1 {
            for _ in 0..20 {
                let a = random_built(&mut rng, ComplexShape::default());
                let b = random_built(&mut rng, ComplexShape::default());
                assert!(random_chain_map(&mut rng, &a, &b, k).is_chain_map());
            }
        }
    }

    #[test]
    fn sign_automorphisms_square_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_built(&mut rng, ComplexShape::default());
        let eq = random_sign_equivalence(&mut rng, &c);
        eq.verify().unwrap();
        assert_eq!(eq.f.after(&eq.f), ChainMap::identity(c.complex.clone()));
    }

    #[test]
    fn unit_arrow_sums_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let b = Built::assemble(&mut rng, 0, 2, vec![Piece::Arrow { deg: 1, m: 1 }, Piece::Arrow { deg: 2, m: -1 }], 5);
        let s = b.contraction().unwrap();
        let id = ChainMap::identity(b.complex.clone());
        assert!(crate::chain::is_homotopy(&s, &ChainMap::zero(b.complex.clone(), b.complex.clone(), 0), &id));
    }
}
