//! Geometric modules over G × Z, support and (ε, S)-control, equivariant
//! morphisms as letter-indexed data, and pushforwards along maps of spaces.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::groups::{Elem, FiniteSubset, GroupBackend};
use crate::matrix::Matrix;
use crate::rational::{qi, Q};

/// Finite metric space with exact rational distances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlSpace {
    pub names: Vec<String>,
    #[serde(with = "crate::rational::qmat")]
    pub dist: Vec<Vec<Q>>,
}

impl ControlSpace {
    pub fn new(names: Vec<String>, dist: Vec<Vec<Q>>) -> Result<ControlSpace> {
        let s = ControlSpace { names, dist };
        s.validate()?;
        Ok(s)
    }

    /// Points 0..n on a line at unit spacing.
    pub fn line(n: usize) -> ControlSpace {
        let dist = (0..n).map(|i| (0..n).map(|j| qi((i as i128 - j as i128).abs())).collect()).collect();
        ControlSpace { names: (0..n).map(|i| format!("x{i}")).collect(), dist }
    }

    pub fn point() -> ControlSpace {
        ControlSpace::line(1)
    }

    /// Points with rational coordinates under the l¹ norm.
    pub fn l1_points(coords: &[Vec<Q>]) -> ControlSpace {
        let dist = coords.iter().map(|a| coords.iter().map(|b| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()).collect()).collect();
        ControlSpace { names: (0..coords.len()).map(|i| format!("x{i}")).collect(), dist }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn d(&self, x: usize, y: usize) -> Q {
        self.dist[x][y]
    }

    pub fn diameter(&self) -> Q {
        self.dist.iter().flatten().copied().max().unwrap_or_default()
    }

    /// Metric axioms on every pair and triple.
    pub fn validate(&self) -> Result<()> {
        let n = self.dist.len();
        if self.names.len() != n || self.dist.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("distance matrix must be square and match the point list".into()));
        }
        for x in 0..n {
            if self.dist[x][x] != qi(0) {
                return Err(Error::InvalidInput(format!("d({x},{x}) ≠ 0")));
            }
            for y in 0..n {
                let v = self.dist[x][y];
                if v < qi(0) || v != self.dist[y][x] {
                    return Err(Error::InvalidInput(format!("d({x},{y}) is negative or asymmetric")));
                }
                if x != y && v == qi(0) {
                    return Err(Error::InvalidInput(format!("distinct points {x}, {y} at distance 0")));
                }
                for z in 0..n {
                    if self.dist[x][z] > v + self.dist[y][z] {
                        return Err(Error::InvalidInput(format!("triangle inequality fails on ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// X × Y with the sum metric; point (x, y) has index x·|Y| + y.
    pub fn product(&self, other: &ControlSpace) -> ControlSpace {
        let (n, m) = (self.len(), other.len());
        let mut names = Vec::with_capacity(n * m);
        let mut dist = vec![vec![qi(0); n * m]; n * m];
        for x in 0..n {
            for y in 0..m {
                names.push(format!("({},{})", self.names[x], other.names[y]));
                for x2 in 0..n {
                    for y2 in 0..m {
                        dist[x * m + y][x2 * m + y2] = self.dist[x][x2] + other.dist[y][y2];
                    }
                }
            }
        }
        ControlSpace { names, dist }
    }

    /// Scales every distance.
    pub fn scaled(&self, c: Q) -> ControlSpace {
        ControlSpace { names: self.names.clone(), dist: self.dist.iter().map(|r| r.iter().map(|v| v * c).collect()).collect() }
    }
}

/// A map of control spaces given on points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMap {
    pub images: Vec<usize>,
    pub target_len: usize,
}

impl PointMap {
    pub fn new(images: Vec<usize>, target_len: usize) -> Result<PointMap> {
        if images.iter().any(|&y| y >= target_len) {
            return Err(Error::InvalidInput("point map leaves its target".into()));
        }
        Ok(PointMap { images, target_len })
    }

    pub fn identity(n: usize) -> PointMap {
        PointMap { images: (0..n).collect(), target_len: n }
    }

    pub fn to_point(n: usize) -> PointMap {
        PointMap { images: vec![0; n], target_len: 1 }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PointMap) -> PointMap {
        PointMap { images: self.images.iter().map(|&x| other.images[x]).collect(), target_len: other.target_len }
    }
}

/// Basis elements placed at positions (g, z) of G × Z.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricModule {
    pub basis: Vec<(Elem, usize)>,
}

impl GeometricModule {
    pub fn new(basis: Vec<(Elem, usize)>) -> GeometricModule {
        GeometricModule { basis }
    }

    /// Positions with multiplicities `(g, z, rank)` in basis order.
    pub fn from_ranks(entries: &[(Elem, usize, usize)]) -> GeometricModule {
        let basis = entries.iter().flat_map(|(g, z, r)| std::iter::repeat((g.clone(), *z)).take(*r)).collect();
        GeometricModule { basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Rank at each occupied position.
    pub fn ranks(&self) -> BTreeMap<(Elem, usize), usize> {
        let mut out = BTreeMap::new();
        for p in &self.basis {
            *out.entry(p.clone()).or_insert(0) += 1;
        }
        out
    }

    pub fn translate(&self, group: &GroupBackend, k: &Elem) -> GeometricModule {
        GeometricModule { basis: self.basis.iter().map(|(g, z)| (group.mul(k, g), *z)).collect() }
    }
}

/// Support pair: (target position, source position).
pub type SupportPair = ((Elem, usize), (Elem, usize));

/// Morphism of geometric modules as a matrix over the basis positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlledMorphism {
    pub src: GeometricModule,
    pub tgt: GeometricModule,
    pub matrix: Matrix,
}

/// Measured control: the largest Z-displacement and the set of G-letters used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlCertificate {
    #[serde(with = "crate::rational::qser")]
    pub epsilon: Q,
    pub letters: FiniteSubset,
}

impl ControlledMorphism {
    pub fn new(src: GeometricModule, tgt: GeometricModule, matrix: Matrix) -> Result<ControlledMorphism> {
        if matrix.shape() != (tgt.rank(), src.rank()) {
            return Err(Error::Shape(format!("matrix {:?} does not fit modules {}→{}", matrix.shape(), src.rank(), tgt.rank())));
        }
        Ok(ControlledMorphism { src, tgt, matrix })
    }

    pub fn identity(m: &GeometricModule) -> ControlledMorphism {
        ControlledMorphism { src: m.clone(), tgt: m.clone(), matrix: Matrix::identity(m.rank()) }
    }

    pub fn support(&self) -> BTreeSet<SupportPair> {
        self.matrix.entries().map(|(i, j, _)| (self.tgt.basis[i].clone(), self.src.basis[j].clone())).collect()
    }

    /// Blocks grouped by (target position, source position).
    pub fn blocks(&self) -> BTreeMap<SupportPair, Vec<(usize, usize, i64)>> {
        let mut out: BTreeMap<SupportPair, Vec<(usize, usize, i64)>> = BTreeMap::new();
        for (i, j, v) in self.matrix.entries() {
            out.entry((self.tgt.basis[i].clone(), self.src.basis[j].clone())).or_default().push((i, j, v));
        }
        out
    }

    pub fn certificate(&self, group: &GroupBackend, space: &ControlSpace) -> ControlCertificate {
        let mut eps = qi(0);
        let mut letters = Vec::new();
        for ((g, z), (g2, z2)) in self.support() {
            eps = eps.max(space.d(z, z2));
            letters.push(group.quot(&g, &g2));
        }
        ControlCertificate { epsilon: eps, letters: FiniteSubset::new(letters) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ControlledMorphism) -> Result<ControlledMorphism> {
        if other.tgt != self.src {
            return Err(Error::Shape("composition: modules do not match".into()));
        }
        Ok(ControlledMorphism { src: other.src.clone(), tgt: self.tgt.clone(), matrix: self.matrix.mul(&other.matrix) })
    }

    /// Transpose morphism between the same modules in reverse.
    pub fn dual(&self) -> ControlledMorphism {
        ControlledMorphism { src: self.tgt.clone(), tgt: self.src.clone(), matrix: self.matrix.transpose() }
    }

    /// Relabels Z-positions along `f`; blocks landing on a common image are summed as a direct sum.
    pub fn pushforward(&self, f: &PointMap) -> ControlledMorphism {
        let push = |m: &GeometricModule| GeometricModule { basis: m.basis.iter().map(|(g, z)| (g.clone(), f.apply(*z))).collect() };
        ControlledMorphism { src: push(&self.src), tgt: push(&self.tgt), matrix: self.matrix.clone() }
    }
}

/// True iff every support pair has d(z, z′) ≤ ε and g⁻¹g′ ∈ S.
pub fn check_control(phi: &ControlledMorphism, eps: Q, s: &FiniteSubset, group: &GroupBackend, space: &ControlSpace) -> bool {
    phi.support().iter().all(|((g, z), (g2, z2))| space.d(*z, *z2) <= eps && s.contains(&group.quot(g, g2)))
}

/// ε-control only.
pub fn check_epsilon(phi: &ControlledMorphism, eps: Q, space: &ControlSpace) -> bool {
    phi.support().iter().all(|((_, z), (_, z2))| space.d(*z, *z2) <= eps)
}

/// Largest displacement of a positioned chain map in the control space.
pub fn chain_map_epsilon(f: &ChainMap, space: &ControlSpace) -> Q {
    f.support().into_iter().map(|(x, y)| space.d(x, y)).max().unwrap_or_default()
}

/// Largest distance bridged by a nonzero entry of the differential of a positioned complex.
pub fn differential_epsilon(c: &ChainComplex, space: &ControlSpace) -> Q {
    let mut best = Q::default();
    for n in c.degrees() {
        let (Some(tp), Some(sp)) = (c.positions_in(n - 1), c.positions_in(n)) else { continue };
        for (i, j, _) in c.d(n).entries() {
            best = best.max(space.d(tp[i], sp[j]));
        }
    }
    best
}

/// Equivariant morphism stored on a fundamental domain: `letters[a]` maps the
/// source basis at (g′, ·) to the target basis at (g, ·) whenever g⁻¹g′ = a.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantMorphism {
    /// Z-positions of the source basis.
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub letters: BTreeMap<Elem, Matrix>,
}

impl EquivariantMorphism {
    pub fn new(src: Vec<usize>, tgt: Vec<usize>, letters: BTreeMap<Elem, Matrix>) -> Result<EquivariantMorphism> {
        for (a, m) in &letters {
            if m.shape() != (tgt.len(), src.len()) {
                return Err(Error::Shape(format!("letter {a:?} block has shape {:?}", m.shape())));
            }
        }
        let letters = letters.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(EquivariantMorphism { src, tgt, letters })
    }

    pub fn identity(group: &GroupBackend, pos: Vec<usize>) -> EquivariantMorphism {
        let n = pos.len();
        let letters = if n == 0 { BTreeMap::new() } else { [(group.identity(), Matrix::identity(n))].into() };
        EquivariantMorphism { src: pos.clone(), tgt: pos, letters }
    }

    pub fn zero(src: Vec<usize>, tgt: Vec<usize>) -> EquivariantMorphism {
        EquivariantMorphism { src, tgt, letters: BTreeMap::new() }
    }

    pub fn letter(&self, a: &Elem) -> Matrix {
        self.letters.get(a).cloned().unwrap_or_else(|| Matrix::zeros(self.tgt.len(), self.src.len()))
    }

    pub fn support_letters(&self) -> FiniteSubset {
        FiniteSubset::new(self.letters.keys().cloned().collect())
    }

    pub fn add(&self, o: &EquivariantMorphism) -> EquivariantMorphism {
        let mut letters = self.letters.clone();
        for (a, m) in &o.letters {
            let v = letters.get(a).map_or_else(|| m.clone(), |x| x.add(m));
            letters.insert(a.clone(), v);
        }
        letters.retain(|_, m| !m.is_zero());
        EquivariantMorphism { src: self.src.clone(), tgt: self.tgt.clone(), letters }
    }

    pub fn neg(&self) -> EquivariantMorphism {
        EquivariantMorphism { src: self.src.clone(), tgt: self.tgt.clone(), letters: self.letters.iter().map(|(a, m)| (a.clone(), m.neg())).collect() }
    }

    /// α*: (α*)_a = (α_{a⁻¹})ᵀ.
    pub fn star(&self, group: &GroupBackend) -> EquivariantMorphism {
        let letters = self.letters.iter().map(|(a, m)| (group.inv(a), m.transpose())).collect();
        EquivariantMorphism { src: self.tgt.clone(), tgt: self.src.clone(), letters }
    }

    /// Max Z-displacement over all letter blocks.
    pub fn epsilon(&self, space: &ControlSpace) -> Q {
        self.letters.values().flat_map(|m| m.entries().map(|(i, j, _)| space.d(self.tgt[i], self.src[j])).collect::<Vec<_>>()).max().unwrap_or_default()
    }

    pub fn check_control(&self, eps: Q, s: &FiniteSubset, space: &ControlSpace) -> bool {
        self.support_letters().is_subset(s) && self.epsilon(space) <= eps
    }

    /// Explicit morphism over the positions `ball × fundamental domain`, rows and
    /// columns ordered by ball element then basis index.
    pub fn expand(&self, group: &GroupBackend, ball: &FiniteSubset) -> ControlledMorphism {
        let src = GeometricModule { basis: ball.elements.iter().flat_map(|g| self.src.iter().map(move |&z| (g.clone(), z))).collect() };
        let tgt = GeometricModule { basis: ball.elements.iter().flat_map(|g| self.tgt.iter().map(move |&z| (g.clone(), z))).collect() };
        let (ns, nt) = (self.src.len(), self.tgt.len());
        let mut trip = Vec::new();
        for (gi, g) in ball.elements.iter().enumerate() {
            for (hi, h) in ball.elements.iter().enumerate() {
                if let Some(m) = self.letters.get(&group.quot(g, h)) {
                    trip.extend(m.entries().map(|(i, j, v)| (gi * nt + i, hi * ns + j, v)));
                }
            }
        }
        let matrix = Matrix::from_triplets(tgt.rank(), src.rank(), trip);
        ControlledMorphism { src, tgt, matrix }
    }

    /// Σ_a χ(a) ψ_a for a ±1-valued character.
    pub fn specialize(&self, chi: impl Fn(&Elem) -> i64) -> Matrix {
        self.letters.iter().fold(Matrix::zeros(self.tgt.len(), self.src.len()), |acc, (a, m)| acc.add(&m.scale(chi(a))))
    }
}

/// (ψ′ ψ)_c = Σ_{ab = c} ψ′_a ψ_b; with a ball, every product must stay inside it.
pub fn convolve(group: &GroupBackend, psi2: &EquivariantMorphism, psi: &EquivariantMorphism, ball: Option<&FiniteSubset>) -> Result<EquivariantMorphism> {
    if psi.tgt != psi2.src {
        return Err(Error::Shape("convolution: modules do not match".into()));
    }
    let mut letters: BTreeMap<Elem, Matrix> = BTreeMap::new();
    for (a, ma) in &psi2.letters {
        for (b, mb) in &psi.letters {
            let c = group.mul(a, b);
            if let Some(ball) = ball {
                if !ball.contains(&c) {
                    return Err(Error::HorizonExceeded(format!("product {} leaves the configured ball", group.name(&c))));
                }
            }
            let p = ma.mul(mb);
            let v = letters.get(&c).map_or_else(|| p.clone(), |x| x.add(&p));
            letters.insert(c, v);
        }
    }
    letters.retain(|_, m| !m.is_zero());
    Ok(EquivariantMorphism { src: psi.src.clone(), tgt: psi2.tgt.clone(), letters })
}
