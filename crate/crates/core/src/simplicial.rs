//! Finite simplicial complexes, barycentric subdivision, the staircase product
//! structure and its unordered-pair quotient, the ambient l¹ metric, and
//! positioned simplicial chain complexes.

use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, ChainMap};
use crate::control::ControlSpace;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational::{qi, Q};

pub type Simplex = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    pub labels: Vec<String>,
    /// All simplices, each a sorted vertex list, closed under faces.
    pub simplices: BTreeSet<Simplex>,
}

fn faces_of(s: &[usize]) -> impl Iterator<Item = Simplex> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        f
    })
}

/// All nonempty subsets of a sorted simplex.
fn all_faces(s: &[usize]) -> Vec<Simplex> {
    let n = s.len();
    (1u32..(1 << n)).map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect()).collect()
}

/// Sign of the permutation sorting `v` (0 if there is a repeat).
pub fn orientation_sign(v: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return 0;
            }
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    s
}

impl SimplicialComplex {
    /// Face closure of the given simplices.
    pub fn from_facets(nv: usize, facets: &[Simplex]) -> Result<SimplicialComplex> {
        let labels = (0..nv).map(|i| format!("v{i}")).collect();
        SimplicialComplex::with_labels(labels, facets)
    }

    pub fn with_labels(labels: Vec<String>, facets: &[Simplex]) -> Result<SimplicialComplex> {
        let mut simplices = BTreeSet::new();
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || s.iter().any(|&v| v >= labels.len()) {
                return Err(Error::InvalidInput(format!("bad simplex {f:?}")));
            }
            simplices.extend(all_faces(&s));
        }
        for v in 0..labels.len() {
            simplices.insert(vec![v]);
        }
        Ok(SimplicialComplex { labels, simplices })
    }

    pub fn point() -> SimplicialComplex {
        SimplicialComplex::from_facets(1, &[vec![0]]).unwrap()
    }

    /// The standard n-simplex.
    pub fn simplex(n: usize) -> SimplicialComplex {
        SimplicialComplex::from_facets(n + 1, &[(0..=n).collect()]).unwrap()
    }

    /// Boundary of a triangle: a circle with three edges.
    pub fn circle() -> SimplicialComplex {
        SimplicialComplex::from_facets(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    /// Path with `n` vertices.
    pub fn path(n: usize) -> SimplicialComplex {
        let facets: Vec<Simplex> = if n == 1 { vec![vec![0]] } else { (0..n - 1).map(|i| vec![i, i + 1]).collect() };
        SimplicialComplex::from_facets(n, &facets).unwrap()
    }

    pub fn nvertices(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> i32 {
        self.simplices.iter().map(|s| s.len() as i32 - 1).max().unwrap_or(-1)
    }

    pub fn of_dim(&self, k: usize) -> Vec<&Simplex> {
        self.simplices.iter().filter(|s| s.len() == k + 1).collect()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.simplices.contains(s)
    }

    pub fn is_face_closed(&self) -> bool {
        self.simplices.iter().all(|s| s.len() == 1 || faces_of(s).all(|f| self.simplices.contains(&f)))
    }

    /// Stable fingerprint for point membership checks.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.labels.len().hash(&mut h);
        self.simplices.hash(&mut h);
        h.finish()
    }

    /// Counts of simplices by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let d = self.dim();
        (0..=d.max(-1)).map(|k| self.of_dim(k as usize).len()).collect()
    }

    /// Vertex images of a simplicial map, if every simplex lands on a simplex.
    pub fn is_simplicial_map(&self, target: &SimplicialComplex, vmap: &[usize]) -> bool {
        self.simplices.iter().all(|s| {
            let mut im: Vec<usize> = s.iter().map(|&v| vmap[v]).collect();
            im.sort_unstable();
            im.dedup();
            target.contains(&im)
        })
    }

    /// Image of a simplex under a vertex map (sorted, deduplicated).
    pub fn image(vmap: &[usize], s: &[usize]) -> Simplex {
        let mut im: Vec<usize> = s.iter().map(|&v| vmap[v]).collect();
        im.sort_unstable();
        im.dedup();
        im
    }
}

/// Point of |Σ| in barycentric coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointInComplex {
    pub complex: u64,
    #[serde(with = "coords_ser")]
    pub coords: BTreeMap<usize, Q>,
}

mod coords_ser {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BTreeMap<usize, Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: BTreeMap<usize, String> = x.iter().map(|(k, q)| (*k, crate::rational::fmt_q(q))).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<usize, Q>, D::Error> {
        let v: BTreeMap<usize, String> = BTreeMap::deserialize(d)?;
        v.into_iter().map(|(k, s)| crate::rational::parse_q(&s).map(|q| (k, q)).ok_or_else(|| serde::de::Error::custom("bad rational"))).collect()
    }
}

impl PointInComplex {
    pub fn new(cx: &SimplicialComplex, coords: BTreeMap<usize, Q>) -> Result<PointInComplex> {
        let coords: BTreeMap<usize, Q> = coords.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coords.values().any(|c| c.is_negative()) || coords.values().sum::<Q>() != qi(1) {
            return Err(Error::InvalidInput("barycentric coordinates must be nonnegative and sum to 1".into()));
        }
        let support: Simplex = coords.keys().copied().collect();
        if !cx.contains(&support) {
            return Err(Error::InvalidInput(format!("support {support:?} is not a simplex")));
        }
        Ok(PointInComplex { complex: cx.fingerprint(), coords })
    }

    pub fn vertex(cx: &SimplicialComplex, v: usize) -> PointInComplex {
        PointInComplex { complex: cx.fingerprint(), coords: [(v, qi(1))].into() }
    }

    /// Barycenter of a simplex.
    pub fn barycenter(cx: &SimplicialComplex, s: &[usize]) -> PointInComplex {
        let w = Q::new(1, s.len() as i128);
        PointInComplex { complex: cx.fingerprint(), coords: s.iter().map(|&v| (v, w)).collect() }
    }

    pub fn support(&self) -> Simplex {
        self.coords.keys().copied().collect()
    }

    /// Vertex with the largest coordinate (smallest id on ties).
    pub fn dominant_vertex(&self) -> usize {
        let mut best = (qi(-1), 0);
        for (&v, &c) in &self.coords {
            if c > best.0 {
                best = (c, v);
            }
        }
        best.1
    }
}

/// Ambient l¹ distance ‖p − q‖₁ of barycentric coordinate vectors.
pub fn l1_distance(p: &PointInComplex, q: &PointInComplex) -> Result<Q> {
    if p.complex != q.complex {
        return Err(Error::DifferentComplex);
    }
    Ok(l1_coords(&p.coords, &q.coords))
}

pub fn l1_coords(p: &BTreeMap<usize, Q>, q: &BTreeMap<usize, Q>) -> Q {
    let keys: BTreeSet<usize> = p.keys().chain(q.keys()).copied().collect();
    keys.into_iter().map(|k| (p.get(&k).copied().unwrap_or_default() - q.get(&k).copied().unwrap_or_default()).abs()).sum()
}

/// True iff the union of the supports is a simplex (the regime where ambient l¹ is exact).
pub fn shares_simplex(cx: &SimplicialComplex, p: &PointInComplex, q: &PointInComplex) -> bool {
    let mut u: Simplex = p.coords.keys().chain(q.coords.keys()).copied().collect();
    u.sort_unstable();
    u.dedup();
    cx.contains(&u)
}

/// First barycentric subdivision. Vertex i of the result is the barycenter of
/// `faces[i]`; simplices are chains of faces ordered by inclusion.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: SimplicialComplex,
    pub faces: Vec<Simplex>,
    pub index: BTreeMap<Simplex, usize>,
}

fn is_face(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && a.iter().all(|v| b.binary_search(v).is_ok())
}

pub fn subdivide(cx: &SimplicialComplex) -> Subdivision {
    // faces sorted by dimension, then lexicographically
    let mut faces: Vec<Simplex> = cx.simplices.iter().cloned().collect();
    faces.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let index: BTreeMap<Simplex, usize> = faces.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    let mut chains: Vec<Simplex> = Vec::new();
    // maximal chains: extend downward from each simplex
    fn grow(faces: &[Simplex], index: &BTreeMap<Simplex, usize>, chain: &mut Vec<usize>, out: &mut Vec<Simplex>) {
        let top = &faces[*chain.last().unwrap()];
        if top.len() == 1 {
            let mut c = chain.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        for f in faces_of(top) {
            chain.push(index[&f]);
            grow(faces, index, chain, out);
            chain.pop();
        }
    }
    for (i, f) in faces.iter().enumerate() {
        let maximal = !faces.iter().any(|g| g.len() == f.len() + 1 && is_face(f, g));
        if maximal {
            grow(&faces, &index, &mut vec![i], &mut chains);
        }
    }
    let labels = faces.iter().map(|f| format!("b{f:?}")).collect();
    let complex = SimplicialComplex::with_labels(labels, &chains).expect("chains are simplices");
    Subdivision { complex, faces, index }
}

/// Staircase product Σ × Σ on Σ¹(0) × Σ¹(0): simplices are chains in the
/// product of the face orders. Vertex (e, f) has index e·|Σ¹(0)| + f.
#[derive(Clone, Debug)]
pub struct ProductStructure {
    pub sub: Subdivision,
    pub complex: SimplicialComplex,
}

impl ProductStructure {
    pub fn nsub(&self) -> usize {
        self.sub.faces.len()
    }

    pub fn pair(&self, v: usize) -> (usize, usize) {
        (v / self.nsub(), v % self.nsub())
    }

    pub fn vertex(&self, e: usize, f: usize) -> usize {
        e * self.nsub() + f
    }

    /// The flip (x, y) ↦ (y, x) on vertices.
    pub fn flip_vertex(&self, v: usize) -> usize {
        let (e, f) = self.pair(v);
        self.vertex(f, e)
    }
}

pub fn product_structure(cx: &SimplicialComplex) -> ProductStructure {
    let sub = subdivide(cx);
    let n = sub.faces.len();
    // maximal chains of the product order: staircases over pairs of maximal chains of Σ¹
    let mut facets: BTreeSet<Simplex> = BTreeSet::new();
    let maxchains: Vec<Vec<usize>> = sub
        .complex
        .simplices
        .iter()
        .filter(|s| !sub.complex.simplices.iter().any(|t| t.len() == s.len() + 1 && is_face(s, t)))
        .map(|s| {
            let mut c = s.clone();
            c.sort_by_key(|&v| sub.faces[v].len());
            c
        })
        .collect();
    for a in &maxchains {
        for b in &maxchains {
            // monotone lattice paths from (0,0) to (|a|-1, |b|-1)
            let (la, lb) = (a.len(), b.len());
            let mut path = vec![(0usize, 0usize)];
            fn walk(a: &[usize], b: &[usize], n: usize, path: &mut Vec<(usize, usize)>, out: &mut BTreeSet<Simplex>) {
                let (i, j) = *path.last().unwrap();
                if i + 1 == a.len() && j + 1 == b.len() {
                    let mut s: Simplex = path.iter().map(|&(i, j)| a[i] * n + b[j]).collect();
                    s.sort_unstable();
                    out.insert(s);
                    return;
                }
                if i + 1 < a.len() {
                    path.push((i + 1, j));
                    walk(a, b, n, path, out);
                    path.pop();
                }
                if j + 1 < b.len() {
                    path.push((i, j + 1));
                    walk(a, b, n, path, out);
                    path.pop();
                }
            }
            let _ = (la, lb);
            walk(a, b, n, &mut path, &mut facets);
        }
    }
    let labels = (0..n * n).map(|v| format!("({},{})", sub.complex.labels[v / n], sub.complex.labels[v % n])).collect();
    let facets: Vec<Simplex> = facets.into_iter().collect();
    let complex = SimplicialComplex::with_labels(labels, &facets).expect("staircases are simplices");
    ProductStructure { sub, complex }
}

/// P₂(Σ): the quotient of the staircase product by the flip, simplices
/// deduplicated by vertex sets. Vertex i is the unordered pair `pairs[i]`.
#[derive(Clone, Debug)]
pub struct P2Structure {
    pub product: ProductStructure,
    pub complex: SimplicialComplex,
    pub pairs: Vec<(usize, usize)>,
    pub index: BTreeMap<(usize, usize), usize>,
}

impl P2Structure {
    /// Quotient vertex of a product vertex.
    pub fn class_of(&self, v: usize) -> usize {
        let (e, f) = self.product.pair(v);
        self.index[&(e.min(f), e.max(f))]
    }
}

pub fn p2_simplicial(cx: &SimplicialComplex) -> P2Structure {
    let product = product_structure(cx);
    let n = product.nsub();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|e| (e..n).map(move |f| (e, f))).collect();
    let index: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let facets: BTreeSet<Simplex> = product
        .complex
        .simplices
        .iter()
        .map(|s| {
            let mut im: Simplex = s
                .iter()
                .map(|&v| {
                    let (e, f) = product.pair(v);
                    index[&(e.min(f), e.max(f))]
                })
                .collect();
            im.sort_unstable();
            im.dedup();
            im
        })
        .collect();
    let labels = pairs.iter().map(|&(e, f)| format!("({}:{})", product.sub.complex.labels[e], product.sub.complex.labels[f])).collect();
    let facets: Vec<Simplex> = facets.into_iter().collect();
    let complex = SimplicialComplex::with_labels(labels, &facets).expect("quotient simplices");
    P2Structure { product, complex, pairs, index }
}

/// Induced vertex maps of a simplicial automorphism on Σ¹, Σ × Σ and P₂(Σ).
pub fn induced_on_subdivision(sub: &Subdivision, vmap: &[usize]) -> Vec<usize> {
    sub.faces.iter().map(|f| sub.index[&SimplicialComplex::image(vmap, f)]).collect()
}

pub fn induced_on_p2(p2: &P2Structure, vmap: &[usize]) -> Vec<usize> {
    let on_sub = induced_on_subdivision(&p2.product.sub, vmap);
    p2.pairs
        .iter()
        .map(|&(e, f)| {
            let (a, b) = (on_sub[e], on_sub[f]);
            p2.index[&(a.min(b), a.max(b))]
        })
        .collect()
}

/// Coordinates of a point of Σ in the barycentric subdivision, as (Σ¹ vertex, weight)
/// listed along the chain in increasing face order.
pub fn to_subdivision(sub: &Subdivision, p: &PointInComplex) -> Vec<(usize, Q)> {
    let mut cs: Vec<(usize, Q)> = p.coords.iter().map(|(&v, &c)| (v, c)).collect();
    // descending coordinate, ties by vertex id
    cs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut out = Vec::new();
    for j in 0..cs.len() {
        let next = cs.get(j + 1).map_or(qi(0), |x| x.1);
        let w = (cs[j].1 - next) * qi(j as i128 + 1);
        if !w.is_zero() {
            let mut face: Simplex = cs[..=j].iter().map(|x| x.0).collect();
            face.sort_unstable();
            out.push((sub.index[&face], w));
        }
    }
    // increasing face order = reverse of construction, which grows faces
    out
}

/// Coordinates of (x, y) in the staircase structure, and of (x : y) in P₂(Σ).
pub fn p2_coords(p2: &P2Structure, x: &PointInComplex, y: &PointInComplex) -> BTreeMap<usize, Q> {
    let sub = &p2.product.sub;
    let a = to_subdivision(sub, x);
    let b = to_subdivision(sub, y);
    // merge the two step functions on [0, 1)
    let mut out: BTreeMap<usize, Q> = BTreeMap::new();
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    loop {
        let w = ra.min(rb);
        let (e, f) = (a[i].0, b[j].0);
        if !w.is_zero() {
            *out.entry(p2.index[&(e.min(f), e.max(f))]).or_insert(qi(0)) += w;
        }
        ra -= w;
        rb -= w;
        if ra.is_zero() {
            i += 1;
            if i == a.len() {
                break;
            }
            ra = a[i].1;
        }
        if rb.is_zero() {
            j += 1;
            if j == b.len() {
                break;
            }
            rb = b[j].1;
        }
    }
    out
}

/// Metric on P₂ induced from the l¹ metric of Σ.
pub fn p2_induced_distance(x: &PointInComplex, y: &PointInComplex, x2: &PointInComplex, y2: &PointInComplex) -> Q {
    let a = l1_coords(&x.coords, &x2.coords) + l1_coords(&y.coords, &y2.coords);
    let b = l1_coords(&x.coords, &y2.coords) + l1_coords(&y.coords, &x2.coords);
    a.min(b)
}

/// Result of the δ search: the chosen δ and the sampled evidence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaReport {
    #[serde(with = "crate::rational::qser")]
    pub delta: Q,
    pub samples: usize,
    /// Worst ambient l¹ distance in P₂(Σ) seen below the chosen δ.
    #[serde(with = "crate::rational::qser")]
    pub worst: Q,
}

/// Random point of |Σ| with denominators ≤ `den`.
pub fn random_point<R: Rng>(rng: &mut R, cx: &SimplicialComplex, den: i128) -> PointInComplex {
    let simplices: Vec<&Simplex> = cx.simplices.iter().collect();
    let s = simplices[rng.gen_range(0..simplices.len())];
    let mut w: Vec<i128> = s.iter().map(|_| rng.gen_range(0..=den)).collect();
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let total: i128 = w.iter().sum();
    let coords = s.iter().zip(&w).filter(|(_, &x)| x > 0).map(|(&v, &x)| (v, Q::new(x, total))).collect();
    PointInComplex { complex: cx.fingerprint(), coords }
}

/// Nudges a point toward a vertex of its closed star within one simplex.
fn perturb<R: Rng>(rng: &mut R, cx: &SimplicialComplex, p: &PointInComplex, den: i128) -> PointInComplex {
    let supp = p.support();
    let cofaces: Vec<&Simplex> = cx.simplices.iter().filter(|t| is_face(&supp, t)).collect();
    let t = cofaces[rng.gen_range(0..cofaces.len())];
    let v = t[rng.gen_range(0..t.len())];
    let s = Q::new(rng.gen_range(0..=den), den * 8);
    let mut coords: BTreeMap<usize, Q> = p.coords.iter().map(|(&k, &c)| (k, c * (qi(1) - s))).collect();
    *coords.entry(v).or_insert(qi(0)) += s;
    coords.retain(|_, c| !c.is_zero());
    PointInComplex { complex: p.complex, coords }
}

/// Largest grid δ such that every sampled pair with d_{P₂(Σ,d¹)} ≤ δ has d¹_{P₂(Σ)} ≤ ε.
pub fn delta_search<R: Rng>(rng: &mut R, cx: &SimplicialComplex, eps: Q, grid: &[Q], samples: usize, budget: usize) -> Result<DeltaReport> {
    if samples > budget {
        return Err(Error::SampleBudgetExceeded(format!("{samples} samples requested, budget {budget}")));
    }
    let p2 = p2_simplicial(cx);
    let mut obs: Vec<(Q, Q)> = Vec::with_capacity(samples);
    for k in 0..samples {
        let x = random_point(rng, cx, 6);
        let y = random_point(rng, cx, 6);
        let (x2, y2) = if k % 2 == 0 { (perturb(rng, cx, &x, 6), perturb(rng, cx, &y, 6)) } else { (random_point(rng, cx, 6), random_point(rng, cx, 6)) };
        let induced = p2_induced_distance(&x, &y, &x2, &y2);
        let ambient = l1_coords(&p2_coords(&p2, &x, &y), &p2_coords(&p2, &x2, &y2));
        obs.push((induced, ambient));
    }
    let mut grid: Vec<Q> = grid.to_vec();
    grid.sort();
    let mut best = qi(0);
    let mut worst = qi(0);
    for &d in &grid {
        let w = obs.iter().filter(|o| o.0 <= d).map(|o| o.1).max().unwrap_or_default();
        if w <= eps {
            best = d;
            worst = w;
        }
    }
    Ok(DeltaReport { delta: best, samples, worst })
}

/// Where each simplex sits in a control space.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Placement {
    /// Point of each vertex.
    pub vertices: Vec<usize>,
    /// Optional explicit points for higher simplices (images of barycenters).
    #[serde(default)]
    pub simplices: BTreeMap<String, usize>,
}

impl Placement {
    pub fn of_vertices(vertices: Vec<usize>) -> Placement {
        Placement { vertices, simplices: BTreeMap::new() }
    }

    fn key(s: &[usize]) -> String {
        s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn with_simplex(mut self, s: &[usize], x: usize) -> Placement {
        self.simplices.insert(Placement::key(s), x);
        self
    }

    /// Position of a simplex: explicit entry, else its least vertex.
    pub fn at(&self, s: &[usize]) -> usize {
        self.simplices.get(&Placement::key(s)).copied().unwrap_or(self.vertices[s[0]])
    }
}

/// Simplicial chain complex in degrees 0..dim, basis = sorted simplices, positioned by `placement`.
pub fn chain_complex_of(cx: &SimplicialComplex, placement: Option<(&Placement, usize)>) -> ChainComplex {
    let d = cx.dim().max(0) as usize;
    let bases: Vec<Vec<&Simplex>> = (0..=d).map(|k| cx.of_dim(k)).collect();
    let idx: Vec<BTreeMap<&Simplex, usize>> = bases.iter().map(|b| b.iter().enumerate().map(|(i, s)| (*s, i)).collect()).collect();
    let ranks: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let diffs = (1..=d)
        .map(|k| {
            let mut trip = Vec::new();
            for (j, s) in bases[k].iter().enumerate() {
                for i in 0..s.len() {
                    let mut f = (*s).clone();
                    f.remove(i);
                    trip.push((idx[k - 1][&f], j, if i % 2 == 0 { 1 } else { -1 }));
                }
            }
            Matrix::from_triplets(ranks[k - 1], ranks[k], trip)
        })
        .collect();
    let c = ChainComplex::new(0, ranks, diffs).expect("simplicial boundary squares to zero");
    match placement {
        Some((pl, npoints)) => {
            let at = bases.iter().map(|b| b.iter().map(|s| pl.at(s)).collect()).collect();
            c.with_positions(npoints, at).expect("placement covers every simplex")
        }
        None => c,
    }
}

/// Largest distance between a simplex and its faces under a placement.
pub fn placement_mesh(cx: &SimplicialComplex, pl: &Placement, space: &ControlSpace) -> Q {
    cx.simplices
        .iter()
        .filter(|s| s.len() > 1)
        .flat_map(|s| faces_of(s).map(move |f| (s.clone(), f)))
        .map(|(s, f)| space.d(pl.at(&s), pl.at(&f)))
        .max()
        .unwrap_or_default()
}

fn basis_index(cx: &SimplicialComplex) -> Vec<BTreeMap<Simplex, usize>> {
    let d = cx.dim().max(0) as usize;
    (0..=d).map(|k| cx.of_dim(k).into_iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect()
}

/// Chain map induced by a simplicial vertex map.
pub fn induced_chain_map(
    src_cx: &SimplicialComplex,
    tgt_cx: &SimplicialComplex,
    vmap: &[usize],
    src: Arc<ChainComplex>,
    tgt: Arc<ChainComplex>,
) -> Result<ChainMap> {
    if !src_cx.is_simplicial_map(tgt_cx, vmap) {
        return Err(Error::InvalidInput("vertex map is not simplicial".into()));
    }
    let si = basis_index(src_cx);
    let ti = basis_index(tgt_cx);
    ChainMap::from_fn(src.clone(), tgt.clone(), 0, |n| {
        let n = n as usize;
        let mut trip = Vec::new();
        for (s, &j) in &si[n] {
            let im: Vec<usize> = s.iter().map(|&v| vmap[v]).collect();
            let sg = orientation_sign(&im);
            if sg != 0 {
                let mut sorted = im.clone();
                sorted.sort_unstable();
                trip.push((ti[n][&sorted], j, sg));
            }
        }
        Matrix::from_triplets(tgt.rank(n as i32), src.rank(n as i32), trip)
    })
}

/// Prism homotopy P(σ) = Σ_i (−1)^i [f(v₀)…f(v_i) g(v_i)…g(v_n)] between contiguous
/// simplicial maps, a homotopy from f_# to g_#.
pub fn prism_homotopy(
    src_cx: &SimplicialComplex,
    tgt_cx: &SimplicialComplex,
    f: &[usize],
    g: &[usize],
    src: Arc<ChainComplex>,
    tgt: Arc<ChainComplex>,
) -> Result<ChainMap> {
    for s in &src_cx.simplices {
        let mut u: Vec<usize> = s.iter().map(|&v| f[v]).chain(s.iter().map(|&v| g[v])).collect();
        u.sort_unstable();
        u.dedup();
        if !tgt_cx.contains(&u) {
            return Err(Error::InvalidInput(format!("maps are not contiguous on {s:?}")));
        }
    }
    let si = basis_index(src_cx);
    let ti = basis_index(tgt_cx);
    ChainMap::from_fn(src.clone(), tgt.clone(), 1, |n| {
        let n = n as usize;
        let mut trip = Vec::new();
        if n + 1 < ti.len() {
            for (s, &j) in &si[n] {
                for i in 0..s.len() {
                    let v: Vec<usize> = s[..=i].iter().map(|&x| f[x]).chain(s[i..].iter().map(|&x| g[x])).collect();
                    let sg = orientation_sign(&v);
                    if sg != 0 {
                        let mut sorted = v.clone();
                        sorted.sort_unstable();
                        let e = if i % 2 == 0 { sg } else { -sg };
                        trip.push((ti[n + 1][&sorted], j, e));
                    }
                }
            }
        }
        Matrix::from_triplets(tgt.rank(n as i32 + 1), src.rank(n as i32), trip)
    })
}
