//! Computable group backends: finite multiplication tables, free abelian
//! groups and free groups, with word balls and family predicates.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A group element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Elem {
    /// Index into a finite multiplication table.
    Table(usize),
    /// Vector in ℤ^r.
    Vector(Vec<i64>),
    /// Freely reduced word; letter `k > 0` is generator `k-1`, `-k` its inverse.
    Word(Vec<i32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    FiniteTable { mul: Vec<Vec<usize>>, names: Vec<String> },
    FreeAbelian { rank: usize },
    Free { rank: usize },
}

/// Ball radius and size limits. Horizons are configuration, not constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub radius: usize,
    pub cap: usize,
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon { radius: 12, cap: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupBackend {
    pub kind: GroupKind,
    #[serde(skip)]
    inverses: Vec<usize>,
}

impl GroupBackend {
    pub fn finite_table(mul: Vec<Vec<usize>>, names: Vec<String>) -> Result<GroupBackend> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidInput("multiplication table must be square with entries < order".into()));
        }
        if (0..n).any(|i| mul[0][i] != i || mul[i][0] != i) {
            return Err(Error::InvalidInput("element 0 must be the identity".into()));
        }
        let mut inverses = vec![usize::MAX; n];
        for i in 0..n {
            let Some(j) = (0..n).find(|&j| mul[i][j] == 0) else {
                return Err(Error::InvalidInput(format!("element {i} has no inverse")));
            };
            if mul[j][i] != 0 {
                return Err(Error::InvalidInput(format!("element {i} has no two-sided inverse")));
            }
            inverses[i] = j;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::InvalidInput(format!("not associative on ({a},{b},{c})")));
                    }
                }
            }
        }
        let names = if names.len() == n { names } else { (0..n).map(|i| format!("g{i}")).collect() };
        Ok(GroupBackend { kind: GroupKind::FiniteTable { mul, names }, inverses })
    }

    pub fn trivial() -> GroupBackend {
        GroupBackend::cyclic(1)
    }

    pub fn cyclic(n: usize) -> GroupBackend {
        let mul = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let names = (0..n).map(|i| if i == 0 { "e".to_string() } else { format!("t^{i}") }).collect();
        GroupBackend::finite_table(mul, names).expect("cyclic table")
    }

    /// Dihedral group of order 2n; element `i + n·j` is `r^i s^j`.
    pub fn dihedral(n: usize) -> GroupBackend {
        let ord = 2 * n;
        let idx = |i: usize, j: usize| (i % n) + n * j;
        let mut mul = vec![vec![0; ord]; ord];
        for a in 0..ord {
            let (i1, j1) = (a % n, a / n);
            for b in 0..ord {
                let (i2, j2) = (b % n, b / n);
                // r^i1 s^j1 r^i2 s^j2 = r^(i1 ± i2) s^(j1+j2)
                let i = if j1 == 0 { i1 + i2 } else { i1 + n - i2 };
                mul[a][b] = idx(i, (j1 + j2) % 2);
            }
        }
        let names = (0..ord)
            .map(|a| match (a % n, a / n) {
                (0, 0) => "e".to_string(),
                (i, 0) => format!("r^{i}"),
                (0, _) => "s".to_string(),
                (i, _) => format!("r^{i}s"),
            })
            .collect();
        GroupBackend::finite_table(mul, names).expect("dihedral table")
    }

    pub fn direct_product(a: &GroupBackend, b: &GroupBackend) -> Result<GroupBackend> {
        let (GroupKind::FiniteTable { mul: ma, names: na }, GroupKind::FiniteTable { mul: mb, names: nb }) = (&a.kind, &b.kind) else {
            return Err(Error::InvalidInput("direct product needs finite tables".into()));
        };
        let (p, q) = (ma.len(), mb.len());
        let mul = (0..p * q).map(|x| (0..p * q).map(|y| ma[x / q][y / q] * q + mb[x % q][y % q]).collect()).collect();
        let names = (0..p * q).map(|x| format!("({},{})", na[x / q], nb[x % q])).collect();
        GroupBackend::finite_table(mul, names)
    }

    pub fn free_abelian(rank: usize) -> GroupBackend {
        GroupBackend { kind: GroupKind::FreeAbelian { rank }, inverses: Vec::new() }
    }

    pub fn free(rank: usize) -> GroupBackend {
        GroupBackend { kind: GroupKind::Free { rank }, inverses: Vec::new() }
    }

    /// Recomputes caches after deserialization.
    pub fn rebuild(self) -> Result<GroupBackend> {
        match self.kind {
            GroupKind::FiniteTable { mul, names } => GroupBackend::finite_table(mul, names),
            k => Ok(GroupBackend { kind: k, inverses: Vec::new() }),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::FiniteTable { .. })
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::FiniteTable { mul, .. } => Some(mul.len()),
            _ => None,
        }
    }

    pub fn elements(&self) -> Option<Vec<Elem>> {
        self.order().map(|n| (0..n).map(Elem::Table).collect())
    }

    pub fn identity(&self) -> Elem {
        match &self.kind {
            GroupKind::FiniteTable { .. } => Elem::Table(0),
            GroupKind::FreeAbelian { rank } => Elem::Vector(vec![0; *rank]),
            GroupKind::Free { .. } => Elem::Word(Vec::new()),
        }
    }

    pub fn is_identity(&self, g: &Elem) -> bool {
        *g == self.identity()
    }

    pub fn contains(&self, g: &Elem) -> bool {
        match (&self.kind, g) {
            (GroupKind::FiniteTable { mul, .. }, Elem::Table(i)) => *i < mul.len(),
            (GroupKind::FreeAbelian { rank }, Elem::Vector(v)) => v.len() == *rank,
            (GroupKind::Free { rank }, Elem::Word(w)) => w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank) && w.windows(2).all(|p| p[0] != -p[1]),
            _ => false,
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.kind, a, b) {
            (GroupKind::FiniteTable { mul, .. }, Elem::Table(i), Elem::Table(j)) => Elem::Table(mul[*i][*j]),
            (GroupKind::FreeAbelian { .. }, Elem::Vector(u), Elem::Vector(v)) => {
                Elem::Vector(u.iter().zip(v).map(|(x, y)| x.checked_add(*y).expect("overflow")).collect())
            }
            (GroupKind::Free { .. }, Elem::Word(u), Elem::Word(v)) => {
                let mut w = u.clone();
                for &l in v {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Elem::Word(w)
            }
            _ => panic!("element kind does not match backend: {a:?} * {b:?}"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        match (&self.kind, a) {
            (GroupKind::FiniteTable { .. }, Elem::Table(i)) => Elem::Table(self.inverses[*i]),
            (GroupKind::FreeAbelian { .. }, Elem::Vector(u)) => Elem::Vector(u.iter().map(|x| -x).collect()),
            (GroupKind::Free { .. }, Elem::Word(u)) => Elem::Word(u.iter().rev().map(|l| -l).collect()),
            _ => panic!("element kind does not match backend: {a:?}"),
        }
    }

    /// `a⁻¹ b`.
    pub fn quot(&self, a: &Elem, b: &Elem) -> Elem {
        self.mul(&self.inv(a), b)
    }

    pub fn product(&self, xs: &[Elem]) -> Elem {
        xs.iter().fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    pub fn name(&self, g: &Elem) -> String {
        match (&self.kind, g) {
            (GroupKind::FiniteTable { names, .. }, Elem::Table(i)) => names[*i].clone(),
            (_, Elem::Vector(v)) => format!("{v:?}"),
            (GroupKind::Free { .. }, Elem::Word(w)) => {
                if w.is_empty() {
                    return "e".into();
                }
                w.iter()
                    .map(|&l| {
                        let c = (b'a' + (l.unsigned_abs() as u8 - 1)) as char;
                        if l > 0 {
                            c.to_string()
                        } else {
                            format!("{c}⁻")
                        }
                    })
                    .collect()
            }
            _ => format!("{g:?}"),
        }
    }

    /// Generator `i` (finite tables: element index `i`).
    pub fn generator(&self, i: usize) -> Elem {
        match &self.kind {
            GroupKind::FiniteTable { .. } => Elem::Table(i),
            GroupKind::FreeAbelian { rank } => {
                let mut v = vec![0; *rank];
                v[i] = 1;
                Elem::Vector(v)
            }
            GroupKind::Free { .. } => Elem::Word(vec![i as i32 + 1]),
        }
    }

    /// All products of at most `2n` factors from `S ∪ S⁻¹`.
    pub fn ball(&self, s: &FiniteSubset, n: usize, horizon: Horizon) -> Result<FiniteSubset> {
        if n > horizon.radius {
            return Err(Error::HorizonExceeded(format!("ball radius {n} > horizon {}", horizon.radius)));
        }
        let mut gens: BTreeSet<Elem> = s.elements.iter().cloned().collect();
        gens.extend(s.elements.iter().map(|g| self.inv(g)));
        let e = self.identity();
        let mut seen: BTreeSet<Elem> = BTreeSet::from([e.clone()]);
        let mut frontier = vec![e];
        for _ in 0..2 * n {
            let mut next = Vec::new();
            for g in &frontier {
                for a in &gens {
                    let h = self.mul(g, a);
                    if seen.insert(h.clone()) {
                        if seen.len() > horizon.cap {
                            return Err(Error::HorizonExceeded(format!("ball exceeds {} elements", horizon.cap)));
                        }
                        next.push(h);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(FiniteSubset { elements: seen.into_iter().collect() })
    }

    /// Closure of the generated subgroup (finite tables only).
    pub fn closure(&self, gens: &[Elem]) -> Result<BTreeSet<Elem>> {
        if !self.is_finite() {
            return Err(Error::UndecidableBackend("subgroup closure needs a finite table".into()));
        }
        let mut seen = BTreeSet::from([self.identity()]);
        let mut queue: VecDeque<Elem> = VecDeque::from([self.identity()]);
        while let Some(g) = queue.pop_front() {
            for a in gens {
                let h = self.mul(&g, a);
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        Ok(seen)
    }

    pub fn conjugate_set(&self, g: &Elem, h: &BTreeSet<Elem>) -> BTreeSet<Elem> {
        let gi = self.inv(g);
        h.iter().map(|x| self.mul(&self.mul(g, x), &gi)).collect()
    }

    /// Homomorphisms from the subgroup `h` to {±1}, as sign tables indexed like `h`.
    pub fn sign_characters_of(&self, h: &BTreeSet<Elem>) -> Vec<Vec<(Elem, i8)>> {
        let elems: Vec<Elem> = h.iter().cloned().collect();
        // greedy generating set
        let mut gens: Vec<Elem> = Vec::new();
        let mut span = BTreeSet::from([self.identity()]);
        for g in &elems {
            if !span.contains(g) {
                gens.push(g.clone());
                span = self.closure(&gens).expect("finite");
            }
        }
        let mut out = Vec::new();
        for mask in 0..(1u32 << gens.len()) {
            let mut val: std::collections::BTreeMap<Elem, i8> = std::collections::BTreeMap::new();
            val.insert(self.identity(), 1);
            let mut queue = VecDeque::from([self.identity()]);
            let mut ok = true;
            while let Some(g) = queue.pop_front() {
                let vg = val[&g];
                for (k, a) in gens.iter().enumerate() {
                    let s = if mask >> k & 1 == 1 { -1 } else { 1 };
                    let h2 = self.mul(&g, a);
                    match val.get(&h2) {
                        Some(&v) if v != vg * s => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            val.insert(h2.clone(), vg * s);
                            queue.push_back(h2);
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok && elems.iter().all(|a| elems.iter().all(|b| val[&self.mul(a, b)] == val[a] * val[b])) {
                out.push(elems.iter().map(|g| (g.clone(), val[g])).collect());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// ±1-valued characters of the whole (finite) group.
    pub fn sign_characters(&self) -> Result<Vec<Vec<i8>>> {
        let all: BTreeSet<Elem> = self.elements().ok_or_else(|| Error::UndecidableBackend("characters need a finite table".into()))?.into_iter().collect();
        Ok(self.sign_characters_of(&all).into_iter().map(|c| c.into_iter().map(|(_, s)| s).collect()).collect())
    }

    /// Index-≤2 subgroups of a finite subgroup (itself first).
    pub fn index_le2_subgroups(&self, h: &BTreeSet<Elem>) -> Vec<BTreeSet<Elem>> {
        let mut out = vec![h.clone()];
        for ch in self.sign_characters_of(h) {
            if ch.iter().any(|(_, s)| *s < 0) {
                out.push(ch.into_iter().filter(|(_, s)| *s > 0).map(|(g, _)| g).collect());
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteSubset {
    pub elements: Vec<Elem>,
}

impl FiniteSubset {
    pub fn new(mut elements: Vec<Elem>) -> FiniteSubset {
        elements.sort();
        elements.dedup();
        FiniteSubset { elements }
    }

    /// Action-ready subset: adds the identity if missing.
    pub fn with_identity(g: &GroupBackend, mut elements: Vec<Elem>) -> FiniteSubset {
        elements.push(g.identity());
        FiniteSubset::new(elements)
    }

    pub fn contains(&self, g: &Elem) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn contains_identity(&self, g: &GroupBackend) -> bool {
        self.contains(&g.identity())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_symmetric(&self, g: &GroupBackend) -> bool {
        self.elements.iter().all(|a| self.contains(&g.inv(a)))
    }

    pub fn symmetrize(&self, g: &GroupBackend) -> FiniteSubset {
        let mut v = self.elements.clone();
        v.extend(self.elements.iter().map(|a| g.inv(a)));
        FiniteSubset::new(v)
    }

    /// `{ab : a ∈ self, b ∈ other}`.
    pub fn product(&self, g: &GroupBackend, other: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::new(self.elements.iter().flat_map(|a| other.elements.iter().map(move |b| g.mul(a, b))).collect())
    }

    pub fn is_subset(&self, other: &FiniteSubset) -> bool {
        self.elements.iter().all(|a| other.contains(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupDescription {
    pub generators: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "subgroups", rename_all = "snake_case")]
pub enum FamilyKind {
    Trivial,
    Finite,
    VirtuallyCyclic,
    /// Explicit list of subgroups (finite tables), each given by its element set.
    Custom(Vec<Vec<Elem>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPredicate {
    pub kind: FamilyKind,
    #[serde(default)]
    pub f2: bool,
}

impl FamilyPredicate {
    pub fn new(kind: FamilyKind, f2: bool) -> FamilyPredicate {
        FamilyPredicate { kind, f2 }
    }
}

/// Rank of the subgroup of ℤ^r spanned by the given vectors.
fn lattice_rank(gens: &[Elem], rank: usize) -> usize {
    let rows: Vec<Vec<i64>> = gens
        .iter()
        .map(|g| match g {
            Elem::Vector(v) => v.clone(),
            _ => vec![0; rank],
        })
        .collect();
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_dense(&rows).rank()
}

fn base_member_finite(kind: &FamilyKind, h: &BTreeSet<Elem>) -> bool {
    match kind {
        FamilyKind::Trivial => h.len() == 1,
        // every subgroup of a finite group is finite, hence virtually cyclic
        FamilyKind::Finite | FamilyKind::VirtuallyCyclic => true,
        FamilyKind::Custom(list) => list.iter().any(|k| {
            let ks: BTreeSet<Elem> = k.iter().cloned().collect();
            ks == *h
        }),
    }
}

/// Membership of the subgroup generated by `h` in the family (or in its index-2 closure).
pub fn family_member(g: &GroupBackend, f: &FamilyPredicate, h: &SubgroupDescription) -> Result<bool> {
    for x in &h.generators {
        if !g.contains(x) {
            return Err(Error::InvalidInput(format!("generator {x:?} is not an element of the backend")));
        }
    }
    match &g.kind {
        GroupKind::FiniteTable { .. } => {
            let hs = g.closure(&h.generators)?;
            if f.f2 {
                Ok(g.index_le2_subgroups(&hs).iter().any(|k| base_member_finite(&f.kind, k)))
            } else {
                Ok(base_member_finite(&f.kind, &hs))
            }
        }
        GroupKind::FreeAbelian { rank } => {
            // index-2 subgroups of a lattice keep its rank, so f2 changes nothing here
            let r = lattice_rank(&h.generators, *rank);
            match &f.kind {
                FamilyKind::Trivial | FamilyKind::Finite => Ok(r == 0),
                FamilyKind::VirtuallyCyclic => Ok(r <= 1),
                FamilyKind::Custom(_) => Err(Error::UndecidableBackend("custom families need a finite table".into())),
            }
        }
        GroupKind::Free { .. } => {
            let nontrivial: Vec<&Elem> = h.generators.iter().filter(|x| !g.is_identity(x)).collect();
            match &f.kind {
                FamilyKind::Trivial | FamilyKind::Finite => Ok(nontrivial.is_empty()),
                FamilyKind::VirtuallyCyclic if nontrivial.len() <= 1 => Ok(true),
                FamilyKind::VirtuallyCyclic => {
                    Err(Error::UndecidableBackend("virtually-cyclic membership in a free group with several nontrivial generators".into()))
                }
                FamilyKind::Custom(_) => Err(Error::UndecidableBackend("custom families need a finite table".into())),
            }
        }
    }
}

/// All cyclic subgroups of a finite table group, as a custom family.
pub fn cyclic_subgroups(g: &GroupBackend) -> Result<FamilyKind> {
    let elems = g.elements().ok_or_else(|| Error::UndecidableBackend("needs a finite table".into()))?;
    let mut subs: BTreeSet<Vec<Elem>> = BTreeSet::new();
    for x in elems {
        subs.insert(g.closure(&[x])?.into_iter().collect());
    }
    Ok(FamilyKind::Custom(subs.into_iter().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> GroupBackend {
        GroupBackend::free_abelian(1)
    }

    #[test]
    fn ball_in_z() {
        let g = z1();
        let s = FiniteSubset::new(vec![Elem::Vector(vec![0]), Elem::Vector(vec![1]), Elem::Vector(vec![-1])]);
        let b = g.ball(&s, 1, Horizon::default()).unwrap();
        let want: Vec<Elem> = (-2..=2).map(|i| Elem::Vector(vec![i])).collect();
        assert_eq!(b.elements, want);
    }

    #[test]
    fn ball_of_identity_only() {
        for g in [z1(), GroupBackend::free(2), GroupBackend::dihedral(4)] {
            let s = FiniteSubset::new(vec![g.identity()]);
            assert_eq!(g.ball(&s, 5, Horizon::default()).unwrap().elements, vec![g.identity()]);
        }
    }

    /// Brute force: enumerate every product of ≤ 2n letters and reduce.
    fn brute_ball_free(s: &[Elem], n: usize, g: &GroupBackend) -> BTreeSet<Elem> {
        let mut letters: Vec<Elem> = s.to_vec();
        letters.extend(s.iter().map(|x| g.inv(x)));
        let mut out = BTreeSet::new();
        fn rec(g: &GroupBackend, letters: &[Elem], cur: Elem, left: usize, out: &mut BTreeSet<Elem>) {
            out.insert(cur.clone());
            if left == 0 {
                return;
            }
            for l in letters {
                rec(g, letters, g.mul(&cur, l), left - 1, out);
            }
        }
        rec(g, &letters, g.identity(), 2 * n, &mut out);
        out
    }

    #[test]
    fn free_rank2_ball_matches_brute_force() {
        let g = GroupBackend::free(2);
        let s = vec![g.identity(), g.generator(0), g.generator(1)];
        let b = g.ball(&FiniteSubset::new(s.clone()), 2, Horizon::default()).unwrap();
        let brute = brute_ball_free(&s, 2, &g);
        assert_eq!(b.elements.len(), brute.len());
        // words of length ≤ 4 in a free group of rank 2: 1 + 4 + 12 + 36 + 108
        assert_eq!(b.elements.len(), 161);
    }

    #[test]
    fn horizon_is_enforced() {
        let g = GroupBackend::free(2);
        let s = FiniteSubset::new(vec![g.generator(0), g.generator(1)]);
        assert!(matches!(g.ball(&s, 13, Horizon::default()), Err(Error::HorizonExceeded(_))));
        let tight = Horizon { radius: 12, cap: 50 };
        assert!(matches!(g.ball(&s, 3, tight), Err(Error::HorizonExceeded(_))));
    }

    #[test]
    fn dihedral_is_a_group() {
        let d = GroupBackend::dihedral(5);
        assert_eq!(d.order(), Some(10));
        let s = Elem::Table(5);
        let r = Elem::Table(1);
        // s r s = r⁻¹
        assert_eq!(d.product(&[s.clone(), r.clone(), s]), d.inv(&r));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(GroupBackend::finite_table(vec![vec![0, 1], vec![1, 1]], vec![]).is_err());
        assert!(GroupBackend::finite_table(vec![vec![1, 0], vec![0, 1]], vec![]).is_err());
    }

    #[test]
    fn family_examples() {
        let z = z1();
        let vc = FamilyPredicate::new(FamilyKind::VirtuallyCyclic, false);
        let two_z = SubgroupDescription { generators: vec![Elem::Vector(vec![2])] };
        assert!(family_member(&z, &vc, &two_z).unwrap());
        let fin = FamilyPredicate::new(FamilyKind::Finite, false);
        let triv = SubgroupDescription { generators: vec![] };
        assert!(family_member(&z, &fin, &triv).unwrap());
        assert!(!family_member(&z, &fin, &two_z).unwrap());
        let z2 = GroupBackend::free_abelian(2);
        let both = SubgroupDescription { generators: vec![z2.generator(0), z2.generator(1)] };
        assert!(!family_member(&z2, &vc, &both).unwrap());
    }

    #[test]
    fn f2_closure_in_dihedral() {
        // D4 = ⟨r, s⟩ of order 8; ⟨r, s⟩ ∩ cyclic: {e, r, r², r³} has index 2 in D4.
        let d = GroupBackend::dihedral(4);
        let cyc = cyclic_subgroups(&d).unwrap();
        let whole = SubgroupDescription { generators: vec![Elem::Table(1), Elem::Table(4)] };
        assert!(!family_member(&d, &FamilyPredicate::new(cyc.clone(), false), &whole).unwrap());
        assert!(family_member(&d, &FamilyPredicate::new(cyc.clone(), true), &whole).unwrap());
        // Klein four ⟨r², s⟩ contains the cyclic ⟨s⟩ with index 2, but is not cyclic.
        let klein = SubgroupDescription { generators: vec![Elem::Table(2), Elem::Table(4)] };
        assert!(!family_member(&d, &FamilyPredicate::new(cyc.clone(), false), &klein).unwrap());
        assert!(family_member(&d, &FamilyPredicate::new(cyc, true), &klein).unwrap());
    }

    #[test]
    fn free_group_reports_undecidable() {
        let f = GroupBackend::free(2);
        let vc = FamilyPredicate::new(FamilyKind::VirtuallyCyclic, false);
        let h = SubgroupDescription { generators: vec![f.generator(0), f.generator(1)] };
        assert!(matches!(family_member(&f, &vc, &h), Err(Error::UndecidableBackend(_))));
        let one = SubgroupDescription { generators: vec![f.generator(0)] };
        assert!(family_member(&f, &vc, &one).unwrap());
    }

    #[test]
    fn characters_of_cyclic_groups() {
        assert_eq!(GroupBackend::cyclic(2).sign_characters().unwrap().len(), 2);
        assert_eq!(GroupBackend::cyclic(3).sign_characters().unwrap().len(), 1);
        assert_eq!(GroupBackend::dihedral(4).sign_characters().unwrap().len(), 4);
    }
}
