//! The scenario file: one UTF-8 JSON document with sorted keys and a version
//! tag. Sections name groups, spaces, actions, covers, complexes, forms and
//! pipelines; later sections refer to earlier ones by name, and group
//! elements are written by their display names (`"s"`, `"[1, 0]"`, `"ab⁻"`).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use transfer_core::actions::{CoverMember, CoverSpec, HomotopySAction, Node};
use transfer_core::chain::{ChainComplex, ChainMap};
use transfer_core::control::{ControlSpace, EquivariantMorphism, PointMap};
use transfer_core::groups::{Elem, FamilyPredicate, FiniteSubset, GroupBackend, GroupKind};
use transfer_core::ltheory::SymmetricForm;
use transfer_core::rational::Q;
use transfer_core::simplicial::{Placement, SimplicialComplex};
use transfer_core::{Error, Matrix, Result};

pub const VERSION: &str = "transfer-scenario/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    #[serde(default)]
    pub groups: BTreeMap<String, GroupSpec>,
    #[serde(default)]
    pub spaces: BTreeMap<String, SpaceSpec>,
    #[serde(default)]
    pub actions: BTreeMap<String, ActionSpec>,
    #[serde(default)]
    pub covers: BTreeMap<String, CoverEntry>,
    #[serde(default)]
    pub complexes: BTreeMap<String, ComplexSpec>,
    #[serde(default)]
    pub forms: BTreeMap<String, SymmetricForm>,
    #[serde(default)]
    pub pipelines: BTreeMap<String, Pipeline>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Trivial,
    Cyclic { order: usize },
    Dihedral { n: usize },
    FreeAbelian { rank: usize },
    Free { rank: usize },
    Table { mul: Vec<Vec<usize>>, names: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Point,
    /// Points 0..n on a line at unit spacing.
    Line {
        n: usize,
    },
    Metric {
        names: Vec<String>,
        #[serde(with = "transfer_core::rational::qmat")]
        dist: Vec<Vec<Q>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopySpec {
    pub g: String,
    pub h: String,
    pub frames: Vec<Vec<usize>>,
}

/// A homotopy S-action. Without `homotopies`, every composable pair gets the
/// constant homotopy at φ_{gh}, which validates only for a genuine action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub group: String,
    pub space: String,
    pub s: Vec<String>,
    pub phi: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homotopies: Option<Vec<HomotopySpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub name: String,
    pub points: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverEntry {
    pub action: String,
    pub members: Vec<MemberSpec>,
    pub equivariant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComplexSpec {
    Simplicial {
        nvertices: usize,
        facets: Vec<Vec<usize>>,
    },
    Chain {
        lo: i32,
        ranks: Vec<usize>,
        diffs: Vec<Matrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        positions: Option<PositionSpec>,
    },
}

/// Point of each basis element, degree by degree from `lo`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionSpec {
    pub npoints: usize,
    pub at: Vec<Vec<usize>>,
}

/// A graded map between chain complexes; keys are degrees written as strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub degree: i32,
    pub comps: BTreeMap<String, Matrix>,
}

/// A ℤ[G]-matrix: point positions of source and target generators and one
/// integer matrix per group element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqSpec {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub letters: BTreeMap<String, Matrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub space: String,
    #[serde(with = "transfer_core::rational::qser")]
    pub epsilon: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Pipeline {
    Dslambda {
        action: String,
        from: (String, usize),
        to: (String, usize),
        #[serde(with = "transfer_core::rational::qvec")]
        lambda: Vec<Q>,
        horizon: usize,
    },
    Orbit {
        action: String,
        from: (String, usize),
        n: usize,
        horizon: usize,
    },
    /// Lebesgue numbers over the whole of G × X (finite groups), the least
    /// grid Λ reaching m/2 when `m` is set, and the F-cover conditions when
    /// `family` is set.
    Lebesgue {
        cover: String,
        #[serde(with = "transfer_core::rational::qvec")]
        lambda: Vec<Q>,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "transfer_core::rational::opt_q_str")]
        m: Option<Q>,
        horizon: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family: Option<FamilyPredicate>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Nerve {
        cover: String,
        #[serde(with = "transfer_core::rational::qser")]
        lambda: Q,
        #[serde(with = "transfer_core::rational::qser")]
        d: Q,
        n: usize,
        horizon: usize,
    },
    /// The P₂ action of `action` (stabilizer indices and the ω bound on
    /// sampled pairs) and/or the simplicial P₂ of `complex`.
    P2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        action: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family: Option<FamilyPredicate>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complex: Option<String>,
        #[serde(with = "transfer_core::rational::qser")]
        lambda: Q,
        horizon: usize,
        samples: usize,
    },
    /// C dominated by D: i: C → D, r: D → C and h a homotopy r∘i → id_C.
    Replace {
        c: String,
        d: String,
        i: MapSpec,
        r: MapSpec,
        h: MapSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        control: Option<ControlSpec>,
    },
    TransferK {
        action: String,
        complex: String,
        alpha: EqSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha_inv: Option<EqSpec>,
        #[serde(with = "transfer_core::rational::qser")]
        lambda: Q,
    },
    TransferL {
        action: String,
        complex: String,
        alpha: EqSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta_inv: Option<EqSpec>,
        #[serde(with = "transfer_core::rational::qser")]
        lambda: Q,
    },
    /// Self-torsion of a chain automorphism (inverse computed degreewise).
    Torsion {
        complex: String,
        automorphism: MapSpec,
    },
    Signature {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        form: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complex: Option<String>,
    },
    Finobstr {
        complex: String,
    },
}

impl Pipeline {
    pub fn kind(&self) -> &'static str {
        match self {
            Pipeline::Dslambda { .. } => "dslambda",
            Pipeline::Orbit { .. } => "orbit",
            Pipeline::Lebesgue { .. } => "lebesgue",
            Pipeline::Nerve { .. } => "nerve",
            Pipeline::P2 { .. } => "p2",
            Pipeline::Replace { .. } => "replace",
            Pipeline::TransferK { .. } => "transfer-k",
            Pipeline::TransferL { .. } => "transfer-l",
            Pipeline::Torsion { .. } => "torsion",
            Pipeline::Signature { .. } => "signature",
            Pipeline::Finobstr { .. } => "finobstr",
        }
    }
}

/// A built complex: simplicial ones keep their chains alongside.
#[derive(Clone, Debug)]
pub enum Complex {
    Simplicial(SimplicialComplex),
    Chain(Arc<ChainComplex>),
}

/// A scenario with every cross-reference resolved and every object validated.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub groups: BTreeMap<String, GroupBackend>,
    pub spaces: BTreeMap<String, ControlSpace>,
    pub actions: BTreeMap<String, HomotopySAction>,
    pub covers: BTreeMap<String, (String, CoverSpec)>,
    pub complexes: BTreeMap<String, Complex>,
    pub forms: BTreeMap<String, SymmetricForm>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, section: &str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::InvalidInput(format!("{section} {name:?} is not defined")))
}

/// Parses an element written as `GroupBackend::name` writes it.
pub fn parse_elem(g: &GroupBackend, s: &str) -> Result<Elem> {
    let bad = || Error::InvalidInput(format!("{s:?} is not an element of the group"));
    let out = match &g.kind {
        GroupKind::FiniteTable { names, .. } => Elem::Table(names.iter().position(|n| n == s).ok_or_else(bad)?),
        GroupKind::FreeAbelian { rank } => {
            let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
            let v: Vec<i64> =
                if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()? };
            if v.len() != *rank {
                return Err(bad());
            }
            Elem::Vector(v)
        }
        GroupKind::Free { rank } => {
            if s == "e" {
                return Ok(g.identity());
            }
            let mut w: Vec<i32> = Vec::new();
            for c in s.chars() {
                match c {
                    'a'..='z' => {
                        let k = c as i32 - 'a' as i32 + 1;
                        if k as usize > *rank {
                            return Err(bad());
                        }
                        w.push(k);
                    }
                    '⁻' => {
                        let last = w.last_mut().filter(|l| **l > 0).ok_or_else(bad)?;
                        *last = -*last;
                    }
                    _ => return Err(bad()),
                }
            }
            let out = g.product(&w.iter().map(|&l| Elem::Word(vec![l])).collect::<Vec<_>>());
            if g.name(&out) != s {
                return Err(Error::InvalidInput(format!("{s:?} is not freely reduced")));
            }
            out
        }
    };
    Ok(out)
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupBackend> {
        Ok(match self {
            GroupSpec::Trivial => GroupBackend::trivial(),
            GroupSpec::Cyclic { order } if *order > 0 => GroupBackend::cyclic(*order),
            GroupSpec::Dihedral { n } if *n > 0 => GroupBackend::dihedral(*n),
            GroupSpec::Cyclic { .. } | GroupSpec::Dihedral { .. } => return Err(Error::InvalidInput("group order must be positive".into())),
            GroupSpec::FreeAbelian { rank } => GroupBackend::free_abelian(*rank),
            GroupSpec::Free { rank } => GroupBackend::free(*rank),
            GroupSpec::Table { mul, names } => GroupBackend::finite_table(mul.clone(), names.clone())?,
        })
    }
}

impl SpaceSpec {
    pub fn build(&self) -> Result<ControlSpace> {
        match self {
            SpaceSpec::Point => Ok(ControlSpace::point()),
            SpaceSpec::Line { n } if *n > 0 => Ok(ControlSpace::line(*n)),
            SpaceSpec::Line { .. } => Err(Error::InvalidInput("a line needs at least one point".into())),
            SpaceSpec::Metric { names, dist } => ControlSpace::new(names.clone(), dist.clone()),
        }
    }
}

impl ActionSpec {
    pub fn build(&self, group: &GroupBackend, space: &ControlSpace) -> Result<HomotopySAction> {
        let n = space.len();
        let el = |s: &str| parse_elem(group, s);
        let s = FiniteSubset::new(self.s.iter().map(|x| el(x)).collect::<Result<_>>()?);
        let phi: BTreeMap<Elem, PointMap> = self.phi.iter().map(|(g, m)| Ok((el(g)?, PointMap::new(m.clone(), n)?))).collect::<Result<_>>()?;
        let homotopies = match &self.homotopies {
            Some(list) => list
                .iter()
                .map(|h| {
                    let frames = h.frames.iter().map(|f| PointMap::new(f.clone(), n)).collect::<Result<Vec<_>>>()?;
                    Ok(((el(&h.g)?, el(&h.h)?), frames))
                })
                .collect::<Result<BTreeMap<_, _>>>()?,
            None => {
                let mut out = BTreeMap::new();
                for g in &s.elements {
                    for h in &s.elements {
                        let gh = group.mul(g, h);
                        if let (true, Some(m)) = (s.contains(&gh), phi.get(&gh)) {
                            out.insert((g.clone(), h.clone()), vec![m.clone()]);
                        }
                    }
                }
                out
            }
        };
        let a = HomotopySAction { group: group.clone(), space: space.clone(), s, phi, homotopies };
        a.validate()?;
        Ok(a)
    }
}

impl ComplexSpec {
    pub fn build(&self) -> Result<Complex> {
        match self {
            ComplexSpec::Simplicial { nvertices, facets } => Ok(Complex::Simplicial(SimplicialComplex::from_facets(*nvertices, facets)?)),
            ComplexSpec::Chain { lo, ranks, diffs, positions } => {
                let mut c = ChainComplex::new(*lo, ranks.clone(), diffs.clone())?;
                if let Some(p) = positions {
                    c = c.with_positions(p.npoints, p.at.clone())?;
                }
                c.validate()?;
                Ok(Complex::Chain(Arc::new(c)))
            }
        }
    }
}

impl MapSpec {
    pub fn build(&self, src: &Arc<ChainComplex>, tgt: &Arc<ChainComplex>) -> Result<ChainMap> {
        let comps =
            self.comps.iter().map(|(n, m)| Ok((n.parse().map_err(|_| Error::InvalidInput(format!("bad degree {n:?}")))?, m.clone()))).collect::<Result<_>>()?;
        ChainMap::new(src.clone(), tgt.clone(), self.degree, comps)
    }
}

impl EqSpec {
    pub fn build(&self, group: &GroupBackend) -> Result<EquivariantMorphism> {
        let letters = self.letters.iter().map(|(g, m)| Ok((parse_elem(group, g)?, m.clone()))).collect::<Result<_>>()?;
        EquivariantMorphism::new(self.src.clone(), self.tgt.clone(), letters)
    }
}

impl Resolved {
    pub fn action(&self, name: &str) -> Result<&HomotopySAction> {
        lookup(&self.actions, "action", name)
    }

    pub fn complex(&self, name: &str) -> Result<&Complex> {
        lookup(&self.complexes, "complex", name)
    }

    pub fn chain(&self, name: &str) -> Result<Arc<ChainComplex>> {
        match self.complex(name)? {
            Complex::Chain(c) => Ok(c.clone()),
            Complex::Simplicial(_) => Err(Error::InvalidInput(format!("complex {name:?} must be a chain complex"))),
        }
    }

    pub fn simplicial(&self, name: &str) -> Result<&SimplicialComplex> {
        match self.complex(name)? {
            Complex::Simplicial(s) => Ok(s),
            Complex::Chain(_) => Err(Error::InvalidInput(format!("complex {name:?} must be simplicial"))),
        }
    }

    pub fn cover(&self, name: &str) -> Result<(&HomotopySAction, &CoverSpec)> {
        let (action, spec) = lookup(&self.covers, "cover", name)?;
        Ok((self.action(action)?, spec))
    }

    pub fn node(&self, action: &HomotopySAction, (g, x): &(String, usize)) -> Result<Node> {
        if *x >= action.npoints() {
            return Err(Error::InvalidInput(format!("point {x} is outside the space")));
        }
        Ok((parse_elem(&action.group, g)?, *x))
    }
}

/// The vertex placement used when a simplicial complex carries an action:
/// vertex v sits at point v.
pub fn identity_placement(cx: &SimplicialComplex) -> Placement {
    Placement::of_vertices((0..cx.nvertices()).collect())
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario JSON: {e}")))?;
        if s.version != VERSION {
            return Err(Error::InvalidInput(format!("unsupported scenario version {:?}, want {VERSION:?}", s.version)));
        }
        Ok(s)
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_canonical(&self) -> String {
        canonical_json(self)
    }

    /// Builds and validates every object, resolving names section by section.
    pub fn resolve(&self) -> Result<Resolved> {
        let ctx = |section: &str, name: &str, e: Error| Error::InvalidInput(format!("{section} {name:?}: {e}"));
        let mut groups = BTreeMap::new();
        for (name, g) in &self.groups {
            groups.insert(name.clone(), g.build().map_err(|e| ctx("group", name, e))?);
        }
        let mut spaces = BTreeMap::new();
        for (name, x) in &self.spaces {
            spaces.insert(name.clone(), x.build().map_err(|e| ctx("space", name, e))?);
        }
        let mut actions = BTreeMap::new();
        for (name, a) in &self.actions {
            let built = lookup(&groups, "group", &a.group).and_then(|g| a.build(g, lookup(&spaces, "space", &a.space)?)).map_err(|e| ctx("action", name, e))?;
            actions.insert(name.clone(), built);
        }
        let mut covers = BTreeMap::new();
        for (name, c) in &self.covers {
            let a: &HomotopySAction = lookup(&actions, "action", &c.action).map_err(|e| ctx("cover", name, e))?;
            let members = c
                .members
                .iter()
                .map(|m| {
                    let points = m
                        .points
                        .iter()
                        .map(|(g, x)| {
                            if *x >= a.npoints() {
                                return Err(Error::InvalidInput(format!("point {x} is outside the space")));
                            }
                            Ok((parse_elem(&a.group, g)?, *x))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(CoverMember { name: m.name.clone(), points })
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| ctx("cover", name, e))?;
            covers.insert(name.clone(), (c.action.clone(), CoverSpec { members, equivariant: c.equivariant }));
        }
        let mut complexes = BTreeMap::new();
        for (name, c) in &self.complexes {
            complexes.insert(name.clone(), c.build().map_err(|e| ctx("complex", name, e))?);
        }
        let mut forms = BTreeMap::new();
        for (name, f) in &self.forms {
            forms.insert(name.clone(), SymmetricForm::new(f.gram.clone()).map_err(|e| ctx("form", name, e))?);
        }
        let out = Resolved { groups, spaces, actions, covers, complexes, forms };
        for (name, p) in &self.pipelines {
            check_refs(&out, p).map_err(|e| ctx("pipeline", name, e))?;
        }
        Ok(out)
    }
}

/// Every name a pipeline mentions must resolve to an object of the right sort.
fn check_refs(r: &Resolved, p: &Pipeline) -> Result<()> {
    match p {
        Pipeline::Dslambda { action, from, to, .. } => {
            let a = r.action(action)?;
            r.node(a, from)?;
            r.node(a, to)?;
        }
        Pipeline::Orbit { action, from, .. } => {
            r.node(r.action(action)?, from)?;
        }
        Pipeline::Lebesgue { cover, .. } | Pipeline::Nerve { cover, .. } => {
            r.cover(cover)?;
        }
        Pipeline::P2 { action, complex, .. } => {
            if let Some(a) = action {
                r.action(a)?;
            }
            if let Some(c) = complex {
                r.simplicial(c)?;
            }
        }
        Pipeline::Replace { c, d, control, .. } => {
            r.chain(c)?;
            r.chain(d)?;
            if let Some(cs) = control {
                lookup(&r.spaces, "space", &cs.space)?;
            }
        }
        Pipeline::TransferK { action, complex, alpha, alpha_inv: extra, .. } | Pipeline::TransferL { action, complex, alpha, beta_inv: extra, .. } => {
            let a = r.action(action)?;
            r.simplicial(complex)?;
            alpha.build(&a.group)?;
            if let Some(x) = extra {
                x.build(&a.group)?;
            }
        }
        Pipeline::Torsion { complex, .. } | Pipeline::Finobstr { complex } => {
            r.chain(complex)?;
        }
        Pipeline::Signature { form, complex } => {
            if form.is_none() && complex.is_none() {
                return Err(Error::InvalidInput("a signature pipeline needs a form or a complex".into()));
            }
            if let Some(f) = form {
                lookup(&r.forms, "form", f)?;
            }
            if let Some(c) = complex {
                r.chain(c)?;
            }
        }
    }
    Ok(())
}

/// serde_json's default map is ordered, so going through `Value` sorts every key.
pub fn canonical_json<T: Serialize>(x: &T) -> String {
    let v = serde_json::to_value(x).expect("scenario values serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values print");
    s.push('\n');
    s
}
