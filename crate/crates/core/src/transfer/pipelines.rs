//! The K- and L-transfer pipelines with (S, 1+Λε) certificates in d_{S,Λ}.
//!
//! Control is always recomputed: ε is measured from the chain action against
//! the space-level action, and every support pair of every output map is
//! checked against the metric.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionMetric, HomotopySAction, Node};
use crate::chain::ops::{dual_complex, dual_map, iota, signed_perm_inverse, tensor, tensor_map_between};
use crate::chain::torsion::self_torsion;
use crate::chain::{ChainComplex, ChainMap, Equivalence};
use crate::control::{convolve, ControlSpace, EquivariantMorphism};
use crate::error::{Error, Result};
use crate::groups::{Elem, FiniteSubset, GroupBackend};
use crate::ltheory::{
    homology_signature, mult_hyperbolic_complex, signature, symmetrization, verify_ultraquadratic, SymmetricForm, UltraQuadraticComplex, UltraQuadraticReport,
};
use crate::matrix::Matrix;
use crate::p2::{p2_action, P2Space, UnorderedPair};
use crate::par::Mode;
use crate::rational::{fmt_q, qi, Dist, Q};

use super::equivariant::{equivariant_inverse, expand_complex, EqChainMap, EqHomotopy};
use super::schain::{HomotopySChainComplex, SChainCertificate};
use super::tr::{functoriality_witness, induced_complex, module_complex, tr};

/// Worst d_{S,Λ} over the support pairs of a family of equivariant maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlAudit {
    #[serde(with = "crate::rational::qser")]
    pub lambda: Q,
    #[serde(with = "crate::rational::qser")]
    pub epsilon: Q,
    #[serde(with = "crate::rational::qser")]
    pub bound: Q,
    #[serde(with = "crate::rational::qser")]
    pub worst: Q,
    pub pairs: usize,
}

/// Checks d((e, x), (a, y)) ≤ 1 + Λε for every letter a and support pair (x, y).
pub fn audit_control(action: &HomotopySAction, lambda: Q, epsilon: Q, maps: &[(&str, &EqChainMap)]) -> Result<ControlAudit> {
    let bound = qi(1) + lambda * epsilon;
    let n_max = bound.to_integer().max(0) as usize + 1;
    let metric = ActionMetric::new(action, lambda, n_max)?;
    let e = action.group.identity();
    let mut rows: BTreeMap<usize, (BTreeMap<Node, Q>, bool)> = BTreeMap::new();
    let mut worst = Q::default();
    let mut pairs = 0;
    for (name, m) in maps {
        for (a, comp) in &m.letters {
            if !action.s.contains(a) {
                return Err(Error::SupportEscape(format!("{name} has letter {} outside S", action.group.name(a))));
            }
            for (x, y) in comp.support() {
                let (row, pruned) = rows.entry(x).or_insert_with(|| metric.distances_from(&(e.clone(), x)));
                let d = match row.get(&(a.clone(), y)) {
                    Some(&d) => d,
                    None if *pruned => qi(n_max as i128 + 1),
                    None => return Err(Error::ControlViolation(format!("{name}: ({}, {y}) is unreachable from (e, {x})", action.group.name(a)))),
                };
                pairs += 1;
                worst = worst.max(d);
                if d > bound {
                    return Err(Error::ControlViolation(format!(
                        "{name}: d((e, {x}), ({}, {y})) = {} exceeds {}",
                        action.group.name(a),
                        fmt_q(&d),
                        fmt_q(&bound)
                    )));
                }
            }
        }
    }
    Ok(ControlAudit { lambda, epsilon, bound, worst, pairs })
}

/// The differential as a degree −1 map at the identity letter.
pub fn differential(group: &GroupBackend, c: &Arc<ChainComplex>) -> EqChainMap {
    EqChainMap::plain(group, ChainMap::from_fn(c.clone(), c.clone(), -1, |n| c.d(n)).expect("differential shapes"))
}

fn elem_letters(m: &EquivariantMorphism) -> BTreeSet<Elem> {
    m.letters.keys().cloned().collect()
}

/// T ∪ {e} with T·T ⊆ S.
fn check_products(group: &GroupBackend, s: &FiniteSubset, mut t: BTreeSet<Elem>) -> Result<FiniteSubset> {
    t.insert(group.identity());
    for a in &t {
        for b in &t {
            if !s.contains(&group.mul(a, b)) {
                return Err(Error::HypothesisViolation(format!("{}·{} is not in S", group.name(a), group.name(b))));
            }
        }
    }
    Ok(FiniteSubset::new(t.into_iter().collect()))
}

fn two_sided_inverse(group: &GroupBackend, a: &EquivariantMorphism, b: &EquivariantMorphism) -> Result<()> {
    let id = EquivariantMorphism::identity(group, a.src.clone());
    let strip = |m: EquivariantMorphism| m.letters;
    if strip(convolve(group, b, a, None)?) != id.letters || strip(convolve(group, a, b, None)?) != id.letters {
        return Err(Error::NotAnEquivalence("the supplied inverse is not a two-sided inverse".into()));
    }
    Ok(())
}

fn inverse_of(group: &GroupBackend, a: &EquivariantMorphism, given: Option<&EquivariantMorphism>) -> Result<EquivariantMorphism> {
    let inv = match given {
        Some(b) => b.clone(),
        None => equivariant_inverse(group, a)?.ok_or_else(|| Error::NotAnEquivalence("not invertible over ℤ[G]".into()))?,
    };
    two_sided_inverse(group, a, &inv)?;
    Ok(inv)
}

/// ±1 characters of a finite group as functions on elements; only the
/// trivial one otherwise.
pub fn characters(group: &GroupBackend) -> Vec<BTreeMap<Elem, i64>> {
    match (group.elements(), group.sign_characters()) {
        (Some(elems), Ok(chars)) => chars.into_iter().map(|c| elems.iter().cloned().zip(c.into_iter().map(i64::from)).collect()).collect(),
        _ => vec![BTreeMap::new()],
    }
}

fn chi_of(c: &BTreeMap<Elem, i64>) -> impl Fn(&Elem) -> i64 + '_ {
    move |a| c.get(a).copied().unwrap_or(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KProjection {
    /// χ(g) for g in element order; empty for the trivial character of an infinite group.
    pub character: Vec<i64>,
    pub torsion_sign: i8,
    pub alpha_det_sign: i8,
}

impl KProjection {
    pub fn agrees(&self) -> bool {
        self.torsion_sign == self.alpha_det_sign
    }
}

#[derive(Clone, Debug)]
pub struct KTransfer {
    /// M ⊗ P.
    pub c: Arc<ChainComplex>,
    pub alpha_hat: EqChainMap,
    pub inverse: EqChainMap,
    /// tr(α⁻¹)∘tr(α) → id.
    pub h: EqHomotopy,
    /// tr(α)∘tr(α⁻¹) → id.
    pub k: EqHomotopy,
    pub certificate: SChainCertificate,
    pub audit: ControlAudit,
    pub projections: Vec<KProjection>,
}

/// tr^P(α) with the homotopy inverse tr^P(α⁻¹) and both composite
/// homotopies, certified against `action`. `alpha_inv` is computed over a
/// finite group when omitted.
pub fn k_transfer(
    action: &HomotopySAction,
    p: &HomotopySChainComplex,
    alpha: &EquivariantMorphism,
    alpha_inv: Option<&EquivariantMorphism>,
    lambda: Q,
) -> Result<KTransfer> {
    let g = &p.group;
    if alpha.src.len() != alpha.tgt.len() {
        return Err(Error::Shape("α must be an automorphism".into()));
    }
    p.validate()?;
    let inv = inverse_of(g, alpha, alpha_inv)?;
    check_products(g, &p.s, elem_letters(alpha).union(&elem_letters(&inv)).cloned().collect())?;
    let certificate = p.certify(action)?;
    let alpha_hat = tr(alpha, p)?;
    let inverse = tr(&inv, p)?;
    let h = functoriality_witness(&inv, alpha, p)?;
    let k = functoriality_witness(alpha, &inv, p)?;
    let audit = audit_control(
        action,
        lambda,
        certificate.epsilon(),
        &[("α̂", &alpha_hat), ("α̂⁻¹", &inverse), ("h", &h.h), ("k", &k.h), ("d", &differential(g, &alpha_hat.src))],
    )?;
    let mut projections = Vec::new();
    for chi in characters(g) {
        let f = chi_of(&chi);
        let eq = Equivalence { f: alpha_hat.specialize(&f), g: inverse.specialize(&f), h: h.h.specialize(&f), k: k.h.specialize(&f) };
        eq.verify()?;
        let torsion_sign = self_torsion(&eq)?.det_sign();
        let det = alpha.specialize(&f).det();
        let alpha_det_sign = crate::matrix::sign_of(&det);
        let character = g.elements().map(|es| es.iter().map(&f).collect()).unwrap_or_default();
        projections.push(KProjection { character, torsion_sign, alpha_det_sign });
    }
    Ok(KTransfer { c: alpha_hat.src.clone(), alpha_hat, inverse, h, k, certificate, audit, projections })
}

/// (D, φ^D, H^D, μ) over P₂(X) for a chain action with S = S⁻¹.
#[derive(Clone, Debug)]
pub struct LSymmetric {
    pub p2: P2Space,
    /// The induced action on P₂(X).
    pub action: HomotopySAction,
    pub d: HomotopySChainComplex,
    /// D^{-*}.
    pub d_dual: Arc<ChainComplex>,
    /// μ: D^{-*} → D.
    pub mu: ChainMap,
    pub certificate: SChainCertificate,
}

pub fn l_symmetric_complex(action: &HomotopySAction, p: &HomotopySChainComplex) -> Result<LSymmetric> {
    let g = &p.group;
    if !p.s.is_symmetric(g) {
        return Err(Error::HypothesisViolation("S must equal S⁻¹".into()));
    }
    if p.p.has_idempotents() {
        return Err(Error::InvalidInput("the L-pipeline expects a free P".into()));
    }
    p.validate()?;
    let n = action.npoints();
    if p.p.npoints() != Some(n) {
        return Err(Error::InvalidInput("P is not positioned over the action's space".into()));
    }
    let (p2a, p2) = p2_action(action)?;
    let pd = Arc::new(dual_complex(&p.p));
    let raw = tensor(&pd, &p.p);
    let d = Arc::new(raw.relabel(p2.pairs.len(), |z| p2.index(UnorderedPair::new(z / n, z % n)))?);
    let dd = Arc::new(dual_complex(&d));

    let phi_d: BTreeMap<Elem, ChainMap> =
        p.s.elements
            .iter()
            .map(|a| Ok((a.clone(), tensor_map_between(&dual_map(p.phi(&g.inv(a))?), p.phi(a)?, d.clone(), d.clone()))))
            .collect::<Result<_>>()?;
    let mut h_d = BTreeMap::new();
    for (a, b) in p.composable() {
        let (ai, bi) = (g.inv(&a), g.inv(&b));
        let first = tensor_map_between(&dual_map(p.homotopy(&bi, &ai)?), &p.phi(&a)?.after(p.phi(&b)?), d.clone(), d.clone());
        let second = tensor_map_between(&dual_map(p.phi(&g.inv(&g.mul(&a, &b)))?), p.homotopy(&a, &b)?, d.clone(), d.clone());
        h_d.insert((a, b), first.add(&second));
    }
    let chain = HomotopySChainComplex { group: g.clone(), s: p.s.clone(), p: d.clone(), phi: phi_d, h: h_d };
    chain.validate()?;

    let mu = mult_hyperbolic_complex(&p.p)?.psi.with_ends(dd.clone(), d.clone())?;
    let mut bad = Vec::new();
    if dual_map(&mu).comps() != iota(&d).after(&mu).comps() {
        bad.push("μ^{-*} ≠ ι∘μ".to_string());
    }
    for a in &chain.s.elements {
        let lhs = mu.after(&dual_map(&chain.phi[&g.inv(a)]).with_ends(dd.clone(), dd.clone())?);
        let rhs = chain.phi[a].after(&mu);
        if lhs != rhs {
            bad.push(format!("μ∘(φ^D_{{{}⁻¹}})^{{-*}} ≠ φ^D_{}∘μ", g.name(a), g.name(a)));
        }
    }
    let top = p.p.hi().max(-p.p.lo);
    if d.len() > 0 && (d.lo < -top || d.hi() > top) {
        bad.push(format!("D lives in {}..{}, outside −{top}..{top}", d.lo, d.hi()));
    }
    if mu.support().iter().any(|(x, y)| x != y) {
        bad.push("μ is not supported on the diagonal".into());
    }
    if !bad.is_empty() {
        return Err(Error::IdentityFailure(bad.join("; ")));
    }
    let certificate = chain.certify(&p2a)?;
    Ok(LSymmetric { p2, action: p2a, d: chain, d_dual: dd, mu, certificate })
}

/// ψ + ι⁻¹ψ^{-*} letterwise: (ψ^{-*})_a = (ψ_{a⁻¹})^{-*}, read in C's degrees.
pub fn eq_symmetrization(group: &GroupBackend, psi: &EqChainMap) -> EqChainMap {
    let keys: BTreeSet<Elem> = psi.letters.keys().flat_map(|a| [a.clone(), group.inv(a)]).collect();
    let mut letters = BTreeMap::new();
    for a in keys {
        let own = psi.letter(&a);
        let dual = dual_map(&psi.letter(&group.inv(&a)));
        let comps = psi.src.degrees().map(|n| (n, own.comp(n).add(&dual.comp(n).scale(if n.rem_euclid(2) == 0 { 1 } else { -1 })))).collect();
        letters.insert(a, ChainMap::new(psi.src.clone(), psi.tgt.clone(), 0, comps).expect("same shapes"));
    }
    EqChainMap::new(psi.src.clone(), psi.tgt.clone(), 0, letters).expect("same ends")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LProjection {
    pub character: Vec<i64>,
    pub signature: i64,
    pub alpha_signature: i64,
}

impl LProjection {
    pub fn agrees(&self) -> bool {
        self.signature == self.alpha_signature
    }
}

#[derive(Clone, Debug)]
pub struct LTransfer {
    pub sym: LSymmetric,
    /// M ⊗ D.
    pub c: Arc<ChainComplex>,
    /// ψ̃: (M ⊗ D)^{-*} → M ⊗ D.
    pub psi: EqChainMap,
    /// Homotopy inverse of ψ̃ + ψ̃^{-*} and its two homotopies.
    pub g: EqChainMap,
    pub h: EqChainMap,
    pub k: EqChainMap,
    pub audit: ControlAudit,
    /// The expanded ultra-quadratic complex, re-checked independently (finite groups).
    pub reaudit: Option<UltraQuadraticReport>,
    pub projections: Vec<LProjection>,
}

/// ψ̃ = tr^D(α)∘(id ⊗ μ) with the exact identity ψ̃ + ψ̃^{-*} = tr^D(α + α*)∘(id ⊗ μ).
pub fn l_transfer(
    action: &HomotopySAction,
    p: &HomotopySChainComplex,
    alpha: &EquivariantMorphism,
    beta_inv: Option<&EquivariantMorphism>,
    lambda: Q,
) -> Result<LTransfer> {
    let g = &p.group;
    if alpha.src.len() != alpha.tgt.len() {
        return Err(Error::Shape("α must be square".into()));
    }
    let sym = l_symmetric_complex(action, p)?;
    let m = alpha.tgt.len();
    let beta = alpha.add(&alpha.star(g));
    let binv = inverse_of(g, &beta, beta_inv)?;
    let t: BTreeSet<Elem> = elem_letters(alpha).union(&elem_letters(&binv)).cloned().collect();
    let t_sym = t.iter().flat_map(|a| [a.clone(), g.inv(a)]).collect();
    check_products(g, &p.s, t_sym)?;

    let d = sym.d.p.clone();
    let c = induced_complex(m, &d);
    let cd = Arc::new(dual_complex(&c));
    let id_m = ChainMap::identity(module_complex(m));
    let idmu = EqChainMap::plain(g, tensor_map_between(&id_m, &sym.mu, cd.clone(), c.clone()));
    let mu_inv = signed_perm_inverse(&sym.mu)?;
    let idmu_inv = EqChainMap::plain(g, tensor_map_between(&id_m, &mu_inv, c.clone(), cd.clone()));

    let psi = tr(alpha, &sym.d)?.after(g, &idmu);
    let f = eq_symmetrization(g, &psi);
    if f != tr(&beta, &sym.d)?.after(g, &idmu) {
        return Err(Error::IdentityFailure("ψ̃ + ψ̃^{-*} ≠ tr(α + α*)∘(id ⊗ μ)".into()));
    }
    let gmap = idmu_inv.after(g, &tr(&binv, &sym.d)?);
    let h = idmu_inv.after(g, &functoriality_witness(&binv, &beta, &sym.d)?.h).after(g, &idmu);
    let k = functoriality_witness(&beta, &binv, &sym.d)?.h;
    EqHomotopy { source: gmap.after(g, &f), target: EqChainMap::identity(g, cd.clone()), h: h.clone() }.verify()?;
    EqHomotopy { source: f.after(g, &gmap), target: EqChainMap::identity(g, c.clone()), h: k.clone() }.verify()?;

    let audit = audit_control(&sym.action, lambda, sym.certificate.epsilon(), &[("ψ̃", &psi), ("g", &gmap), ("h", &h), ("k", &k), ("d", &differential(g, &c))])?;
    let reaudit = if g.is_finite() { Some(reaudit(&sym.action, lambda, audit.bound, &c, [&psi, &gmap, &h, &k])?) } else { None };
    if let Some(r) = &reaudit {
        if !r.passed() {
            return Err(Error::IdentityFailure(format!("independent re-audit failed: {}", r.violations.join("; "))));
        }
    }

    let mut projections = Vec::new();
    for chi in characters(g) {
        let fchi = chi_of(&chi);
        let signature_here = homology_signature(&symmetrization(&psi.specialize(&fchi)))?;
        let alpha_signature = signature(&SymmetricForm::new(beta.specialize(&fchi))?)?;
        let character = g.elements().map(|es| es.iter().map(&fchi).collect()).unwrap_or_default();
        projections.push(LProjection { character, signature: signature_here, alpha_signature });
    }
    Ok(LTransfer { sym, c, psi, g: gmap, h, k, audit, reaudit, projections })
}

/// d_{S,Λ} on G × P₂(X) as a control space, unreachable pairs pushed past
/// every finite distance.
fn metric_space(action: &HomotopySAction, lambda: Q) -> Result<ControlSpace> {
    let metric = ActionMetric::new(action, lambda, 0)?;
    let table = metric.table(Mode::default_mode())?;
    let far = table.dist.iter().flatten().filter_map(|d| d.finite()).max().unwrap_or_default() + qi(1);
    let dist = table.dist.iter().map(|r| r.iter().map(|d| if let Dist::Finite(x) = d { *x } else { far }).collect()).collect();
    let names = table.points.iter().map(|(g, x)| format!("({},{x})", action.group.name(g))).collect();
    Ok(ControlSpace { names, dist })
}

/// Expands everything over the finite group and hands it to the generic
/// ultra-quadratic checker.
fn reaudit(action: &HomotopySAction, lambda: Q, bound: Q, c: &Arc<ChainComplex>, maps: [&EqChainMap; 4]) -> Result<UltraQuadraticReport> {
    let g = &action.group;
    let big = Arc::new(expand_complex(g, c)?);
    let big_dual = Arc::new(dual_complex(&big));
    let [psi, gm, h, k] = maps;
    let u = UltraQuadraticComplex::new(
        psi.expand_between(g, big_dual.clone(), big.clone())?,
        gm.expand_between(g, big.clone(), big_dual.clone())?,
        h.expand_between(g, big_dual.clone(), big_dual)?,
        k.expand_between(g, big.clone(), big)?,
    );
    let space = metric_space(action, lambda)?;
    Ok(verify_ultraquadratic(&u, Some((&space, bound))))
}

/// Hyperbolic quadratic form on M = ℤ^{2r} with every basis element at `x0`:
/// α = [[0, I], [0, 0]] at the identity letter.
pub fn hyperbolic_alpha(group: &GroupBackend, r: usize, x0: usize) -> EquivariantMorphism {
    let m = Matrix::from_triplets(2 * r, 2 * r, (0..r).map(|i| (i, r + i, 1)));
    EquivariantMorphism::new(vec![x0; 2 * r], vec![x0; 2 * r], [(group.identity(), m)].into()).expect("square")
}
