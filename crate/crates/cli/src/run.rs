//! Runs scenario pipelines and turns their outcomes into reports with a
//! status per case.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use transfer_core::actions::{check_f_cover, contraction_audit, lambda_search, lebesgue_number, nerve_map, ActionMetric, HomotopySAction, Node};
use transfer_core::chain::{finiteness_obstruction, self_torsion, ChainMap, Equivalence};
use transfer_core::fixtures::rng;
use transfer_core::groups::GroupBackend;
use transfer_core::ltheory::{euler_signature_check, signature};
use transfer_core::p2::{all_pair_nodes, omega_audit, p2_action, p2_stabilizer_check, PairNode};
use transfer_core::par::{self, Mode};
use transfer_core::rational::{fmt_q, Q};
use transfer_core::simplicial::p2_simplicial;
use transfer_core::transfer::{finite_replacement, k_transfer, l_transfer, HomotopySChainComplex};
use transfer_core::{Error, Result};

use crate::scenario::{identity_placement, Pipeline, Resolved, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Truncated,
    Violation,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
            Status::InputError => 2,
            Status::Truncated => 3,
        }
    }

    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::HorizonExceeded(_) | Error::SampleBudgetExceeded(_) => Status::Truncated,
            Error::InvalidInput(_) | Error::Shape(_) | Error::UndecidableBackend(_) | Error::EmptyCover | Error::DifferentComplex => Status::InputError,
            _ => Status::Violation,
        }
    }
}

/// Overrides from the command line; `None` keeps the scenario's value.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub seed: u64,
    pub horizon: Option<usize>,
    pub lambda_grid: Option<Vec<Q>>,
    pub samples: Option<usize>,
    pub mode: Option<Mode>,
}

impl Flags {
    fn mode(&self) -> Mode {
        self.mode.unwrap_or_else(Mode::default_mode)
    }

    fn horizon(&self, h: usize) -> usize {
        self.horizon.unwrap_or(h)
    }

    fn grid(&self, g: &[Q]) -> Vec<Q> {
        self.lambda_grid.clone().unwrap_or_else(|| g.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub kind: String,
    pub status: Status,
    pub summary: String,
    pub data: Value,
}

/// Cases keyed by id, so merged output does not depend on scheduling.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub cases: BTreeMap<String, CaseReport>,
}

impl Report {
    pub fn input_error(id: &str, e: &Error) -> Report {
        let case = CaseReport { kind: "input".into(), status: Status::InputError, summary: e.to_string(), data: Value::Null };
        Report { cases: BTreeMap::from([(id.to_string(), case)]) }
    }

    /// Input errors outrank violations, which outrank truncations.
    pub fn status(&self) -> Status {
        let worst = |s: Status| match s {
            Status::Pass => 0,
            Status::Truncated => 1,
            Status::Violation => 2,
            Status::InputError => 3,
        };
        self.cases.values().map(|c| c.status).max_by_key(|s| worst(*s)).unwrap_or(Status::Pass)
    }

    pub fn counts(&self) -> BTreeMap<Status, usize> {
        let mut out = BTreeMap::new();
        for c in self.cases.values() {
            *out.entry(c.status).or_insert(0) += 1;
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, c) in &self.cases {
            let tag = serde_json::to_value(c.status).unwrap();
            out.push_str(&format!("[{}] {id} ({}): {}\n", tag.as_str().unwrap_or("?"), c.kind, c.summary));
        }
        out
    }
}

struct Outcome {
    status: Status,
    summary: String,
    data: Value,
}

fn pass(summary: String, data: Value) -> Result<Outcome> {
    Ok(Outcome { status: Status::Pass, summary, data })
}

fn judged(ok: bool, summary: String, data: Value) -> Result<Outcome> {
    Ok(Outcome { status: if ok { Status::Pass } else { Status::Violation }, summary, data })
}

fn node_json(g: &GroupBackend, (e, x): &Node) -> Value {
    json!([g.name(e), x])
}

fn full_carrier(a: &HomotopySAction) -> Result<Vec<Node>> {
    let elems = a.group.elements().ok_or_else(|| Error::UndecidableBackend("this pipeline needs a finite group".into()))?;
    Ok(elems.into_iter().flat_map(|g| (0..a.npoints()).map(move |x| (g.clone(), x))).collect())
}

/// Runs one pipeline; errors become the matching status.
pub fn run_pipeline(r: &Resolved, p: &Pipeline, flags: &Flags) -> CaseReport {
    let out = execute(r, p, flags).unwrap_or_else(|e| Outcome { status: Status::of_error(&e), summary: e.to_string(), data: Value::Null });
    CaseReport { kind: p.kind().into(), status: out.status, summary: out.summary, data: out.data }
}

fn execute(r: &Resolved, p: &Pipeline, flags: &Flags) -> Result<Outcome> {
    let mode = flags.mode();
    match p {
        Pipeline::Dslambda { action, from, to, lambda, horizon } => {
            let a = r.action(action)?;
            let (x, y) = (r.node(a, from)?, r.node(a, to)?);
            let mut rows = Vec::new();
            let mut truncated = false;
            let mut shown = Vec::new();
            for lam in flags.grid(lambda) {
                let d = ActionMetric::new(a, lam, flags.horizon(*horizon))?.distance(&x, &y);
                truncated |= d.truncated;
                shown.push(format!("Λ={}: {}{}", fmt_q(&lam), d.value, if d.truncated { "+" } else { "" }));
                rows.push(json!({"lambda": fmt_q(&lam), "value": d.value, "truncated": d.truncated}));
            }
            let summary = format!("d_S,Λ({}, {}) {}", from.0, to.0, shown.join(", "));
            Ok(Outcome { status: if truncated { Status::Truncated } else { Status::Pass }, summary, data: Value::Array(rows) })
        }
        Pipeline::Orbit { action, from, n, horizon } => {
            let a = r.action(action)?;
            let orbit = a.s_orbit(*n, &r.node(a, from)?, flags.horizon(*horizon))?;
            let nodes: Vec<Value> = orbit.iter().map(|p| node_json(&a.group, p)).collect();
            pass(format!("|S^{n}·({}, {})| = {}", from.0, from.1, orbit.len()), json!({"size": orbit.len(), "nodes": nodes}))
        }
        Pipeline::Lebesgue { cover, lambda, m, horizon, family, dim } => {
            let (a, spec) = r.cover(cover)?;
            let carrier = full_carrier(a)?;
            let horizon = flags.horizon(*horizon);
            let grid = flags.grid(lambda);
            let mut rows = Vec::new();
            let mut shown = Vec::new();
            for lam in &grid {
                let leb = lebesgue_number(&ActionMetric::new(a, *lam, horizon)?, spec, &carrier, mode)?;
                shown.push(format!("Λ={}: {leb}", fmt_q(lam)));
                rows.push(json!({"lambda": fmt_q(lam), "lebesgue": leb}));
            }
            let mut data = json!({"numbers": rows});
            let mut ok = true;
            let mut summary = format!("Lebesgue numbers {}", shown.join(", "));
            if let Some(m) = m {
                let found = lambda_search(a, spec, &carrier, &grid, *m, horizon, mode)?;
                data["search"] = match &found {
                    Some((lam, leb)) => json!({"lambda": fmt_q(lam), "lebesgue": leb}),
                    None => Value::Null,
                };
                summary += &match found {
                    Some((lam, _)) => format!("; least Λ reaching {}/2 is {}", fmt_q(m), fmt_q(&lam)),
                    None => format!("; no grid Λ reaches {}/2", fmt_q(m)),
                };
            }
            if let Some(f) = family {
                let rep = check_f_cover(&a.group, spec, f, dim.unwrap_or(usize::MAX), &carrier, Some((a, horizon)))?;
                ok = rep.passed();
                summary += &format!("; F-cover violations: {}", rep.violations.len());
                data["cover"] = serde_json::to_value(&rep).expect("report serializes");
            }
            judged(ok, summary, data)
        }
        Pipeline::Nerve { cover, lambda, d, n, horizon } => {
            let (a, spec) = r.cover(cover)?;
            let carrier = full_carrier(a)?;
            let metric = ActionMetric::new(a, *lambda, flags.horizon(*horizon))?;
            let nerve = nerve_map(&metric, spec, &carrier, mode)?;
            let audit = contraction_audit(&metric, &nerve, *d, *n, mode);
            let summary = format!(
                "nerve f-vector {:?}; {} pairs checked, {} with disjoint supports, {} violations",
                nerve.nerve.f_vector(),
                audit.pairs_checked,
                audit.disjoint_support,
                audit.violations.len()
            );
            let data = json!({"f_vector": nerve.nerve.f_vector(), "audit": audit});
            judged(audit.violations.is_empty(), summary, data)
        }
        Pipeline::P2 { action, family, complex, lambda, horizon, samples } => {
            let mut data = json!({});
            let mut ok = true;
            let mut parts = Vec::new();
            if let Some(name) = action {
                let a = r.action(name)?;
                let (_, p2) = p2_action(a)?;
                parts.push(format!("P₂(X) has {} points", p2.pairs.len()));
                data["npairs"] = json!(p2.pairs.len());
                if let Some(f) = family {
                    let reps = p2.pairs.iter().map(|&pair| p2_stabilizer_check(a, pair, f)).collect::<Result<Vec<_>>>()?;
                    let indices: Vec<usize> = reps.iter().map(|s| s.index).collect();
                    parts.push(format!("stabilizer indices {indices:?}"));
                    data["stabilizers"] = serde_json::to_value(&reps).expect("report serializes");
                }
                let elems = a.group.elements().ok_or_else(|| Error::UndecidableBackend("ω sampling needs a finite group".into()))?;
                let nodes = all_pair_nodes(&elems, a.npoints());
                let mut g = rng(flags.seed);
                let n = flags.samples.unwrap_or(*samples);
                let picks: Vec<(PairNode, PairNode)> = (0..n).map(|_| (nodes.choose(&mut g).unwrap().clone(), nodes.choose(&mut g).unwrap().clone())).collect();
                let om = omega_audit(a, *lambda, flags.horizon(*horizon), &picks, mode)?;
                ok &= om.violations.is_empty();
                parts.push(format!("ω bound on {} pairs, {} violations", om.pairs_checked, om.violations.len()));
                data["omega"] = json!({"checked": om.pairs_checked, "inconclusive": om.inconclusive,
                    "max_ratio": om.max_ratio.map(|(a, b)| format!("{a}/{b}")), "violations": om.violations.len()});
            }
            if let Some(name) = complex {
                let cx = r.simplicial(name)?;
                let s = p2_simplicial(cx);
                let (closed, dim) = (s.complex.is_face_closed(), s.complex.dim());
                ok &= closed && dim == 2 * cx.dim();
                parts.push(format!("P₂ of {name}: dim {dim}, face-closed {closed}"));
                data["simplicial"] = json!({"f_vector": s.complex.f_vector(), "dim": dim, "face_closed": closed});
            }
            judged(ok, parts.join("; "), data)
        }
        Pipeline::Replace { c, d, i, r: rr, h, control } => {
            let (cc, dd) = (r.chain(c)?, r.chain(d)?);
            let (im, rm, hm) = (i.build(&cc, &dd)?, rr.build(&dd, &cc)?, h.build(&cc, &cc)?);
            let ctl = match control {
                Some(cs) => Some((r.spaces.get(&cs.space).expect("checked at resolve"), cs.epsilon)),
                None => None,
            };
            let rep = finite_replacement(&cc, &dd, &im, &rm, &hm, ctl)?;
            let ranks: Vec<usize> = rep.p.degrees().map(|n| rep.p.rank(n)).collect();
            let summary = format!("P in degrees {}..{} with ranks {ranks:?}", rep.p.lo, rep.p.hi());
            let data = json!({"n": rep.n, "lo": rep.p.lo, "ranks": ranks, "epsilon": rep.epsilon.map(|e| fmt_q(&e))});
            pass(summary, data)
        }
        Pipeline::TransferK { action, complex, alpha, alpha_inv, lambda } => {
            let a = r.action(action)?;
            let cx = r.simplicial(complex)?;
            let p = HomotopySChainComplex::from_simplicial(a, cx, &identity_placement(cx))?;
            let al = alpha.build(&a.group)?;
            let inv = alpha_inv.as_ref().map(|x| x.build(&a.group)).transpose()?;
            let k = k_transfer(a, &p, &al, inv.as_ref(), *lambda)?;
            let ok = k.projections.iter().all(|p| p.agrees());
            let summary = format!("(S, {})-controlled with worst {}; projections agree: {ok}", fmt_q(&k.audit.bound), fmt_q(&k.audit.worst));
            judged(ok, summary, json!({"certificate": k.certificate, "audit": k.audit, "projections": k.projections}))
        }
        Pipeline::TransferL { action, complex, alpha, beta_inv, lambda } => {
            let a = r.action(action)?;
            let cx = r.simplicial(complex)?;
            let p = HomotopySChainComplex::from_simplicial(a, cx, &identity_placement(cx))?;
            let al = alpha.build(&a.group)?;
            let inv = beta_inv.as_ref().map(|x| x.build(&a.group)).transpose()?;
            let l = l_transfer(a, &p, &al, inv.as_ref(), *lambda)?;
            let reaudit = l.reaudit.as_ref().map_or(true, |u| u.passed());
            let ok = reaudit && l.projections.iter().all(|p| p.agrees());
            let summary = format!(
                "(S, {})-controlled with worst {}; re-audit {reaudit}; projections agree: {}",
                fmt_q(&l.audit.bound),
                fmt_q(&l.audit.worst),
                l.projections.iter().all(|p| p.agrees())
            );
            let data = json!({"certificate": l.sym.certificate, "audit": l.audit, "reaudit": l.reaudit, "projections": l.projections});
            judged(ok, summary, data)
        }
        Pipeline::Torsion { complex, automorphism } => {
            let c = r.chain(complex)?;
            let f = automorphism.build(&c, &c)?;
            if f.degree != 0 {
                return Err(Error::InvalidInput("the automorphism must have degree 0".into()));
            }
            f.check()?;
            let mut inv = BTreeMap::new();
            for n in c.degrees() {
                let m = f.comp(n).inverse().ok_or_else(|| Error::NotAnEquivalence(format!("f_{n} is not invertible over ℤ")))?;
                inv.insert(n, m);
            }
            let g = ChainMap::new(c.clone(), c.clone(), 0, inv)?;
            let z = ChainMap::zero(c.clone(), c.clone(), 1);
            let eq = Equivalence { f, g, h: z.clone(), k: z };
            eq.verify()?;
            let t = self_torsion(&eq)?;
            pass(format!("self-torsion det sign {}", t.det_sign()), json!({"det_sign": t.det_sign(), "trivial": t.is_trivial()}))
        }
        Pipeline::Signature { form, complex } => {
            let mut data = json!({});
            let mut ok = true;
            let mut parts = Vec::new();
            if let Some(name) = form {
                let s = signature(&r.forms[name])?;
                parts.push(format!("signature({name}) = {s}"));
                data["form"] = json!(s);
            }
            if let Some(name) = complex {
                let rep = euler_signature_check(&*r.chain(name)?)?;
                ok = rep.holds();
                parts.push(format!("H_⊗({name}): signature {} vs χ = {}", rep.signature, rep.euler));
                data["complex"] = json!({"signature": rep.signature, "euler": rep.euler, "blocks": rep.blocks, "off_block_zero": rep.off_block_zero});
            }
            judged(ok, parts.join("; "), data)
        }
        Pipeline::Finobstr { complex } => {
            let c = r.chain(complex)?;
            let o = finiteness_obstruction(&c);
            let terms: Vec<Value> = o.terms.iter().map(|(k, p)| json!([k, p.rank()])).collect();
            pass(format!("o(C) has rank {}", o.rank()), json!({"rank": o.rank(), "terms": terms}))
        }
    }
}

/// Runs the pipelines of a scenario, all of them or only those of `kind`,
/// in parallel; returns an input-error report when the scenario does not resolve.
pub fn run_scenario(s: &Scenario, kind: Option<&str>, only: Option<&str>, flags: &Flags) -> Report {
    let resolved = match s.resolve() {
        Ok(r) => r,
        Err(e) => return Report::input_error("scenario", &e),
    };
    let picked: Vec<(&String, &Pipeline)> =
        s.pipelines.iter().filter(|(name, p)| kind.map_or(true, |k| p.kind() == k) && only.map_or(true, |o| o == name.as_str())).collect();
    let cases = par::map(flags.mode(), &picked, |(name, p)| ((*name).clone(), run_pipeline(&resolved, p, flags)));
    Report { cases: cases.into_iter().collect() }
}

/// `validate`: resolution only, one case per section entry.
pub fn validate(s: &Scenario) -> Report {
    match s.resolve() {
        Ok(r) => {
            let data = json!({
                "groups": r.groups.len(), "spaces": r.spaces.len(), "actions": r.actions.len(),
                "covers": r.covers.len(), "complexes": r.complexes.len(), "forms": r.forms.len(),
                "pipelines": s.pipelines.len(),
            });
            let case = CaseReport { kind: "validate".into(), status: Status::Pass, summary: "schema-valid; all references resolve".into(), data };
            Report { cases: BTreeMap::from([("scenario".into(), case)]) }
        }
        Err(e) => Report::input_error("scenario", &e),
    }
}
