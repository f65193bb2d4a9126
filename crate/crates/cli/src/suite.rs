//! Golden-file suite: every pipeline of every scenario is run and its report
//! compared with `<scenario>.golden.json` beside it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use transfer_core::{Error, Result};

use crate::run::{run_scenario, Flags, Report, Status};
use crate::scenario::{canonical_json, Scenario};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub cases: usize,
    pub matched: usize,
    /// Case ids whose report differs from the golden file (or is missing from it).
    pub mismatched: Vec<String>,
    pub counts: BTreeMap<Status, usize>,
    pub blessed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub scenarios: BTreeMap<String, ScenarioOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.scenarios.values().all(|s| s.mismatched.is_empty())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, s) in &self.scenarios {
            let status = if s.blessed {
                "blessed"
            } else if s.mismatched.is_empty() {
                "ok"
            } else {
                "MISMATCH"
            };
            out.push_str(&format!("{name}: {}/{} cases match golden [{status}]", s.matched, s.cases));
            if !s.mismatched.is_empty() {
                out.push_str(&format!(" differing: {}", s.mismatched.join(", ")));
            }
            out.push('\n');
        }
        let (m, c) = self.scenarios.values().fold((0, 0), |(m, c), s| (m + s.matched, c + s.cases));
        out.push_str(&format!("total: {m}/{c} cases match\n"));
        out
    }
}

pub fn golden_path(scenario: &Path) -> PathBuf {
    let stem = scenario.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    scenario.with_file_name(format!("{stem}.golden.json"))
}

/// Scenario files named by `paths`; directories contribute their `*.json`
/// files other than golden files, in name order.
pub fn discover(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    let name = f.file_name().and_then(|n| n.to_str()).unwrap_or("");
                    name.ends_with(".json") && !name.ends_with(".golden.json")
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text)
}

/// Runs every scenario; with `bless`, golden files are (re)written instead of compared.
pub fn run_suite(paths: &[PathBuf], flags: &Flags, bless: bool) -> Result<SuiteReport> {
    let mut out = SuiteReport::default();
    for path in discover(paths)? {
        let scenario = load(&path)?;
        let report = run_scenario(&scenario, None, None, flags);
        if report.cases.values().any(|c| c.kind == "input") {
            let e = &report.cases.values().next().expect("one case").summary;
            return Err(Error::InvalidInput(format!("{}: {e}", path.display())));
        }
        let gp = golden_path(&path);
        let mut o = ScenarioOutcome { cases: report.cases.len(), counts: report.counts(), ..Default::default() };
        if bless {
            fs::write(&gp, canonical_json(&report)).map_err(|e| Error::InvalidInput(format!("{}: {e}", gp.display())))?;
            o.matched = o.cases;
            o.blessed = true;
        } else {
            let golden: Report = match fs::read_to_string(&gp) {
                Ok(t) => serde_json::from_str(&t).map_err(|e| Error::InvalidInput(format!("{}: {e}", gp.display())))?,
                Err(e) => return Err(Error::InvalidInput(format!("missing golden file {}: {e}", gp.display()))),
            };
            for (id, case) in &report.cases {
                if golden.cases.get(id) == Some(case) {
                    o.matched += 1;
                } else {
                    o.mismatched.push(id.clone());
                }
            }
            o.mismatched.extend(golden.cases.keys().filter(|id| !report.cases.contains_key(*id)).map(|id| format!("{id} (golden only)")));
        }
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("?").to_string();
        out.scenarios.insert(name, o);
    }
    Ok(out)
}
