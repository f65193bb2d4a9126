use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use transfer_cli::scenario::canonical_json;
use transfer_cli::suite::{load, run_suite};
use transfer_cli::{run_scenario, validate, Flags, Report, Scenario, Status};
use transfer_core::fixtures::DEFAULT_SEED;
use transfer_core::rational::{parse_q, Q};
use transfer_core::Error;

/// Runs scenario pipelines: controlled metrics, covers, P₂, finite
/// replacements, K- and L-transfers, torsion and signatures.
#[derive(Parser)]
#[command(name = "transfer", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Move horizon for d_{S,Λ} searches and orbits, overriding the scenario.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Comma-separated Λ values, e.g. "1/2,1,2", overriding the scenario.
    #[arg(long, global = true, value_parser = parse_grid)]
    lambda_grid: Option<Grid>,
    /// Number of sampled pairs, overriding the scenario.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Also write the machine-readable report here.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct Target {
    scenario: PathBuf,
    /// Run only this pipeline.
    #[arg(long)]
    pipeline: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the schema and every cross-reference.
    Validate {
        scenario: PathBuf,
    },
    Dslambda(Target),
    Orbit(Target),
    Lebesgue(Target),
    Nerve(Target),
    P2(Target),
    Replace(Target),
    TransferK(Target),
    TransferL(Target),
    Torsion(Target),
    Signature(Target),
    Finobstr(Target),
    /// Run every pipeline of the given scenarios (files or directories) against golden files.
    Suite {
        paths: Vec<PathBuf>,
        /// Rewrite the golden files from the current reports.
        #[arg(long)]
        bless: bool,
    },
}

#[derive(Clone)]
struct Grid(Vec<Q>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.split(',').map(|x| parse_q(x).filter(|q| *q > Q::default()).ok_or_else(|| format!("bad Λ value {x:?}"))).collect::<Result<_, _>>().map(Grid)
}

fn write_json(path: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), Error> {
    if let Some(p) = path {
        fs::write(p, canonical_json(value)).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn emit(report: &Report, json_out: &Option<PathBuf>) -> ExitCode {
    print!("{}", report.to_text());
    let status = report.status();
    if let Err(e) = write_json(json_out, &serde_json::to_value(report).expect("reports serialize")) {
        eprintln!("{e}");
        return ExitCode::from(Status::InputError.exit_code() as u8);
    }
    ExitCode::from(status.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let flags = Flags { seed: g.seed, horizon: g.horizon, lambda_grid: g.lambda_grid.clone().map(|x| x.0), samples: g.samples, mode: None };
    let (kind, target) = match &cli.cmd {
        Cmd::Validate { scenario } => {
            let text = match fs::read_to_string(scenario) {
                Ok(t) => t,
                Err(e) => return emit(&Report::input_error("scenario", &Error::InvalidInput(e.to_string())), &g.json_out),
            };
            let mut report = match Scenario::parse(&text) {
                Ok(s) => {
                    let mut r = validate(&s);
                    if let Some(c) = r.cases.get_mut("scenario").filter(|c| c.status == Status::Pass) {
                        c.data["canonical"] = json!(s.to_canonical() == text);
                    }
                    r
                }
                Err(e) => Report::input_error("scenario", &e),
            };
            report.cases.values_mut().for_each(|c| c.kind = "validate".into());
            return emit(&report, &g.json_out);
        }
        Cmd::Suite { paths, bless } => {
            return match run_suite(paths, &flags, *bless) {
                Ok(rep) => {
                    print!("{}", rep.to_text());
                    if let Err(e) = write_json(&g.json_out, &serde_json::to_value(&rep).expect("reports serialize")) {
                        eprintln!("{e}");
                        return ExitCode::from(2);
                    }
                    ExitCode::from(if rep.passed() { 0 } else { 1 })
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            };
        }
        Cmd::Dslambda(t) => ("dslambda", t),
        Cmd::Orbit(t) => ("orbit", t),
        Cmd::Lebesgue(t) => ("lebesgue", t),
        Cmd::Nerve(t) => ("nerve", t),
        Cmd::P2(t) => ("p2", t),
        Cmd::Replace(t) => ("replace", t),
        Cmd::TransferK(t) => ("transfer-k", t),
        Cmd::TransferL(t) => ("transfer-l", t),
        Cmd::Torsion(t) => ("torsion", t),
        Cmd::Signature(t) => ("signature", t),
        Cmd::Finobstr(t) => ("finobstr", t),
    };
    let report = match load(&target.scenario) {
        Ok(s) => {
            let r = run_scenario(&s, Some(kind), target.pipeline.as_deref(), &flags);
            if r.cases.is_empty() {
                let what = target.pipeline.as_deref().map_or(String::new(), |p| format!(" named {p:?}"));
                Report::input_error("scenario", &Error::InvalidInput(format!("no {kind} pipeline{what} in the scenario")))
            } else {
                r
            }
        }
        Err(e) => Report::input_error("scenario", &e),
    };
    emit(&report, &g.json_out)
}
