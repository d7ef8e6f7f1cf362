use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use covalg_core::algebra::PartialAutomorphism;
use covalg_core::covalg::realize_covariance;
use covalg_core::description::{gallery, gallery_entry, SystemDescription};
use covalg_core::ktheory::{diagram_check, pv_verify, IntMatrix};
use covalg_core::linalg::Tolerances;
use covalg_core::report::Check;
use covalg_core::structure::{verify_structure_theorem, CircleAction, StructureOptions};
use covalg_core::suite::{realize_and_build, validate_suite, SuiteOptions};
use covalg_core::toeplitz::{verify_toeplitz, ToeplitzOptions};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(
    name = "covalg",
    version,
    about = "Covariance algebras of partial automorphisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(clap::Args, Clone)]
struct Flags {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for identity checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Regular-representation level override.
    #[arg(long = "max-level", global = true)]
    max_level: Option<usize>,
    /// Render a table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Check the system and the algebraic laws of L.
    Validate { file: String },
    /// Realize the covariance algebra as a block algebra.
    Build { file: String },
    /// Verify the structure theorem for the described circle action.
    Structure { file: String },
    /// Verify the six-term sequence and the K-theory square.
    Pv { file: String },
    /// Verify the Toeplitz extension.
    Toeplitz { file: String },
    /// List bundled systems, or run the designated commands on one.
    Gallery { file: Option<String> },
}

#[derive(Serialize)]
struct CheckOut {
    name: String,
    status: &'static str,
    residual: Option<f64>,
    certificate: String,
}

#[derive(Serialize)]
struct Report {
    command: String,
    fingerprint: String,
    checks: Vec<CheckOut>,
    seed: u64,
    version: &'static str,
}

#[derive(Serialize)]
struct EntryOut {
    name: &'static str,
    commands: &'static [&'static str],
}

#[derive(Serialize)]
struct Listing {
    command: &'static str,
    entries: Vec<EntryOut>,
    version: &'static str,
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Report(report)) => {
            let passed = report.checks.iter().all(|c| c.status == "pass");
            print_report(&report, cli.flags.pretty);
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(Outcome::Listing(listing)) => {
            if cli.flags.pretty {
                for e in &listing.entries {
                    println!("{:<16} {}", e.name, e.commands.join(", "));
                }
            } else {
                println!("{}", serde_json::to_string(&listing).expect("listing serializes"));
            }
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

enum Outcome {
    Report(Report),
    Listing(Listing),
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    let flags = &cli.flags;
    if !(flags.tol.is_finite() && flags.tol > 0.0) {
        return Err(format!("--tol must be a positive number, got {}", flags.tol));
    }
    let (name, file) = match &cli.command {
        Command::Validate { file } => ("validate", file),
        Command::Build { file } => ("build", file),
        Command::Structure { file } => ("structure", file),
        Command::Pv { file } => ("pv", file),
        Command::Toeplitz { file } => ("toeplitz", file),
        Command::Gallery { file: None } => {
            return Ok(Outcome::Listing(Listing {
                command: "gallery",
                entries: gallery()
                    .iter()
                    .map(|e| EntryOut {
                        name: e.name,
                        commands: e.commands,
                    })
                    .collect(),
                version: VERSION,
            }))
        }
        Command::Gallery { file: Some(file) } => ("gallery", file),
    };
    let (description, designated) = load(file, name == "gallery")?;
    let checks = if name == "gallery" {
        let commands = designated.unwrap_or_else(|| default_commands(&description));
        let mut all = Vec::new();
        for cmd in commands {
            for mut c in execute(cmd, &description, flags)? {
                c.name = format!("{cmd}/{}", c.name);
                all.push(c);
            }
        }
        all
    } else {
        execute(name, &description, flags)?
    };
    Ok(Outcome::Report(report(name, &description, checks, flags.seed)))
}

/// Reads a file, or a bundled system given as `gallery:<name>`. For the
/// gallery command a bare bundled name also resolves.
fn load(file: &str, gallery_command: bool) -> Result<(SystemDescription, Option<Vec<&'static str>>), String> {
    let bundled = |name: &str| {
        let name = name.strip_suffix(".json").unwrap_or(name);
        gallery_entry(name).ok_or_else(|| format!("no bundled system named {name:?}"))
    };
    if let Some(name) = file.strip_prefix("gallery:") {
        let e = bundled(name)?;
        return Ok((e.description(), Some(e.commands.to_vec())));
    }
    if !Path::new(file).exists() && gallery_command {
        let e = bundled(file)?;
        return Ok((e.description(), Some(e.commands.to_vec())));
    }
    let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
    let d = SystemDescription::parse(&text).map_err(|e| format!("{file}: {e}"))?;
    Ok((d, None))
}

fn default_commands(d: &SystemDescription) -> Vec<&'static str> {
    if d.weights.is_some() || d.dual_action {
        return vec!["structure"];
    }
    match d.to_system(1e-9).map(|s| s.chain_bound().finite()) {
        Ok(Some(_)) => vec!["validate", "build", "pv", "toeplitz"],
        _ => vec!["validate", "build"],
    }
}

fn tolerances(flags: &Flags) -> Tolerances {
    Tolerances {
        identity: flags.tol,
        ..Default::default()
    }
}

fn suite_options(flags: &Flags) -> SuiteOptions {
    SuiteOptions {
        tol: tolerances(flags),
        seed: flags.seed,
        max_level: flags.max_level,
        ..Default::default()
    }
}

fn system(d: &SystemDescription, flags: &Flags) -> Result<Arc<PartialAutomorphism>, String> {
    d.to_system(flags.tol.max(1e-9))
        .map(Arc::new)
        .map_err(|e| e.to_string())
}

fn bounded(s: &PartialAutomorphism, what: &str) -> Result<(), String> {
    match s.chain_bound().finite() {
        Some(_) => Ok(()),
        None => Err(format!(
            "the domain chain of this system does not terminate, so {what} is not available; \
             `build` runs the L-level checks instead"
        )),
    }
}

fn execute(command: &str, d: &SystemDescription, flags: &Flags) -> Result<Vec<Check>, String> {
    let opts = suite_options(flags);
    match command {
        "validate" => Ok(validate_suite(&system(d, flags)?, &opts)),
        "build" => {
            let s = system(d, flags)?;
            if s.chain_bound().finite().is_none() {
                let level = opts.max_level.unwrap_or(3);
                let mut checks: Vec<Check> = validate_suite(&s, &opts)
                    .into_iter()
                    .filter(|c| c.name.starts_with("l."))
                    .collect();
                checks.push(Check::boolean(
                    "build.l_level_only",
                    true,
                    format!("L-level only: domain chain does not terminate, sampled up to level {level}"),
                ));
                return Ok(checks);
            }
            Ok(realize_and_build(&s, &opts).1)
        }
        "structure" => {
            let act = match d.circle_action() {
                Some(act) => act.map_err(|e| e.to_string())?,
                None if d.dual_action => {
                    let s = system(d, flags)?;
                    bounded(&s, "the dual action")?;
                    let r = realize_covariance(s, &opts.realize()).map_err(|e| e.to_string())?;
                    CircleAction::new(r.algebra().clone(), r.dual_weights()).map_err(|e| e.to_string())?
                }
                None => return Err("structure needs circle-action weights (or \"dual_action\": true)".into()),
            };
            let sopts = StructureOptions {
                tol: tolerances(flags),
                seed: flags.seed,
                ..Default::default()
            };
            let report = verify_structure_theorem(&act, &sopts).map_err(|e| e.to_string())?;
            let mut checks = report.checks;
            checks.push(Check::boolean(
                "structure.weights",
                true,
                format!(
                    "blocks {:?}, weights {:?}",
                    act.algebra().block_sizes(),
                    act.weights()
                ),
            ));
            Ok(checks)
        }
        "pv" => {
            let s = system(d, flags)?;
            bounded(&s, "the K-theory sequence")?;
            let realize = opts.realize();
            let pv = pv_verify(s.clone(), &realize).map_err(|e| e.to_string())?;
            let diagram = diagram_check(s, &realize).map_err(|e| e.to_string())?;
            let mut checks = pv.checks;
            checks.extend(diagram.checks);
            let matrices = [
                ("pv.matrix.f", &pv.f),
                ("pv.matrix.g", &pv.g),
                ("diagram.matrix.j_star", &diagram.j_star),
                ("diagram.matrix.i_star", &diagram.i_star),
                ("diagram.matrix.d_star", &diagram.d_star),
            ];
            for (name, m) in matrices {
                checks.push(Check::boolean(name, true, matrix_text(m)));
            }
            checks.push(Check::boolean(
                "pv.k0_ranks",
                true,
                format!(
                    "K0(J) = Z^{}, K0(A) = Z^{}, K0(B) = Z^{}",
                    pv.k0_j.rank, pv.k0_a.rank, pv.k0_b.rank
                ),
            ));
            Ok(checks)
        }
        "toeplitz" => {
            let s = system(d, flags)?;
            bounded(&s, "the Toeplitz extension")?;
            let topts = ToeplitzOptions {
                realize: opts.realize(),
                ..Default::default()
            };
            let report = verify_toeplitz(s, &topts).map_err(|e| e.to_string())?;
            let mut checks = report.checks;
            checks.push(Check::boolean(
                "toeplitz.dimensions",
                true,
                format!(
                    "dim E = {}, dim Λ = {}, dim B = {}, E blocks {:?}, Λ blocks {:?}",
                    report.dim_e, report.dim_lambda, report.dim_b, report.e_blocks, report.lambda_blocks
                ),
            ));
            Ok(checks)
        }
        other => Err(format!("{other} is not a command that can run on a system")),
    }
}

fn matrix_text(m: &IntMatrix) -> String {
    serde_json::to_string(&m.to_rows()).expect("integer rows serialize")
}

fn report(command: &str, d: &SystemDescription, mut checks: Vec<Check>, seed: u64) -> Report {
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Report {
        command: command.to_string(),
        fingerprint: hex::encode(Sha256::digest(d.canonical_json().as_bytes())),
        checks: checks
            .into_iter()
            .map(|c| CheckOut {
                name: c.name,
                status: if c.passed { "pass" } else { "fail" },
                residual: c.residual.map(|r| if r.is_finite() { r.abs() } else { r }),
                certificate: c.certificate,
            })
            .collect(),
        seed,
        version: VERSION,
    }
}

fn print_report(r: &Report, pretty: bool) {
    if !pretty {
        println!("{}", serde_json::to_string(r).expect("reports serialize"));
        return;
    }
    println!("command      {}", r.command);
    println!("fingerprint  {}", r.fingerprint);
    println!("seed         {}", r.seed);
    println!("version      {}", r.version);
    println!();
    let width = r
        .checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(5)
        .max(5);
    println!(
        "{:<width$}  {:<6}  {:<10}  certificate",
        "check", "status", "residual"
    );
    for c in &r.checks {
        let residual = c
            .residual
            .map(|x| format!("{x:.3e}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<width$}  {:<6}  {:<10}  {}",
            c.name, c.status, residual, c.certificate
        );
    }
}
