//! `fockent` command-line front end.
//!
//! Exit codes: 0 success, 1 mismatch or failed check, 2 unparsable input,
//! 3 well-formed input that is not a valid state for the request.

mod render;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use fockent::asymptotics::{check_superadditivity, scan_split_singles, SuperadditivityReport};
use fockent::sampling::StateSampler;
use fockent::table::{check_rows, reference_rows, ExpectedRow, RowCheck};
use fockent::{
    format_state, full_report, parse_state, Error, Execution, FockState, MeasureReport,
    ModePartition, Statistics,
};

use render::{number, optional, ReportDocument, UNDEFINED};

/// Entanglement of indistinguishable particles in the mode-occupation basis.
#[derive(Parser)]
#[command(name = "fockent", version, about)]
struct Cli {
    /// Particle statistics used to build states
    #[arg(long, value_enum, default_value_t = StatsArg::Boson, global = true)]
    stats: StatsArg,

    /// Emit a JSON report instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Write the report to a file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for commands that sample random states
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsArg {
    Boson,
    Fermion,
}

impl From<StatsArg> for Statistics {
    fn from(s: StatsArg) -> Self {
        match s {
            StatsArg::Boson => Statistics::Boson,
            StatsArg::Fermion => Statistics::Fermion,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute every measure for one state, e.g. "|01,10>+|10,01>"
    Analyze {
        state: String,
    },
    /// Check the reference states against their expected values
    Table1 {
        /// JSON file with expected rows, replacing the built-in table
        #[arg(long)]
        expected: Option<PathBuf>,
    },
    /// Exact and asymptotic particle entanglement of N split single particles
    Scan {
        #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
    /// Compare the particle entanglement of a product with that of its parts
    Superadd {
        #[arg(required_unless_present = "random")]
        psi: Option<String>,
        #[arg(required_unless_present = "random")]
        phi: Option<String>,
        /// Check this many random pairs instead (uses --seed, default 0)
        #[arg(long, conflicts_with_all = ["psi", "phi"])]
        random: Option<usize>,
    },
}

enum Failure {
    Parse(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. } | Error::ArityMismatch { .. } => Failure::Parse(e.to_string()),
            e => Failure::Domain(e.to_string()),
        }
    }
}

struct Outcome {
    text: String,
    doc: ReportDocument,
    ok: bool,
}

fn load(text: &str, stats: Statistics) -> Result<(FockState, ModePartition), Failure> {
    Ok(parse_state(text, stats)?)
}

fn analyze(state: &str, stats: Statistics) -> Result<Outcome, Failure> {
    let (s, p) = load(state, stats)?;
    let report = full_report(&s, p)?;
    let doc = ReportDocument::new("analyze", json!({"state": state, "stats": stats}), &report);
    Ok(Outcome {
        text: analyze_text(state, &report),
        doc,
        ok: true,
    })
}

fn analyze_text(state: &str, r: &MeasureReport) -> String {
    let s_label = match r.stats {
        Statistics::Boson => "S_b",
        Statistics::Fermion => "S_f",
    };
    let mut out = String::new();
    let _ = writeln!(out, "state       {state}");
    let _ = writeln!(out, "statistics  {}", r.stats);
    let _ = writeln!(out, "particles   {}", r.particles);
    let _ = writeln!(out, "modes       {} (Alice {}, Bob {})", r.modes, r.alice_modes, r.modes - r.alice_modes);
    let _ = writeln!(out, "E_M         {}", number(r.e_m));
    let _ = writeln!(out, "E_P         {}", number(r.e_p));
    let _ = writeln!(out, "{s_label}         {}", optional(r.s_single));
    let _ = writeln!(out, "QC          {}", optional(r.qc_fermion));
    let _ = writeln!(out, "Var(N_A)    {}", number(r.variance_alice));
    let _ = writeln!(out, "sectors");
    let _ = writeln!(out, "  {:>3}  {:>10}  {:>10}", "n", "P_n", "E_M");
    for sec in &r.sectors {
        let _ = writeln!(
            out,
            "  {:>3}  {:>10}  {:>10}",
            sec.n,
            number(sec.probability),
            number(sec.mode_entanglement)
        );
    }
    out
}

#[derive(Serialize)]
struct TableEntry<'a> {
    expected: &'a ExpectedRow,
    check: &'a RowCheck,
    passed: bool,
}

fn table1(expected: Option<&PathBuf>) -> Result<Outcome, Failure> {
    let rows = match expected {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Domain(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<Vec<ExpectedRow>>(&text)
                .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?
        }
        None => reference_rows(),
    };
    let checks = check_rows(&rows);
    let ok = checks.iter().all(RowCheck::passed);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<30} {:<8} {:>14} {:>14} {:>14}  result",
        "state", "stats", "E_M", "S", "E_P"
    );
    let pair = |got: String, want: String| format!("{got} ({want})");
    let mut entries = Vec::with_capacity(checks.len());
    for (i, c) in checks.iter().enumerate() {
        let row = &rows[i / 2];
        let want_s = match c.stats {
            Statistics::Boson => row.s_b,
            Statistics::Fermion => row.s_f,
        };
        let (e_m, s, e_p) = match &c.report {
            Some(r) => (
                pair(number(r.e_m), number(row.e_m)),
                pair(optional(r.s_single), optional(want_s)),
                pair(number(r.e_p), number(row.e_p)),
            ),
            None => (UNDEFINED.into(), pair(UNDEFINED.into(), optional(want_s)), UNDEFINED.into()),
        };
        let verdict = match (c.passed(), &c.skipped_reason) {
            (false, _) => format!("FAIL {}", c.mismatches.join("; ")),
            (true, Some(_)) => "SKIP".into(),
            (true, None) => "PASS".into(),
        };
        let _ = writeln!(out, "{:<30} {:<8} {e_m:>14} {s:>14} {e_p:>14}  {verdict}", c.state, c.stats.to_string());
        entries.push(TableEntry {
            expected: row,
            check: c,
            passed: c.passed(),
        });
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(out, "{} checks, {failed} failed", checks.len());
    let input = json!({"expected": expected.map(|p| p.display().to_string())});
    Ok(Outcome {
        text: out,
        doc: ReportDocument::new("table1", input, &entries),
        ok,
    })
}

fn scan(max_n: u64) -> Outcome {
    let rows = scan_split_singles(max_n, Execution::default());
    let mut out = String::new();
    let _ = writeln!(out, "{:>8}  {:>12}  {:>12}  {:>12}  {:>10}", "N", "exact", "asymptote", "difference", "exact/N");
    for r in &rows {
        let _ = writeln!(
            out,
            "{:>8}  {:>12}  {:>12}  {:>12}  {:>10}",
            r.count,
            number(r.exact),
            optional(r.asymptote),
            optional(r.difference),
            optional(r.ratio)
        );
    }
    Outcome {
        text: out,
        doc: ReportDocument::new("scan", json!({"max_n": max_n}), &rows),
        ok: true,
    }
}

fn superadd_text(r: &SuperadditivityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "E_P(psi phi)        {}", number(r.lhs));
    let _ = writeln!(out, "E_P(psi) + E_P(phi) {}", number(r.rhs));
    let _ = writeln!(out, "gap                 {}", number(r.gap));
    let _ = writeln!(out, "Var(N_A) psi        {}", number(r.v_psi));
    let _ = writeln!(out, "Var(N_A) phi        {}", number(r.v_phi));
    let _ = writeln!(out, "equality predicted  {}", r.equality_predicted);
    let _ = writeln!(out, "sector overlap      {}", r.sector_overlap);
    let _ = writeln!(out, "result              {}", if r.holds() { "PASS" } else { "FAIL" });
    out
}

fn superadd(psi: &str, phi: &str, stats: Statistics) -> Result<Outcome, Failure> {
    let (x, px) = load(psi, stats)?;
    let (y, py) = load(phi, stats)?;
    let report = check_superadditivity(&x, px, &y, py)?;
    let input = json!({"psi": psi, "phi": phi, "stats": stats});
    Ok(Outcome {
        text: superadd_text(&report),
        ok: report.holds(),
        doc: ReportDocument::new("superadd", input, &report),
    })
}

#[derive(Serialize)]
struct RandomPair {
    psi: String,
    phi: String,
    report: SuperadditivityReport,
}

fn superadd_random(count: usize, seed: u64, stats: Statistics) -> Result<Outcome, Failure> {
    let mut sampler = StateSampler::new(seed);
    let mut pairs = Vec::with_capacity(count);
    let mut out = String::new();
    for k in 0..count {
        let (x, px) = sampler.random_state(stats);
        let (y, py) = sampler.random_state(stats);
        let report = check_superadditivity(&x, px, &y, py)?;
        let _ = writeln!(
            out,
            "{k:>5}  gap {:>10}  equality predicted {:<5}  sector overlap {:<5}  {}",
            number(report.gap),
            report.equality_predicted,
            report.sector_overlap,
            if report.holds() { "PASS" } else { "FAIL" }
        );
        pairs.push(RandomPair {
            psi: format_state(&x, px),
            phi: format_state(&y, py),
            report,
        });
    }
    let failed = pairs.iter().filter(|p| !p.report.holds()).count();
    let _ = writeln!(out, "{count} pairs, {failed} with negative gap");
    let input = json!({"random": count, "stats": stats});
    Ok(Outcome {
        text: out,
        ok: failed == 0,
        doc: ReportDocument::new("superadd", input, &pairs).with_seed(seed),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let stats = Statistics::from(cli.stats);
    match &cli.command {
        Command::Analyze { state } => analyze(state, stats),
        Command::Table1 { expected } => table1(expected.as_ref()),
        Command::Scan { max_n } => Ok(scan(*max_n)),
        Command::Superadd { random: Some(count), .. } => superadd_random(*count, cli.seed.unwrap_or(0), stats),
        Command::Superadd { psi, phi, .. } => {
            let (Some(psi), Some(phi)) = (psi, phi) else {
                return Err(Failure::Parse("superadd needs two states".into()));
            };
            superadd(psi, phi, stats)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    let body = if cli.json { outcome.doc.to_json() } else { outcome.text };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{body}"),
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
