//! Command-line front end.
//!
//! Exit codes: 0 success, 2 validation error, 3 constructor infeasibility,
//! 4 verification failure. Errors are written to stderr as one JSON object.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constructors::{self, BuildParams, FrontierParams};
use crate::equilibrium::{self, StrategyProfile, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::prior::{compute_stats, SymmetricPrior};
use crate::structure::InfoStructure;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "aid", version, about = "Build and audit information structures for second-price auctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a structure from a prior and write it as JSON.
    Build(BuildArgs),
    /// Audit a structure under its prescribed strategies (exit 4 unless a BNE).
    Verify(VerifyArgs),
    /// Exact payoffs of a structure under its prescribed strategies.
    Evaluate(InputArgs),
    /// Sweep an efficient family. CSV columns: param, bidder_surplus, revenue, welfare, is_bne.
    Frontier(FrontierArgs),
    /// Feasible-region vertices and edge samples. CSV columns: label, bidder_surplus, revenue, achieved_by.
    Region(RegionArgs),
    /// Monte-Carlo spot check of exact payoffs plus the brute-force BNE oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    FullExtraction,
    StrictEps,
    DegenerateMax,
    BidderSurplus,
    FrontierAlpha,
    IpvHybrid,
    PointA,
    PointC,
    PointD,
    TargetPayoff,
    FullyRevealing,
    ConstantSignal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Alpha,
    Ipv,
}

#[derive(Debug, Args)]
struct Params {
    /// Number of window grid atoms.
    #[arg(long = "K", default_value_t = 64)]
    k: usize,
    /// Window cap, strictness slack, signal gap or bidder-surplus bound, by kind.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Alpha-family index in [0, (N-1)/N].
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Reveal threshold of the hybrid (defaults to the top value).
    #[arg(long)]
    t: Option<f64>,
    /// Revealed share of the threshold atom, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Target revenue.
    #[arg(long = "R")]
    r: Option<f64>,
    /// Target total bidder surplus.
    #[arg(long = "B")]
    b: Option<f64>,
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Prior JSON file.
    #[arg(long)]
    prior: PathBuf,
    /// Constructor to run.
    #[arg(long, value_enum)]
    kind: Kind,
    #[command(flatten)]
    params: Params,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Structure JSON file.
    structure: PathBuf,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Structure JSON file.
    structure: PathBuf,
    /// Largest deviation gain still accepted as equilibrium.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Full report as JSON; a summary table always goes to stdout.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FrontierArgs {
    /// Family to sweep: alpha over [0, (N-1)/N], or ipv over q in [0, 1] at threshold --t.
    #[arg(long, value_enum)]
    kind: Family,
    /// Prior JSON file.
    #[arg(long)]
    prior: PathBuf,
    /// Number of sweep points, endpoints included.
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[command(flatten)]
    params: Params,
    /// Largest deviation gain still accepted as equilibrium.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RegionArgs {
    /// Prior JSON file.
    #[arg(long)]
    prior: PathBuf,
    /// Interior samples per edge.
    #[arg(long, default_value_t = 4)]
    steps: usize,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Structure JSON file.
    structure: PathBuf,
    /// Monte-Carlo seed, echoed in the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo draws.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Largest deviation gain still accepted as equilibrium.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_infeasible() {
        EXIT_INFEASIBLE
    } else {
        EXIT_INVALID
    }
}

fn report_error(e: &Error) -> i32 {
    let body = ErrorJson { error: e.kind(), message: e.to_string() };
    eprintln!("{}", serde_json::to_string(&body).expect("serializable"));
    exit_code(e)
}

fn init_logging() {
    let env = env_logger::Env::new().filter("AID_LOG");
    let _ = env_logger::Builder::from_env(env).try_init();
}

/// Parse arguments, run one command and return its exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let body = ErrorJson { error: "InvalidArguments", message: e.to_string() };
            eprintln!("{}", serde_json::to_string(&body).expect("serializable"));
            return EXIT_INVALID;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_prior(path: &Path) -> Result<SymmetricPrior> {
    SymmetricPrior::from_json(&std::fs::read_to_string(path)?)
}

fn load_structure(path: &Path) -> Result<InfoStructure> {
    InfoStructure::from_json(&std::fs::read_to_string(path)?)
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Build(a) => {
            let prior = load_prior(&a.prior)?;
            let s = build(&prior, a.kind, &a.params)?;
            log::info!("built {} entries", s.entries().len());
            write_output(a.output.as_deref(), &(s.to_json() + "\n"))?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let s = load_structure(&a.structure)?;
            let sigma = StrategyProfile::truthful(&s);
            let report = equilibrium::verify_strict(&s, &sigma, a.tol);
            print!("{}", summary_table(&s, &sigma, &report));
            if let Some(path) = &a.output {
                write_output(Some(path), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
            Ok(if report.is_bne { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Evaluate(a) => {
            let s = load_structure(&a.structure)?;
            let p = equilibrium::evaluate(&s, &StrategyProfile::truthful(&s))?;
            write_output(a.output.as_deref(), &(serde_json::to_string_pretty(&p)? + "\n"))?;
            Ok(EXIT_OK)
        }
        Command::Frontier(a) => {
            let prior = load_prior(&a.prior)?;
            let csv = frontier_csv(&prior, a.kind, a.steps, &a.params, a.tol)?;
            write_output(a.output.as_deref(), &csv)?;
            Ok(EXIT_OK)
        }
        Command::Region(a) => {
            let prior = load_prior(&a.prior)?;
            write_output(a.output.as_deref(), &emit_region_data(&prior, a.steps)?)?;
            Ok(EXIT_OK)
        }
        Command::Oracle(a) => {
            let s = load_structure(&a.structure)?;
            let sigma = StrategyProfile::truthful(&s);
            let exact = equilibrium::evaluate(&s, &sigma)?;
            let (rev, bs) = equilibrium::monte_carlo(&s, &sigma, a.samples.max(1), a.seed);
            let brute = equilibrium::oracle::brute_force_bne(&s, &sigma, a.tol);
            let out = serde_json::json!({
                "seed": a.seed,
                "samples": a.samples.max(1),
                "exact": {"revenue": exact.revenue, "bidder_surplus": exact.bidder_surplus},
                "monte_carlo": {"revenue": rev, "bidder_surplus": bs},
                "brute_force": brute,
            });
            write_output(a.output.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))?;
            Ok(if brute.is_bne { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

fn build(prior: &SymmetricPrior, kind: Kind, p: &Params) -> Result<InfoStructure> {
    let name = kind.to_possible_value().expect("no skipped variants");
    let params = BuildParams { k: p.k, eps: p.eps, alpha: p.alpha, t: p.t, q: p.q, r: p.r, b: p.b };
    constructors::build_named(prior, name.get_name(), &params)
}

fn summary_table(s: &InfoStructure, sigma: &StrategyProfile, r: &equilibrium::EquilibriumReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<24} {:>14}", "field", "value");
    let kind = s.construction().map(|c| c.kind.clone()).unwrap_or_else(|| "-".into());
    let rows: Vec<(&str, String)> = vec![
        ("construction", kind),
        ("is_bne", r.is_bne.to_string()),
        ("is_strict", r.is_strict.to_string()),
        ("worst_gain", format!("{:.3e}", r.worst_gain)),
        ("worst_gain_no_tie", format!("{:.3e}", r.worst_gain_no_tie)),
        ("tie_slack", format!("{:.3e}", r.tie_slack)),
        ("strict_margin", format!("{:.3e}", r.strict_margin)),
        ("witnesses", r.witnesses.len().to_string()),
        ("overbids", sigma.overbids(s).len().to_string()),
        ("independence_gap", format!("{:.3e}", s.independence_gap())),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<24} {v:>14}");
    }
    out
}

/// Efficient-family sweep as CSV.
fn frontier_csv(prior: &SymmetricPrior, family: Family, steps: usize, p: &Params, tol: f64) -> Result<String> {
    let steps = steps.max(2);
    let n = prior.n() as f64;
    let mut out = String::from("param,bidder_surplus,revenue,welfare,is_bne\n");
    let t = p.t.unwrap_or_else(|| prior.v_bar());
    for j in 0..steps {
        let frac = j as f64 / (steps - 1) as f64;
        let (param, s) = match family {
            Family::Alpha => {
                let alpha = frac * (n - 1.0) / n;
                (alpha, constructors::build_frontier_alpha(prior, FrontierParams::Alpha { alpha, eps: p.eps })?)
            }
            Family::Ipv => (
                frac,
                constructors::build_ipv_hybrid(prior, FrontierParams::Ipv { t, q: frac, k: p.k, eps_cap: p.eps })?,
            ),
        };
        let sigma = StrategyProfile::truthful(&s);
        let pt = equilibrium::evaluate(&s, &sigma)?;
        let bne = equilibrium::verify_bne(&s, &sigma, tol).is_bne;
        let _ = writeln!(out, "{param},{},{},{},{bne}", pt.bidder_surplus, pt.revenue, pt.welfare);
    }
    Ok(out)
}

/// Feasible-region vertices A, B, D, C in `(BS, Rev)` order plus `steps`
/// interior samples per edge.
pub fn emit_region_data(prior: &SymmetricPrior, steps: usize) -> Result<String> {
    let st = compute_stats(prior);
    let vertices = [
        ("A", st.wel_max, 0.0, "point-A"),
        ("B", 0.0, st.wel_max, "full-extraction"),
        ("D", 0.0, st.wel_min, "point-D"),
        ("C", st.wel_min, 0.0, "point-C"),
    ];
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["label", "bidder_surplus", "revenue", "achieved_by"]).map_err(csv_err)?;
    for (label, bs, rev, by) in vertices {
        w.write_record([label.to_string(), bs.to_string(), rev.to_string(), by.to_string()]).map_err(csv_err)?;
    }
    for e in 0..4 {
        let (la, ba, ra, _) = vertices[e];
        let (lb, bb, rb, _) = vertices[(e + 1) % 4];
        if (ba - bb).abs() + (ra - rb).abs() == 0.0 {
            continue;
        }
        for j in 1..=steps {
            let f = j as f64 / (steps + 1) as f64;
            let bs = ba + f * (bb - ba);
            let rev = ra + f * (rb - ra);
            w.write_record([format!("{la}{lb}:{j}"), bs.to_string(), rev.to_string(), "mixture".to_string()])
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn region_vertices_for_p1() {
        let csv = emit_region_data(&fixtures::p1(), 2).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "label,bidder_surplus,revenue,achieved_by");
        assert_eq!(lines[1], "A,0.75,0,point-A");
        assert_eq!(lines[2], "B,0,0.75,full-extraction");
        assert_eq!(lines[3], "D,0,0.25,point-D");
        assert_eq!(lines[4], "C,0.25,0,point-C");
        assert_eq!(lines.len(), 5 + 4 * 2);
    }

    #[test]
    fn degenerate_region_is_a_segment() {
        let csv = emit_region_data(&fixtures::constant(2, 0.5), 3).unwrap();
        // only the A-B and D-C edges have positive length
        assert_eq!(csv.lines().filter(|l| l.contains("mixture")).count(), 6);
    }

    #[test]
    fn kind_names_match_library() {
        let names: Vec<String> =
            Kind::value_variants().iter().map(|k| k.to_possible_value().unwrap().get_name().to_string()).collect();
        assert_eq!(names, constructors::KINDS);
    }

    #[test]
    fn bad_arguments_exit_2() {
        assert_eq!(main_with_args(["aid", "build", "--kind", "nope"]), EXIT_INVALID);
        assert_eq!(main_with_args(["aid", "--help"]), EXIT_OK);
    }
}
