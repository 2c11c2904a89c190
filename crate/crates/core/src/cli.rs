//! Command-line front end. Output is JSON or CSV unless `--pretty` is given.
//!
//! Exit codes: 0 ok, 2 input error, 3 numeric non-convergence, 4 property
//! violation, 5 output I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::basmajian::{graph_bounds, surface_lower_bound, BoundVariant, Orthospectrum};
use crate::chord::{realize_graph, ChordDiagram, LengthRange};
use crate::error::Error;
use crate::graph::{GraphSpec, MetricGraph};
use crate::lim::{volume_entropy_with, EntropyOptions, DEFAULT_TOL_H};
use crate::remark::survey_claim;
use crate::survey::{run_survey, write_csv, SurveyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Volume entropy of metric graphs and Basmajian-type inequalities for
/// chord graphs.
///
/// Settings are taken from flags first, then from `ORTHO_*` environment
/// variables, then from built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "orthoentropy", version)]
pub struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Volume entropy of a graph file.
    Entropy(EntropyArgs),
    /// Check the double inequality on a chord diagram.
    Verify(VerifyArgs),
    /// Randomized survey of chord diagrams, written as CSV.
    Survey(SurveyArgs),
    /// Randomized check of the segment counting claim.
    Remark(RemarkArgs),
}

#[derive(Debug, Args)]
struct EntropyArgs {
    /// Graph JSON file.
    path: PathBuf,
    /// Bisection width for h.
    #[arg(long, env = "ORTHO_TOL", default_value_t = DEFAULT_TOL_H)]
    tol: f64,
    /// Fail instead of removing degree-1 vertices.
    #[arg(long)]
    no_prune: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Only the graph double inequality.
    Graph,
    /// Also the surface bound with arcsinh(Σ ...).
    Theorem1,
    /// Also the surface bound with arcsinh(2 Σ ...).
    EqBasm,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Chord diagram JSON file, or an inline JSON document.
    input: String,
    #[arg(long, env = "ORTHO_VARIANT", value_enum, default_value_t = VariantArg::Graph)]
    variant: VariantArg,
    #[arg(long, env = "ORTHO_TOL", default_value_t = DEFAULT_TOL_H)]
    tol: f64,
}

#[derive(Debug, Args)]
struct SurveyArgs {
    #[arg(long, env = "ORTHO_N_MAX", default_value_t = 8)]
    n_max: usize,
    #[arg(long, env = "ORTHO_TRIALS", default_value_t = 100)]
    trials: usize,
    #[arg(long, env = "ORTHO_SEED", default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when omitted.
    #[arg(long, env = "ORTHO_OUT")]
    out: Option<PathBuf>,
    /// Add the covering-tree estimate on every `--oracle-stride`-th trial.
    #[arg(long)]
    with_oracle: bool,
    #[arg(long, env = "ORTHO_ORACLE_STRIDE", default_value_t = 10)]
    oracle_stride: usize,
    #[arg(long, env = "ORTHO_ARC_MIN", default_value_t = 0.05)]
    arc_min: f64,
    #[arg(long, env = "ORTHO_ARC_MAX", default_value_t = 4.0)]
    arc_max: f64,
    #[arg(long, env = "ORTHO_CHORD_MIN", default_value_t = 0.05)]
    chord_min: f64,
    #[arg(long, env = "ORTHO_CHORD_MAX", default_value_t = 4.0)]
    chord_max: f64,
    #[arg(long, env = "ORTHO_TOL", default_value_t = DEFAULT_TOL_H)]
    tol: f64,
}

#[derive(Debug, Args)]
struct RemarkArgs {
    /// Largest number of segments.
    #[arg(long = "N", env = "ORTHO_N", default_value_t = 50)]
    n_max: usize,
    #[arg(long, env = "ORTHO_TRIALS", default_value_t = 10_000)]
    trials: usize,
    #[arg(long, env = "ORTHO_SEED", default_value_t = 0)]
    seed: u64,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::NotAtEntropy { .. } | Error::BudgetExceeded { .. } => {
            EXIT_NUMERIC
        }
        _ => EXIT_INPUT,
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    pretty: bool,
}

impl Io<'_> {
    fn fail(&mut self, err: &Error) -> i32 {
        let _ = writeln!(self.err, "error: {err}");
        exit_code(err)
    }

    fn emit(&mut self, value: &serde_json::Value, pretty_text: impl FnOnce() -> String) -> i32 {
        let written = if self.pretty {
            writeln!(self.out, "{}", pretty_text())
        } else {
            writeln!(self.out, "{value}")
        };
        if written.is_err() {
            EXIT_IO
        } else {
            EXIT_OK
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let mut io = Io {
        out,
        err,
        pretty: cli.pretty,
    };
    match cli.command {
        Command::Entropy(a) => cmd_entropy(&a, &mut io),
        Command::Verify(a) => cmd_verify(&a, &mut io),
        Command::Survey(a) => cmd_survey(&a, &mut io),
        Command::Remark(a) => cmd_remark(&a, &mut io),
    }
}

fn cmd_entropy(args: &EntropyArgs, io: &mut Io) -> i32 {
    let graph = match GraphSpec::from_path(&args.path).and_then(MetricGraph::new) {
        Ok(g) => g,
        Err(e) => return io.fail(&e),
    };
    let opts = EntropyOptions {
        tol_h: args.tol,
        auto_prune: !args.no_prune,
        ..EntropyOptions::default()
    };
    let result = match volume_entropy_with(&graph, &opts) {
        Ok(r) => r,
        Err(e) => return io.fail(&e),
    };
    let bracket: Vec<f64> = result.bracket.map(|(a, b)| vec![a, b]).unwrap_or_default();
    let value = json!({
        "h": result.h,
        "residual": result.residual,
        "bracket": bracket,
        "removed_vertices": result.removed_vertices,
    });
    io.emit(&value, || {
        format!(
            "h = {:.12}\nresidual = {:.3e}\nbracket = {:?}\nremoved vertices = {:?}",
            result.h, result.residual, bracket, result.removed_vertices
        )
    })
}

fn read_diagram(input: &str) -> crate::Result<ChordDiagram> {
    if input.trim_start().starts_with('{') {
        ChordDiagram::from_json(input)
    } else {
        ChordDiagram::from_path(input)
    }
}

fn cmd_verify(args: &VerifyArgs, io: &mut Io) -> i32 {
    let cd = match read_diagram(&args.input) {
        Ok(cd) => cd,
        Err(e) => return io.fail(&e),
    };
    let entropy = match volume_entropy_with(&realize_graph(&cd), &EntropyOptions::with_tol(args.tol)) {
        Ok(r) => r,
        Err(e) => return io.fail(&e),
    };
    let report = graph_bounds(&cd, entropy.h);
    let circle = cd.circle_length();
    let mut value = json!({
        "h": entropy.h,
        "L": circle,
        "lower": report.lower,
        "middle": report.middle,
        "upper": report.upper,
        "slack_lower": report.slack_lower,
        "slack_upper": report.slack_upper,
        "strict_lower": report.strict_lower,
        "strict_upper": report.strict_upper,
    });
    let mut ok = report.strict();
    let variant = match args.variant {
        VariantArg::Graph => None,
        VariantArg::Theorem1 => Some(BoundVariant::Theorem1),
        VariantArg::EqBasm => Some(BoundVariant::EqBasm),
    };
    let mut bound_line = String::new();
    if let Some(variant) = variant {
        let os = Orthospectrum::new(cd.chords().to_vec()).expect("diagram chords are positive");
        let bound = match surface_lower_bound(&os, entropy.h, variant) {
            Ok(b) => b,
            Err(e) => return io.fail(&e),
        };
        ok &= circle > bound;
        value["variant"] = json!(variant);
        value["surface_bound"] = json!(bound);
        value["surface_bound_holds"] = json!(circle > bound);
        bound_line = format!("\nL = {circle:.10} vs surface bound {bound:.10}");
    }
    let code = io.emit(&value, || {
        format!(
            "h = {:.12}\n{:.10} < {:.10} < {:.10}  (slacks {:.3e}, {:.3e}){}",
            entropy.h,
            report.lower,
            report.middle,
            report.upper,
            report.slack_lower,
            report.slack_upper,
            bound_line
        )
    });
    if code != EXIT_OK {
        code
    } else if ok {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn cmd_survey(args: &SurveyArgs, io: &mut Io) -> i32 {
    if args.n_max == 0 || args.oracle_stride == 0 {
        return io.fail(&Error::InvalidArgument(
            "--n-max and --oracle-stride must be positive".into(),
        ));
    }
    let config = SurveyConfig {
        n_max: args.n_max,
        trials: args.trials,
        seed: args.seed,
        arc_range: LengthRange::new(args.arc_min, args.arc_max),
        chord_range: LengthRange::new(args.chord_min, args.chord_max),
        oracle_stride: args.with_oracle.then_some(args.oracle_stride),
        tol_h: args.tol,
    };
    let records = match run_survey(&config) {
        Ok(r) => r,
        Err(e) => return io.fail(&e),
    };
    let violations = records.iter().filter(|r| !r.strict()).count();
    let written = match &args.out {
        Some(path) => File::create(path)
            .map_err(Error::from)
            .and_then(|f| write_csv(&records, BufWriter::new(f))),
        None => write_csv(&records, &mut *io.out),
    };
    if let Err(e) = written {
        let _ = writeln!(io.err, "error: {e}");
        return EXIT_IO;
    }
    if let Some(path) = &args.out {
        let value = json!({
            "trials": records.len(),
            "violations": violations,
            "out": path,
        });
        let code = io.emit(&value, || {
            format!("{} trials, {violations} violations, written to {}", records.len(), path.display())
        });
        if code != EXIT_OK {
            return code;
        }
    }
    if violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

fn cmd_remark(args: &RemarkArgs, io: &mut Io) -> i32 {
    let summary = match survey_claim(args.n_max, args.trials, args.seed) {
        Ok(s) => s,
        Err(e) => return io.fail(&e),
    };
    let value = serde_json::to_value(&summary).expect("summary serializes");
    let code = io.emit(&value, || {
        format!(
            "{} instances with N <= {}, {} failures",
            summary.checked, summary.n_max, summary.failures
        )
    });
    if code != EXIT_OK {
        code
    } else if summary.failures > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("orthoentropy").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verify_inline_theta() {
        let (code, out, _) = call(&["verify", r#"{"n":1,"arcs":[1,1],"matching":[[1,2]],"chords":[1]}"#]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["lower"].as_f64().unwrap() - 0.6).abs() < 1e-9);
        assert!((v["middle"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert!((v["upper"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    }

    #[test]
    fn verify_with_surface_variant() {
        let (code, out, _) = call(&[
            "verify",
            "--variant",
            "eq-basm",
            r#"{"n":2,"arcs":[0.3,1,0.2,2],"matching":[[1,3],[2,4]],"chords":[0.5,1.5]}"#,
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["variant"], "eq_basm");
        assert_eq!(v["surface_bound_holds"], true);
    }

    #[test]
    fn malformed_matching_is_an_input_error() {
        let (code, _, err) = call(&["verify", r#"{"n":2,"arcs":[1,1,1,1],"matching":[[1,2],[2,3]],"chords":[1,1]}"#]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("error"));
    }

    #[test]
    fn missing_file_and_bad_flags() {
        assert_eq!(call(&["entropy", "/nonexistent/graph.json"]).0, EXIT_INPUT);
        assert_eq!(call(&["survey", "--trials", "many"]).0, EXIT_INPUT);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn remark_summary() {
        let (code, out, _) = call(&["remark", "--N", "12", "--trials", "50", "--seed", "3"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["checked"], 50);
        assert_eq!(v["failures"], 0);
    }

    #[test]
    fn survey_to_stdout() {
        let (code, out, _) = call(&["survey", "--trials", "5", "--seed", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 6);
        assert_eq!(out.lines().next().unwrap(), crate::survey::CSV_HEADER);
    }

    #[test]
    fn survey_to_unwritable_path_is_io_error() {
        let (code, _, _) = call(&["survey", "--trials", "2", "--out", "/nonexistent/dir/out.csv"]);
        assert_eq!(code, EXIT_IO);
    }
}
