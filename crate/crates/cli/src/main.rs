use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pqharmonic::classcheck::{bernardi, check_membership, convolve, extremal_function};
use pqharmonic::operator::apply_operator;
use pqharmonic::pq::bracket_pq;
use pqharmonic::verify::{self, Suite, SuiteConfig, SuiteReport, Verdict};
use pqharmonic::{
    ClassParams, DiskGrid, Error, Execution, ExtremalWeights, HarmonicSeries, MembershipReport, OperatorParams,
    PQParams, Part,
};

#[derive(Parser)]
#[command(name = "pqharmonic", version, about = "(p,q)-operator tools for harmonic multivalent series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the (p,q)-bracket [x]_{p,q}.
    Bracket {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Apply the operator to a series.
    Apply {
        #[arg(long)]
        params: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run the coefficient and the analytic class tests on a series.
    Check {
        #[arg(long)]
        class: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Build an extremal function from a unit index or a weights file.
    Extremal {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, required_unless_present = "input", conflicts_with = "input")]
        kappa: Option<u32>,
        #[arg(long, value_enum, default_value_t = PartArg::Analytic)]
        part: PartArg,
        /// Weights file `{"x_ell": .., "x": {..}, "y": {..}}`.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Hadamard product of two series.
    Convolve {
        #[arg(long = "in", num_args = 1, required = true)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Bernardi-type integral transform with parameter u > -1.
    Bernardi {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Run seeded verification suites and write one report per suite.
    Verify {
        #[arg(long)]
        class: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 12)]
        truncation: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated subset of sufficiency,convolution,convex,bernardi,sense.
        #[arg(long, value_delimiter = ',', default_value = "sufficiency,convolution,convex,bernardi,sense")]
        suites: Vec<Suite>,
        #[arg(long)]
        mu: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        /// Directory for report-<suite>-<seed>.json files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Radii x angles, e.g. 64x256.
    #[arg(long, default_value = "64x256")]
    grid: String,
    #[arg(long, default_value_t = 0.995)]
    rmax: f64,
}

impl GridArgs {
    fn build(&self) -> pqharmonic::Result<DiskGrid> {
        DiskGrid::from_spec(&self.grid, self.rmax)
    }
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartArg {
    Analytic,
    #[value(name = "co-analytic")]
    CoAnalytic,
}

impl From<PartArg> for Part {
    fn from(p: PartArg) -> Part {
        match p {
            PartArg::Analytic => Part::Analytic,
            PartArg::CoAnalytic => Part::CoAnalytic,
        }
    }
}

/// Input problems exit 2, verification failures exit 1.
enum Failure {
    Input { kind: &'static str, message: String },
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input { kind: e.kind(), message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input { kind: "io", message: e.to_string() }
    }
}

type CliResult = Result<(), Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input { kind: "io", message: format!("{}: {e}", path.display()) })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input { kind: "json", message: format!("{}: {e}", path.display()) })
}

fn emit(output: &Output, json: String, text: impl FnOnce() -> String) -> CliResult {
    let body = match output.format {
        Format::Json => json,
        Format::Text => text(),
    };
    match &output.out {
        Some(path) => fs::write(path, body + "\n")?,
        None => writeln!(io::stdout(), "{body}")?,
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Error::from(e).into())
}

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && io::stdout().is_terminal()
}

fn mark(ok: bool) -> String {
    let word = if ok { "PASS" } else { "FAIL" };
    if color_enabled() {
        format!("\x1b[{}m{word}\x1b[0m", if ok { 32 } else { 31 })
    } else {
        word.to_string()
    }
}

fn membership_text(r: &MembershipReport) -> String {
    format!(
        "coefficient test: {} (margin {:.6e}, sum {:.6e}, bound {:.6e}{})\n\
         analytic test:    {} (min Re(A/B) {:.6e} at {}, sense gap {:.6e})",
        mark(r.sufficient_verdict),
        r.margin,
        r.coefficient_sum,
        r.bound,
        if r.degenerate { ", degenerate class" } else { "" },
        mark(r.analytic_verdict),
        r.min_re,
        r.argmin_z,
        r.sense_gap_min,
    )
}

fn suite_text(r: &SuiteReport) -> String {
    let mut s = format!(
        "{:<12} {} passed {}, failed {}, singular {}",
        r.suite,
        mark(r.failed == 0 && r.singular == 0),
        r.passed,
        r.failed,
        r.singular
    );
    for t in r.trials.iter().filter(|t| t.verdict != Verdict::Pass) {
        s.push_str(&format!(
            "\n  trial {} (seed {}): {:?} at {:?}",
            t.trial_index, t.seed_used, t.verdict, t.witness_z
        ));
    }
    s
}

fn series_text(f: &HarmonicSeries) -> String {
    let mut s = format!("ell = {}, N = {}", f.ell(), f.truncation());
    for (k, c) in f.a() {
        s.push_str(&format!("\na[{k}] = {c}"));
    }
    for (k, c) in f.b() {
        s.push_str(&format!("\nb[{k}] = {c}"));
    }
    s
}

fn emit_series(output: &Output, f: &HarmonicSeries) -> CliResult {
    emit(output, to_json(f)?, || series_text(f))
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Bracket { p, q, x, output } => {
            let value = bracket_pq(x, PQParams::new(p, q)?)?;
            emit(&output, json!(value).to_string(), || value.to_string())
        }
        Command::Apply { params, input, output } => {
            let op: OperatorParams = read_json(&params)?;
            let f: HarmonicSeries = read_json(&input)?;
            emit_series(&output, &apply_operator(&f, &op)?)
        }
        Command::Check { class, input, grid, output } => {
            let cp: ClassParams = read_json(&class)?;
            let f: HarmonicSeries = read_json(&input)?;
            let report = check_membership(&f, &cp, &grid.build()?, Execution::default())?;
            emit(&output, to_json(&report)?, || membership_text(&report))?;
            if report.sufficient_verdict && report.analytic_verdict {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Extremal { class, kappa, part, input, output } => {
            let cp: ClassParams = read_json(&class)?;
            let weights = match (input, kappa) {
                (Some(path), _) => read_json::<ExtremalWeights>(&path)?,
                (None, Some(k)) => ExtremalWeights::unit(part.into(), k, cp.ell())?,
                (None, None) => unreachable!("clap requires --kappa or --in"),
            };
            emit_series(&output, &extremal_function(&weights, &cp)?)
        }
        Command::Convolve { input, output } => {
            let mut series = input.iter().map(|p| read_json::<HarmonicSeries>(p));
            let mut product = series.next().expect("clap requires one --in")?;
            for next in series {
                product = convolve(&product, &next?)?;
            }
            emit_series(&output, &product)
        }
        Command::Bernardi { input, u, output } => {
            let f: HarmonicSeries = read_json(&input)?;
            emit_series(&output, &bernardi(&f, u)?)
        }
        Command::Verify { class, trials, truncation, seed, suites, mu, grid, out, format } => {
            let config = SuiteConfig {
                class: read_json(&class)?,
                trials,
                truncation,
                grid: grid.build()?,
                seed,
                suites,
                mu,
            };
            let reports = verify::run_suites(&config, Execution::default())?;
            if let Some(dir) = &out {
                fs::create_dir_all(dir)?;
                for r in &reports {
                    fs::write(dir.join(r.file_name()), r.to_json()? + "\n")?;
                }
            }
            let mut stdout = io::stdout();
            match format {
                Format::Json if out.is_none() => writeln!(stdout, "{}", to_json(&reports)?)?,
                Format::Json => {
                    let summary: Vec<_> = reports
                        .iter()
                        .map(|r| json!({"suite": r.suite, "file": r.file_name(), "passed": r.passed, "failed": r.failed, "singular": r.singular}))
                        .collect();
                    writeln!(stdout, "{}", serde_json::to_string_pretty(&summary).map_err(Error::from)?)?
                }
                Format::Text => {
                    for r in &reports {
                        writeln!(stdout, "{}", suite_text(r))?;
                    }
                }
            }
            match verify::exit_status(&reports) {
                0 => Ok(()),
                1 => Err(Failure::Verification),
                _ => Err(Failure::Input {
                    kind: "singular",
                    message: "a trial hit a point where the ratio denominator vanishes; see the report witnesses".into(),
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input { kind, message }) => {
            eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
            ExitCode::from(2)
        }
    }
}
