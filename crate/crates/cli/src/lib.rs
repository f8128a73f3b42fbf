//! Argument parsing and dispatch for the `coalesce` binary.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing identity or
//! `simulate` flags a discrepancy, 2 for usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coalesce_core::analysis::ChainAnalysis;
use coalesce_core::chain::{build_full_chain, build_stage, StageMatrices};
use coalesce_core::export;
use coalesce_core::linalg::format_rational;
use coalesce_core::partition::{enumerate_stage, weight_vector, SizeCap, StageSpace};
use coalesce_core::simulate::{compare, simulate, SimulationConfig, DEFAULT_Z_THRESHOLD};
use coalesce_core::symmetric::expected_wins;
use coalesce_core::verify::{verify_all, VerificationReport};
use coalesce_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "coalesce",
    version,
    about = "Exact and simulated analysis of the team coalescence chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Number of players.
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    /// Write the document here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest accepted n.
    #[arg(long, default_value_t = coalesce_core::partition::DEFAULT_MAX_N)]
    pub max_n: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the states of every stage, or of stage --t.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<u32>,
    },
    /// The full transition matrix, or the blocks [A_t | A_t,t-1] of stage --t.
    Matrix {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<u32>,
    },
    /// Landing distributions on first entry to each stage.
    Landing {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<u32>,
    },
    /// Expected steps spent in each stage and the total.
    Times {
        #[command(flatten)]
        common: Common,
    },
    /// Variance of the absorption time.
    Variance {
        #[command(flatten)]
        common: Common,
    },
    /// Expected wins per team size from the tridiagonal system.
    Symmetric {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo run compared against the exact values.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
        z_threshold: f64,
    },
    /// Check every exact identity; nonzero exit on any failure.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Check every size from 1 up to --n.
        #[arg(long)]
        sweep: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular | Error::Shape(_) | Error::Infeasible { .. } => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// A rendered document and whether the command's checks passed.
struct Output {
    text: String,
    passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let common = cli.command.common();
    let result = dispatch(&cli.command).and_then(|output| {
        emit(common.out.as_ref(), &output.text, stdout)?;
        Ok(output.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILED
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Enumerate { common, .. }
            | Command::Matrix { common, .. }
            | Command::Landing { common, .. }
            | Command::Times { common }
            | Command::Variance { common }
            | Command::Symmetric { common }
            | Command::Simulate { common, .. }
            | Command::Verify { common, .. } => common,
        }
    }
}

fn emit(path: Option<&PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let result = match path {
        Some(path) => std::fs::write(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush()),
    };
    result.map_err(|e| Failure::Runtime(format!("writing output: {e}")))
}

fn checked(common: &Common) -> Result<SizeCap, Failure> {
    let cap = SizeCap::new(common.max_n)?;
    cap.check(common.n)?;
    Ok(cap)
}

fn check_stage(n: u32, t: Option<u32>) -> Result<(), Failure> {
    match t {
        Some(t) if t == 0 || t > n => Err(Error::InvalidStage { n, t }.into()),
        _ => Ok(()),
    }
}

fn dispatch(command: &Command) -> Result<Output, Failure> {
    let common = command.common();
    let cap = checked(common)?;
    let n = common.n;
    let format = common.format;
    match command {
        Command::Enumerate { t, .. } => {
            check_stage(n, *t)?;
            let stages: Vec<u32> = match t {
                Some(t) => vec![*t],
                None => (1..=n).rev().collect(),
            };
            let spaces = stages
                .into_iter()
                .map(|t| enumerate_stage(n, t, cap))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output::ok(match format {
                Format::Json => export::enumeration_json(n, &spaces),
                Format::Csv => export::enumeration_csv(&spaces)?,
                Format::Pretty => pretty_enumeration(n, &spaces),
            }))
        }
        Command::Matrix { t, .. } => {
            check_stage(n, *t)?;
            let text = match (t, format) {
                (Some(t), Format::Json) => {
                    export::MatrixDump::stage(&build_stage(n, *t, cap)?).to_json()
                }
                (Some(t), Format::Csv) => {
                    export::MatrixDump::stage(&build_stage(n, *t, cap)?).to_csv()?
                }
                (Some(t), Format::Pretty) => pretty_stage_blocks(&build_stage(n, *t, cap)?),
                (None, Format::Json) => {
                    export::MatrixDump::full(&build_full_chain(n, cap)?).to_json()
                }
                (None, Format::Csv) => {
                    export::MatrixDump::full(&build_full_chain(n, cap)?).to_csv()?
                }
                (None, Format::Pretty) => {
                    let chain = build_full_chain(n, cap)?;
                    let mut text = format!("n = {n}\n");
                    for stage in &chain.stages {
                        text.push('\n');
                        text.push_str(&pretty_stage_blocks(stage));
                    }
                    text
                }
            };
            Ok(Output::ok(text))
        }
        Command::Landing { t, .. } => {
            check_stage(n, *t)?;
            let analysis = ChainAnalysis::compute(n, cap)?;
            Ok(Output::ok(match format {
                Format::Json => export::landing_json(&analysis, *t),
                Format::Csv => export::landing_csv(&analysis, *t)?,
                Format::Pretty => pretty_landing(&analysis, *t),
            }))
        }
        Command::Times { .. } => {
            let analysis = ChainAnalysis::compute(n, cap)?;
            Ok(Output::ok(match format {
                Format::Json => export::times_json(&analysis),
                Format::Csv => export::times_csv(&analysis)?,
                Format::Pretty => pretty_times(&analysis),
            }))
        }
        Command::Variance { .. } => {
            let analysis = ChainAnalysis::compute(n, cap)?;
            Ok(Output::ok(match format {
                Format::Json => export::variance_json(&analysis),
                Format::Csv => export::variance_csv(&analysis)?,
                Format::Pretty => format!("{}\n", format_rational(&analysis.variance)),
            }))
        }
        Command::Symmetric { .. } => {
            let x = expected_wins(n)?;
            Ok(Output::ok(match format {
                Format::Json => export::wins_json(n, &x),
                Format::Csv => export::wins_csv(&x)?,
                Format::Pretty => pretty_wins(n, &x),
            }))
        }
        Command::Simulate {
            trials,
            seed,
            z_threshold,
            ..
        } => {
            if !(z_threshold.is_finite() && *z_threshold > 0.0) {
                return Err(Failure::Usage(format!(
                    "--z-threshold must be positive, got {z_threshold}"
                )));
            }
            let config = SimulationConfig::new(n, *trials, *seed)?;
            let report = simulate(&config)?;
            let analysis = ChainAnalysis::compute(n, cap)?;
            let table = compare(&report, &analysis, *z_threshold)?;
            let text = match format {
                Format::Json => export::simulation_json(&report, &table),
                Format::Csv => export::comparison_csv(&table)?,
                Format::Pretty => format!(
                    "n = {n}, {trials} trials, seed {seed}, |z| threshold {z_threshold}\n\n{table}\n{}\n",
                    if table.passed() { "all quantities within threshold" } else { "discrepancies flagged" }
                ),
            };
            Ok(Output {
                text,
                passed: table.passed(),
            })
        }
        Command::Verify { sweep, .. } => {
            let sizes: Vec<u32> = if *sweep { (1..=n).collect() } else { vec![n] };
            let reports = sizes
                .into_iter()
                .map(|n| verify_all(n, cap))
                .collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().all(VerificationReport::passed);
            let text = match format {
                Format::Json => export::verification_json(&reports),
                Format::Csv => export::verification_csv(&reports)?,
                Format::Pretty => pretty_verification(&reports),
            };
            Ok(Output { text, passed })
        }
    }
}

fn pretty_enumeration(n: u32, spaces: &[StageSpace]) -> String {
    let mut text = format!("n = {n}\n");
    for space in spaces {
        let weights = weight_vector(space);
        let _ = writeln!(
            text,
            "\nstage t = {}: {} states, weight sum {}",
            space.t(),
            space.len(),
            weights.sum()
        );
        let width = space
            .states()
            .iter()
            .map(|p| p.part_list().len())
            .max()
            .unwrap_or(0);
        let vwidth = space
            .states()
            .iter()
            .map(|p| p.vector_notation().len())
            .max()
            .unwrap_or(0);
        for (p, w) in space.states().iter().zip(&weights.weights) {
            let _ = writeln!(
                text,
                "  {:<width$}  {:<vwidth$}  {w}",
                p.part_list(),
                p.vector_notation()
            );
        }
    }
    text
}

fn pretty_stage_blocks(stage: &StageMatrices) -> String {
    let title = if stage.a_down.is_some() {
        format!(
            "stage t = {}: [A_{} | A_{},{}]",
            stage.t,
            stage.t,
            stage.t,
            stage.t - 1
        )
    } else {
        format!("stage t = {}: A_{}", stage.t, stage.t)
    };
    let m = stage.combined();
    let rows = stage.space.labels();
    let cols = stage.column_labels();
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rational).collect())
        .collect();
    let label_width = rows.iter().map(String::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols.len())
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].len())
                .chain([cols[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut text = format!("{title}\n{:label_width$}", "");
    let split = stage.space.len();
    for (j, c) in cols.iter().enumerate() {
        let sep = if j == split { " | " } else { "  " };
        let _ = write!(text, "{sep}{c:>w$}", w = widths[j]);
    }
    text.push('\n');
    for (label, row) in rows.iter().zip(&cells) {
        let _ = write!(text, "{label:<label_width$}");
        for (j, cell) in row.iter().enumerate() {
            let sep = if j == split { " | " } else { "  " };
            let _ = write!(text, "{sep}{cell:>w$}", w = widths[j]);
        }
        text.push('\n');
    }
    text
}

fn pretty_landing(analysis: &ChainAnalysis, t: Option<u32>) -> String {
    let mut text = format!("n = {}\n", analysis.n);
    for stage in analysis
        .stages
        .iter()
        .filter(|s| t.is_none_or(|t| s.t == t))
    {
        let _ = writeln!(text, "\nstage t = {}", stage.t);
        let width = stage
            .states
            .iter()
            .map(|p| p.part_list().len())
            .max()
            .unwrap_or(0);
        for (p, l) in stage.states.iter().zip(&stage.landing) {
            let _ = writeln!(text, "  {:<width$}  {}", p.part_list(), format_rational(l));
        }
    }
    text
}

fn pretty_times(analysis: &ChainAnalysis) -> String {
    let mut text = format!("n = {}\n\n  t  e_t,t-1\n", analysis.n);
    for (t, e) in analysis.stage_times() {
        let _ = writeln!(text, "{t:>3}  {}", format_rational(&e));
    }
    let _ = writeln!(text, "\ntotal {}", format_rational(&analysis.total_time));
    text
}

fn pretty_wins(n: u32, x: &[coalesce_core::Rational]) -> String {
    let mut text = format!("n = {n}\n\n  i  x_i\n");
    for (i, v) in x.iter().enumerate() {
        let _ = writeln!(text, "{:>3}  {}", i + 1, format_rational(v));
    }
    let total = coalesce_core::Rational::from_integer(n.into()) * &x[0];
    let _ = writeln!(text, "\nn x_1 = {}", format_rational(&total));
    text
}

fn pretty_verification(reports: &[VerificationReport]) -> String {
    let mut text = String::new();
    for report in reports {
        let _ = writeln!(text, "n = {}", report.n);
        for check in &report.checks {
            match (&check.detail, check.passed) {
                (_, true) => {
                    let _ = writeln!(text, "  PASS {}", check.name);
                }
                (Some(detail), false) => {
                    let _ = writeln!(text, "  FAIL {}: {detail}", check.name);
                }
                (None, false) => {
                    let _ = writeln!(text, "  FAIL {}", check.name);
                }
            }
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        text.push_str("all checks passed\n");
    } else {
        let _ = writeln!(text, "{failed} of {} sizes failed", reports.len());
    }
    text
}
