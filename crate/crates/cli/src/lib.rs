//! Command-line front end: reads a formula and domain, solves or evaluates
//! it, and writes JSON results and optional SVG renderings.

mod output;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use aqsolve_core::{
    parse_domain, parse_problem_with, Domain, Formula, FormulaError, SentenceConfig,
    SentenceEvaluator, SolveError, Solver, SolverConfig,
};
use clap::{Args, Parser, Subcommand};

pub use output::{eval_json, solve_json, ResultJson};
pub use svg::{emit_svg, render_svg, SvgError};

#[derive(Debug, Parser)]
#[command(
    name = "aqsolve",
    version,
    about = "Solve formulas with approximate volume quantifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute inner and outer pavings of a formula's solution set.
    Solve(Common),
    /// Decide a sentence by sampling quantifier choices.
    Eval(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Formula file; may also contain a `(domain ...)` form.
    #[arg(long, value_name = "PATH")]
    formula: PathBuf,
    /// Domain file or inline `(domain ...)` text.
    #[arg(long, value_name = "PATH|INLINE")]
    domain: Option<String>,
    /// Error bound on the measure of the undetermined set.
    #[arg(long, value_name = "FLOAT")]
    epsilon: f64,
    /// JSON output file (stdout when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// SVG rendering of a two-variable result.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Box limit per atomic solve.
    #[arg(long, value_name = "INT")]
    max_boxes: Option<usize>,
    /// Sampled values per quantifier tag.
    #[arg(long, value_name = "INT", default_value_t = 3)]
    choices: usize,
    /// Seed for choice sampling when the choice grid is capped.
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
}

/// Failure of a command, mapped to an exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Budget(_) => 2,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> CliError {
        if e.is_budget_failure() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// Prefixes a parse error with its file, keeping the `line:column` form.
fn located(source: &str, e: &FormulaError) -> CliError {
    let sep = if e.location().is_some() { ":" } else { ": " };
    CliError::Input(format!("{source}{sep}{e}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(args: &Common) -> Result<(Formula, Domain), CliError> {
    let external = match &args.domain {
        None => None,
        Some(arg) if Path::new(arg).is_file() => {
            let src = read(Path::new(arg))?;
            Some(parse_domain(&src).map_err(|e| located(arg, &e))?)
        }
        Some(arg) if arg.trim_start().starts_with('(') => {
            Some(parse_domain(arg).map_err(|e| located("<domain>", &e))?)
        }
        Some(arg) => return Err(CliError::Input(format!("cannot read domain file {arg}"))),
    };
    let src = read(&args.formula)?;
    let name = args.formula.display().to_string();
    let (f, d) = parse_problem_with(&src, external.as_ref()).map_err(|e| located(&name, &e))?;
    let d = d.ok_or_else(|| {
        CliError::Input(format!(
            "{name}: no domain: pass --domain or add a (domain ...) form"
        ))
    })?;
    Ok((f, d))
}

fn write_output(args: &Common, json: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &args.out {
        Some(path) => fs::write(path, format!("{json}\n"))
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => writeln!(stdout, "{json}").map_err(|e| CliError::Input(e.to_string())),
    }
}

fn solve(args: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (f, domain) = load(args)?;
    let free = f.free_vars();
    if args.svg.is_some() && free.len() != 2 {
        return Err(SvgError::Dimension(free.len()).into());
    }
    let mut config = SolverConfig::new(args.epsilon);
    if let Some(m) = args.max_boxes {
        config.max_boxes = m;
    }
    let solution = Solver::new(config).solve(&f, &domain)?;
    let json = solve_json(&f, &solution.result);
    write_output(args, &json.to_string_pretty(), stdout)?;
    if let Some(path) = &args.svg {
        emit_svg(&solution.result, path)?;
    }
    Ok(())
}

fn eval(args: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.svg.is_some() {
        return Err(SvgError::Dimension(0).into());
    }
    let (f, domain) = load(args)?;
    let mut config = SentenceConfig::new(args.epsilon, args.choices);
    config.seed = args.seed;
    if let Some(m) = args.max_boxes {
        config.max_boxes = m;
    }
    let report = SentenceEvaluator::new(config).evaluate(&f, &domain)?;
    let json = eval_json(&report);
    let io = |e: std::io::Error| CliError::Input(e.to_string());
    if args.out.is_some() {
        write_output(args, &json.to_string_pretty(), stdout)?;
        writeln!(stdout, "{}", report.verdict).map_err(io)?;
        if let Some(w) = &report.true_witness {
            writeln!(stdout, "true witness: {w}").map_err(io)?;
        }
        if let Some(w) = &report.false_witness {
            writeln!(stdout, "false witness: {w}").map_err(io)?;
        }
        Ok(())
    } else {
        write_output(args, &json.to_string_pretty(), stdout)
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `stdout` and diagnostics to `stderr`. Returns the exit status:
/// 0 on success, 1 on input errors, 2 when the error budget cannot be met.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a, stdout),
        Command::Eval(a) => eval(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let kind = match e {
                CliError::Input(_) => "error",
                CliError::Budget(_) => "budget failure",
            };
            let _ = writeln!(stderr, "aqsolve: {kind}: {e}");
            e.exit_code()
        }
    }
}
