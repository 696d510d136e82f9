//! Command-line front end. [`run`] takes the arguments and output streams
//! so it can be driven from tests; the `gbach` binary only forwards to it.
//!
//! Exit codes: `check` gives 0 when the formula holds, 1 when refuted and
//! 3 when unknown. `parse` gives 1 on diagnostics. Every command gives 2 on
//! usage, I/O or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ast::Program;
use crate::bench::{both_variants, default_cells, run_benchmark, BenchOptions, Cell, Variant, CASES};
use crate::checker::{check, random_run, CheckOptions, Limits, RunEnd, Verdict, MAX_STATES_ENV};
use crate::logic::{PropFormula, TemporalFormula};
use crate::parser::{parse_formula, parse_program, print_program};
use crate::refinement::{transform_to_guarded, Action};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gbach", version, about = "Interpreter and model checker for guarded-list coordination programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and statically check a program.
    Parse {
        file: PathBuf,
    },
    /// Model check a formula.
    Check(CheckArgs),
    /// One random execution, printed as a trace.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Rewrite primitive sequences into guarded lists.
    Transform {
        file: PathBuf,
        /// Formula whose reachability must be kept: a declared name, a
        /// `Reach(...)` formula or a state formula.
        #[arg(long)]
        formula: String,
        /// Also rewrite sequences whose tail may affect the formula.
        #[arg(long)]
        force: bool,
        /// Print the report only.
        #[arg(long)]
        dry_run: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rush Hour benchmark.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, env = MAX_STATES_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_depth: Option<u64>,
    /// Threads computing successors; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl LimitArgs {
    fn options(&self) -> CheckOptions {
        let mut limits = Limits::default();
        if let Some(n) = self.max_states {
            limits.max_states = n as usize;
        }
        limits.max_depth = self.max_depth.map(|d| d as usize);
        CheckOptions { limits, workers: self.workers }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Declared formula name or inline formula; defaults to `goal`, then to
    /// the first declared formula.
    #[arg(long)]
    pub formula: Option<String>,
    /// Write the witness trace here when the formula holds.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated case numbers, run in both variants. Without it:
    /// cases 1-5 with guarded lists and 1-3 without.
    #[arg(long, value_delimiter = ',')]
    pub cases: Option<Vec<usize>>,
    /// Restrict to one variant (GL or NoGL).
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// Write each witness as `case<N>_<variant>.trace` in this directory.
    #[arg(long)]
    pub export_traces: Option<PathBuf>,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(std::env::args_os(), &mut out, &mut err)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let r = match cli.command {
        Command::Parse { file } => cmd_parse(&file, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::Run { file, seed, max_steps, trace_out } => cmd_run(&file, seed, max_steps, trace_out.as_deref(), out),
        Command::Transform { file, formula, force, dry_run, output } => {
            cmd_transform(&file, &formula, force, dry_run, output.as_deref(), out, err)
        }
        Command::Bench(a) => cmd_bench(&a, out),
    };
    match r {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

type CmdResult = Result<i32, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<(String, Program), String> {
    let text = read(path)?;
    match parse_program(&text) {
        Ok(p) => Ok((text, p)),
        Err(diags) => {
            let lines: Vec<String> = diags.iter().map(|d| d.render(&path.display().to_string())).collect();
            Err(lines.join("\n"))
        }
    }
}

fn io(e: std::io::Error) -> String {
    e.to_string()
}

fn cmd_parse(path: &Path, out: &mut dyn Write) -> CmdResult {
    let text = read(path)?;
    let diags = match parse_program(&text) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    };
    let file = path.display().to_string();
    for d in &diags {
        writeln!(out, "{}", d.render(&file)).map_err(io)?;
    }
    writeln!(out, "{} error{}", diags.len(), if diags.len() == 1 { "" } else { "s" }).map_err(io)?;
    Ok(if diags.is_empty() { EXIT_OK } else { EXIT_FAIL })
}

/// A declared formula name, or formula text.
fn resolve_formula(prog: &Program, given: Option<&str>) -> Result<TemporalFormula, String> {
    let given = match given {
        Some(s) => s,
        None if prog.formula("goal").is_some() => "goal",
        None => prog.formulas.first().map(|f| &*f.name).ok_or("no formula given and none declared")?,
    };
    if let Some(tf) = prog.formula(given) {
        return Ok(tf.clone());
    }
    parse_formula(given, prog).map_err(|d| format!("formula: {}", d.message))
}

/// The state formula behind `given`: `Reach(PF)` gives `PF`, and bare state
/// formulas are accepted too.
fn resolve_prop(prog: &Program, given: &str) -> Result<PropFormula, String> {
    let tf = match resolve_formula(prog, Some(given)) {
        Ok(tf) => tf,
        Err(e) => parse_formula(&format!("Reach({given})"), prog).map_err(|_| e)?,
    };
    match (&tf, tf.as_reach()) {
        (_, Some(pf)) => Ok(pf.clone()),
        (TemporalFormula::Prop(pf), None) => Ok(pf.clone()),
        _ => Err(format!("`{given}` is not a reachability formula")),
    }
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> CmdResult {
    let (_, prog) = load(&a.file)?;
    let tf = resolve_formula(&prog, a.formula.as_deref())?;
    let result = check(&prog, &tf, a.limits.options());
    if a.format == Format::Text {
        let line = match &result.verdict {
            Verdict::Holds(t) => format!("{tf} holds (witness of {} steps)", t.len()),
            Verdict::RefutedExhaustive => format!("{tf} is refuted: the whole state space was explored"),
            Verdict::Unknown { reason, .. } => format!("{tf} is unknown: {reason}"),
        };
        writeln!(out, "{line}").map_err(io)?;
    }
    write!(out, "{}", result.report(true)).map_err(io)?;
    if let (Some(path), Some(w)) = (&a.witness, result.verdict.witness()) {
        fs::write(path, w.to_text()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(match result.verdict {
        Verdict::Holds(_) => EXIT_OK,
        Verdict::RefutedExhaustive => EXIT_FAIL,
        Verdict::Unknown { .. } => EXIT_UNKNOWN,
    })
}

fn cmd_run(path: &Path, seed: u64, max_steps: usize, trace_out: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let (_, prog) = load(path)?;
    let r = random_run(&prog, seed, max_steps);
    match trace_out {
        Some(p) => fs::write(p, r.trace.to_text()).map_err(|e| format!("{}: {e}", p.display()))?,
        None => write!(out, "{}", r.trace.to_text()).map_err(io)?,
    }
    let end = match &r.end {
        RunEnd::Terminated => "terminated".to_string(),
        RunEnd::Deadlock => "deadlock".to_string(),
        RunEnd::StepLimit => "step limit".to_string(),
        RunEnd::Error(e) => format!("error: {e}"),
    };
    writeln!(out, "end: {end}\nsteps: {}\nfinal: {}", r.trace.len(), r.trace.final_store()).map_err(io)?;
    Ok(if matches!(r.end, RunEnd::Error(_)) { EXIT_UNKNOWN } else { EXIT_OK })
}

fn cmd_transform(
    path: &Path,
    formula: &str,
    force: bool,
    dry_run: bool,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let (text, prog) = load(path)?;
    let f = resolve_prop(&prog, formula)?;
    let (new, report) = transform_to_guarded(&prog, &f, force);
    let rendered = report.render(&path.display().to_string());
    if dry_run {
        out.write_all(rendered.as_bytes()).map_err(io)?;
        return Ok(EXIT_OK);
    }
    // untouched programs come back byte for byte
    let changed = report.count(Action::Transformed) + report.count(Action::Forced) > 0;
    let program = if changed { print_program(&new) } else { text };
    match output {
        Some(p) => fs::write(p, &program).map_err(|e| format!("{}: {e}", p.display()))?,
        None => out.write_all(program.as_bytes()).map_err(io)?,
    }
    err.write_all(rendered.as_bytes()).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> CmdResult {
    let mut cells = match &a.cases {
        Some(cases) => {
            if let Some(bad) = cases.iter().find(|&&c| c == 0 || c > CASES) {
                return Err(format!("no test case {bad} (cases are 1 to {CASES})"));
            }
            both_variants(cases)
        }
        None => default_cells(),
    };
    if let Some(v) = a.variant {
        cells.retain(|c| c.variant == v);
    }
    let check = a.limits.options();
    let opts = BenchOptions { limits: check.limits, repeats: a.repeats as usize, workers: check.workers };
    let report = run_benchmark(&cells, &opts).map_err(|e| e.to_string())?;
    match a.format {
        Format::Text => out.write_all(report.render().as_bytes()).map_err(io)?,
        Format::Structured => {
            for r in &report.rows {
                let mut res = r.result.clone();
                res.stats.wall = r.wall;
                writeln!(out, "[case {} {}]\n{}", r.cell.case, r.cell.variant, res.report(true)).map_err(io)?;
            }
        }
    }
    if let Some(dir) = &a.export_traces {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        for r in &report.rows {
            if let Some(w) = r.witness() {
                let p = dir.join(trace_file_name(r.cell));
                fs::write(&p, w.to_text()).map_err(|e| format!("{}: {e}", p.display()))?;
            }
        }
    }
    // case 6 without guarded lists may run out of budget
    let expected_unknown = |c: Cell| c == Cell::new(6, Variant::NoGL);
    let ok = report.rows.iter().all(|r| {
        if r.completed() {
            r.validated()
        } else {
            expected_unknown(r.cell)
        }
    });
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

/// `case2_NoGL.trace`
pub fn trace_file_name(cell: Cell) -> String {
    format!("case{}_{}.trace", cell.case, cell.variant)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gbach").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&[]).0, EXIT_ERROR);
        assert_eq!(call(&["bench", "--repeats", "0"]).0, EXIT_ERROR);
        assert_eq!(call(&["check", "x", "--max-states", "0"]).0, EXIT_ERROR);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn missing_file() {
        let (code, _, err) = call(&["parse", "/nonexistent/x.gbach"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("/nonexistent/x.gbach"));
    }
}
