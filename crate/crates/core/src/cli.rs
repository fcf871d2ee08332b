//! Command-line front end.
//!
//! Exit codes: 0 success, 1 expectation or invariant violation, 2 usage or
//! parse error, 3 state cap exceeded. Machine-readable output is compact JSON
//! on stdout; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::checker::{self, CheckerConfig, CheckerError, CheckerReport, InvariantSelection, Mode};
use crate::ids::{Universe, UniverseSize};
use crate::kernel::{Machine, Mutant, Outcome};
use crate::scenario::{parse_scenario, render_trace, Expectation, Scenario};
use crate::state::{check_invariants, hash_state, InvariantId, InvariantViolation, SystemState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Directory of the shipped property scenarios.
pub const DEFAULT_CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios");

#[derive(Debug, Parser)]
#[command(
    name = "mhr-acl",
    version,
    about = "Executable My Health Record access-control model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay a scenario file and check its expectations.
    Run(RunArgs),
    /// Explore or fuzz the state space of a small universe.
    Check(CheckArgs),
    /// Run every `.scenario` file in a directory.
    Corpus(CorpusArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    path: PathBuf,
    /// Print the final state as JSON instead of the summary.
    #[arg(long)]
    dump: bool,
    /// Echo each step's outcome on stderr.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_parser = parse_mutant)]
    mutant: Option<Mutant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 2)]
    people: u16,
    #[arg(long, default_value_t = 2)]
    spaces: u16,
    #[arg(long, default_value_t = 2)]
    records: u16,
    #[arg(long, default_value_t = 1)]
    providers: u16,
    #[arg(long, default_value_t = 1)]
    operators: u16,
    /// Exhaustive mode only; defaults to 6.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    /// Random mode only; defaults to 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Random mode only; defaults to 100.
    #[arg(long)]
    traces: Option<usize>,
    /// Random mode only; defaults to 20.
    #[arg(long)]
    length: Option<usize>,
    /// Maximum number of distinct states in exhaustive mode.
    #[arg(long, env = "MHR_ACL_CAP", default_value_t = checker::DEFAULT_STATE_CAP)]
    cap: usize,
    /// Comma-separated invariant ids (`INV-9` or `9`); all by default.
    #[arg(long, value_delimiter = ',')]
    invariants: Vec<InvariantId>,
    #[arg(long, value_parser = parse_mutant)]
    mutant: Option<Mutant>,
    /// Where counterexample scenarios are written on violation.
    #[arg(long, default_value = "counterexamples")]
    out_dir: PathBuf,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(default_value = DEFAULT_CORPUS)]
    dir: PathBuf,
}

fn parse_mutant(s: &str) -> Result<Mutant, String> {
    s.parse()
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => cmd_run(&args, out, err),
        Command::Check(args) => cmd_check(&args, out, err),
        Command::Corpus(args) => cmd_corpus(&args.dir, out, err),
    }
}

/// An expectation that the replay contradicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub line: usize,
    pub event: String,
    pub expected: Expectation,
    pub actual: Expectation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
}

/// Result of replaying a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub applied: usize,
    pub denied: usize,
    pub mismatches: Vec<Mismatch>,
    pub violations: Vec<InvariantViolation>,
    pub digest: String,
    #[serde(skip)]
    pub final_state: SystemState,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.violations.is_empty()
    }
}

/// Replays `scenario` and checks every expectation plus the final invariants.
/// `on_step` sees each source line, event and outcome in order.
pub fn execute(
    scenario: &Scenario,
    mutant: Option<Mutant>,
    mut on_step: impl FnMut(usize, &str, &Outcome),
) -> RunSummary {
    let machine = Machine::with_mutant(Universe::new(scenario.universe), mutant);
    let mut state = machine.initial_state();
    let (mut applied, mut denied) = (0, 0);
    let mut mismatches = Vec::new();
    for step in &scenario.steps {
        let (next, outcome) = machine
            .apply(&state, &step.event)
            .expect("scenario identifiers are checked against the universe when parsed");
        let event = step.event.to_string();
        on_step(step.line, &event, &outcome);
        match &outcome {
            Outcome::Applied => applied += 1,
            Outcome::Rejected(_) => denied += 1,
        }
        if let Some(expected) = step.expect {
            if !expected.matches(&outcome) {
                mismatches.push(Mismatch {
                    line: step.line,
                    event,
                    expected,
                    actual: Expectation::of(&outcome),
                    guard: match &outcome {
                        Outcome::Rejected(g) => Some(g.to_string()),
                        Outcome::Applied => None,
                    },
                });
            }
        }
        state = next;
    }
    RunSummary {
        steps: scenario.steps.len(),
        applied,
        denied,
        mismatches,
        violations: check_invariants(&state),
        digest: format!("{:016x}", hash_state(&state)),
        final_state: state,
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) {
    let json = serde_json::to_string(value).expect("output serialization is infallible");
    let _ = writeln!(out, "{json}");
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let scenario = match load_scenario(&args.path) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let summary = execute(&scenario, args.mutant, |line, event, outcome| {
        if args.trace {
            let _ = match outcome {
                Outcome::Applied => writeln!(err, "line {line}: {event} -> ok"),
                Outcome::Rejected(g) => writeln!(
                    err,
                    "line {line}: {event} -> deny ({}: {})",
                    g.guard, g.detail
                ),
            };
        }
    });
    if args.dump {
        let _ = writeln!(out, "{}", summary.final_state.to_json());
    } else {
        emit_json(out, &summary);
    }
    if let Some(m) = summary.mismatches.first() {
        let _ = writeln!(
            err,
            "{}: line {}: `{}` expected {}, got {}",
            args.path.display(),
            m.line,
            m.event,
            m.expected,
            m.actual
        );
    }
    for v in &summary.violations {
        let _ = writeln!(
            err,
            "{}: final state violates {}: {}",
            args.path.display(),
            v.id,
            v.witness
        );
    }
    if summary.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn check_config(args: &CheckArgs) -> Result<CheckerConfig, String> {
    let universe = UniverseSize {
        people: args.people,
        spaces: args.spaces,
        records: args.records,
        providers: args.providers,
        operators: args.operators,
    };
    let (mode, max_depth) = match args.mode {
        ModeArg::Exhaustive => {
            if args.seed.is_some() || args.traces.is_some() || args.length.is_some() {
                return Err("--seed, --traces and --length require --mode random".into());
            }
            (Mode::Exhaustive, args.depth.unwrap_or(6))
        }
        ModeArg::Random => {
            if args.depth.is_some() {
                return Err("--depth applies to --mode exhaustive; use --length".into());
            }
            let length = args.length.unwrap_or(20);
            let mode = Mode::Random {
                seed: args.seed.unwrap_or(0),
                traces: args.traces.unwrap_or(100),
                length,
            };
            (mode, length)
        }
    };
    let invariants = if args.invariants.is_empty() {
        InvariantSelection::All
    } else {
        let mut ids = args.invariants.clone();
        ids.sort();
        ids.dedup();
        InvariantSelection::Subset(ids)
    };
    Ok(CheckerConfig {
        universe,
        max_depth,
        mode,
        invariants,
        state_cap: args.cap,
        mutant: args.mutant,
    })
}

fn counterexample_name(index: usize, ids: &[InvariantId]) -> String {
    let ids: Vec<_> = ids.iter().map(|i| i.to_string()).collect();
    format!("cex_{:02}_{}.scenario", index + 1, ids.join("_"))
}

fn write_counterexamples(dir: &Path, report: &CheckerReport) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, cex) in report.violations.iter().enumerate() {
        let ids: Vec<_> = cex.violated.iter().map(|v| v.id).collect();
        let mut comments = Vec::new();
        if let Some(m) = report.mutant {
            comments.push(format!("mutant: {m}"));
        }
        comments.extend(
            cex.violated
                .iter()
                .map(|v| format!("violates {}: {}", v.id, v.witness)),
        );
        let path = dir.join(counterexample_name(i, &ids));
        fs::write(&path, render_trace(report.universe, &cex.trace, &comments))?;
        written.push(path);
    }
    Ok(written)
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cfg = match check_config(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let report = match checker::run(&cfg) {
        Ok(report) => report,
        Err(e @ CheckerError::CapExceeded { .. }) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CAP;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if args.timing {
        let mut value = serde_json::to_value(&report).expect("report serialization is infallible");
        value["elapsed_ms"] = serde_json::json!(report.elapsed.as_secs_f64() * 1e3);
        emit_json(out, &value);
    } else {
        emit_json(out, &report);
    }
    if report.is_clean() {
        return EXIT_OK;
    }
    match write_counterexamples(&args.out_dir, &report) {
        Ok(paths) => {
            for p in paths {
                let _ = writeln!(err, "counterexample written to {}", p.display());
            }
        }
        Err(e) => {
            let _ = writeln!(
                err,
                "error: writing counterexamples to {}: {e}",
                args.out_dir.display()
            );
        }
    }
    for d in &report.divergences {
        let _ = writeln!(
            err,
            "divergence in {} after {} step(s)",
            d.fields.join(", "),
            d.trace.steps.len()
        );
    }
    EXIT_VIOLATION
}

#[derive(Debug, Serialize)]
struct CorpusEntry {
    file: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    mismatches: Vec<Mismatch>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<InvariantViolation>,
}

#[derive(Debug, Serialize)]
struct CorpusReport {
    files: usize,
    passed: usize,
    results: Vec<CorpusEntry>,
}

/// The `.scenario` files directly inside `dir`, sorted by name.
pub fn scenario_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "scenario"))
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_corpus(dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let files = match scenario_files(dir) {
        Ok(files) => files,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", dir.display());
            return EXIT_USAGE;
        }
    };
    let mut results = Vec::new();
    let mut parse_failure = false;
    for path in &files {
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let entry = match load_scenario(path) {
            Err(msg) => {
                parse_failure = true;
                let _ = writeln!(err, "error: {msg}");
                CorpusEntry {
                    file,
                    passed: false,
                    error: Some(msg),
                    mismatches: vec![],
                    violations: vec![],
                }
            }
            Ok(scenario) => {
                let summary = execute(&scenario, None, |_, _, _| {});
                if !summary.passed() {
                    let _ = writeln!(err, "FAIL {file}");
                }
                CorpusEntry {
                    file,
                    passed: summary.passed(),
                    error: None,
                    mismatches: summary.mismatches,
                    violations: summary.violations,
                }
            }
        };
        results.push(entry);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    emit_json(
        out,
        &CorpusReport {
            files: results.len(),
            passed,
            results,
        },
    );
    if parse_failure {
        EXIT_USAGE
    } else if passed == files.len() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}
