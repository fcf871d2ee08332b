//! Acceptance criteria, run in sequence with one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the timed criteria do not share the
//! machine with other tests from this binary.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{
    laws, ACCEPTANCE, ACCEPTANCE_DIAMETER, ACCEPTANCE_REACHABLE_STATES, ACCEPTANCE_STATES_DEPTH_6,
};
use mhr_acl::checker::{explore, fuzz, CheckerConfig};
use mhr_acl::cli::{execute, scenario_files, DEFAULT_CORPUS};
use mhr_acl::kernel::Mutant;
use mhr_acl::scenario::parse_scenario;
use mhr_acl::state::check_invariants;
use mhr_acl::{Machine, Universe};

const EXPLORE_DEPTH: usize = 6;
const EXPLORE_BUDGET: Duration = Duration::from_secs(60);
const FUZZ_SEED: u64 = 1;
const FUZZ_TRACES: usize = 10_000;
const FUZZ_LENGTH: usize = 50;
const FUZZ_BUDGET: Duration = Duration::from_secs(120);
const MIN_SCENARIOS: usize = 30;
const MIN_MUTANTS: usize = 5;
const LAW_CASES: u32 = 1000;

type Verdict = Result<String, String>;
type Criterion = fn() -> Verdict;

fn invariant_preservation() -> Verdict {
    let report = explore(&CheckerConfig::exhaustive(ACCEPTANCE, EXPLORE_DEPTH))
        .map_err(|e| e.to_string())?;
    let detail = format!(
        "depth {}, {} states, {} transitions, {:.2?}",
        report.depth_reached, report.states_visited, report.transitions_fired, report.elapsed
    );
    if !report.violations.is_empty() {
        return Err(format!("{detail}; violations: {}", report.to_json()));
    }
    if report.states_visited != ACCEPTANCE_STATES_DEPTH_6 {
        return Err(format!(
            "{detail}; expected {ACCEPTANCE_STATES_DEPTH_6} states"
        ));
    }
    if report.elapsed > EXPLORE_BUDGET {
        return Err(format!("{detail}; over the {EXPLORE_BUDGET:?} budget"));
    }

    // The same universe explored until no new state appears.
    let closure = explore(&CheckerConfig::exhaustive(
        ACCEPTANCE,
        ACCEPTANCE_DIAMETER + 1,
    ))
    .map_err(|e| e.to_string())?;
    let detail = format!(
        "{detail}; closure: depth {}, {} states, {:.2?}",
        closure.depth_reached, closure.states_visited, closure.elapsed
    );
    if !closure.violations.is_empty() {
        return Err(format!("{detail}; violations: {}", closure.to_json()));
    }
    if !closure.exhausted
        || closure.states_visited != ACCEPTANCE_REACHABLE_STATES
        || closure.depth_reached != ACCEPTANCE_DIAMETER
    {
        return Err(format!(
            "{detail}; expected exhaustion at depth {ACCEPTANCE_DIAMETER} with {ACCEPTANCE_REACHABLE_STATES} states"
        ));
    }
    if closure.elapsed > EXPLORE_BUDGET {
        return Err(format!(
            "{detail}; closure over the {EXPLORE_BUDGET:?} budget"
        ));
    }
    Ok(detail)
}

fn fuzz_suite() -> Verdict {
    let cfg = CheckerConfig::random(ACCEPTANCE, FUZZ_SEED, FUZZ_TRACES, FUZZ_LENGTH);
    let report = fuzz(&cfg).map_err(|e| e.to_string())?;
    let detail = format!(
        "{FUZZ_TRACES} x {FUZZ_LENGTH}, {} states, {} violations, {} divergences, {:.2?}",
        report.states_visited,
        report.violations.len(),
        report.divergences.len(),
        report.elapsed
    );
    if !report.is_clean() {
        return Err(format!("{detail}: {}", report.to_json()));
    }
    if report.elapsed > FUZZ_BUDGET {
        return Err(format!("{detail}; over the {FUZZ_BUDGET:?} budget"));
    }
    Ok(detail)
}

/// The property tag of a corpus file: `p07i_...` gives `p07i`.
fn property_of(name: &str) -> Option<&str> {
    let tag = name.split('_').next()?;
    let digits = tag.strip_prefix('p')?;
    (digits.len() >= 2 && digits[..2].bytes().all(|b| b.is_ascii_digit())).then_some(tag)
}

fn corpus() -> Verdict {
    let files = scenario_files(Path::new(DEFAULT_CORPUS)).map_err(|e| e.to_string())?;
    let mut covered = BTreeSet::new();
    let mut failures = Vec::new();
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        match property_of(&name) {
            Some(tag) => {
                covered.insert(tag.to_string());
            }
            None => failures.push(format!("{name}: not named pNN_*")),
        }
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        match parse_scenario(&text) {
            Err(e) => failures.push(format!("{name}: {e}")),
            Ok(s) => {
                if !execute(&s, None, |_, _, _| {}).passed() {
                    failures.push(format!("{name}: failed"));
                }
            }
        }
    }
    let required = (1..=16)
        .map(|i| format!("p{i:02}"))
        .chain(["p07i".into(), "p13i".into()]);
    let missing: Vec<String> = required.filter(|t| !covered.contains(t)).collect();
    let detail = format!(
        "{} files, {} properties covered",
        files.len(),
        covered.len()
    );
    if files.len() < MIN_SCENARIOS {
        failures.push(format!("fewer than {MIN_SCENARIOS} files"));
    }
    if !missing.is_empty() {
        failures.push(format!("missing {}", missing.join(", ")));
    }
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join("; ")))
    }
}

fn mutation_sensitivity() -> Verdict {
    let mut caught = Vec::new();
    let mut missed = Vec::new();
    for mutant in Mutant::ALL {
        let cfg = CheckerConfig::exhaustive(ACCEPTANCE, EXPLORE_DEPTH).with_mutant(Some(mutant));
        let report = explore(&cfg).map_err(|e| e.to_string())?;
        let machine = Machine::with_mutant(Universe::new(ACCEPTANCE), Some(mutant));
        let replayable = report.violations.iter().find(|cex| {
            cex.trace.steps.len() <= EXPLORE_DEPTH
                && cex
                    .violated
                    .iter()
                    .any(|v| v.id == mutant.expected_violation())
                && machine
                    .replay(&cex.trace)
                    .is_ok_and(|last| check_invariants(&last) == cex.violated)
        });
        match replayable {
            Some(cex) => caught.push(format!("{mutant}@{}", cex.trace.steps.len())),
            None => missed.push(mutant.to_string()),
        }
    }
    let required = [Mutant::DropAct4R1, Mutant::DropGrd1R2];
    let detail = format!(
        "{}/{} caught: {}",
        caught.len(),
        Mutant::ALL.len(),
        caught.join(" ")
    );
    let required_missed = required.iter().any(|m| missed.contains(&m.to_string()));
    if caught.len() >= MIN_MUTANTS && missed.is_empty() && !required_missed {
        Ok(detail)
    } else {
        Err(format!("{detail}; missed {}", missed.join(", ")))
    }
}

fn relational_laws() -> Verdict {
    let failures: Vec<String> = laws::LAWS
        .iter()
        .filter_map(|(name, law)| law(LAW_CASES).err().map(|e| format!("{name}: {e}")))
        .collect();
    let detail = format!("{} laws x {LAW_CASES} cases", laws::LAWS.len());
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join("; ")))
    }
}

fn determinism() -> Verdict {
    let scenario = Path::new(DEFAULT_CORPUS).join("p16_owner_loses_control.scenario");
    let scenario = scenario.to_str().unwrap();
    let invocations: [&[&str]; 5] = [
        &["run", scenario],
        &["run", "--dump", scenario],
        &["check", "--depth", "5"],
        &[
            "check", "--mode", "random", "--seed", "3", "--traces", "200", "--length", "30",
        ],
        &["corpus"],
    ];
    for args in invocations {
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_mhr-acl"))
                .args(args)
                .env_remove("MHR_ACL_CAP")
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (once()?, once()?);
        if a.stdout.is_empty() || a.stdout != b.stdout || a.status != b.status {
            return Err(format!("`{}` differs between runs", args.join(" ")));
        }
        serde_json::from_slice::<serde_json::Value>(&a.stdout)
            .map_err(|e| format!("`{}` is not JSON: {e}", args.join(" ")))?;
    }
    Ok(format!("{} invocations byte-identical", invocations.len()))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, Criterion); 6] = [
        (
            "invariant preservation (exhaustive)",
            invariant_preservation,
        ),
        ("fuzz suite", fuzz_suite),
        ("property corpus", corpus),
        ("mutation sensitivity", mutation_sensitivity),
        ("relational-algebra oracle", relational_laws),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let verdict = criterion();
        let took = started.elapsed();
        match verdict {
            Ok(detail) => println!("PASS criterion {} {name}: {detail} [{took:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} {name}: {detail} [{took:.1?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
