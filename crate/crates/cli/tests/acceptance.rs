//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 1–13 come from `affine-flow verify all`; criterion 14 reruns the
//! binary with `--threads 1` and compares the two reports byte for byte.
//! The process fails on any unexpected FAIL. C12 is known to fail at the
//! period-one plateau endpoints (see `lambda_structure_is_the_known_one`).

use std::process::{Command, Output};

use affine_flow::verify::lambda_cases;

const BIN: &str = env!("CARGO_BIN_EXE_affine-flow");
const KNOWN_FAILURES: &[&str] = &["C12"];

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("AFFINE_FLOW_THREADS")
        .output()
        .expect("binary runs")
}

/// Interior `{0}`, period-two endpoints `{0, l}`, period-one endpoints `{l}`
/// with `l` stable across depths.
fn lambda_structure_is_the_known_one() -> bool {
    lambda_cases().iter().all(|c| {
        let stable = c.drift.is_some_and(|d| d < 0.01) && c.finite.len() == 1 && !c.infinity;
        match c.period {
            0 => c.as_predicted(),
            1 => !c.zero && stable,
            _ => c.zero && stable,
        }
    })
}

fn main() {
    let first = run(&["verify", "all"]);
    let second = run(&["--threads", "1", "verify", "all"]);
    let text = String::from_utf8_lossy(&first.stdout).into_owned();
    let mut unexpected = Vec::new();

    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with('C')).collect();
    for id in 1..=13 {
        let tag = format!("C{id:02}");
        match lines.iter().find(|l| l.starts_with(&format!("{tag} "))) {
            Some(line) => {
                println!("{line}");
                if !line.starts_with(&format!("{tag} PASS")) {
                    let known = KNOWN_FAILURES.contains(&tag.as_str()) && lambda_structure_is_the_known_one();
                    if !known {
                        unexpected.push(tag);
                    }
                }
            }
            None => {
                println!("{tag} FAIL missing from report");
                unexpected.push(tag);
            }
        }
    }

    let inner = lines.iter().any(|l| l.starts_with("C14 PASS"));
    let same = first.stdout == second.stdout;
    let c14 = inner && same && !first.stdout.is_empty();
    println!(
        "C14 {} determinism measured=byte-identical={same} bound=identical reports in-process-rerun={inner}",
        if c14 { "PASS" } else { "FAIL" }
    );
    if !c14 {
        unexpected.push("C14".into());
    }

    // Exit code 1 iff some criterion failed.
    let expect_code = if text.contains(" FAIL ") { 1 } else { 0 };
    if first.status.code() != Some(expect_code) {
        println!("exit code {:?}, expected {expect_code}", first.status.code());
        unexpected.push("exit-code".into());
    }

    // Forced float backend at depth 20: flagged, not crashed.
    let float = run(&["verify", "all", "--backend", "float", "--renorm-depth", "20"]);
    let ftext = String::from_utf8_lossy(&float.stdout);
    let flagged = float.status.code() == Some(1)
        && ftext
            .lines()
            .any(|l| l.starts_with("C08 FAIL") && l.contains("below f64 resolution"));
    println!(
        "float-depth-20 {} documented precision failure flagged={flagged}",
        if flagged { "PASS" } else { "FAIL" }
    );
    if !flagged {
        unexpected.push("float-depth-20".into());
    }

    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
