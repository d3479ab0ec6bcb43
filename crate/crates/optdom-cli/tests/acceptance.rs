//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line. Criteria 1-10 drive the library's cross-check battery at
//! fixed case counts and tolerances; criterion 11 exercises the installed
//! binary end to end.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use optdom::exec::ExecMode;
use optdom::factor::{best_constant, power_domination_constant};
use optdom::matop::MatrixOperator;
use optdom::seqspace::SpaceSpec;
use optdom::verify::{self, CheckOutcome};
use optdom::vmeasure::EvalOptions;

const SEED: u64 = 7;

fn gate(idx: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {idx:02} {name}: {verdict} ({detail})");
    assert!(ok, "criterion {idx:02} {name}: FAIL ({detail})");
}

fn gate_outcome(idx: u32, name: &str, out: &CheckOutcome, extra_ok: bool, extra: &str) {
    let detail = if extra.is_empty() {
        format!("{}/{} cases clean; {}", out.cases - out.failures, out.cases, out.detail)
    } else {
        format!("{}/{} cases clean; {}; {}", out.cases - out.failures, out.cases, out.detail, extra)
    };
    gate(idx, name, out.passed() && extra_ok, &detail);
}

#[test]
fn criterion_01_young_inequality_sweep() {
    let start = Instant::now();
    let out = verify::check_young(SEED, 100_000);
    let elapsed = start.elapsed();
    let in_budget = elapsed < Duration::from_secs(5);
    gate_outcome(1, "young-inequality-sweep", &out, in_budget, &format!("{elapsed:.2?} (budget 5s)"));
}

#[test]
fn criterion_02_nonnegative_reduction() {
    let start = Instant::now();
    let out = verify::check_nonnegative_reduction(SEED, 200, ExecMode::default()).unwrap();
    let elapsed = start.elapsed();
    let in_budget = elapsed < Duration::from_secs(30);
    gate_outcome(2, "nonnegative-reduction", &out, in_budget, &format!("{elapsed:.2?} (budget 30s)"));
}

#[test]
fn criterion_03_subset_sup_sandwich() {
    let start = Instant::now();
    let out = verify::check_sandwich(SEED, 200, ExecMode::default()).unwrap();
    let elapsed = start.elapsed();
    let in_budget = elapsed < Duration::from_secs(60);
    gate_outcome(3, "subset-sup-sandwich", &out, in_budget, &format!("{elapsed:.2?} (budget 60s)"));
}

#[test]
fn criterion_04_integral_contraction() {
    let out = verify::check_contraction(SEED, 100, ExecMode::default()).unwrap();
    gate_outcome(4, "integral-contraction", &out, true, "");
}

#[test]
fn criterion_05_closed_form_constants() {
    let out = verify::check_closed_form_constants(SEED, ExecMode::default()).unwrap();

    let opts = EvalOptions { seed: SEED, restarts: 8, ..EvalOptions::default() };
    let pinned =
        best_constant(&MatrixOperator::identity(), &SpaceSpec::lq(1.0), &SpaceSpec::lq(2.0), 4, &opts)
            .unwrap();
    let pinned_ok = (pinned.value - 2.0).abs() <= 0.02 * 2.0;
    gate_outcome(
        5,
        "closed-form-constants",
        &out,
        pinned_ok,
        &format!("identity n=4 q=1 p=2 constant {:.6} vs 2.0", pinned.value),
    );
}

#[test]
fn criterion_06_power_domination() {
    let out = verify::check_domination(SEED, 100, ExecMode::default()).unwrap();

    let opts = EvalOptions { seed: SEED, restarts: 8, ..EvalOptions::default() };
    let pinned =
        power_domination_constant(&MatrixOperator::identity(), &SpaceSpec::lq(1.0), 0.5, 2, &opts)
            .unwrap();
    let pinned_ok = (pinned.value - 2.0).abs() <= 0.01 * 2.0;
    gate_outcome(
        6,
        "power-domination",
        &out,
        pinned_ok,
        &format!("identity n=2 r=1/2 constant {:.6} vs 2.0", pinned.value),
    );
}

#[test]
fn criterion_07_sum_norm_optimality() {
    let out = verify::check_sum_norm(SEED, 50, 1000, ExecMode::default()).unwrap();
    gate_outcome(7, "sum-norm-optimality", &out, true, "");
}

#[test]
fn criterion_08_space_identities() {
    let out = verify::check_space_identities(SEED, 1000).unwrap();
    gate_outcome(8, "space-identities", &out, true, "");
}

#[test]
fn criterion_09_extension_consistency() {
    let out = verify::check_extension(SEED, 1000).unwrap();
    gate_outcome(9, "extension-consistency", &out, true, "");
}

#[test]
fn criterion_10_condition_pipelines() {
    let out = verify::check_condition_pipelines().unwrap();
    gate_outcome(10, "condition-pipelines", &out, true, "");
}

#[test]
fn criterion_11_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_optdom");
    let dir = tempfile::tempdir().unwrap();

    // Same seed given two different ways: flag on the first run, environment
    // variable on the second. Reports must agree byte for byte.
    let analyze = |json: &Path, md: &Path, via_env: bool| {
        let mut cmd = Command::new(bin);
        cmd.args([
            "analyze",
            "--matrix",
            "identity",
            "--codomain",
            r#"{"variant":"lq","q":1}"#,
            "--p",
            "2",
            "--schedule",
            "2,4,8",
            "--out",
            json.to_str().unwrap(),
            "--md",
            md.to_str().unwrap(),
        ]);
        if via_env {
            cmd.env("OPTDOM_SEED", "7");
        } else {
            cmd.args(["--seed", "7"]);
        }
        let output = cmd.output().unwrap();
        assert!(
            output.status.success(),
            "analyze failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    };

    let (json_a, md_a) = (dir.path().join("a.json"), dir.path().join("a.md"));
    let (json_b, md_b) = (dir.path().join("b.json"), dir.path().join("b.md"));
    analyze(&json_a, &md_a, false);
    analyze(&json_b, &md_b, true);
    let json_identical = std::fs::read(&json_a).unwrap() == std::fs::read(&json_b).unwrap();
    let md_identical = std::fs::read(&md_a).unwrap() == std::fs::read(&md_b).unwrap();

    let start = Instant::now();
    let battery = Command::new(bin).args(["verify", "--scale", "quick"]).output().unwrap();
    let elapsed = start.elapsed();
    let battery_ok = battery.status.success() && elapsed < Duration::from_secs(60);

    gate(
        11,
        "cli-determinism",
        json_identical && md_identical && battery_ok,
        &format!(
            "reports byte-identical across seed flag and env runs; quick battery exit {:?} in {elapsed:.2?} (budget 60s)",
            battery.status.code()
        ),
    );
}
