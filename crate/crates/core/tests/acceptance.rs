//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use opalg::cb::{cb_lower_bound, transpose_cb_oracle};
use opalg::harness::{
    suite_conjecture, suite_cor_cp, suite_lifting_contract, suite_local_lifting, suite_stormer_roundtrip,
    suite_thm_main, suite_yeadon_roundtrip, ConjectureOptions, SuiteReport,
};
use opalg::linmap::opposite_transfer;
use opalg::Algebra;

const SEED: u64 = 20240601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn suite_outcome(report: &SuiteReport, limit: Option<Duration>) -> Outcome {
    let within = limit.is_none_or(|l| report.wall_time_ms <= l.as_millis());
    let mut detail = format!(
        "{} instances, {} failures, {} ms",
        report.instances, report.failures, report.wall_time_ms
    );
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {} ms)", l.as_millis()));
    }
    if let Some(r) = report.records.iter().find(|r| !r.passed) {
        detail.push_str(&format!(
            "; first failure #{}: {}",
            r.index,
            r.error.clone().unwrap_or_else(|| serde_json::to_string(&r.verdicts).unwrap_or_default())
        ));
    }
    Outcome { passed: report.passed && within, detail }
}

/// Transpose cb norm at `k = n` within 2% of `n^{|1−2/p|}`, never above it
/// by more than 1e-6, under 10 s per pair.
fn transpose_anchor() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let t = opposite_transfer(&Algebra::full(n));
        for (label, p) in [("1", 1.0), ("4/3", 4.0 / 3.0), ("2", 2.0), ("4", 4.0), ("inf", f64::INFINITY)] {
            let start = Instant::now();
            let est = cb_lower_bound(&t, p, n, 32, SEED).expect("valid inputs");
            let secs = start.elapsed().as_secs_f64();
            let oracle = transpose_cb_oracle(n, p);
            let ok = (est.lower - oracle).abs() <= 0.02 * oracle && est.lower <= oracle + 1e-6 && secs < 10.0;
            passed &= ok;
            parts.push(format!("n={n} p={label}: {:.6}/{:.6} {:.2}s{}", est.lower, oracle, secs, if ok { "" } else { " !" }));
        }
    }
    Outcome { passed, detail: parts.join(", ") }
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 transpose cb-norm anchor", Box::new(transpose_anchor)),
        (
            "2 central decomposition roundtrip (50, 1e-9)",
            Box::new(|| suite_outcome(&suite_stormer_roundtrip(SEED, 50), Some(Duration::from_secs(30)))),
        ),
        (
            "3 isometry factorization roundtrip (50, 1e-8)",
            Box::new(|| suite_outcome(&suite_yeadon_roundtrip(SEED, 50), Some(Duration::from_secs(60)))),
        ),
        ("4 local lifting at 1 equals wJw (1e-9)", Box::new(|| suite_outcome(&suite_local_lifting(SEED, 50), None))),
        (
            "5 four-way agreement (20 hom-only + 20 anti)",
            Box::new(|| suite_outcome(&suite_cor_cp(SEED, 40), None)),
        ),
        ("6 structural cb value vs degree", Box::new(|| suite_outcome(&suite_thm_main(SEED, 30), None))),
        ("7 local lifting contract (20)", Box::new(|| suite_outcome(&suite_lifting_contract(SEED, 20), None))),
        (
            "8 conjecture search, 20 trials at p = 1",
            Box::new(|| {
                let report = suite_conjecture(SEED, 20, ConjectureOptions::new(1.0, 3)).expect("p = 1 is valid");
                suite_outcome(&report, None)
            }),
        ),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        if !outcome.passed {
            failed += 1;
        }
        println!("{tag} criterion {name} [{:.1}s] {}", start.elapsed().as_secs_f64(), outcome.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
