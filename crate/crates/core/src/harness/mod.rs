//! Seeded verification suites. Each suite is a pure function of its seed,
//! trial count and numeric defaults; instances run in parallel and records
//! are emitted in instance order.

mod generate;
mod suites;

pub use generate::{
    generate_instance, random_algebra, random_cp_map, random_isometry, random_jordan_spec, random_linmap,
    random_positive_weight, Instance, SpecStyle, EXPONENTS,
};
pub use suites::{
    suite_conjecture, suite_cor_cp, suite_lifting_contract, suite_local_lifting, suite_stormer_roundtrip,
    suite_thm_main, suite_yeadon_roundtrip, builder_cb_bound, ConjectureOptions,
};

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::rng::derive_seed;

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub index: usize,
    pub seed: u64,
    /// SHA-256 of the instance inputs as JSON.
    pub digest: String,
    pub passed: bool,
    pub verdicts: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    /// Replayable data for failing records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn new(index: usize, seed: u64, inputs: &impl Serialize) -> Self {
        let bytes = serde_json::to_vec(inputs).unwrap_or_default();
        Self {
            index,
            seed,
            digest: hex::encode(Sha256::digest(&bytes)),
            passed: true,
            verdicts: BTreeMap::new(),
            residuals: BTreeMap::new(),
            witness: None,
            error: None,
        }
    }

    pub fn verdict(&mut self, name: &str, value: impl Serialize) {
        self.verdicts.insert(name.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.to_string(), value);
    }

    /// Records `ok`; a false value fails the record.
    pub fn require(&mut self, name: &str, ok: bool) {
        self.verdict(name, ok);
        self.passed &= ok;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub passed: bool,
    pub failures: usize,
    pub wall_time_ms: u128,
    pub records: Vec<Record>,
}

/// Runs `check` on instance seeds `derive_seed(seed, i)` in parallel. An
/// error from `check` becomes a failing record.
pub(crate) fn run_suite<F>(name: &str, seed: u64, trials: usize, check: F) -> SuiteReport
where
    F: Fn(usize, u64) -> Result<Record> + Sync,
{
    let start = Instant::now();
    let mut records: Vec<Record> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, i as u64);
            check(i, s).unwrap_or_else(|e| {
                let mut r = Record::new(i, s, &s);
                r.passed = false;
                r.error = Some(e.to_string());
                r.witness = Some(serde_json::json!({ "seed": s }));
                r
            })
        })
        .collect();
    records.sort_by_key(|r| r.index);
    let failures = records.iter().filter(|r| !r.passed).count();
    SuiteReport {
        suite: name.to_string(),
        seed,
        instances: trials,
        passed: failures == 0,
        failures,
        wall_time_ms: start.elapsed().as_millis(),
        records,
    }
}
