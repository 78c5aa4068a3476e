//! Serializable experiment reports. A report is a pure function of its
//! config and seed: no timestamps or timings are stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::ecdf;

/// Number of ECDF grid points stored per arm.
pub const ECDF_POINTS: usize = 41;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub label: String,
    pub n: usize,
    pub samples: usize,
    pub mean: f64,
    pub ecdf: Vec<[f64; 2]>,
    /// Rescaling constants and other per-arm facts.
    #[serde(default)]
    pub metadata: Vec<(String, f64)>,
    /// Raw values; exported to CSV, kept out of the JSON body.
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl Arm {
    /// Builds an arm with an ECDF on an even grid over `[0, max(values)]`.
    pub fn from_values(
        label: impl Into<String>,
        n: usize,
        values: Vec<f64>,
        metadata: Vec<(String, f64)>,
    ) -> Self {
        let samples = values.len();
        let mean = if samples == 0 {
            0.0
        } else {
            values.iter().sum::<f64>() / samples as f64
        };
        let top = values.iter().copied().fold(0.0, f64::max);
        let grid: Vec<f64> = (0..ECDF_POINTS)
            .map(|i| top * i as f64 / (ECDF_POINTS - 1) as f64)
            .collect();
        Arm {
            label: label.into(),
            n,
            samples,
            mean,
            ecdf: ecdf(&values, &grid),
            metadata,
            values,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl TestRecord {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        TestRecord {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic <= threshold,
            detail: None,
        }
    }

    /// Passes when `statistic > threshold`.
    pub fn above(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        TestRecord {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic > threshold,
            detail: None,
        }
    }

    /// Exact check: the statistic counts mismatches and must be zero.
    pub fn exact(name: impl Into<String>, mismatches: usize) -> Self {
        TestRecord::at_most(name, mismatches as f64, 0.0)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub arms: Vec<Arm>,
    pub tests: Vec<TestRecord>,
}

impl ExperimentReport {
    pub fn new(suite: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        ExperimentReport {
            suite: suite.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            arms: Vec::new(),
            tests: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.tests.iter().all(|t| t.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestRecord> {
        self.tests.iter().filter(|t| !t.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad report: {e}")))
    }

    /// Raw samples as `arm,sample_index,value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("arm,sample_index,value\n");
        for arm in &self.arms {
            for (i, v) in arm.values.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", arm.label, i, v));
            }
        }
        out
    }

    /// One line per test.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite {} (seed {:?}, version {})\n",
            self.suite, self.seed, self.version
        );
        for arm in &self.arms {
            out.push_str(&format!(
                "arm {}: n={} samples={} mean={:.6}\n",
                arm.label, arm.n, arm.samples, arm.mean
            ));
        }
        for t in &self.tests {
            let verdict = if t.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{verdict} {} statistic={} threshold={}",
                t.name, t.statistic, t.threshold
            ));
            if let Some(d) = &t.detail {
                out.push_str(&format!(" ({d})"));
            }
            out.push('\n');
        }
        out
    }
}
