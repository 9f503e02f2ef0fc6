//! Serializable reports emitted by the subcommands.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tailtest_core::baseline_ks::KsResult;
use tailtest_core::null_dist::PValueMethod;
use tailtest_core::statistic::TailSide;

pub const TOOL: &str = "tailtest";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub path: String,
    pub sha256: String,
    pub count: u64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideReport {
    pub side: TailSide,
    /// `None` when the statistic is infinite.
    pub statistic: Option<f64>,
    pub infinite: bool,
    pub clamped_count: u64,
    pub p: f64,
    pub method: PValueMethod,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub tool: String,
    pub version: String,
    pub input: InputSummary,
    pub distribution: String,
    pub a: f64,
    pub n: u64,
    pub alpha: f64,
    pub method_requested: String,
    pub sides: Vec<SideReport>,
    /// Bonferroni combination `min(1, 2 min(p_right, p_left))`, set when
    /// both sides were tested.
    pub combined_p: Option<f64>,
}

impl TestReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let i = &self.input;
        let _ = writeln!(s, "{} {}", self.tool, self.version);
        let _ = writeln!(s, "input:        {} ({} values in [{}, {}])", i.path, i.count, i.min, i.max);
        let _ = writeln!(s, "sha256:       {}", i.sha256);
        let _ = writeln!(s, "distribution: {}", self.distribution);
        let _ = writeln!(s, "a = {}, n = {}, alpha = a/n = {}", self.a, self.n, self.alpha);
        let _ = writeln!(s, "method:       {}", self.method_requested);
        for side in &self.sides {
            let stat = match side.statistic {
                Some(v) => format!("{v:.10}"),
                None => "inf".to_string(),
            };
            let _ = writeln!(
                s,
                "{:<5}  A = {stat}  p = {:.6e}  [{}, error {:.1e}]",
                side.side.to_string(),
                side.p,
                side.method,
                side.error_estimate
            );
            if side.clamped_count > 0 {
                let _ = writeln!(s, "       {} value(s) clamped away from the boundary", side.clamped_count);
            }
        }
        if let Some(p) = self.combined_p {
            let _ = writeln!(s, "both   p = {p:.6e}  [Bonferroni combination of the two sides]");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub tool: String,
    pub version: String,
    pub sample_a: InputSummary,
    /// The second sample for the two-sample test.
    pub sample_b: Option<InputSummary>,
    /// The model for the one-sample test.
    pub distribution: Option<String>,
    pub result: KsResult,
}

impl KsReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let r = &self.result;
        let _ = writeln!(s, "{} {}", self.tool, self.version);
        let _ = writeln!(s, "sample a:     {} ({} values)", self.sample_a.path, self.sample_a.count);
        match (&self.sample_b, &self.distribution) {
            (Some(b), _) => {
                let _ = writeln!(s, "sample b:     {} ({} values)", b.path, b.count);
            }
            (None, Some(d)) => {
                let _ = writeln!(s, "distribution: {d}");
            }
            _ => {}
        }
        let _ = writeln!(s, "D = {:.10}  lambda = {:.10}  p = {:.6e}", r.d, r.lambda, r.p.unwrap_or(f64::NAN));
        if r.small_sample {
            let _ = writeln!(s, "note: effective sample size below 20, the asymptotic p-value is approximate");
        }
        s
    }
}
