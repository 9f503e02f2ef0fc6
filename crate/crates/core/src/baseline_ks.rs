//! Kolmogorov-Smirnov baseline.
//!
//! `D = sup |F_A - F_B|`, weighted as `lambda = D / sqrt(1/N_A + 1/N_B)`, with
//! the asymptotic law `P(lambda' > lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::model::CdfModel;
use crate::statistic::Sample;
use crate::{Error, Result};

/// Effective sample size below which the asymptotic p-value is flagged.
pub const SMALL_SAMPLE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d: f64,
    pub lambda: f64,
    pub p: Option<f64>,
    pub n_a: u64,
    /// `None` for the one-sample test against a model.
    pub n_b: Option<u64>,
    pub small_sample: bool,
}

impl KsResult {
    fn new(d: f64, n_a: u64, n_b: Option<u64>) -> Self {
        let effective = match n_b {
            Some(m) => (n_a * m) as f64 / (n_a + m) as f64,
            None => n_a as f64,
        };
        KsResult { d, lambda: d * effective.sqrt(), p: None, n_a, n_b, small_sample: effective < SMALL_SAMPLE }
    }

    /// Fills in the asymptotic p-value.
    pub fn with_p(mut self) -> Self {
        self.p = Some(ks_p(self.lambda));
        self
    }
}

/// Two-sample statistic over the merged breakpoints.
pub fn smirnov_statistic(a: &Sample, b: &Sample) -> KsResult {
    let (xa, xb) = (a.sorted(), b.sorted());
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    // once one sample is exhausted the gap only shrinks
    KsResult::new(d, na as u64, Some(nb as u64))
}

/// One-sample statistic against a model, using both one-sided gaps at each
/// order statistic.
pub fn kolmogorov_statistic(sample: &Sample, model: &dyn CdfModel) -> Result<KsResult> {
    let xs = sample.sorted();
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = model.cdf(x);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidModel(format!("F({x}) = {f} outside [0, 1]")));
        }
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult::new(d, xs.len() as u64, None))
}

/// `2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2)`.
pub fn ks_alternating_series(lambda: f64) -> f64 {
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-18 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    2.0 * sum
}

/// `1 - (sqrt(2 pi)/lambda) sum_{j>=1} exp(-(2j-1)^2 pi^2 / (8 lambda^2))`.
pub fn ks_theta_series(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let c = PI * PI / (8.0 * lambda * lambda);
    let mut sum = 0.0;
    for j in 1..=200 {
        let odd = (2 * j - 1) as f64;
        let term = (-odd * odd * c).exp();
        sum += term;
        if term < 1e-18 * sum || term == 0.0 {
            break;
        }
    }
    1.0 - (2.0 * PI).sqrt() / lambda * sum
}

/// Asymptotic `P(lambda' > lambda)`.
pub fn ks_p(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    let p = if lambda < 1.0 { ks_theta_series(lambda) } else { ks_alternating_series(lambda) };
    p.clamp(0.0, 1.0)
}
