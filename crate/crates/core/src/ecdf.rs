//! Averaged empirical CDFs used as a surrogate theoretical CDF.
//!
//! Averaging `k` empirical CDFs of `n` points each gives a step function
//! `mu(x)` taking values in `{0, 1/(kn), ..., 1}`. At each `x`, `kn mu(x)` is
//! binomial with `kn` trials and success probability `F(x)`.

use crate::model::CdfModel;
use crate::specfun::ln_gamma_real;
use crate::statistic::Sample;
use crate::{Error, Result};

/// Largest `kn` for which binomial probabilities are evaluated directly.
const DIRECT_LIMIT: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct AveragedEcdf {
    k: usize,
    n: usize,
    breakpoints: Vec<f64>,
    /// Number of pooled points `<= breakpoints[i]`.
    counts: Vec<u64>,
}

impl AveragedEcdf {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `mu` just after each breakpoint.
    pub fn mu_values(&self) -> impl Iterator<Item = f64> + '_ {
        let total = self.total() as f64;
        self.counts.iter().map(move |&c| c as f64 / total)
    }

    fn total(&self) -> u64 {
        (self.k * self.n) as u64
    }
}

impl CdfModel for AveragedEcdf {
    fn cdf(&self, x: f64) -> f64 {
        let j = self.breakpoints.partition_point(|&b| b <= x);
        if j == 0 {
            0.0
        } else {
            self.counts[j - 1] as f64 / self.total() as f64
        }
    }

    fn sf(&self, x: f64) -> f64 {
        let j = self.breakpoints.partition_point(|&b| b <= x);
        let below = if j == 0 { 0 } else { self.counts[j - 1] };
        (self.total() - below) as f64 / self.total() as f64
    }
}

/// `mu(x) = (1/k) sum_j F_n^(j)(x)` over the merged breakpoints.
pub fn average_ecdfs(samples: &[Sample]) -> Result<AveragedEcdf> {
    let first = samples.first().ok_or_else(|| Error::InvalidInput("no samples to average".into()))?;
    let n = first.len();
    for (index, s) in samples.iter().enumerate() {
        if s.len() != n {
            return Err(Error::MismatchedLength { index, expected: n, found: s.len() });
        }
    }
    let mut pooled: Vec<f64> = samples.iter().flat_map(|s| s.values().iter().copied()).collect();
    pooled.sort_by(f64::total_cmp);
    let mut breakpoints = Vec::new();
    let mut counts = Vec::new();
    for (i, &x) in pooled.iter().enumerate() {
        if breakpoints.last() == Some(&x) {
            *counts.last_mut().expect("paired with breakpoint") = i as u64 + 1;
        } else {
            breakpoints.push(x);
            counts.push(i as u64 + 1);
        }
    }
    Ok(AveragedEcdf { k: samples.len(), n, breakpoints, counts })
}

fn lattice_index(mu: f64, m: u64) -> Result<u64> {
    let j = mu * m as f64;
    let r = j.round();
    if !(0.0..=m as f64).contains(&r) || (j - r).abs() > 1e-9 {
        return Err(Error::Domain(format!("mu = {mu} is not a multiple of 1/{m} in [0, 1]")));
    }
    Ok(r as u64)
}

fn check_f(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Domain(format!("F = {f} outside [0, 1]")));
    }
    Ok(())
}

/// Binomial probability that `kn mu` of `kn` pooled points fall at or below
/// a point where the true CDF is `f`.
pub fn point_probability(mu: f64, f: f64, k: u64, n: u64) -> Result<f64> {
    check_f(f)?;
    let m = k * n;
    if m == 0 {
        return Err(Error::Domain("k n must be positive".into()));
    }
    let j = lattice_index(mu, m)?;
    if f == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    if f == 1.0 {
        return Ok(if j == m { 1.0 } else { 0.0 });
    }
    if m <= DIRECT_LIMIT {
        let mut coef = 1.0;
        for i in 0..j.min(m - j) {
            coef = coef * (m - i) as f64 / (i + 1) as f64;
        }
        return Ok(coef * f.powi(j as i32) * (1.0 - f).powi((m - j) as i32));
    }
    let (mf, jf) = (m as f64, j as f64);
    let ln_coef = ln_gamma_real(mf + 1.0) - ln_gamma_real(jf + 1.0) - ln_gamma_real(mf - jf + 1.0);
    Ok((ln_coef + jf * f.ln() + (mf - jf) * (-f).ln_1p()).exp())
}

/// Gaussian approximation to the density of `mu` at a point with CDF `f`.
pub fn gaussian_point_probability(mu: f64, f: f64, k: u64, n: u64) -> Result<f64> {
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Domain(format!("F = {f} must lie strictly inside (0, 1)")));
    }
    let m = (k * n) as f64;
    let var = f * (1.0 - f);
    Ok((m / (2.0 * std::f64::consts::PI * var)).sqrt() * (-m * (mu - f).powi(2) / (2.0 * var)).exp())
}

/// `sqrt(F (1 - F) / (kn))`.
pub fn dispersion(f: f64, k: u64, n: u64) -> Result<f64> {
    check_f(f)?;
    Ok((f * (1.0 - f) / (k * n) as f64).sqrt())
}
