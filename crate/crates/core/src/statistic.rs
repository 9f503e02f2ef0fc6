//! The tail-sensitive statistics `A^R` and `A^L`.

use serde::{Deserialize, Serialize};

use crate::{CdfModel, Error, Result};

/// Model values outside [0, 1] by at most this much are snapped to the
/// boundary; anything further out is an error.
pub const SNAP_TOLERANCE: f64 = 1e-12;

/// An unordered collection of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("sample is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("sample value {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Coarse-grained sample: bin positions with their counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSample {
    bins: Vec<(f64, u64)>,
    total: u64,
}

impl BinnedSample {
    pub fn new(bins: Vec<(f64, u64)>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::InvalidInput("no bins".into()));
        }
        if bins.iter().any(|&(x, d)| !x.is_finite() || d == 0) {
            return Err(Error::InvalidInput("bin positions must be finite and counts positive".into()));
        }
        if bins.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput("bin positions must be strictly increasing".into()));
        }
        let total = bins.iter().map(|&(_, d)| d).sum();
        Ok(Self { bins, total })
    }

    pub fn bins(&self) -> &[(f64, u64)] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Each position repeated by its count.
    pub fn expand(&self) -> Sample {
        let values = self.bins.iter().flat_map(|&(x, d)| std::iter::repeat_n(x, d as usize)).collect();
        Sample { values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    /// Emphasises `F` close to 1.
    Right,
    /// Emphasises `F` close to 0.
    Left,
}

impl std::fmt::Display for TailSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TailSide::Right => "right",
            TailSide::Left => "left",
        })
    }
}

/// Options for the boundary case `F = 1` (right) or `F = 0` (left).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StatisticOptions {
    /// When set, the transformed value `u` is replaced by `min(u, 1 - eps)`
    /// instead of producing an infinite statistic.
    pub clamp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticResult {
    /// `+inf` when some transformed value equals one and no clamp is set.
    pub value: f64,
    pub side: TailSide,
    pub a: f64,
    pub n: u64,
    pub clamped_count: u64,
}

impl StatisticResult {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// A probability and its complement, each computed from the model so that
/// either tail keeps full relative precision.
#[derive(Debug, Clone, Copy)]
struct TailPair {
    lower: f64,
    upper: f64,
}

fn snap(v: f64, what: &str, x: f64) -> Result<f64> {
    if v.is_nan() {
        return Err(Error::InvalidModel(format!("{what} is NaN at x = {x}")));
    }
    if !(-SNAP_TOLERANCE..=1.0 + SNAP_TOLERANCE).contains(&v) {
        return Err(Error::InvalidModel(format!("{what} = {v} outside [0, 1] at x = {x}")));
    }
    Ok(v.clamp(0.0, 1.0))
}

fn tail_pair(model: &dyn CdfModel, x: f64) -> Result<TailPair> {
    Ok(TailPair { lower: snap(model.cdf(x), "F(x)", x)?, upper: snap(model.sf(x), "1 - F(x)", x)? })
}

/// `F(x_i)` in input order.
pub fn probability_transform(sample: &Sample, model: &dyn CdfModel) -> Result<Vec<f64>> {
    sample.values.iter().map(|&x| snap(model.cdf(x), "F(x)", x)).collect()
}

/// `-ln(1 - u^a)` given `u` and its complement `q = 1 - u`.
///
/// `ln u` comes from `log1p(-q)` when `u` is close to one, and the outer
/// logarithm switches between `log1p` and `ln(-expm1)` so neither end loses
/// precision.
pub(crate) fn tail_term(u: f64, q: f64, a: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if q <= 0.0 {
        return f64::INFINITY;
    }
    let ln_u = if u < 0.5 { u.ln() } else { (-q).ln_1p() };
    let x = a * ln_u;
    if x < -std::f64::consts::LN_2 {
        -(-x.exp()).ln_1p()
    } else {
        -(-x.exp_m1()).ln()
    }
}

/// Oriented `(u, 1 - u)` for a side, after the optional clamp.
fn oriented(pair: TailPair, side: TailSide, clamp: Option<f64>) -> (f64, f64, bool) {
    let (u, q) = match side {
        TailSide::Right => (pair.lower, pair.upper),
        TailSide::Left => (pair.upper, pair.lower),
    };
    match clamp {
        Some(eps) if q < eps => (1.0 - eps, eps, true),
        _ => (u, q, false),
    }
}

fn check_a(a: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!("exponent a = {a} must be positive")));
    }
    Ok(())
}

fn check_clamp(options: &StatisticOptions) -> Result<()> {
    if let Some(eps) = options.clamp {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::InvalidInput(format!("clamp {eps} must lie in (0, 0.5)")));
        }
    }
    Ok(())
}

/// Weighted sum over oriented values, accumulated in ascending `u` order.
fn accumulate(mut items: Vec<(f64, f64, u64)>, a: f64, total: u64, side: TailSide, clamped: u64) -> StatisticResult {
    items.sort_by(|l, r| l.0.total_cmp(&r.0).then(r.1.total_cmp(&l.1)));
    let mut sum = 0.0;
    for &(u, q, d) in &items {
        let term = tail_term(u, q, a);
        if term.is_infinite() {
            sum = f64::INFINITY;
            break;
        }
        sum += d as f64 * term;
    }
    StatisticResult { value: a / total as f64 * sum, side, a, n: total, clamped_count: clamped }
}

/// `A = -(a/n) sum_i ln(1 - F(x_i)^a)` (right) or with `F -> 1 - F` (left).
pub fn a_statistic(sample: &Sample, model: &dyn CdfModel, a: f64, side: TailSide) -> Result<StatisticResult> {
    a_statistic_with(sample, model, a, side, &StatisticOptions::default())
}

pub fn a_statistic_with(
    sample: &Sample,
    model: &dyn CdfModel,
    a: f64,
    side: TailSide,
    options: &StatisticOptions,
) -> Result<StatisticResult> {
    check_a(a)?;
    check_clamp(options)?;
    let mut clamped = 0;
    let mut items = Vec::with_capacity(sample.len());
    for &x in &sample.values {
        let (u, q, c) = oriented(tail_pair(model, x)?, side, options.clamp);
        clamped += c as u64;
        items.push((u, q, 1));
    }
    Ok(accumulate(items, a, sample.len() as u64, side, clamped))
}

/// Binned form `A = -(a/N) sum_i d_i ln(1 - F(x_i)^a)`.
pub fn a_statistic_binned(
    binned: &BinnedSample,
    model: &dyn CdfModel,
    a: f64,
    side: TailSide,
    options: &StatisticOptions,
) -> Result<StatisticResult> {
    check_a(a)?;
    check_clamp(options)?;
    let mut clamped = 0;
    let mut items = Vec::with_capacity(binned.bins.len());
    for &(x, d) in &binned.bins {
        let (u, q, c) = oriented(tail_pair(model, x)?, side, options.clamp);
        clamped += if c { d } else { 0 };
        items.push((u, q, d));
    }
    Ok(accumulate(items, a, binned.total, side, clamped))
}

/// The statistic computed from already transformed values `F(x_i)`.
pub fn a_statistic_from_probabilities(
    probabilities: &[f64],
    a: f64,
    side: TailSide,
    options: &StatisticOptions,
) -> Result<StatisticResult> {
    check_a(a)?;
    check_clamp(options)?;
    if probabilities.is_empty() {
        return Err(Error::InvalidInput("no probabilities".into()));
    }
    let mut clamped = 0;
    let mut items = Vec::with_capacity(probabilities.len());
    for &f in probabilities {
        let f = snap(f, "F value", f)?;
        let pair = TailPair { lower: f, upper: 1.0 - f };
        let (u, q, c) = oriented(pair, side, options.clamp);
        clamped += c as u64;
        items.push((u, q, 1));
    }
    Ok(accumulate(items, a, probabilities.len() as u64, side, clamped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Exponential, Normal, Uniform};

    fn uniform() -> Uniform {
        Uniform::standard()
    }

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_point_exponential_term() {
        let f = 1.0 - (-1.0f64).exp();
        let r = a_statistic(&sample(&[f]), &uniform(), 1.0, TailSide::Right).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert_eq!(r.n, 1);
        assert_eq!(r.clamped_count, 0);
    }

    #[test]
    fn zero_probabilities_give_zero() {
        for &a in &[0.5, 1.0, 7.0] {
            let r = a_statistic(&sample(&[0.0, 0.0, 0.0]), &uniform(), a, TailSide::Right).unwrap();
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn two_point_hand_value() {
        let f2 = 1.0 - (-2.0f64).exp();
        let r = a_statistic(&sample(&[0.5, f2]), &uniform(), 1.0, TailSide::Right).unwrap();
        let expected = -0.5 * (0.5f64.ln() - 2.0);
        assert!((r.value - expected).abs() < 1e-15);
        assert!((r.value - 1.346_573_6).abs() < 1e-7);
    }

    #[test]
    fn binned_hand_value_and_expansion() {
        let binned = BinnedSample::new(vec![(0.5, 2), (0.75, 1)]).unwrap();
        let r = a_statistic_binned(&binned, &uniform(), 1.0, TailSide::Right, &Default::default()).unwrap();
        let expected = -(2.0 * 0.5f64.ln() + 0.25f64.ln()) / 3.0;
        assert!((r.value - expected).abs() < 1e-15);
        assert!((r.value - 0.924_196_2).abs() < 1e-7);
        let e = a_statistic(&binned.expand(), &uniform(), 1.0, TailSide::Right).unwrap();
        assert!((e.value - r.value).abs() < 1e-15);

        let f = 1.0 - (-1.0f64).exp();
        let single = BinnedSample::new(vec![(f, 7)]).unwrap();
        let r = a_statistic_binned(&single, &uniform(), 1.0, TailSide::Right, &Default::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn probability_transform_examples() {
        assert_eq!(probability_transform(&sample(&[0.25, 0.5]), &uniform()).unwrap(), vec![0.25, 0.5]);
        let e = Exponential::new(1.0).unwrap();
        let p = probability_transform(&sample(&[std::f64::consts::LN_2]), &e).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-16);
        let n = Normal::new(0.0, 1.0).unwrap();
        assert_eq!(probability_transform(&sample(&[0.0]), &n).unwrap(), vec![0.5]);
    }

    #[test]
    fn boundary_gives_infinite_or_clamped() {
        let r = a_statistic(&sample(&[0.2, 1.0]), &uniform(), 2.0, TailSide::Right).unwrap();
        assert!(r.is_infinite());
        let l = a_statistic(&sample(&[0.0, 0.3]), &uniform(), 2.0, TailSide::Left).unwrap();
        assert!(l.is_infinite());
        let opts = StatisticOptions { clamp: Some(1e-9) };
        let c = a_statistic_with(&sample(&[0.2, 1.0, 1.5]), &uniform(), 1.0, TailSide::Right, &opts).unwrap();
        assert!(c.value.is_finite());
        assert_eq!(c.clamped_count, 2);
        let expected = -(0.8f64.ln() + 2.0 * 1e-9f64.ln()) / 3.0;
        assert!((c.value - expected).abs() < 1e-12);
    }

    struct Broken(f64);
    impl CdfModel for Broken {
        fn cdf(&self, _: f64) -> f64 {
            self.0
        }
    }

    #[test]
    fn out_of_range_model_values() {
        let s = sample(&[1.0]);
        assert!(matches!(a_statistic(&s, &Broken(1.1), 1.0, TailSide::Right), Err(Error::InvalidModel(_))));
        assert!(probability_transform(&s, &Broken(-0.01)).is_err());
        assert!(a_statistic(&s, &Broken(f64::NAN), 1.0, TailSide::Right).is_err());
        // rounding noise is snapped to the boundary
        let r = a_statistic(&s, &Broken(-1e-14), 1.0, TailSide::Right).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn invalid_arguments() {
        let s = sample(&[0.5]);
        assert!(a_statistic(&s, &uniform(), 0.0, TailSide::Right).is_err());
        assert!(a_statistic(&s, &uniform(), f64::NAN, TailSide::Right).is_err());
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![f64::INFINITY]).is_err());
        assert!(BinnedSample::new(vec![(1.0, 1), (1.0, 2)]).is_err());
        assert!(BinnedSample::new(vec![(1.0, 0)]).is_err());
        let opts = StatisticOptions { clamp: Some(0.0) };
        assert!(a_statistic_with(&s, &uniform(), 1.0, TailSide::Right, &opts).is_err());
    }

    #[test]
    fn far_upper_tail_keeps_precision() {
        // normal at 9 sigma: F = 1 - 1.13e-19 rounds to 1 in double precision,
        // but the survival function keeps the tail
        let n = Normal::new(0.0, 1.0).unwrap();
        let r = a_statistic(&sample(&[9.0]), &n, 4.0, TailSide::Right).unwrap();
        let q = n.sf(9.0);
        let expected = -4.0 * (4.0 * q).ln(); // 1 - (1-q)^4 ~ 4 q
        assert!(r.value.is_finite());
        assert!((r.value - expected).abs() < 1e-9 * expected);
    }
}
