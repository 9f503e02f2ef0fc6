//! Limiting null law for `a, n -> inf` with `alpha = a/n` fixed.
//!
//! The limit has characteristic function
//! `phi(t) = exp(-gamma/alpha - psi(1 - i t alpha)/alpha)` and cumulants
//! `k! zeta(k+1) alpha^(k-1)`. For large `alpha` the CDF has the expansion
//! `(1 - e^-y)^(1/alpha) (1 + f2(y)/alpha^2 + ...)` with `y = sigma/alpha`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::inversion::{self, GammaKernel, Inversion, Problem, Transform};
use crate::null_dist::InversionSettings;
use crate::specfun::{self, digamma_excess, digamma_unchecked, dilog_exp, ln_gamma_real, zeta_int, EULER_GAMMA};
use crate::{Error, Result};

/// `alpha` above which the CDF uses the split with the analytic leading term.
const SPLIT_MIN_ALPHA: f64 = 2.0;

/// Default `alpha` below which the series is flagged as unreliable.
pub const SERIES_MIN_ALPHA: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSpec {
    alpha: f64,
}

impl LimitSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInput(format!("alpha = {alpha} must be positive")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn beta(&self) -> f64 {
        1.0 / self.alpha
    }
}

pub(crate) struct LimitTransform {
    alpha: f64,
    beta: f64,
    kernel: GammaKernel,
    std_dev: f64,
}

impl LimitTransform {
    pub(crate) fn new(spec: &LimitSpec) -> Self {
        let beta = spec.beta();
        // psi(w) = ln w - 1/(2w) + ..., so phi ~ e^{-gamma beta} w^-beta (1 + beta/(2w))
        let kernel =
            GammaKernel { weight: (-EULER_GAMMA * beta).exp(), shape: beta, scale: spec.alpha, correction: 0.5 * beta };
        Self { alpha: spec.alpha, beta, kernel, std_dev: limit_cumulant(2, spec).sqrt() }
    }

    fn w(&self, t: f64) -> Complex64 {
        Complex64::new(1.0, -t.abs() * self.alpha)
    }
}

fn conj_for(t: f64, v: Complex64) -> Complex64 {
    if t < 0.0 {
        v.conj()
    } else {
        v
    }
}

impl Transform for LimitTransform {
    fn phi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let psi = digamma_unchecked(self.w(t));
        conj_for(t, (-(psi + EULER_GAMMA) * self.beta).exp())
    }

    fn remainder(&self, t: f64) -> Complex64 {
        let w = self.w(t);
        let lead = (-w.ln() * self.beta).exp() * self.kernel.weight;
        let v = lead * (specfun::exp_m1(-digamma_excess(w) * self.beta) - self.kernel.correction / w);
        conj_for(t, v)
    }

    fn kernel(&self) -> GammaKernel {
        self.kernel
    }

    fn std_dev(&self) -> f64 {
        self.std_dev
    }
}

pub fn limit_char_fn(t: f64, spec: &LimitSpec) -> Complex64 {
    LimitTransform::new(spec).phi(t)
}

/// `k! zeta(k+1) alpha^(k-1)`.
pub fn limit_cumulant(k: u32, spec: &LimitSpec) -> f64 {
    assert!(k >= 1, "cumulant order starts at 1");
    let mut factorial = 1.0;
    for j in 2..=k {
        factorial *= j as f64;
    }
    factorial * zeta_int(k as i32 + 1).expect("k + 1 >= 2") * spec.alpha.powi(k as i32 - 1)
}

fn zero() -> Inversion {
    Inversion { value: 0.0, error_estimate: 0.0, truncation: 0.0, kernel_subtracted: false, clipped: 0.0 }
}

/// Limiting density `g(s)`.
pub fn limit_pdf_detailed(s: f64, spec: &LimitSpec, settings: &InversionSettings) -> Result<Inversion> {
    if s.is_nan() {
        return Err(Error::InvalidInput("s is NaN".into()));
    }
    if s <= 0.0 {
        return Ok(zero());
    }
    let tr = LimitTransform::new(spec);
    let engine = settings.engine(settings.rel_tol / tr.std_dev.min(1.0))?;
    inversion::invert_pdf(&tr, s, &engine, true)
}

pub fn limit_pdf(s: f64, spec: &LimitSpec, settings: &InversionSettings) -> Result<f64> {
    limit_pdf_detailed(s, spec, settings).map(|r| r.value)
}

/// Evaluation route for the limiting CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitRoute {
    /// Split when `alpha > 2`, general inversion otherwise.
    Auto,
    /// Analytic `t^-1/alpha` leading term plus a numerically integrated remainder.
    Split,
    /// General inversion engine with gamma-kernel subtraction.
    Inversion,
}

/// Limiting CDF `G(sigma)`.
pub fn limit_cdf_detailed(sigma: f64, spec: &LimitSpec, settings: &InversionSettings) -> Result<Inversion> {
    limit_cdf_via(sigma, spec, settings, LimitRoute::Auto)
}

pub fn limit_cdf(sigma: f64, spec: &LimitSpec, settings: &InversionSettings) -> Result<f64> {
    limit_cdf_detailed(sigma, spec, settings).map(|r| r.value)
}

pub fn limit_cdf_via(
    sigma: f64,
    spec: &LimitSpec,
    settings: &InversionSettings,
    route: LimitRoute,
) -> Result<Inversion> {
    if !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma = {sigma} must be finite")));
    }
    if sigma <= 0.0 {
        return Ok(zero());
    }
    let split = match route {
        LimitRoute::Auto => spec.alpha > SPLIT_MIN_ALPHA,
        LimitRoute::Split => true,
        LimitRoute::Inversion => false,
    };
    if split {
        if spec.alpha <= 1.0 {
            return Err(Error::Domain(format!("split form needs alpha > 1, got {}", spec.alpha)));
        }
        split_cdf(sigma, spec, settings)
    } else {
        let engine = settings.engine(settings.rel_tol)?;
        inversion::invert_cdf(&LimitTransform::new(spec), sigma, &engine)
    }
}

/// `G = C y^beta / Gamma(1 + beta) + (1/pi) int Re[(1 - e^-it)/(it) R(t)] dt`
/// where `C (-i t/y)^-beta` is the part of `phi(t/sigma)` that decays slowly
/// and `R` is what is left.
fn split_cdf(sigma: f64, spec: &LimitSpec, settings: &InversionSettings) -> Result<Inversion> {
    let beta = spec.beta();
    let y = sigma / spec.alpha;
    let leading = ((y.ln() - EULER_GAMMA) * beta - ln_gamma_real(1.0 + beta)).exp();
    let c = (-EULER_GAMMA * beta).exp();
    let phase = Complex64::from_polar(1.0, 0.5 * PI * beta);
    let rem = |t: f64| -> Complex64 {
        let tau = t / y;
        let w = Complex64::new(1.0, -tau);
        let inner = digamma_excess(w) + specfun::ln_1p(Complex64::new(0.0, 1.0 / tau));
        phase * specfun::exp_m1(-inner * beta) * (c * tau.powf(-beta))
    };
    let problem =
        Problem { f: &rem, power: beta + 1.0, h0: 0.25 * y.min(1.0), start: 4.0 * y.max(1.0), singular: Some(beta) };
    let engine = settings.engine(settings.rel_tol)?;
    let (quad, truncation) = inversion::cdf_integral(&problem, 1.0, &engine)?;
    let raw = leading + quad.value;
    let value = raw.clamp(0.0, 1.0);
    Ok(Inversion {
        value,
        error_estimate: quad.error,
        truncation,
        kernel_subtracted: true,
        clipped: (raw - value).abs(),
    })
}

/// `f2(y) = (y/2) ln(1 - e^-y) - Li2(e^-y)/2`, increasing from `-pi^2/12` to 0.
pub fn f2(y: f64) -> f64 {
    if y.is_nan() || y < 0.0 {
        return f64::NAN;
    }
    if y == 0.0 {
        return -specfun::ZETA_2 / 2.0;
    }
    if y == f64::INFINITY {
        return 0.0;
    }
    let ln_one_minus = if y > std::f64::consts::LN_2 { (-(-y).exp()).ln_1p() } else { (-(-y).exp_m1()).ln() };
    0.5 * y * ln_one_minus - 0.5 * dilog_exp(y)
}

/// Large-`alpha` expansion of the limiting CDF truncated after `f2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerms {
    pub y: f64,
    /// `(1 - e^-y)^(1/alpha)`.
    pub leading: f64,
    pub f2: f64,
    /// `leading * f2 / alpha^2`.
    pub correction: f64,
    pub k_max: u32,
    pub value: f64,
    /// `|f2| / alpha^3`, the size of the first omitted order.
    pub error_indicator: f64,
    /// Set when `alpha` is below the threshold where the series is trusted.
    pub below_threshold: bool,
}

pub fn limit_cdf_series(sigma: f64, spec: &LimitSpec) -> Result<SeriesTerms> {
    limit_cdf_series_with(sigma, spec, SERIES_MIN_ALPHA)
}

pub fn limit_cdf_series_with(sigma: f64, spec: &LimitSpec, threshold: f64) -> Result<SeriesTerms> {
    let alpha = spec.alpha;
    if alpha < 1.0 {
        return Err(Error::Domain(format!("series needs alpha >= 1, got {alpha}")));
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidInput(format!("sigma = {sigma} must be nonnegative")));
    }
    let y = sigma / alpha;
    let ln_base = if y > std::f64::consts::LN_2 { (-(-y).exp()).ln_1p() } else { (-(-y).exp_m1()).ln() };
    let leading = (ln_base / alpha).exp();
    let f2 = f2(y);
    let correction = leading * f2 / (alpha * alpha);
    Ok(SeriesTerms {
        y,
        leading,
        f2,
        correction,
        k_max: 2,
        value: (leading + correction).clamp(0.0, 1.0),
        error_indicator: f2.abs() / alpha.powi(3),
        below_threshold: alpha < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(alpha: f64) -> LimitSpec {
        LimitSpec::new(alpha).unwrap()
    }

    #[test]
    fn printed_constants() {
        let s = InversionSettings::default();
        let cases = [(1.0, 0.439166), (3.0, 0.8390636), (7.0, 0.9898427)];
        for (sigma, expected) in cases {
            let g = limit_cdf(sigma, &spec(1.0), &s).unwrap();
            assert!((g - expected).abs() < 1e-6, "sigma={sigma}: {g}");
        }
        let g = limit_cdf(17.0, &spec(1.0), &s).unwrap();
        assert!((g - 0.999995).abs() < 1e-6, "{g}");
    }

    #[test]
    fn split_agrees_with_inversion() {
        let s = InversionSettings::with_tol(1e-9);
        for &alpha in &[3.0, 5.0, 10.0] {
            for &sigma in &[0.5, 2.0, 8.0, 40.0] {
                let a = limit_cdf_via(sigma, &spec(alpha), &s, LimitRoute::Split).unwrap().value;
                let b = limit_cdf_via(sigma, &spec(alpha), &s, LimitRoute::Inversion).unwrap().value;
                assert!((a - b).abs() < 1e-8, "alpha={alpha} sigma={sigma}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn remainder_is_phi_minus_kernel() {
        let tr = LimitTransform::new(&spec(0.7));
        let k = tr.kernel();
        for &t in &[0.3, 5.0, 200.0] {
            let w = tr.w(t);
            let kern = (w.powf(-k.shape) + w.powf(-k.shape - 1.0) * k.correction) * k.weight;
            assert!((tr.remainder(t) - (tr.phi(t) - kern)).norm() < 1e-13);
        }
    }

    #[test]
    fn f2_values() {
        assert!((f2(0.0) + PI * PI / 12.0).abs() < 1e-15);
        assert_eq!(f2(f64::INFINITY), 0.0);
        assert!((f2(1.0) + 0.433_714_716_4).abs() < 1e-9, "{}", f2(1.0));
        assert!((f2(1e-12) - f2(0.0)).abs() < 1e-10);
        assert!(f2(-1.0).is_nan());
    }

    #[test]
    fn series_example() {
        let t = limit_cdf_series(20.0, &spec(20.0)).unwrap();
        assert!((t.leading - 0.977_327_2).abs() < 1e-7, "{}", t.leading);
        assert!((t.value - 0.976_267_5).abs() < 1e-7, "{}", t.value);
        assert!(!t.below_threshold);
        assert!(limit_cdf_series(1.0, &spec(3.0)).unwrap().below_threshold);
        assert!(limit_cdf_series(1.0, &spec(0.5)).is_err());
    }

    #[test]
    fn cumulant_values() {
        assert!((limit_cumulant(1, &spec(1.0)) - specfun::ZETA_2).abs() < 1e-15);
        assert!((limit_cumulant(2, &spec(1.0)) - 2.404_113_806_319_188).abs() < 1e-14);
    }
}
