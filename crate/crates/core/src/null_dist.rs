//! Exact null distribution of `A` for finite `(a, n)`.
//!
//! Under the null the transformed values are iid uniform, so `A` is a scaled
//! sum of `n` iid copies of `-a ln(1 - U^a)` with characteristic function
//!
//! ```text
//! phi(t) = [ Gamma(1 + 1/a) Gamma(1 - i t a/n) / Gamma(1 - i t a/n + 1/a) ]^n
//! ```
//!
//! The density and CDF come from numerical Fourier inversion; `a = 1` has the
//! closed form `Gamma(n, 1/n)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotic::{self, LimitSpec};
use crate::inversion::{self, GammaKernel, Transform};
use crate::mc_oracle::{self, McSettings};
use crate::quadrature::Rule;
use crate::specfun::{self, ln_gamma_ratio_excess, ln_gamma_real};
use crate::{Error, Result};

pub use crate::inversion::Inversion;

/// The pair `(a, n)` identifying a null distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullSpec {
    a: f64,
    n: u64,
}

impl NullSpec {
    pub fn new(a: f64, n: u64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidInput(format!("exponent a = {a} must be positive")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("sample size n must be at least 1".into()));
        }
        Ok(Self { a, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `a / n`.
    pub fn alpha(&self) -> f64 {
        self.a / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSettings {
    /// Absolute tolerance for CDF values; relative to the density scale for
    /// densities.
    pub rel_tol: f64,
    /// Largest `t` the truncated inversion integral may reach.
    pub max_truncation: f64,
    /// Gauss-Kronrod rule size: 21 or 31.
    pub quadrature_order: usize,
}

impl Default for InversionSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_truncation: 1e9, quadrature_order: 21 }
    }
}

impl InversionSettings {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::InvalidInput(format!("rel_tol {} must lie in (0, 1e-3]", self.rel_tol)));
        }
        if self.max_truncation.is_nan() || self.max_truncation <= 1.0 {
            return Err(Error::InvalidInput("max_truncation must exceed 1".into()));
        }
        if Rule::for_order(self.quadrature_order).is_none() {
            return Err(Error::InvalidInput(format!(
                "quadrature order {} not supported (21 or 31)",
                self.quadrature_order
            )));
        }
        Ok(())
    }

    pub(crate) fn engine(&self, tol: f64) -> Result<inversion::Settings> {
        self.validate()?;
        Ok(inversion::Settings {
            tol,
            max_truncation: self.max_truncation,
            rule: Rule::for_order(self.quadrature_order).expect("validated"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMethod {
    GammaClosedForm,
    Inversion,
    AsymptoticSeries,
    AsymptoticIntegral,
    MonteCarlo,
}

impl std::fmt::Display for PValueMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PValueMethod::GammaClosedForm => "gamma-closed-form",
            PValueMethod::Inversion => "inversion",
            PValueMethod::AsymptoticSeries => "asymptotic-series",
            PValueMethod::AsymptoticIntegral => "asymptotic-integral",
            PValueMethod::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValueReport {
    pub p: f64,
    pub method: PValueMethod,
    pub error_estimate: f64,
}

/// Characteristic function of `A` under the null, for finite `(a, n)`.
pub(crate) struct FiniteTransform {
    n: f64,
    b: f64,
    alpha: f64,
    ln_weight: f64,
    kernel: GammaKernel,
    std_dev: f64,
}

impl FiniteTransform {
    pub(crate) fn new(spec: &NullSpec) -> Self {
        let n = spec.n as f64;
        let b = 1.0 / spec.a;
        let alpha = spec.alpha();
        let shape = n * b;
        let ln_weight = n * ln_gamma_real(1.0 + b);
        // Gamma(w)/Gamma(w+b) = w^-b (1 + b(1-b)/(2w) + ...), raised to n
        let kernel = GammaKernel { weight: ln_weight.exp(), shape, scale: alpha, correction: 0.5 * shape * (1.0 - b) };
        Self { n, b, alpha, ln_weight, kernel, std_dev: cumulant(2, spec).sqrt() }
    }

    fn parts(&self, t: f64) -> (Complex64, Complex64) {
        let w = Complex64::new(1.0, -t.abs() * self.alpha);
        let excess = ln_gamma_ratio_excess(w, self.b) * self.n;
        (w, excess)
    }
}

impl Transform for FiniteTransform {
    fn phi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let (w, excess) = self.parts(t);
        let v = (excess - w.ln() * self.kernel.shape + self.ln_weight).exp();
        if t < 0.0 {
            v.conj()
        } else {
            v
        }
    }

    fn remainder(&self, t: f64) -> Complex64 {
        let (w, excess) = self.parts(t);
        let lead = (self.ln_weight - w.ln() * self.kernel.shape).exp();
        let v = lead * (specfun::exp_m1(excess) - self.kernel.correction / w);
        if t < 0.0 {
            v.conj()
        } else {
            v
        }
    }

    fn kernel(&self) -> GammaKernel {
        self.kernel
    }

    fn std_dev(&self) -> f64 {
        self.std_dev
    }
}

/// `phi(t) = E[e^{i t A}]` under the null.
pub fn char_fn(t: f64, spec: &NullSpec) -> Complex64 {
    FiniteTransform::new(spec).phi(t)
}

/// Terms used for the direct part of the cumulant series.
const CUMULANT_DIRECT_TERMS: usize = 32;

/// `sum_{l>=1} (l^-k - (l+b)^-k)` with an Euler-Maclaurin tail.
fn shifted_zeta_difference(k: u32, b: f64) -> f64 {
    let kf = k as f64;
    let mut sum = 0.0;
    for l in 1..=CUMULANT_DIRECT_TERMS {
        let l = l as f64;
        sum += l.powf(-kf) - (l + b).powf(-kf);
    }
    let big = CUMULANT_DIRECT_TERMS as f64;
    // int_L^inf (x^-k - (x+b)^-k) dx
    let integral = if k == 1 {
        (b / big).ln_1p()
    } else {
        -big.powf(1.0 - kf) * ((1.0 - kf) * (b / big).ln_1p()).exp_m1() / (kf - 1.0)
    };
    let f_at = |x: f64| x.powf(-kf) - (x + b).powf(-kf);
    // derivative of order m of x^-k is (-1)^m (k)_m x^-(k+m)
    let derivative = |m: u32| {
        let mut rising = 1.0;
        for j in 0..m {
            rising *= kf + j as f64;
        }
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * rising * (big.powf(-kf - m as f64) - (big + b).powf(-kf - m as f64))
    };
    // B_2j / (2j)!
    const EM: [f64; 6] =
        [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0, -691.0 / 1307674368000.0];
    let mut tail = integral - 0.5 * f_at(big);
    for (j, c) in EM.iter().enumerate() {
        tail -= c * derivative(2 * j as u32 + 1);
    }
    sum + tail
}

/// Cumulant `sigma_k = a (k-1)! (a/n)^(k-1) sum_l (l^-k - (l + 1/a)^-k)`.
pub fn cumulant(k: u32, spec: &NullSpec) -> f64 {
    assert!(k >= 1, "cumulant order starts at 1");
    let mut factorial = 1.0;
    for j in 1..k {
        factorial *= j as f64;
    }
    spec.a * factorial * spec.alpha().powi(k as i32 - 1) * shifted_zeta_difference(k, 1.0 / spec.a)
}

/// `Gamma(n, 1/n)` density `n^n s^(n-1) e^(-n s) / (n-1)!`.
pub fn gamma_closed_form_pdf(s: f64, n: u64) -> f64 {
    if s < 0.0 || n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    if s == 0.0 {
        return if n == 1 { 1.0 } else { 0.0 };
    }
    (nf * nf.ln() + (nf - 1.0) * s.ln() - nf * s - ln_gamma_real(nf)).exp()
}

/// `e^-x x^j / j!` in log space.
fn poisson_term(x: f64, j: u64) -> f64 {
    (-x + j as f64 * x.ln() - ln_gamma_real(j as f64 + 1.0)).exp()
}

/// Upper tail `P(A > sigma) = e^-x sum_{j<n} x^j / j!` with `x = n sigma`.
pub fn gamma_closed_form_sf(sigma: f64, n: u64) -> f64 {
    if sigma <= 0.0 {
        return 1.0;
    }
    let x = n as f64 * sigma;
    if x < n as f64 {
        return 1.0 - gamma_closed_form_cdf(sigma, n);
    }
    // terms increase with j up to x, so sum from the largest down
    (0..n).rev().map(|j| poisson_term(x, j)).sum::<f64>().min(1.0)
}

/// `P(A <= sigma) = e^-x sum_{j>=n} x^j / j!` with `x = n sigma`.
pub fn gamma_closed_form_cdf(sigma: f64, n: u64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let x = n as f64 * sigma;
    if x >= n as f64 {
        return 1.0 - gamma_closed_form_sf(sigma, n);
    }
    let mut term = poisson_term(x, n);
    let mut sum = 0.0;
    let mut j = n;
    while term > 1e-18 * sum || sum == 0.0 {
        sum += term;
        j += 1;
        term *= x / j as f64;
        if term == 0.0 {
            break;
        }
    }
    sum.min(1.0)
}

/// Density of `A`: the gamma kernel is subtracted before inverting, so the
/// oscillatory integral only sees a remainder decaying like `t^-(n/a + 2)`.
pub fn null_pdf_detailed(s: f64, spec: &NullSpec, settings: &InversionSettings) -> Result<Inversion> {
    settings.validate()?;
    if s.is_nan() {
        return Err(Error::InvalidInput("s is NaN".into()));
    }
    let tr = FiniteTransform::new(spec);
    let shape = tr.kernel().shape;
    if s < 0.0 || (s == 0.0 && shape > 1.0) {
        return Ok(Inversion {
            value: 0.0,
            error_estimate: 0.0,
            truncation: 0.0,
            kernel_subtracted: false,
            clipped: 0.0,
        });
    }
    if s == 0.0 {
        return Err(Error::Domain(format!("density is unbounded at 0 when n/a = {shape} <= 1")));
    }
    let engine = settings.engine(settings.rel_tol / tr.std_dev().min(1.0))?;
    inversion::invert_pdf(&tr, s, &engine, true)
}

pub fn null_pdf(s: f64, spec: &NullSpec, settings: &InversionSettings) -> Result<f64> {
    null_pdf_detailed(s, spec, settings).map(|r| r.value)
}

/// `G(sigma) = P(A <= sigma)` by inversion.
pub fn null_cdf_detailed(sigma: f64, spec: &NullSpec, settings: &InversionSettings) -> Result<Inversion> {
    if !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma = {sigma} must be finite")));
    }
    let engine = settings.engine(settings.rel_tol)?;
    inversion::invert_cdf(&FiniteTransform::new(spec), sigma, &engine)
}

pub fn null_cdf(sigma: f64, spec: &NullSpec, settings: &InversionSettings) -> Result<f64> {
    null_cdf_detailed(sigma, spec, settings).map(|r| r.value)
}

/// Thresholds for choosing how a p-value is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispatchPolicy {
    /// Use the limiting law when both `a` and `n` reach these values.
    pub asymptotic_min_a: f64,
    pub asymptotic_min_n: u64,
    /// Within the limiting regime, use the series when `alpha` reaches this.
    pub series_min_alpha: f64,
    /// Monte Carlo fallback used when inversion fails to converge.
    pub fallback: Option<McSettings>,
}

impl Default for DispatchPolicy {
    fn default() -> Self {
        Self {
            asymptotic_min_a: 50.0,
            asymptotic_min_n: 50,
            series_min_alpha: 5.0,
            fallback: Some(McSettings::default()),
        }
    }
}

/// Which evaluation route the caller asks for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodRequest {
    Auto,
    /// Closed form when `a = 1`, inversion otherwise; never falls back.
    Exact,
    Asymptotic,
    MonteCarlo(McSettings),
}

/// `p = P(A >= observed)` with the default dispatch policy.
pub fn p_value(a_value: f64, spec: &NullSpec, settings: &InversionSettings) -> Result<PValueReport> {
    p_value_with(a_value, spec, settings, &DispatchPolicy::default(), MethodRequest::Auto)
}

/// The method `Auto` dispatches to for `spec`.
pub fn dispatched_method(spec: &NullSpec, policy: &DispatchPolicy) -> PValueMethod {
    if spec.a == 1.0 {
        PValueMethod::GammaClosedForm
    } else if spec.n >= policy.asymptotic_min_n && spec.a >= policy.asymptotic_min_a {
        asymptotic_method(spec, policy)
    } else {
        PValueMethod::Inversion
    }
}

fn asymptotic_method(spec: &NullSpec, policy: &DispatchPolicy) -> PValueMethod {
    if spec.alpha() >= policy.series_min_alpha {
        PValueMethod::AsymptoticSeries
    } else {
        PValueMethod::AsymptoticIntegral
    }
}

pub fn p_value_with(
    a_value: f64,
    spec: &NullSpec,
    settings: &InversionSettings,
    policy: &DispatchPolicy,
    request: MethodRequest,
) -> Result<PValueReport> {
    if a_value.is_nan() || a_value < 0.0 {
        return Err(Error::InvalidInput(format!("statistic value {a_value} must be nonnegative")));
    }
    let method = match request {
        MethodRequest::Auto => dispatched_method(spec, policy),
        MethodRequest::Exact if spec.a == 1.0 => PValueMethod::GammaClosedForm,
        MethodRequest::Exact => PValueMethod::Inversion,
        MethodRequest::Asymptotic => asymptotic_method(spec, policy),
        MethodRequest::MonteCarlo(_) => PValueMethod::MonteCarlo,
    };
    if a_value.is_infinite() {
        return Ok(PValueReport { p: 0.0, method, error_estimate: 0.0 });
    }
    let result = evaluate(a_value, spec, settings, method, request);
    match (result, request, policy.fallback) {
        (Err(e), MethodRequest::Auto, Some(mc)) if e.is_convergence() => mc_oracle::mc_p_value(a_value, spec, &mc),
        (r, _, _) => r,
    }
}

fn evaluate(
    a_value: f64,
    spec: &NullSpec,
    settings: &InversionSettings,
    method: PValueMethod,
    request: MethodRequest,
) -> Result<PValueReport> {
    let report = |p: f64, error_estimate: f64| PValueReport { p: p.clamp(0.0, 1.0), method, error_estimate };
    match method {
        PValueMethod::GammaClosedForm => Ok(report(gamma_closed_form_sf(a_value, spec.n), 1e-14)),
        PValueMethod::Inversion => {
            let g = null_cdf_detailed(a_value, spec, settings)?;
            Ok(report(1.0 - g.value, g.error_estimate))
        }
        PValueMethod::AsymptoticIntegral => {
            let limit = LimitSpec::new(spec.alpha())?;
            let g = asymptotic::limit_cdf_detailed(a_value, &limit, settings)?;
            Ok(report(1.0 - g.value, g.error_estimate))
        }
        PValueMethod::AsymptoticSeries => {
            let limit = LimitSpec::new(spec.alpha())?;
            let terms = asymptotic::limit_cdf_series(a_value, &limit)?;
            Ok(report(1.0 - terms.value, terms.error_indicator))
        }
        PValueMethod::MonteCarlo => {
            let mc = match request {
                MethodRequest::MonteCarlo(mc) => mc,
                _ => McSettings::default(),
            };
            mc_oracle::mc_p_value(a_value, spec, &mc)
        }
    }
}
