//! Fourier inversion of characteristic functions with power-law tails.
//!
//! The CDF integrand `Re[(1 - e^{-i s t}) / (i t) f(t)] / pi` is split for
//! large `t` into a non-oscillating part `Im f(t) / (pi t)`, integrated on
//! geometric panels out to a far truncation point, and an oscillating part
//! whose tail is bounded by integration by parts. When `|f(t)| ~ t^-k` decays
//! too slowly for the requested tolerance, a two-term gamma kernel with the
//! same asymptotics is subtracted and added back in closed form.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::quadrature::{adaptive, Quad, Rule};
use crate::specfun::{gamma_p, gamma_pdf};
use crate::{Error, Result};

/// Oscillation panels allowed before a plain inversion is declared too slow.
const MAX_PANELS: f64 = 50_000.0;

/// `weight * [(1 - i scale t)^-shape + correction (1 - i scale t)^-(shape+1)]`,
/// the transform of a weighted sum of two gamma laws.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaKernel {
    pub weight: f64,
    pub shape: f64,
    pub scale: f64,
    pub correction: f64,
}

impl GammaKernel {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let u = x / self.scale;
        self.weight * (gamma_p(self.shape, u) + self.correction * gamma_p(self.shape + 1.0, u))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.weight
            * (gamma_pdf(self.shape, self.scale, x) + self.correction * gamma_pdf(self.shape + 1.0, self.scale, x))
    }
}

/// Characteristic function of a law on `[0, inf)` whose modulus decays like
/// `t^-shape`, together with the remainder after subtracting its kernel.
pub(crate) trait Transform: Sync {
    fn phi(&self, t: f64) -> Complex64;
    /// `phi(t)` minus the kernel transform; decays like `t^-(shape + 2)`.
    fn remainder(&self, t: f64) -> Complex64;
    fn kernel(&self) -> GammaKernel;
    fn std_dev(&self) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub tol: f64,
    pub max_truncation: f64,
    pub rule: &'static Rule,
}

/// An inverted value with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    /// Quadrature error estimate plus the truncation bounds.
    pub error_estimate: f64,
    /// Largest `t` reached by the integration.
    pub truncation: f64,
    /// Whether the gamma kernel was subtracted.
    pub kernel_subtracted: bool,
    /// Magnitude removed when clipping the raw value into its valid range.
    pub clipped: f64,
}

/// Integration problem for the truncated inversion integrals.
pub(crate) struct Problem<'a> {
    pub f: &'a (dyn Fn(f64) -> Complex64 + Sync),
    /// Tail exponent: `|f(t)| <= M t^-power` for large `t`.
    pub power: f64,
    /// Length scale on which `f` varies near the origin.
    pub h0: f64,
    /// Where to start looking for a truncation point.
    pub start: f64,
    /// `f(t) ~ t^-beta` near zero, handled by a substitution on the first panel.
    pub singular: Option<f64>,
}

/// `(1 - e^{-ix}) / (ix)`.
fn lag_kernel(x: f64) -> Complex64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        Complex64::new(1.0 - x2 / 6.0, -x * (0.5 - x2 / 24.0))
    } else {
        let half = (0.5 * x).sin();
        Complex64::new(x.sin() / x, -2.0 * half * half / x)
    }
}

/// `ln(2 max |f(t m)| (t m)^power)` over `m = 1, 2, 4, 8`, in logs so that
/// steep power laws neither overflow nor underflow.
fn ln_tail_constant(f: &dyn Fn(f64) -> Complex64, t: f64, power: f64) -> f64 {
    [1.0, 2.0, 4.0, 8.0].iter().map(|m| f(t * m).norm().ln() + power * (t * m).ln()).fold(f64::NEG_INFINITY, f64::max)
        + std::f64::consts::LN_2
}

/// Fixed panels on `[start, end]` no wider than `half_period`, growing
/// geometrically away from the origin; the tolerance is spread by width.
fn integrate_panels<F: Fn(f64) -> f64>(
    rule: &Rule,
    g: &F,
    start: f64,
    end: f64,
    h0: f64,
    half_period: f64,
    tol: f64,
) -> Quad {
    let mut acc = Quad::default();
    let mut t = start;
    let span = end - start;
    while t < end {
        let w = half_period.min(h0.max(0.25 * t));
        let b = if t + w >= end * (1.0 - 1e-12) { end } else { t + w };
        acc += adaptive(rule, g, t, b, tol * (b - t) / span);
        t = b;
    }
    acc
}

fn integrate_geometric<F: Fn(f64) -> f64>(rule: &Rule, g: &F, start: f64, end: f64, tol: f64) -> Quad {
    let mut acc = Quad::default();
    if end <= start {
        return acc;
    }
    let count = ((end / start).log2().ceil()).max(1.0);
    let mut t = start;
    while t < end {
        let b = (2.0 * t).min(end);
        acc += adaptive(rule, g, t, b, tol / count);
        t = b;
    }
    acc
}

/// First panel `[0, h]` with `t = h v^q`, `q = 1 / (1 - beta)`, which removes
/// a `t^-beta` singularity.
fn integrate_singular_start<F: Fn(f64) -> f64>(rule: &Rule, g: &F, h: f64, beta: f64, tol: f64) -> Quad {
    let q = 1.0 / (1.0 - beta);
    let mapped = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let t = h * v.powf(q);
        g(t) * h * q * v.powf(q - 1.0)
    };
    adaptive(rule, &mapped, 0.0, 1.0, tol)
}

fn too_slow(achieved: f64, requested: f64) -> Error {
    Error::Convergence { achieved, requested }
}

/// `(1/pi) int_0^inf Re[(1 - e^{-i sigma t}) / (i t) f(t)] dt`.
pub(crate) fn cdf_integral(p: &Problem, sigma: f64, s: &Settings) -> Result<(Quad, f64)> {
    let tol = s.tol;
    let f = p.f;
    let half_period = PI / sigma;

    // oscillating tail by parts: |int_T^inf e^{-i sigma t} g| <= (|g(T)| + int |g'|) / sigma
    let mut t_osc = p.start;
    let osc_bound = loop {
        let ln_m = ln_tail_constant(f, t_osc, p.power);
        let bound = 2.0 * (ln_m - (p.power + 1.0) * t_osc.ln()).exp() / (PI * sigma);
        if bound <= 0.25 * tol {
            break bound;
        }
        t_osc *= 2.0;
        if t_osc > s.max_truncation || t_osc / half_period > MAX_PANELS {
            return Err(too_slow(bound, tol));
        }
    };

    // non-oscillating tail: t^p f(t) tends to a constant, so
    // int_T^inf Im f / (pi t) = Im f(T) / (p pi) + O(T^-p-1); the drift of
    // t^p Im f over [T, 4T] bounds the correction
    let mut t_far = t_osc;
    let (far_estimate, far_bound) = loop {
        let near = f(t_far).im;
        let far = f(4.0 * t_far).im;
        let far_scaled = if far == 0.0 { 0.0 } else { far.signum() * (far.abs().ln() + p.power * 4f64.ln()).exp() };
        let estimate = near / (p.power * PI);
        let bound = 2.0 * (near - far_scaled).abs() / (p.power * PI);
        if bound <= 0.25 * tol {
            break (estimate, bound);
        }
        t_far *= 2.0;
        if t_far > s.max_truncation {
            return Err(too_slow(bound, tol));
        }
    };

    let full = |t: f64| (lag_kernel(sigma * t) * f(t)).re * sigma / PI;
    let non_osc = |t: f64| f(t).im / (PI * t);

    let mut quad = Quad::default();
    let mut from = 0.0;
    if let Some(beta) = p.singular {
        let h = p.h0.min(half_period).min(t_osc);
        quad += integrate_singular_start(s.rule, &full, h, beta, 0.05 * tol);
        from = h;
    }
    quad += integrate_panels(s.rule, &full, from, t_osc, p.h0, half_period, 0.2 * tol);
    quad += integrate_geometric(s.rule, &non_osc, t_osc, t_far, 0.2 * tol);
    quad.value += far_estimate;
    quad.error += osc_bound + far_bound;
    Ok((quad, t_far))
}

/// `(1/pi) int_0^inf Re[e^{-i s t} f(t)] dt`.
pub(crate) fn pdf_integral(p: &Problem, x: f64, s: &Settings) -> Result<(Quad, f64)> {
    let tol = s.tol;
    let f = p.f;
    let half_period = if x > 0.0 { PI / x } else { f64::INFINITY };
    let mut t = p.start;
    let bound = loop {
        let ln_m = ln_tail_constant(f, t, p.power);
        let ibp = if x > 0.0 { 4.0 * (ln_m - p.power * t.ln()).exp() / (PI * x) } else { f64::INFINITY };
        let abs = if p.power > 1.0 {
            (ln_m + (1.0 - p.power) * t.ln()).exp() / ((p.power - 1.0) * PI)
        } else {
            f64::INFINITY
        };
        let bound = ibp.min(abs);
        if bound <= 0.5 * tol {
            break bound;
        }
        t *= 2.0;
        if t > s.max_truncation || t / half_period > MAX_PANELS {
            return Err(too_slow(bound, tol));
        }
    };
    let g = |u: f64| (Complex64::new(0.0, -x * u).exp() * f(u)).re / PI;
    let mut quad = integrate_panels(s.rule, &g, 0.0, t, p.h0, half_period, 0.4 * tol);
    quad.error += bound;
    Ok((quad, t))
}

fn scales(tr: &dyn Transform) -> (f64, f64) {
    let k = tr.kernel();
    let inv_scale = 1.0 / k.scale;
    let inv_sd = 1.0 / tr.std_dev();
    (0.5 * inv_scale.min(inv_sd), 4.0 * inv_scale.max(inv_sd))
}

fn finish(raw: f64, quad: Quad, truncation: f64, subtracted: bool, lo: f64, hi: f64) -> Inversion {
    let value = raw.clamp(lo, hi);
    Inversion {
        value,
        error_estimate: quad.error,
        truncation,
        kernel_subtracted: subtracted,
        clipped: (raw - value).abs(),
    }
}

/// CDF at `sigma`: plain inversion first, kernel subtraction if that cannot
/// meet the tolerance.
pub(crate) fn invert_cdf(tr: &dyn Transform, sigma: f64, s: &Settings) -> Result<Inversion> {
    if sigma <= 0.0 {
        return Ok(Inversion {
            value: 0.0,
            error_estimate: 0.0,
            truncation: 0.0,
            kernel_subtracted: false,
            clipped: 0.0,
        });
    }
    let kernel = tr.kernel();
    let (h0, start) = scales(tr);
    let phi = |t: f64| tr.phi(t);
    let plain = Problem { f: &phi, power: kernel.shape, h0, start, singular: None };
    let first_err = match cdf_integral(&plain, sigma, s) {
        Ok((quad, t)) => return Ok(finish(quad.value, quad, t, false, 0.0, 1.0)),
        Err(e) => e,
    };
    let rem = |t: f64| tr.remainder(t);
    let sub = Problem { f: &rem, power: kernel.shape + 2.0, h0, start, singular: None };
    match cdf_integral(&sub, sigma, s) {
        Ok((quad, t)) => Ok(finish(kernel.cdf(sigma) + quad.value, quad, t, true, 0.0, 1.0)),
        Err(e) => Err(better(first_err, e)),
    }
}

/// Density at `x > 0`; `subtract_first` skips the plain attempt.
pub(crate) fn invert_pdf(tr: &dyn Transform, x: f64, s: &Settings, subtract_first: bool) -> Result<Inversion> {
    if x < 0.0 {
        return Ok(Inversion {
            value: 0.0,
            error_estimate: 0.0,
            truncation: 0.0,
            kernel_subtracted: false,
            clipped: 0.0,
        });
    }
    let kernel = tr.kernel();
    let (h0, start) = scales(tr);
    let mut first_err = None;
    if !subtract_first {
        let phi = |t: f64| tr.phi(t);
        let plain = Problem { f: &phi, power: kernel.shape, h0, start, singular: None };
        match pdf_integral(&plain, x, s) {
            Ok((quad, t)) => return Ok(finish(quad.value, quad, t, false, 0.0, f64::INFINITY)),
            Err(e) => first_err = Some(e),
        }
    }
    let rem = |t: f64| tr.remainder(t);
    let sub = Problem { f: &rem, power: kernel.shape + 2.0, h0, start, singular: None };
    match pdf_integral(&sub, x, s) {
        Ok((quad, t)) => Ok(finish(kernel.pdf(x) + quad.value, quad, t, true, 0.0, f64::INFINITY)),
        Err(e) => Err(match first_err {
            Some(f) => better(f, e),
            None => e,
        }),
    }
}

fn better(a: Error, b: Error) -> Error {
    match (&a, &b) {
        (Error::Convergence { achieved: x, .. }, Error::Convergence { achieved: y, .. }) if x <= y => a,
        _ => b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GK21;

    /// Gamma(shape, scale) law: phi = (1 - i scale t)^-shape, the kernel is exact.
    struct GammaLaw {
        shape: f64,
        scale: f64,
    }

    impl Transform for GammaLaw {
        fn phi(&self, t: f64) -> Complex64 {
            (Complex64::new(1.0, -self.scale * t).ln() * -self.shape).exp()
        }
        fn remainder(&self, _t: f64) -> Complex64 {
            Complex64::new(0.0, 0.0)
        }
        fn kernel(&self) -> GammaKernel {
            GammaKernel { weight: 1.0, shape: self.shape, scale: self.scale, correction: 0.0 }
        }
        fn std_dev(&self) -> f64 {
            self.shape.sqrt() * self.scale
        }
    }

    fn settings(tol: f64) -> Settings {
        Settings { tol, max_truncation: 1e9, rule: &GK21 }
    }

    #[test]
    fn plain_inversion_of_gamma_laws() {
        for &(shape, scale) in &[(3.0, 0.5), (1.0, 1.0), (2.5, 2.0)] {
            let law = GammaLaw { shape, scale };
            for &x in &[0.3, 1.0, 2.7, 6.0] {
                let cdf = invert_cdf(&law, x, &settings(1e-9)).unwrap();
                let exact = gamma_p(shape, x / scale);
                assert!((cdf.value - exact).abs() < 1e-9, "shape {shape} x {x}: {} vs {exact}", cdf.value);
                assert!(cdf.error_estimate < 1e-8);
            }
        }
    }

    #[test]
    fn pdf_inversion_of_gamma_law() {
        let law = GammaLaw { shape: 4.0, scale: 0.25 };
        for &x in &[0.2, 1.0, 2.0] {
            let pdf = invert_pdf(&law, x, &settings(1e-9), false).unwrap();
            let exact = gamma_pdf(4.0, 0.25, x);
            assert!((pdf.value - exact).abs() < 1e-8, "x {x}: {} vs {exact}", pdf.value);
            assert!(!pdf.kernel_subtracted);
        }
    }

    #[test]
    fn slow_tail_falls_back_to_kernel() {
        let law = GammaLaw { shape: 0.3, scale: 1.0 };
        let cdf = invert_cdf(&law, 0.5, &settings(1e-8)).unwrap();
        assert!(cdf.kernel_subtracted);
        assert!((cdf.value - gamma_p(0.3, 0.5)).abs() < 1e-12);
    }

    #[test]
    fn lag_kernel_is_continuous() {
        for &x in &[9.9e-5, 1.01e-4] {
            let exact = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -x).exp()) / Complex64::new(0.0, x);
            assert!((lag_kernel(x) - exact).norm() < 1e-12);
        }
        assert_eq!(lag_kernel(0.0), Complex64::new(1.0, 0.0));
    }
}
