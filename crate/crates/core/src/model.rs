//! Theoretical CDFs.

use crate::{Error, Result};

/// An evaluatable cumulative distribution function.
///
/// Implementations must be monotone nondecreasing with limits 0 and 1 and
/// free of side effects; they are evaluated concurrently.
pub trait CdfModel: Sync {
    fn cdf(&self, x: f64) -> f64;

    /// Survival function `1 - F(x)`. Override when the upper tail can be
    /// computed more accurately than by subtraction.
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
}

impl<T: CdfModel + ?Sized> CdfModel for &T {
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        (**self).sf(x)
    }
}

impl<T: CdfModel + ?Sized + Send> CdfModel for Box<T> {
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        (**self).sf(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    lo: f64,
    hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidModel(format!("uniform({lo},{hi}) needs finite lo < hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn standard() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.lo + u * (self.hi - self.lo)
    }
}

impl CdfModel for Uniform {
    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
    fn sf(&self, x: f64) -> f64 {
        ((self.hi - x) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    mu: f64,
    sigma: f64,
}

impl Normal {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidModel(format!("normal({mu},{sigma}) needs finite mu and sigma > 0")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl CdfModel for Normal {
    fn cdf(&self, x: f64) -> f64 {
        0.5 * libm::erfc(-(x - self.mu) / (self.sigma * std::f64::consts::SQRT_2))
    }
    fn sf(&self, x: f64) -> f64 {
        0.5 * libm::erfc((x - self.mu) / (self.sigma * std::f64::consts::SQRT_2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidModel(format!("exponential({rate}) needs rate > 0")));
        }
        Ok(Self { rate })
    }

    pub fn quantile(&self, u: f64) -> f64 {
        -(-u).ln_1p() / self.rate
    }
}

impl CdfModel for Exponential {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }
    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.rate * x).exp()
        }
    }
}

/// Piecewise-linear CDF through `(x, F)` knots; 0 below the first knot and
/// 1 above the last.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl TableCdf {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() || xs.is_empty() {
            return Err(Error::InvalidModel("table needs equally many x and F values, at least one".into()));
        }
        if xs.iter().chain(&fs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("table contains non-finite values".into()));
        }
        if let Some(i) = xs.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidModel(format!("table x not strictly increasing at row {}", i + 2)));
        }
        if let Some(i) = fs.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidModel(format!("table F decreases at row {}", i + 2)));
        }
        if fs[0] < 0.0 || fs[fs.len() - 1] > 1.0 {
            return Err(Error::InvalidModel("table F outside [0, 1]".into()));
        }
        Ok(Self { xs, fs })
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.fs.iter().copied())
    }

    /// Inverse of the interpolant, used for sampling.
    pub fn quantile(&self, u: f64) -> f64 {
        let last = self.fs.len() - 1;
        if u <= self.fs[0] {
            return self.xs[0];
        }
        if u >= self.fs[last] {
            return self.xs[last];
        }
        let j = self.fs.partition_point(|&f| f < u);
        let (f0, f1) = (self.fs[j - 1], self.fs[j]);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        x0 + (u - f0) / (f1 - f0) * (x1 - x0)
    }
}

impl CdfModel for TableCdf {
    fn cdf(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        if x < self.xs[0] {
            return 0.0;
        }
        if x > self.xs[last] {
            return 1.0;
        }
        let j = self.xs.partition_point(|&k| k <= x);
        if j == self.xs.len() {
            return self.fs[last];
        }
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let (f0, f1) = (self.fs[j - 1], self.fs[j]);
        f0 + (x - x0) / (x1 - x0) * (f1 - f0)
    }
}

/// Two-component mixture `(1 - w) F_base + w F_contaminant`.
pub struct Mixture<B, C> {
    pub weight: f64,
    pub base: B,
    pub contaminant: C,
}

impl<B: CdfModel, C: CdfModel> Mixture<B, C> {
    pub fn new(weight: f64, base: B, contaminant: C) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidModel(format!("mixture weight {weight} outside [0, 1]")));
        }
        Ok(Self { weight, base, contaminant })
    }
}

impl<B: CdfModel, C: CdfModel> CdfModel for Mixture<B, C> {
    fn cdf(&self, x: f64) -> f64 {
        (1.0 - self.weight) * self.base.cdf(x) + self.weight * self.contaminant.cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        (1.0 - self.weight) * self.base.sf(x) + self.weight * self.contaminant.sf(x)
    }
}
