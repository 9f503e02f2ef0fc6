//! Parsing of distribution specifications and sampling from them.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, RngExt};
use rand_distr::{Distribution, StandardNormal};
use tailtest_core::ecdf::{average_ecdfs, AveragedEcdf};
use tailtest_core::model::{Exponential, Normal, TableCdf, Uniform};
use tailtest_core::CdfModel;

use crate::error::{CliError, CliResult};
use crate::ingest::{ingest_sample, read_table};

/// A parsed distribution, as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Normal {
        mu: f64,
        sigma: f64,
    },
    Exponential {
        rate: f64,
    },
    Table(PathBuf),
    Ecdf(Vec<PathBuf>),
    /// `(1 - weight) * base + weight * contaminant`.
    Mixture {
        weight: f64,
        base: Box<DistributionSpec>,
        contaminant: Box<DistributionSpec>,
    },
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            DistributionSpec::Normal { mu, sigma } => write!(f, "normal({mu},{sigma})"),
            DistributionSpec::Exponential { rate } => write!(f, "exponential({rate})"),
            DistributionSpec::Table(p) => write!(f, "table:{}", p.display()),
            DistributionSpec::Ecdf(paths) => {
                let joined: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
                write!(f, "ecdf:{}", joined.join(","))
            }
            DistributionSpec::Mixture { weight, base, contaminant } => {
                write!(f, "mixture({weight},{base},{contaminant})")
            }
        }
    }
}

impl std::str::FromStr for DistributionSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        parse(s.trim())
    }
}

fn bad(s: &str, why: impl fmt::Display) -> CliError {
    CliError::Input(format!("invalid distribution {s:?}: {why}"))
}

fn parse(s: &str) -> CliResult<DistributionSpec> {
    if let Some(path) = s.strip_prefix("table:") {
        if path.is_empty() {
            return Err(bad(s, "missing table path"));
        }
        return Ok(DistributionSpec::Table(PathBuf::from(path)));
    }
    if let Some(paths) = s.strip_prefix("ecdf:") {
        let list: Vec<PathBuf> = paths.split(',').map(str::trim).filter(|p| !p.is_empty()).map(PathBuf::from).collect();
        if list.is_empty() {
            return Err(bad(s, "missing sample paths"));
        }
        return Ok(DistributionSpec::Ecdf(list));
    }
    let open = s.find('(').ok_or_else(|| bad(s, "expected name(parameters)"))?;
    if !s.ends_with(')') {
        return Err(bad(s, "missing closing parenthesis"));
    }
    let name = s[..open].trim();
    let args = split_args(&s[open + 1..s.len() - 1]).map_err(|why| bad(s, why))?;
    let numbers = |count: usize| -> CliResult<Vec<f64>> {
        if args.len() != count {
            return Err(bad(s, format!("{name} takes {count} parameter(s), got {}", args.len())));
        }
        args.iter()
            .map(|a| match a.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(bad(s, format!("parameter {a:?} is not a finite number"))),
            })
            .collect()
    };
    let spec = match name {
        "uniform" => {
            let v = numbers(2)?;
            DistributionSpec::Uniform { lo: v[0], hi: v[1] }
        }
        "normal" => {
            let v = numbers(2)?;
            DistributionSpec::Normal { mu: v[0], sigma: v[1] }
        }
        "exponential" => DistributionSpec::Exponential { rate: numbers(1)?[0] },
        "mixture" => {
            if args.len() != 3 {
                return Err(bad(s, "mixture takes (weight, base, contaminant)"));
            }
            let weight = args[0].trim().parse::<f64>().map_err(|_| bad(s, "mixture weight is not a number"))?;
            DistributionSpec::Mixture {
                weight,
                base: Box::new(parse(args[1].trim())?),
                contaminant: Box::new(parse(args[2].trim())?),
            }
        }
        other => return Err(bad(s, format!("unknown distribution {other:?}"))),
    };
    spec.check().map_err(|why| bad(s, why))?;
    Ok(spec)
}

/// Splits on commas that are not nested inside parentheses.
fn split_args(s: &str) -> Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parentheses".into());
                }
            }
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    parts.push(&s[start..]);
    Ok(parts)
}

impl DistributionSpec {
    fn check(&self) -> Result<(), String> {
        match *self {
            DistributionSpec::Uniform { lo, hi } if lo >= hi => Err(format!("need lo < hi, got {lo} and {hi}")),
            DistributionSpec::Normal { sigma, .. } if sigma <= 0.0 => Err(format!("sigma = {sigma} must be positive")),
            DistributionSpec::Exponential { rate } if rate <= 0.0 => Err(format!("rate = {rate} must be positive")),
            DistributionSpec::Mixture { weight, .. } if !(0.0..=1.0).contains(&weight) => {
                Err(format!("mixture weight {weight} outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Loads any referenced files and builds the model.
    pub fn build(&self) -> CliResult<Model> {
        Ok(match self {
            DistributionSpec::Uniform { lo, hi } => Model::Uniform(Uniform::new(*lo, *hi)?),
            DistributionSpec::Normal { mu, sigma } => Model::Normal(Normal::new(*mu, *sigma)?),
            DistributionSpec::Exponential { rate } => Model::Exponential(Exponential::new(*rate)?),
            DistributionSpec::Table(path) => Model::Table(load_table(path)?),
            DistributionSpec::Ecdf(paths) => {
                let samples =
                    paths.iter().map(|p| ingest_sample(p, None).map(|l| l.sample)).collect::<CliResult<Vec<_>>>()?;
                Model::Ecdf(average_ecdfs(&samples)?)
            }
            DistributionSpec::Mixture { weight, base, contaminant } => Model::Mixture {
                weight: *weight,
                base: Box::new(base.build()?),
                contaminant: Box::new(contaminant.build()?),
            },
        })
    }
}

fn load_table(path: &Path) -> CliResult<TableCdf> {
    let (xs, fs) = read_table(path)?;
    TableCdf::new(xs, fs).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A theoretical CDF that can also be sampled from.
#[derive(Debug)]
pub enum Model {
    Uniform(Uniform),
    Normal(Normal),
    Exponential(Exponential),
    Table(TableCdf),
    Ecdf(AveragedEcdf),
    Mixture { weight: f64, base: Box<Model>, contaminant: Box<Model> },
}

impl CdfModel for Model {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            Model::Uniform(m) => m.cdf(x),
            Model::Normal(m) => m.cdf(x),
            Model::Exponential(m) => m.cdf(x),
            Model::Table(m) => m.cdf(x),
            Model::Ecdf(m) => m.cdf(x),
            Model::Mixture { weight, base, contaminant } => (1.0 - weight) * base.cdf(x) + weight * contaminant.cdf(x),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match self {
            Model::Uniform(m) => m.sf(x),
            Model::Normal(m) => m.sf(x),
            Model::Exponential(m) => m.sf(x),
            Model::Table(m) => m.sf(x),
            Model::Ecdf(m) => m.sf(x),
            Model::Mixture { weight, base, contaminant } => (1.0 - weight) * base.sf(x) + weight * contaminant.sf(x),
        }
    }
}

impl Model {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Model::Uniform(m) => m.quantile(rng.random::<f64>()),
            Model::Normal(m) => {
                let z: f64 = StandardNormal.sample(rng);
                m.mu() + m.sigma() * z
            }
            Model::Exponential(m) => m.quantile(rng.random::<f64>()),
            Model::Table(m) => m.quantile(rng.random::<f64>()),
            Model::Ecdf(m) => {
                let u = rng.random::<f64>();
                let points = m.breakpoints();
                let i = points.partition_point(|&x| m.cdf(x) <= u);
                points[i.min(points.len() - 1)]
            }
            Model::Mixture { weight, base, contaminant } => {
                if rng.random::<f64>() < *weight {
                    contaminant.sample(rng)
                } else {
                    base.sample(rng)
                }
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}
