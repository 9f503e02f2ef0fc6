//! Subcommand implementations. Each returns the text written to stdout.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use tailtest_core::asymptotic::{self, LimitSpec};
use tailtest_core::baseline_ks::{kolmogorov_statistic, smirnov_statistic};
use tailtest_core::mc_oracle::{chunk_rng, sample_null, McSettings};
use tailtest_core::null_dist::{
    self, cumulant, DispatchPolicy, InversionSettings, MethodRequest, NullSpec, PValueMethod,
};
use tailtest_core::statistic::{a_statistic_with, Sample, StatisticOptions, TailSide};

use crate::args::*;
use crate::distribution::{DistributionSpec, Model};
use crate::error::{CliError, CliResult};
use crate::ingest::{ingest_sample, LoadedSample};
use crate::report::*;

fn sides(side: SideArg) -> &'static [TailSide] {
    match side {
        SideArg::Right => &[TailSide::Right],
        SideArg::Left => &[TailSide::Left],
        SideArg::Both => &[TailSide::Right, TailSide::Left],
    }
}

fn summarize(path: &Path, loaded: &LoadedSample) -> InputSummary {
    let values = loaded.sample.values();
    let digest = Sha256::digest(&loaded.bytes);
    InputSummary {
        path: path.display().to_string(),
        sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        count: values.len() as u64,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn settings(tol: f64) -> CliResult<InversionSettings> {
    let s = InversionSettings::with_tol(tol);
    s.validate()?;
    Ok(s)
}

fn mc_settings(mc: &McArgs) -> CliResult<McSettings> {
    let s = McSettings { replicates: mc.replicates, seed: mc.seed, ..McSettings::default() };
    s.validate()?;
    Ok(s)
}

fn write_output(text: String, out: Option<&Path>) -> CliResult<String> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn run_test(args: &TestArgs) -> CliResult<TestReport> {
    let spec: DistributionSpec = args.dist.parse()?;
    let model = spec.build()?;
    let loaded = ingest_sample(&args.sample, args.column.as_deref())?;
    let n = loaded.sample.len() as u64;
    let null = NullSpec::new(args.a, n)?;
    let inversion = settings(args.tol)?;
    let mc = mc_settings(&args.mc)?;
    let policy = DispatchPolicy { fallback: Some(mc), ..DispatchPolicy::default() };
    let request = match args.method {
        MethodArg::Auto => MethodRequest::Auto,
        MethodArg::Exact => MethodRequest::Exact,
        MethodArg::Asymptotic => MethodRequest::Asymptotic,
        MethodArg::Mc => MethodRequest::MonteCarlo(mc),
    };
    let options = StatisticOptions { clamp: args.clamp };
    let mut reports = Vec::new();
    for &side in sides(args.side) {
        let stat = a_statistic_with(&loaded.sample, &model, args.a, side, &options)?;
        let p = null_dist::p_value_with(stat.value, &null, &inversion, &policy, request)?;
        reports.push(SideReport {
            side,
            statistic: (!stat.is_infinite()).then_some(stat.value),
            infinite: stat.is_infinite(),
            clamped_count: stat.clamped_count,
            p: p.p,
            method: p.method,
            error_estimate: p.error_estimate,
        });
    }
    let combined_p = (reports.len() == 2).then(|| (2.0 * reports[0].p.min(reports[1].p)).min(1.0));
    Ok(TestReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        input: summarize(&args.sample, &loaded),
        distribution: spec.to_string(),
        a: args.a,
        n,
        alpha: null.alpha(),
        method_requested: format!("{:?}", args.method).to_lowercase(),
        sides: reports,
        combined_p,
    })
}

pub fn test(args: &TestArgs) -> CliResult<String> {
    let report = run_test(args)?;
    match args.output {
        OutputFormat::Text => Ok(report.to_text()),
        OutputFormat::Json => to_json(&report),
    }
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| match v.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(CliError::Input(format!("{what}: {:?} is not a finite number", v.trim()))),
        })
        .collect::<CliResult<_>>()?;
    Ok(values)
}

fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Input(format!("range {s:?} must be lo:hi:count with lo <= hi and count >= 1"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && count >= 1) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect())
}

/// Rows `(sigma, G, method, error estimate)`.
pub fn null_table_rows(args: &NullTableArgs) -> CliResult<Vec<(f64, f64, PValueMethod, f64)>> {
    let grid = match (&args.grid, &args.range) {
        (Some(g), _) => parse_list(g, "grid")?,
        (None, Some(r)) => parse_range(r)?,
        (None, None) => return Err(CliError::Input("one of --grid or --range is required".into())),
    };
    if grid.is_empty() {
        return Err(CliError::Input("empty grid".into()));
    }
    let inversion = settings(args.tol)?;
    match (args.a, args.n, args.alpha) {
        (Some(a), Some(n), None) => {
            let spec = NullSpec::new(a, n)?;
            grid.iter()
                .map(|&sigma| {
                    if a == 1.0 {
                        let g = null_dist::gamma_closed_form_cdf(sigma, n);
                        Ok((sigma, g, PValueMethod::GammaClosedForm, 1e-14))
                    } else {
                        let r = null_dist::null_cdf_detailed(sigma, &spec, &inversion)?;
                        Ok((sigma, r.value, PValueMethod::Inversion, r.error_estimate))
                    }
                })
                .collect()
        }
        (None, None, Some(alpha)) => {
            let spec = LimitSpec::new(alpha)?;
            grid.iter()
                .map(|&sigma| {
                    if args.series {
                        let t = asymptotic::limit_cdf_series(sigma, &spec)?;
                        Ok((sigma, t.value, PValueMethod::AsymptoticSeries, t.error_indicator))
                    } else {
                        let r = asymptotic::limit_cdf_detailed(sigma, &spec, &inversion)?;
                        Ok((sigma, r.value, PValueMethod::AsymptoticIntegral, r.error_estimate))
                    }
                })
                .collect()
        }
        _ => Err(CliError::Input("give either -a and -n, or --alpha".into())),
    }
}

pub fn null_table(args: &NullTableArgs) -> CliResult<String> {
    let mut s = String::from("sigma,G,method,error_estimate\n");
    for (sigma, g, method, err) in null_table_rows(args)? {
        let _ = writeln!(s, "{sigma},{g},{method},{err:e}");
    }
    write_output(s, args.out.as_deref())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub method: String,
    pub a: Option<f64>,
    pub rejections: u64,
    pub replicates: u64,
}

impl PowerRow {
    pub fn power(&self) -> f64 {
        self.rejections as f64 / self.replicates as f64
    }
    pub fn std_error(&self) -> f64 {
        let p = self.power();
        (p * (1.0 - p) / self.replicates as f64).sqrt()
    }
}

/// The critical value `c` with `P(A > c) = level` under the null.
fn critical_value(spec: &NullSpec, level: f64, inversion: &InversionSettings) -> CliResult<f64> {
    let policy = DispatchPolicy { fallback: None, ..DispatchPolicy::default() };
    let p =
        |c: f64| -> CliResult<f64> { Ok(null_dist::p_value_with(c, spec, inversion, &policy, MethodRequest::Auto)?.p) };
    let (mean, sd) = (cumulant(1, spec), cumulant(2, spec).sqrt());
    let mut lo = 0.0;
    let mut hi = mean + sd;
    while p(hi)? > level {
        lo = hi;
        hi += 2.0 * sd;
        if hi > mean + 1e4 * sd {
            return Err(CliError::Convergence(format!("no critical value found for level {level}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * hi {
            break;
        }
        if p(mid)? > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn power_rows(args: &PowerArgs) -> CliResult<Vec<PowerRow>> {
    if args.replicates == 0 {
        return Err(CliError::Input("replicates must be positive".into()));
    }
    if args.n == 0 {
        return Err(CliError::Input("n must be positive".into()));
    }
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::Input(format!("level {} outside (0, 1)", args.level)));
    }
    let null: Model = args.null.parse::<DistributionSpec>()?.build()?;
    let alt: Model = args.alt.parse::<DistributionSpec>()?.build()?;
    let a_list = parse_list(&args.a_list, "a-list")?;
    let inversion = settings(args.tol)?;
    let tested = sides(args.side);
    let level = args.level / tested.len() as f64;
    let critical = a_list
        .iter()
        .map(|&a| critical_value(&NullSpec::new(a, args.n)?, level, &inversion))
        .collect::<CliResult<Vec<f64>>>()?;
    let options = StatisticOptions::default();

    // One row of rejection flags per replicate: A for each a, then KS.
    let flags: Vec<Vec<bool>> = (0..args.replicates)
        .into_par_iter()
        .map(|r| -> CliResult<Vec<bool>> {
            let mut rng = chunk_rng(args.seed, r);
            let sample = Sample::new(alt.draw(args.n as usize, &mut rng))?;
            let mut row = Vec::with_capacity(a_list.len() + 1);
            for (&a, &c) in a_list.iter().zip(&critical) {
                let mut reject = false;
                for &side in tested {
                    reject |= a_statistic_with(&sample, &null, a, side, &options)?.value > c;
                }
                row.push(reject);
            }
            let ks = kolmogorov_statistic(&sample, &null)?.with_p();
            row.push(ks.p.unwrap_or(1.0) < args.level);
            Ok(row)
        })
        .collect::<CliResult<_>>()?;

    let count = |j: usize| flags.iter().filter(|row| row[j]).count() as u64;
    let mut rows: Vec<PowerRow> = a_list
        .iter()
        .enumerate()
        .map(|(j, &a)| PowerRow { method: "A".into(), a: Some(a), rejections: count(j), replicates: args.replicates })
        .collect();
    rows.push(PowerRow { method: "KS".into(), a: None, rejections: count(a_list.len()), replicates: args.replicates });
    Ok(rows)
}

pub fn power(args: &PowerArgs) -> CliResult<String> {
    let mut s = String::from("method,a,rejections,replicates,power,std_error\n");
    for row in power_rows(args)? {
        let a = row.a.map(|a| a.to_string()).unwrap_or_default();
        let _ =
            writeln!(s, "{},{a},{},{},{},{}", row.method, row.rejections, row.replicates, row.power(), row.std_error());
    }
    write_output(s, args.out.as_deref())
}

pub fn ks(args: &KsArgs) -> CliResult<String> {
    let a = ingest_sample(&args.sample_a, args.column.as_deref())?;
    let report = match (&args.sample_b, &args.dist) {
        (Some(path_b), _) => {
            let b = ingest_sample(path_b, args.column.as_deref())?;
            KsReport {
                tool: TOOL.into(),
                version: VERSION.into(),
                sample_a: summarize(&args.sample_a, &a),
                sample_b: Some(summarize(path_b, &b)),
                distribution: None,
                result: smirnov_statistic(&a.sample, &b.sample).with_p(),
            }
        }
        (None, Some(dist)) => {
            let spec: DistributionSpec = dist.parse()?;
            let model = spec.build()?;
            KsReport {
                tool: TOOL.into(),
                version: VERSION.into(),
                sample_a: summarize(&args.sample_a, &a),
                sample_b: None,
                distribution: Some(spec.to_string()),
                result: kolmogorov_statistic(&a.sample, &model)?.with_p(),
            }
        }
        (None, None) => return Err(CliError::Input("give --sample-b or --dist".into())),
    };
    match args.output {
        OutputFormat::Text => Ok(report.to_text()),
        OutputFormat::Json => to_json(&report),
    }
}

/// Sup distance over the compared points and the 99% DKW half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub rows: Vec<(f64, f64, f64)>,
    pub sup: f64,
    pub dkw: f64,
}

pub fn mc_calibration(args: &McCalibrateArgs) -> CliResult<Calibration> {
    if args.points == 0 {
        return Err(CliError::Input("points must be positive".into()));
    }
    let spec = NullSpec::new(args.a, args.n)?;
    let inversion = settings(args.tol)?;
    let mut draws = sample_null(&spec, &mc_settings(&args.mc)?)?;
    draws.sort_by(f64::total_cmp);
    let r = draws.len();
    let mut rows = Vec::with_capacity(args.points);
    let mut sup: f64 = 0.0;
    for j in 1..=args.points {
        let i = (j * r).div_ceil(args.points + 1).clamp(1, r);
        let sigma = draws[i - 1];
        let exact = if args.a == 1.0 {
            null_dist::gamma_closed_form_cdf(sigma, args.n)
        } else {
            null_dist::null_cdf(sigma, &spec, &inversion)?
        };
        let empirical = i as f64 / r as f64;
        sup = sup.max((empirical - exact).abs()).max(((i - 1) as f64 / r as f64 - exact).abs());
        rows.push((sigma, empirical, exact));
    }
    let dkw = ((2.0f64 / 0.01).ln() / (2.0 * r as f64)).sqrt();
    Ok(Calibration { rows, sup, dkw })
}

pub fn mc_calibrate(args: &McCalibrateArgs, err: &mut dyn std::io::Write) -> CliResult<String> {
    let cal = mc_calibration(args)?;
    let mut s = String::from("sigma,empirical,exact,difference\n");
    for (sigma, emp, exact) in &cal.rows {
        let _ = writeln!(s, "{sigma},{emp},{exact},{}", emp - exact);
    }
    let verdict = if cal.sup <= cal.dkw { "within" } else { "outside" };
    let _ = writeln!(err, "sup distance {:.3e}, {verdict} the 99% DKW band {:.3e}", cal.sup, cal.dkw);
    write_output(s, args.out.as_deref())
}
