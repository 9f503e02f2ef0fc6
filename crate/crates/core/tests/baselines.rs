use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailtest_core::baseline_ks::{
    kolmogorov_statistic, ks_alternating_series, ks_p, ks_theta_series, smirnov_statistic,
};
use tailtest_core::ecdf::{average_ecdfs, dispersion, gaussian_point_probability, point_probability};
use tailtest_core::model::{Normal, Uniform};
use tailtest_core::statistic::Sample;
use tailtest_core::CdfModel;

fn normal_draws(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        })
        .collect()
}

#[test]
fn dual_series_agree() {
    for i in 0..=270 {
        let lambda = 0.3 + i as f64 * 0.01;
        let (x, y) = (ks_alternating_series(lambda), ks_theta_series(lambda));
        assert!((x - y).abs() < 1e-10, "lambda={lambda}: {x} vs {y}");
    }
}

#[test]
fn ks_p_decreasing_onto_unit_interval() {
    let mut prev = ks_p(0.0);
    assert_eq!(prev, 1.0);
    for i in 1..=400 {
        let p = ks_p(i as f64 * 0.01);
        // strict wherever the decrease is representable in f64
        assert!(p <= prev, "{i}");
        if prev < 1.0 - 1e-15 {
            assert!(p < prev, "{i}");
        }
        assert!(p > 0.0);
        prev = p;
    }
}

#[test]
fn two_sample_converges_to_one_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let model = Normal::new(0.0, 1.0).unwrap();
    let small = Sample::new(normal_draws(&mut rng, 10)).unwrap();
    let huge = Sample::new(normal_draws(&mut rng, 100_000)).unwrap();
    let two = smirnov_statistic(&small, &huge);
    let one = kolmogorov_statistic(&small, &model).unwrap();
    assert!((two.lambda - one.lambda).abs() < 0.02, "{} vs {}", two.lambda, one.lambda);
}

#[test]
fn averaged_ecdf_is_a_cdf() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<Sample> = (0..4).map(|_| Sample::new(normal_draws(&mut rng, 25)).unwrap()).collect();
    let e = average_ecdfs(&samples).unwrap();
    let bp = e.breakpoints().to_vec();
    assert_eq!(e.cdf(bp[0] - 1.0), 0.0);
    assert_eq!(e.cdf(bp[bp.len() - 1] + 1.0), 1.0);
    let mut prev = 0.0;
    for &b in &bp {
        let below = e.cdf(b - 1e-9);
        let at = e.cdf(b);
        assert!(below >= prev && at > below);
        // right-continuous: the value at the jump is the value just after it
        assert_eq!(at, e.cdf(b + 1e-12_f64.min(1e-3 * b.abs().max(1e-6))));
        prev = at;
    }
}

#[test]
fn binomial_lattice_normalised() {
    for m in [1u64, 7, 50, 101, 200] {
        for f in [0.1, 0.5, 0.9] {
            let total: f64 = (0..=m).map(|j| point_probability(j as f64 / m as f64, f, 1, m).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "m={m} f={f}: {total}");
        }
    }
}

#[test]
fn gaussian_limit_of_binomial() {
    let exact = point_probability(0.5, 0.5, 1, 400).unwrap() * 400.0;
    let approx = gaussian_point_probability(0.5, 0.5, 1, 400).unwrap();
    assert!((approx / exact - 1.0).abs() < 0.02, "{approx} vs {exact}");
}

#[test]
fn empirical_dispersion() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (k, n) = (5usize, 20usize);
    let x = 0.3;
    let reps = 10_000;
    let mus: Vec<f64> = (0..reps)
        .map(|_| {
            let samples: Vec<Sample> =
                (0..k).map(|_| Sample::new((0..n).map(|_| rng.random::<f64>()).collect()).unwrap()).collect();
            average_ecdfs(&samples).unwrap().cdf(x)
        })
        .collect();
    let mean = mus.iter().sum::<f64>() / reps as f64;
    let sd = (mus.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    let want = dispersion(Uniform::standard().cdf(x), k as u64, n as u64).unwrap();
    assert!((sd / want - 1.0).abs() < 0.05, "{sd} vs {want}");
}
