use tailtest_core::mc_oracle::{sample_null, McSettings};
use tailtest_core::null_dist::{
    char_fn, cumulant, gamma_closed_form_cdf, gamma_closed_form_pdf, null_cdf, null_pdf, p_value, InversionSettings,
    NullSpec,
};

fn spec(a: f64, n: u64) -> NullSpec {
    NullSpec::new(a, n).unwrap()
}

/// Gauss-Legendre 10-point nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Composite Gauss-Legendre on `[lo, hi]` with `panels` equal panels.
fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for (x, w) in GL_X.iter().zip(GL_W) {
            sum += w * (f(mid - 0.5 * h * x) + f(mid + 0.5 * h * x));
        }
    }
    0.5 * h * sum
}

#[test]
fn closed_form_equivalence_on_grids() {
    let settings = InversionSettings::default();
    for n in [1, 2, 5, 20] {
        let s = spec(1.0, n);
        for i in 0..50 {
            let sigma = 5.0 * i as f64 / 49.0;
            let got = null_cdf(sigma, &s, &settings).unwrap();
            let want = gamma_closed_form_cdf(sigma, n);
            assert!((got - want).abs() <= 1e-8, "n={n} sigma={sigma}: {got} vs {want}");
        }
    }
}

#[test]
fn pdf_matches_closed_form_for_exponent_one() {
    let settings = InversionSettings::default();
    for n in [1, 3, 8] {
        for &x in &[0.1, 0.7, 1.0, 1.9] {
            let got = null_pdf(x, &spec(1.0, n), &settings).unwrap();
            let want = gamma_closed_form_pdf(x, n);
            assert!((got - want).abs() <= 1e-8 * want.max(1.0), "n={n} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn moments_of_inverted_density() {
    let settings = InversionSettings::with_tol(1e-10);
    for (a, n) in [(1.0, 5), (2.0, 4), (3.0, 10)] {
        let s = spec(a, n);
        let (k1, k2) = (cumulant(1, &s), cumulant(2, &s));
        let hi = k1 + 20.0 * k2.sqrt();
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        let panels = 100;
        let h = hi / panels as f64;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in GL_X.iter().zip(GL_W) {
                for s_node in [mid - 0.5 * h * x, mid + 0.5 * h * x] {
                    let g = 0.5 * h * w * null_pdf(s_node, &s, &settings).unwrap();
                    m0 += g;
                    m1 += g * s_node;
                    m2 += g * (s_node - k1).powi(2);
                }
            }
        }
        assert!((m0 - 1.0).abs() < 1e-6, "a={a} n={n}: mass {m0}");
        assert!((m1 - k1).abs() < 1e-6, "a={a} n={n}: mean {m1} vs {k1}");
        assert!((m2 - k2).abs() < 1e-6, "a={a} n={n}: variance {m2} vs {k2}");
    }
}

#[test]
fn density_mass_over_stated_range() {
    let s = spec(3.0, 10);
    let settings = InversionSettings::default();
    let hi = cumulant(1, &s) + 12.0 * cumulant(2, &s).sqrt();
    let mass = integrate(|x| null_pdf(x, &s, &settings).unwrap(), 0.0, hi, 60);
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
}

#[test]
fn cumulants_against_long_partial_sums() {
    for (a, n) in [(2.0, 4), (0.5, 3), (7.0, 2)] {
        let s = spec(a, n);
        for k in 1..=4u32 {
            // direct summation to 1e6 terms with the integral tail bound
            let b = 1.0 / a;
            let kf = k as f64;
            let mut sum = 0.0;
            for l in (1..=1_000_000).rev() {
                let l = l as f64;
                sum += l.powf(-kf) - (l + b).powf(-kf);
            }
            let l = 1e6 + 0.5;
            sum += if k == 1 { (1.0 + b / l).ln() } else { (l.powf(1.0 - kf) - (l + b).powf(1.0 - kf)) / (kf - 1.0) };
            let fact: f64 = (1..k).map(|j| j as f64).product();
            let want = a * fact * s.alpha().powi(k as i32 - 1) * sum;
            let got = cumulant(k, &s);
            assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "a={a} n={n} k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn char_fn_properties() {
    for (a, n) in [(0.3, 2), (1.0, 7), (4.0, 3), (50.0, 50)] {
        let s = spec(a, n);
        assert_eq!(char_fn(0.0, &s).im, 0.0);
        for &t in &[1e-3, 0.4, 3.0, 80.0, 1e4] {
            let v = char_fn(t, &s);
            assert!(v.norm() <= 1.0 + 1e-13);
            assert_eq!(char_fn(-t, &s), v.conj());
        }
    }
}

#[test]
fn cdf_bounded_and_monotone() {
    let settings = InversionSettings::default();
    for (a, n) in [(0.5, 2), (2.0, 1), (3.0, 10), (10.0, 10), (10.0, 2)] {
        let s = spec(a, n);
        let top = cumulant(1, &s) + 8.0 * cumulant(2, &s).sqrt();
        let mut prev = 0.0;
        for i in 0..=60 {
            let sigma = top * i as f64 / 60.0;
            let g = null_cdf(sigma, &s, &settings).unwrap();
            assert!((0.0..=1.0).contains(&g));
            assert!(g >= prev - 1e-9, "a={a} n={n} sigma={sigma}: {g} < {prev}");
            prev = g;
        }
    }
}

#[test]
fn p_value_agrees_with_monte_carlo() {
    let s = spec(3.0, 30);
    let value = cumulant(1, &s);
    let exact = p_value(value, &s, &InversionSettings::default()).unwrap();
    let mc = McSettings { replicates: 1_000_000, seed: 11, chunk_size: 8192 };
    let draws = sample_null(&s, &mc).unwrap();
    let p = draws.iter().filter(|&&v| v >= value).count() as f64 / draws.len() as f64;
    let se = (p * (1.0 - p) / draws.len() as f64).sqrt();
    assert!((exact.p - p).abs() < 4.0 * se, "{} vs {p} (se {se})", exact.p);
}

#[test]
fn large_shape_matches_monte_carlo() {
    let settings = InversionSettings::default();
    for (a, n) in [(2.0, 200), (2.0, 1000), (1.5, 600)] {
        let s = spec(a, n);
        let mut draws = sample_null(&s, &McSettings { replicates: 20_000, seed: 5, chunk_size: 4096 }).unwrap();
        draws.sort_by(f64::total_cmp);
        let r = draws.len() as f64;
        let band = ((2.0f64 / 0.001).ln() / (2.0 * r)).sqrt();
        for i in (99..draws.len()).step_by(200) {
            let g = null_cdf(draws[i], &s, &settings).unwrap();
            assert!(g.is_finite());
            assert!((g - (i + 1) as f64 / r).abs() <= band, "a={a} n={n}: G({}) = {g}", draws[i]);
        }
    }
}
