//! Adaptive Gauss-Kronrod quadrature.

/// Result of a quadrature with its estimated absolute error.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Quad {
    pub value: f64,
    pub error: f64,
    /// Integral of |f|, used for the round-off floor.
    pub abs: f64,
}

impl std::ops::AddAssign for Quad {
    fn add_assign(&mut self, rhs: Quad) {
        self.value += rhs.value;
        self.error += rhs.error;
        self.abs += rhs.abs;
    }
}

/// Gauss-Kronrod rule: abscissae in descending order ending with 0, Gauss
/// weights for the even-indexed abscissae, Kronrod weights for all.
#[derive(Debug)]
pub(crate) struct Rule {
    xgk: &'static [f64],
    wg: &'static [f64],
    wgk: &'static [f64],
}

#[allow(clippy::excessive_precision)]
pub(crate) const GK21: Rule = Rule {
    xgk: &[
        0.995_657_163_025_808_080_735_527_280_689_003,
        0.973_906_528_517_171_720_077_964_012_084_452,
        0.930_157_491_355_708_226_001_207_180_059_508,
        0.865_063_366_688_984_510_732_096_688_423_493,
        0.780_817_726_586_416_897_063_717_578_345_042,
        0.679_409_568_299_024_406_234_327_365_114_874,
        0.562_757_134_668_604_683_339_000_099_272_694,
        0.433_395_394_129_247_190_799_265_943_165_784,
        0.294_392_862_701_460_198_131_126_603_103_866,
        0.148_874_338_981_631_210_884_826_001_129_720,
        0.0,
    ],
    wg: &[
        0.066_671_344_308_688_137_593_568_809_893_332,
        0.149_451_349_150_580_593_145_776_339_657_697,
        0.219_086_362_515_982_043_995_534_934_228_163,
        0.269_266_719_309_996_355_091_226_921_569_469,
        0.295_524_224_714_752_870_173_892_994_651_338,
    ],
    wgk: &[
        0.011_694_638_867_371_874_278_064_396_062_192,
        0.032_558_162_307_964_727_478_818_972_459_390,
        0.054_755_896_574_351_996_031_381_300_244_580,
        0.075_039_674_810_919_952_767_043_140_916_190,
        0.093_125_454_583_697_605_535_065_465_083_366,
        0.109_387_158_802_297_641_899_210_590_325_805,
        0.123_491_976_262_065_851_077_958_109_831_074,
        0.134_709_217_311_473_325_928_054_001_771_707,
        0.142_775_938_577_060_080_797_094_273_138_717,
        0.147_739_104_901_338_491_374_841_515_972_068,
        0.149_445_554_002_916_905_664_936_468_389_821,
    ],
};

#[allow(clippy::excessive_precision)]
pub(crate) const GK31: Rule = Rule {
    xgk: &[
        0.998_002_298_693_397_060_285_172_840_152_271,
        0.987_992_518_020_485_428_489_565_718_586_613,
        0.967_739_075_679_139_134_257_347_978_784_337,
        0.937_273_392_400_705_904_307_758_947_710_209,
        0.897_264_532_344_081_900_882_509_656_454_496,
        0.848_206_583_410_427_216_200_648_320_774_217,
        0.790_418_501_442_465_932_967_649_294_817_947,
        0.724_417_731_360_170_047_416_186_054_613_938,
        0.650_996_741_297_416_970_533_735_895_313_275,
        0.570_972_172_608_538_847_537_226_737_253_911,
        0.485_081_863_640_239_680_693_655_740_232_351,
        0.394_151_347_077_563_369_897_207_370_981_045,
        0.299_180_007_153_168_812_166_780_024_266_389,
        0.201_194_093_997_434_522_300_628_303_394_596,
        0.101_142_066_918_717_499_027_074_231_447_392,
        0.0,
    ],
    wg: &[
        0.030_753_241_996_117_268_354_628_393_577_204,
        0.070_366_047_488_108_124_709_267_416_450_667,
        0.107_159_220_467_171_935_011_869_546_685_869,
        0.139_570_677_926_154_314_447_804_794_511_028,
        0.166_269_205_816_993_933_553_200_860_481_209,
        0.186_161_000_015_562_211_026_800_561_866_423,
        0.198_431_485_327_111_576_456_118_326_443_839,
        0.202_578_241_925_561_272_880_620_199_967_519,
    ],
    wgk: &[
        0.005_377_479_872_923_348_987_792_051_430_128,
        0.015_007_947_329_316_122_538_374_763_075_807,
        0.025_460_847_326_715_320_186_874_001_019_653,
        0.035_346_360_791_375_846_222_037_948_478_360,
        0.044_589_751_324_764_876_608_227_299_373_280,
        0.053_481_524_690_928_087_265_343_147_239_430,
        0.062_009_567_800_670_640_285_139_230_960_803,
        0.069_854_121_318_728_258_709_520_077_099_147,
        0.076_849_680_757_720_378_894_432_777_482_659,
        0.083_080_502_823_133_021_038_289_247_286_104,
        0.088_564_443_056_211_770_647_275_443_693_774,
        0.093_126_598_170_825_321_225_486_872_747_346,
        0.096_642_726_983_623_678_505_179_907_627_589,
        0.099_173_598_721_791_959_332_393_173_484_603,
        0.100_769_845_523_875_595_044_946_662_617_570,
        0.101_330_007_014_791_549_017_374_792_767_493,
    ],
};

impl Rule {
    pub(crate) fn for_order(order: usize) -> Option<&'static Rule> {
        match order {
            21 => Some(&GK21),
            31 => Some(&GK31),
            _ => None,
        }
    }

    /// One application of the rule on `[a, b]`, QUADPACK error heuristic.
    pub(crate) fn apply<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Quad {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let last = self.xgk.len() - 1;
        let fc = f(center);
        // the center is a Gauss node when the Gauss rule has odd order
        let mut res_g = if last % 2 == 1 { self.wg[self.wg.len() - 1] * fc } else { 0.0 };
        let mut res_k = self.wgk[last] * fc;
        let mut res_abs = res_k.abs();
        let mut fv1 = [0.0; 16];
        let mut fv2 = [0.0; 16];
        for j in 0..last {
            let dx = half * self.xgk[j];
            let f1 = f(center - dx);
            let f2 = f(center + dx);
            fv1[j] = f1;
            fv2[j] = f2;
            res_k += self.wgk[j] * (f1 + f2);
            res_abs += self.wgk[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += self.wg[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = self.wgk[last] * (fc - mean).abs();
        for j in 0..last {
            res_asc += self.wgk[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
        }
        let value = res_k * half;
        let res_abs = res_abs * half.abs();
        let res_asc = res_asc * half.abs();
        let mut error = ((res_k - res_g) * half).abs();
        if res_asc != 0.0 && error != 0.0 {
            error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
        }
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            error = error.max(50.0 * f64::EPSILON * res_abs);
        }
        Quad { value, error, abs: res_abs }
    }
}

const MAX_SUBDIVISIONS: usize = 2000;

/// Adaptive bisection until the summed error estimate is below `tol` or at
/// the round-off floor.
pub(crate) fn adaptive<F: Fn(f64) -> f64>(rule: &Rule, f: &F, a: f64, b: f64, tol: f64) -> Quad {
    let mut parts = vec![(a, b, rule.apply(f, a, b))];
    let mut total = parts[0].2;
    for _ in 0..MAX_SUBDIVISIONS {
        let floor = 100.0 * f64::EPSILON * total.abs;
        if total.error <= tol.max(floor) || !total.value.is_finite() {
            break;
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, whole) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, whole));
            break;
        }
        let left = rule.apply(f, lo, mid);
        let right = rule.apply(f, mid, hi);
        total.value += left.value + right.value - whole.value;
        total.error += left.error + right.error - whole.error;
        total.abs += left.abs + right.abs - whole.abs;
        parts.push((lo, mid, left));
        parts.push((mid, hi, right));
    }
    // re-sum to drop the drift from incremental updates
    let mut out = Quad::default();
    for (_, _, q) in &parts {
        out += *q;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        for rule in [&GK21, &GK31] {
            let q = rule.apply(&|x: f64| x.powi(9) - 3.0 * x * x, 0.0, 2.0);
            assert!((q.value - (102.4 - 8.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn oscillatory_and_peaked() {
        let q = adaptive(&GK21, &|x: f64| (50.0 * x).cos(), 0.0, 1.0, 1e-12);
        assert!((q.value - 50f64.sin() / 50.0).abs() < 1e-12);
        let q = adaptive(&GK21, &|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10);
        let exact = 2.0 * (1.0 / 1e-2f64).atan() / 1e-2;
        assert!((q.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn integrable_singularity() {
        let q = adaptive(&GK21, &|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10);
        assert!((q.value - 2.0).abs() < 1e-8, "{q:?}");
    }
}
