#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use core::f64::consts::{FRAC_1_SQRT_2, PI};
#[cfg(not(feature = "std"))]
use num_traits::Float;

// Rational approximations for erf/erfc (Cephes ndtr.c).
const ERFC_P: [f64; 9] = [
    2.461_969_814_735_305_125_24e-10,
    5.641_895_648_310_688_219_77e-1,
    7.463_210_564_422_699_126_87e0,
    4.863_719_709_856_813_666_14e1,
    1.965_208_329_560_770_982_42e2,
    5.264_451_949_954_773_586_31e2,
    9.345_285_271_719_576_075_40e2,
    1.027_551_886_895_157_102_72e3,
    5.575_353_353_693_993_275_26e2,
];
const ERFC_Q: [f64; 8] = [
    1.322_819_511_547_449_925_08e1,
    8.670_721_408_859_897_423_29e1,
    3.549_377_788_878_198_910_62e2,
    9.757_085_017_432_054_897_53e2,
    1.823_909_166_879_097_362_89e3,
    2.246_337_608_187_109_817_92e3,
    1.656_663_091_941_613_501_82e3,
    5.575_353_408_177_276_755_46e2,
];
const ERFC_R: [f64; 6] = [
    5.641_895_835_477_550_739_84e-1,
    1.275_366_707_599_781_044_16e0,
    5.019_050_422_511_804_774_14e0,
    6.160_210_979_930_535_851_95e0,
    7.409_742_699_504_489_391_60e0,
    2.978_866_653_721_002_406_70e0,
];
const ERFC_S: [f64; 6] = [
    2.260_528_632_201_172_765_90e0,
    9.396_035_249_380_014_346_73e0,
    1.204_895_398_080_966_566_05e1,
    1.708_144_507_475_658_972_22e1,
    9.608_968_090_632_858_781_98e0,
    3.369_076_451_000_815_160_50e0,
];
const ERF_T: [f64; 5] = [
    9.604_973_739_870_516_387_49e0,
    9.002_601_972_038_426_892_17e1,
    2.232_005_345_946_843_192_26e3,
    7.003_325_141_128_050_754_73e3,
    5.559_230_130_103_949_627_68e4,
];
const ERF_U: [f64; 5] = [
    3.356_171_416_475_030_996_47e1,
    5.213_579_497_801_526_797_95e2,
    4.594_323_829_709_801_279_87e3,
    2.262_900_006_138_909_342_46e4,
    4.926_739_426_086_359_210_86e4,
];

fn polevl(x: f64, coef: &[f64]) -> f64 {
    coef.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Like `polevl` with an implicit leading coefficient of 1.
fn p1evl(x: f64, coef: &[f64]) -> f64 {
    coef.iter().fold(1.0, |acc, &c| acc * x + c)
}

fn erf_small(x: f64) -> f64 {
    let z = x * x;
    x * polevl(z, &ERF_T) / p1evl(z, &ERF_U)
}

/// `exp(-x^2)` with the square split so large `x` keeps relative accuracy.
fn exp_neg_sq(x: f64) -> f64 {
    let x = x.abs();
    let hi = (x * 128.0).floor() / 128.0;
    let lo = x - hi;
    (-hi * hi).exp() * (-(2.0 * hi * lo + lo * lo)).exp()
}

/// Complementary error function for `x >= 1`.
fn erfc_large(x: f64) -> f64 {
    debug_assert!(x >= 1.0);
    let z = exp_neg_sq(x);
    let (p, q) = if x < 8.0 {
        (polevl(x, &ERFC_P), p1evl(x, &ERFC_Q))
    } else {
        (polevl(x, &ERFC_R), p1evl(x, &ERFC_S))
    };
    z * p / q
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let x = z * FRAC_1_SQRT_2;
    let ax = x.abs();
    if ax < 1.0 {
        return 0.5 + 0.5 * erf_small(x);
    }
    if ax > 40.0 {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * erfc_large(ax);
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Standard normal survival function `1 - Φ(z)`, accurate in the upper tail.
pub fn normal_sf(z: f64) -> f64 {
    normal_cdf(-z)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

// Acklam's inverse-normal rational approximation, relative error ~1.2e-9.
const ACKLAM_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_690e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239e0,
];
const ACKLAM_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACKLAM_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838e0,
    -2.549_732_539_343_734e0,
    4.374_664_141_464_968e0,
    2.938_163_982_698_783e0,
];
const ACKLAM_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996e0,
    3.754_408_661_907_416e0,
];
const ACKLAM_P_LOW: f64 = 0.024_25;

fn acklam(p: f64) -> f64 {
    if p < ACKLAM_P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        polevl(q, &ACKLAM_C) / (polevl(q, &ACKLAM_D) * q + 1.0)
    } else if p <= 1.0 - ACKLAM_P_LOW {
        let q = p - 0.5;
        let r = q * q;
        polevl(r, &ACKLAM_A) * q / (polevl(r, &ACKLAM_B) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -polevl(q, &ACKLAM_C) / (polevl(q, &ACKLAM_D) * q + 1.0)
    }
}

/// Inverse of the standard normal CDF.
///
/// Acklam's approximation refined by Halley steps. The lower half is solved
/// directly and the upper half by symmetry, so both tails keep full relative
/// accuracy in `min(p, 1 - p)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("normal_quantile requires 0 < p < 1"));
    }
    if p > 0.5 {
        // 1 - p is exact for p in (0.5, 1).
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut x = acklam(p);
    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 40-digit mpmath evaluation.
    const PHI_TABLE: [(f64, f64); 9] = [
        (-8.0, 6.220_960_574_271_784_1e-16),
        (-5.0, 2.866_515_718_791_939_1e-7),
        (-3.0, 1.349_898_031_630_094_5e-3),
        (-1.0, 0.158_655_253_931_457_05),
        (0.5, 0.691_462_461_274_013_1),
        (2.0, 0.977_249_868_051_820_8),
        (3.5, 0.999_767_370_920_964_97),
        (7.0, 0.999_999_999_998_720_2),
        (1.644_853_626_951_472_2, 0.949_999_999_999_999_95),
    ];

    #[test]
    fn cdf_matches_reference_table() {
        for (z, want) in PHI_TABLE {
            let got = normal_cdf(z);
            assert!((got - want).abs() <= 1e-15, "Φ({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn lower_tail_keeps_relative_accuracy() {
        let got = normal_cdf(-8.0);
        assert!((got / 6.220_960_574_271_784_1e-16 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(normal_cdf(0.0), 0.5);
    }

    #[test]
    fn quantile_reference_values() {
        let cases = [
            (0.95, 1.644_853_626_951_472_2),
            (0.999, 3.090_232_306_167_813_5),
            (1e-9, -5.997_807_015_007_686_9),
            (0.3, -0.524_400_512_708_040_8),
        ];
        for (p, want) in cases {
            let got = normal_quantile(p).unwrap();
            assert!((got - want).abs() < 1e-13, "Φ⁻¹({p}) = {got}, want {want}");
        }
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(p).is_err());
        }
    }

    #[test]
    fn quantile_residual_small_over_range() {
        for k in 0..=90 {
            let lower = 1e-9 * 10f64.powf(k as f64 / 10.0);
            let lower = lower.min(0.5);
            for p in [lower, 1.0 - lower] {
                let q = normal_quantile(p).unwrap();
                assert!((normal_cdf(q) - p).abs() <= 1e-10, "p={p}");
            }
        }
    }
}
