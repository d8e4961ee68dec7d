use super::normal::{normal_quantile, normal_sf};
use super::special::{inc_beta, ln_beta};
use crate::error::{Error, Result};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Above this many degrees of freedom the t distribution is evaluated through
/// its normal asymptotics; the continued fraction would need `O(√ν)` terms.
const ASYMPTOTIC_DF: f64 = 1e7;

/// Bounds of the degrees-of-freedom search in [`fit_student_t_df`].
pub const MIN_DF: f64 = 2.001;
pub const MAX_DF: f64 = 1e6;

fn check_df(df: f64) -> Result<()> {
    if df > 0.0 && df.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "degrees of freedom must be positive and finite",
        ))
    }
}

/// Upper tail `P(T > t)` for `t >= 0`.
fn upper_tail(t: f64, df: f64) -> f64 {
    if df > ASYMPTOTIC_DF {
        let z = t * (1.0 - 0.25 / df) / (1.0 + t * t / (2.0 * df)).sqrt();
        return normal_sf(z);
    }
    let t2 = t * t;
    let denom = df + t2;
    0.5 * inc_beta(0.5 * df, 0.5, df / denom, t2 / denom)
}

fn density(t: f64, df: f64) -> f64 {
    (-ln_beta(0.5 * df, 0.5) - 0.5 * df.ln() - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp()
}

/// Survival function of Student's t.
pub fn student_t_sf(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(Error::invalid("t must not be NaN"));
    }
    Ok(if t >= 0.0 {
        upper_tail(t, df)
    } else {
        1.0 - upper_tail(-t, df)
    })
}

/// CDF of Student's t, via the regularized incomplete beta function.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64> {
    student_t_sf(-t, df)
}

/// Cornish-Fisher expansion of the t quantile around the normal quantile `z`.
fn cornish_fisher(z: f64, df: f64) -> f64 {
    let z2 = z * z;
    let g1 = (z2 + 1.0) * z / 4.0;
    let g2 = ((5.0 * z2 + 16.0) * z2 + 3.0) * z / 96.0;
    let g3 = (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) * z / 384.0;
    let g4 = ((((79.0 * z2 + 776.0) * z2 + 1482.0) * z2 - 1920.0) * z2 - 945.0) * z / 92160.0;
    z + g1 / df + g2 / (df * df) + g3 / (df * df * df) + g4 / (df * df * df * df)
}

/// Solves `P(T > t) = tail` for `t > 0`, `0 < tail < 1/2`.
fn upper_quantile(tail: f64, df: f64) -> f64 {
    let z = -normal_quantile(tail).unwrap_or(0.0);
    let guess = cornish_fisher(z, df);
    if df > ASYMPTOTIC_DF {
        return guess;
    }
    let mut lo = 0.0;
    let mut hi = guess.max(1.0);
    while upper_tail(hi, df) > tail && hi < 1e300 {
        lo = hi;
        hi *= 2.0;
    }
    let mut t = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..400 {
        let f = upper_tail(t, df) - tail;
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t + f / density(t, df);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs() {
            t = next;
            break;
        }
        t = next;
    }
    t
}

/// Quantile of Student's t with `df` degrees of freedom (need not be integral).
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("student_t_quantile requires 0 < p < 1"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        Ok(upper_quantile(1.0 - p, df))
    } else {
        Ok(-upper_quantile(p, df))
    }
}

/// Location-0 Student-t fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentTFit {
    pub df: f64,
    pub scale: f64,
    /// `false` when the optimizer failed and the near-normal fallback
    /// (`df = MAX_DF`, `scale` = sample standard deviation) was returned.
    pub converged: bool,
}

struct Profile {
    scale_sq: f64,
    loglik: f64,
    converged: bool,
}

/// Maximizes the mean log-likelihood over the scale for fixed `df` using the
/// EM fixed point `s² ← mean(w x²)`, `w = (ν+1) / (ν + x²/s²)`.
fn profile_scale(samples: &[f64], df: f64, start: f64) -> Profile {
    let n = samples.len() as f64;
    let mut s2 = start;
    let mut converged = false;
    for _ in 0..2000 {
        let next = samples
            .iter()
            .map(|&x| {
                let x2 = x * x;
                (df + 1.0) * x2 / (df + x2 / s2)
            })
            .sum::<f64>()
            / n;
        let done = (next / s2 - 1.0).abs() < 1e-12;
        s2 = next;
        if done {
            converged = true;
            break;
        }
    }
    let tail = samples
        .iter()
        .map(|&x| (x * x / (df * s2)).ln_1p())
        .sum::<f64>()
        / n;
    let loglik = -ln_beta(0.5 * df, 0.5) - 0.5 * df.ln() - 0.5 * s2.ln() - 0.5 * (df + 1.0) * tail;
    Profile {
        scale_sq: s2,
        loglik,
        converged: converged && loglik.is_finite(),
    }
}

/// Fits `(df, scale)` of a location-0 Student-t by maximum likelihood.
///
/// Golden-section search over `ln df` in `[MIN_DF, MAX_DF]` with the scale
/// profiled out at every step.
pub fn fit_student_t_df(samples: &[f64]) -> Result<StudentTFit> {
    if samples.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            available: samples.len(),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let mean_sq = samples.iter().map(|x| x * x).sum::<f64>() / n;
    if var <= 0.0 || mean_sq <= 0.0 {
        return Err(Error::Degenerate("all samples are equal".into()));
    }
    let fallback = StudentTFit {
        df: MAX_DF,
        scale: var.sqrt(),
        converged: false,
    };

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut lo = MIN_DF.ln();
    let mut hi = MAX_DF.ln();
    let mut warm = mean_sq;
    let eval = |u: f64, warm: &mut f64| {
        let p = profile_scale(samples, u.exp(), *warm);
        if p.converged {
            *warm = p.scale_sq;
        }
        p
    };
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = eval(a, &mut warm);
    let mut fb = eval(b, &mut warm);
    while hi - lo > 1e-7 {
        if !(fa.converged && fb.converged) {
            return Ok(fallback);
        }
        if fa.loglik >= fb.loglik {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = eval(a, &mut warm);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = eval(b, &mut warm);
        }
    }
    let u = 0.5 * (lo + hi);
    let best = eval(u, &mut warm);
    if !best.converged {
        return Ok(fallback);
    }
    Ok(StudentTFit {
        df: u.exp().clamp(MIN_DF, MAX_DF),
        scale: best.scale_sq.sqrt(),
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn median_is_zero() {
        for df in [0.5, 1.0, 3.0, 1e3] {
            assert_eq!(student_t_quantile(0.5, df).unwrap(), 0.0);
        }
    }

    #[test]
    fn cauchy_closed_form() {
        let want = (PI * (0.95 - 0.5)).tan();
        let got = student_t_quantile(0.95, 1.0).unwrap();
        assert!((got - 6.313_751_514_675).abs() < 1e-8);
        assert!((got - want).abs() < 1e-8);
    }

    #[test]
    fn reference_quantiles() {
        // mpmath root of the regularized incomplete beta
        let cases = [
            (0.95, 2.0, 2.919_985_580_353_724),
            (0.99, 5.0, 3.364_929_998_907_218),
            (0.999, 3.5, 8.315_567_604_516_115),
            (0.9, 30.0, 1.310_415_025_391_395_7),
            (0.01, 5.0, -3.364_929_998_907_218),
        ];
        for (p, df, want) in cases {
            let got = student_t_quantile(p, df).unwrap();
            assert!(
                (got - want).abs() < 1e-9 * want.abs(),
                "q({p}, {df}) = {got}"
            );
        }
    }

    #[test]
    fn cdf_residual_after_inversion() {
        for df in [0.7, 1.0, 2.5, 7.0, 60.0, 1e4, 1e6] {
            for p in [1e-6, 0.001, 0.05, 0.3, 0.7, 0.95, 0.999, 1.0 - 1e-6] {
                let t = student_t_quantile(p, df).unwrap();
                let back = student_t_cdf(t, df).unwrap();
                assert!((back - p).abs() <= 1e-8, "df={df} p={p} t={t} back={back}");
            }
        }
    }

    #[test]
    fn large_df_approaches_normal() {
        let z = normal_quantile(0.95).unwrap();
        assert!((student_t_quantile(0.95, 1e9).unwrap() - 1.64485).abs() < 1e-4);
        assert!((student_t_quantile(0.95, 1e6).unwrap() - z).abs() < 1e-4);
        assert!((student_t_cdf(z, 1e8).unwrap() - 0.95).abs() < 1e-8);
    }

    #[test]
    fn invalid_arguments() {
        assert!(student_t_quantile(0.0, 3.0).is_err());
        assert!(student_t_quantile(0.5, 0.0).is_err());
        assert!(student_t_quantile(0.5, f64::INFINITY).is_err());
        assert!(student_t_cdf(f64::NAN, 3.0).is_err());
    }

    #[test]
    fn fit_needs_ten_samples() {
        let err = fit_student_t_df(&[1.0; 9]).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { needed: 10, .. }));
    }

    #[test]
    fn fit_rejects_constant_samples() {
        assert!(matches!(
            fit_student_t_df(&[0.0; 20]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            fit_student_t_df(&[2.5; 20]),
            Err(Error::Degenerate(_))
        ));
    }
}
