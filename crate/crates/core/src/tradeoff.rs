//! Trade-off functions `T(P, Q)(alpha) = inf { beta : type-I error <= alpha }`.
//!
//! Empirical curves are step functions over the operating points of threshold
//! rules `reject when score > tau`; no interpolation between points.

use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, normal_quantile};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Empirical,
    /// Standardized Gaussian pair with in-mean `delta` and in-sd `ratio`.
    AnalyticGaussian {
        delta: f64,
        ratio: f64,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Empirical => f.write_str("empirical"),
            Provenance::AnalyticGaussian { delta, ratio } => {
                write!(f, "gaussian(delta={delta};ratio={ratio})")
            }
        }
    }
}

/// `(alpha, beta)` points, alpha strictly increasing, beta nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    points: Vec<(f64, f64)>,
    provenance: Provenance,
}

impl TradeoffCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Right-continuous step evaluation: the smallest beta among points with
    /// `alpha_point <= alpha`, or `1` when none qualifies.
    pub fn beta_at(&self, alpha: f64) -> f64 {
        let idx = self.points.partition_point(|&(a, _)| a <= alpha);
        if idx == 0 {
            1.0
        } else {
            self.points[idx - 1].1
        }
    }

    /// Largest `|beta_self - beta_other|` over the union of both curves'
    /// alpha breakpoints.
    pub fn max_discrepancy(&self, other: &TradeoffCurve) -> f64 {
        self.points
            .iter()
            .chain(&other.points)
            .map(|&(a, _)| (self.beta_at(a) - other.beta_at(a)).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest `beta_other - beta_self` over the union of breakpoints;
    /// non-negative when `other` lies on or above `self` everywhere.
    pub fn min_margin_to(&self, other: &TradeoffCurve) -> f64 {
        self.points
            .iter()
            .chain(&other.points)
            .map(|&(a, _)| other.beta_at(a) - self.beta_at(a))
            .fold(f64::INFINITY, f64::min)
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

fn check_scores(out_scores: &[f64], in_scores: &[f64]) -> Result<()> {
    if out_scores.is_empty() || in_scores.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            available: 0,
        });
    }
    if out_scores.iter().chain(in_scores).any(|v| v.is_nan()) {
        return Err(Error::invalid("scores must not be NaN"));
    }
    Ok(())
}

/// Empirical trade-off curve of threshold rules: `alpha = P_out(s > tau)`,
/// `beta = P_in(s <= tau)`, over every distinct observed `tau` plus `-inf`.
pub fn empirical_tradeoff(out_scores: &[f64], in_scores: &[f64]) -> Result<TradeoffCurve> {
    check_scores(out_scores, in_scores)?;
    let out = sorted(out_scores);
    let ins = sorted(in_scores);
    let (n_out, n_in) = (out.len() as f64, ins.len() as f64);
    let mut taus: Vec<f64> = out.iter().chain(&ins).copied().collect();
    taus.sort_unstable_by(f64::total_cmp);
    taus.dedup();

    // Walk thresholds from the top down: alpha grows, beta shrinks.
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(taus.len() + 1);
    let mut push = |alpha: f64, beta: f64| match points.last_mut() {
        Some(last) if last.0 == alpha => last.1 = last.1.min(beta),
        _ => points.push((alpha, beta)),
    };
    for &tau in taus.iter().rev() {
        let fp = out.len() - out.partition_point(|&v| v <= tau);
        let fn_ = ins.partition_point(|&v| v <= tau);
        push(fp as f64 / n_out, fn_ as f64 / n_in);
    }
    push(1.0, 0.0);
    Ok(TradeoffCurve {
        points,
        provenance: Provenance::Empirical,
    })
}

/// `Φ(Φ⁻¹(1 - alpha) - delta)`: type-II error of the best level-`alpha` test
/// between `N(0, 1)` and `N(delta, 1)`.
pub fn gaussian_tradeoff(mu_gap_over_sigma: f64, alpha: f64) -> Result<f64> {
    if !(mu_gap_over_sigma >= 0.0 && mu_gap_over_sigma.is_finite()) {
        return Err(Error::invalid("standardized gap must be finite and >= 0"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    Ok(normal_cdf(
        normal_quantile(1.0 - alpha)? - mu_gap_over_sigma,
    ))
}

/// Analytic curve of the one-sided standardized test against
/// `N(delta, ratio^2)` on a grid of alphas (strictly increasing, in (0, 1)).
/// `ratio = 1` is the equal-variance trade-off function.
pub fn gaussian_curve(delta: f64, ratio: f64, alphas: &[f64]) -> Result<TradeoffCurve> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::invalid("variance ratio must be finite and > 0"));
    }
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("alpha grid must be strictly increasing"));
    }
    let points = alphas
        .iter()
        .map(|&a| {
            // validates delta and alpha
            let equal_variance = gaussian_tradeoff(delta, a)?;
            let beta = if ratio == 1.0 {
                equal_variance
            } else {
                normal_cdf((normal_quantile(1.0 - a)? - delta) / ratio)
            };
            Ok((a, beta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TradeoffCurve {
        points,
        provenance: Provenance::AnalyticGaussian { delta, ratio },
    })
}

/// Direction of a transform on the observed scores.
fn monotone_direction(scores: &[f64], transform: &dyn Fn(f64) -> f64) -> Result<f64> {
    let mut xs = sorted(scores);
    xs.dedup();
    let ys: Vec<f64> = xs.iter().map(|&x| transform(x)).collect();
    if ys.iter().any(|y| y.is_nan()) {
        return Err(Error::NonMonotone);
    }
    if ys.len() < 2 || ys.windows(2).all(|w| w[0] < w[1]) {
        Ok(1.0)
    } else if ys.windows(2).all(|w| w[0] > w[1]) {
        Ok(-1.0)
    } else {
        Err(Error::NonMonotone)
    }
}

/// Max pointwise gap between the empirical curves of the original and the
/// transformed scores. The transform must be strictly monotone on the
/// observed scores (checked on every observed value); a decreasing transform
/// is composed with negation first. The result is exactly `0.0` for any
/// such transform.
pub fn check_postprocessing_invariance(
    out_scores: &[f64],
    in_scores: &[f64],
    transform: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    check_scores(out_scores, in_scores)?;
    let all: Vec<f64> = out_scores.iter().chain(in_scores).copied().collect();
    let sign = monotone_direction(&all, transform)?;
    let apply = |v: &[f64]| v.iter().map(|&s| sign * transform(s)).collect::<Vec<_>>();
    let original = empirical_tradeoff(out_scores, in_scores)?;
    let mapped = empirical_tradeoff(&apply(out_scores), &apply(in_scores))?;
    Ok(original.max_discrepancy(&mapped))
}

/// Largest number of distinct score values accepted by [`deterministic_tradeoff`].
pub const MAX_EXACT_ATOMS: usize = 20;

/// Exact trade-off curve over *all* deterministic rejection sets of the two
/// empirical distributions, by enumerating subsets of the distinct values.
/// Exponential; restricted to `MAX_EXACT_ATOMS` distinct values.
pub fn deterministic_tradeoff(out_scores: &[f64], in_scores: &[f64]) -> Result<TradeoffCurve> {
    check_scores(out_scores, in_scores)?;
    let mut atoms: Vec<f64> = out_scores.iter().chain(in_scores).copied().collect();
    atoms.sort_unstable_by(f64::total_cmp);
    atoms.dedup();
    if atoms.len() > MAX_EXACT_ATOMS {
        return Err(Error::invalid(
            "too many distinct scores for exhaustive enumeration",
        ));
    }
    let weight = |values: &[f64], atom: f64| values.iter().filter(|&&v| v == atom).count();
    let w_out: Vec<usize> = atoms.iter().map(|&a| weight(out_scores, a)).collect();
    let w_in: Vec<usize> = atoms.iter().map(|&a| weight(in_scores, a)).collect();
    let (n_out, n_in) = (out_scores.len(), in_scores.len());

    // best[k] = max in-mass rejected using exactly k out-observations
    let mut best = alloc::vec![None::<usize>; n_out + 1];
    for set in 0u32..(1u32 << atoms.len()) {
        let (mut fp, mut tp) = (0, 0);
        for i in 0..atoms.len() {
            if set >> i & 1 == 1 {
                fp += w_out[i];
                tp += w_in[i];
            }
        }
        let slot = &mut best[fp];
        *slot = Some(slot.map_or(tp, |b| b.max(tp)));
    }
    let mut points = Vec::new();
    let mut running = None::<usize>;
    for (fp, tp) in best.into_iter().enumerate() {
        let Some(tp) = tp else { continue };
        if running.is_some_and(|r| r >= tp) {
            continue;
        }
        running = Some(tp);
        points.push((fp as f64 / n_out as f64, (n_in - tp) as f64 / n_in as f64));
    }
    Ok(TradeoffCurve {
        points,
        provenance: Provenance::Empirical,
    })
}

/// For an arbitrary (possibly many-to-one) transform: the smallest
/// `T_transformed(alpha) - T_original(alpha)` over all breakpoints, using the
/// exact deterministic curves. Post-processing can't help the tester, so
/// this is never negative.
pub fn processing_inequality_margin(
    out_scores: &[f64],
    in_scores: &[f64],
    transform: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    let original = deterministic_tradeoff(out_scores, in_scores)?;
    let apply = |v: &[f64]| v.iter().map(|&s| transform(s)).collect::<Vec<_>>();
    let mapped = deterministic_tradeoff(&apply(out_scores), &apply(in_scores))?;
    Ok(original.min_margin_to(&mapped))
}
