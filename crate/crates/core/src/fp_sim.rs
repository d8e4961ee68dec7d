//! Mean-model simulation of shadow-model LiRA scores on a finite Gaussian pool.
//!
//! A pool `D_full` of `n_full` points is drawn once from `N(0, sigma^2 I_d)`.
//! Model `m` is the mean of a training subset `D_m` of `n_train` pool points,
//! and the score of point `x_i` against model `m` is `<x_i, mean(D_m)>`. All
//! models share the one pool, so the across-model spread of each score is
//! smaller than under independent training sets by about `sqrt(1 - N/N+)`.
//!
//! Draw order (part of the grid metadata): `ChaCha8Rng::seed_from_u64(seed)`;
//! stream 0 fills the pool row-major with `StandardNormal * sigma`; model `m`
//! uses stream `m + 1` for a partial Fisher-Yates shuffle of the pool indices
//! (or `n_train` uniform index draws with replacement). Rows are generated
//! independently, so parallel generation gives identical grids.

use crate::error::{Error, Result};
use crate::grid::MiaGrid;
use crate::shadow_stats::{apply_fpc, PerSampleStats, ShadowEstimator, VarianceModel};
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const RNG_DESCRIPTION: &str =
    "chacha8/seed_from_u64; stream 0: pool row-major StandardNormal*sigma; \
stream m+1: model m partial Fisher-Yates (or uniform draws with replacement)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Pool size `N+`.
    pub n_full: usize,
    /// Training-set size `N` per model.
    pub n_train: usize,
    pub dim: usize,
    /// Per-coordinate standard deviation of the pool distribution.
    pub sigma: f64,
    pub n_models: usize,
    pub seed: u64,
    /// Draw training sets with replacement (iid baseline, no finite
    /// population effect).
    pub with_replacement: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_models < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 models, got {}",
                self.n_models
            )));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dim must be >= 1"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma must be finite and >= 0"));
        }
        if self.n_train == 0 {
            return Err(Error::invalid("n_train must be >= 1"));
        }
        if !self.with_replacement && self.n_train >= self.n_full {
            return Err(Error::invalid(format!(
                "n_train ({}) must be smaller than n_full ({})",
                self.n_train, self.n_full
            )));
        }
        Ok(())
    }

    pub fn sampling_ratio(&self) -> f64 {
        self.n_train as f64 / self.n_full as f64
    }

    /// `1 - N/N+` without replacement; `1` for the iid baseline.
    pub fn fpc(&self) -> f64 {
        if self.with_replacement {
            1.0
        } else {
            1.0 - self.sampling_ratio()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
}

/// Across-model standard deviation of `<x, mean(D)>` for fixed `x` when the
/// other training points are iid `N(0, sigma^2 I)`.
///
/// Out: `sigma ||x|| / sqrt(N)`. In: `x` itself only shifts the mean by
/// `||x||^2 / N`, leaving `N - 1` iid terms: `sigma ||x|| sqrt(N - 1) / N`.
pub fn analytic_sigma(
    norm_x: f64,
    n_train: usize,
    sigma: f64,
    membership: Membership,
) -> Result<f64> {
    if !(norm_x >= 0.0 && norm_x.is_finite()) {
        return Err(Error::invalid("norm must be finite and >= 0"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma must be finite and > 0"));
    }
    let n = n_train as f64;
    match membership {
        Membership::Out if n_train >= 1 => Ok(sigma * norm_x / n.sqrt()),
        Membership::In if n_train >= 2 => Ok(sigma * norm_x * (n - 1.0).sqrt() / n),
        _ => Err(Error::invalid("n_train too small for this membership side")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSample {
    pub norm_x: f64,
    pub sigma_emp_in: f64,
    pub sigma_emp_out: f64,
    pub sigma_ana_in: f64,
    pub sigma_ana_out: f64,
    pub ratio_in: f64,
    pub ratio_out: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    /// `1 - N/N+` (or `1` with replacement).
    pub fpc: f64,
    pub fpc_corrected: bool,
    pub samples: Vec<SimSample>,
    stats: PerSampleStats,
}

impl SimResult {
    /// Pairs empirical column stats with the analytic sigmas of each pool point.
    pub fn from_stats(config: SimConfig, norms: &[f64], stats: &PerSampleStats) -> Result<Self> {
        if norms.len() != stats.len() {
            return Err(Error::Shape(format!(
                "{} norms for {} columns",
                norms.len(),
                stats.len()
            )));
        }
        let analytic = |norm: f64, side| {
            if config.sigma > 0.0 {
                analytic_sigma(norm, config.n_train, config.sigma, side).unwrap_or(f64::NAN)
            } else {
                0.0
            }
        };
        let ratio = |emp: f64, ana: f64| if ana > 0.0 { emp / ana } else { f64::NAN };
        let samples = norms
            .iter()
            .zip(&stats.columns)
            .map(|(&norm_x, c)| {
                let sigma_ana_in = analytic(norm_x, Membership::In);
                let sigma_ana_out = analytic(norm_x, Membership::Out);
                SimSample {
                    norm_x,
                    sigma_emp_in: c.sigma_in,
                    sigma_emp_out: c.sigma_out,
                    sigma_ana_in,
                    sigma_ana_out,
                    ratio_in: ratio(c.sigma_in, sigma_ana_in),
                    ratio_out: ratio(c.sigma_out, sigma_ana_out),
                }
            })
            .collect();
        Ok(Self {
            config,
            fpc: config.fpc(),
            fpc_corrected: stats.fpc_applied(),
            samples,
            stats: stats.clone(),
        })
    }

    /// Empirical per-sample stats the result was built from.
    pub fn stats(&self) -> &PerSampleStats {
        &self.stats
    }

    /// Same comparison after inflating the empirical sigmas with the finite
    /// population correction for `n_train / n_full`.
    pub fn corrected(&self) -> Result<Self> {
        let norms: Vec<f64> = self.samples.iter().map(|s| s.norm_x).collect();
        let stats = apply_fpc(&self.stats, self.config.n_train, self.config.n_full)?;
        Self::from_stats(self.config, &norms, &stats)
    }
}

fn draw_pool(config: &SimConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(0);
    (0..config.n_full * config.dim)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z * config.sigma
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn model_row(config: &SimConfig, pool: &[f64], model: usize) -> (Vec<f64>, Vec<bool>) {
    let (n_full, dim) = (config.n_full, config.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(model as u64 + 1);
    let mut mask = vec![false; n_full];
    let mut sum = vec![0.0f64; dim];
    let add = |i: usize, sum: &mut [f64]| {
        for (s, &v) in sum.iter_mut().zip(&pool[i * dim..(i + 1) * dim]) {
            *s += v;
        }
    };
    if config.with_replacement {
        for _ in 0..config.n_train {
            let i = rng.random_range(0..n_full);
            mask[i] = true;
            add(i, &mut sum);
        }
    } else {
        let mut idx: Vec<usize> = (0..n_full).collect();
        for k in 0..config.n_train {
            let j = rng.random_range(k..n_full);
            idx.swap(k, j);
        }
        for &i in &idx[..config.n_train] {
            mask[i] = true;
            add(i, &mut sum);
        }
    }
    let inv = 1.0 / config.n_train as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s * inv).collect();
    let scores = (0..n_full)
        .map(|i| dot(&pool[i * dim..(i + 1) * dim], &mean))
        .collect();
    (scores, mask)
}

#[cfg(feature = "std")]
fn all_rows(config: &SimConfig, pool: &[f64]) -> Vec<(Vec<f64>, Vec<bool>)> {
    use rayon::prelude::*;
    (0..config.n_models)
        .into_par_iter()
        .map(|m| model_row(config, pool, m))
        .collect()
}

#[cfg(not(feature = "std"))]
fn all_rows(config: &SimConfig, pool: &[f64]) -> Vec<(Vec<f64>, Vec<bool>)> {
    (0..config.n_models)
        .map(|m| model_row(config, pool, m))
        .collect()
}

/// Runs the simulation: an `n_models x n_full` grid plus the per-sample
/// empirical-vs-analytic sigma comparison.
pub fn simulate(config: &SimConfig) -> Result<(MiaGrid, SimResult)> {
    config.validate()?;
    let pool = draw_pool(config);
    let norms: Vec<f64> = pool
        .chunks_exact(config.dim)
        .map(|x| dot(x, x).sqrt())
        .collect();
    let rows = all_rows(config, &pool);
    let mut scores = Vec::with_capacity(config.n_models * config.n_full);
    let mut mask = Vec::with_capacity(config.n_models * config.n_full);
    for (s, k) in rows {
        scores.extend(s);
        mask.extend(k);
    }
    let grid = MiaGrid::new(config.n_models, config.n_full, scores, mask)?
        .with_meta("source", "fp_sim")
        .with_meta("rng", RNG_DESCRIPTION)
        .with_meta("seed", config.seed.to_string())
        .with_meta("n_full", config.n_full.to_string())
        .with_meta("n_train", config.n_train.to_string())
        .with_meta("dim", config.dim.to_string())
        .with_meta("sigma", format!("{:?}", config.sigma))
        .with_meta("n_models", config.n_models.to_string())
        .with_meta("with_replacement", config.with_replacement.to_string());
    let stats = ShadowEstimator::new(&grid, VarianceModel::PerDistribution).pooled();
    let result = SimResult::from_stats(*config, &norms, &stats)?;
    Ok((grid, result))
}

pub const HISTOGRAM_BINS: usize = 50;
pub const HISTOGRAM_MAX: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub mean_ratio_in: f64,
    pub mean_ratio_out: f64,
    /// Samples with a finite ratio on each side.
    pub n_in: usize,
    pub n_out: usize,
    /// `HISTOGRAM_BINS + 1` edges over `[0, HISTOGRAM_MAX]`.
    pub bin_edges: Vec<f64>,
    pub hist_in: Vec<usize>,
    pub hist_out: Vec<usize>,
    /// Ratios at or above `HISTOGRAM_MAX`.
    pub overflow_in: usize,
    pub overflow_out: usize,
}

fn histogram(values: impl Iterator<Item = f64>) -> (Vec<usize>, usize) {
    let mut bins = vec![0usize; HISTOGRAM_BINS];
    let mut overflow = 0;
    let width = HISTOGRAM_MAX / HISTOGRAM_BINS as f64;
    for v in values {
        if v >= HISTOGRAM_MAX {
            overflow += 1;
        } else {
            bins[((v / width) as usize).min(HISTOGRAM_BINS - 1)] += 1;
        }
    }
    (bins, overflow)
}

/// Mean `sigma_emp / sigma_ana` per side plus plot-ready histograms.
pub fn ratio_summary(result: &SimResult) -> Result<RatioSummary> {
    let finite = |f: fn(&SimSample) -> f64| {
        result
            .samples
            .iter()
            .map(f)
            .filter(|r| r.is_finite())
            .collect::<Vec<_>>()
    };
    let ins = finite(|s| s.ratio_in);
    let outs = finite(|s| s.ratio_out);
    if ins.is_empty() || outs.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            available: 0,
        });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (hist_in, overflow_in) = histogram(ins.iter().copied());
    let (hist_out, overflow_out) = histogram(outs.iter().copied());
    Ok(RatioSummary {
        mean_ratio_in: mean(&ins),
        mean_ratio_out: mean(&outs),
        n_in: ins.len(),
        n_out: outs.len(),
        bin_edges: (0..=HISTOGRAM_BINS)
            .map(|i| HISTOGRAM_MAX * i as f64 / HISTOGRAM_BINS as f64)
            .collect(),
        hist_in,
        hist_out,
        overflow_in,
        overflow_out,
    })
}

/// One point of a subsampling-ratio sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub sampling_ratio: f64,
    pub n_train: usize,
    pub fpc: f64,
    pub mean_ratio_in: f64,
    pub mean_ratio_out: f64,
    pub corrected_mean_ratio_in: f64,
    pub corrected_mean_ratio_out: f64,
}

/// Repeats the simulation of `base` at each `N/N+` in `ratios`, with
/// `n_train = round(ratio * n_full)`.
pub fn fpc_sweep(base: &SimConfig, ratios: &[f64]) -> Result<Vec<SweepPoint>> {
    ratios
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::invalid(format!("sampling ratio {r} outside (0, 1)")));
            }
            let config = SimConfig {
                n_train: (r * base.n_full as f64).round() as usize,
                with_replacement: false,
                ..*base
            };
            let (_, result) = simulate(&config)?;
            let raw = ratio_summary(&result)?;
            let fixed = ratio_summary(&result.corrected()?)?;
            Ok(SweepPoint {
                sampling_ratio: config.sampling_ratio(),
                n_train: config.n_train,
                fpc: config.fpc(),
                mean_ratio_in: raw.mean_ratio_in,
                mean_ratio_out: raw.mean_ratio_out,
                corrected_mean_ratio_in: fixed.mean_ratio_in,
                corrected_mean_ratio_out: fixed.mean_ratio_out,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SimConfig {
        SimConfig {
            n_full: 12,
            n_train: 5,
            dim: 3,
            sigma: 1.0,
            n_models: 8,
            seed: 3,
            with_replacement: false,
        }
    }

    #[test]
    fn analytic_sigma_cases() {
        assert_eq!(analytic_sigma(0.0, 10, 1.0, Membership::In).unwrap(), 0.0);
        assert_eq!(analytic_sigma(0.0, 10, 1.0, Membership::Out).unwrap(), 0.0);
        assert_eq!(analytic_sigma(3.0, 1, 2.0, Membership::Out).unwrap(), 6.0);
        let v = analytic_sigma(2.0, 5, 1.5, Membership::In).unwrap();
        assert!((v - 1.5 * 2.0 * 2.0 / 5.0).abs() < 1e-15);
        assert!(analytic_sigma(1.0, 1, 1.0, Membership::In).is_err());
        assert!(analytic_sigma(-1.0, 4, 1.0, Membership::Out).is_err());
        assert!(analytic_sigma(1.0, 4, 0.0, Membership::Out).is_err());
    }

    #[test]
    fn zero_population_gives_zero_scores() {
        let cfg = SimConfig {
            dim: 1,
            sigma: 0.0,
            ..config()
        };
        let (grid, result) = simulate(&cfg).unwrap();
        assert!(grid.scores().iter().all(|&s| s == 0.0));
        assert!(result.samples.iter().all(|s| s.ratio_out.is_nan()));
    }

    #[test]
    fn near_full_training_sets() {
        let cfg = SimConfig {
            n_train: 11,
            ..config()
        };
        let (grid, _) = simulate(&cfg).unwrap();
        for m in 0..grid.n_models() {
            assert_eq!(grid.mask_row(m).iter().filter(|&&k| !k).count(), 1);
        }
    }

    #[test]
    fn mask_rows_hold_n_train_members_and_scores_are_inner_products() {
        let cfg = config();
        let (grid, _) = simulate(&cfg).unwrap();
        let pool = draw_pool(&cfg);
        for m in 0..grid.n_models() {
            let members: Vec<usize> = (0..cfg.n_full).filter(|&i| grid.is_member(m, i)).collect();
            assert_eq!(members.len(), cfg.n_train);
            let mut mean = vec![0.0; cfg.dim];
            for &j in &members {
                for d in 0..cfg.dim {
                    mean[d] += pool[j * cfg.dim + d] / cfg.n_train as f64;
                }
            }
            for i in 0..cfg.n_full {
                let want: f64 = (0..cfg.dim).map(|d| pool[i * cfg.dim + d] * mean[d]).sum();
                assert!((grid.score(m, i) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (a, _) = simulate(&config()).unwrap();
        let (b, _) = simulate(&config()).unwrap();
        assert_eq!(a, b);
        let (c, _) = simulate(&SimConfig {
            seed: 4,
            ..config()
        })
        .unwrap();
        assert_ne!(a.scores(), c.scores());
    }

    #[test]
    fn invalid_configs() {
        for bad in [
            SimConfig {
                n_models: 1,
                ..config()
            },
            SimConfig {
                n_train: 12,
                ..config()
            },
            SimConfig {
                n_train: 0,
                ..config()
            },
            SimConfig { dim: 0, ..config() },
            SimConfig {
                sigma: -1.0,
                ..config()
            },
        ] {
            assert!(simulate(&bad).is_err(), "{bad:?}");
        }
        let ok = SimConfig {
            n_train: 20,
            with_replacement: true,
            ..config()
        };
        assert!(simulate(&ok).is_ok());
    }

    #[test]
    fn histogram_bins() {
        let (bins, overflow) = histogram([0.0, 0.01, 0.75, 1.49, 1.5, 3.0].into_iter());
        assert_eq!(overflow, 2);
        assert_eq!(bins[0], 2);
        assert_eq!(bins[25], 1);
        assert_eq!(bins[49], 1);
    }
}
