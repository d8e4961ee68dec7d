//! Synthetic score grids with known per-sample Gaussian in/out distributions.
//!
//! Each column gets exactly `floor(M/2)` member rows chosen by a seeded
//! partial Fisher-Yates shuffle; a score is drawn from the column's in or out
//! Gaussian. Column `x` uses `ChaCha8Rng::seed_from_u64(seed)` stream `x + 1`
//! (stream 0 is reserved for parameter draws), so columns are independent of
//! the total column count.

use crate::error::{Error, Result};
use crate::grid::MiaGrid;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnParams {
    pub mu_in: f64,
    pub sigma_in: f64,
    pub mu_out: f64,
    pub sigma_out: f64,
}

impl ColumnParams {
    /// Equal-variance column with standardized gap `delta`.
    pub fn equal_variance(delta: f64, sigma: f64) -> Self {
        Self {
            mu_in: delta * sigma,
            sigma_in: sigma,
            mu_out: 0.0,
            sigma_out: sigma,
        }
    }

    /// Column whose scores are exact Gaussian log-likelihood ratios: the LLR
    /// of `N(d, 1)` against `N(0, 1)` is `N(-d^2/2, d^2)` under out and
    /// `N(d^2/2, d^2)` under in, so `sigma` doubles as the separation `d`.
    pub fn gaussian_llr(sigma: f64) -> Self {
        let half = 0.5 * sigma * sigma;
        Self {
            mu_in: half,
            sigma_in: sigma,
            mu_out: -half,
            sigma_out: sigma,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.mu_in, self.mu_out].iter().all(|v| v.is_finite())
            && [self.sigma_in, self.sigma_out]
                .iter()
                .all(|&s| s > 0.0 && s.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("bad column parameters {self:?}")))
        }
    }
}

/// Draws an `n_models x columns.len()` grid.
pub fn gaussian_grid(columns: &[ColumnParams], n_models: usize, seed: u64) -> Result<MiaGrid> {
    if columns.is_empty() {
        return Err(Error::NoColumns);
    }
    if n_models < 2 {
        return Err(Error::invalid("need at least 2 models"));
    }
    for c in columns {
        c.validate()?;
    }
    let n = columns.len();
    let half = n_models / 2;
    let mut scores = vec![0.0; n_models * n];
    let mut mask = vec![false; n_models * n];
    let mut idx: Vec<usize> = Vec::with_capacity(n_models);
    for (x, c) in columns.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(x as u64 + 1);
        idx.clear();
        idx.extend(0..n_models);
        for k in 0..half {
            let j = rng.random_range(k..n_models);
            idx.swap(k, j);
        }
        for &m in &idx[..half] {
            mask[m * n + x] = true;
        }
        for m in 0..n_models {
            let z: f64 = rng.sample(StandardNormal);
            scores[m * n + x] = if mask[m * n + x] {
                c.mu_in + c.sigma_in * z
            } else {
                c.mu_out + c.sigma_out * z
            };
        }
    }
    Ok(MiaGrid::new(n_models, n, scores, mask)?
        .with_meta("source", "synthetic")
        .with_meta("seed", seed.to_string()))
}

/// `n_samples` LLR columns ([`ColumnParams::gaussian_llr`]) with `sigma`
/// log-uniform over `sigma_range`: a grid of LiRA-style scores whose
/// per-sample scales differ by orders of magnitude.
pub fn heterogeneous_columns(
    n_samples: usize,
    sigma_range: (f64, f64),
    seed: u64,
) -> Result<Vec<ColumnParams>> {
    let (lo, hi) = sigma_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::invalid("sigma range must satisfy 0 < lo <= hi"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    Ok((0..n_samples)
        .map(|_| {
            let u: f64 = rng.random();
            ColumnParams::gaussian_llr((ln_lo + u * (ln_hi - ln_lo)).exp())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_membership_and_determinism() {
        let cols = heterogeneous_columns(7, (0.1, 10.0), 1).unwrap();
        let g = gaussian_grid(&cols, 9, 5).unwrap();
        for x in 0..7 {
            assert_eq!(g.column_counts(x), (4, 5));
        }
        assert_eq!(g, gaussian_grid(&cols, 9, 5).unwrap());
        // a column does not depend on how many columns follow it
        let g2 = gaussian_grid(&cols[..3], 9, 5).unwrap();
        for m in 0..9 {
            assert_eq!(&g.score_row(m)[..3], g2.score_row(m));
        }
    }

    #[test]
    fn sigma_range_respected() {
        let cols = heterogeneous_columns(500, (0.1, 10.0), 2).unwrap();
        assert!(cols.iter().all(|c| (0.1..=10.0).contains(&c.sigma_out)));
        assert!(cols
            .iter()
            .all(|c| c.mu_in == -c.mu_out && c.sigma_in == c.sigma_out));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gaussian_grid(&[], 4, 0).is_err());
        let c = ColumnParams::equal_variance(1.0, 1.0);
        assert!(gaussian_grid(&[c], 1, 0).is_err());
        assert!(gaussian_grid(
            &[ColumnParams {
                sigma_out: 0.0,
                ..c
            }],
            4,
            0
        )
        .is_err());
        assert!(heterogeneous_columns(3, (0.0, 1.0), 0).is_err());
    }
}
