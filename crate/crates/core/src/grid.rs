//! The `M x N` membership-inference score grid.

use crate::error::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Scores of `n_models` models (rows) on `n_samples` samples (columns), with
/// the membership mask (`true` = sample was in that model's training set).
///
/// Immutable after construction; every constructor validates shape and
/// finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct MiaGrid {
    n_models: usize,
    n_samples: usize,
    scores: Vec<f64>,
    mask: Vec<bool>,
    sample_ids: Option<Vec<String>>,
    meta: BTreeMap<String, String>,
}

/// How [`MiaGrid::subset_models`] picks rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSelection {
    First,
    /// Uniform without replacement, reproducible for a fixed seed. Selected
    /// rows keep their original relative order.
    SeededRandom(u64),
}

impl MiaGrid {
    /// Builds a grid from row-major `scores` and `mask`.
    pub fn new(
        n_models: usize,
        n_samples: usize,
        scores: Vec<f64>,
        mask: Vec<bool>,
    ) -> Result<Self> {
        if n_models == 0 || n_samples == 0 {
            return Err(Error::Shape(format!(
                "grid must be at least 1x1, got {n_models}x{n_samples}"
            )));
        }
        let cells = n_models
            .checked_mul(n_samples)
            .ok_or_else(|| Error::Shape("grid dimensions overflow".into()))?;
        if scores.len() != cells {
            return Err(Error::Shape(format!(
                "expected {cells} scores for {n_models}x{n_samples}, got {}",
                scores.len()
            )));
        }
        if mask.len() != cells {
            return Err(Error::Shape(format!(
                "expected {cells} mask cells for {n_models}x{n_samples}, got {}",
                mask.len()
            )));
        }
        if let Some(pos) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_samples,
                col: pos % n_samples,
            });
        }
        Ok(Self {
            n_models,
            n_samples,
            scores,
            mask,
            sample_ids: None,
            meta: BTreeMap::new(),
        })
    }

    /// Builds a grid from per-row vectors.
    pub fn from_rows(scores: &[Vec<f64>], mask: &[Vec<bool>]) -> Result<Self> {
        let m = scores.len();
        let n = scores.first().map_or(0, Vec::len);
        if mask.len() != m {
            return Err(Error::Shape(format!(
                "scores have {m} rows, mask has {}",
                mask.len()
            )));
        }
        for (r, (s, k)) in scores.iter().zip(mask).enumerate() {
            if s.len() != n || k.len() != n {
                return Err(Error::Shape(format!("row {r} has inconsistent length")));
            }
        }
        Self::new(m, n, scores.concat(), mask.concat())
    }

    pub fn with_sample_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n_samples {
            return Err(Error::Shape(format!(
                "{} sample ids for {} columns",
                ids.len(),
                self.n_samples
            )));
        }
        self.sample_ids = Some(ids);
        Ok(self)
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn with_meta_map(mut self, meta: BTreeMap<String, String>) -> Self {
        self.meta = meta;
        self
    }

    pub fn n_models(&self) -> usize {
        self.n_models
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    #[inline]
    pub fn score(&self, model: usize, sample: usize) -> f64 {
        self.scores[model * self.n_samples + sample]
    }

    #[inline]
    pub fn is_member(&self, model: usize, sample: usize) -> bool {
        self.mask[model * self.n_samples + sample]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn score_row(&self, model: usize) -> &[f64] {
        &self.scores[model * self.n_samples..(model + 1) * self.n_samples]
    }

    pub fn mask_row(&self, model: usize) -> &[bool] {
        &self.mask[model * self.n_samples..(model + 1) * self.n_samples]
    }

    pub fn sample_ids(&self) -> Option<&[String]> {
        self.sample_ids.as_deref()
    }

    /// Id of column `sample`, falling back to its index.
    pub fn sample_id(&self, sample: usize) -> String {
        match &self.sample_ids {
            Some(ids) => ids[sample].clone(),
            None => format!("{sample}"),
        }
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    /// `(n_in, n_out)` for one column.
    pub fn column_counts(&self, sample: usize) -> (usize, usize) {
        let n_in = (0..self.n_models)
            .filter(|&m| self.is_member(m, sample))
            .count();
        (n_in, self.n_models - n_in)
    }

    /// Row indices chosen by `selection`.
    pub fn select_models(&self, m_prime: usize, selection: RowSelection) -> Result<Vec<usize>> {
        if m_prime == 0 || m_prime > self.n_models {
            return Err(Error::invalid(format!(
                "m_prime must be in 1..={}, got {m_prime}",
                self.n_models
            )));
        }
        Ok(match selection {
            RowSelection::First => (0..m_prime).collect(),
            RowSelection::SeededRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut idx: Vec<usize> = (0..self.n_models).collect();
                for i in 0..m_prime {
                    let j = rng.random_range(i..self.n_models);
                    idx.swap(i, j);
                }
                let mut chosen = idx[..m_prime].to_vec();
                chosen.sort_unstable();
                chosen
            }
        })
    }

    /// Grid restricted to `m_prime` models; sample ids and metadata carry over.
    pub fn subset_models(&self, m_prime: usize, selection: RowSelection) -> Result<Self> {
        let rows = self.select_models(m_prime, selection)?;
        Ok(self.select_rows(&rows))
    }

    /// Grid made of the given rows, in the given order. Panics on an
    /// out-of-range index.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut scores = Vec::with_capacity(rows.len() * self.n_samples);
        let mut mask = Vec::with_capacity(rows.len() * self.n_samples);
        for &r in rows {
            scores.extend_from_slice(self.score_row(r));
            mask.extend_from_slice(self.mask_row(r));
        }
        Self {
            n_models: rows.len(),
            n_samples: self.n_samples,
            scores,
            mask,
            sample_ids: self.sample_ids.clone(),
            meta: self.meta.clone(),
        }
    }
}
