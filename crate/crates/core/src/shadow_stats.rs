//! Per-sample in/out Gaussian estimates from a score grid.
//!
//! Every column's in- and out-scores are accumulated once (`O(MN)`). The
//! leave-one-out view for a target row is then obtained by removing that
//! row's value from the matching accumulator, `O(N)` per row, instead of
//! re-scanning the remaining `M - 1` rows.

use crate::error::{Error, Result};
use crate::grid::MiaGrid;
use crate::numerics::MomentAccumulator;
use alloc::borrow::Cow;
use alloc::format;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Whether in and out share one variance estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceModel {
    #[default]
    PerDistribution,
    /// Pooled within-group variance used for both sides (equal-variance LiRA).
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStats {
    pub mu_in: f64,
    pub mu_out: f64,
    pub sigma_in: f64,
    pub sigma_out: f64,
    pub n_in: usize,
    pub n_out: usize,
    /// Fewer than two observations on a side, or a zero standard deviation.
    /// Degenerate columns are excluded downstream, never imputed.
    pub degenerate: bool,
}

impl ColumnStats {
    fn from_accumulators(
        acc_in: &MomentAccumulator,
        acc_out: &MomentAccumulator,
        model: VarianceModel,
    ) -> Self {
        let mean = |a: &MomentAccumulator| if a.count() > 0 { a.mean() } else { f64::NAN };
        let (sigma_in, sigma_out) = match model {
            VarianceModel::PerDistribution => (
                acc_in.std_dev().unwrap_or(f64::NAN),
                acc_out.std_dev().unwrap_or(f64::NAN),
            ),
            VarianceModel::Shared => {
                let dof = (acc_in.count() + acc_out.count()) as f64 - 2.0;
                let s = if acc_in.count() >= 2 && acc_out.count() >= 2 {
                    ((acc_in.m2() + acc_out.m2()) / dof).sqrt()
                } else {
                    f64::NAN
                };
                (s, s)
            }
        };
        let n_in = acc_in.count() as usize;
        let n_out = acc_out.count() as usize;
        let degenerate = n_in < 2 || n_out < 2 || !(sigma_in > 0.0) || !(sigma_out > 0.0);
        Self {
            mu_in: mean(acc_in),
            mu_out: mean(acc_out),
            sigma_in,
            sigma_out,
            n_in,
            n_out,
            degenerate,
        }
    }

    /// Mean gap `mu_in - mu_out`.
    pub fn delta(&self) -> f64 {
        self.mu_in - self.mu_out
    }

    /// `+1` or `-1`; a zero gap maps to `+1`.
    pub fn sign_delta(&self) -> f64 {
        if self.delta() < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn lira_score(&self, s: f64) -> Result<f64> {
        lira_score(s, self.mu_in, self.sigma_in, self.mu_out, self.sigma_out)
    }
}

/// Record of an applied finite population correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpcInfo {
    pub n_train: usize,
    pub n_full: usize,
    /// `n_train / n_full`
    pub sampling_ratio: f64,
}

impl FpcInfo {
    /// `1 - n_train / n_full`
    pub fn factor(&self) -> f64 {
        1.0 - self.sampling_ratio
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerSampleStats {
    pub columns: Vec<ColumnStats>,
    pub variance_model: VarianceModel,
    pub fpc: Option<FpcInfo>,
}

impl PerSampleStats {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn degenerate_count(&self) -> usize {
        self.columns.iter().filter(|c| c.degenerate).count()
    }

    pub fn fpc_applied(&self) -> bool {
        self.fpc.is_some()
    }
}

/// Which rows feed the estimate used to standardize a target row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EstimationMode {
    /// All rows, no exclusion.
    Pooled,
    /// Every row is a target; its stats come from the other `M - 1` rows.
    LeaveOneOut,
    /// Only `targets` are evaluated; each is standardized with stats from all
    /// rows of the grid except itself.
    Oracle { targets: Vec<usize> },
}

/// Column accumulators over every row of a grid.
#[derive(Debug, Clone)]
pub struct ShadowEstimator {
    acc_in: Vec<MomentAccumulator>,
    acc_out: Vec<MomentAccumulator>,
    variance_model: VarianceModel,
}

impl ShadowEstimator {
    pub fn new(grid: &MiaGrid, variance_model: VarianceModel) -> Self {
        let n = grid.n_samples();
        let mut acc_in = alloc::vec![MomentAccumulator::new(); n];
        let mut acc_out = alloc::vec![MomentAccumulator::new(); n];
        for m in 0..grid.n_models() {
            for (x, (&s, &member)) in grid.score_row(m).iter().zip(grid.mask_row(m)).enumerate() {
                if member {
                    acc_in[x].push(s);
                } else {
                    acc_out[x].push(s);
                }
            }
        }
        Self {
            acc_in,
            acc_out,
            variance_model,
        }
    }

    pub fn pooled(&self) -> PerSampleStats {
        let columns = self
            .acc_in
            .iter()
            .zip(&self.acc_out)
            .map(|(i, o)| ColumnStats::from_accumulators(i, o, self.variance_model))
            .collect();
        PerSampleStats {
            columns,
            variance_model: self.variance_model,
            fpc: None,
        }
    }

    /// Stats with row `model` of `grid` removed. `grid` must be the grid this
    /// estimator was built from.
    pub fn excluding_row(&self, grid: &MiaGrid, model: usize) -> PerSampleStats {
        let columns = grid
            .score_row(model)
            .iter()
            .zip(grid.mask_row(model))
            .enumerate()
            .map(|(x, (&s, &member))| {
                let (mut acc_in, mut acc_out) = (self.acc_in[x], self.acc_out[x]);
                let side = if member { &mut acc_in } else { &mut acc_out };
                if side.remove(s).is_err() {
                    // Dropping the only observation leaves an empty side.
                    *side = MomentAccumulator::new();
                }
                ColumnStats::from_accumulators(&acc_in, &acc_out, self.variance_model)
            })
            .collect();
        PerSampleStats {
            columns,
            variance_model: self.variance_model,
            fpc: None,
        }
    }
}

/// Estimated per-sample statistics for every target row of a grid.
#[derive(Debug, Clone)]
pub struct EstimatedStats<'g> {
    grid: &'g MiaGrid,
    estimator: ShadowEstimator,
    mode: EstimationMode,
    pooled: PerSampleStats,
    fpc: Option<(usize, usize)>,
}

/// Builds the estimator for `grid` under `mode`.
pub fn estimate_stats(
    grid: &MiaGrid,
    mode: EstimationMode,
    variance_model: VarianceModel,
) -> Result<EstimatedStats<'_>> {
    if let EstimationMode::Oracle { targets } = &mode {
        if targets.is_empty() {
            return Err(Error::invalid("oracle mode needs at least one target row"));
        }
        if let Some(&bad) = targets.iter().find(|&&t| t >= grid.n_models()) {
            return Err(Error::invalid(format!(
                "target row {bad} out of range for {} models",
                grid.n_models()
            )));
        }
    }
    let estimator = ShadowEstimator::new(grid, variance_model);
    let pooled = estimator.pooled();
    Ok(EstimatedStats {
        grid,
        estimator,
        mode,
        pooled,
        fpc: None,
    })
}

impl<'g> EstimatedStats<'g> {
    pub fn grid(&self) -> &'g MiaGrid {
        self.grid
    }

    pub fn mode(&self) -> &EstimationMode {
        &self.mode
    }

    /// Applies the finite population correction to every view handed out.
    pub fn with_fpc(mut self, n_train: usize, n_full: usize) -> Result<Self> {
        self.pooled = apply_fpc(&self.pooled, n_train, n_full)?;
        self.fpc = Some((n_train, n_full));
        Ok(self)
    }

    /// Rows that get evaluated.
    pub fn targets(&self) -> Vec<usize> {
        match &self.mode {
            EstimationMode::Pooled | EstimationMode::LeaveOneOut => {
                (0..self.grid.n_models()).collect()
            }
            EstimationMode::Oracle { targets } => targets.clone(),
        }
    }

    /// Stats over all rows (FPC-corrected if requested).
    pub fn pooled(&self) -> &PerSampleStats {
        &self.pooled
    }

    /// `Some` when every target row shares one set of stats.
    pub fn shared(&self) -> Option<&PerSampleStats> {
        matches!(self.mode, EstimationMode::Pooled).then_some(&self.pooled)
    }

    /// Stats used to standardize target row `model`.
    pub fn for_row(&self, model: usize) -> Result<Cow<'_, PerSampleStats>> {
        if model >= self.grid.n_models() {
            return Err(Error::invalid(format!("row {model} out of range")));
        }
        if let Some(shared) = self.shared() {
            return Ok(Cow::Borrowed(shared));
        }
        let view = self.estimator.excluding_row(self.grid, model);
        Ok(Cow::Owned(match self.fpc {
            Some((n_train, n_full)) => apply_fpc(&view, n_train, n_full)?,
            None => view,
        }))
    }
}

/// Inflates both standard deviations by `1 / sqrt(1 - n_train / n_full)`.
///
/// Shadow models trained on subsets drawn without replacement from one finite
/// pool understate the across-model variance by the factor `1 - N/N+`.
pub fn apply_fpc(stats: &PerSampleStats, n_train: usize, n_full: usize) -> Result<PerSampleStats> {
    if n_train == 0 || n_train >= n_full {
        return Err(Error::invalid(format!(
            "finite population correction needs 0 < n_train < n_full, got {n_train} and {n_full}"
        )));
    }
    if stats.fpc.is_some() {
        return Err(Error::invalid(
            "finite population correction already applied",
        ));
    }
    let info = FpcInfo {
        n_train,
        n_full,
        sampling_ratio: n_train as f64 / n_full as f64,
    };
    let scale = info.factor().sqrt().recip();
    let columns = stats
        .columns
        .iter()
        .map(|c| ColumnStats {
            sigma_in: c.sigma_in * scale,
            sigma_out: c.sigma_out * scale,
            ..*c
        })
        .collect();
    Ok(PerSampleStats {
        columns,
        variance_model: stats.variance_model,
        fpc: Some(info),
    })
}

/// `log N(s; mu_in, sigma_in^2) - log N(s; mu_out, sigma_out^2)`, in log space.
pub fn lira_score(s: f64, mu_in: f64, sigma_in: f64, mu_out: f64, sigma_out: f64) -> Result<f64> {
    if !(sigma_in > 0.0 && sigma_out > 0.0) {
        return Err(Error::invalid("LiRA needs positive standard deviations"));
    }
    let z_in = (s - mu_in) / sigma_in;
    let z_out = (s - mu_out) / sigma_out;
    Ok((sigma_out / sigma_in).ln() + 0.5 * (z_out * z_out - z_in * z_in))
}

/// Replaces every score with its LiRA log-likelihood ratio, each row scored
/// with the stats of its estimation view. Degenerate columns keep `0.0`.
pub fn lira_grid(stats: &EstimatedStats<'_>) -> Result<MiaGrid> {
    let grid = stats.grid();
    let mut out = Vec::with_capacity(grid.scores().len());
    for m in 0..grid.n_models() {
        let view = stats.for_row(m)?;
        for (x, &s) in grid.score_row(m).iter().enumerate() {
            let c = &view.columns[x];
            out.push(if c.degenerate { 0.0 } else { c.lira_score(s)? });
        }
    }
    let mut lira = MiaGrid::new(grid.n_models(), grid.n_samples(), out, grid.mask().to_vec())?
        .with_meta_map(grid.meta().clone())
        .with_meta("statistic", "lira");
    if let Some(ids) = grid.sample_ids() {
        lira = lira.with_sample_ids(ids.to_vec())?;
    }
    Ok(lira)
}
