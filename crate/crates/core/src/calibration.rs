//! Per-sample standardization and TPR-at-fixed-FPR evaluation strategies.
//!
//! Each column `x` is mapped through
//! `f_x(t) = sign(mu_in - mu_out) * (t - mu_out) / sigma_out`, which sends its
//! out-distribution to `N(0, 1)` and its in-distribution to
//! `N(|delta| / sigma_out, (sigma_in / sigma_out)^2)`. After this map a single
//! global threshold yields (approximately) the same per-sample FPR everywhere,
//! which is not true for the raw pooled scores.
//!
//! Positives are always `score > threshold`; ties fall in the acceptance region.

use crate::error::{Error, Result};
use crate::grid::MiaGrid;
use crate::numerics::{
    fit_student_t_df, normal_quantile, normal_sf, student_t_quantile, upper_tail_threshold,
    StudentTFit,
};
use crate::shadow_stats::{
    estimate_stats, EstimatedStats, EstimationMode, FpcInfo, PerSampleStats, VarianceModel,
};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;
use core::str::FromStr;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Cap on the pooled out-scores fed to the Student-t fit; larger pools are
/// thinned by an even stride over their sorted order.
pub const STUDENT_T_FIT_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Pooled raw scores, empirical threshold.
    ConcatNaive,
    /// Pooled standardized scores, empirical threshold.
    ConcatPP,
    /// Per-column empirical threshold on standardized scores, TPR averaged.
    AvgPerSample,
    /// Pooled standardized scores, threshold `Φ⁻¹(1 - alpha)`.
    ConcatPPNormal,
    /// Pooled standardized scores, threshold from a Student-t fitted to the
    /// pooled standardized out-scores.
    ConcatPPStudentT,
    /// Per-column threshold `Φ⁻¹(1 - alpha)`, TPR averaged.
    AvgPerSampleNormal,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::ConcatNaive,
        Strategy::ConcatPP,
        Strategy::AvgPerSample,
        Strategy::ConcatPPNormal,
        Strategy::ConcatPPStudentT,
        Strategy::AvgPerSampleNormal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::ConcatNaive => "naive",
            Strategy::ConcatPP => "pp",
            Strategy::AvgPerSample => "per-sample",
            Strategy::ConcatPPNormal => "pp-normal",
            Strategy::ConcatPPStudentT => "pp-t",
            Strategy::AvgPerSampleNormal => "per-sample-normal",
        }
    }

    pub fn is_empirical(self) -> bool {
        matches!(
            self,
            Strategy::ConcatNaive | Strategy::ConcatPP | Strategy::AvgPerSample
        )
    }

    pub fn is_per_column(self) -> bool {
        matches!(self, Strategy::AvgPerSample | Strategy::AvgPerSampleNormal)
    }

    pub fn score_space(self) -> ScoreSpace {
        match self {
            Strategy::ConcatNaive => ScoreSpace::Raw,
            _ => ScoreSpace::Standardized,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreSpace {
    Raw,
    Standardized,
}

impl ScoreSpace {
    pub fn name(self) -> &'static str {
        match self {
            ScoreSpace::Raw => "raw",
            ScoreSpace::Standardized => "standardized",
        }
    }
}

/// Grid after the per-column affine map, restricted to target rows and
/// non-degenerate columns. Row-major over `rows() x columns()`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedGrid {
    rows: Vec<usize>,
    columns: Vec<usize>,
    raw: Vec<f64>,
    standardized: Vec<f64>,
    mask: Vec<bool>,
    sign_delta: Vec<f64>,
    variance_ratio: Vec<f64>,
    degenerate: Vec<usize>,
    fpc: Option<FpcInfo>,
}

impl CalibratedGrid {
    /// Source row index of each calibrated row.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Source column index of each calibrated column.
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    /// Source columns dropped as degenerate.
    pub fn degenerate_columns(&self) -> &[usize] {
        &self.degenerate
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn standardized(&self) -> &[f64] {
        &self.standardized
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Sign of the mean gap per column, from the stats over the whole
    /// estimation pool.
    pub fn sign_delta(&self) -> &[f64] {
        &self.sign_delta
    }

    /// `sigma_in / sigma_out` per column, from the whole estimation pool.
    pub fn variance_ratio(&self) -> &[f64] {
        &self.variance_ratio
    }

    pub fn fpc(&self) -> Option<FpcInfo> {
        self.fpc
    }

    /// Row-major scores in the requested space.
    pub fn values(&self, space: ScoreSpace) -> &[f64] {
        match space {
            ScoreSpace::Raw => &self.raw,
            ScoreSpace::Standardized => &self.standardized,
        }
    }
}

#[inline]
fn transform(s: f64, sign: f64, mu_out: f64, sigma_out: f64) -> f64 {
    sign * (s - mu_out) / sigma_out
}

fn check_columns(grid: &MiaGrid, stats: &PerSampleStats) -> Result<()> {
    if stats.len() != grid.n_samples() {
        return Err(Error::Shape(format!(
            "stats cover {} columns, grid has {}",
            stats.len(),
            grid.n_samples()
        )));
    }
    Ok(())
}

/// Standardizes every row of `grid` with one shared set of stats.
pub fn standardize(grid: &MiaGrid, stats: &PerSampleStats) -> Result<CalibratedGrid> {
    check_columns(grid, stats)?;
    let rows: Vec<usize> = (0..grid.n_models()).collect();
    build(grid, &rows, stats, |_| Ok(None))
}

/// Standardizes the target rows of an estimate, each with its own view
/// (leave-one-out / oracle) or the shared pooled stats.
pub fn standardize_with(stats: &EstimatedStats<'_>) -> Result<CalibratedGrid> {
    let grid = stats.grid();
    let rows = stats.targets();
    build(grid, &rows, stats.pooled(), |m| {
        Ok(Some(stats.for_row(m)?.into_owned()))
    })
}

/// `view(m)` returns the stats for row `m`, or `None` to use `pooled`.
fn build(
    grid: &MiaGrid,
    rows: &[usize],
    pooled: &PerSampleStats,
    view: impl Fn(usize) -> Result<Option<PerSampleStats>>,
) -> Result<CalibratedGrid> {
    let n = grid.n_samples();
    let mut degenerate: Vec<bool> = pooled.columns.iter().map(|c| c.degenerate).collect();
    let mut full = Vec::with_capacity(rows.len() * n);
    for &m in rows {
        let own = view(m)?;
        let stats = own.as_ref().unwrap_or(pooled);
        check_columns(grid, stats)?;
        for (x, &s) in grid.score_row(m).iter().enumerate() {
            let c = &stats.columns[x];
            if c.degenerate {
                degenerate[x] = true;
                full.push(f64::NAN);
            } else {
                full.push(transform(s, c.sign_delta(), c.mu_out, c.sigma_out));
            }
        }
    }
    let columns: Vec<usize> = (0..n).filter(|&x| !degenerate[x]).collect();
    let dropped: Vec<usize> = (0..n).filter(|&x| degenerate[x]).collect();
    let k = columns.len();
    let mut raw = Vec::with_capacity(rows.len() * k);
    let mut standardized = Vec::with_capacity(rows.len() * k);
    let mut mask = Vec::with_capacity(rows.len() * k);
    for (r, &m) in rows.iter().enumerate() {
        for &x in &columns {
            raw.push(grid.score(m, x));
            standardized.push(full[r * n + x]);
            mask.push(grid.is_member(m, x));
        }
    }
    Ok(CalibratedGrid {
        rows: rows.to_vec(),
        sign_delta: columns
            .iter()
            .map(|&x| pooled.columns[x].sign_delta())
            .collect(),
        variance_ratio: columns
            .iter()
            .map(|&x| pooled.columns[x].sigma_in / pooled.columns[x].sigma_out)
            .collect(),
        columns,
        raw,
        standardized,
        mask,
        degenerate: dropped,
        fpc: pooled.fpc,
    })
}

/// One `(strategy, alpha, M')` cell of an evaluation report.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub strategy: Strategy,
    pub alpha: f64,
    pub m_used: usize,
    pub tpr: f64,
    /// Empirical fraction of out-scores above the threshold(s).
    pub realized_fpr: f64,
    /// The global threshold, or the mean of the per-column thresholds.
    pub threshold: f64,
    pub score_space: ScoreSpace,
    pub n_in: usize,
    pub n_out: usize,
    pub degenerate_columns: usize,
    /// Fewer than `10 / alpha` out-scores behind an empirical threshold.
    pub low_sample_warning: bool,
    /// No out-score lies above the threshold.
    pub empty_rejection: bool,
    /// Present for the Student-t strategy.
    pub student_t: Option<StudentTFit>,
}

#[derive(Debug, Clone)]
enum Thresholds {
    Global(f64),
    PerColumn(Vec<f64>),
}

struct Column {
    out_sorted: Vec<f64>,
    ins: Vec<f64>,
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(f64::total_cmp);
    v
}

fn count_above(sorted: &[f64], tau: f64) -> usize {
    sorted.len() - sorted.partition_point(|&v| v <= tau)
}

fn min_out_for(alpha: f64) -> usize {
    (2.0 / alpha - 1e-9).ceil() as usize
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// Evaluates strategies on one calibrated grid. Pooled and per-column score
/// arrays are sorted once; the Student-t fit is computed on first use.
pub struct Evaluator<'c> {
    cal: &'c CalibratedGrid,
    raw_out: Vec<f64>,
    raw_in: Vec<f64>,
    std_out: Vec<f64>,
    std_in: Vec<f64>,
    raw_columns: Vec<Column>,
    std_columns: Vec<Column>,
    t_fit: OnceCell<Result<StudentTFit>>,
}

impl<'c> Evaluator<'c> {
    pub fn new(cal: &'c CalibratedGrid) -> Result<Self> {
        if cal.columns.is_empty() {
            return Err(Error::NoColumns);
        }
        let k = cal.n_columns();
        let split = |values: &[f64]| {
            let mut cols: Vec<(Vec<f64>, Vec<f64>)> = (0..k).map(|_| (vec![], vec![])).collect();
            for (i, (&v, &member)) in values.iter().zip(&cal.mask).enumerate() {
                let c = &mut cols[i % k];
                if member {
                    c.1.push(v);
                } else {
                    c.0.push(v);
                }
            }
            cols.into_iter()
                .map(|(o, i)| Column {
                    out_sorted: sorted(o),
                    ins: i,
                })
                .collect::<Vec<_>>()
        };
        let pool = |values: &[f64], member: bool| {
            values
                .iter()
                .zip(&cal.mask)
                .filter(|(_, &m)| m == member)
                .map(|(&v, _)| v)
                .collect::<Vec<_>>()
        };
        Ok(Self {
            cal,
            raw_out: sorted(pool(&cal.raw, false)),
            raw_in: pool(&cal.raw, true),
            std_out: sorted(pool(&cal.standardized, false)),
            std_in: pool(&cal.standardized, true),
            raw_columns: split(&cal.raw),
            std_columns: split(&cal.standardized),
            t_fit: OnceCell::new(),
        })
    }

    pub fn calibrated(&self) -> &CalibratedGrid {
        self.cal
    }

    fn pooled(&self, space: ScoreSpace) -> (&[f64], &[f64]) {
        match space {
            ScoreSpace::Raw => (&self.raw_out, &self.raw_in),
            ScoreSpace::Standardized => (&self.std_out, &self.std_in),
        }
    }

    fn columns(&self, space: ScoreSpace) -> &[Column] {
        match space {
            ScoreSpace::Raw => &self.raw_columns,
            ScoreSpace::Standardized => &self.std_columns,
        }
    }

    /// Student-t fit to the pooled standardized out-scores.
    pub fn student_t_fit(&self) -> Result<StudentTFit> {
        self.t_fit
            .get_or_init(|| {
                let n = self.std_out.len();
                if n <= STUDENT_T_FIT_CAP {
                    return fit_student_t_df(&self.std_out);
                }
                let thinned: Vec<f64> = (0..STUDENT_T_FIT_CAP)
                    .map(|i| self.std_out[((2 * i + 1) * n) / (2 * STUDENT_T_FIT_CAP)])
                    .collect();
                fit_student_t_df(&thinned)
            })
            .clone()
    }

    fn thresholds(&self, strategy: Strategy, alpha: f64) -> Result<Thresholds> {
        check_alpha(alpha)?;
        let space = strategy.score_space();
        match strategy {
            Strategy::ConcatNaive | Strategy::ConcatPP => {
                let (out, _) = self.pooled(space);
                let needed = min_out_for(alpha);
                if out.len() < needed {
                    return Err(Error::InsufficientData {
                        needed,
                        available: out.len(),
                    });
                }
                Ok(Thresholds::Global(upper_tail_threshold(out, alpha)?.0))
            }
            Strategy::ConcatPPNormal => Ok(Thresholds::Global(normal_quantile(1.0 - alpha)?)),
            Strategy::ConcatPPStudentT => {
                let fit = self.student_t_fit()?;
                Ok(Thresholds::Global(
                    fit.scale * student_t_quantile(1.0 - alpha, fit.df)?,
                ))
            }
            Strategy::AvgPerSample => {
                let needed = min_out_for(alpha);
                let cols = self.columns(space);
                let available = cols.iter().map(|c| c.out_sorted.len()).min().unwrap_or(0);
                if available < needed {
                    return Err(Error::InsufficientData { needed, available });
                }
                cols.iter()
                    .map(|c| upper_tail_threshold(&c.out_sorted, alpha).map(|t| t.0))
                    .collect::<Result<Vec<_>>>()
                    .map(Thresholds::PerColumn)
            }
            Strategy::AvgPerSampleNormal => {
                let z = normal_quantile(1.0 - alpha)?;
                Ok(Thresholds::PerColumn(vec![z; self.cal.n_columns()]))
            }
        }
    }

    /// TPR at target FPR `alpha` under `strategy`.
    pub fn evaluate(&self, strategy: Strategy, alpha: f64) -> Result<EvalRow> {
        let thresholds = self.thresholds(strategy, alpha)?;
        let space = strategy.score_space();
        let (out, ins) = self.pooled(space);
        if ins.is_empty() {
            return Err(Error::InsufficientData {
                needed: 1,
                available: 0,
            });
        }
        let (tpr, above, threshold, min_out) = match &thresholds {
            Thresholds::Global(tau) => {
                let tp = ins.iter().filter(|&&v| v > *tau).count();
                (
                    tp as f64 / ins.len() as f64,
                    count_above(out, *tau),
                    *tau,
                    out.len(),
                )
            }
            Thresholds::PerColumn(taus) => {
                let cols = self.columns(space);
                let mut tpr_sum = 0.0;
                let mut with_in = 0usize;
                let mut above = 0usize;
                for (c, &tau) in cols.iter().zip(taus) {
                    above += count_above(&c.out_sorted, tau);
                    if !c.ins.is_empty() {
                        let tp = c.ins.iter().filter(|&&v| v > tau).count();
                        tpr_sum += tp as f64 / c.ins.len() as f64;
                        with_in += 1;
                    }
                }
                let min_out = cols.iter().map(|c| c.out_sorted.len()).min().unwrap_or(0);
                (
                    tpr_sum / with_in as f64,
                    above,
                    taus.iter().sum::<f64>() / taus.len() as f64,
                    min_out,
                )
            }
        };
        Ok(EvalRow {
            strategy,
            alpha,
            m_used: self.cal.n_rows(),
            tpr,
            realized_fpr: above as f64 / out.len() as f64,
            threshold,
            score_space: space,
            n_in: ins.len(),
            n_out: out.len(),
            degenerate_columns: self.cal.degenerate.len(),
            low_sample_warning: strategy.is_empirical() && (min_out as f64) < 10.0 / alpha,
            empty_rejection: above == 0,
            student_t: match strategy {
                Strategy::ConcatPPStudentT => self.student_t_fit().ok(),
                _ => None,
            },
        })
    }

    /// `FPR_x` of every calibrated column at the strategy's threshold(s), in
    /// the strategy's score space. Columns without out-scores give `NaN`.
    pub fn per_sample_fpr(&self, strategy: Strategy, alpha: f64) -> Result<Vec<f64>> {
        let thresholds = self.thresholds(strategy, alpha)?;
        let cols = self.columns(strategy.score_space());
        Ok(cols
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let tau = match &thresholds {
                    Thresholds::Global(t) => *t,
                    Thresholds::PerColumn(ts) => ts[i],
                };
                if c.out_sorted.is_empty() {
                    f64::NAN
                } else {
                    count_above(&c.out_sorted, tau) as f64 / c.out_sorted.len() as f64
                }
            })
            .collect())
    }
}

/// Estimates stats under `mode`, standardizes, and evaluates one strategy.
pub fn evaluate(
    grid: &MiaGrid,
    mode: EstimationMode,
    variance_model: VarianceModel,
    strategy: Strategy,
    alpha: f64,
) -> Result<EvalRow> {
    let stats = estimate_stats(grid, mode, variance_model)?;
    let cal = standardize_with(&stats)?;
    Evaluator::new(&cal)?.evaluate(strategy, alpha)
}

/// Concatenated FPR/TPR at `tau` next to the `n`-weighted mean of the
/// per-sample rates. The two agree up to float summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionCheck {
    pub pooled_fpr: f64,
    pub weighted_mean_fpr: f64,
    /// `NaN` when the grid has no in-scores.
    pub pooled_tpr: f64,
    pub weighted_mean_tpr: f64,
}

pub fn concat_decomposition_check(grid: &MiaGrid, tau: f64) -> Result<DecompositionCheck> {
    let n = grid.n_samples();
    let mut above_out = vec![0usize; n];
    let mut above_in = vec![0usize; n];
    let mut n_out = vec![0usize; n];
    let mut n_in = vec![0usize; n];
    for m in 0..grid.n_models() {
        for (x, (&s, &member)) in grid.score_row(m).iter().zip(grid.mask_row(m)).enumerate() {
            let hit = (s > tau) as usize;
            if member {
                n_in[x] += 1;
                above_in[x] += hit;
            } else {
                n_out[x] += 1;
                above_out[x] += hit;
            }
        }
    }
    let total_out: usize = n_out.iter().sum();
    if total_out == 0 {
        return Err(Error::InsufficientData {
            needed: 1,
            available: 0,
        });
    }
    let total_in: usize = n_in.iter().sum();
    let weighted = |above: &[usize], counts: &[usize], total: usize| {
        let mut acc = 0.0;
        for (&a, &c) in above.iter().zip(counts) {
            if c > 0 {
                acc += (c as f64 / total as f64) * (a as f64 / c as f64);
            }
        }
        acc
    };
    let (pooled_tpr, weighted_mean_tpr) = if total_in == 0 {
        (f64::NAN, f64::NAN)
    } else {
        (
            above_in.iter().sum::<usize>() as f64 / total_in as f64,
            weighted(&above_in, &n_in, total_in),
        )
    };
    Ok(DecompositionCheck {
        pooled_fpr: above_out.iter().sum::<usize>() as f64 / total_out as f64,
        weighted_mean_fpr: weighted(&above_out, &n_out, total_out),
        pooled_tpr,
        weighted_mean_tpr,
    })
}

/// Per-sample TPR of the one-sided standardized test `score > Φ⁻¹(1 - alpha)`
/// when the in-distribution is `N(delta_over_sigma_out, variance_ratio^2)`.
pub fn analytic_tpr_unequal_variance(
    delta_over_sigma_out: f64,
    variance_ratio: f64,
    alpha: f64,
) -> Result<f64> {
    if !(delta_over_sigma_out >= 0.0 && delta_over_sigma_out.is_finite()) {
        return Err(Error::invalid("standardized gap must be finite and >= 0"));
    }
    if !(variance_ratio > 0.0 && variance_ratio.is_finite()) {
        return Err(Error::invalid("variance ratio must be finite and > 0"));
    }
    check_alpha(alpha)?;
    let z = normal_quantile(1.0 - alpha)?;
    Ok(normal_sf((z - delta_over_sigma_out) / variance_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadow_stats::estimate_stats;

    fn column_grid() -> MiaGrid {
        MiaGrid::from_rows(
            &[vec![0.0], vec![10.0], vec![2.0], vec![12.0]],
            &[vec![false], vec![true], vec![false], vec![true]],
        )
        .unwrap()
    }

    #[test]
    fn standardize_out_side_to_zero_mean_unit_sd() {
        let g = column_grid();
        let est = estimate_stats(&g, EstimationMode::Pooled, VarianceModel::default()).unwrap();
        let cal = standardize(&g, est.pooled()).unwrap();
        let outs: Vec<f64> = cal
            .standardized()
            .iter()
            .zip(cal.mask())
            .filter(|(_, &m)| !m)
            .map(|(&v, _)| v)
            .collect();
        let mean = outs.iter().sum::<f64>() / 2.0;
        let sd = (outs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 1.0).sqrt();
        assert_eq!(mean, 0.0);
        assert!((sd - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_gap_is_flipped() {
        let g = MiaGrid::from_rows(
            &[vec![10.0], vec![0.0], vec![12.0], vec![2.0]],
            &[vec![false], vec![true], vec![false], vec![true]],
        )
        .unwrap();
        let est = estimate_stats(&g, EstimationMode::Pooled, VarianceModel::default()).unwrap();
        let cal = standardize(&g, est.pooled()).unwrap();
        assert_eq!(cal.sign_delta(), &[-1.0]);
        let in_mean: f64 = cal
            .standardized()
            .iter()
            .zip(cal.mask())
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v)
            .sum::<f64>()
            / 2.0;
        assert!(in_mean > 0.0);
    }

    #[test]
    fn standard_column_unchanged() {
        let stats = PerSampleStats {
            columns: vec![crate::shadow_stats::ColumnStats {
                mu_in: 1.0,
                mu_out: 0.0,
                sigma_in: 1.0,
                sigma_out: 1.0,
                n_in: 2,
                n_out: 2,
                degenerate: false,
            }],
            variance_model: VarianceModel::default(),
            fpc: None,
        };
        let g = column_grid();
        let cal = standardize(&g, &stats).unwrap();
        assert_eq!(cal.standardized(), g.scores());
    }

    #[test]
    fn missing_stats_rejected() {
        let g = MiaGrid::new(2, 2, vec![0.0; 4], vec![true, false, false, true]).unwrap();
        let grid = column_grid();
        let est = estimate_stats(&grid, EstimationMode::Pooled, VarianceModel::default()).unwrap();
        assert!(matches!(
            standardize(&g, est.pooled()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }

    #[test]
    fn decomposition_extremes() {
        let g = MiaGrid::new(
            3,
            2,
            vec![0.5, 1.5, -2.0, 3.0, 0.25, 9.0],
            vec![false, true, false, false, true, false],
        )
        .unwrap();
        let low = concat_decomposition_check(&g, -100.0).unwrap();
        assert_eq!((low.pooled_fpr, low.weighted_mean_fpr), (1.0, 1.0));
        let high = concat_decomposition_check(&g, 100.0).unwrap();
        assert_eq!((high.pooled_fpr, high.weighted_mean_fpr), (0.0, 0.0));
        assert_eq!((high.pooled_tpr, high.weighted_mean_tpr), (0.0, 0.0));
    }

    #[test]
    fn decomposition_needs_out_scores() {
        let g = MiaGrid::new(1, 2, vec![0.0, 1.0], vec![true, true]).unwrap();
        assert!(concat_decomposition_check(&g, 0.0).is_err());
    }

    #[test]
    fn analytic_tpr_cases() {
        for alpha in [0.001, 0.05, 0.3] {
            let t = analytic_tpr_unequal_variance(0.0, 1.0, alpha).unwrap();
            assert!((t - alpha).abs() < 1e-12);
        }
        let a = analytic_tpr_unequal_variance(2.0, 1.0, 0.05).unwrap();
        assert!((a - 0.638_760_031_312_335).abs() < 1e-12);
        let b = analytic_tpr_unequal_variance(2.0, 2.0, 0.05).unwrap();
        assert!((b - 0.570_470_908_052_487).abs() < 1e-12);
        assert!(analytic_tpr_unequal_variance(-1.0, 1.0, 0.05).is_err());
        assert!(analytic_tpr_unequal_variance(1.0, 0.0, 0.05).is_err());
        assert!(analytic_tpr_unequal_variance(1.0, 1.0, 1.0).is_err());
    }
}
