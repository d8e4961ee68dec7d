//! Report rows and their CSV / JSON writers. Column orders are fixed; a
//! `NaN` or undefined value becomes an empty CSV field and a JSON `null`.

use crate::gridio::{write_file, GridFileError};
use mia_audit_core::{
    EvalRow, MiaGrid, PerSampleStats, RatioSummary, SimResult, Strategy, SweepPoint, TradeoffCurve,
};
use serde::Serialize;
use std::path::Path;

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), GridFileError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|source| GridFileError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| GridFileError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })?;
    write_file(path, &bytes)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), GridFileError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report values always serialize");
    bytes.push(b'\n');
    write_file(path, &bytes)
}

#[derive(Debug, Serialize)]
pub struct StatsRecord {
    pub sample_id: String,
    pub mu_in: Option<f64>,
    pub mu_out: Option<f64>,
    pub sigma_in: Option<f64>,
    pub sigma_out: Option<f64>,
    pub n_in: usize,
    pub n_out: usize,
    pub degenerate: bool,
    pub fpc_applied: bool,
    pub sampling_ratio: Option<f64>,
}

pub fn stats_records(grid: &MiaGrid, stats: &PerSampleStats) -> Vec<StatsRecord> {
    stats
        .columns
        .iter()
        .enumerate()
        .map(|(x, c)| StatsRecord {
            sample_id: grid.sample_id(x),
            mu_in: finite(c.mu_in),
            mu_out: finite(c.mu_out),
            sigma_in: finite(c.sigma_in),
            sigma_out: finite(c.sigma_out),
            n_in: c.n_in,
            n_out: c.n_out,
            degenerate: c.degenerate,
            fpc_applied: stats.fpc.is_some(),
            sampling_ratio: stats.fpc.map(|f| f.sampling_ratio),
        })
        .collect()
}

/// One report cell. Numeric fields are empty when the cell is undefined.
#[derive(Debug, Clone, Serialize)]
pub struct EvalRecord {
    pub strategy: &'static str,
    pub alpha: f64,
    pub m_used: usize,
    pub tpr: Option<f64>,
    pub realized_fpr: Option<f64>,
    pub threshold: Option<f64>,
    pub n_in: Option<usize>,
    pub n_out: Option<usize>,
    pub degenerate_columns: usize,
}

/// The CSV record plus audit fields.
#[derive(Debug, Clone, Serialize)]
pub struct EvalDetail {
    #[serde(flatten)]
    pub record: EvalRecord,
    pub score_space: &'static str,
    pub mode: String,
    pub fpc_applied: bool,
    pub low_sample_warning: Option<bool>,
    pub empty_rejection: Option<bool>,
    pub student_t_df: Option<f64>,
    pub student_t_scale: Option<f64>,
    pub student_t_converged: Option<bool>,
    /// Why the cell is undefined.
    pub undefined: Option<String>,
}

pub struct CellContext<'a> {
    pub mode: &'a str,
    pub m_used: usize,
    pub degenerate_columns: usize,
    pub fpc_applied: bool,
}

pub fn eval_detail(
    strategy: Strategy,
    alpha: f64,
    ctx: &CellContext<'_>,
    row: Result<&EvalRow, String>,
) -> EvalDetail {
    let record = EvalRecord {
        strategy: strategy.name(),
        alpha,
        m_used: ctx.m_used,
        tpr: row.as_ref().ok().map(|r| r.tpr),
        realized_fpr: row.as_ref().ok().map(|r| r.realized_fpr),
        threshold: row.as_ref().ok().and_then(|r| finite(r.threshold)),
        n_in: row.as_ref().ok().map(|r| r.n_in),
        n_out: row.as_ref().ok().map(|r| r.n_out),
        degenerate_columns: ctx.degenerate_columns,
    };
    let t = row.as_ref().ok().and_then(|r| r.student_t);
    EvalDetail {
        record,
        score_space: strategy.score_space().name(),
        mode: ctx.mode.to_string(),
        fpc_applied: ctx.fpc_applied,
        low_sample_warning: row.as_ref().ok().map(|r| r.low_sample_warning),
        empty_rejection: row.as_ref().ok().map(|r| r.empty_rejection),
        student_t_df: t.map(|t| t.df),
        student_t_scale: t.map(|t| t.scale),
        student_t_converged: t.map(|t| t.converged),
        undefined: row.err(),
    }
}

#[derive(Debug, Serialize)]
pub struct FprRecord {
    pub sample_id: String,
    pub fpr_x: Option<f64>,
    pub strategy: &'static str,
    pub alpha: f64,
}

#[derive(Debug, Serialize)]
pub struct CurveRecord {
    pub alpha: f64,
    pub beta: f64,
    pub provenance: String,
}

pub fn curve_records(curve: &TradeoffCurve) -> Vec<CurveRecord> {
    let provenance = curve.provenance().to_string();
    curve
        .points()
        .iter()
        .map(|&(alpha, beta)| CurveRecord {
            alpha,
            beta,
            provenance: provenance.clone(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct SimRecord {
    pub sample_id: String,
    pub norm_x: f64,
    pub sigma_emp_in: Option<f64>,
    pub sigma_emp_out: Option<f64>,
    pub sigma_ana_in: Option<f64>,
    pub sigma_ana_out: Option<f64>,
    pub ratio_in: Option<f64>,
    pub ratio_out: Option<f64>,
}

pub fn sim_records(grid: &MiaGrid, result: &SimResult) -> Vec<SimRecord> {
    result
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| SimRecord {
            sample_id: grid.sample_id(i),
            norm_x: s.norm_x,
            sigma_emp_in: finite(s.sigma_emp_in),
            sigma_emp_out: finite(s.sigma_emp_out),
            sigma_ana_in: finite(s.sigma_ana_in),
            sigma_ana_out: finite(s.sigma_ana_out),
            ratio_in: finite(s.ratio_in),
            ratio_out: finite(s.ratio_out),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts_in: Vec<usize>,
    pub counts_out: Vec<usize>,
    pub overflow_in: usize,
    pub overflow_out: usize,
}

#[derive(Debug, Serialize)]
pub struct RatioStats {
    pub mean_ratio_in: f64,
    pub mean_ratio_out: f64,
    pub n_in: usize,
    pub n_out: usize,
    pub histogram: Histogram,
}

impl From<RatioSummary> for RatioStats {
    fn from(s: RatioSummary) -> Self {
        Self {
            mean_ratio_in: s.mean_ratio_in,
            mean_ratio_out: s.mean_ratio_out,
            n_in: s.n_in,
            n_out: s.n_out,
            histogram: Histogram {
                bin_edges: s.bin_edges,
                counts_in: s.hist_in,
                counts_out: s.hist_out,
                overflow_in: s.overflow_in,
                overflow_out: s.overflow_out,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRecord {
    pub sampling_ratio: f64,
    pub n_train: usize,
    pub fpc: f64,
    pub sqrt_fpc: f64,
    pub mean_ratio_in: f64,
    pub mean_ratio_out: f64,
    pub corrected_mean_ratio_in: f64,
    pub corrected_mean_ratio_out: f64,
}

impl From<&SweepPoint> for SweepRecord {
    fn from(p: &SweepPoint) -> Self {
        Self {
            sampling_ratio: p.sampling_ratio,
            n_train: p.n_train,
            fpc: p.fpc,
            sqrt_fpc: p.fpc.sqrt(),
            mean_ratio_in: p.mean_ratio_in,
            mean_ratio_out: p.mean_ratio_out,
            corrected_mean_ratio_in: p.corrected_mean_ratio_in,
            corrected_mean_ratio_out: p.corrected_mean_ratio_out,
        }
    }
}
