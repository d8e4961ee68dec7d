//! Membership-inference evaluation over `M x N` score grids.
//!
//! Rows of a [`MiaGrid`] are models, columns are samples. The crate estimates
//! per-sample in/out Gaussian statistics from the grid itself (pooled,
//! leave-one-out, or oracle style), standardizes every column so that its
//! out-distribution becomes `N(0, 1)`, and reports TPR at a fixed low FPR
//! under six aggregation strategies. It also contains trade-off function
//! utilities, synthetic Gaussian grids, and a simulator of mean-model shadow grids that exhibits
//! the finite population bias of shadow-model variance estimates.
//!
//! The crate is `no_std` (with `alloc`). The default `std` feature only adds
//! data-parallel row generation to the simulator.
//!
//! ```
//! use mia_audit_core::{estimate_stats, simulate, standardize_with, EstimationMode, Evaluator,
//!     SimConfig, Strategy, VarianceModel};
//!
//! let config = SimConfig { n_full: 200, n_train: 100, dim: 50, sigma: 1.0,
//!     n_models: 64, seed: 7, with_replacement: false };
//! let (grid, _) = simulate(&config)?;
//! let stats = estimate_stats(&grid, EstimationMode::LeaveOneOut, VarianceModel::PerDistribution)?;
//! let cal = standardize_with(&stats)?;
//! let row = Evaluator::new(&cal)?.evaluate(Strategy::ConcatPP, 0.1)?;
//! assert!(row.realized_fpr <= 0.1);
//! # Ok::<(), mia_audit_core::Error>(())
//! ```

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod calibration;
mod error;
pub mod fp_sim;
pub mod grid;
pub mod numerics;
pub mod shadow_stats;
pub mod synthetic;
pub mod tradeoff;

pub use calibration::{
    analytic_tpr_unequal_variance, concat_decomposition_check, evaluate, standardize,
    standardize_with, CalibratedGrid, DecompositionCheck, EvalRow, Evaluator, ScoreSpace, Strategy,
};
pub use error::{Error, Result};
pub use fp_sim::{
    analytic_sigma, fpc_sweep, ratio_summary, simulate, Membership, RatioSummary, SimConfig,
    SimResult, SimSample, SweepPoint,
};
pub use grid::{MiaGrid, RowSelection};
pub use shadow_stats::{
    apply_fpc, estimate_stats, lira_grid, lira_score, ColumnStats, EstimatedStats, EstimationMode,
    FpcInfo, PerSampleStats, ShadowEstimator, VarianceModel,
};
pub use synthetic::{gaussian_grid, heterogeneous_columns, ColumnParams};
pub use tradeoff::{
    check_postprocessing_invariance, deterministic_tradeoff, empirical_tradeoff, gaussian_curve,
    gaussian_tradeoff, processing_inequality_margin, Provenance, TradeoffCurve,
};
