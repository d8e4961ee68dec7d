//! Scalar numerics shared by every other module.

mod moments;
mod normal;
mod quantile;
mod special;
mod student_t;

pub use moments::{loo_downdate, MomentAccumulator};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, normal_sf};
pub use quantile::{empirical_quantile, upper_tail_threshold};
pub use special::{inc_beta, ln_beta, ln_gamma};
pub use student_t::{
    fit_student_t_df, student_t_cdf, student_t_quantile, student_t_sf, StudentTFit, MAX_DF, MIN_DF,
};
