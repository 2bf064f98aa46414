//! Pooled signal/response scatter and the linear, cubic and saturating
//! tanh response models.

mod models;
mod ols;
pub mod scatter;

pub use models::{
    fit_cubic, fit_linear, fit_tanh, golden_section, ols_slope, running_average, tanh_grid, tanh_profile, FitResult,
    Model, TANH_GRID_POINTS, TANH_REL_TOL, TANH_S_STAR_MAX, TANH_S_STAR_MIN,
};
pub use scatter::{build_scatter, instrument_scatter, Normalization, ScatterPoint, ScatterSet};
