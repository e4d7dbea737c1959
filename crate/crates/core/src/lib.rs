//! Modulated Fourier-series regression for daily gas demand forecasting.
//!
//! The model family is linear in its coefficients and fitted by least squares:
//!
//! * FSE: trend, annual and weekly harmonics, and `t`-modulated annual harmonics
//! * FSET: FSE plus heating degree-days `max(T_c − T, 0)`
//! * FSETF: FSET plus the previous day's observed demand
//!
//! An AR(p) benchmark, forecast metrics, a summer weekday/weekend/holiday
//! segregation of industrial demand, and a synthetic generator with known
//! ground truth are included.

pub mod ar;
pub mod calendar;
pub mod design;
pub mod metrics;
pub mod models;
pub mod ols;
pub mod persist;
pub mod segregation;
pub mod series;
pub mod synth;

pub use calendar::{CalendarConfig, DayClass};
pub use design::{build_matrix, DesignMatrix, RegressorSpec};
pub use metrics::{mape, rmse, rmse_percent, MetricReport};
pub use models::{fit_model, FittedModel, ForecastResult, ModelError, ModelKind};
pub use ols::{fit, predict, Coefficients, OlsError};
pub use series::{DateRange, Granularity, Series};
