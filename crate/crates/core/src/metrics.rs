//! Forecast error metrics: MAPE, RMSE, and RMSE as a percentage of mean demand.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("actual and forecast lengths differ ({actual} vs {forecast})")]
    LengthMismatch { actual: usize, forecast: usize },
    #[error("no points to compare")]
    Empty,
    #[error("actual value at index {0} is not strictly positive")]
    ZeroActual(usize),
    #[error("mean of actual values is not positive")]
    ZeroMeanActual,
}

fn check(actual: &[f64], forecast: &[f64]) -> Result<(), MetricError> {
    if actual.len() != forecast.len() {
        return Err(MetricError::LengthMismatch {
            actual: actual.len(),
            forecast: forecast.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(())
}

/// Mean absolute percentage error, in percent.
pub fn mape(actual: &[f64], forecast: &[f64]) -> Result<f64, MetricError> {
    check(actual, forecast)?;
    if let Some(i) = actual.iter().position(|&a| a <= 0.0) {
        return Err(MetricError::ZeroActual(i));
    }
    let sum: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(a, f)| (f - a).abs() / a)
        .sum();
    Ok(100.0 * sum / actual.len() as f64)
}

/// Root mean square error, in demand units.
pub fn rmse(actual: &[f64], forecast: &[f64]) -> Result<f64, MetricError> {
    check(actual, forecast)?;
    let sum: f64 = actual.iter().zip(forecast).map(|(a, f)| (f - a).powi(2)).sum();
    Ok((sum / actual.len() as f64).sqrt())
}

/// RMSE normalized by the mean of the actual values, in percent.
pub fn rmse_percent(actual: &[f64], forecast: &[f64]) -> Result<f64, MetricError> {
    let e = rmse(actual, forecast)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    if mean <= 0.0 {
        return Err(MetricError::ZeroMeanActual);
    }
    Ok(100.0 * e / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mape_percent: f64,
    pub rmse_absolute: f64,
    pub rmse_percent: f64,
    pub n: usize,
}

impl MetricReport {
    pub fn compute(actual: &[f64], forecast: &[f64]) -> Result<Self, MetricError> {
        Ok(Self {
            mape_percent: mape(actual, forecast)?,
            rmse_absolute: rmse(actual, forecast)?,
            rmse_percent: rmse_percent(actual, forecast)?,
            n: actual.len(),
        })
    }
}
