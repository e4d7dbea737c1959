//! FSE, FSET and FSETF model variants: fitting, horizon and day-ahead
//! forecasting, and year-by-year roll-over evaluation.
//!
//! * FSE: trend, annual and weekly harmonics, modulated annual harmonics.
//! * FSET: FSE plus the heating deviation `max(T_c − T, 0)`.
//! * FSETF: FSET plus the previous step's observed demand. Forecasts are one
//!   step ahead with the lag filled from actuals; coefficients stay fixed
//!   over the horizon.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{build_matrix, DesignError, RegressorSpec};
use crate::metrics::{MetricError, MetricReport};
use crate::ols::{self, Coefficients, OlsError};
use crate::series::{DateRange, Granularity, Series, SeriesError};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("insufficient history: need {needed} training steps, have {available}")]
    InsufficientHistory { needed: usize, available: usize },
    #[error("model requires a temperature series")]
    MissingTemperature,
    #[error("temperature series has no value for {0}")]
    TemperatureCoverage(NaiveDate),
    #[error("series granularity {found} does not match {expected}")]
    GranularityMismatch {
        expected: Granularity,
        found: Granularity,
    },
    #[error("{0} forecasts need observed demand; use the feedback forecast")]
    KindRequiresFeedback(ModelKind),
    #[error("{0} model has no lag regressor; feedback forecasting needs fsetf")]
    NotFeedbackModel(ModelKind),
    #[error("no observed demand for lag date {0}")]
    MissingLagValue(NaiveDate),
    #[error("demand series does not cover all of {0}")]
    YearNotCovered(i32),
    #[error("horizon {0} contains no sample")]
    EmptyHorizon(DateRange),
    #[error("year {year}: {source}")]
    ForYear {
        year: i32,
        #[source]
        source: Box<ModelError>,
    },
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Ols(#[from] OlsError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fse,
    Fset,
    Fsetf,
}

impl ModelKind {
    /// Sets the temperature and lag switches this kind implies.
    pub fn configure(self, spec: &RegressorSpec) -> RegressorSpec {
        RegressorSpec {
            include_temperature: self != ModelKind::Fse,
            include_lag: self == ModelKind::Fsetf,
            ..spec.clone()
        }
    }

    pub fn needs_temperature(self) -> bool {
        self != ModelKind::Fse
    }

    pub fn uses_feedback(self) -> bool {
        self == ModelKind::Fsetf
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Fse => "fse",
            ModelKind::Fset => "fset",
            ModelKind::Fsetf => "fsetf",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fse" => Ok(ModelKind::Fse),
            "fset" => Ok(ModelKind::Fset),
            "fsetf" => Ok(ModelKind::Fsetf),
            other => Err(format!("unknown model kind '{other}' (fse|fset|fsetf)")),
        }
    }
}

/// Coefficients plus everything needed to rebuild regressors for new dates.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub kind: ModelKind,
    pub spec: RegressorSpec,
    pub coefficients: Coefficients,
    pub granularity: Granularity,
    /// Date of step `t = 0`.
    pub origin: NaiveDate,
    pub train_range: DateRange,
}

/// How the predictions in a [`ForecastResult`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Fitted values over the training window.
    InSample,
    /// Multi-step forecast from the training window alone.
    OutOfSample,
    /// Day-ahead forecasts using the previous step's observed demand.
    OneStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    /// Model name, e.g. `fsetf` or `ar(3)`.
    pub model: String,
    pub granularity: Granularity,
    pub mode: EvalMode,
    pub train_range: DateRange,
    pub dates: Vec<NaiveDate>,
    pub predictions: Vec<f64>,
    pub actuals: Option<Vec<f64>>,
    pub metrics: Option<MetricReport>,
}

/// JSON summary written next to forecast CSVs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastSummary {
    pub kind: String,
    pub granularity: Granularity,
    pub mode: EvalMode,
    pub mape_percent: Option<f64>,
    pub rmse_percent: Option<f64>,
    pub rmse_absolute: Option<f64>,
    pub n: usize,
    pub train_range: DateRange,
}

impl ForecastResult {
    /// Attaches observed values and computes metrics. Returns `false` (and
    /// attaches nothing) if `actual` misses any forecast date.
    pub fn attach_actuals(&mut self, actual: &Series) -> Result<bool, ModelError> {
        let values: Option<Vec<f64>> = self.dates.iter().map(|d| actual.value_on(*d)).collect();
        let Some(values) = values else {
            return Ok(false);
        };
        self.metrics = Some(MetricReport::compute(&values, &self.predictions)?);
        self.actuals = Some(values);
        Ok(true)
    }

    pub fn summary(&self) -> ForecastSummary {
        ForecastSummary {
            kind: self.model.clone(),
            granularity: self.granularity,
            mode: self.mode,
            mape_percent: self.metrics.map(|m| m.mape_percent),
            rmse_percent: self.metrics.map(|m| m.rmse_percent),
            rmse_absolute: self.metrics.map(|m| m.rmse_absolute),
            n: self.predictions.len(),
            train_range: self.train_range,
        }
    }

    /// Writes `date,prediction[,actual]` rows.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> std::io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        match &self.actuals {
            Some(act) => {
                writeln!(w, "date,prediction,actual")?;
                for ((d, p), a) in self.dates.iter().zip(&self.predictions).zip(act) {
                    writeln!(w, "{d},{p},{a}")?;
                }
            }
            None => {
                writeln!(w, "date,prediction")?;
                for (d, p) in self.dates.iter().zip(&self.predictions) {
                    writeln!(w, "{d},{p}")?;
                }
            }
        }
        Ok(())
    }
}

// Values of `series` at steps `start..start + n` of the grid (g, origin).
fn pull(
    series: &Series,
    g: Granularity,
    origin: NaiveDate,
    start: i64,
    n: usize,
) -> Result<Vec<f64>, NaiveDate> {
    (0..n as i64)
        .map(|k| {
            let d = g.date_at(origin, start + k);
            series.value_on(d).ok_or(d)
        })
        .collect()
}

fn check_granularity(expected: Granularity, s: &Series) -> Result<(), ModelError> {
    if s.granularity() == expected {
        Ok(())
    } else {
        Err(ModelError::GranularityMismatch {
            expected,
            found: s.granularity(),
        })
    }
}

fn temperature_for(
    spec: &RegressorSpec,
    temperature: Option<&Series>,
    g: Granularity,
    origin: NaiveDate,
    start: i64,
    n: usize,
) -> Result<Option<Vec<f64>>, ModelError> {
    if !spec.include_temperature {
        return Ok(None);
    }
    let temp = temperature.ok_or(ModelError::MissingTemperature)?;
    check_granularity(g, temp)?;
    pull(temp, g, origin, start, n)
        .map(Some)
        .map_err(ModelError::TemperatureCoverage)
}

/// Fits `kind` on every sample of `demand` that ends before `train_end`.
///
/// The step index `t` is counted from the first sample of `demand`. At
/// least one annual cycle of training samples is required (plus one for the
/// lag row of FSETF).
pub fn fit_model(
    kind: ModelKind,
    demand: &Series,
    temperature: Option<&Series>,
    spec: &RegressorSpec,
    train_end: NaiveDate,
) -> Result<FittedModel, ModelError> {
    let spec = kind.configure(spec);
    spec.validate()?;
    let g = demand.granularity();
    if spec.annual_period != g.annual_period() {
        return Err(DesignError::SpecViolation(format!(
            "annual period {} does not match {g} data (expected {})",
            spec.annual_period,
            g.annual_period()
        ))
        .into());
    }
    if g != Granularity::Daily && spec.weekly_harmonics > 0 {
        return Err(DesignError::SpecViolation(format!(
            "weekly harmonics need daily data, got {g}"
        ))
        .into());
    }
    demand.ensure_nonnegative()?;

    let n_train = (0..demand.len())
        .take_while(|&i| g.bucket_end(demand.date_at(i)) <= train_end)
        .count();
    let needed = spec.annual_period.ceil() as usize + usize::from(spec.include_lag);
    if n_train < needed {
        return Err(ModelError::InsufficientHistory {
            needed,
            available: n_train,
        });
    }
    let origin = demand.origin();
    let temps = temperature_for(&spec, temperature, g, origin, 0, n_train)?;
    let y = &demand.values()[..n_train];
    let f = build_matrix(&spec, n_train, 0, temps.as_deref(), spec.include_lag.then_some(y))?;
    let coefficients = ols::fit(&f, y)?;
    let end = g.bucket_end(demand.date_at(n_train - 1)) - Days::new(1);
    Ok(FittedModel {
        kind,
        spec,
        coefficients,
        granularity: g,
        origin,
        train_range: DateRange { start: origin, end },
    })
}

fn horizon_steps(model: &FittedModel, horizon: DateRange) -> Result<(i64, usize), ModelError> {
    let g = model.granularity;
    let lo = g.first_index_on_or_after(model.origin, horizon.start);
    let hi = g.last_index_on_or_before(model.origin, horizon.end);
    if hi < lo {
        return Err(ModelError::EmptyHorizon(horizon));
    }
    Ok((lo, (hi - lo + 1) as usize))
}

fn dates_for(model: &FittedModel, start: i64, n: usize) -> Vec<NaiveDate> {
    (0..n as i64)
        .map(|k| model.granularity.date_at(model.origin, start + k))
        .collect()
}

/// Multi-step forecast over `horizon` (FSE and FSET only).
///
/// FSET needs temperature for every horizon step: observed values,
/// climatology, or a scenario.
pub fn forecast_horizon(
    model: &FittedModel,
    horizon: DateRange,
    temperature: Option<&Series>,
) -> Result<ForecastResult, ModelError> {
    if model.kind.uses_feedback() {
        return Err(ModelError::KindRequiresFeedback(model.kind));
    }
    let (start, n) = horizon_steps(model, horizon)?;
    let g = model.granularity;
    let temps = temperature_for(&model.spec, temperature, g, model.origin, start, n)?;
    let f = build_matrix(&model.spec, n, start, temps.as_deref(), None)?;
    Ok(ForecastResult {
        model: model.kind.to_string(),
        granularity: g,
        mode: EvalMode::OutOfSample,
        train_range: model.train_range,
        dates: dates_for(model, start, n),
        predictions: ols::predict(&f, &model.coefficients)?,
        actuals: None,
        metrics: None,
    })
}

/// Day-ahead forecasts for an FSETF model.
///
/// The prediction for step `d` uses the observed demand at `d − 1`, so
/// `actual_demand` must cover the step before the horizon through the
/// second-to-last horizon step. When it also covers the last step, actuals
/// and metrics are attached.
pub fn forecast_feedback(
    model: &FittedModel,
    horizon: DateRange,
    temperature: &Series,
    actual_demand: &Series,
) -> Result<ForecastResult, ModelError> {
    if !model.kind.uses_feedback() {
        return Err(ModelError::NotFeedbackModel(model.kind));
    }
    let g = model.granularity;
    check_granularity(g, actual_demand)?;
    let (start, n) = horizon_steps(model, horizon)?;
    // One extra leading row carries the first lag value; it is dropped by
    // first_valid_row.
    let lags = pull(actual_demand, g, model.origin, start - 1, n).map_err(ModelError::MissingLagValue)?;
    let temps = temperature_for(&model.spec, Some(temperature), g, model.origin, start - 1, n + 1)?;
    let f = build_matrix(&model.spec, n + 1, start - 1, temps.as_deref(), Some(&lags))?;
    let mut result = ForecastResult {
        model: model.kind.to_string(),
        granularity: g,
        mode: EvalMode::OneStep,
        train_range: model.train_range,
        dates: dates_for(model, start, n),
        predictions: ols::predict(&f, &model.coefficients)?,
        actuals: None,
        metrics: None,
    };
    result.attach_actuals(actual_demand)?;
    Ok(result)
}

/// Fitted values over the training window, with metrics.
pub fn in_sample(
    model: &FittedModel,
    demand: &Series,
    temperature: Option<&Series>,
) -> Result<ForecastResult, ModelError> {
    let g = model.granularity;
    check_granularity(g, demand)?;
    let (start, n) = horizon_steps(model, model.train_range)?;
    let y = pull(demand, g, model.origin, start, n)
        .map_err(|d| ModelError::Series(SeriesError::OutOfRange(d)))?;
    let temps = temperature_for(&model.spec, temperature, g, model.origin, start, n)?;
    let lag = model.spec.include_lag.then_some(y.as_slice());
    let f = build_matrix(&model.spec, n, start, temps.as_deref(), lag)?;
    let skip = f.first_valid_row();
    let mut result = ForecastResult {
        model: model.kind.to_string(),
        granularity: g,
        mode: EvalMode::InSample,
        train_range: model.train_range,
        dates: dates_for(model, start + skip as i64, n - skip),
        predictions: ols::predict(&f, &model.coefficients)?,
        actuals: None,
        metrics: None,
    };
    result.attach_actuals(demand)?;
    Ok(result)
}

/// One roll-over step: the model fitted on data before January 1 and its
/// forecast of that year.
#[derive(Debug, Clone)]
pub struct YearResult {
    pub year: i32,
    pub model: FittedModel,
    pub forecast: ForecastResult,
}

/// For each target year, fits on all data before January 1 and forecasts
/// the whole year (day-ahead for FSETF). Years run in parallel.
pub fn rollover_evaluate(
    kind: ModelKind,
    demand: &Series,
    temperature: Option<&Series>,
    spec: &RegressorSpec,
    years: &[i32],
) -> Result<Vec<YearResult>, ModelError> {
    years
        .par_iter()
        .map(|&year| {
            rollover_year(kind, demand, temperature, spec, year).map_err(|e| ModelError::ForYear {
                year,
                source: Box::new(e),
            })
        })
        .collect()
}

fn rollover_year(
    kind: ModelKind,
    demand: &Series,
    temperature: Option<&Series>,
    spec: &RegressorSpec,
    year: i32,
) -> Result<YearResult, ModelError> {
    let range = DateRange::year(year).ok_or(ModelError::YearNotCovered(year))?;
    let model = fit_model(kind, demand, temperature, spec, range.start)?;
    let mut forecast = if kind.uses_feedback() {
        let temp = temperature.ok_or(ModelError::MissingTemperature)?;
        forecast_feedback(&model, range, temp, demand)?
    } else {
        forecast_horizon(&model, range, temperature)?
    };
    if !forecast.attach_actuals(demand)? {
        return Err(ModelError::YearNotCovered(year));
    }
    Ok(YearResult {
        year,
        model,
        forecast,
    })
}
