//! C ABI for the fourcast library.
//!
//! Objects cross the boundary as opaque handles (`FcSeries`, `FcModel`,
//! `FcForecast`) created and freed by this library. Every fallible call
//! returns an [`FcStatus`]; on failure the message is available from
//! [`fc_last_error_message`] on the same thread. Dates are `YYYY-MM-DD`
//! strings. Panics never unwind into C: they are reported as
//! `FC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use chrono::NaiveDate;
use fourcast::design::{temperature_deviation, DesignError};
use fourcast::metrics::{MetricError, MetricReport};
use fourcast::models::{forecast_feedback, forecast_horizon, ModelError};
use fourcast::ols::OlsError;
use fourcast::persist::{read_model, write_model, PersistError};
use fourcast::segregation::{industrial_ratio_holiday, industrial_ratio_weekend};
use fourcast::series::{read_series_csv, ColumnSpec, SeriesError};
use fourcast::{fit_model, DateRange, FittedModel, ForecastResult, ModelKind, RegressorSpec, Series};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    SpecViolation = 5,
    RankDeficient = 6,
    InsufficientHistory = 7,
    MissingData = 8,
    BufferTooSmall = 9,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcModelKind {
    Fse = 0,
    Fset = 1,
    Fsetf = 2,
}

impl From<FcModelKind> for ModelKind {
    fn from(k: FcModelKind) -> Self {
        match k {
            FcModelKind::Fse => ModelKind::Fse,
            FcModelKind::Fset => ModelKind::Fset,
            FcModelKind::Fsetf => ModelKind::Fsetf,
        }
    }
}

/// Regressor configuration for daily data. The annual and weekly periods
/// are fixed at 364 and 7 days; temperature and lag columns follow the
/// model kind.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcRegressorSpec {
    pub annual_harmonics: usize,
    pub weekly_harmonics: usize,
    pub modulated_harmonics: usize,
    pub include_trend: bool,
    pub comfort_temp: f64,
}

impl From<FcRegressorSpec> for RegressorSpec {
    fn from(s: FcRegressorSpec) -> Self {
        RegressorSpec {
            annual_harmonics: s.annual_harmonics,
            weekly_harmonics: s.weekly_harmonics,
            modulated_harmonics: s.modulated_harmonics,
            include_trend: s.include_trend,
            comfort_temp: s.comfort_temp,
            ..RegressorSpec::default()
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FcMetrics {
    pub mape_percent: f64,
    pub rmse: f64,
    pub rmse_percent: f64,
    pub n: usize,
}

impl From<MetricReport> for FcMetrics {
    fn from(m: MetricReport) -> Self {
        FcMetrics {
            mape_percent: m.mape_percent,
            rmse: m.rmse_absolute,
            rmse_percent: m.rmse_percent,
            n: m.n,
        }
    }
}

pub struct FcSeries(Series);
pub struct FcModel(FittedModel);
pub struct FcForecast(ForecastResult);

struct Failure(FcStatus, String);

impl Failure {
    fn new(status: FcStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

fn series_status(e: &SeriesError) -> FcStatus {
    match e {
        SeriesError::Io(_) => FcStatus::Io,
        SeriesError::Csv(_) | SeriesError::MalformedRow { .. } | SeriesError::MissingColumn(_) => FcStatus::Parse,
        SeriesError::OutOfRange(_) | SeriesError::GapTooLarge { .. } | SeriesError::NoOverlap => FcStatus::MissingData,
        _ => FcStatus::InvalidArgument,
    }
}

fn model_status(e: &ModelError) -> FcStatus {
    match e {
        ModelError::InsufficientHistory { .. } => FcStatus::InsufficientHistory,
        ModelError::MissingTemperature
        | ModelError::TemperatureCoverage(_)
        | ModelError::MissingLagValue(_)
        | ModelError::YearNotCovered(_)
        | ModelError::EmptyHorizon(_) => FcStatus::MissingData,
        ModelError::ForYear { source, .. } => model_status(source),
        ModelError::Design(DesignError::SpecViolation(_)) => FcStatus::SpecViolation,
        ModelError::Ols(OlsError::RankDeficient { .. }) => FcStatus::RankDeficient,
        ModelError::Series(s) => series_status(s),
        _ => FcStatus::InvalidArgument,
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        Failure(series_status(&e), e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure(model_status(&e), e.to_string())
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure(FcStatus::InvalidArgument, e.to_string())
    }
}

impl From<PersistError> for Failure {
    fn from(e: PersistError) -> Self {
        let status = match e {
            PersistError::Io(_) => FcStatus::Io,
            _ => FcStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(FcStatus::Io, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn run(f: impl FnOnce() -> Result<(), Failure>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            FcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            FcStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(FcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(FcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(FcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn date(p: *const c_char, what: &str) -> Result<NaiveDate, Failure> {
    let s = text(p, what)?;
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| Failure::new(FcStatus::Parse, format!("{what} '{s}': {e}")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(FcStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(FcStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(value)))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next fourcast call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `origin` must be a NUL-terminated string, `values` must point to `len`
/// doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_series_new(
    origin: *const c_char,
    values: *const f64,
    len: usize,
    out: *mut *mut FcSeries,
) -> FcStatus {
    run(|| {
        let origin = date(origin, "origin")?;
        let v = slice(values, len, "values")?.to_vec();
        put_handle(out, FcSeries(Series::daily(origin, v, "series")?))
    })
}

/// Reads a `date,value` CSV and interpolates gaps of up to `max_gap` days.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_series_from_csv(
    path: *const c_char,
    max_gap: usize,
    out: *mut *mut FcSeries,
) -> FcStatus {
    run(|| {
        let path = text(path, "path")?;
        let raw = read_series_csv(Path::new(path), &ColumnSpec::default())
            .map_err(|e| Failure(series_status(&e), format!("{path}: {e}")))?;
        put_handle(out, FcSeries(raw.into_series(max_gap)?))
    })
}

/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_series_len(series: *const FcSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `series` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_series_free(series: *mut FcSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Default daily configuration: 12 annual, 2 weekly and 5 modulated
/// harmonics, trend on, comfort temperature 18 °C.
#[no_mangle]
pub extern "C" fn fc_spec_default() -> FcRegressorSpec {
    let s = RegressorSpec::default();
    FcRegressorSpec {
        annual_harmonics: s.annual_harmonics,
        weekly_harmonics: s.weekly_harmonics,
        modulated_harmonics: s.modulated_harmonics,
        include_trend: s.include_trend,
        comfort_temp: s.comfort_temp,
    }
}

/// # Safety
/// `spec` must be null or point to a valid struct.
#[no_mangle]
pub unsafe extern "C" fn fc_spec_validate(spec: *const FcRegressorSpec) -> FcStatus {
    run(|| {
        let spec: RegressorSpec = (*borrow(spec, "spec")?).into();
        spec.validate()
            .map_err(|e| Failure::new(FcStatus::SpecViolation, e.to_string()))
    })
}

/// Fits `kind` on all samples before `train_end`. `temperature` may be
/// null for `FC_MODEL_KIND_FSE`.
///
/// # Safety
/// Handles must be live, strings NUL-terminated, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_model_fit(
    kind: FcModelKind,
    demand: *const FcSeries,
    temperature: *const FcSeries,
    spec: *const FcRegressorSpec,
    train_end: *const c_char,
    out: *mut *mut FcModel,
) -> FcStatus {
    run(|| {
        let demand = &borrow(demand, "demand")?.0;
        let temperature = temperature.as_ref().map(|t| &t.0);
        let spec: RegressorSpec = (*borrow(spec, "spec")?).into();
        let end = date(train_end, "train_end")?;
        let m = fit_model(kind.into(), demand, temperature, &spec, end)?;
        put_handle(out, FcModel(m))
    })
}

/// # Safety
/// `model` must be a live handle and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fc_model_save(model: *const FcModel, path: *const c_char) -> FcStatus {
    run(|| {
        let m = &borrow(model, "model")?.0;
        let path = text(path, "path")?;
        let f = File::create(path).map_err(|e| Failure::new(FcStatus::Io, format!("{path}: {e}")))?;
        let mut w = BufWriter::new(f);
        write_model(m, &mut w, None)?;
        w.flush()?;
        Ok(())
    })
}

/// # Safety
/// `path` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_model_load(path: *const c_char, out: *mut *mut FcModel) -> FcStatus {
    run(|| {
        let path = text(path, "path")?;
        let f = File::open(path).map_err(|e| Failure::new(FcStatus::Io, format!("{path}: {e}")))?;
        put_handle(out, FcModel(read_model(BufReader::new(f))?))
    })
}

/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_model_coefficient_count(model: *const FcModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.coefficients.len())
}

/// Copies the coefficients into `out`, which must hold at least
/// `fc_model_coefficient_count` doubles.
///
/// # Safety
/// `model` must be a live handle and `out` must point to `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_model_coefficients(model: *const FcModel, out: *mut f64, cap: usize) -> FcStatus {
    run(|| {
        let v = &borrow(model, "model")?.0.coefficients.values;
        copy_out(v, out, cap)
    })
}

/// Writes the NUL-terminated label of coefficient `index` into `buf`.
///
/// # Safety
/// `model` must be a live handle and `buf` must point to `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn fc_model_coefficient_label(
    model: *const FcModel,
    index: usize,
    buf: *mut c_char,
    cap: usize,
) -> FcStatus {
    run(|| {
        let labels = &borrow(model, "model")?.0.coefficients.labels;
        let label = labels.get(index).ok_or_else(|| {
            Failure::new(FcStatus::InvalidArgument, format!("index {index} out of range ({})", labels.len()))
        })?;
        if buf.is_null() {
            return Err(Failure::new(FcStatus::NullPointer, "buf is null"));
        }
        if cap < label.len() + 1 {
            return Err(Failure::new(FcStatus::BufferTooSmall, format!("need {} bytes", label.len() + 1)));
        }
        ptr::copy_nonoverlapping(label.as_ptr().cast::<c_char>(), buf, label.len());
        *buf.add(label.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_model_free(model: *mut FcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn horizon(from: *const c_char, to: *const c_char) -> Result<DateRange, Failure> {
    let (a, b) = (date(from, "from")?, date(to, "to")?);
    DateRange::new(a, b).ok_or_else(|| Failure::new(FcStatus::InvalidArgument, format!("{a} is after {b}")))
}

/// Multi-step forecast for FSE/FSET models. `temperature` may be null for FSE.
///
/// # Safety
/// Handles must be live, strings NUL-terminated, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_forecast_horizon(
    model: *const FcModel,
    from: *const c_char,
    to: *const c_char,
    temperature: *const FcSeries,
    out: *mut *mut FcForecast,
) -> FcStatus {
    run(|| {
        let m = &borrow(model, "model")?.0;
        let r = forecast_horizon(m, horizon(from, to)?, temperature.as_ref().map(|t| &t.0))?;
        put_handle(out, FcForecast(r))
    })
}

/// Day-ahead forecast for an FSETF model using observed demand for the lag.
///
/// # Safety
/// Handles must be live, strings NUL-terminated, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_forecast_feedback(
    model: *const FcModel,
    from: *const c_char,
    to: *const c_char,
    temperature: *const FcSeries,
    actual: *const FcSeries,
    out: *mut *mut FcForecast,
) -> FcStatus {
    run(|| {
        let m = &borrow(model, "model")?.0;
        let t = &borrow(temperature, "temperature")?.0;
        let a = &borrow(actual, "actual")?.0;
        let r = forecast_feedback(m, horizon(from, to)?, t, a)?;
        put_handle(out, FcForecast(r))
    })
}

/// # Safety
/// `forecast` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_forecast_len(forecast: *const FcForecast) -> usize {
    forecast.as_ref().map_or(0, |f| f.0.predictions.len())
}

/// # Safety
/// `forecast` must be a live handle and `out` must point to `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_forecast_predictions(forecast: *const FcForecast, out: *mut f64, cap: usize) -> FcStatus {
    run(|| copy_out(&borrow(forecast, "forecast")?.0.predictions, out, cap))
}

/// Metrics against observed demand; `FC_STATUS_MISSING_DATA` when the
/// forecast has no attached actuals.
///
/// # Safety
/// `forecast` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_forecast_metrics(forecast: *const FcForecast, out: *mut FcMetrics) -> FcStatus {
    run(|| {
        let m = borrow(forecast, "forecast")?
            .0
            .metrics
            .ok_or_else(|| Failure::new(FcStatus::MissingData, "forecast has no observed values"))?;
        put(out, m.into())
    })
}

/// # Safety
/// `forecast` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_forecast_free(forecast: *mut FcForecast) {
    if !forecast.is_null() {
        drop(Box::from_raw(forecast));
    }
}

unsafe fn copy_out(v: &[f64], out: *mut f64, cap: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(FcStatus::NullPointer, "out is null"));
    }
    if cap < v.len() {
        return Err(Failure::new(FcStatus::BufferTooSmall, format!("need {} values", v.len())));
    }
    ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
    Ok(())
}

unsafe fn metric(
    actual: *const f64,
    forecast: *const f64,
    n: usize,
    out: *mut f64,
    f: fn(&[f64], &[f64]) -> Result<f64, MetricError>,
) -> FcStatus {
    run(|| {
        let a = slice(actual, n, "actual")?;
        let p = slice(forecast, n, "forecast")?;
        put(out, f(a, p)?)
    })
}

/// Mean absolute percentage error, in percent.
///
/// # Safety
/// `actual` and `forecast` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_mape(actual: *const f64, forecast: *const f64, n: usize, out: *mut f64) -> FcStatus {
    metric(actual, forecast, n, out, fourcast::mape)
}

/// # Safety
/// `actual` and `forecast` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_rmse(actual: *const f64, forecast: *const f64, n: usize, out: *mut f64) -> FcStatus {
    metric(actual, forecast, n, out, fourcast::rmse)
}

/// RMSE as a percentage of the mean actual value.
///
/// # Safety
/// `actual` and `forecast` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_rmse_percent(actual: *const f64, forecast: *const f64, n: usize, out: *mut f64) -> FcStatus {
    metric(actual, forecast, n, out, fourcast::rmse_percent)
}

/// Heating degree-days `max(comfort − temperature, 0)`.
#[no_mangle]
pub extern "C" fn fc_temperature_deviation(temperature: f64, comfort: f64) -> f64 {
    temperature_deviation(temperature, comfort)
}

/// `100·(wd_mean/h_mean − 1)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_ratio_holiday(wd_mean: f64, h_mean: f64, out: *mut f64) -> FcStatus {
    run(|| {
        let r = industrial_ratio_holiday(wd_mean, Some(h_mean))
            .map_err(|e| Failure::new(FcStatus::InvalidArgument, e.to_string()))?;
        put(out, r)
    })
}

/// `100·(wd_mean/we_mean − 1)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_ratio_weekend(wd_mean: f64, we_mean: f64, out: *mut f64) -> FcStatus {
    run(|| {
        let r = industrial_ratio_weekend(wd_mean, we_mean)
            .map_err(|e| Failure::new(FcStatus::InvalidArgument, e.to_string()))?;
        put(out, r)
    })
}
