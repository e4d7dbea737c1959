//! Autoregressive benchmark: PACF diagnostics, AR(p) least-squares fits with
//! intercept on the raw series, one-step forecasts, and annual re-estimation.

use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;

use crate::design::DesignMatrix;
use crate::models::{EvalMode, ForecastResult, ModelError};
use crate::ols::{self, OlsError};
use crate::series::{DateRange, Series};

#[derive(Debug, thiserror::Error)]
pub enum ArError {
    #[error("series too short: need more than {needed} samples, have {available}")]
    SeriesTooShort { needed: usize, available: usize },
    #[error("AR order must be at least 1")]
    InvalidOrder,
    #[error("no observed value for lag date {0}")]
    MissingLagValue(NaiveDate),
    #[error("series has no variance")]
    ZeroVariance,
    #[error("year {year}: {source}")]
    ForYear {
        year: i32,
        #[source]
        source: Box<ArError>,
    },
    #[error("no data for {0}")]
    NoData(DateRange),
    #[error(transparent)]
    Ols(#[from] OlsError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub order: usize,
    /// `lag_coefficients[i]` multiplies the value `i + 1` steps back.
    pub lag_coefficients: Vec<f64>,
    pub intercept: f64,
    pub fit_range: DateRange,
}

impl ArModel {
    pub fn predict_next(&self, history: &[f64]) -> f64 {
        let n = history.len();
        self.intercept
            + self
                .lag_coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| c * history[n - 1 - i])
                .sum::<f64>()
    }
}

/// Partial autocorrelations for lags `1..=max_lag`, by Durbin–Levinson on the
/// biased sample autocovariances of the demeaned series.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<Vec<f64>, ArError> {
    let n = values.len();
    if n <= max_lag + 1 {
        return Err(ArError::SeriesTooShort {
            needed: max_lag + 1,
            available: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let acov: Vec<f64> = (0..=max_lag)
        .map(|k| {
            (k..n)
                .map(|t| (values[t] - mean) * (values[t - k] - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect();
    if acov[0] <= 0.0 {
        return Err(ArError::ZeroVariance);
    }

    let mut out = Vec::with_capacity(max_lag);
    let mut phi: Vec<f64> = Vec::new();
    let mut err = acov[0];
    for k in 1..=max_lag {
        let num = acov[k] - (1..k).map(|j| phi[j - 1] * acov[k - j]).sum::<f64>();
        let reflection = num / err;
        let mut next = vec![0.0; k];
        for j in 1..k {
            next[j - 1] = phi[j - 1] - reflection * phi[k - j - 1];
        }
        next[k - 1] = reflection;
        err *= 1.0 - reflection * reflection;
        phi = next;
        out.push(reflection);
    }
    Ok(out)
}

/// Regresses the series on `[1, S(t−1), …, S(t−p)]` for targets `t` in
/// `fit_range`. Targets whose lags fall before the series start are skipped.
pub fn fit_ar(series: &Series, order: usize, fit_range: DateRange) -> Result<ArModel, ArError> {
    if order == 0 {
        return Err(ArError::InvalidOrder);
    }
    let g = series.granularity();
    let origin = series.origin();
    let lo = g
        .first_index_on_or_after(origin, fit_range.start)
        .max(order as i64);
    let hi = g
        .last_index_on_or_before(origin, fit_range.end)
        .min(series.len() as i64 - 1);
    let n_targets = (hi - lo + 1).max(0) as usize;
    if n_targets <= order + 1 {
        return Err(ArError::SeriesTooShort {
            needed: order + 1,
            available: n_targets,
        });
    }
    let (lo, hi) = (lo as usize, hi as usize);
    let v = series.values();
    let mut labels = vec!["const".to_string()];
    let mut columns = vec![vec![1.0; n_targets]];
    for lag in 1..=order {
        labels.push(format!("lag{lag}"));
        columns.push(v[lo - lag..=hi - lag].to_vec());
    }
    let f = DesignMatrix::from_columns(labels, columns).expect("columns have equal length");
    let coef = ols::fit(&f, &v[lo..=hi])?;
    Ok(ArModel {
        order,
        lag_coefficients: coef.values[1..].to_vec(),
        intercept: coef.values[0],
        fit_range: DateRange {
            start: series.date_at(lo),
            end: series.date_at(hi),
        },
    })
}

/// One-step-ahead forecasts using observed values for every lag.
pub fn forecast_ar(
    model: &ArModel,
    horizon: DateRange,
    actual: &Series,
) -> Result<ForecastResult, ArError> {
    let g = actual.granularity();
    let origin = actual.origin();
    let lo = g.first_index_on_or_after(origin, horizon.start);
    let hi = g.last_index_on_or_before(origin, horizon.end);
    if hi < lo {
        return Err(ArError::NoData(horizon));
    }
    let mut dates = Vec::new();
    let mut predictions = Vec::new();
    let mut history = vec![0.0; model.order];
    for i in lo..=hi {
        for (k, slot) in history.iter_mut().enumerate() {
            // history is oldest-first; slot k holds the value order − k steps back
            let back = (model.order - k) as i64;
            let d = g.date_at(origin, i - back);
            *slot = actual.value_on(d).ok_or(ArError::MissingLagValue(d))?;
        }
        dates.push(g.date_at(origin, i));
        predictions.push(model.predict_next(&history));
    }
    let mut result = ForecastResult {
        model: format!("ar({})", model.order),
        granularity: g,
        mode: EvalMode::OneStep,
        train_range: model.fit_range,
        dates,
        predictions,
        actuals: None,
        metrics: None,
    };
    result.attach_actuals(actual)?;
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct ArYear {
    pub year: i32,
    pub model: ArModel,
    pub forecast: ForecastResult,
}

/// Annual re-estimation: for each target year, fit AR(p) on the preceding
/// calendar year and forecast the target year one step ahead.
pub fn ar_rollover(series: &Series, order: usize, years: &[i32]) -> Result<Vec<ArYear>, ArError> {
    years
        .par_iter()
        .map(|&year| {
            let run = || -> Result<ArYear, ArError> {
                let prev = DateRange::year(year - 1).ok_or(ArError::InvalidOrder)?;
                let target = DateRange::year(year).ok_or(ArError::InvalidOrder)?;
                let model = fit_ar(series, order, prev)?;
                let forecast = forecast_ar(&model, target, series)?;
                if forecast.metrics.is_none() {
                    return Err(ArError::NoData(target));
                }
                Ok(ArYear {
                    year,
                    model,
                    forecast,
                })
            };
            run().map_err(|e| ArError::ForYear {
                year,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Writes the `year,lag1,…,lagp` coefficient table.
pub fn write_coefficient_table<W: Write>(
    rows: &[(i32, &ArModel)],
    mut w: W,
    comment: Option<&str>,
) -> std::io::Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    let order = rows.iter().map(|r| r.1.order).max().unwrap_or(0);
    let mut header = vec!["year".to_string()];
    header.extend((1..=order).map(|i| format!("lag{i}")));
    writeln!(w, "{}", header.join(","))?;
    for (year, m) in rows {
        let mut cells = vec![year.to_string()];
        cells.extend((0..order).map(|i| m.lag_coefficients.get(i).map_or(String::new(), f64::to_string)));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn whole(s: &Series) -> DateRange {
        DateRange::new(s.origin(), s.last_date()).unwrap()
    }

    #[test]
    fn exact_recurrence() {
        let mut x = vec![10.0];
        for _ in 1..20 {
            x.push(0.5 * x[x.len() - 1] + 1.0);
        }
        let s = Series::daily(d(2010, 1, 1), x, "x").unwrap();
        let m = fit_ar(&s, 1, whole(&s)).unwrap();
        assert!((m.lag_coefficients[0] - 0.5).abs() < 1e-10);
        assert!((m.intercept - 1.0).abs() < 1e-10);
    }

    #[test]
    fn persistence_forecast() {
        let v: Vec<f64> = (0..30).map(|i| 10.0 + (i as f64 * 0.7).sin()).collect();
        let s = Series::daily(d(2010, 1, 1), v.clone(), "x").unwrap();
        let m = ArModel {
            order: 1,
            lag_coefficients: vec![1.0],
            intercept: 0.0,
            fit_range: whole(&s),
        };
        let fc = forecast_ar(&m, DateRange::new(d(2010, 1, 2), d(2010, 1, 30)).unwrap(), &s).unwrap();
        assert_eq!(fc.predictions, v[..29].to_vec());
        assert_eq!(fc.actuals.as_deref(), Some(&v[1..]));
    }

    #[test]
    fn constant_series_is_rank_deficient() {
        let s = Series::daily(d(2010, 1, 1), vec![5.0; 50], "x").unwrap();
        assert!(matches!(
            fit_ar(&s, 3, whole(&s)),
            Err(ArError::Ols(OlsError::RankDeficient { .. }))
        ));
    }

    #[test]
    fn constant_series_fixed_point() {
        let s = Series::daily(d(2010, 1, 1), vec![5.0; 50], "x").unwrap();
        let m = ArModel {
            order: 3,
            lag_coefficients: vec![0.5, 0.3, -0.2],
            intercept: 5.0 * (1.0 - 0.6),
            fit_range: whole(&s),
        };
        let fc = forecast_ar(&m, DateRange::new(d(2010, 1, 10), d(2010, 1, 20)).unwrap(), &s).unwrap();
        assert!(fc.predictions.iter().all(|p| (p - 5.0).abs() < 1e-12));
    }

    #[test]
    fn missing_lag() {
        let s = Series::daily(d(2010, 1, 1), vec![5.0; 50], "x").unwrap();
        let m = ArModel {
            order: 2,
            lag_coefficients: vec![0.5, 0.5],
            intercept: 0.0,
            fit_range: whole(&s),
        };
        let err = forecast_ar(&m, DateRange::new(d(2010, 1, 2), d(2010, 1, 5)).unwrap(), &s).unwrap_err();
        assert!(matches!(err, ArError::MissingLagValue(x) if x == d(2009, 12, 31)));
    }

    #[test]
    fn pacf_too_short() {
        assert!(matches!(pacf(&[1.0, 2.0, 3.0], 5), Err(ArError::SeriesTooShort { .. })));
    }

    #[test]
    fn pacf_lag_one_is_autocorrelation() {
        let v: Vec<f64> = (0..200).map(|i| ((i * 37 % 101) as f64).sin() + i as f64 * 0.01).collect();
        let p = pacf(&v, 4).unwrap();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let c0: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
        let c1: f64 = v.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        assert!((p[0] - c1 / c0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_table_layout() {
        let r = DateRange::year(2014).unwrap();
        let m = ArModel {
            order: 3,
            lag_coefficients: vec![1.3244, -0.5227, 0.1917],
            intercept: 0.0,
            fit_range: r,
        };
        let mut buf = Vec::new();
        write_coefficient_table(&[(2014, &m)], &mut buf, None).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "year,lag1,lag2,lag3\n2014,1.3244,-0.5227,0.1917\n");
    }
}
