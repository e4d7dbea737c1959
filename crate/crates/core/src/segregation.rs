//! Industrial share of demand from summer weekday, weekend and holiday levels.
//!
//! With residential demand `R`, weekday industrial demand `I`, and weekend
//! industrial remainder `I0`, summer means satisfy `WD = R + I`,
//! `WE = R + I0`, `H = R`. Two ratios follow:
//!
//! * holiday ratio `100·(WD/H − 1) = 100·I/R`
//! * weekend ratio `100·(WD/WE − 1) = 100·(I − I0)/(R + I0)`
//!
//! `R`, `I` and `I0` are not separately identifiable; only the ratios are reported.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::calendar::{classify_day, CalendarConfig, DayClass};
use crate::series::{Granularity, Series};

/// Months 4–9.
pub const DEFAULT_SUMMER: RangeInclusive<u32> = 4..=9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SegregationError {
    #[error("no usable summer weekday data for {0}")]
    NoSummerData(i32),
    #[error("no holiday mean available")]
    MissingHolidayMean,
    #[error("mean must be positive, got {0}")]
    NonPositiveMean(f64),
    #[error("segregation needs a daily series")]
    NotDaily,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonalMeans {
    pub wd_mean: f64,
    pub we_mean: Option<f64>,
    pub h_mean: Option<f64>,
    pub n_wd: usize,
    pub n_we: usize,
    pub n_h: usize,
}

/// Per-class means over the summer months of `year`, skipping excluded days.
pub fn seasonal_means(
    demand: &Series,
    cal: &CalendarConfig,
    year: i32,
    summer_months: &RangeInclusive<u32>,
) -> Result<SeasonalMeans, SegregationError> {
    if demand.granularity() != Granularity::Daily {
        return Err(SegregationError::NotDaily);
    }
    let mut sums = [0.0_f64; 3];
    let mut counts = [0_usize; 3];
    for (date, v) in demand.dates().zip(demand.values()) {
        if date.year() != year || !summer_months.contains(&date.month()) || cal.is_excluded(date) {
            continue;
        }
        let k = match classify_day(date, cal) {
            DayClass::Weekday => 0,
            DayClass::Weekend => 1,
            DayClass::Holiday => 2,
        };
        sums[k] += v;
        counts[k] += 1;
    }
    if counts[0] == 0 {
        return Err(SegregationError::NoSummerData(year));
    }
    let mean = |k: usize| (counts[k] > 0).then(|| sums[k] / counts[k] as f64);
    Ok(SeasonalMeans {
        wd_mean: sums[0] / counts[0] as f64,
        we_mean: mean(1),
        h_mean: mean(2),
        n_wd: counts[0],
        n_we: counts[1],
        n_h: counts[2],
    })
}

/// `100·(WD/H − 1)`, an estimate of `100·I/R`.
pub fn industrial_ratio_holiday(wd_mean: f64, h_mean: Option<f64>) -> Result<f64, SegregationError> {
    let h = h_mean.ok_or(SegregationError::MissingHolidayMean)?;
    if h <= 0.0 {
        return Err(SegregationError::NonPositiveMean(h));
    }
    Ok(100.0 * (wd_mean / h - 1.0))
}

/// `100·(WD/WE − 1)`, an estimate of `100·(I − I0)/(R + I0)`.
pub fn industrial_ratio_weekend(wd_mean: f64, we_mean: f64) -> Result<f64, SegregationError> {
    if we_mean <= 0.0 {
        return Err(SegregationError::NonPositiveMean(we_mean));
    }
    Ok(100.0 * (wd_mean / we_mean - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegregationReport {
    pub label: String,
    pub year: i32,
    pub wd_mean: f64,
    pub we_mean: Option<f64>,
    pub h_mean: Option<f64>,
    pub ratio_holiday: Option<f64>,
    pub ratio_weekend: Option<f64>,
    pub n_wd: usize,
    pub n_we: usize,
    pub n_h: usize,
}

pub fn segregation_report(
    demand: &Series,
    cal: &CalendarConfig,
    year: i32,
    summer_months: &RangeInclusive<u32>,
) -> Result<SegregationReport, SegregationError> {
    let m = seasonal_means(demand, cal, year, summer_months)?;
    Ok(SegregationReport {
        label: demand.label().to_string(),
        year,
        wd_mean: m.wd_mean,
        we_mean: m.we_mean,
        h_mean: m.h_mean,
        ratio_holiday: industrial_ratio_holiday(m.wd_mean, m.h_mean).ok(),
        ratio_weekend: m
            .we_mean
            .and_then(|we| industrial_ratio_weekend(m.wd_mean, we).ok()),
        n_wd: m.n_wd,
        n_we: m.n_we,
        n_h: m.n_h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ratio {
    Holiday,
    Weekend,
}

/// Writes a year × series table of one ratio. Missing ratios are empty cells.
pub fn write_ratio_table<W: Write>(
    reports: &[SegregationReport],
    ratio: Ratio,
    mut w: W,
    comment: Option<&str>,
) -> std::io::Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    let mut labels: Vec<&str> = Vec::new();
    for r in reports {
        if !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
    }
    let mut by_year: BTreeMap<i32, Vec<Option<f64>>> = BTreeMap::new();
    for r in reports {
        let col = labels.iter().position(|l| *l == r.label).expect("label collected");
        let row = by_year.entry(r.year).or_insert_with(|| vec![None; labels.len()]);
        row[col] = match ratio {
            Ratio::Holiday => r.ratio_holiday,
            Ratio::Weekend => r.ratio_weekend,
        };
    }
    writeln!(w, "year,{}", labels.join(","))?;
    for (year, row) in by_year {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.map_or(String::new(), |x| x.to_string()))
            .collect();
        writeln!(w, "{year},{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::DateRange;
    use chrono::{NaiveDate, Weekday};

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn class_constant(cal: &CalendarConfig) -> Series {
        let origin = d(2016, 1, 1);
        let v = (0..366)
            .map(|i| {
                let date = origin + chrono::Days::new(i);
                match classify_day(date, cal) {
                    DayClass::Weekday => 180.0,
                    DayClass::Weekend => 120.0,
                    DayClass::Holiday => 100.0,
                }
            })
            .collect();
        Series::daily(origin, v, "city").unwrap()
    }

    fn holiday_cal() -> CalendarConfig {
        CalendarConfig::default().with_holidays([d(2016, 7, 5), d(2016, 7, 6), d(2016, 7, 7)])
    }

    #[test]
    fn class_constant_means() {
        let cal = holiday_cal();
        let m = seasonal_means(&class_constant(&cal), &cal, 2016, &DEFAULT_SUMMER).unwrap();
        assert_eq!((m.wd_mean, m.we_mean, m.h_mean), (180.0, Some(120.0), Some(100.0)));
        assert_eq!(m.n_h, 3);
    }

    #[test]
    fn excluded_holidays_vanish() {
        let cal = holiday_cal().with_exclusion(DateRange::new(d(2016, 7, 1), d(2016, 7, 10)).unwrap());
        let m = seasonal_means(&class_constant(&cal), &cal, 2016, &DEFAULT_SUMMER).unwrap();
        assert_eq!(m.h_mean, None);
        assert_eq!(m.n_h, 0);
    }

    #[test]
    fn no_summer_data() {
        let s = Series::daily(d(2016, 1, 1), vec![1.0; 60], "x").unwrap();
        assert_eq!(
            seasonal_means(&s, &CalendarConfig::default(), 2016, &DEFAULT_SUMMER),
            Err(SegregationError::NoSummerData(2016))
        );
    }

    #[test]
    fn ratio_examples() {
        assert!((industrial_ratio_holiday(181.19, Some(100.0)).unwrap() - 81.19).abs() < 1e-9);
        assert_eq!(industrial_ratio_holiday(150.0, Some(150.0)).unwrap(), 0.0);
        assert_eq!(industrial_ratio_holiday(150.0, None), Err(SegregationError::MissingHolidayMean));
        assert!((industrial_ratio_weekend(121.15, 100.0).unwrap() - 21.15).abs() < 1e-9);
        assert_eq!(industrial_ratio_weekend(130.0, 130.0).unwrap(), 0.0);
    }

    #[test]
    fn ratio_table_shape() {
        let cal = holiday_cal();
        let s = class_constant(&cal);
        let mut reports = vec![segregation_report(&s, &cal, 2016, &DEFAULT_SUMMER).unwrap()];
        let no_h = CalendarConfig {
            weekend_days: vec![Weekday::Sat, Weekday::Sun],
            ..CalendarConfig::default()
        };
        reports.push(segregation_report(&s.clone().with_label("other"), &no_h, 2016, &DEFAULT_SUMMER).unwrap());
        let mut buf = Vec::new();
        write_ratio_table(&reports, Ratio::Holiday, &mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "year,city,other\n2016,80,\n");
    }
}
