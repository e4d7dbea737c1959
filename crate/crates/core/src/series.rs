//! Regularly sampled demand and temperature series.
//!
//! A [`Series`] is a gap-free vector of values anchored at an origin date.
//! Daily series step one calendar day per sample; aggregated series step one
//! origin-anchored week or one calendar month per sample. Raw CSV input is
//! read into a [`RawSeries`], which may contain gaps, and is turned into a
//! contiguous [`Series`] by [`RawSeries::into_series`] or [`align_and_fill`].

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, Days, Months, NaiveDate};
use serde::{Deserialize, Serialize};

/// Default maximum length (in days) of an interior gap that is interpolated.
pub const DEFAULT_MAX_GAP: usize = 3;

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,
    #[error("non-finite value at {0}")]
    NonFiniteValue(String),
    #[error("negative demand {value} on {date}")]
    NegativeDemand { date: NaiveDate, value: f64 },
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("missing column '{0}' in CSV header")]
    MissingColumn(String),
    #[error("gap of {length} day(s) starting {date} exceeds the interpolation limit")]
    GapTooLarge { date: NaiveDate, length: usize },
    #[error("series do not overlap")]
    NoOverlap,
    #[error("no complete {0} bucket in series")]
    EmptyAfterBucketing(Granularity),
    #[error("{0} is not a bucket start for this series")]
    Misaligned(NaiveDate),
    #[error("date {0} is outside the series")]
    OutOfRange(NaiveDate),
    #[error("operation requires a daily series, got {0}")]
    NotDaily(Granularity),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sampling step of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Daily,
    /// Consecutive 7-day blocks anchored at the series origin.
    Weekly,
    /// Calendar months.
    Monthly,
}

impl Granularity {
    /// Samples per annual cycle, in this granularity's own unit.
    pub fn annual_period(self) -> f64 {
        match self {
            Granularity::Daily => 364.0,
            Granularity::Weekly => 52.0,
            Granularity::Monthly => 12.0,
        }
    }

    /// Start date of bucket `index` for a series anchored at `origin`.
    pub fn date_at(self, origin: NaiveDate, index: i64) -> NaiveDate {
        match self {
            Granularity::Daily => shift_days(origin, index),
            Granularity::Weekly => shift_days(origin, 7 * index),
            Granularity::Monthly => {
                if index >= 0 {
                    origin + Months::new(index as u32)
                } else {
                    origin - Months::new(index.unsigned_abs() as u32)
                }
            }
        }
    }

    /// Index of the bucket starting exactly at `date`, if `date` is a bucket start.
    pub fn offset(self, origin: NaiveDate, date: NaiveDate) -> Option<i64> {
        let days = (date - origin).num_days();
        match self {
            Granularity::Daily => Some(days),
            Granularity::Weekly => (days.rem_euclid(7) == 0).then_some(days.div_euclid(7)),
            Granularity::Monthly => {
                (date.day() == origin.day()).then(|| months_between(origin, date))
            }
        }
    }

    /// Index of the first bucket whose start is on or after `date`.
    pub fn first_index_on_or_after(self, origin: NaiveDate, date: NaiveDate) -> i64 {
        let days = (date - origin).num_days();
        match self {
            Granularity::Daily => days,
            Granularity::Weekly => days.div_euclid(7) + i64::from(days.rem_euclid(7) != 0),
            Granularity::Monthly => {
                let m = months_between(origin, date);
                if self.date_at(origin, m) < date {
                    m + 1
                } else {
                    m
                }
            }
        }
    }

    /// Index of the last bucket whose start is on or before `date`.
    pub fn last_index_on_or_before(self, origin: NaiveDate, date: NaiveDate) -> i64 {
        let days = (date - origin).num_days();
        match self {
            Granularity::Daily => days,
            Granularity::Weekly => days.div_euclid(7),
            Granularity::Monthly => {
                let m = months_between(origin, date);
                if self.date_at(origin, m) > date {
                    m - 1
                } else {
                    m
                }
            }
        }
    }

    /// First day after the bucket that starts at `start`.
    pub fn bucket_end(self, start: NaiveDate) -> NaiveDate {
        match self {
            Granularity::Daily => start + Days::new(1),
            Granularity::Weekly => start + Days::new(7),
            Granularity::Monthly => start + Months::new(1),
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Daily => "daily",
            Granularity::Weekly => "weekly",
            Granularity::Monthly => "monthly",
        })
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "daily" => Ok(Granularity::Daily),
            "weekly" => Ok(Granularity::Weekly),
            "monthly" => Ok(Granularity::Monthly),
            other => Err(format!("unknown granularity '{other}' (daily|weekly|monthly)")),
        }
    }
}

/// Bucket statistic used by [`aggregate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    #[default]
    Mean,
    Sum,
}

impl FromStr for Statistic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Statistic::Mean),
            "sum" => Ok(Statistic::Sum),
            other => Err(format!("unknown statistic '{other}' (mean|sum)")),
        }
    }
}

fn shift_days(date: NaiveDate, days: i64) -> NaiveDate {
    if days >= 0 {
        date + Days::new(days as u64)
    } else {
        date - Days::new(days.unsigned_abs())
    }
}

fn months_between(from: NaiveDate, to: NaiveDate) -> i64 {
    (i64::from(to.year()) - i64::from(from.year())) * 12 + i64::from(to.month())
        - i64::from(from.month())
}

pub(crate) fn parse_date(s: &str) -> Result<NaiveDate, chrono::ParseError> {
    NaiveDate::parse_from_str(s.trim(), DATE_FORMAT)
}

/// Inclusive calendar date interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Option<Self> {
        (start <= end).then_some(Self { start, end })
    }

    /// January 1 through December 31 of `year`.
    pub fn year(year: i32) -> Option<Self> {
        Some(Self {
            start: NaiveDate::from_ymd_opt(year, 1, 1)?,
            end: NaiveDate::from_ymd_opt(year, 12, 31)?,
        })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn num_days(&self) -> i64 {
        (self.end - self.start).num_days() + 1
    }
}

impl fmt::Display for DateRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for DateRange {
    type Err = String;

    /// Parses `YYYY-MM-DD..YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected 'start..end', got '{s}'"))?;
        let start = parse_date(a).map_err(|e| format!("bad start date '{a}': {e}"))?;
        let end = parse_date(b).map_err(|e| format!("bad end date '{b}': {e}"))?;
        DateRange::new(start, end).ok_or_else(|| format!("range '{s}' has start after end"))
    }
}

/// A contiguous, regularly sampled series of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    origin: NaiveDate,
    granularity: Granularity,
    values: Vec<f64>,
    label: String,
}

impl Series {
    /// Builds a daily series; sample `i` belongs to `origin + i` days.
    pub fn daily(
        origin: NaiveDate,
        values: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self, SeriesError> {
        Self::with_granularity(origin, Granularity::Daily, values, label)
    }

    pub fn with_granularity(
        origin: NaiveDate,
        granularity: Granularity,
        values: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let date = granularity.date_at(origin, i as i64);
            return Err(SeriesError::NonFiniteValue(date.to_string()));
        }
        Ok(Self {
            origin,
            granularity,
            values,
            label: label.into(),
        })
    }

    pub fn origin(&self) -> NaiveDate {
        self.origin
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.granularity.date_at(self.origin, index as i64)
    }

    /// Start date of the last sample.
    pub fn last_date(&self) -> NaiveDate {
        self.date_at(self.values.len() - 1)
    }

    /// Last calendar day covered by the series.
    pub fn last_day(&self) -> NaiveDate {
        self.granularity.bucket_end(self.last_date()) - Days::new(1)
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.values.len()).map(|i| self.date_at(i))
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let i = self.granularity.offset(self.origin, date)?;
        (i >= 0 && (i as usize) < self.values.len()).then_some(i as usize)
    }

    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        self.index_of(date).map(|i| self.values[i])
    }

    /// Sub-series of buckets whose start date lies in `range`.
    pub fn window(&self, range: DateRange) -> Result<Series, SeriesError> {
        let g = self.granularity;
        let lo = g.first_index_on_or_after(self.origin, range.start).max(0);
        let hi = g
            .last_index_on_or_before(self.origin, range.end)
            .min(self.values.len() as i64 - 1);
        if lo > hi {
            return Err(SeriesError::OutOfRange(range.start));
        }
        Self::with_granularity(
            g.date_at(self.origin, lo),
            g,
            self.values[lo as usize..=hi as usize].to_vec(),
            self.label.clone(),
        )
    }

    /// Checks the demand invariant (all values ≥ 0).
    pub fn ensure_nonnegative(&self) -> Result<(), SeriesError> {
        match self.values.iter().position(|&v| v < 0.0) {
            Some(i) => Err(SeriesError::NegativeDemand {
                date: self.date_at(i),
                value: self.values[i],
            }),
            None => Ok(()),
        }
    }

    /// Writes `date,value` rows, optionally preceded by a `#` comment line.
    ///
    /// Values use the shortest representation that parses back to the same
    /// `f64`, so writing then reading is lossless.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<(), SeriesError> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "date,value")?;
        for (d, v) in self.dates().zip(&self.values) {
            writeln!(w, "{},{}", d.format(DATE_FORMAT), v)?;
        }
        Ok(())
    }
}

/// Names of the date and value columns in an input CSV.
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub date: String,
    pub value: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            date: "date".into(),
            value: "value".into(),
        }
    }
}

/// Run of consecutive missing days inside a raw series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gap {
    /// First missing date.
    pub start: NaiveDate,
    pub length: usize,
}

/// Date-sorted daily observations as read from disk; may contain gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    label: String,
    points: Vec<(NaiveDate, f64)>,
}

impl RawSeries {
    /// Sorts `points` by date and rejects duplicates and non-finite values.
    pub fn new(
        label: impl Into<String>,
        mut points: Vec<(NaiveDate, f64)>,
    ) -> Result<Self, SeriesError> {
        if points.is_empty() {
            return Err(SeriesError::Empty);
        }
        points.sort_by_key(|p| p.0);
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(SeriesError::DuplicateDate(w[0].0));
        }
        if let Some(p) = points.iter().find(|p| !p.1.is_finite()) {
            return Err(SeriesError::NonFiniteValue(p.0.to_string()));
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn first_date(&self) -> NaiveDate {
        self.points[0].0
    }

    pub fn last_date(&self) -> NaiveDate {
        self.points[self.points.len() - 1].0
    }

    pub fn gaps(&self) -> Vec<Gap> {
        self.points
            .windows(2)
            .filter_map(|w| {
                let missing = (w[1].0 - w[0].0).num_days() - 1;
                (missing > 0).then(|| Gap {
                    start: w[0].0 + Days::new(1),
                    length: missing as usize,
                })
            })
            .collect()
    }

    /// Converts to a contiguous daily series, interpolating gaps up to `max_gap` days.
    pub fn into_series(self, max_gap: usize) -> Result<Series, SeriesError> {
        let range = DateRange {
            start: self.first_date(),
            end: self.last_date(),
        };
        fill_window(&self, range, max_gap)
    }
}

/// Parses a CSV with a header row into a raw daily series.
///
/// Lines starting with `#` are comments. Line numbers in errors are 1-based
/// physical lines, so the first data row after the header is line 2.
pub fn parse_series_csv<R: Read>(
    reader: R,
    columns: &ColumnSpec,
    label: &str,
) -> Result<RawSeries, SeriesError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| SeriesError::MissingColumn(name.to_string()))
    };
    let date_col = find(&columns.date)?;
    let value_col = find(&columns.value)?;

    let mut points = Vec::new();
    let mut seen = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| {
            record.get(i).ok_or_else(|| SeriesError::MalformedRow {
                line,
                reason: format!("expected at least {} fields", i + 1),
            })
        };
        let date_str = field(date_col)?;
        let value_str = field(value_col)?;
        let date = parse_date(date_str).map_err(|e| SeriesError::MalformedRow {
            line,
            reason: format!("bad date '{date_str}': {e}"),
        })?;
        let value: f64 = value_str.parse().map_err(|_| SeriesError::MalformedRow {
            line,
            reason: format!("bad value '{value_str}'"),
        })?;
        if !value.is_finite() {
            return Err(SeriesError::NonFiniteValue(format!("line {line}")));
        }
        if seen.insert(date, line).is_some() {
            return Err(SeriesError::DuplicateDate(date));
        }
        points.push((date, value));
    }
    RawSeries::new(label, points)
}

/// Reads a CSV file; the series label is the file stem.
pub fn read_series_csv(path: &Path, columns: &ColumnSpec) -> Result<RawSeries, SeriesError> {
    let file = std::fs::File::open(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_series_csv(std::io::BufReader::new(file), columns, &label)
}

/// Restricts both series to their common date range and fills interior gaps.
///
/// The common range is the intersection of the two spans, trimmed inward
/// until both series have an observation on its first and last day. Gaps of
/// up to `max_gap` days are linearly interpolated; longer gaps are an error.
pub fn align_and_fill(
    demand: &RawSeries,
    temperature: &RawSeries,
    max_gap: usize,
) -> Result<(Series, Series), SeriesError> {
    let mut start = demand.first_date().max(temperature.first_date());
    let mut end = demand.last_date().min(temperature.last_date());
    let has = |s: &RawSeries, d: NaiveDate| s.points.binary_search_by_key(&d, |p| p.0).is_ok();
    while start <= end && !(has(demand, start) && has(temperature, start)) {
        start = start + Days::new(1);
    }
    while start <= end && !(has(demand, end) && has(temperature, end)) {
        end = end - Days::new(1);
    }
    if start > end {
        return Err(SeriesError::NoOverlap);
    }
    let range = DateRange { start, end };
    Ok((
        fill_window(demand, range, max_gap)?,
        fill_window(temperature, range, max_gap)?,
    ))
}

// `range` endpoints must be observed dates of `raw`.
fn fill_window(raw: &RawSeries, range: DateRange, max_gap: usize) -> Result<Series, SeriesError> {
    let pts: Vec<_> = raw
        .points
        .iter()
        .copied()
        .filter(|p| range.contains(p.0))
        .collect();
    let mut values = Vec::with_capacity(range.num_days() as usize);
    values.push(pts[0].1);
    for w in pts.windows(2) {
        let (d0, v0) = w[0];
        let (d1, v1) = w[1];
        let steps = (d1 - d0).num_days();
        let missing = (steps - 1) as usize;
        if missing > max_gap {
            return Err(SeriesError::GapTooLarge {
                date: d0 + Days::new(1),
                length: missing,
            });
        }
        for k in 1..steps {
            let frac = k as f64 / steps as f64;
            values.push(v0 + (v1 - v0) * frac);
        }
        values.push(v1);
    }
    Series::daily(range.start, values, raw.label.clone())
}

/// Buckets a daily series into weekly or monthly values.
///
/// Only complete buckets are kept. Weekly buckets are 7-day blocks from the
/// series origin; monthly buckets are calendar months, so a partial leading
/// month is skipped as well as a partial trailing one.
pub fn aggregate(
    series: &Series,
    granularity: Granularity,
    statistic: Statistic,
) -> Result<Series, SeriesError> {
    if series.granularity() != Granularity::Daily {
        return Err(SeriesError::NotDaily(series.granularity()));
    }
    let reduce = |chunk: &[f64]| {
        let sum: f64 = chunk.iter().sum();
        match statistic {
            Statistic::Sum => sum,
            Statistic::Mean => sum / chunk.len() as f64,
        }
    };
    let values = series.values();
    let (origin, out) = match granularity {
        Granularity::Daily => return Ok(series.clone()),
        Granularity::Weekly => (
            series.origin(),
            values.chunks_exact(7).map(reduce).collect::<Vec<_>>(),
        ),
        Granularity::Monthly => {
            let o = series.origin();
            let mut month = NaiveDate::from_ymd_opt(o.year(), o.month(), 1).expect("valid month");
            if month < o {
                month = month + Months::new(1);
            }
            let first = month;
            let last_day = series.last_day();
            let mut out = Vec::new();
            loop {
                let next = month + Months::new(1);
                if next - Days::new(1) > last_day {
                    break;
                }
                let lo = (month - o).num_days() as usize;
                let hi = (next - o).num_days() as usize;
                out.push(reduce(&values[lo..hi]));
                month = next;
            }
            (first, out)
        }
    };
    if out.is_empty() {
        return Err(SeriesError::EmptyAfterBucketing(granularity));
    }
    Series::with_granularity(origin, granularity, out, series.label())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        parse_date(s).unwrap()
    }

    fn raw(label: &str, pts: &[(&str, f64)]) -> RawSeries {
        RawSeries::new(label, pts.iter().map(|(s, v)| (d(s), *v)).collect()).unwrap()
    }

    #[test]
    fn weekly_mean_of_constant() {
        let s = Series::daily(d("2016-01-01"), vec![10.0; 14], "x").unwrap();
        let w = aggregate(&s, Granularity::Weekly, Statistic::Mean).unwrap();
        assert_eq!(w.values(), &[10.0, 10.0]);
        assert_eq!(w.date_at(1), d("2016-01-08"));
    }

    #[test]
    fn weekly_drops_partial_bucket() {
        let s = Series::daily(d("2016-01-01"), vec![10.0; 10], "x").unwrap();
        let w = aggregate(&s, Granularity::Weekly, Statistic::Mean).unwrap();
        assert_eq!(w.values(), &[10.0]);
    }

    #[test]
    fn monthly_mean_of_february() {
        let vals: Vec<f64> = (1..=28).map(f64::from).collect();
        let oracle = vals.iter().sum::<f64>() / 28.0;
        let s = Series::daily(d("2015-02-01"), vals, "x").unwrap();
        let m = aggregate(&s, Granularity::Monthly, Statistic::Mean).unwrap();
        assert_eq!(m.values(), &[oracle]);
        assert_eq!(oracle, 14.5);
        assert_eq!(m.origin(), d("2015-02-01"));
    }

    #[test]
    fn monthly_skips_leading_partial_month() {
        let s = Series::daily(d("2015-01-15"), vec![1.0; 60], "x").unwrap();
        let m = aggregate(&s, Granularity::Monthly, Statistic::Sum).unwrap();
        assert_eq!(m.origin(), d("2015-02-01"));
        assert_eq!(m.values(), &[28.0]);
    }

    #[test]
    fn too_short_to_bucket() {
        let s = Series::daily(d("2016-01-01"), vec![1.0; 6], "x").unwrap();
        assert!(matches!(
            aggregate(&s, Granularity::Weekly, Statistic::Mean),
            Err(SeriesError::EmptyAfterBucketing(Granularity::Weekly))
        ));
    }

    #[test]
    fn parses_simple_csv() {
        let text = "date,value\n2016-01-01,5.0\n2016-01-02,6.0";
        let r = parse_series_csv(text.as_bytes(), &ColumnSpec::default(), "d").unwrap();
        let s = r.into_series(0).unwrap();
        assert_eq!(s.origin(), d("2016-01-01"));
        assert_eq!(s.values(), &[5.0, 6.0]);
    }

    #[test]
    fn csv_rows_are_sorted() {
        let text = "date,value\n2016-01-02,6\n2016-01-01,5\n";
        let r = parse_series_csv(text.as_bytes(), &ColumnSpec::default(), "d").unwrap();
        assert_eq!(r.first_date(), d("2016-01-01"));
    }

    #[test]
    fn csv_duplicate_date() {
        let text = "date,value\n2016-01-01,5\n2016-01-01,6\n";
        let err = parse_series_csv(text.as_bytes(), &ColumnSpec::default(), "d").unwrap_err();
        assert!(matches!(err, SeriesError::DuplicateDate(x) if x == d("2016-01-01")));
    }

    #[test]
    fn csv_malformed_row_reports_line() {
        let text = "date,value\n2016-01-01,abc\n";
        let err = parse_series_csv(text.as_bytes(), &ColumnSpec::default(), "d").unwrap_err();
        assert!(matches!(err, SeriesError::MalformedRow { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn csv_non_finite() {
        let text = "date,value\n2016-01-01,NaN\n";
        let err = parse_series_csv(text.as_bytes(), &ColumnSpec::default(), "d").unwrap_err();
        assert!(matches!(err, SeriesError::NonFiniteValue(_)));
    }

    #[test]
    fn csv_missing_column() {
        let text = "day,value\n2016-01-01,1\n";
        let err = parse_series_csv(text.as_bytes(), &ColumnSpec::default(), "d").unwrap_err();
        assert!(matches!(err, SeriesError::MissingColumn(c) if c == "date"));
    }

    #[test]
    fn csv_comment_lines_skipped() {
        let text = "# produced by a tool\ndate,value\n2016-01-01,1\n";
        let r = parse_series_csv(text.as_bytes(), &ColumnSpec::default(), "d").unwrap();
        assert_eq!(r.points().len(), 1);
    }

    #[test]
    fn align_restricts_to_intersection() {
        let dem: Vec<_> = (1..=10).map(|i| (format!("2016-01-{i:02}"), i as f64)).collect();
        let tmp: Vec<_> = (3..=12).map(|i| (format!("2016-01-{i:02}"), -(i as f64))).collect();
        let dem = raw("d", &dem.iter().map(|(a, b)| (a.as_str(), *b)).collect::<Vec<_>>());
        let tmp = raw("t", &tmp.iter().map(|(a, b)| (a.as_str(), *b)).collect::<Vec<_>>());
        let (a, b) = align_and_fill(&dem, &tmp, 3).unwrap();
        assert_eq!(a.origin(), d("2016-01-03"));
        assert_eq!(a.last_date(), d("2016-01-10"));
        assert_eq!(a.len(), b.len());
        assert_eq!(a.origin(), b.origin());
    }

    #[test]
    fn align_interpolates_single_gap() {
        let dem = raw(
            "d",
            &[("2016-01-03", 1.0), ("2016-01-04", 4.0), ("2016-01-06", 8.0)],
        );
        let tmp = raw(
            "t",
            &[("2016-01-03", 1.0), ("2016-01-04", 1.0), ("2016-01-05", 1.0), ("2016-01-06", 1.0)],
        );
        let (a, _) = align_and_fill(&dem, &tmp, 2).unwrap();
        assert_eq!(a.value_on(d("2016-01-05")), Some(6.0));
    }

    #[test]
    fn align_rejects_long_gap() {
        let dem = raw("d", &[("2016-01-04", 4.0), ("2016-01-10", 8.0)]);
        let days: Vec<String> = (1..=12).map(|k| format!("2016-01-{k:02}")).collect();
        let tmp = raw("t", &days.iter().map(|s| (s.as_str(), 1.0)).collect::<Vec<_>>());
        let err = align_and_fill(&dem, &tmp, 2).unwrap_err();
        assert!(matches!(
            err,
            SeriesError::GapTooLarge { date, length: 5 } if date == d("2016-01-05")
        ));
    }

    #[test]
    fn align_without_overlap() {
        let dem = raw("d", &[("2016-01-01", 1.0)]);
        let tmp = raw("t", &[("2016-02-01", 1.0)]);
        assert!(matches!(align_and_fill(&dem, &tmp, 3), Err(SeriesError::NoOverlap)));
    }

    #[test]
    fn monthly_offsets() {
        let o = d("2015-01-01");
        let g = Granularity::Monthly;
        assert_eq!(g.offset(o, d("2016-03-01")), Some(14));
        assert_eq!(g.offset(o, d("2016-03-02")), None);
        assert_eq!(g.first_index_on_or_after(o, d("2015-02-02")), 2);
        assert_eq!(g.last_index_on_or_before(o, d("2015-02-28")), 1);
        assert_eq!(g.date_at(o, -1), d("2014-12-01"));
    }

    #[test]
    fn weekly_offsets() {
        let o = d("2015-01-01");
        let g = Granularity::Weekly;
        assert_eq!(g.offset(o, d("2015-01-15")), Some(2));
        assert_eq!(g.offset(o, d("2015-01-16")), None);
        assert_eq!(g.first_index_on_or_after(o, d("2015-01-09")), 2);
        assert_eq!(g.last_index_on_or_before(o, d("2015-01-14")), 1);
    }

    #[test]
    fn window_selects_dates() {
        let s = Series::daily(d("2016-01-01"), (0..10).map(f64::from).collect(), "x").unwrap();
        let w = s
            .window(DateRange::new(d("2016-01-03"), d("2016-01-05")).unwrap())
            .unwrap();
        assert_eq!(w.values(), &[2.0, 3.0, 4.0]);
    }

    #[test]
    fn negative_demand_detected() {
        let s = Series::daily(d("2016-01-01"), vec![1.0, -2.0], "x").unwrap();
        assert!(matches!(
            s.ensure_nonnegative(),
            Err(SeriesError::NegativeDemand { .. })
        ));
    }

    #[test]
    fn date_range_parse() {
        let r: DateRange = "2017-06-24..2017-07-09".parse().unwrap();
        assert_eq!(r.num_days(), 16);
        assert!("2017-07-09..2017-06-24".parse::<DateRange>().is_err());
    }
}
