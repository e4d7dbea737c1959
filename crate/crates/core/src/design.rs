//! Regressor matrix for the modulated Fourier-series demand model.
//!
//! Columns, in order: trend `[const, t]`, annual harmonic pairs
//! `sinA{n}, cosA{n}`, weekly harmonic pairs `sinW{n}, cosW{n}`, modulated
//! annual pairs `t*sinA{n}, t*cosA{n}`, the heating deviation `Td`, and the
//! previous-step demand `lag1`. Row `r` of a matrix built with offset
//! `t_offset` uses the absolute step index `t = t_offset + r`, so matrices
//! built for adjacent windows continue the same phase.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::series::Granularity;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DesignError {
    #[error("regressor spec violation: {0}")]
    SpecViolation(String),
    #[error("{what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("split row {split} outside [{min}, {max})")]
    SplitOutOfRange { split: usize, min: usize, max: usize },
    #[error("design matrix has no rows")]
    NoRows,
}

/// Harmonic orders and regressor switches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSpec {
    /// Annual sin/cos pairs.
    pub annual_harmonics: usize,
    /// Weekly sin/cos pairs; only meaningful for daily data.
    pub weekly_harmonics: usize,
    /// Annual pairs multiplied by `t`.
    pub modulated_harmonics: usize,
    pub include_trend: bool,
    pub include_temperature: bool,
    pub include_lag: bool,
    /// Comfortable temperature in °C below which heating demand starts.
    pub comfort_temp: f64,
    /// Length of the annual cycle in steps (364 for daily data).
    pub annual_period: f64,
    /// Length of the weekly cycle in steps.
    pub weekly_period: f64,
}

impl Default for RegressorSpec {
    fn default() -> Self {
        Self {
            annual_harmonics: 12,
            weekly_harmonics: 2,
            modulated_harmonics: 5,
            include_trend: true,
            include_temperature: true,
            include_lag: false,
            comfort_temp: 18.0,
            annual_period: 364.0,
            weekly_period: 7.0,
        }
    }
}

impl RegressorSpec {
    /// Defaults for a sampling granularity. Aggregated data drops the weekly
    /// harmonics and measures the annual cycle in buckets (52 weeks, 12 months).
    pub fn for_granularity(granularity: Granularity) -> Self {
        let base = Self::default();
        match granularity {
            Granularity::Daily => base,
            Granularity::Weekly => Self {
                weekly_harmonics: 0,
                annual_period: 52.0,
                ..base
            },
            Granularity::Monthly => Self {
                annual_harmonics: 4,
                weekly_harmonics: 0,
                modulated_harmonics: 2,
                annual_period: 12.0,
                ..base
            },
        }
    }

    /// Checks the sampling bound (no harmonic shorter than two steps) and
    /// that every modulated pair has a matching annual pair.
    pub fn validate(&self) -> Result<(), DesignError> {
        let bad = |m: String| Err(DesignError::SpecViolation(m));
        if !(self.annual_period > 0.0 && self.weekly_period > 0.0) {
            return bad("periods must be positive".into());
        }
        if !self.comfort_temp.is_finite() {
            return bad("comfort temperature must be finite".into());
        }
        if self.annual_harmonics > 0 && self.annual_period / (self.annual_harmonics as f64) < 2.0 {
            return bad(format!(
                "annual_harmonics = {} gives a period of {:.3} steps, below the 2-step sampling limit (max {})",
                self.annual_harmonics,
                self.annual_period / self.annual_harmonics as f64,
                (self.annual_period / 2.0).floor()
            ));
        }
        if self.weekly_harmonics > 0 && self.weekly_period / (self.weekly_harmonics as f64) < 2.0 {
            return bad(format!(
                "weekly_harmonics = {} gives a period of {:.3} days, below the 2-day sampling limit (max {})",
                self.weekly_harmonics,
                self.weekly_period / self.weekly_harmonics as f64,
                (self.weekly_period / 2.0).floor()
            ));
        }
        if self.modulated_harmonics > self.annual_harmonics {
            return bad(format!(
                "modulated_harmonics = {} exceeds annual_harmonics = {}",
                self.modulated_harmonics, self.annual_harmonics
            ));
        }
        Ok(())
    }

    pub fn column_count(&self) -> usize {
        2 * usize::from(self.include_trend)
            + 2 * self.annual_harmonics
            + 2 * self.weekly_harmonics
            + 2 * self.modulated_harmonics
            + usize::from(self.include_temperature)
            + usize::from(self.include_lag)
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.column_count());
        if self.include_trend {
            out.push("const".to_string());
            out.push("t".to_string());
        }
        for n in 1..=self.annual_harmonics {
            out.push(format!("sinA{n}"));
            out.push(format!("cosA{n}"));
        }
        for n in 1..=self.weekly_harmonics {
            out.push(format!("sinW{n}"));
            out.push(format!("cosW{n}"));
        }
        for n in 1..=self.modulated_harmonics {
            out.push(format!("t*sinA{n}"));
            out.push(format!("t*cosA{n}"));
        }
        if self.include_temperature {
            out.push("Td".to_string());
        }
        if self.include_lag {
            out.push("lag1".to_string());
        }
        out
    }
}

/// Heating deviation `max(comfort − T, 0)`.
pub fn temperature_deviation(temperature: f64, comfort: f64) -> f64 {
    (comfort - temperature).max(0.0)
}

/// Column-major regressor matrix with labeled columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n_rows: usize,
    labels: Vec<String>,
    data: Vec<f64>,
    first_valid_row: usize,
    t_offset: i64,
}

impl DesignMatrix {
    /// Assembles a matrix from explicit columns (all of equal length).
    pub fn from_columns(labels: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self, DesignError> {
        if labels.len() != columns.len() {
            return Err(DesignError::LengthMismatch {
                what: "labels",
                expected: columns.len(),
                found: labels.len(),
            });
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        if n_rows == 0 {
            return Err(DesignError::NoRows);
        }
        if let Some(c) = columns.iter().find(|c| c.len() != n_rows) {
            return Err(DesignError::LengthMismatch {
                what: "column",
                expected: n_rows,
                found: c.len(),
            });
        }
        Ok(Self {
            n_rows,
            labels,
            data: columns.concat(),
            first_valid_row: 0,
            t_offset: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// First row with every regressor defined (1 when the lag column is present).
    pub fn first_valid_row(&self) -> usize {
        self.first_valid_row
    }

    /// Absolute step index of row 0.
    pub fn t_offset(&self) -> i64 {
        self.t_offset
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn column_by_label(&self, label: &str) -> Option<&[f64]> {
        self.labels.iter().position(|l| l == label).map(|j| self.column(j))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.n_rows + row]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.n_cols()).map(|c| self.get(row, c)).collect()
    }

    /// Copies rows `[start, end)` into a new matrix whose first row is valid.
    pub fn select_rows(&self, start: usize, end: usize) -> DesignMatrix {
        assert!(start <= end && end <= self.n_rows, "row range out of bounds");
        let n = end - start;
        let mut data = Vec::with_capacity(n * self.n_cols());
        for j in 0..self.n_cols() {
            data.extend_from_slice(&self.column(j)[start..end]);
        }
        DesignMatrix {
            n_rows: n,
            labels: self.labels.clone(),
            data,
            first_valid_row: self.first_valid_row.saturating_sub(start),
            t_offset: self.t_offset + start as i64,
        }
    }
}

// Phase in [0, 1) of harmonic `n` at step `t`, reduced exactly for integer
// steps so columns repeat bit-for-bit across periods.
fn phase(n: usize, t: i64, period: f64) -> f64 {
    let x = (n as f64) * (t as f64);
    x.rem_euclid(period) / period
}

/// Builds the regressor matrix for `n_rows` consecutive steps starting at
/// absolute index `t_offset`.
///
/// `temperature` must have `n_rows` entries when the spec includes the
/// temperature regressor. `demand` feeds the lag column: row `r` takes
/// `demand[r - 1]`, so row 0 has no lag and `first_valid_row` becomes 1. It
/// may have `n_rows` entries or `n_rows - 1` (its last entry is never read).
pub fn build_matrix(
    spec: &RegressorSpec,
    n_rows: usize,
    t_offset: i64,
    temperature: Option<&[f64]>,
    demand: Option<&[f64]>,
) -> Result<DesignMatrix, DesignError> {
    spec.validate()?;
    if n_rows == 0 {
        return Err(DesignError::NoRows);
    }
    let temperature = match (spec.include_temperature, temperature) {
        (true, Some(t)) if t.len() == n_rows => Some(t),
        (true, t) => {
            return Err(DesignError::LengthMismatch {
                what: "temperature",
                expected: n_rows,
                found: t.map_or(0, <[f64]>::len),
            })
        }
        (false, _) => None,
    };
    let demand = match (spec.include_lag, demand) {
        (true, Some(d)) if d.len() == n_rows || d.len() + 1 == n_rows => Some(d),
        (true, d) => {
            return Err(DesignError::LengthMismatch {
                what: "lagged demand",
                expected: n_rows,
                found: d.map_or(0, <[f64]>::len),
            })
        }
        (false, _) => None,
    };

    let ts: Vec<i64> = (0..n_rows as i64).map(|r| t_offset + r).collect();
    let mut data = Vec::with_capacity(n_rows * spec.column_count());
    let mut push_col = |f: &dyn Fn(i64) -> f64| data.extend(ts.iter().map(|&t| f(t)));

    if spec.include_trend {
        push_col(&|_| 1.0);
        push_col(&|t| t as f64);
    }
    let ap = spec.annual_period;
    for n in 1..=spec.annual_harmonics {
        push_col(&|t| (TAU * phase(n, t, ap)).sin());
        push_col(&|t| (TAU * phase(n, t, ap)).cos());
    }
    let wp = spec.weekly_period;
    for n in 1..=spec.weekly_harmonics {
        push_col(&|t| (TAU * phase(n, t, wp)).sin());
        push_col(&|t| (TAU * phase(n, t, wp)).cos());
    }
    for n in 1..=spec.modulated_harmonics {
        push_col(&|t| t as f64 * (TAU * phase(n, t, ap)).sin());
        push_col(&|t| t as f64 * (TAU * phase(n, t, ap)).cos());
    }
    if let Some(temp) = temperature {
        data.extend(temp.iter().map(|&x| temperature_deviation(x, spec.comfort_temp)));
    }
    let mut first_valid_row = 0;
    if let Some(d) = demand {
        data.push(f64::NAN);
        data.extend_from_slice(&d[..n_rows - 1]);
        first_valid_row = 1;
    }

    Ok(DesignMatrix {
        n_rows,
        labels: spec.labels(),
        data,
        first_valid_row,
        t_offset,
    })
}

/// Past/future partition of a design matrix and its target.
#[derive(Debug, Clone)]
pub struct Split {
    pub past: DesignMatrix,
    pub past_target: Vec<f64>,
    pub future: DesignMatrix,
    pub future_target: Vec<f64>,
}

/// Rows `[first_valid_row, split)` become the past, `[split, n_rows)` the future.
pub fn split_matrix(f: &DesignMatrix, target: &[f64], split: usize) -> Result<Split, DesignError> {
    if target.len() != f.n_rows() {
        return Err(DesignError::LengthMismatch {
            what: "target",
            expected: f.n_rows(),
            found: target.len(),
        });
    }
    if split < f.first_valid_row() || split >= f.n_rows() {
        return Err(DesignError::SplitOutOfRange {
            split,
            min: f.first_valid_row(),
            max: f.n_rows(),
        });
    }
    let lo = f.first_valid_row();
    Ok(Split {
        past: f.select_rows(lo, split),
        past_target: target[lo..split].to_vec(),
        future: f.select_rows(split, f.n_rows()),
        future_target: target[split..].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_examples() {
        assert_eq!(temperature_deviation(10.0, 18.0), 8.0);
        assert_eq!(temperature_deviation(18.0, 18.0), 0.0);
        assert_eq!(temperature_deviation(25.0, 18.0), 0.0);
    }

    #[test]
    fn default_spec_has_41_columns() {
        let spec = RegressorSpec::default();
        assert_eq!(spec.column_count(), 41);
        let temps = vec![10.0; 30];
        let f = build_matrix(&spec, 30, 0, Some(&temps), None).unwrap();
        assert_eq!(f.n_cols(), 41);
        assert_eq!(f.labels()[0], "const");
        assert_eq!(f.labels()[2], "sinA1");
        assert_eq!(f.labels()[26], "sinW1");
        assert_eq!(f.labels()[30], "t*sinA1");
        assert_eq!(f.labels()[40], "Td");
    }

    #[test]
    fn quarter_and_full_period_values() {
        let spec = RegressorSpec {
            include_temperature: false,
            ..RegressorSpec::default()
        };
        let f = build_matrix(&spec, 100, 0, None, None).unwrap();
        assert!((f.column_by_label("sinA1").unwrap()[91] - 1.0).abs() < 1e-15);
        assert!(f.column_by_label("sinW1").unwrap()[7].abs() < 1e-15);
        assert_eq!(f.column_by_label("t").unwrap()[42], 42.0);
        let ts = f.column_by_label("t*cosA1").unwrap();
        assert!((ts[10] - 10.0 * (TAU * 10.0 / 364.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn sampling_bounds() {
        let mut spec = RegressorSpec { weekly_harmonics: 4, ..RegressorSpec::default() };
        assert!(matches!(spec.validate(), Err(DesignError::SpecViolation(_))));
        spec.weekly_harmonics = 3;
        assert!(spec.validate().is_ok());
        spec.annual_harmonics = 183;
        assert!(spec.validate().is_err());
        spec.annual_harmonics = 182;
        assert!(spec.validate().is_ok());
        spec.modulated_harmonics = 183;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn modulation_cannot_exceed_annual() {
        let spec = RegressorSpec {
            annual_harmonics: 3,
            modulated_harmonics: 4,
            ..RegressorSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn temperature_length_checked() {
        let spec = RegressorSpec::default();
        let err = build_matrix(&spec, 10, 0, Some(&[1.0; 9]), None).unwrap_err();
        assert!(matches!(err, DesignError::LengthMismatch { what: "temperature", .. }));
        assert!(build_matrix(&spec, 10, 0, None, None).is_err());
    }

    #[test]
    fn lag_column_shifts_demand() {
        let spec = RegressorSpec {
            include_temperature: false,
            include_lag: true,
            ..RegressorSpec::default()
        };
        let demand: Vec<f64> = (0..5).map(|x| x as f64 * 10.0).collect();
        let f = build_matrix(&spec, 5, 100, None, Some(&demand)).unwrap();
        assert_eq!(f.first_valid_row(), 1);
        let lag = f.column_by_label("lag1").unwrap();
        assert!(lag[0].is_nan());
        assert_eq!(&lag[1..], &[0.0, 10.0, 20.0, 30.0]);
        // The trailing demand value is optional.
        let g = build_matrix(&spec, 5, 100, None, Some(&demand[..4])).unwrap();
        assert_eq!(g.column_by_label("lag1").unwrap()[1..], lag[1..]);
    }

    #[test]
    fn split_sizes() {
        let spec = RegressorSpec {
            include_temperature: false,
            ..RegressorSpec::default()
        };
        let f = build_matrix(&spec, 100, 0, None, None).unwrap();
        let s = vec![0.0; 100];
        let sp = split_matrix(&f, &s, 70).unwrap();
        assert_eq!(sp.past.n_rows(), 70);
        assert_eq!(sp.future.n_rows(), 30);
        assert_eq!(sp.future.t_offset(), 70);
        let sp = split_matrix(&f, &s, 99).unwrap();
        assert_eq!(sp.future.n_rows(), 1);
        assert!(split_matrix(&f, &s, 100).is_err());
    }

    #[test]
    fn split_respects_lag_rows() {
        let spec = RegressorSpec {
            include_temperature: false,
            include_lag: true,
            ..RegressorSpec::default()
        };
        let s: Vec<f64> = (0..20).map(f64::from).collect();
        let f = build_matrix(&spec, 20, 0, None, Some(&s)).unwrap();
        assert!(matches!(
            split_matrix(&f, &s, 0),
            Err(DesignError::SplitOutOfRange { split: 0, min: 1, .. })
        ));
        let sp = split_matrix(&f, &s, 10).unwrap();
        assert_eq!(sp.past.n_rows(), 9);
        assert_eq!(sp.past.first_valid_row(), 0);
        assert_eq!(sp.past_target[0], 1.0);
    }
}
