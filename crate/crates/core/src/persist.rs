//! Fitted-model files: a `# key = value` header block followed by the
//! labeled coefficient CSV. Floats are written in shortest round-trip form,
//! so a reloaded model predicts bit-identically.

use std::io::{BufRead, Write};

use crate::design::RegressorSpec;
use crate::models::{FittedModel, ModelKind};
use crate::ols::{Coefficients, OlsError};
use crate::series::{parse_date, DateRange, Granularity};

const MAGIC: &str = "fourcast model v1";

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("not a model file (missing '# {MAGIC}' line)")]
    NotAModel,
    #[error("missing header key '{0}'")]
    MissingKey(&'static str),
    #[error("bad value for '{key}': {value}")]
    BadValue { key: String, value: String },
    #[error("coefficient labels do not match the recorded spec")]
    SpecMismatch,
    #[error(transparent)]
    Coefficients(#[from] OlsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_model<W: Write>(
    model: &FittedModel,
    mut w: W,
    invocation: Option<&str>,
) -> std::io::Result<()> {
    writeln!(w, "# {MAGIC}")?;
    if let Some(inv) = invocation {
        writeln!(w, "# invocation: {inv}")?;
    }
    let s = &model.spec;
    let kv: [(&str, String); 14] = [
        ("kind", model.kind.to_string()),
        ("granularity", model.granularity.to_string()),
        ("origin", model.origin.to_string()),
        ("train_start", model.train_range.start.to_string()),
        ("train_end", model.train_range.end.to_string()),
        ("annual_harmonics", s.annual_harmonics.to_string()),
        ("weekly_harmonics", s.weekly_harmonics.to_string()),
        ("modulated_harmonics", s.modulated_harmonics.to_string()),
        ("include_trend", s.include_trend.to_string()),
        ("include_temperature", s.include_temperature.to_string()),
        ("include_lag", s.include_lag.to_string()),
        ("comfort_temp", s.comfort_temp.to_string()),
        ("annual_period", s.annual_period.to_string()),
        ("weekly_period", s.weekly_period.to_string()),
    ];
    for (k, v) in kv {
        writeln!(w, "# {k} = {v}")?;
    }
    writeln!(w, "# condition_estimate = {}", model.coefficients.condition_estimate)?;
    model.coefficients.write_csv(w)
}

pub fn read_model<R: BufRead>(r: R) -> Result<FittedModel, PersistError> {
    let text = std::io::read_to_string(r)?;
    let mut header = std::collections::HashMap::new();
    let mut magic = false;
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix('#') else {
            continue;
        };
        let rest = rest.trim();
        if rest == MAGIC {
            magic = true;
        } else if let Some((k, v)) = rest.split_once(" = ") {
            header.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    if !magic {
        return Err(PersistError::NotAModel);
    }

    fn get<T: std::str::FromStr>(
        h: &std::collections::HashMap<String, String>,
        key: &'static str,
    ) -> Result<T, PersistError> {
        let v = h.get(key).ok_or(PersistError::MissingKey(key))?;
        v.parse().map_err(|_| PersistError::BadValue {
            key: key.to_string(),
            value: v.clone(),
        })
    }
    let date = |key: &'static str| -> Result<_, PersistError> {
        let v: String = get(&header, key)?;
        parse_date(&v).map_err(|_| PersistError::BadValue {
            key: key.to_string(),
            value: v,
        })
    };

    let kind: ModelKind = get(&header, "kind")?;
    let granularity: Granularity = get(&header, "granularity")?;
    let spec = RegressorSpec {
        annual_harmonics: get(&header, "annual_harmonics")?,
        weekly_harmonics: get(&header, "weekly_harmonics")?,
        modulated_harmonics: get(&header, "modulated_harmonics")?,
        include_trend: get(&header, "include_trend")?,
        include_temperature: get(&header, "include_temperature")?,
        include_lag: get(&header, "include_lag")?,
        comfort_temp: get(&header, "comfort_temp")?,
        annual_period: get(&header, "annual_period")?,
        weekly_period: get(&header, "weekly_period")?,
    };
    let train_range = DateRange::new(date("train_start")?, date("train_end")?).ok_or_else(|| {
        PersistError::BadValue {
            key: "train_end".into(),
            value: "before train_start".into(),
        }
    })?;
    let mut coefficients = Coefficients::read_csv(text.as_bytes())?;
    coefficients.condition_estimate = get(&header, "condition_estimate").unwrap_or(f64::NAN);
    if coefficients.labels != spec.labels() {
        return Err(PersistError::SpecMismatch);
    }
    Ok(FittedModel {
        kind,
        spec,
        coefficients,
        granularity,
        origin: date("origin")?,
        train_range,
    })
}
