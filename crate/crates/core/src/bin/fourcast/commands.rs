use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use chrono::{Datelike, Days, NaiveDate};
use fourcast::ar::{ar_rollover, write_coefficient_table};
use fourcast::calendar::CalendarConfig;
use fourcast::models::{forecast_feedback, forecast_horizon, in_sample, rollover_evaluate};
use fourcast::persist::{read_model, write_model};
use fourcast::segregation::{segregation_report, write_ratio_table, Ratio};
use fourcast::series::{
    aggregate, align_and_fill, read_series_csv, ColumnSpec, RawSeries, Statistic,
};
use fourcast::synth::{generate, synthetic_holidays, GeneratorSpec};
use fourcast::{fit_model, DateRange, Granularity, ModelKind, Series};
use serde_json::json;

use crate::{
    CsvArgs, EvaluateArgs, FitArgs, ForecastArgs, IngestArgs, SegregateArgs, SynthArgs,
};

/// The command line as typed, for output headers.
fn invocation() -> String {
    std::env::args()
        .map(|a| {
            if a.is_empty() || a.contains(|c: char| c.is_whitespace() || c == '\'' || c == '"') {
                format!("'{}'", a.replace('\'', r"'\''"))
            } else {
                a
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn header() -> String {
    format!("invocation: {}", invocation())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_json(dir: &Path, name: &str, mut value: serde_json::Value) -> Result<()> {
    if let Some(obj) = value.as_object_mut() {
        obj.insert("invocation".into(), json!(invocation()));
    }
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, &value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn columns(csv: &CsvArgs) -> ColumnSpec {
    ColumnSpec {
        date: csv.date_column.clone(),
        value: csv.value_column.clone(),
    }
}

fn read_raw(path: &Path, what: &str, csv: &CsvArgs) -> Result<RawSeries> {
    read_series_csv(path, &columns(csv))
        .with_context(|| format!("cannot read {what} file {}", path.display()))
}

/// Buckets a daily series, with weekly blocks anchored on `anchor`.
fn to_granularity(s: Series, g: Granularity, stat: Statistic, anchor: NaiveDate) -> Result<Series> {
    if g == Granularity::Daily {
        return Ok(s);
    }
    let s = if g == Granularity::Weekly {
        let skip = (7 - (s.origin() - anchor).num_days().rem_euclid(7)) % 7;
        let start = s.origin() + Days::new(skip as u64);
        let range = DateRange::new(start, s.last_date())
            .ok_or_else(|| anyhow!("{} is shorter than one week", s.label()))?;
        s.window(range)?
    } else {
        s
    };
    let label = s.label().to_string();
    aggregate(&s, g, stat).with_context(|| format!("aggregating {label} to {g}"))
}

struct Inputs {
    demand: Series,
    temperature: Option<Series>,
}

/// Reads demand (and temperature, aligned to a common range), fills short
/// gaps, and converts to `g`. Temperature is averaged per bucket.
fn load_inputs(demand: &Path, temperature: Option<&PathBuf>, g: Granularity, csv: &CsvArgs) -> Result<Inputs> {
    let raw_d = read_raw(demand, "demand", csv)?;
    let (d, t) = match temperature {
        Some(tp) => {
            let raw_t = read_raw(tp, "temperature", csv)?;
            let (d, t) = align_and_fill(&raw_d, &raw_t, csv.max_gap).context("aligning demand and temperature")?;
            (d, Some(t))
        }
        None => (raw_d.into_series(csv.max_gap).context("filling demand gaps")?, None),
    };
    let anchor = d.origin();
    Ok(Inputs {
        demand: to_granularity(d, g, csv.aggregate, anchor)?,
        temperature: t.map(|t| to_granularity(t, g, Statistic::Mean, anchor)).transpose()?,
    })
}

fn require_temperature(kind: ModelKind, temperature: Option<&PathBuf>) -> Result<()> {
    if kind.needs_temperature() && temperature.is_none() {
        bail!("kind {kind} needs --temperature");
    }
    Ok(())
}

pub fn ingest(a: IngestArgs) -> Result<()> {
    let raw = read_raw(&a.demand, "demand", &a.csv)?;
    let gaps = raw.gaps();
    let inputs = load_inputs(&a.demand, a.temperature.as_ref(), a.granularity, &a.csv)?;
    out_dir(&a.out)?;
    let h = header();
    inputs.demand.write_csv(create(&a.out, "demand.csv")?, Some(&h))?;
    if let Some(t) = &inputs.temperature {
        t.write_csv(create(&a.out, "temperature.csv")?, Some(&h))?;
    }
    let d = &inputs.demand;
    write_json(
        &a.out,
        "ingest.json",
        json!({
            "granularity": d.granularity(),
            "start": d.origin(),
            "end": d.last_day(),
            "samples": d.len(),
            "demand_gaps": gaps.iter().map(|g| json!({"start": g.start, "length": g.length})).collect::<Vec<_>>(),
        }),
    )?;
    println!("{} {} samples from {} to {}", d.len(), d.granularity(), d.origin(), d.last_day());
    Ok(())
}

pub fn fit(a: FitArgs) -> Result<()> {
    let spec = a.spec.build(a.kind, a.granularity)?;
    require_temperature(a.kind, a.temperature.as_ref())?;
    let inputs = load_inputs(&a.demand, a.temperature.as_ref(), a.granularity, &a.csv)?;
    let temp = inputs.temperature.as_ref().filter(|_| a.kind.needs_temperature());
    let model = fit_model(a.kind, &inputs.demand, temp, &spec, a.train_end)?;
    let fitted = in_sample(&model, &inputs.demand, temp)?;

    out_dir(&a.out)?;
    let h = header();
    let mut w = create(&a.out, "model.csv")?;
    write_model(&model, &mut w, Some(&invocation()))?;
    w.flush()?;
    fitted.write_csv(create(&a.out, "fitted.csv")?, Some(&h))?;
    write_json(
        &a.out,
        "fit.json",
        json!({
            "summary": fitted.summary(),
            "columns": model.coefficients.len(),
            "condition_estimate": model.coefficients.condition_estimate,
        }),
    )?;
    let s = fitted.summary();
    println!(
        "{} fitted on {} ({} coefficients), in-sample MAPE {:.3}%",
        a.kind,
        model.train_range,
        model.coefficients.len(),
        s.mape_percent.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn load_aligned(path: &Path, what: &str, g: Granularity, stat: Statistic, anchor: NaiveDate, csv: &CsvArgs) -> Result<Series> {
    let s = read_raw(path, what, csv)?
        .into_series(csv.max_gap)
        .with_context(|| format!("filling gaps in {}", path.display()))?;
    to_granularity(s, g, stat, anchor)
}

pub fn forecast(a: ForecastArgs) -> Result<()> {
    let file = File::open(&a.model).with_context(|| format!("cannot read model file {}", a.model.display()))?;
    let model = read_model(BufReader::new(file)).with_context(|| format!("loading {}", a.model.display()))?;
    let horizon = DateRange::new(a.from, a.to).ok_or_else(|| anyhow!("--from {} is after --to {}", a.from, a.to))?;
    let g = model.granularity;
    let temp = match &a.temperature {
        Some(p) => Some(load_aligned(p, "temperature", g, Statistic::Mean, model.origin, &a.csv)?),
        None if model.kind.needs_temperature() => bail!("{} model needs --temperature", model.kind),
        None => None,
    };
    let demand = a
        .demand
        .as_ref()
        .map(|p| load_aligned(p, "demand", g, a.csv.aggregate, model.origin, &a.csv))
        .transpose()?;
    let result = if model.kind.uses_feedback() {
        let d = demand
            .as_ref()
            .ok_or_else(|| anyhow!("{} forecasts need --demand for the lagged values", model.kind))?;
        forecast_feedback(&model, horizon, temp.as_ref().expect("checked above"), d)?
    } else {
        let mut r = forecast_horizon(&model, horizon, temp.as_ref())?;
        if let Some(d) = &demand {
            r.attach_actuals(d)?;
        }
        r
    };
    out_dir(&a.out)?;
    result.write_csv(create(&a.out, "forecast.csv")?, Some(&header()))?;
    write_json(&a.out, "forecast.json", json!({ "summary": result.summary() }))?;
    println!("{} forecast steps written", result.predictions.len());
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

pub fn evaluate(a: EvaluateArgs) -> Result<()> {
    let spec = a.spec.build(a.kind, a.granularity)?;
    require_temperature(a.kind, a.temperature.as_ref())?;
    if a.ar_order == Some(0) {
        bail!("--ar-order must be at least 1");
    }
    let inputs = load_inputs(&a.demand, a.temperature.as_ref(), a.granularity, &a.csv)?;
    let temp = inputs.temperature.as_ref().filter(|_| a.kind.needs_temperature());
    let years: Vec<i32> = a.years.clone().collect();
    let results = rollover_evaluate(a.kind, &inputs.demand, temp, &spec, &years)?;
    let ar = a
        .ar_order
        .map(|p| ar_rollover(&inputs.demand, p, &years))
        .transpose()?;

    out_dir(&a.out)?;
    let h = header();
    let kind = a.kind.to_string();
    let mut table = create(&a.out, "evaluation.csv")?;
    writeln!(table, "# {h}")?;
    let mut cols = vec!["year".to_string(), format!("{kind}_mape"), format!("{kind}_rmse_pct")];
    if ar.is_some() {
        cols.extend(["ar_mape".to_string(), "ar_rmse_pct".to_string()]);
    }
    writeln!(table, "{}", cols.join(","))?;
    println!("{}", cols.join("\t"));
    let mut summaries = Vec::new();
    for (i, y) in results.iter().enumerate() {
        let m = y.forecast.metrics.expect("roll-over attaches metrics");
        let mut cells = vec![y.year.to_string(), fmt(m.mape_percent), fmt(m.rmse_percent)];
        let mut entry = json!({"year": y.year, kind.as_str(): y.forecast.summary()});
        if let Some(ar) = &ar {
            let am = ar[i].forecast.metrics.expect("ar roll-over attaches metrics");
            cells.extend([fmt(am.mape_percent), fmt(am.rmse_percent)]);
            entry["ar"] = json!(ar[i].forecast.summary());
        }
        writeln!(table, "{}", cells.join(","))?;
        println!("{}", cells.join("\t"));
        summaries.push(entry);
        y.forecast
            .write_csv(create(&a.out, &format!("forecast_{kind}_{}.csv", y.year))?, Some(&h))?;
    }
    table.flush()?;
    if let Some(ar) = &ar {
        for y in ar {
            y.forecast
                .write_csv(create(&a.out, &format!("forecast_ar_{}.csv", y.year))?, Some(&h))?;
        }
        let rows: Vec<_> = ar.iter().map(|y| (y.year, &y.model)).collect();
        let mut w = create(&a.out, "ar_coefficients.csv")?;
        write_coefficient_table(&rows, &mut w, Some(&h))?;
        w.flush()?;
    }
    write_json(&a.out, "evaluation.json", json!({ "years": summaries, "ar_order": a.ar_order }))?;
    Ok(())
}

fn summer_years(s: &Series, months: &std::ops::RangeInclusive<u32>) -> Vec<i32> {
    let mut years: Vec<i32> = s
        .dates()
        .filter(|d| months.contains(&d.month()))
        .map(|d| d.year())
        .collect();
    years.dedup();
    years
}

pub fn segregate(a: SegregateArgs) -> Result<()> {
    let cal = match &a.calendar {
        Some(p) => CalendarConfig::load(p).with_context(|| format!("cannot read calendar file {}", p.display()))?,
        None => CalendarConfig::default(),
    };
    if cal.holidays.is_empty() {
        log::warn!("no holidays configured; the holiday ratio will be empty");
    }
    let mut reports = Vec::new();
    for path in &a.demand {
        let s = read_raw(path, "demand", &a.csv)?
            .into_series(a.csv.max_gap)
            .with_context(|| format!("filling gaps in {}", path.display()))?;
        let years = match &a.years {
            Some(r) => r.clone().collect(),
            None => summer_years(&s, &a.summer_months),
        };
        if years.is_empty() {
            bail!(
                "{} has no data in summer months {}..{}",
                path.display(),
                a.summer_months.start(),
                a.summer_months.end()
            );
        }
        for y in years {
            let r = segregation_report(&s, &cal, y, &a.summer_months)
                .with_context(|| format!("{}: year {y}", path.display()))?;
            reports.push(r);
        }
    }
    out_dir(&a.out)?;
    let h = header();
    for (ratio, name) in [(Ratio::Holiday, "ratio_holiday.csv"), (Ratio::Weekend, "ratio_weekend.csv")] {
        let mut w = create(&a.out, name)?;
        write_ratio_table(&reports, ratio, &mut w, Some(&h))?;
        w.flush()?;
    }
    write_json(
        &a.out,
        "segregation.json",
        json!({ "summer_months": [a.summer_months.start(), a.summer_months.end()], "reports": reports }),
    )?;
    println!("label\tyear\tratio_holiday\tratio_weekend");
    for r in &reports {
        let f = |v: Option<f64>| v.map_or(String::from("-"), |x| format!("{x:.2}"));
        println!("{}\t{}\t{}\t{}", r.label, r.year, f(r.ratio_holiday), f(r.ratio_weekend));
    }
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let mut spec: GeneratorSpec = match &a.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read spec file {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => GeneratorSpec::default(),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    if spec.noise_sigma.is_nan() || spec.noise_sigma < 0.0 {
        bail!("noise_sigma must be non-negative");
    }
    if spec.residual_ar_phi.is_nan() || spec.residual_ar_phi.abs() >= 1.0 {
        bail!("residual_ar_phi must lie in (-1, 1)");
    }
    let (y1, y2) = (*a.years.start(), *a.years.end());
    let cal = match &a.calendar {
        Some(p) => CalendarConfig::load(p).with_context(|| format!("cannot read calendar file {}", p.display()))?,
        None => CalendarConfig::default().with_holidays(synthetic_holidays(y1, y2)),
    };
    let origin = NaiveDate::from_ymd_opt(y1, 1, 1).ok_or_else(|| anyhow!("year {y1} out of range"))?;
    let end = NaiveDate::from_ymd_opt(y2, 12, 31).ok_or_else(|| anyhow!("year {y2} out of range"))?;
    let n_days = (end - origin).num_days() as usize + 1;
    let data = generate(&spec, &cal, n_days, origin);

    out_dir(&a.out)?;
    let h = format!("{} (seed {})", header(), spec.seed);
    data.demand.write_csv(create(&a.out, "demand.csv")?, Some(&h))?;
    data.temperature.write_csv(create(&a.out, "temperature.csv")?, Some(&h))?;
    let mut w = create(&a.out, "calendar.toml")?;
    writeln!(w, "# {h}")?;
    w.write_all(cal.to_toml_string().as_bytes())?;
    w.flush()?;
    write_json(&a.out, "truth.json", serde_json::to_value(data.sidecar())?)?;
    if data.clipped_days > 0 {
        eprintln!("warning: demand clipped at zero on {} day(s)", data.clipped_days);
    }
    println!("{n_days} days written to {}", a.out.display());
    Ok(())
}
