use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use fourcast::series::Statistic;
use fourcast::{Granularity, ModelKind, RegressorSpec};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "fourcast", version, about = "Fourier-series gas demand forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read, align and gap-fill raw demand/temperature CSVs.
    Ingest(IngestArgs),
    /// Fit a model on data before --train-end and save it.
    Fit(FitArgs),
    /// Forecast a date range with a saved model.
    Forecast(ForecastArgs),
    /// Roll-over evaluation by calendar year, optionally against AR(p).
    Evaluate(EvaluateArgs),
    /// Summer weekday/weekend/holiday ratios of industrial demand.
    Segregate(SegregateArgs),
    /// Generate synthetic demand and temperature with known truth.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct CsvArgs {
    /// Name of the date column.
    #[arg(long, default_value = "date")]
    date_column: String,
    /// Name of the value column.
    #[arg(long, default_value = "value")]
    value_column: String,
    /// Longest run of missing days that is linearly interpolated.
    #[arg(long, default_value_t = fourcast::series::DEFAULT_MAX_GAP)]
    max_gap: usize,
    /// How daily demand is combined into weekly/monthly buckets (temperature is always averaged).
    #[arg(long, default_value = "sum")]
    aggregate: Statistic,
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// Annual harmonics K (default 12 daily/weekly, 4 monthly).
    #[arg(long)]
    annual_harmonics: Option<usize>,
    /// Weekly harmonics M (default 2 on daily data).
    #[arg(long)]
    weekly_harmonics: Option<usize>,
    /// t-modulated annual harmonics p (default 5, 2 monthly).
    #[arg(long)]
    modulated_harmonics: Option<usize>,
    /// Comfort temperature T_c in °C.
    #[arg(long)]
    comfort_temp: Option<f64>,
}

impl SpecArgs {
    fn build(&self, kind: ModelKind, granularity: Granularity) -> anyhow::Result<RegressorSpec> {
        let mut spec = RegressorSpec::for_granularity(granularity);
        if let Some(k) = self.annual_harmonics {
            spec.annual_harmonics = k;
        }
        if let Some(m) = self.weekly_harmonics {
            spec.weekly_harmonics = m;
        }
        if let Some(p) = self.modulated_harmonics {
            spec.modulated_harmonics = p;
        }
        if let Some(tc) = self.comfort_temp {
            spec.comfort_temp = tc;
        }
        let spec = kind.configure(&spec);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Daily demand CSV.
    #[arg(long)]
    demand: PathBuf,
    /// Daily temperature CSV; aligned to the demand range when given.
    #[arg(long)]
    temperature: Option<PathBuf>,
    #[arg(long, default_value = "daily")]
    granularity: Granularity,
    #[command(flatten)]
    csv: CsvArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    demand: PathBuf,
    #[arg(long)]
    temperature: Option<PathBuf>,
    #[arg(long, default_value = "fset")]
    kind: ModelKind,
    #[arg(long, default_value = "daily")]
    granularity: Granularity,
    /// First date excluded from training.
    #[arg(long)]
    train_end: NaiveDate,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    csv: CsvArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ForecastArgs {
    /// Model file written by `fit`.
    #[arg(long)]
    model: PathBuf,
    /// First forecast date.
    #[arg(long)]
    from: NaiveDate,
    /// Last forecast date.
    #[arg(long)]
    to: NaiveDate,
    /// Temperature covering the horizon (plus the day before for fsetf).
    #[arg(long)]
    temperature: Option<PathBuf>,
    /// Observed demand: lag values for fsetf, and actuals for metrics.
    #[arg(long)]
    demand: Option<PathBuf>,
    #[command(flatten)]
    csv: CsvArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    demand: PathBuf,
    #[arg(long)]
    temperature: Option<PathBuf>,
    #[arg(long, default_value = "fsetf")]
    kind: ModelKind,
    #[arg(long, default_value = "daily")]
    granularity: Granularity,
    /// Target years, `Y1..Y2` or a single year.
    #[arg(long, value_parser = parse_years)]
    years: RangeInclusive<i32>,
    /// Also run the AR(N) benchmark, refitted on each preceding year.
    #[arg(long)]
    ar_order: Option<usize>,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    csv: CsvArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SegregateArgs {
    /// Daily demand CSV; repeat for several series (labelled by file stem).
    #[arg(long, required = true)]
    demand: Vec<PathBuf>,
    /// Calendar TOML with weekend_days, holidays and exclusion_windows.
    #[arg(long)]
    calendar: Option<PathBuf>,
    /// Years to report (default: every year with summer data).
    #[arg(long, value_parser = parse_years)]
    years: Option<RangeInclusive<i32>>,
    /// Months treated as summer, `A..B`.
    #[arg(long, default_value = "4..9", value_parser = parse_months)]
    summer_months: RangeInclusive<u32>,
    #[command(flatten)]
    csv: CsvArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Generator spec (JSON); missing fields take defaults.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Calendar TOML; default is Sat/Sun weekends plus generated summer holidays.
    #[arg(long)]
    calendar: Option<PathBuf>,
    /// Calendar years to generate, `Y1..Y2`.
    #[arg(long, default_value = "2010..2015", value_parser = parse_years)]
    years: RangeInclusive<i32>,
    /// Random seed (overrides the spec file).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_years(s: &str) -> Result<RangeInclusive<i32>, String> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let a: i32 = a.trim().parse().map_err(|_| format!("bad year '{a}'"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad year '{b}'"))?;
    if a > b {
        return Err(format!("year range '{s}' is empty"));
    }
    Ok(a..=b)
}

fn parse_months(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let a: u32 = a.trim().parse().map_err(|_| format!("bad month '{a}'"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad month '{b}'"))?;
    if !(1..=12).contains(&a) || !(1..=12).contains(&b) || a > b {
        return Err(format!("month range '{s}' must satisfy 1 <= A <= B <= 12"));
    }
    Ok(a..=b)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Fit(a) => commands::fit(a),
        Command::Forecast(a) => commands::forecast(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Segregate(a) => commands::segregate(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
