//! Synthetic demand/temperature generator with known ground truth.
//!
//! Demand is the sum of
//!
//! * a residential part with the same structure the regression model uses
//!   (level, trend, annual/weekly harmonics, `t`-modulated annual harmonics,
//!   and a heating term proportional to `max(T_c − T, 0)`),
//! * an industrial step: `I` on weekdays, `I·f` on weekends, 0 on holidays,
//! * AR(1) residuals, additive or multiplicative.
//!
//! Harmonics are evaluated here directly from their definitions and do not
//! share code with [`crate::design`], so fitted coefficients can be checked
//! against the injected ones.

use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use chrono::{Datelike, Days, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::calendar::{classify_day, CalendarConfig, DayClass};
use crate::design::RegressorSpec;
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Residual in demand units.
    #[default]
    Additive,
    /// Residual as a fraction of the noise-free demand.
    Multiplicative,
}

/// Annual temperature cycle plus persistent Gaussian weather noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TemperatureSpec {
    pub mean: f64,
    pub amplitude: f64,
    /// Day of year with the lowest expected temperature.
    pub coldest_day: u32,
    /// Stationary standard deviation of the weather noise, °C.
    pub noise_sigma: f64,
    /// Day-to-day AR(1) coefficient of the weather noise.
    pub persistence: f64,
}

impl Default for TemperatureSpec {
    fn default() -> Self {
        Self {
            mean: 14.0,
            amplitude: 10.0,
            coldest_day: 20,
            noise_sigma: 3.0,
            persistence: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSpec {
    pub base_level: f64,
    pub trend_per_day: f64,
    /// `(sin, cos)` amplitude of annual harmonic `n = index + 1` (period 364/n days).
    pub annual_amplitudes: Vec<(f64, f64)>,
    /// `(sin, cos)` amplitude of weekly harmonic `n = index + 1` (period 7/n days).
    pub weekly_amplitudes: Vec<(f64, f64)>,
    /// `(sin, cos)` amplitude multiplying `t · sin/cos(n·2π t/364)`.
    pub modulation_amplitudes: Vec<(f64, f64)>,
    /// Demand units per heating degree-day.
    pub temp_coefficient: f64,
    pub comfort_temp: f64,
    pub residual_ar_phi: f64,
    pub noise_sigma: f64,
    pub noise_mode: NoiseMode,
    /// Weekday industrial demand `I`.
    pub industrial_level: f64,
    /// Weekend industrial demand as a fraction of `I`.
    pub weekend_industrial_fraction: f64,
    pub temperature: TemperatureSpec,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            base_level: 100.0,
            trend_per_day: 0.005,
            annual_amplitudes: vec![(3.0, 8.0), (1.0, -2.0)],
            weekly_amplitudes: vec![(2.0, 1.0)],
            modulation_amplitudes: vec![(0.001, 0.002)],
            temp_coefficient: 9.0,
            comfort_temp: 18.0,
            residual_ar_phi: 0.7,
            noise_sigma: 5.0,
            noise_mode: NoiseMode::Additive,
            industrial_level: 40.0,
            weekend_industrial_fraction: 0.4,
            temperature: TemperatureSpec::default(),
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Noise-free residential demand at day index `t` with temperature `temp`.
    pub fn residential(&self, t: f64, temp: f64) -> f64 {
        let mut y = self.base_level + self.trend_per_day * t;
        for (i, (s, c)) in self.annual_amplitudes.iter().enumerate() {
            let w = TAU * (i + 1) as f64 * t / 364.0;
            y += s * w.sin() + c * w.cos();
        }
        for (i, (s, c)) in self.weekly_amplitudes.iter().enumerate() {
            let w = TAU * (i + 1) as f64 * t / 7.0;
            y += s * w.sin() + c * w.cos();
        }
        for (i, (s, c)) in self.modulation_amplitudes.iter().enumerate() {
            let w = TAU * (i + 1) as f64 * t / 364.0;
            y += t * (s * w.sin() + c * w.cos());
        }
        y + self.temp_coefficient * (self.comfort_temp - temp).max(0.0)
    }

    pub fn industrial(&self, class: DayClass) -> f64 {
        match class {
            DayClass::Weekday => self.industrial_level,
            DayClass::Weekend => self.industrial_level * self.weekend_industrial_fraction,
            DayClass::Holiday => 0.0,
        }
    }

    /// Injected coefficients under the column labels of `spec`, or `None` if
    /// the generator has structure `spec` cannot represent (more harmonics
    /// than the spec, a lag column, or a disabled regressor with a nonzero
    /// amplitude). Industrial demand is not part of this mapping.
    pub fn truth_coefficients(&self, spec: &RegressorSpec) -> Option<Vec<(String, f64)>> {
        if spec.include_lag
            || self.annual_amplitudes.len() > spec.annual_harmonics
            || self.weekly_amplitudes.len() > spec.weekly_harmonics
            || self.modulation_amplitudes.len() > spec.modulated_harmonics
            || (!spec.include_trend && (self.base_level != 0.0 || self.trend_per_day != 0.0))
            || (!spec.include_temperature && self.temp_coefficient != 0.0)
        {
            return None;
        }
        let pick = |v: &[(f64, f64)], n: usize, sin: bool| {
            v.get(n - 1).map_or(0.0, |p| if sin { p.0 } else { p.1 })
        };
        let mut out = Vec::new();
        if spec.include_trend {
            out.push(("const".to_string(), self.base_level));
            out.push(("t".to_string(), self.trend_per_day));
        }
        for n in 1..=spec.annual_harmonics {
            out.push((format!("sinA{n}"), pick(&self.annual_amplitudes, n, true)));
            out.push((format!("cosA{n}"), pick(&self.annual_amplitudes, n, false)));
        }
        for n in 1..=spec.weekly_harmonics {
            out.push((format!("sinW{n}"), pick(&self.weekly_amplitudes, n, true)));
            out.push((format!("cosW{n}"), pick(&self.weekly_amplitudes, n, false)));
        }
        for n in 1..=spec.modulated_harmonics {
            out.push((format!("t*sinA{n}"), pick(&self.modulation_amplitudes, n, true)));
            out.push((format!("t*cosA{n}"), pick(&self.modulation_amplitudes, n, false)));
        }
        if spec.include_temperature {
            out.push(("Td".to_string(), self.temp_coefficient));
        }
        Some(out)
    }
}

/// Ratios implied by the generator for one year's summer window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRatios {
    pub year: i32,
    /// Mean noise-free residential demand over the summer window.
    pub residential_mean: f64,
    /// `100·I/R`; absent when the window has no holiday.
    pub ratio_holiday: Option<f64>,
    /// `100·(I − I0)/(R + I0)`.
    pub ratio_weekend: f64,
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub demand: Series,
    pub temperature: Series,
    pub truth: GeneratorSpec,
    /// Days whose demand was negative and clipped to zero.
    pub clipped_days: usize,
    pub expected_segregation: Vec<ExpectedRatios>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledValue {
    pub label: String,
    pub value: f64,
}

/// JSON sidecar describing the ground truth of a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSidecar {
    pub generator: GeneratorSpec,
    pub origin: NaiveDate,
    pub n_days: usize,
    pub clipped_days: usize,
    /// Injected coefficients under the default daily FSET column labels, when representable.
    pub coefficients: Option<Vec<LabeledValue>>,
    pub expected_segregation: Vec<ExpectedRatios>,
}

impl Synthetic {
    pub fn sidecar(&self) -> TruthSidecar {
        let spec = RegressorSpec::default();
        TruthSidecar {
            generator: self.truth.clone(),
            origin: self.demand.origin(),
            n_days: self.demand.len(),
            clipped_days: self.clipped_days,
            coefficients: self.truth.truth_coefficients(&spec).map(|v| {
                v.into_iter()
                    .map(|(label, value)| LabeledValue { label, value })
                    .collect()
            }),
            expected_segregation: self.expected_segregation.clone(),
        }
    }
}

/// Generates `n_days` of demand and temperature starting at `origin`.
///
/// Deterministic for a given spec (including its seed). Negative demand is
/// clipped to zero, counted in [`Synthetic::clipped_days`], and logged.
pub fn generate(
    spec: &GeneratorSpec,
    cal: &CalendarConfig,
    n_days: usize,
    origin: NaiveDate,
) -> Synthetic {
    assert!(n_days >= 1, "n_days must be at least 1");
    let mut weather_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    noise_rng.set_stream(1);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };

    let ts = &spec.temperature;
    let rho = ts.persistence;
    let mut weather = ts.noise_sigma * normal(&mut weather_rng);
    let phi = spec.residual_ar_phi;
    let mut resid = spec.noise_sigma / (1.0 - phi * phi).sqrt() * normal(&mut noise_rng);

    let mut dates = Vec::with_capacity(n_days);
    let mut temps = Vec::with_capacity(n_days);
    let mut residential = Vec::with_capacity(n_days);
    let mut demand = Vec::with_capacity(n_days);
    let mut clipped_days = 0;
    for i in 0..n_days {
        if i > 0 {
            weather = rho * weather + ts.noise_sigma * (1.0 - rho * rho).sqrt() * normal(&mut weather_rng);
            resid = phi * resid + spec.noise_sigma * normal(&mut noise_rng);
        }
        let date = origin + Days::new(i as u64);
        let season = TAU * (f64::from(date.ordinal()) - f64::from(ts.coldest_day)) / 365.25;
        let temp = ts.mean - ts.amplitude * season.cos() + weather;
        let r = spec.residential(i as f64, temp);
        let det = r + spec.industrial(classify_day(date, cal));
        let mut y = match spec.noise_mode {
            NoiseMode::Additive => det + resid,
            NoiseMode::Multiplicative => det * (1.0 + resid),
        };
        if y < 0.0 {
            y = 0.0;
            clipped_days += 1;
        }
        dates.push(date);
        temps.push(temp);
        residential.push(r);
        demand.push(y);
    }
    if clipped_days > 0 {
        log::warn!("synthetic demand clipped at zero on {clipped_days} day(s)");
    }

    let expected_segregation = expected_ratios(spec, cal, &dates, &residential, &(4..=9));
    Synthetic {
        demand: Series::daily(origin, demand, "demand").expect("finite synthetic demand"),
        temperature: Series::daily(origin, temps, "temperature").expect("finite synthetic temperature"),
        truth: spec.clone(),
        clipped_days,
        expected_segregation,
    }
}

fn expected_ratios(
    spec: &GeneratorSpec,
    cal: &CalendarConfig,
    dates: &[NaiveDate],
    residential: &[f64],
    summer: &RangeInclusive<u32>,
) -> Vec<ExpectedRatios> {
    let (Some(first), Some(last)) = (dates.first(), dates.last()) else {
        return Vec::new();
    };
    let i = spec.industrial_level;
    let i0 = i * spec.weekend_industrial_fraction;
    (first.year()..=last.year())
        .filter_map(|year| {
            let mut sum = 0.0;
            let mut n = 0usize;
            let mut holidays = 0usize;
            for (d, r) in dates.iter().zip(residential) {
                if d.year() == year && summer.contains(&d.month()) && !cal.is_excluded(*d) {
                    sum += r;
                    n += 1;
                    holidays += usize::from(classify_day(*d, cal) == DayClass::Holiday);
                }
            }
            (n > 0).then(|| {
                let r = sum / n as f64;
                ExpectedRatios {
                    year,
                    residential_mean: r,
                    ratio_holiday: (holidays > 0).then(|| 100.0 * i / r),
                    ratio_weekend: 100.0 * (i - i0) / (r + i0),
                }
            })
        })
        .collect()
}

/// Two holiday blocks per year inside June–September: four days starting
/// between June 15 and August 13 (shifting about 11 days a year, like a
/// lunar calendar), and three days 40 days later.
pub fn synthetic_holidays(first_year: i32, last_year: i32) -> Vec<NaiveDate> {
    let mut out = Vec::new();
    for year in first_year..=last_year {
        let Some(anchor) = NaiveDate::from_ymd_opt(year, 6, 15) else {
            continue;
        };
        let shift = (i64::from(year) * 11).rem_euclid(60) as u64;
        let start = anchor + Days::new(shift);
        out.extend((0..4).map(|k| start + Days::new(k)));
        out.extend((40..43).map(|k| start + Days::new(k)));
    }
    out
}
