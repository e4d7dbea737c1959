//! Day classification for weekday/weekend/holiday analysis.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::series::{parse_date, DateRange};

#[derive(Debug, thiserror::Error)]
pub enum CalendarError {
    #[error("unknown weekday name '{0}'")]
    BadWeekday(String),
    #[error("bad holiday date '{0}'")]
    BadDate(String),
    #[error("bad exclusion window: {0}")]
    BadWindow(String),
    #[error("calendar file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Class of a calendar day. Holiday takes precedence over Weekend, which
/// takes precedence over Weekday.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayClass {
    Weekday,
    Weekend,
    Holiday,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalendarConfig {
    pub weekend_days: Vec<Weekday>,
    pub holidays: BTreeSet<NaiveDate>,
    /// Inclusive windows dropped from segregation statistics.
    pub exclusion_windows: Vec<DateRange>,
}

impl Default for CalendarConfig {
    fn default() -> Self {
        Self {
            weekend_days: vec![Weekday::Sat, Weekday::Sun],
            holidays: BTreeSet::new(),
            exclusion_windows: Vec::new(),
        }
    }
}

// On-disk shape: every field optional, dates as ISO strings.
#[derive(Debug, Default, Serialize, Deserialize)]
struct CalendarFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weekend_days: Option<Vec<String>>,
    #[serde(default)]
    holidays: Vec<String>,
    #[serde(default)]
    exclusion_windows: Vec<String>,
}

fn weekday_name(day: Weekday) -> &'static str {
    match day {
        Weekday::Mon => "Monday",
        Weekday::Tue => "Tuesday",
        Weekday::Wed => "Wednesday",
        Weekday::Thu => "Thursday",
        Weekday::Fri => "Friday",
        Weekday::Sat => "Saturday",
        Weekday::Sun => "Sunday",
    }
}

impl CalendarConfig {
    pub fn with_holidays(mut self, holidays: impl IntoIterator<Item = NaiveDate>) -> Self {
        self.holidays.extend(holidays);
        self
    }

    pub fn with_exclusion(mut self, window: DateRange) -> Self {
        self.exclusion_windows.push(window);
        self
    }

    pub fn is_excluded(&self, date: NaiveDate) -> bool {
        self.exclusion_windows.iter().any(|w| w.contains(date))
    }

    /// Parses the TOML form:
    ///
    /// ```toml
    /// weekend_days = ["Saturday", "Sunday"]
    /// holidays = ["2017-06-25", "2017-06-26"]
    /// exclusion_windows = ["2017-06-24..2017-07-09"]
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self, CalendarError> {
        let file: CalendarFile = toml::from_str(text)?;
        let weekend_days = match file.weekend_days {
            Some(names) => names
                .iter()
                .map(|n| n.parse::<Weekday>().map_err(|_| CalendarError::BadWeekday(n.clone())))
                .collect::<Result<_, _>>()?,
            None => CalendarConfig::default().weekend_days,
        };
        let holidays = file
            .holidays
            .iter()
            .map(|s| parse_date(s).map_err(|_| CalendarError::BadDate(s.clone())))
            .collect::<Result<_, _>>()?;
        let exclusion_windows = file
            .exclusion_windows
            .iter()
            .map(|s| s.parse::<DateRange>().map_err(CalendarError::BadWindow))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            weekend_days,
            holidays,
            exclusion_windows,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CalendarError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        let file = CalendarFile {
            weekend_days: Some(
                self.weekend_days
                    .iter()
                    .map(|d| weekday_name(*d).to_string())
                    .collect(),
            ),
            holidays: self.holidays.iter().map(|d| d.to_string()).collect(),
            exclusion_windows: self.exclusion_windows.iter().map(|w| w.to_string()).collect(),
        };
        toml::to_string(&file).expect("calendar serializes")
    }
}

pub fn classify_day(date: NaiveDate, cal: &CalendarConfig) -> DayClass {
    if cal.holidays.contains(&date) {
        DayClass::Holiday
    } else if cal.weekend_days.contains(&date.weekday()) {
        DayClass::Weekend
    } else {
        DayClass::Weekday
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        parse_date(s).unwrap()
    }

    #[test]
    fn saturday_is_weekend() {
        assert_eq!(classify_day(d("2016-07-16"), &CalendarConfig::default()), DayClass::Weekend);
    }

    #[test]
    fn holiday_beats_weekend() {
        let cal = CalendarConfig::default().with_holidays([d("2016-07-16")]);
        assert_eq!(classify_day(d("2016-07-16"), &cal), DayClass::Holiday);
    }

    #[test]
    fn wednesday_is_weekday() {
        assert_eq!(classify_day(d("2016-07-13"), &CalendarConfig::default()), DayClass::Weekday);
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
weekend_days = ["Friday", "saturday"]
holidays = ["2017-06-25", "2017-06-26"]
exclusion_windows = ["2017-06-24..2017-07-09"]
"#;
        let cal = CalendarConfig::from_toml_str(text).unwrap();
        assert_eq!(cal.weekend_days, vec![Weekday::Fri, Weekday::Sat]);
        assert_eq!(cal.holidays.len(), 2);
        assert!(cal.is_excluded(d("2017-07-01")));
        assert!(!cal.is_excluded(d("2017-07-10")));
        let again = CalendarConfig::from_toml_str(&cal.to_toml_string()).unwrap();
        assert_eq!(again, cal);
    }

    #[test]
    fn default_weekend_when_key_absent() {
        let cal = CalendarConfig::from_toml_str("holidays = []").unwrap();
        assert_eq!(cal.weekend_days, vec![Weekday::Sat, Weekday::Sun]);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            CalendarConfig::from_toml_str(r#"weekend_days = ["Caturday"]"#),
            Err(CalendarError::BadWeekday(_))
        ));
        assert!(matches!(
            CalendarConfig::from_toml_str(r#"holidays = ["2017-13-01"]"#),
            Err(CalendarError::BadDate(_))
        ));
        assert!(matches!(
            CalendarConfig::from_toml_str(r#"exclusion_windows = ["2017-07-09..2017-06-24"]"#),
            Err(CalendarError::BadWindow(_))
        ));
    }
}
