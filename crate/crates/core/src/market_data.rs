//! FRED-format LIBOR ingestion, window statistics and funding-rate conversion.
//!
//! Rates stay on the 0–100 percentage scale in this module. Conversion to a
//! fraction happens once, when a scenario is built for the bank engine.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use thiserror::Error;

/// Spread added on top of LIBOR to obtain the bank's interbank funding rate.
pub const FUNDS_SPREAD_PCT: f64 = 0.25;

/// FRED series id of the 12-month USD LIBOR.
pub const LIBOR_SERIES_ID: &str = "USD12MD156N";

/// Environment variable overriding the directory holding bundled data files.
pub const DATA_DIR_ENV: &str = "VBANK_DATA_DIR";

/// FRED's marker for a missing observation.
const MISSING_MARKER: &str = ".";

const MAX_RATE_PCT: f64 = 50.0;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: malformed csv: {message}")]
    Csv { line: u64, message: String },
    #[error("line 1: header must name a date column and exactly one value column")]
    Header,
    #[error("line {line}: cannot parse date {value:?}")]
    Date { line: u64, value: String },
    #[error("line {line}: non-numeric rate {value:?}")]
    Value { line: u64, value: String },
    #[error("line {line}: rate {rate} outside [0, 50]")]
    OutOfRange { line: u64, rate: f64 },
    #[error("line {line}: date {date} does not follow the previous observation")]
    NotIncreasing { line: u64, date: NaiveDate },
    #[error("series contains no usable observations")]
    EmptySeries,
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("window start {start} is after end {end}")]
    InvertedWindow { start: NaiveDate, end: NaiveDate },
    #[error("no observations between {start} and {end}")]
    EmptyWindow { start: NaiveDate, end: NaiveDate },
}

#[derive(Debug, Error, PartialEq)]
#[error("negative base rate {0}")]
pub struct DomainError(pub f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateObservation {
    pub date: NaiveDate,
    /// Annual percentage, 0–100 scale.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiborSeries {
    pub series_id: String,
    observations: Vec<RateObservation>,
}

impl LiborSeries {
    /// Builds a series from observations that are already validated and
    /// strictly increasing in date.
    pub fn from_observations(
        series_id: impl Into<String>,
        observations: Vec<RateObservation>,
    ) -> Result<Self, LoadError> {
        if observations.is_empty() {
            return Err(LoadError::EmptySeries);
        }
        for (i, obs) in observations.iter().enumerate() {
            let line = i as u64 + 2;
            if !(0.0..=MAX_RATE_PCT).contains(&obs.rate) {
                return Err(LoadError::OutOfRange {
                    line,
                    rate: obs.rate,
                });
            }
            if i > 0 && observations[i - 1].date >= obs.date {
                return Err(LoadError::NotIncreasing {
                    line,
                    date: obs.date,
                });
            }
        }
        Ok(Self {
            series_id: series_id.into(),
            observations,
        })
    }

    pub fn observations(&self) -> &[RateObservation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.observations[0].date
    }

    pub fn last_date(&self) -> NaiveDate {
        self.observations[self.observations.len() - 1].date
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub median: f64,
    pub mean: f64,
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

/// Reads a FRED CSV export (`DATE,<SERIES_ID>` header).
pub fn load_libor_csv(path: impl AsRef<Path>) -> Result<LiborSeries, LoadError> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    parse_libor_csv(&text)
}

pub fn parse_libor_csv(text: &str) -> Result<LiborSeries, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| LoadError::Csv {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || headers[0].is_empty() || headers[1].is_empty() {
        return Err(LoadError::Header);
    }
    let series_id = headers[1].to_string();

    let mut observations = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| LoadError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let raw_date = &record[0];
        let date =
            NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| LoadError::Date {
                line,
                value: raw_date.to_string(),
            })?;
        let raw_value = record.get(1).unwrap_or("");
        if raw_value == MISSING_MARKER {
            continue;
        }
        let rate: f64 = raw_value.parse().map_err(|_| LoadError::Value {
            line,
            value: raw_value.to_string(),
        })?;
        if !rate.is_finite() || !(0.0..=MAX_RATE_PCT).contains(&rate) {
            return Err(LoadError::OutOfRange { line, rate });
        }
        if let Some(prev) = observations.last() {
            let prev: &RateObservation = prev;
            if prev.date >= date {
                return Err(LoadError::NotIncreasing { line, date });
            }
        }
        observations.push(RateObservation { date, rate });
    }
    if observations.is_empty() {
        return Err(LoadError::EmptySeries);
    }
    Ok(LiborSeries {
        series_id,
        observations,
    })
}

/// Median, mean, min and max of the rates whose dates fall in `[start, end]`.
pub fn window_stats(
    series: &LiborSeries,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<WindowStats, StatsError> {
    if start > end {
        return Err(StatsError::InvertedWindow { start, end });
    }
    let mut rates: Vec<f64> = series
        .observations
        .iter()
        .filter(|o| o.date >= start && o.date <= end)
        .map(|o| o.rate)
        .collect();
    if rates.is_empty() {
        return Err(StatsError::EmptyWindow { start, end });
    }
    rates.sort_by(f64::total_cmp);
    let count = rates.len();
    let mean = rates.iter().sum::<f64>() / count as f64;
    let median = if count % 2 == 1 {
        rates[count / 2]
    } else {
        0.5 * (rates[count / 2 - 1] + rates[count / 2])
    };
    Ok(WindowStats {
        median,
        mean,
        count,
        min: rates[0],
        max: rates[count - 1],
    })
}

/// Window spanning Jan 1 of `first_year` through Dec 31 of `last_year`.
pub fn window_stats_years(
    series: &LiborSeries,
    first_year: i32,
    last_year: i32,
) -> Result<WindowStats, StatsError> {
    let start = NaiveDate::from_ymd_opt(first_year, 1, 1).unwrap_or(NaiveDate::MIN);
    let end = NaiveDate::from_ymd_opt(last_year, 12, 31).unwrap_or(NaiveDate::MAX);
    window_stats(series, start, end)
}

/// Interbank funding rate for the bank: LIBOR plus a fixed 0.25 pp spread.
pub fn funds_rate(libor_pct: f64) -> Result<f64, DomainError> {
    if libor_pct.is_nan() || libor_pct < 0.0 {
        return Err(DomainError(libor_pct));
    }
    Ok(libor_pct + FUNDS_SPREAD_PCT)
}

/// Directory holding bundled data: `$VBANK_DATA_DIR` if set, otherwise the
/// crate's `data/` directory.
pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"))
}

/// Expected location of the 12-month LIBOR snapshot.
pub fn snapshot_path() -> PathBuf {
    data_dir().join(format!("{LIBOR_SERIES_ID}.csv"))
}
