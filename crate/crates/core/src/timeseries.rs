//! Daily price and implied-volatility series, log returns and realized volatility.
//!
//! Dates are taken as given: the input is assumed to already be on a
//! business-day grid, and a gap between two rows counts as one step.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::error::{Error, Result};

/// Business days per year used for annualization unless configured otherwise.
pub const DEFAULT_YEAR_DAYS: f64 = 260.0;

fn check_increasing(dates: &[NaiveDate]) -> Result<()> {
    match dates.windows(2).position(|w| w[1] <= w[0]) {
        Some(i) => Err(Error::NonIncreasingDates { index: i + 1 }),
        None => Ok(()),
    }
}

/// Daily closing prices on a business-day grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::LengthMismatch {
                left: dates.len(),
                right: prices.len(),
            });
        }
        check_increasing(&dates)?;
        if let Some(index) = prices.iter().position(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::NonPositivePrice {
                index,
                value: prices[index],
            });
        }
        Ok(Self { dates, prices })
    }

    /// Rebuilds a price path `p0 * exp(cumsum(returns))` on consecutive
    /// weekdays starting at `start`. Used for synthetic data.
    pub fn from_log_returns(start: NaiveDate, p0: f64, returns: &[f64]) -> Result<Self> {
        let dates = business_days(start, returns.len() + 1);
        let mut prices = Vec::with_capacity(returns.len() + 1);
        let mut log_p = p0.ln();
        prices.push(p0);
        for r in returns {
            log_p += r;
            prices.push(log_p.exp());
        }
        Self::new(dates, prices)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Unannualized one-step returns. The return at `dates[i]` covers the
/// interval ending on that date.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(dates: Vec<NaiveDate>, returns: Vec<f64>) -> Result<Self> {
        if dates.len() != returns.len() {
            return Err(Error::LengthMismatch {
                left: dates.len(),
                right: returns.len(),
            });
        }
        check_increasing(&dates)?;
        Ok(Self { dates, returns })
    }

    /// Wraps bare returns with synthetic weekday dates starting at `start`.
    pub fn from_values(start: NaiveDate, returns: Vec<f64>) -> Self {
        let dates = business_days(start, returns.len());
        Self { dates, returns }
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    /// Sub-series over an index range.
    pub fn slice(&self, range: std::ops::Range<usize>) -> ReturnSeries {
        ReturnSeries {
            dates: self.dates[range.clone()].to_vec(),
            returns: self.returns[range].to_vec(),
        }
    }
}

/// `count` consecutive Monday-to-Friday dates starting at `start` (rolled
/// forward if `start` falls on a weekend).
pub fn business_days(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date overflow");
    }
    out
}

/// Constant-maturity ATM implied volatilities, one column per horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpliedVolSeries {
    dates: Vec<NaiveDate>,
    horizons: Vec<usize>,
    // row-major: values[date][horizon]
    values: Vec<Vec<Option<f64>>>,
}

impl ImpliedVolSeries {
    pub fn new(
        dates: Vec<NaiveDate>,
        horizons: Vec<usize>,
        values: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: dates.len(),
                right: values.len(),
            });
        }
        check_increasing(&dates)?;
        if horizons.windows(2).any(|w| w[1] <= w[0]) || horizons.contains(&0) {
            return Err(Error::InvalidParameter(
                "implied-vol horizons must be positive and strictly increasing".into(),
            ));
        }
        for row in &values {
            if row.len() != horizons.len() {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: horizons.len(),
                });
            }
            if let Some(v) = row.iter().flatten().find(|v| !(**v > 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "implied volatility must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            dates,
            horizons,
            values,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn horizons(&self) -> &[usize] {
        &self.horizons
    }

    pub fn values(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    /// Implied volatility on `date` for time-to-maturity `horizon`, if quoted.
    pub fn value_on(&self, date: NaiveDate, horizon: usize) -> Option<f64> {
        let row = self.dates.binary_search(&date).ok()?;
        let col = self.horizons.binary_search(&horizon).ok()?;
        self.values[row][col]
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Log returns `ln(p[i+1] / p[i])`, dated on the later price.
pub fn log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: prices.len(),
        });
    }
    let p = prices.prices();
    let returns = p.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    Ok(ReturnSeries {
        dates: prices.dates()[1..].to_vec(),
        returns,
    })
}

/// Annualized realized volatility over the `n` returns starting at index
/// `start`: `sqrt(A / n * sum r^2)`.
pub fn realized_volatility_from(
    returns: &[f64],
    start: usize,
    n: usize,
    year_days: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "horizon must be at least one day".into(),
        ));
    }
    let available = returns.len().saturating_sub(start);
    if available < n {
        return Err(Error::InsufficientFutureData {
            required: n,
            available,
        });
    }
    let sum_sq: f64 = returns[start..start + n].iter().map(|r| r * r).sum();
    Ok((year_days / n as f64 * sum_sq).sqrt())
}

/// Realized volatility over the `horizon_days` returns strictly after `t`.
pub fn realized_volatility(
    returns: &ReturnSeries,
    t: NaiveDate,
    horizon_days: usize,
    year_days: f64,
) -> Result<f64> {
    let start = returns.dates().partition_point(|d| *d <= t);
    realized_volatility_from(returns.returns(), start, horizon_days, year_days)
}

/// Expected layout of an input CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvSchema {
    /// `date,price`
    Prices,
    /// `date,iv_<h1>,iv_<h2>,...`
    ImpliedVol,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSeries {
    Prices(PriceSeries),
    ImpliedVol(ImpliedVolSeries),
}

pub fn load_csv(path: impl AsRef<Path>, schema: CsvSchema) -> Result<LoadedSeries> {
    let file = File::open(path)?;
    Ok(match schema {
        CsvSchema::Prices => LoadedSeries::Prices(read_prices(file)?),
        CsvSchema::ImpliedVol => LoadedSeries::ImpliedVol(read_implied_vol(file)?),
    })
}

pub fn load_prices_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    read_prices(File::open(path)?)
}

pub fn load_implied_vol_csv(path: impl AsRef<Path>) -> Result<ImpliedVolSeries> {
    read_implied_vol(File::open(path)?)
}

fn parse_date(field: &str, line: u64) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(field.trim(), "%Y-%m-%d").map_err(|e| Error::Csv {
        line,
        message: format!("bad date {field:?}: {e}"),
    })
}

fn parse_number(field: &str, line: u64) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Csv {
        line,
        message: format!("bad number {field:?}"),
    })
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn row_error(line: u64, err: Error) -> Error {
    match err {
        Error::Csv { .. } => err,
        other => Error::Csv {
            line,
            message: other.to_string(),
        },
    }
}

pub fn read_prices<R: Read>(reader: R) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    if cols != ["date", "price"] {
        return Err(Error::Csv {
            line: 1,
            message: format!("expected header date,price, got {}", cols.join(",")),
        });
    }
    let mut dates = Vec::new();
    let mut prices = Vec::new();
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let date = parse_date(&record[0], line)?;
        let price = parse_number(&record[1], line)?;
        if let Some(last) = dates.last() {
            if date <= *last {
                return Err(Error::Csv {
                    line,
                    message: format!("date {date} not after {last}"),
                });
            }
        }
        dates.push(date);
        prices.push(price);
        lines.push(line);
    }
    if dates.is_empty() {
        return Err(Error::NoDataRows);
    }
    PriceSeries::new(dates, prices).map_err(|e| match e {
        Error::NonPositivePrice { index, .. } => row_error(lines[index], e),
        other => other,
    })
}

/// Writes `date,price` rows, the format [`read_prices`] accepts.
pub fn write_prices<W: Write>(out: W, prices: &PriceSeries) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["date", "price"])?;
    for (d, p) in prices.dates().iter().zip(prices.prices()) {
        wtr.write_record([d.to_string(), p.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_implied_vol<R: Read>(reader: R) -> Result<ImpliedVolSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0).map(str::trim) != Some("date") || header.len() < 2 {
        return Err(Error::Csv {
            line: 1,
            message: "expected header date,iv_<h>,...".into(),
        });
    }
    let horizons = header
        .iter()
        .skip(1)
        .map(|name| {
            name.trim()
                .strip_prefix("iv_")
                .and_then(|h| h.parse::<usize>().ok())
                .ok_or_else(|| Error::Csv {
                    line: 1,
                    message: format!("bad implied-vol column {name:?}"),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let date = parse_date(&record[0], line)?;
        if let Some(last) = dates.last() {
            if date <= *last {
                return Err(Error::Csv {
                    line,
                    message: format!("date {date} not after {last}"),
                });
            }
        }
        let row = record
            .iter()
            .skip(1)
            .map(|cell| {
                if cell.trim().is_empty() {
                    return Ok(None);
                }
                let v = parse_number(cell, line)?;
                if !(v > 0.0) {
                    return Err(Error::Csv {
                        line,
                        message: format!("implied volatility must be positive, got {v}"),
                    });
                }
                Ok(Some(v))
            })
            .collect::<Result<Vec<_>>>()?;
        dates.push(date);
        values.push(row);
    }
    if dates.is_empty() {
        return Err(Error::NoDataRows);
    }
    ImpliedVolSeries::new(dates, horizons, values)
}
