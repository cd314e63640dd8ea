//! Rolling comparison of forecasted, implied and realized volatilities.
//!
//! For every evaluation date after burn-in, each process emits its
//! forecasted volatility at the requested horizons. The forecast is paired
//! with the implied volatility quoted on the same date for the same horizon
//! (when present) and with the realized volatility over the following
//! `ΔT` returns (when the window fits in the sample). Distances are then
//! aggregated per process, horizon and volatility pair.

use std::fmt;
use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;

use crate::arch_process::{init_state, ProcessSpec};
use crate::error::{Error, Result};
use crate::forecast::{forecast_weights, forecasted_volatility};
use crate::timeseries::{
    log_returns, realized_volatility_from, ImpliedVolSeries, PriceSeries, DEFAULT_YEAR_DAYS,
};

/// Default horizon grid in business days.
pub const DEFAULT_HORIZONS: [usize; 7] = [5, 10, 21, 42, 63, 126, 252];

fn aligned(x: &[f64], y: &[f64]) -> Result<Vec<(f64, f64)>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let pairs: Vec<_> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .map(|(a, b)| (*a, *b))
        .collect();
    if pairs.is_empty() {
        return Err(Error::NoOverlap);
    }
    Ok(pairs)
}

/// Mean absolute error. `NaN` marks a missing value; such pairs are dropped.
pub fn mae(x: &[f64], y: &[f64]) -> Result<f64> {
    let pairs = aligned(x, y)?;
    Ok(pairs.iter().map(|(a, b)| (a - b).abs()).sum::<f64>() / pairs.len() as f64)
}

/// Root mean square error, with the same missing-value handling as [`mae`].
pub fn rmse(x: &[f64], y: &[f64]) -> Result<f64> {
    let pairs = aligned(x, y)?;
    Ok((pairs.iter().map(|(a, b)| (a - b).powi(2)).sum::<f64>() / pairs.len() as f64).sqrt())
}

/// Mean absolute error of `ln x` against `ln y`; all present values must be positive.
pub fn mae_log(x: &[f64], y: &[f64]) -> Result<f64> {
    let pairs = aligned(x, y)?;
    if let Some(v) = pairs
        .iter()
        .flat_map(|(a, b)| [*a, *b])
        .find(|v| !(*v > 0.0))
    {
        return Err(Error::NonPositiveLog(v));
    }
    Ok(pairs
        .iter()
        .map(|(a, b)| (a.ln() - b.ln()).abs())
        .sum::<f64>()
        / pairs.len() as f64)
}

/// One (date, process, horizon) triple. Volatilities are annualized fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub date: NaiveDate,
    pub spec: String,
    pub horizon: usize,
    pub forecast_vol: f64,
    pub implied_vol: Option<f64>,
    /// Present only when the whole future window lies inside the sample.
    pub realized_vol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    ForecastImplied,
    ForecastRealized,
    ImpliedRealized,
}

impl Pair {
    pub const ALL: [Pair; 3] = [
        Pair::ForecastImplied,
        Pair::ForecastRealized,
        Pair::ImpliedRealized,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Pair::ForecastImplied => "forecast-implied",
            Pair::ForecastRealized => "forecast-realized",
            Pair::ImpliedRealized => "implied-realized",
        }
    }

    fn sides(&self, r: &EvalRecord) -> (Option<f64>, Option<f64>) {
        match self {
            Pair::ForecastImplied => (Some(r.forecast_vol), r.implied_vol),
            Pair::ForecastRealized => (Some(r.forecast_vol), r.realized_vol),
            Pair::ImpliedRealized => (r.implied_vol, r.realized_vol),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Distance statistics for one (process, horizon, pair) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub spec: String,
    pub horizon: usize,
    pub pair: Pair,
    pub mae: f64,
    pub rmse: f64,
    /// Undefined when some volatility in the cell is zero.
    pub mae_log: Option<f64>,
    pub n: usize,
    /// Overlapping windows: roughly `n / ΔT` independent points.
    pub effective_n: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DistanceTable {
    pub rows: Vec<DistanceRow>,
}

impl DistanceTable {
    pub fn get(&self, spec: &str, horizon: usize, pair: Pair) -> Option<&DistanceRow> {
        self.rows
            .iter()
            .find(|r| r.spec == spec && r.horizon == horizon && r.pair == pair)
    }

    /// Builds the table from records; cells without observations are omitted.
    pub fn from_records(records: &[EvalRecord], specs: &[&str], horizons: &[usize]) -> Self {
        let mut rows = Vec::new();
        for spec in specs {
            for &horizon in horizons {
                let cell: Vec<&EvalRecord> = records
                    .iter()
                    .filter(|r| r.spec == *spec && r.horizon == horizon)
                    .collect();
                for pair in Pair::ALL {
                    let (x, y): (Vec<f64>, Vec<f64>) = cell
                        .iter()
                        .filter_map(|r| match pair.sides(r) {
                            (Some(a), Some(b)) => Some((a, b)),
                            _ => None,
                        })
                        .unzip();
                    if x.is_empty() {
                        continue;
                    }
                    rows.push(DistanceRow {
                        spec: spec.to_string(),
                        horizon,
                        pair,
                        mae: mae(&x, &y).expect("non-empty cell"),
                        rmse: rmse(&x, &y).expect("non-empty cell"),
                        mae_log: mae_log(&x, &y).ok(),
                        n: x.len(),
                        effective_n: x.len() as f64 / horizon as f64,
                    });
                }
            }
        }
        Self { rows }
    }
}

/// Settings for [`rolling_evaluation`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub year_days: f64,
    /// Returns used to seed the EMA states.
    pub warmup: usize,
    /// Returns discarded after warmup; `None` means the longest process time scale.
    pub burn_in: Option<usize>,
    /// Evaluate every `stride`-th date.
    pub stride: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            year_days: DEFAULT_YEAR_DAYS,
            warmup: crate::arch_process::MIN_WARMUP,
            burn_in: None,
            stride: 1,
        }
    }
}

impl EvalConfig {
    pub fn burn_in_for(&self, specs: &[ProcessSpec]) -> usize {
        self.burn_in.unwrap_or_else(|| {
            specs.iter().map(|s| s.max_tau()).fold(0.0, f64::max).ceil() as usize
        })
    }

    /// Minimum number of returns for at least one full realized window at
    /// the largest horizon.
    pub fn required_returns(&self, specs: &[ProcessSpec], horizons: &[usize]) -> usize {
        let max_h = horizons.iter().copied().max().unwrap_or(0);
        self.warmup + self.burn_in_for(specs) + max_h
    }
}

/// Records and distance table from a rolling evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub records: Vec<EvalRecord>,
    pub distances: DistanceTable,
}

/// Rolls every process over the price history and scores forecasts against
/// implied (optional) and realized volatility.
///
/// Records are ordered by process, then date, then horizon.
pub fn rolling_evaluation(
    prices: &PriceSeries,
    implied: Option<&ImpliedVolSeries>,
    specs: &[ProcessSpec],
    horizons: &[usize],
    config: &EvalConfig,
) -> Result<Evaluation> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("no process to evaluate".into()));
    }
    if horizons.is_empty() || horizons.contains(&0) || horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "horizons must be positive and strictly increasing".into(),
        ));
    }
    if config.stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    for (i, s) in specs.iter().enumerate() {
        if specs[..i].iter().any(|o| o.label() == s.label()) {
            return Err(Error::InvalidParameter(format!(
                "duplicate process label {:?}",
                s.label()
            )));
        }
        if s.year_days() != config.year_days {
            return Err(Error::InvalidParameter(format!(
                "process {:?} annualizes with {} days, evaluation with {}",
                s.label(),
                s.year_days(),
                config.year_days
            )));
        }
    }
    let required = config.required_returns(specs, horizons);
    if prices.len() < 2 || prices.len() - 1 < required {
        return Err(Error::InsufficientSample {
            required,
            actual: prices.len().saturating_sub(1),
        });
    }
    let returns = log_returns(prices)?;
    let burn_in = config.burn_in_for(specs);
    let max_h = *horizons.last().expect("non-empty");

    let per_spec: Vec<Vec<EvalRecord>> = specs
        .par_iter()
        .map(|spec| -> Result<Vec<EvalRecord>> {
            let weights = forecast_weights(spec, max_h - 1);
            let mut state = init_state(spec, &returns.slice(0..config.warmup))?;
            let first = config.warmup + burn_in - 1;
            let rets = returns.returns();
            let dates = returns.dates();
            let mut out = Vec::new();
            for i in config.warmup..rets.len() {
                state.advance_to(spec, rets[i], dates[i]);
                if i < first || !(i - first).is_multiple_of(config.stride) {
                    continue;
                }
                for &h in horizons {
                    let realized = if i + h < rets.len() {
                        Some(realized_volatility_from(rets, i + 1, h, config.year_days)?)
                    } else {
                        None
                    };
                    out.push(EvalRecord {
                        date: dates[i],
                        spec: spec.label().to_string(),
                        horizon: h,
                        forecast_vol: forecasted_volatility(&state, spec, &weights, h)?,
                        implied_vol: implied.and_then(|iv| iv.value_on(dates[i], h)),
                        realized_vol: realized,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<EvalRecord> = per_spec.into_iter().flatten().collect();
    let labels: Vec<&str> = specs.iter().map(|s| s.label()).collect();
    let distances = DistanceTable::from_records(&records, &labels, horizons);
    Ok(Evaluation { records, distances })
}

/// All records on `date`, ordered as in the input.
pub fn snapshot(records: &[EvalRecord], date: NaiveDate) -> Result<Vec<EvalRecord>> {
    let rows: Vec<EvalRecord> = records.iter().filter(|r| r.date == date).cloned().collect();
    if rows.is_empty() {
        return Err(Error::DateOutOfRange(date));
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `date,spec,horizon,forecast,implied,realized`, missing values left empty.
pub fn write_records_csv<W: Write>(out: W, records: &[EvalRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["date", "spec", "horizon", "forecast", "implied", "realized"])?;
    for r in records {
        wtr.write_record([
            r.date.to_string(),
            r.spec.clone(),
            r.horizon.to_string(),
            r.forecast_vol.to_string(),
            opt(r.implied_vol),
            opt(r.realized_vol),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `spec,horizon,pair,mae,rmse,mae_log,n,effective_n`.
pub fn write_distances_csv<W: Write>(out: W, table: &DistanceTable) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "spec",
        "horizon",
        "pair",
        "mae",
        "rmse",
        "mae_log",
        "n",
        "effective_n",
    ])?;
    for r in &table.rows {
        wtr.write_record([
            r.spec.clone(),
            r.horizon.to_string(),
            r.pair.to_string(),
            r.mae.to_string(),
            r.rmse.to_string(),
            opt(r.mae_log),
            r.n.to_string(),
            r.effective_n.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Snapshot table `spec,horizon,forecast,implied,realized` for one date.
pub fn write_snapshot_csv<W: Write>(out: W, rows: &[EvalRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["spec", "horizon", "forecast", "implied", "realized"])?;
    for r in rows {
        wtr.write_record([
            r.spec.clone(),
            r.horizon.to_string(),
            r.forecast_vol.to_string(),
            opt(r.implied_vol),
            opt(r.realized_vol),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
