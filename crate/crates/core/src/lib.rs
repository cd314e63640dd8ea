//! Multi-component ARCH volatility processes and the forecasts they induce.
//!
//! The crate is organised around the life cycle of a volatility forecast:
//!
//! - [`timeseries`]: price / implied-volatility ingestion, log returns and
//!   realized volatility.
//! - [`arch_process`]: process definitions (I-GARCH(1), I-GARCH(2),
//!   GARCH(1,1), long-memory ARCH) and the EMA variance cascade.
//! - [`forecast`]: horizon-dependent forecast weights, forward variance and
//!   forecasted volatility term structures.
//! - [`simulate`]: Monte Carlo engines for the return-level process and the
//!   induced variance process, plus martingale checks.
//! - [`market_model`]: linear one- and two-factor forward-variance curve
//!   models, factor fitting and factor SDE simulation.
//! - [`evaluate`]: rolling forecast / implied / realized triples and
//!   distance statistics.
//!
//! Internally all variances are per-step (daily). Annualization by the
//! year-day count happens only when values are reported.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arch_process;
pub mod error;
pub mod evaluate;
pub mod forecast;
pub mod market_model;
pub mod simulate;
pub mod timeseries;

pub use arch_process::{
    build_garch11, build_igarch1, build_igarch2, build_lm_arch, effective_variance, init_state,
    update_state, Component, ProcessSpec, VolState,
};
pub use error::{Error, Result};
pub use evaluate::{
    mae, mae_log, rmse, rolling_evaluation, snapshot, DistanceRow, DistanceTable, EvalConfig,
    EvalRecord, Evaluation, Pair,
};
pub use forecast::{
    forecast_weights, forecasted_volatility, forward_variance, term_structure, CurvePoint,
    ForecastCurve, ForecastWeights,
};
pub use market_model::{
    compatibility_residual, curve_value, fit_factors, simulate_market_model, FactorFit,
    ForwardCurveObs, MarketModelSpec,
};
pub use simulate::{
    chi_from_epsilon, martingale_check, simulate_induced_variance, simulate_returns,
    InducedVariance, InnovationDist, MartingaleReport, SimPath,
};
pub use timeseries::{
    load_csv, log_returns, realized_volatility, write_prices, CsvSchema, ImpliedVolSeries,
    LoadedSeries, PriceSeries, ReturnSeries, DEFAULT_YEAR_DAYS,
};
