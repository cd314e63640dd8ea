//! Forecast weights, forward variance and forecasted volatility.
//!
//! Taking conditional expectations of the process equations gives
//!
//! ```text
//! E[sigma_k^2(t+1)] = mu_k E[sigma_k^2(t)] + (1 - mu_k) E[sigma_eff^2(t)]
//! ```
//!
//! so the vector `(sigma_1^2, .., sigma_n^2, sigma_inf^2)` evolves in
//! expectation under a row-stochastic matrix `M` whose last row keeps the
//! mean variance fixed. The forecast weights at step `h` are the row vector
//! `(w, w_inf) M^h`, computed by plain iteration:
//!
//! ```text
//! s(h)       = sum_k u_k(h) (1 - mu_k)
//! u_j(h+1)   = mu_j u_j(h) + w_j s(h)
//! u_inf(h+1) = u_inf(h) + w_inf s(h)
//! ```
//!
//! Step index `h` is the expected effective variance `h` steps ahead, i.e.
//! the conditional variance of the return at step `h + 1`. A horizon of
//! `ΔT` days therefore maps to step `ΔT - 1` for the forward variance, and
//! the forecasted variance over `ΔT` days averages steps `0..ΔT`.

use std::io::Write;

use chrono::NaiveDate;

use crate::arch_process::{ProcessSpec, VolState};
use crate::error::{Error, Result};

/// Per-step forecast weights for one process, for steps `0..=max_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastWeights {
    n: usize,
    // row h holds w_k(h), flattened
    component: Vec<f64>,
    mean: Vec<f64>,
    // running sums over steps 0..h (exclusive), for window averages
    cumulative: Vec<f64>,
    cumulative_mean: Vec<f64>,
}

impl ForecastWeights {
    /// Largest step index covered.
    pub fn max_step(&self) -> usize {
        self.mean.len() - 1
    }

    pub fn n_components(&self) -> usize {
        self.n
    }

    /// Component weights `w_k(h)` for step `h`.
    pub fn at_step(&self, h: usize) -> &[f64] {
        &self.component[h * self.n..(h + 1) * self.n]
    }

    /// Weight on the mean variance `w_inf(h) = 1 - sum_k w_k(h)`.
    pub fn mean_weight(&self, h: usize) -> f64 {
        self.mean[h]
    }

    /// Component weights for the forward variance at a horizon of
    /// `delta_t >= 1` days (step `delta_t - 1`).
    pub fn at_horizon(&self, delta_t: usize) -> &[f64] {
        assert!(delta_t >= 1, "horizon must be at least one day");
        self.at_step(delta_t - 1)
    }

    /// Average weights over steps `0..n`, the weights of the forecasted
    /// variance over an `n`-day window. Returns `(components, mean)`.
    pub fn window_average(&self, n: usize) -> (Vec<f64>, f64) {
        assert!(
            n >= 1 && n <= self.max_step() + 1,
            "window {n} outside weight table"
        );
        let inv = 1.0 / n as f64;
        let comps = self.cumulative[n * self.n..(n + 1) * self.n]
            .iter()
            .map(|c| c * inv)
            .collect();
        (comps, self.cumulative_mean[n] * inv)
    }

    fn check_step(&self, h: usize) -> Result<()> {
        if h > self.max_step() {
            return Err(Error::InvalidParameter(format!(
                "step {h} beyond weight table (max {})",
                self.max_step()
            )));
        }
        Ok(())
    }
}

/// Forecast weights for steps `0..=max_step`, with step 0 equal to the spec
/// weights.
pub fn forecast_weights(spec: &ProcessSpec, max_step: usize) -> ForecastWeights {
    let n = spec.n_components();
    let comps = spec.components();
    let w: Vec<f64> = comps.iter().map(|c| c.weight).collect();
    let w_inf = spec.w_inf();

    let rows = max_step + 1;
    let mut component = Vec::with_capacity(rows * n);
    let mut mean = Vec::with_capacity(rows);
    let mut cumulative = vec![0.0; n];
    let mut cumulative_mean = vec![0.0];

    let mut u = w.clone();
    let mut u_inf = w_inf;
    for h in 0..rows {
        component.extend_from_slice(&u);
        mean.push(u_inf);
        let prev = &cumulative[h * n..(h + 1) * n];
        let next: Vec<f64> = prev.iter().zip(&u).map(|(a, b)| a + b).collect();
        cumulative.extend(next);
        cumulative_mean.push(cumulative_mean[h] + u_inf);

        if h + 1 < rows {
            let s: f64 = u.iter().zip(comps).map(|(x, c)| x * (1.0 - c.mu)).sum();
            for ((uj, c), wj) in u.iter_mut().zip(comps).zip(&w) {
                *uj = c.mu * *uj + wj * s;
            }
            u_inf += w_inf * s;
        }
    }
    ForecastWeights {
        n,
        component,
        mean,
        cumulative,
        cumulative_mean,
    }
}

fn check(state: &VolState, spec: &ProcessSpec, weights: &ForecastWeights) -> Result<()> {
    state.check_matches(spec)?;
    if weights.n_components() != spec.n_components() {
        return Err(Error::StateMismatch {
            state: weights.n_components(),
            spec: spec.n_components(),
        });
    }
    Ok(())
}

#[inline]
fn combine(sigma_sq: &[f64], comps: &[f64], mean: f64, spec: &ProcessSpec) -> f64 {
    let inf = spec.sigma_inf_sq_per_step();
    let mixed: f64 = comps.iter().zip(sigma_sq).map(|(w, s)| w * s).sum();
    spec.year_days() * (mixed + mean * inf)
}

/// Annualized forward variance `A * E[sigma_eff^2(t + h)]`.
pub fn forward_variance(
    state: &VolState,
    spec: &ProcessSpec,
    weights: &ForecastWeights,
    h: usize,
) -> Result<f64> {
    check(state, spec, weights)?;
    weights.check_step(h)?;
    Ok(combine(
        state.sigma_sq(),
        weights.at_step(h),
        weights.mean_weight(h),
        spec,
    ))
}

/// Annualized forecast of the realized volatility over the next `n` steps:
/// the square root of the average forward variance over steps `0..n`.
pub fn forecasted_volatility(
    state: &VolState,
    spec: &ProcessSpec,
    weights: &ForecastWeights,
    n: usize,
) -> Result<f64> {
    Ok(forecasted_variance(state, spec, weights, n)?.sqrt())
}

/// Squared [`forecasted_volatility`].
pub fn forecasted_variance(
    state: &VolState,
    spec: &ProcessSpec,
    weights: &ForecastWeights,
    n: usize,
) -> Result<f64> {
    check(state, spec, weights)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "forecast window must be at least one day".into(),
        ));
    }
    weights.check_step(n - 1)?;
    let (comps, mean) = weights.window_average(n);
    Ok(combine(state.sigma_sq(), &comps, mean, spec))
}

/// One horizon of a forecast term structure. Variances and volatilities
/// are annualized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub horizon: usize,
    pub forward_variance: f64,
    pub forecast_variance: f64,
}

impl CurvePoint {
    pub fn forward_vol(&self) -> f64 {
        self.forward_variance.sqrt()
    }

    pub fn forecast_vol(&self) -> f64 {
        self.forecast_variance.sqrt()
    }
}

/// Forward variance and forecasted volatility across horizons, as of a date.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastCurve {
    pub as_of: Option<NaiveDate>,
    pub points: Vec<CurvePoint>,
}

/// Term structure at horizons given in days (ascending, each >= 1).
pub fn term_structure(
    state: &VolState,
    spec: &ProcessSpec,
    weights: &ForecastWeights,
    horizons: &[usize],
) -> Result<ForecastCurve> {
    if horizons.contains(&0) || horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "horizons must be positive and strictly increasing".into(),
        ));
    }
    let points = horizons
        .iter()
        .map(|&dt| {
            Ok(CurvePoint {
                horizon: dt,
                forward_variance: forward_variance(state, spec, weights, dt - 1)?,
                forecast_variance: forecasted_variance(state, spec, weights, dt)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForecastCurve {
        as_of: state.as_of(),
        points,
    })
}

/// Writes term structures in long format:
/// `date,spec,horizon_days,forward_vol,forecast_vol`.
pub fn write_curves_csv<W: Write>(out: W, curves: &[(&str, &ForecastCurve)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "date",
        "spec",
        "horizon_days",
        "forward_vol",
        "forecast_vol",
    ])?;
    for (label, curve) in curves {
        let date = curve.as_of.map(|d| d.to_string()).unwrap_or_default();
        for p in &curve.points {
            wtr.write_record([
                date.clone(),
                label.to_string(),
                p.horizon.to_string(),
                p.forward_vol().to_string(),
                p.forecast_vol().to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
