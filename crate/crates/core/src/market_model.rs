//! Linear market models for the forward-variance curve.
//!
//! The curve is `G(v; ΔT) = v_inf + sum_k w_k(ΔT) (v_k - v_inf)` with
//!
//! ```text
//! one factor:  w_1(ΔT) = w_1 e^{-ΔT/τ1}
//! two factors: w_1(ΔT) = w_1 e^{-ΔT/τ1}
//!              w_2(ΔT) = (-w_1 e^{-ΔT/τ1} + (w_1 + w_2) e^{-ΔT/τ2}) / (1 - τ1/τ2)
//! ```
//!
//! and factor dynamics
//!
//! ```text
//! one factor:  dv_1 = -(v_1 - v_inf) dt/τ1 + γ v_1^β dW
//! two factors: dv_1 = -(v_1 - v_2) dt/τ1 + γ v_1^β dW_1
//!              dv_2 = -(v_2 - v_inf) dt/τ2 + γ v_2^β dW_2
//! ```
//!
//! Horizons and time scales are in days; variances are annualized.

use std::io::Write;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::simulate::path_rng;
use crate::timeseries::DEFAULT_YEAR_DAYS;

/// Parameters of a one- or two-factor linear forward-variance model.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketModelSpec {
    taus: Vec<f64>,
    v_inf: f64,
    w: Vec<f64>,
    beta: f64,
    gamma: f64,
    year_days: f64,
}

impl MarketModelSpec {
    pub fn new(taus: Vec<f64>, v_inf: f64, w: Vec<f64>, beta: f64, gamma: f64) -> Result<Self> {
        if !(1..=2).contains(&taus.len()) || w.len() != taus.len() {
            return Err(Error::InvalidParameter(format!(
                "market model needs 1 or 2 factors with matching weights, got {} taus and {} weights",
                taus.len(),
                w.len()
            )));
        }
        if taus.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidParameter(
                "factor time scales must be positive".into(),
            ));
        }
        if taus.len() == 2 && !(taus[0] < taus[1]) {
            return Err(Error::InvalidParameter(format!(
                "two-factor model needs tau1 < tau2, got {} and {}",
                taus[0], taus[1]
            )));
        }
        if !(v_inf >= 0.0) || !v_inf.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "v_inf must be >= 0, got {v_inf}"
            )));
        }
        if !(0.5..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in [1/2, 1], got {beta}"
            )));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {gamma}"
            )));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite".into()));
        }
        Ok(Self {
            taus,
            v_inf,
            w,
            beta,
            gamma,
            year_days: DEFAULT_YEAR_DAYS,
        })
    }

    /// One-factor model with the usual identification `w_1 = 1`.
    pub fn one_factor(tau1: f64, v_inf: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![tau1], v_inf, vec![1.0], beta, gamma)
    }

    /// Two-factor model with the usual identification `(w_1, w_2) = (1, 0)`.
    pub fn two_factor(tau1: f64, tau2: f64, v_inf: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![tau1, tau2], v_inf, vec![1.0, 0.0], beta, gamma)
    }

    pub fn with_year_days(mut self, year_days: f64) -> Result<Self> {
        if !(year_days > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "year_days must be positive, got {year_days}"
            )));
        }
        self.year_days = year_days;
        Ok(self)
    }

    pub fn n_factors(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn v_inf(&self) -> f64 {
        self.v_inf
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn year_days(&self) -> f64 {
        self.year_days
    }

    /// Horizon-dependent loadings `w_k(ΔT)`.
    pub fn curve_weights(&self, delta_t: f64) -> Vec<f64> {
        let e1 = (-delta_t / self.taus[0]).exp();
        let w1 = self.w[0] * e1;
        if self.taus.len() == 1 {
            return vec![w1];
        }
        let e2 = (-delta_t / self.taus[1]).exp();
        let denom = 1.0 - self.taus[0] / self.taus[1];
        let w2 = (-self.w[0] * e1 + (self.w[0] + self.w[1]) * e2) / denom;
        vec![w1, w2]
    }

    /// Factor drifts per day: `-(v_1 - v_2)/τ1`, `-(v_2 - v_inf)/τ2` (two
    /// factors) or `-(v_1 - v_inf)/τ1` (one factor).
    pub fn drift(&self, factors: &[f64]) -> Vec<f64> {
        match self.taus.len() {
            1 => vec![-(factors[0] - self.v_inf) / self.taus[0]],
            _ => vec![
                -(factors[0] - factors[1]) / self.taus[0],
                -(factors[1] - self.v_inf) / self.taus[1],
            ],
        }
    }

    fn check_factors(&self, factors: &[f64]) -> Result<()> {
        if factors.len() != self.n_factors() {
            return Err(Error::StateMismatch {
                state: factors.len(),
                spec: self.n_factors(),
            });
        }
        Ok(())
    }
}

/// `G(v; ΔT)`, the model forward variance at horizon `delta_t` days.
pub fn curve_value(model: &MarketModelSpec, factors: &[f64], delta_t: f64) -> Result<f64> {
    model.check_factors(factors)?;
    Ok(curve_value_unchecked(model, factors, delta_t))
}

fn curve_value_unchecked(model: &MarketModelSpec, factors: &[f64], delta_t: f64) -> f64 {
    let v_inf = model.v_inf;
    model
        .curve_weights(delta_t)
        .iter()
        .zip(factors)
        .fold(v_inf, |acc, (w, v)| acc + w * (v - v_inf))
}

/// An observed forward-variance curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCurveObs {
    horizons: Vec<f64>,
    variances: Vec<f64>,
}

impl ForwardCurveObs {
    pub fn new(horizons: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if horizons.len() != variances.len() {
            return Err(Error::LengthMismatch {
                left: horizons.len(),
                right: variances.len(),
            });
        }
        if horizons.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "curve horizons must be non-decreasing".into(),
            ));
        }
        if let Some(v) = variances.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "forward variances must be non-negative, got {v}"
            )));
        }
        Ok(Self {
            horizons,
            variances,
        })
    }

    pub fn horizons(&self) -> &[f64] {
        &self.horizons
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn len(&self) -> usize {
        self.horizons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horizons.is_empty()
    }
}

/// Least-squares factor estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorFit {
    pub factors: Vec<f64>,
    pub rms_residual: f64,
    /// Set when some fitted factor is negative. The fit itself is kept.
    pub negative_factor: bool,
}

/// Fits the factors `v_k` of a model with fixed time scales and `v_inf` to an
/// observed curve by linear least squares.
pub fn fit_factors(model: &MarketModelSpec, obs: &ForwardCurveObs) -> Result<FactorFit> {
    let k = model.n_factors();
    let m = obs.len();
    if m < k {
        return Err(Error::TooShort {
            required: k,
            actual: m,
        });
    }
    let v_inf = model.v_inf;
    let mut design = DMatrix::<f64>::zeros(m, k);
    let mut target = DVector::<f64>::zeros(m);
    for (i, (&dt, &y)) in obs.horizons().iter().zip(obs.variances()).enumerate() {
        let w = model.curve_weights(dt);
        let mut loading = 0.0;
        for (j, wj) in w.iter().enumerate() {
            design[(i, j)] = *wj;
            loading += wj;
        }
        target[i] = y - v_inf * (1.0 - loading);
    }

    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10 * (m.max(k) as f64);
    if !(smax > 0.0) || svd.singular_values.iter().any(|s| *s <= tol) {
        return Err(Error::RankDeficient);
    }
    let solution = svd
        .solve(&target, tol)
        .map_err(|e| Error::InvalidParameter(format!("least squares: {e}")))?;
    let residual = &design * &solution - &target;
    let rms_residual = (residual.norm_squared() / m as f64).sqrt();
    let factors: Vec<f64> = solution.iter().copied().collect();
    let negative_factor = factors.iter().any(|v| *v < 0.0);
    Ok(FactorFit {
        factors,
        rms_residual,
        negative_factor,
    })
}

/// Central-difference derivative of `f` at `x` with step `h`.
fn central_diff(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Residual of the martingale compatibility condition for a linear curve,
/// `|∂_ΔT G - sum_i mu_i ∂_{v_i} G|`, using central differences with a
/// relative step `fd_step` on each coordinate.
pub fn compatibility_residual(
    model: &MarketModelSpec,
    factors: &[f64],
    delta_t: f64,
    fd_step: f64,
) -> Result<f64> {
    model.check_factors(factors)?;
    compatibility_residual_of(
        |v, dt| curve_value_unchecked(model, v, dt),
        model,
        factors,
        delta_t,
        fd_step,
    )
}

/// [`compatibility_residual`] for an arbitrary curve function `curve(v, ΔT)`
/// paired with the drifts of `model`.
pub fn compatibility_residual_of(
    curve: impl Fn(&[f64], f64) -> f64,
    model: &MarketModelSpec,
    factors: &[f64],
    delta_t: f64,
    fd_step: f64,
) -> Result<f64> {
    model.check_factors(factors)?;
    if !(fd_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "fd_step must be positive, got {fd_step}"
        )));
    }
    let step = |x: f64| fd_step * x.abs().max(1.0);
    let d_dt = central_diff(|t| curve(factors, t), delta_t, step(delta_t));
    let drift = model.drift(factors);
    let mut transport = 0.0;
    for (i, mu) in drift.iter().enumerate() {
        let mut bumped = factors.to_vec();
        let d_dv = central_diff(
            |x| {
                bumped[i] = x;
                curve(&bumped, delta_t)
            },
            factors[i],
            step(factors[i]),
        );
        transport += mu * d_dv;
    }
    Ok((d_dt - transport).abs())
}

/// Euler–Maruyama with full truncation for the factor SDEs. `dt` is in
/// years; time scales are converted with the model's year-day count.
/// Returns `n_steps + 1` rows, row 0 being `initial`.
pub fn simulate_market_model(
    model: &MarketModelSpec,
    initial: &[f64],
    n_steps: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    simulate_market_model_path(model, initial, n_steps, dt, seed, 0)
}

/// [`simulate_market_model`] on path stream `path` of `seed`.
pub fn simulate_market_model_path(
    model: &MarketModelSpec,
    initial: &[f64],
    n_steps: usize,
    dt: f64,
    seed: u64,
    path: u64,
) -> Result<Vec<Vec<f64>>> {
    model.check_factors(initial)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if let Some(v) = initial.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "initial factors must be positive, got {v}"
        )));
    }
    let mut rng = path_rng(seed, path);
    // drift() is per day; scale by days per step
    let dt_days = dt * model.year_days;
    let sqrt_dt = dt.sqrt();
    let mut v = initial.to_vec();
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(v.clone());
    for _ in 0..n_steps {
        let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
        let drift = model.drift(&clipped);
        for ((vk, ck), mu) in v.iter_mut().zip(&clipped).zip(&drift) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *vk += mu * dt_days + model.gamma * ck.powf(model.beta) * sqrt_dt * z;
        }
        out.push(v.clone());
    }
    Ok(out)
}

/// Writes fitted factors as `date,v1[,v2],residual`.
pub fn write_fits_csv<W: Write>(
    out: W,
    n_factors: usize,
    fits: &[(NaiveDate, FactorFit)],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string()];
    header.extend((1..=n_factors).map(|k| format!("v{k}")));
    header.push("residual".into());
    wtr.write_record(&header)?;
    for (date, fit) in fits {
        let mut row = vec![date.to_string()];
        row.extend(fit.factors.iter().map(|v| v.to_string()));
        row.push(fit.rms_residual.to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_factor_fixed_point() {
        let m = MarketModelSpec::one_factor(20.0, 0.04, 0.5, 0.3).unwrap();
        for dt in [0.0, 1.0, 10.0, 500.0] {
            assert_eq!(curve_value(&m, &[0.04], dt).unwrap(), 0.04);
        }
    }

    #[test]
    fn two_factor_at_zero_horizon() {
        let m = MarketModelSpec::two_factor(4.0, 64.0, 0.04, 0.5, 0.3).unwrap();
        assert_eq!(m.curve_weights(0.0), vec![1.0, 0.0]);
        assert_relative_eq!(
            curve_value(&m, &[0.09, 0.02], 0.0).unwrap(),
            0.09,
            epsilon = 1e-16
        );
    }

    #[test]
    fn two_factor_long_horizon_reverts() {
        let m = MarketModelSpec::two_factor(4.0, 64.0, 0.04, 0.5, 0.3).unwrap();
        let g = curve_value(&m, &[0.09, 0.02], 5000.0).unwrap();
        assert!((g - 0.04).abs() < 1e-15);
        let w = m.curve_weights(5000.0);
        assert!((w[0] + w[1]).abs() < 1e-30);
    }

    #[test]
    fn two_factor_weights_reference_point() {
        // independent evaluation at (tau1, tau2) = (4, 64), ΔT = 4
        let m = MarketModelSpec::two_factor(4.0, 64.0, 0.04, 0.5, 0.3).unwrap();
        let w = m.curve_weights(4.0);
        assert_relative_eq!(w[0], 0.36787944117144233, max_relative = 1e-15);
        // 30-digit mpmath: (-e^-1 + e^-1/16) / (15/16)
        assert_relative_eq!(w[1], 0.6096358630848357, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(MarketModelSpec::two_factor(64.0, 4.0, 0.04, 0.5, 0.3).is_err());
        assert!(MarketModelSpec::two_factor(4.0, 4.0, 0.04, 0.5, 0.3).is_err());
        assert!(MarketModelSpec::one_factor(4.0, 0.04, 0.4, 0.3).is_err());
        assert!(MarketModelSpec::one_factor(4.0, 0.04, 0.5, -1.0).is_err());
        let m = MarketModelSpec::one_factor(4.0, 0.04, 0.5, 0.3).unwrap();
        assert!(curve_value(&m, &[0.01, 0.02], 1.0).is_err());
    }

    fn horizons() -> Vec<f64> {
        vec![5.0, 10.0, 21.0, 42.0, 63.0, 126.0, 252.0]
    }

    #[test]
    fn exact_curve_is_recovered() {
        let m = MarketModelSpec::two_factor(10.0, 120.0, 0.03, 0.5, 0.2).unwrap();
        let truth = [0.06, 0.02];
        let vars: Vec<f64> = horizons()
            .iter()
            .map(|dt| curve_value(&m, &truth, *dt).unwrap())
            .collect();
        let fit = fit_factors(&m, &ForwardCurveObs::new(horizons(), vars).unwrap()).unwrap();
        for (a, b) in fit.factors.iter().zip(truth) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(fit.rms_residual < 1e-14);
        assert!(!fit.negative_factor);
    }

    #[test]
    fn flat_curve_at_v_inf() {
        for m in [
            MarketModelSpec::one_factor(10.0, 0.03, 0.5, 0.2).unwrap(),
            MarketModelSpec::two_factor(10.0, 120.0, 0.03, 0.5, 0.2).unwrap(),
        ] {
            let obs = ForwardCurveObs::new(horizons(), vec![0.03; 7]).unwrap();
            let fit = fit_factors(&m, &obs).unwrap();
            for v in &fit.factors {
                assert!((v - 0.03).abs() < 1e-12);
            }
            assert!(fit.rms_residual < 1e-15);
        }
    }

    #[test]
    fn rank_deficient_design() {
        let m = MarketModelSpec::two_factor(10.0, 120.0, 0.03, 0.5, 0.2).unwrap();
        let obs = ForwardCurveObs::new(vec![21.0; 4], vec![0.04; 4]).unwrap();
        assert!(matches!(fit_factors(&m, &obs), Err(Error::RankDeficient)));
        let short = ForwardCurveObs::new(vec![21.0], vec![0.04]).unwrap();
        assert!(matches!(
            fit_factors(&m, &short),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn negative_factor_flagged() {
        let m = MarketModelSpec::two_factor(10.0, 120.0, 0.03, 0.5, 0.2).unwrap();
        let truth = [-0.01, 0.05];
        let vars: Vec<f64> = horizons()
            .iter()
            .map(|dt| curve_value(&m, &truth, *dt).unwrap().max(0.0))
            .collect();
        let fit = fit_factors(&m, &ForwardCurveObs::new(horizons(), vars).unwrap()).unwrap();
        assert!(fit.negative_factor);
    }

    #[test]
    fn fit_invariant_under_span_shift() {
        let m = MarketModelSpec::two_factor(10.0, 120.0, 0.03, 0.5, 0.2).unwrap();
        let vars = vec![0.05, 0.045, 0.05, 0.041, 0.038, 0.036, 0.031];
        let obs = ForwardCurveObs::new(horizons(), vars.clone()).unwrap();
        let base = fit_factors(&m, &obs).unwrap();
        let delta = [0.01, -0.004];
        let shifted: Vec<f64> = horizons()
            .iter()
            .zip(&vars)
            .map(|(dt, y)| {
                let w = m.curve_weights(*dt);
                y + w[0] * delta[0] + w[1] * delta[1]
            })
            .collect();
        let fit = fit_factors(&m, &ForwardCurveObs::new(horizons(), shifted).unwrap()).unwrap();
        assert!((fit.rms_residual - base.rms_residual).abs() < 1e-14);
        for ((f, b), d) in fit.factors.iter().zip(&base.factors).zip(&delta) {
            assert!((f - b - d).abs() < 1e-12);
        }
    }

    #[test]
    fn compatibility_holds_for_both_models() {
        let one = MarketModelSpec::one_factor(12.0, 0.03, 0.5, 0.2).unwrap();
        let two = MarketModelSpec::two_factor(4.0, 64.0, 0.03, 0.5, 0.2).unwrap();
        for dt in [0.0, 1.0, 7.5, 63.0] {
            assert!(compatibility_residual(&one, &[0.05], dt, 1e-3).unwrap() < 1e-6);
            assert!(compatibility_residual(&two, &[0.05, 0.01], dt, 1e-3).unwrap() < 1e-6);
        }
    }

    #[test]
    fn mutated_curve_fails_compatibility() {
        let two = MarketModelSpec::two_factor(4.0, 64.0, 0.03, 0.5, 0.2).unwrap();
        let wrong = |v: &[f64], dt: f64| {
            let e1 = (-dt / 4.0).exp();
            let e2 = (-dt / 64.0).exp();
            // denominator should be 1 - tau1/tau2
            let w2 = (-e1 + e2) / (1.0 - 64.0 / 4.0);
            0.03 + e1 * (v[0] - 0.03) + w2 * (v[1] - 0.03)
        };
        let r = compatibility_residual_of(wrong, &two, &[0.09, 0.01], 2.0, 1e-3).unwrap();
        assert!(r > 1e-3, "{r}");
    }

    #[test]
    fn curve_is_affine_in_factors() {
        let m = MarketModelSpec::two_factor(4.0, 64.0, 0.03, 0.5, 0.2).unwrap();
        for dt in [0.0, 3.0, 30.0] {
            let d1 = curve_value(&m, &[0.05 + 0.01, 0.02], dt).unwrap()
                - curve_value(&m, &[0.05, 0.02], dt).unwrap();
            let d2 = curve_value(&m, &[0.2 + 0.01, 0.07], dt).unwrap()
                - curve_value(&m, &[0.2, 0.07], dt).unwrap();
            assert!((d1 - d2).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_one_factor_relaxation() {
        let m = MarketModelSpec::one_factor(20.0, 0.04, 0.5, 0.0).unwrap();
        let dt = 0.01 / 260.0;
        let n = 100 * 60;
        let path = simulate_market_model(&m, &[0.09], n, dt, 1).unwrap();
        // after 60 days: v_inf + (v0 - v_inf) e^{-60/20}, Euler error O(dt/tau)
        let exact = 0.04 + 0.05 * (-3.0f64).exp();
        assert!(
            (path[n][0] - exact).abs() < 1e-5,
            "{} vs {exact}",
            path[n][0]
        );
    }

    #[test]
    fn deterministic_two_factor_cascade() {
        let m = MarketModelSpec::two_factor(5.0, 50.0, 0.04, 0.5, 0.0).unwrap();
        let path = simulate_market_model(&m, &[0.16, 0.01], 2000, 1.0 / 260.0, 1).unwrap();
        // v1 pulled toward v2 first, then both toward v_inf
        assert!(path[5][0] < 0.16 && path[5][1] > 0.01);
        let last = &path[2000];
        assert!((last[0] - 0.04).abs() < 1e-6 && (last[1] - 0.04).abs() < 1e-6);
    }

    #[test]
    fn heston_like_long_run_mean() {
        let m = MarketModelSpec::one_factor(10.0, 0.04, 0.5, 0.5).unwrap();
        let path = simulate_market_model(&m, &[0.04], 400_000, 1.0 / 260.0, 3).unwrap();
        let burn = 1000;
        let xs: Vec<f64> = path[burn..].iter().map(|r| r[0]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        // batch means for the autocorrelated series
        let batch = 2000;
        let means: Vec<f64> = xs
            .chunks_exact(batch)
            .map(|c| c.iter().sum::<f64>() / batch as f64)
            .collect();
        let (_, se) = crate::simulate::mean_and_se(&means);
        assert!((mean - 0.04).abs() < 4.0 * se + 1e-4, "{mean} +- {se}");
    }

    #[test]
    fn fits_csv_layout() {
        let fit = FactorFit {
            factors: vec![0.01, 0.02],
            rms_residual: 0.0,
            negative_factor: false,
        };
        let mut buf = Vec::new();
        write_fits_csv(
            &mut buf,
            2,
            &[(NaiveDate::from_ymd_opt(2003, 1, 2).unwrap(), fit)],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "date,v1,v2,residual\n2003-01-02,0.01,0.02,0\n");
    }
}
