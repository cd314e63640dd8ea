//! Multi-component ARCH process definitions and the EMA variance cascade.
//!
//! A process is a set of EMA variances `sigma_k^2` at time scales `tau_k`,
//! combined into the effective variance
//!
//! ```text
//! sigma_eff^2 = sum_k w_k sigma_k^2 + w_inf sigma_inf^2,    sum_k w_k + w_inf = 1
//! sigma_k^2(t) = mu_k sigma_k^2(t-1) + (1 - mu_k) r^2(t),    mu_k = exp(-1 / tau_k)
//! ```
//!
//! State variances are per step (daily). `sigma_inf_sq` is stored annualized
//! and converted with the spec's year-day count where it is used.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::timeseries::{ReturnSeries, DEFAULT_YEAR_DAYS};

/// Minimum number of returns needed to seed a state.
pub const MIN_WARMUP: usize = 25;

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// One EMA component: time scale in days, decay and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub tau: f64,
    pub mu: f64,
    pub weight: f64,
}

impl Component {
    fn new(tau: f64, weight: f64) -> Self {
        Self {
            tau,
            mu: (-1.0 / tau).exp(),
            weight,
        }
    }
}

/// A multi-component ARCH process definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    label: String,
    components: Vec<Component>,
    w_inf: f64,
    sigma_inf_sq: f64,
    year_days: f64,
}

impl ProcessSpec {
    /// Builds a spec from `(tau_k, w_k)` pairs. `sigma_inf_sq` (annualized)
    /// is required iff `w_inf > 0`. Weights must sum to one with `w_inf`.
    pub fn new(
        label: impl Into<String>,
        taus_and_weights: &[(f64, f64)],
        w_inf: f64,
        sigma_inf_sq: Option<f64>,
    ) -> Result<Self> {
        if taus_and_weights.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one component required".into(),
            ));
        }
        for &(tau, w) in taus_and_weights {
            if !(tau >= 1.0) || !tau.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "tau must be >= 1 day, got {tau}"
                )));
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidParameter(format!(
                    "weight must be in [0, 1], got {w}"
                )));
            }
        }
        if taus_and_weights.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(Error::InvalidParameter(
                "tau must be strictly increasing".into(),
            ));
        }
        if !(0.0..1.0).contains(&w_inf) {
            return Err(Error::InvalidParameter(format!(
                "w_inf must be in [0, 1), got {w_inf}"
            )));
        }
        let sigma_inf_sq = match (w_inf > 0.0, sigma_inf_sq) {
            (true, Some(s)) if s > 0.0 && s.is_finite() => s,
            (true, _) => {
                return Err(Error::InvalidParameter(
                    "affine process (w_inf > 0) needs a positive sigma_inf_sq".into(),
                ))
            }
            (false, Some(s)) if s != 0.0 => {
                return Err(Error::InvalidParameter(
                    "sigma_inf_sq given for a linear process (w_inf = 0)".into(),
                ))
            }
            (false, _) => 0.0,
        };
        let total: f64 = taus_and_weights.iter().map(|c| c.1).sum::<f64>() + w_inf;
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        // absorb the residual rounding into the component weights
        let scale = (1.0 - w_inf) / (total - w_inf);
        let components = taus_and_weights
            .iter()
            .map(|&(tau, w)| Component::new(tau, w * scale))
            .collect();
        Ok(Self {
            label: label.into(),
            components,
            w_inf,
            sigma_inf_sq,
            year_days: DEFAULT_YEAR_DAYS,
        })
    }

    /// Replaces the business-day count used to annualize.
    pub fn with_year_days(mut self, year_days: f64) -> Result<Self> {
        if !(year_days > 0.0) || !year_days.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "year_days must be positive, got {year_days}"
            )));
        }
        self.year_days = year_days;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn w_inf(&self) -> f64 {
        self.w_inf
    }

    /// Annualized mean variance (zero for linear processes).
    pub fn sigma_inf_sq(&self) -> f64 {
        self.sigma_inf_sq
    }

    /// Mean variance in per-step units.
    pub fn sigma_inf_sq_per_step(&self) -> f64 {
        self.sigma_inf_sq / self.year_days
    }

    pub fn year_days(&self) -> f64 {
        self.year_days
    }

    pub fn is_linear(&self) -> bool {
        self.w_inf == 0.0
    }

    pub fn taus(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.tau).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn decays(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mu).collect()
    }

    /// Longest time scale in days.
    pub fn max_tau(&self) -> f64 {
        self.components.last().map_or(0.0, |c| c.tau)
    }
}

/// Normalized long-memory weights `(1 - ln tau_k / ln tau0) / C`.
fn log_decay_weights(taus: &[f64], tau0: f64) -> Result<Vec<f64>> {
    let raw = taus
        .iter()
        .map(|&tau| {
            let w = 1.0 - tau.ln() / tau0.ln();
            if w > 0.0 {
                Ok(w)
            } else {
                Err(Error::Tau0TooSmall { tau, tau0 })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let c: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / c).collect())
}

/// Long-memory ARCH: geometric time scales `tau1 * rho^(k-1)` up to `tau_n`
/// with logarithmically decaying weights.
pub fn build_lm_arch(tau1: f64, tau_n: f64, rho: f64, tau0: f64) -> Result<ProcessSpec> {
    if !(tau1 >= 1.0) || !(tau_n >= tau1) || !(rho > 1.0) || !(tau0 > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "LM-ARCH needs 1 <= tau1 <= tau_n, rho > 1 and tau0 > 1, got tau1={tau1}, tau_n={tau_n}, rho={rho}, tau0={tau0}"
        )));
    }
    let mut taus = Vec::new();
    let mut k = 0;
    loop {
        let tau = tau1 * rho.powi(k);
        // tolerate rounding in rho^k when tau_n sits exactly on the ladder
        if tau > tau_n * (1.0 + 1e-12) {
            break;
        }
        taus.push(tau.min(tau_n));
        k += 1;
    }
    let weights = log_decay_weights(&taus, tau0)?;
    let pairs: Vec<_> = taus.into_iter().zip(weights).collect();
    ProcessSpec::new("lm-arch", &pairs, 0.0, None)
}

/// I-GARCH(1): a single EMA with unit weight.
pub fn build_igarch1(tau: f64) -> Result<ProcessSpec> {
    ProcessSpec::new("igarch1", &[(tau, 1.0)], 0.0, None)
}

/// I-GARCH(2): two EMAs with long-memory weights.
pub fn build_igarch2(tau1: f64, tau2: f64, tau0: f64) -> Result<ProcessSpec> {
    if !(tau1 >= 1.0 && tau1 < tau2 && tau0 > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "I-GARCH(2) needs 1 <= tau1 < tau2 and tau0 > 1, got ({tau1}, {tau2}, {tau0})"
        )));
    }
    let weights = log_decay_weights(&[tau1, tau2], tau0)?;
    ProcessSpec::new(
        "igarch2",
        &[(tau1, weights[0]), (tau2, weights[1])],
        0.0,
        None,
    )
}

/// GARCH(1,1) as the one-component affine process. `sigma_inf_sq` is annualized.
pub fn build_garch11(tau1: f64, w_inf: f64, sigma_inf_sq: f64) -> Result<ProcessSpec> {
    if !(w_inf > 0.0 && w_inf < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "GARCH(1,1) needs 0 < w_inf < 1, got {w_inf} (use build_igarch1 for w_inf = 0)"
        )));
    }
    ProcessSpec::new("garch11", &[(tau1, 1.0 - w_inf)], w_inf, Some(sigma_inf_sq))
}

/// Per-step EMA variances of a process at a point in time.
#[derive(Debug, Clone, PartialEq)]
pub struct VolState {
    sigma_sq: Vec<f64>,
    as_of: Option<NaiveDate>,
    steps: u64,
}

impl VolState {
    pub fn new(sigma_sq: Vec<f64>, as_of: Option<NaiveDate>) -> Result<Self> {
        if let Some(v) = sigma_sq.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "state variances must be non-negative, got {v}"
            )));
        }
        Ok(Self {
            sigma_sq,
            as_of,
            steps: 0,
        })
    }

    /// Every component at the same per-step level. For linear processes this
    /// is a fixed point of the expected dynamics.
    pub fn uniform(spec: &ProcessSpec, level: f64) -> Result<Self> {
        Self::new(vec![level; spec.n_components()], None)
    }

    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    pub fn as_of(&self) -> Option<NaiveDate> {
        self.as_of
    }

    /// Number of updates applied since construction.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn check_matches(&self, spec: &ProcessSpec) -> Result<()> {
        if self.sigma_sq.len() != spec.n_components() {
            return Err(Error::StateMismatch {
                state: self.sigma_sq.len(),
                spec: spec.n_components(),
            });
        }
        Ok(())
    }

    /// In-place EMA update with the return of the next step.
    #[inline]
    pub fn advance(&mut self, spec: &ProcessSpec, r: f64) {
        debug_assert_eq!(self.sigma_sq.len(), spec.n_components());
        let r2 = r * r;
        for (s, c) in self.sigma_sq.iter_mut().zip(spec.components()) {
            *s = c.mu * *s + (1.0 - c.mu) * r2;
        }
        self.steps += 1;
    }

    /// Like [`advance`](Self::advance), stamping the new as-of date.
    pub fn advance_to(&mut self, spec: &ProcessSpec, r: f64, date: NaiveDate) {
        self.advance(spec, r);
        self.as_of = Some(date);
    }
}

/// Seeds every component with the mean squared return of the warmup window.
pub fn init_state(spec: &ProcessSpec, warmup: &ReturnSeries) -> Result<VolState> {
    if warmup.len() < MIN_WARMUP {
        return Err(Error::TooShort {
            required: MIN_WARMUP,
            actual: warmup.len(),
        });
    }
    let mean_sq = warmup.returns().iter().map(|r| r * r).sum::<f64>() / warmup.len() as f64;
    let mut state = VolState::uniform(spec, mean_sq)?;
    state.as_of = warmup.dates().last().copied();
    Ok(state)
}

/// One EMA step; the as-of date (if any) is left for the caller to stamp
/// via [`VolState::advance_to`].
pub fn update_state(state: &VolState, spec: &ProcessSpec, r: f64) -> VolState {
    let mut next = state.clone();
    next.advance(spec, r);
    next
}

/// `sum_k w_k sigma_k^2 + w_inf sigma_inf^2`, per step.
#[inline]
pub fn effective_variance(state: &VolState, spec: &ProcessSpec) -> f64 {
    effective_variance_of(state.sigma_sq(), spec)
}

#[inline]
pub(crate) fn effective_variance_of(sigma_sq: &[f64], spec: &ProcessSpec) -> f64 {
    let mixed: f64 = spec
        .components()
        .iter()
        .zip(sigma_sq)
        .map(|(c, s)| c.weight * s)
        .sum();
    mixed + spec.w_inf * spec.sigma_inf_sq_per_step()
}
