//! Monte Carlo engines for multi-component ARCH processes.
//!
//! Two views of the same dynamics are provided:
//!
//! - the return-level process `r(t+1) = sigma_eff(t) eps(t+1)` driving the
//!   EMA cascade ([`simulate_returns`]);
//! - the induced variance process on annualized `v_k = A sigma_k^2`, driven by
//!   `chi = eps^2 - 1` ([`simulate_induced_variance`]):
//!
//! ```text
//! v_k(t) = v_k(t-1) + (1 - mu_k) { (chi(t) + 1) v_eff(t-1) - v_k(t-1) }
//! v_eff  = sum_k w_k v_k + w_inf v_inf
//! ```
//!
//! Random streams are ChaCha8 keyed by the run seed, with one stream per
//! path index, so paths are reproducible independently of scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use rayon::prelude::*;

use crate::arch_process::{effective_variance_of, ProcessSpec, VolState};
use crate::error::{Error, Result};
use crate::forecast::{forecast_weights, forward_variance};

/// Generator for path `path` of a run seeded with `seed`.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Unit-variance innovation distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnovationDist {
    Gaussian,
    /// Student-t rescaled by `sqrt((dof - 2) / dof)`.
    StudentT {
        dof: f64,
    },
    /// `eps = 0` on every step. Test hook.
    Zero,
}

impl InnovationDist {
    pub fn student_t(dof: f64) -> Result<Self> {
        if !(dof > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "student-t needs dof > 2 for unit variance, got {dof}"
            )));
        }
        Ok(InnovationDist::StudentT { dof })
    }

    /// Frozen sampler; builds the underlying distribution once.
    pub fn sampler(&self) -> Result<Sampler> {
        Ok(match *self {
            InnovationDist::Gaussian => Sampler::Gaussian,
            InnovationDist::StudentT { dof } => {
                if !(dof > 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "student-t needs dof > 2 for unit variance, got {dof}"
                    )));
                }
                let dist = StudentT::new(dof)
                    .map_err(|e| Error::InvalidParameter(format!("student-t: {e}")))?;
                Sampler::StudentT {
                    dist,
                    scale: ((dof - 2.0) / dof).sqrt(),
                }
            }
            InnovationDist::Zero => Sampler::Zero,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Sampler {
    Gaussian,
    StudentT { dist: StudentT<f64>, scale: f64 },
    Zero,
}

impl Sampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Gaussian => rng.sample(StandardNormal),
            Sampler::StudentT { dist, scale } => scale * dist.sample(rng),
            Sampler::Zero => 0.0,
        }
    }
}

/// A simulated return path together with the variance trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPath {
    pub seed: u64,
    /// `eps(t)` for `t = 1..=n_steps`.
    pub innovations: Vec<f64>,
    /// `r(t)` for `t = 1..=n_steps`.
    pub returns: Vec<f64>,
    /// Per-step `sigma_k^2(t)` for `t = 0..=n_steps`; row 0 is the initial state.
    pub sigma_sq: Vec<Vec<f64>>,
    /// `sigma_eff^2(t)` for `t = 0..=n_steps`.
    pub sigma_eff_sq: Vec<f64>,
}

impl SimPath {
    pub fn n_steps(&self) -> usize {
        self.returns.len()
    }

    /// State after the last step.
    pub fn final_state(&self) -> VolState {
        VolState::new(self.sigma_sq.last().cloned().unwrap_or_default(), None)
            .expect("simulated variances are non-negative")
    }
}

/// Simulates `n_steps` returns from `initial` using stream 0 of `seed`.
pub fn simulate_returns(
    spec: &ProcessSpec,
    dist: InnovationDist,
    n_steps: usize,
    seed: u64,
    initial: &VolState,
) -> Result<SimPath> {
    let mut rng = path_rng(seed, 0);
    let mut path = simulate_returns_with(spec, &dist.sampler()?, n_steps, &mut rng, initial)?;
    path.seed = seed;
    Ok(path)
}

/// Like [`simulate_returns`] with a caller-provided generator.
pub fn simulate_returns_with<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    sampler: &Sampler,
    n_steps: usize,
    rng: &mut R,
    initial: &VolState,
) -> Result<SimPath> {
    initial.check_matches(spec)?;
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be at least 1".into()));
    }
    let mut state = initial.clone();
    let mut innovations = Vec::with_capacity(n_steps);
    let mut returns = Vec::with_capacity(n_steps);
    let mut sigma_sq = Vec::with_capacity(n_steps + 1);
    let mut sigma_eff_sq = Vec::with_capacity(n_steps + 1);
    let mut eff = effective_variance_of(state.sigma_sq(), spec);
    sigma_sq.push(state.sigma_sq().to_vec());
    sigma_eff_sq.push(eff);
    for _ in 0..n_steps {
        let eps = sampler.sample(rng);
        let r = eff.sqrt() * eps;
        state.advance(spec, r);
        eff = effective_variance_of(state.sigma_sq(), spec);
        innovations.push(eps);
        returns.push(r);
        sigma_sq.push(state.sigma_sq().to_vec());
        sigma_eff_sq.push(eff);
    }
    Ok(SimPath {
        seed: 0,
        innovations,
        returns,
        sigma_sq,
        sigma_eff_sq,
    })
}

/// Advances `state` by `n_steps` simulated returns without recording the path.
pub fn evolve_state<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    sampler: &Sampler,
    n_steps: usize,
    rng: &mut R,
    state: &mut VolState,
) {
    for _ in 0..n_steps {
        let eff = effective_variance_of(state.sigma_sq(), spec);
        let r = eff.sqrt() * sampler.sample(rng);
        state.advance(spec, r);
    }
}

/// Centered squared innovation `eps^2 - 1`.
#[inline]
pub fn chi_from_epsilon(eps: f64) -> f64 {
    eps * eps - 1.0
}

/// Stepper for the induced variance process on annualized variances.
#[derive(Debug, Clone)]
pub struct InducedVariance<'a> {
    spec: &'a ProcessSpec,
    v: Vec<f64>,
    step: usize,
}

impl<'a> InducedVariance<'a> {
    pub fn new(spec: &'a ProcessSpec, initial_v: &[f64]) -> Result<Self> {
        if initial_v.len() != spec.n_components() {
            return Err(Error::StateMismatch {
                state: initial_v.len(),
                spec: spec.n_components(),
            });
        }
        if let Some(v) = initial_v.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "initial variances must be non-negative, got {v}"
            )));
        }
        Ok(Self {
            spec,
            v: initial_v.to_vec(),
            step: 0,
        })
    }

    /// Annualized `v_eff = sum_k w_k v_k + w_inf v_inf`.
    pub fn v_eff(&self) -> f64 {
        let mixed: f64 = self
            .spec
            .components()
            .iter()
            .zip(&self.v)
            .map(|(c, v)| c.weight * v)
            .sum();
        mixed + self.spec.w_inf() * self.spec.sigma_inf_sq()
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Applies one step driven by `chi`; `chi < -1` is rejected.
    pub fn step(&mut self, chi: f64) -> Result<()> {
        self.step += 1;
        if !(chi >= -1.0) {
            return Err(Error::ChiBelowBoundary {
                step: self.step,
                value: chi,
            });
        }
        let v_eff = self.v_eff();
        for (vk, c) in self.v.iter_mut().zip(self.spec.components()) {
            *vk += (1.0 - c.mu) * ((chi + 1.0) * v_eff - *vk);
        }
        Ok(())
    }
}

/// Runs the induced variance process over a `chi` sequence. Row 0 of the
/// result is `initial_v`; row `t` is the state after `chi[t-1]`.
pub fn simulate_induced_variance(
    spec: &ProcessSpec,
    chi: &[f64],
    initial_v: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let mut sim = InducedVariance::new(spec, initial_v)?;
    let mut out = Vec::with_capacity(chi.len() + 1);
    out.push(sim.v().to_vec());
    for &x in chi {
        sim.step(x)?;
        out.push(sim.v().to_vec());
    }
    Ok(out)
}

/// Result of a Monte Carlo martingale test on the forward variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleReport {
    /// `v(t, T)` from the initial state.
    pub expected: f64,
    /// Sample mean of `v(t', T)` over paths.
    pub mean: f64,
    pub std_error: f64,
    /// `|mean - expected| / std_error` (0 when both the gap and SE vanish).
    pub z: f64,
    pub n_paths: usize,
}

/// Sample mean and standard error of per-path values, summed in path order.
pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Checks `E[v(t', T) | t] = v(t, T)` by simulating `n_paths` Gaussian paths
/// for `t_prime` steps and re-forecasting the variance at step `horizon`.
pub fn martingale_check(
    spec: &ProcessSpec,
    initial: &VolState,
    t_prime: usize,
    horizon: usize,
    n_paths: usize,
    seed: u64,
) -> Result<MartingaleReport> {
    martingale_check_with(
        spec,
        InnovationDist::Gaussian,
        initial,
        t_prime,
        horizon,
        n_paths,
        seed,
    )
}

pub fn martingale_check_with(
    spec: &ProcessSpec,
    dist: InnovationDist,
    initial: &VolState,
    t_prime: usize,
    horizon: usize,
    n_paths: usize,
    seed: u64,
) -> Result<MartingaleReport> {
    initial.check_matches(spec)?;
    if t_prime > horizon {
        return Err(Error::InvalidParameter(format!(
            "t_prime ({t_prime}) must not exceed T ({horizon})"
        )));
    }
    if n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be positive".into()));
    }
    let weights = forecast_weights(spec, horizon);
    let expected = forward_variance(initial, spec, &weights, horizon)?;
    let sampler = dist.sampler()?;
    let remaining = horizon - t_prime;
    let values: Vec<f64> = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p);
            let mut state = initial.clone();
            evolve_state(spec, &sampler, t_prime, &mut rng, &mut state);
            forward_variance(&state, spec, &weights, remaining)
        })
        .collect::<Result<_>>()?;
    let (mean, std_error) = mean_and_se(&values);
    let gap = (mean - expected).abs();
    // identical paths can still differ from `expected` by summation rounding
    let z = if gap <= 1e-13 * expected.abs() {
        0.0
    } else if std_error > 0.0 {
        gap / std_error
    } else {
        f64::INFINITY
    };
    Ok(MartingaleReport {
        expected,
        mean,
        std_error,
        z,
        n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch_process::{build_igarch1, build_igarch2, build_lm_arch};

    fn lm() -> ProcessSpec {
        build_lm_arch(4.0, 512.0, 2f64.sqrt(), 1560.0).unwrap()
    }

    #[test]
    fn zero_innovations_decay_geometrically() {
        let spec = build_igarch2(4.0, 512.0, 1560.0).unwrap();
        let init = VolState::uniform(&spec, 1e-4).unwrap();
        let path = simulate_returns(&spec, InnovationDist::Zero, 50, 1, &init).unwrap();
        assert!(path.returns.iter().all(|r| *r == 0.0));
        for (t, row) in path.sigma_sq.iter().enumerate() {
            for (s, c) in row.iter().zip(spec.components()) {
                let expected = 1e-4 * c.mu.powi(t as i32);
                assert!((s - expected).abs() <= 1e-14 * expected);
            }
        }
    }

    #[test]
    fn same_seed_same_path() {
        let spec = lm();
        let init = VolState::uniform(&spec, 1e-4).unwrap();
        let a = simulate_returns(&spec, InnovationDist::Gaussian, 500, 9, &init).unwrap();
        let b = simulate_returns(&spec, InnovationDist::Gaussian, 500, 9, &init).unwrap();
        assert_eq!(a, b);
        let c = simulate_returns(&spec, InnovationDist::Gaussian, 500, 10, &init).unwrap();
        assert_ne!(a.returns, c.returns);
    }

    #[test]
    fn path_replays_through_ema_recursion() {
        let spec = lm();
        let init = VolState::uniform(&spec, 1e-4).unwrap();
        let path = simulate_returns(
            &spec,
            InnovationDist::student_t(5.0).unwrap(),
            300,
            2,
            &init,
        )
        .unwrap();
        let mut state = init.clone();
        for (t, r) in path.returns.iter().enumerate() {
            let eff = effective_variance_of(state.sigma_sq(), &spec);
            assert_eq!(*r, eff.sqrt() * path.innovations[t]);
            state.advance(&spec, *r);
            assert_eq!(state.sigma_sq(), path.sigma_sq[t + 1].as_slice());
        }
    }

    #[test]
    fn igarch1_returns_are_fat_tailed() {
        let spec = build_igarch1(16.0).unwrap();
        let init = VolState::uniform(&spec, 1e-4).unwrap();
        let path = simulate_returns(&spec, InnovationDist::Gaussian, 1_000_000, 21, &init).unwrap();
        let n = path.returns.len() as f64;
        let m2 = path.returns.iter().map(|r| r * r).sum::<f64>() / n;
        let m4 = path.returns.iter().map(|r| r.powi(4)).sum::<f64>() / n;
        let kurtosis = m4 / (m2 * m2);
        assert!(kurtosis > 3.0, "kurtosis {kurtosis}");
    }

    #[test]
    fn student_t_has_unit_variance() {
        let sampler = InnovationDist::student_t(5.0).unwrap().sampler().unwrap();
        let mut rng = path_rng(4, 0);
        let n = 400_000;
        let draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let var = draws.iter().map(|x| x * x).sum::<f64>() / n as f64;
        // var of eps^2 is infinite-ish for dof 5; loose bound
        assert!((var - 1.0).abs() < 0.05, "{var}");
        assert!(InnovationDist::student_t(2.0).is_err());
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi_from_epsilon(1.0), 0.0);
        assert_eq!(chi_from_epsilon(0.0), -1.0);
        assert_eq!(chi_from_epsilon(-2.0), 3.0);
    }

    #[test]
    fn chi_has_zero_mean() {
        let sampler = InnovationDist::Gaussian.sampler().unwrap();
        let mut rng = path_rng(12, 0);
        let chi: Vec<f64> = (0..1_000_000)
            .map(|_| chi_from_epsilon(sampler.sample(&mut rng)))
            .collect();
        let (mean, se) = mean_and_se(&chi);
        assert!(mean.abs() < 3.0 * se, "{mean} +- {se}");
    }

    #[test]
    fn zero_chi_fixed_point() {
        let spec = lm();
        let v0 = vec![0.02; spec.n_components()];
        let traj = simulate_induced_variance(&spec, &[0.0; 100], &v0).unwrap();
        for row in &traj {
            for v in row {
                assert!((v - 0.02).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn chi_below_boundary_rejected() {
        let spec = lm();
        let v0 = vec![0.02; spec.n_components()];
        assert!(simulate_induced_variance(&spec, &[-1.0, 0.5], &v0).is_ok());
        assert!(matches!(
            simulate_induced_variance(&spec, &[0.0, -1.5], &v0),
            Err(Error::ChiBelowBoundary { step: 2, .. })
        ));
    }

    #[test]
    fn return_and_variance_views_agree() {
        let spec = build_igarch2(4.0, 512.0, 1560.0).unwrap();
        let init = VolState::new(vec![2e-4, 0.8e-4], None).unwrap();
        let path = simulate_returns(&spec, InnovationDist::Gaussian, 2000, 3, &init).unwrap();
        let chi: Vec<f64> = path
            .innovations
            .iter()
            .map(|e| chi_from_epsilon(*e))
            .collect();
        let v0: Vec<f64> = init.sigma_sq().iter().map(|s| 260.0 * s).collect();
        let traj = simulate_induced_variance(&spec, &chi, &v0).unwrap();
        for (row, sig) in traj.iter().zip(&path.sigma_sq) {
            for (v, s) in row.iter().zip(sig) {
                let a = 260.0 * s;
                assert!((v - a).abs() <= 1e-10 * a, "{v} vs {a}");
            }
        }
    }

    #[test]
    fn drift_regression_recovers_one_minus_mu() {
        // dv_k = (1 - mu_k)(v_eff - v_k) + (1 - mu_k) chi v_eff; regress dv_k on
        // (v_eff - v_k) across independent starting points
        let spec = build_igarch2(4.0, 64.0, 1560.0).unwrap();
        let sampler = InnovationDist::Gaussian.sampler().unwrap();
        let mut rng = path_rng(8, 0);
        let n = 200_000;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for _ in 0..n {
            let v0 = [rng.random_range(0.005..0.05), rng.random_range(0.005..0.05)];
            let mut sim = InducedVariance::new(&spec, &v0).unwrap();
            let x = sim.v_eff() - v0[0];
            sim.step(chi_from_epsilon(sampler.sample(&mut rng)))
                .unwrap();
            let y = sim.v()[0] - v0[0];
            sxy += x * y;
            sxx += x * x;
        }
        let slope = sxy / sxx;
        let target = 1.0 - spec.components()[0].mu;
        assert!((slope / target - 1.0).abs() < 0.05, "{slope} vs {target}");
    }

    #[test]
    fn noise_scale_is_one_minus_mu_times_v_eff() {
        let spec = lm();
        let v0: Vec<f64> = (0..15).map(|k| 0.01 + 0.001 * k as f64).collect();
        let base = InducedVariance::new(&spec, &v0).unwrap();
        let v_eff = base.v_eff();
        // dv_k is affine in chi with slope (1 - mu_k) v_eff
        let mut a = base.clone();
        let mut b = base.clone();
        a.step(0.0).unwrap();
        b.step(1.0).unwrap();
        for ((x, y), c) in a.v().iter().zip(b.v()).zip(spec.components()) {
            let slope = y - x;
            assert!((slope - (1.0 - c.mu) * v_eff).abs() <= 1e-15);
        }
    }

    #[test]
    fn martingale_without_evolution_is_exact() {
        let spec = lm();
        let init = VolState::new((0..15).map(|k| 1e-4 + 1e-5 * k as f64).collect(), None).unwrap();
        let rep = martingale_check(&spec, &init, 0, 63, 100, 1).unwrap();
        assert_eq!(rep.z, 0.0);
        assert!((rep.mean - rep.expected).abs() <= 1e-13 * rep.expected);
    }

    #[test]
    fn igarch1_forward_variance_is_martingale() {
        let spec = build_igarch1(16.0).unwrap();
        let init = VolState::new(vec![1.2e-4], None).unwrap();
        let rep = martingale_check(&spec, &init, 20, 63, 100_000, 5).unwrap();
        assert!(rep.z < 3.0, "{rep:?}");
    }

    #[test]
    fn parallel_paths_are_deterministic() {
        let spec = lm();
        let init = VolState::uniform(&spec, 1e-4).unwrap();
        let a = martingale_check(&spec, &init, 5, 21, 2000, 77).unwrap();
        let b = martingale_check(&spec, &init, 5, 21, 2000, 77).unwrap();
        assert_eq!(a, b);
    }
}
