//! Run configuration, read from TOML.
//!
//! Every section is optional. A minimal file only names the inputs:
//!
//! ```toml
//! [evaluate]
//! prices = "data/eurusd.csv"
//! ```
//!
//! Processes are listed as `[[process]]` tables with a `kind` of
//! `lm_arch`, `igarch1`, `igarch2`, `garch11` or `raw`. Without any, the
//! four reference processes are used (see [`default_processes`]).

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use mcarch::market_model::MarketModelSpec;
use mcarch::{build_garch11, build_igarch1, build_igarch2, build_lm_arch, ProcessSpec};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_HORIZONS: [usize; 7] = mcarch::evaluate::DEFAULT_HORIZONS;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub year_days: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Forecast horizons in business days.
    pub horizons: Vec<usize>,
    /// Returns used to seed the EMA states.
    pub warmup: usize,
    /// Returns skipped after warmup; defaults to the longest time scale.
    pub burn_in: Option<usize>,
    #[serde(rename = "process")]
    pub processes: Vec<ProcessConfig>,
    pub weights: WeightsConfig,
    pub forecast: ForecastConfig,
    pub simulate: SimulateConfig,
    pub evaluate: EvaluateConfig,
    pub market_fit: MarketFitConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            year_days: mcarch::DEFAULT_YEAR_DAYS,
            seed: 0,
            out_dir: PathBuf::from("out"),
            horizons: DEFAULT_HORIZONS.to_vec(),
            warmup: mcarch::arch_process::MIN_WARMUP,
            burn_in: None,
            processes: Vec::new(),
            weights: WeightsConfig::default(),
            forecast: ForecastConfig::default(),
            simulate: SimulateConfig::default(),
            evaluate: EvaluateConfig::default(),
            market_fit: MarketFitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessConfig {
    LmArch {
        label: Option<String>,
        tau1: f64,
        tau_n: f64,
        rho: f64,
        tau0: f64,
    },
    Igarch1 {
        label: Option<String>,
        tau: f64,
    },
    Igarch2 {
        label: Option<String>,
        tau1: f64,
        tau2: f64,
        tau0: f64,
    },
    Garch11 {
        label: Option<String>,
        tau: f64,
        w_inf: f64,
        /// Annualized mean variance.
        sigma_inf_sq: f64,
    },
    Raw {
        label: String,
        components: Vec<RawComponent>,
        #[serde(default)]
        w_inf: f64,
        sigma_inf_sq: Option<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawComponent {
    pub tau: f64,
    pub weight: f64,
}

impl ProcessConfig {
    pub fn build(&self) -> mcarch::Result<ProcessSpec> {
        let (spec, label) = match self {
            ProcessConfig::LmArch {
                label,
                tau1,
                tau_n,
                rho,
                tau0,
            } => (build_lm_arch(*tau1, *tau_n, *rho, *tau0)?, label.clone()),
            ProcessConfig::Igarch1 { label, tau } => (build_igarch1(*tau)?, label.clone()),
            ProcessConfig::Igarch2 {
                label,
                tau1,
                tau2,
                tau0,
            } => (build_igarch2(*tau1, *tau2, *tau0)?, label.clone()),
            ProcessConfig::Garch11 {
                label,
                tau,
                w_inf,
                sigma_inf_sq,
            } => (build_garch11(*tau, *w_inf, *sigma_inf_sq)?, label.clone()),
            ProcessConfig::Raw {
                label,
                components,
                w_inf,
                sigma_inf_sq,
            } => {
                let pairs: Vec<(f64, f64)> = components.iter().map(|c| (c.tau, c.weight)).collect();
                (
                    ProcessSpec::new(label.clone(), &pairs, *w_inf, *sigma_inf_sq)?,
                    None,
                )
            }
        };
        Ok(match label {
            Some(l) => spec.with_label(l),
            None => spec,
        })
    }
}

/// I-GARCH(1) with tau = 16, I-GARCH(2) with (4, 512) and (16, 512),
/// and LM-ARCH(4, 512, sqrt 2), all with tau0 = 1560.
pub fn default_processes() -> Vec<ProcessConfig> {
    vec![
        ProcessConfig::Igarch1 {
            label: None,
            tau: 16.0,
        },
        ProcessConfig::Igarch2 {
            label: Some("igarch2-1".into()),
            tau1: 4.0,
            tau2: 512.0,
            tau0: 1560.0,
        },
        ProcessConfig::Igarch2 {
            label: Some("igarch2-2".into()),
            tau1: 16.0,
            tau2: 512.0,
            tau0: 1560.0,
        },
        ProcessConfig::LmArch {
            label: None,
            tau1: 4.0,
            tau_n: 512.0,
            rho: std::f64::consts::SQRT_2,
            tau0: 1560.0,
        },
    ]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsConfig {
    pub max_horizon: usize,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        Self { max_horizon: 1024 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForecastConfig {
    pub prices: Option<PathBuf>,
    /// Emit a curve every `stride` dates after burn-in instead of only at
    /// the last date.
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Innovations {
    Gaussian,
    StudentT,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub steps: usize,
    pub paths: usize,
    pub innovations: Innovations,
    /// Degrees of freedom for `student_t`.
    pub dof: f64,
    /// Annualized volatility of the initial state.
    pub initial_vol: f64,
    /// Also write every path step by step.
    pub dump_paths: bool,
    pub martingale: Option<MartingaleConfig>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            steps: 4000,
            paths: 1,
            innovations: Innovations::Gaussian,
            dof: 5.0,
            initial_vol: 0.1,
            dump_paths: false,
            martingale: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartingaleConfig {
    pub t_prime: usize,
    pub horizon: usize,
    pub paths: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateConfig {
    pub prices: Option<PathBuf>,
    pub implied: Option<PathBuf>,
    pub stride: usize,
    /// Dates for which a snapshot table is written.
    pub snapshots: Vec<chrono::NaiveDate>,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self {
            prices: None,
            implied: None,
            stride: 1,
            snapshots: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketFitConfig {
    /// Forward curves: `date,horizon_days` plus `forward_var` or `forward_vol`,
    /// optionally a `spec` column (the `forecast` output qualifies).
    pub curve: Option<PathBuf>,
    /// Rows of this spec only, when the curve file has a `spec` column.
    pub spec: Option<String>,
    pub taus: Vec<f64>,
    pub w: Option<Vec<f64>>,
    /// Annualized mean variance.
    pub v_inf: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MarketFitConfig {
    fn default() -> Self {
        Self {
            curve: None,
            spec: None,
            taus: vec![16.0, 256.0],
            w: None,
            v_inf: 0.01,
            beta: 0.5,
            gamma: 0.0,
        }
    }
}

impl MarketFitConfig {
    pub fn model(&self, year_days: f64) -> mcarch::Result<MarketModelSpec> {
        let model = match (self.taus.as_slice(), &self.w) {
            (_, Some(w)) => MarketModelSpec::new(
                self.taus.clone(),
                self.v_inf,
                w.clone(),
                self.beta,
                self.gamma,
            )?,
            ([t1], None) => MarketModelSpec::one_factor(*t1, self.v_inf, self.beta, self.gamma)?,
            ([t1, t2], None) => {
                MarketModelSpec::two_factor(*t1, *t2, self.v_inf, self.beta, self.gamma)?
            }
            _ => {
                return Err(mcarch::Error::InvalidParameter(format!(
                    "one or two factor time scales expected, got {}",
                    self.taus.len()
                )))
            }
        };
        model.with_year_days(year_days)
    }
}

/// Overrides from the command line; `Some` wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub year_days: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config {
            path: String::new(),
            message: e.message().to_string(),
        })?;
        serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
            path: e.path().to_string(),
            message: e.inner().message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
        if let Some(y) = o.year_days {
            self.year_days = y;
        }
    }

    /// Builds the configured processes, with year-day count applied and
    /// labels checked for uniqueness.
    pub fn process_specs(&self) -> Result<Vec<ProcessSpec>, CliError> {
        let (configs, key) = if self.processes.is_empty() {
            (default_processes(), "default process")
        } else {
            (self.processes.clone(), "process")
        };
        let mut seen = HashSet::new();
        let mut specs = Vec::with_capacity(configs.len());
        for (i, pc) in configs.iter().enumerate() {
            let path = format!("{key}[{i}]");
            let spec = pc
                .build()
                .and_then(|s| s.with_year_days(self.year_days))
                .map_err(|e| CliError::Config {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
            if !seen.insert(spec.label().to_string()) {
                return Err(CliError::Config {
                    path: format!("{path}.label"),
                    message: format!("duplicate process label {:?}", spec.label()),
                });
            }
            specs.push(spec);
        }
        Ok(specs)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |path: &str, message: String| {
            Err(CliError::Config {
                path: path.into(),
                message,
            })
        };
        if self.year_days.is_nan() || self.year_days <= 0.0 {
            return bad(
                "year_days",
                format!("must be positive, got {}", self.year_days),
            );
        }
        if self.horizons.is_empty()
            || self.horizons.contains(&0)
            || self.horizons.windows(2).any(|w| w[1] <= w[0])
        {
            return bad(
                "horizons",
                "must be positive and strictly increasing".into(),
            );
        }
        if self.evaluate.stride == 0 {
            return bad("evaluate.stride", "must be at least 1".into());
        }
        if self.forecast.stride == Some(0) {
            return bad("forecast.stride", "must be at least 1".into());
        }
        if self.weights.max_horizon == 0 {
            return bad("weights.max_horizon", "must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = RunConfig::from_toml("").unwrap();
        assert_eq!(c.year_days, 260.0);
        assert_eq!(c.horizons, DEFAULT_HORIZONS);
        let specs = c.process_specs().unwrap();
        let labels: Vec<&str> = specs.iter().map(|s| s.label()).collect();
        assert_eq!(labels, ["igarch1", "igarch2-1", "igarch2-2", "lm-arch"]);
    }

    #[test]
    fn all_process_kinds_parse() {
        let c = RunConfig::from_toml(
            r#"
            [[process]]
            kind = "lm_arch"
            tau1 = 4
            tau_n = 512
            rho = 1.4142135623730951
            tau0 = 1560

            [[process]]
            kind = "igarch1"
            tau = 16

            [[process]]
            kind = "igarch2"
            tau1 = 4.0
            tau2 = 512.0
            tau0 = 1560.0

            [[process]]
            kind = "garch11"
            tau = 16
            w_inf = 0.1
            sigma_inf_sq = 0.01

            [[process]]
            kind = "raw"
            label = "mine"
            components = [{ tau = 2, weight = 0.6 }, { tau = 10, weight = 0.3 }]
            w_inf = 0.1
            sigma_inf_sq = 0.04
            "#,
        )
        .unwrap();
        let specs = c.process_specs().unwrap();
        assert_eq!(specs.len(), 5);
        assert_eq!(specs[0].n_components(), 15);
        assert_eq!(specs[4].label(), "mine");
    }

    #[test]
    fn parse_error_names_the_key() {
        let err =
            RunConfig::from_toml("[[process]]\nkind = \"igarch1\"\ntau = \"x\"\n").unwrap_err();
        match err {
            // tagged enums buffer their fields, so the path stops at the entry
            CliError::Config { path, message } => {
                assert_eq!(path, "process[0]");
                assert!(message.contains("invalid type"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let err = RunConfig::from_toml("[simulate]\nstepz = 3\n").unwrap_err();
        match err {
            CliError::Config { path, message } => {
                assert_eq!(path, "simulate.stepz");
                assert!(message.contains("stepz"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_spec_names_the_entry() {
        let c = RunConfig::from_toml(
            "[[process]]\nkind = \"igarch1\"\ntau = 8\n[[process]]\nkind = \"igarch2\"\ntau1 = 4\ntau2 = 512\ntau0 = 400\n",
        )
        .unwrap();
        match c.process_specs().unwrap_err() {
            CliError::Config { path, .. } => assert_eq!(path, "process[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        let c = RunConfig::from_toml(
            "[[process]]\nkind = \"igarch1\"\ntau = 8\n[[process]]\nkind = \"igarch1\"\ntau = 16\n",
        )
        .unwrap();
        assert!(matches!(c.process_specs(), Err(CliError::Config { .. })));
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::from_toml("seed = 1\nyear_days = 252\n").unwrap();
        c.apply(&Overrides {
            seed: Some(9),
            out_dir: None,
            year_days: None,
        });
        assert_eq!(c.seed, 9);
        assert_eq!(c.year_days, 252.0);
    }

    #[test]
    fn example_config_is_valid() {
        let c = RunConfig::from_toml(include_str!("../config.example.toml")).unwrap();
        c.validate().unwrap();
        assert_eq!(c.process_specs().unwrap().len(), 5);
        assert_eq!(c.simulate.innovations, Innovations::StudentT);
        assert_eq!(c.evaluate.snapshots.len(), 1);
        assert_eq!(c.market_fit.model(c.year_days).unwrap().n_factors(), 2);
    }

    #[test]
    fn horizons_validated() {
        let c = RunConfig::from_toml("horizons = [5, 5]").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_toml("horizons = [0, 5]").unwrap();
        assert!(c.validate().is_err());
    }
}
