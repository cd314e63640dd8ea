//! Subcommand implementations. Each returns the paths it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use mcarch::evaluate::{write_distances_csv, write_records_csv, write_snapshot_csv};
use mcarch::forecast::write_curves_csv;
use mcarch::market_model::write_fits_csv;
use mcarch::simulate::{martingale_check_with, path_rng, simulate_returns_with};
use mcarch::timeseries::{load_implied_vol_csv, load_prices_csv};
use mcarch::{
    fit_factors, forecast_weights, init_state, log_returns, rolling_evaluation, snapshot,
    term_structure, EvalConfig, ForecastCurve, ForwardCurveObs, InnovationDist, ProcessSpec,
    VolState,
};

use crate::config::{Innovations, RunConfig};
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Writes `bytes` to `dir/name` through a temporary file in the same
/// directory, renamed into place once flushed.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(&target, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(&target, e))?;
    tmp.persist(&target)
        .map_err(|e| CliError::io(&target, e.error))?;
    Ok(target)
}

fn render(context: &str, f: impl FnOnce(&mut Vec<u8>) -> mcarch::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::core(context, e))?;
    Ok(buf)
}

fn csv_err(name: &str, e: csv::Error) -> CliError {
    CliError::core(name, e.into())
}

fn file_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn prepare(config: &RunConfig) -> Result<Vec<ProcessSpec>> {
    config.validate()?;
    config.process_specs()
}

fn load_prices(path: &Path) -> Result<mcarch::PriceSeries> {
    load_prices_csv(path).map_err(|e| CliError::core(path.display().to_string(), e))
}

/// Per-process forecast weight tables over horizons `1..=max_horizon`:
/// `weights_<label>.csv` (`horizon,component_tau,weight`) and
/// `weight_sums_<label>.csv` (`horizon,sum_weights,w_inf`).
pub fn cmd_weights(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = prepare(config)?;
    let max_h = config.weights.max_horizon;
    let mut written = Vec::new();
    for spec in &specs {
        let w = forecast_weights(spec, max_h - 1);
        let taus = spec.taus();
        let name = format!("weights_{}.csv", file_safe(spec.label()));
        let bytes = {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["horizon", "component_tau", "weight"])
                .map_err(|e| csv_err(&name, e))?;
            for h in 1..=max_h {
                for (tau, wk) in taus.iter().zip(w.at_horizon(h)) {
                    wtr.write_record([h.to_string(), tau.to_string(), wk.to_string()])
                        .map_err(|e| csv_err(&name, e))?;
                }
            }
            wtr.into_inner().expect("in-memory writer")
        };
        written.push(write_atomic(&config.out_dir, &name, &bytes)?);

        let name = format!("weight_sums_{}.csv", file_safe(spec.label()));
        let bytes = {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["horizon", "sum_weights", "w_inf"])
                .map_err(|e| csv_err(&name, e))?;
            for h in 1..=max_h {
                let sum: f64 = w.at_horizon(h).iter().sum();
                wtr.write_record([
                    h.to_string(),
                    sum.to_string(),
                    w.mean_weight(h - 1).to_string(),
                ])
                .map_err(|e| csv_err(&name, e))?;
            }
            wtr.into_inner().expect("in-memory writer")
        };
        written.push(write_atomic(&config.out_dir, &name, &bytes)?);
    }
    Ok(written)
}

/// Forecast term structures from a price history, written to `forecast.csv`.
/// Without a stride only the curve at the last date is emitted.
pub fn cmd_forecast(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = prepare(config)?;
    let path = config
        .forecast
        .prices
        .as_deref()
        .ok_or(CliError::MissingInput("forecast.prices"))?;
    let prices = load_prices(path)?;
    let ctx = path.display().to_string();
    let returns = log_returns(&prices).map_err(|e| CliError::core(&ctx, e))?;
    let eval = EvalConfig {
        year_days: config.year_days,
        warmup: config.warmup,
        burn_in: config.burn_in,
        stride: 1,
    };
    let burn_in = eval.burn_in_for(&specs);
    let required = config.warmup + burn_in;
    if returns.len() < required {
        return Err(CliError::core(
            &ctx,
            mcarch::Error::InsufficientSample {
                required,
                actual: returns.len(),
            },
        ));
    }
    let max_h = *config.horizons.last().expect("validated");
    let mut curves: Vec<(String, ForecastCurve)> = Vec::new();
    for spec in &specs {
        let weights = forecast_weights(spec, max_h);
        let mut state = init_state(spec, &returns.slice(0..config.warmup))
            .map_err(|e| CliError::core(&ctx, e))?;
        let first = required - 1;
        let rets = returns.returns();
        let dates = returns.dates();
        for i in config.warmup..rets.len() {
            state.advance_to(spec, rets[i], dates[i]);
            let emit = match config.forecast.stride {
                Some(s) => i >= first && (i - first).is_multiple_of(s),
                None => i + 1 == rets.len(),
            };
            if emit {
                let curve = term_structure(&state, spec, &weights, &config.horizons)
                    .map_err(|e| CliError::core(spec.label(), e))?;
                curves.push((spec.label().to_string(), curve));
            }
        }
    }
    let refs: Vec<(&str, &ForecastCurve)> = curves.iter().map(|(l, c)| (l.as_str(), c)).collect();
    let bytes = render("forecast.csv", |w| write_curves_csv(w, &refs))?;
    Ok(vec![write_atomic(&config.out_dir, "forecast.csv", &bytes)?])
}

fn innovation_dist(config: &RunConfig) -> Result<InnovationDist> {
    match config.simulate.innovations {
        Innovations::Gaussian => Ok(InnovationDist::Gaussian),
        Innovations::StudentT => {
            InnovationDist::student_t(config.simulate.dof).map_err(|e| CliError::Config {
                path: "simulate.dof".into(),
                message: e.to_string(),
            })
        }
    }
}

/// Simulated paths for every process. Writes `simulation.csv` with one
/// summary row per (process, path), optionally `paths_<label>.csv` and
/// `martingale.csv`. Path `p` uses stream `p` of the configured seed.
pub fn cmd_simulate(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = prepare(config)?;
    let sim = &config.simulate;
    if sim.paths == 0 || sim.steps == 0 {
        return Err(CliError::Config {
            path: "simulate".into(),
            message: "paths and steps must be positive".into(),
        });
    }
    if sim.initial_vol.is_nan() || sim.initial_vol <= 0.0 {
        return Err(CliError::Config {
            path: "simulate.initial_vol".into(),
            message: format!("must be positive, got {}", sim.initial_vol),
        });
    }
    let dist = innovation_dist(config)?;
    let sampler = dist.sampler().map_err(|e| CliError::core("simulate", e))?;
    let a = config.year_days;
    let mut written = Vec::new();

    let mut summary = csv::Writer::from_writer(Vec::new());
    summary
        .write_record([
            "spec",
            "path",
            "steps",
            "realized_vol",
            "excess_kurtosis",
            "min_vol",
            "max_vol",
            "final_vol",
        ])
        .map_err(|e| csv_err("simulation.csv", e))?;
    for spec in &specs {
        let initial = VolState::uniform(spec, sim.initial_vol.powi(2) / a)
            .map_err(|e| CliError::core(spec.label(), e))?;
        let mut dump = csv::Writer::from_writer(Vec::new());
        if sim.dump_paths {
            dump.write_record(["path", "step", "return", "sigma_eff_sq"])
                .map_err(|e| csv_err("paths", e))?;
        }
        for p in 0..sim.paths {
            let mut rng = path_rng(config.seed, p as u64);
            let path = simulate_returns_with(spec, &sampler, sim.steps, &mut rng, &initial)
                .map_err(|e| CliError::core(spec.label(), e))?;
            let n = path.returns.len() as f64;
            let m2 = path.returns.iter().map(|r| r * r).sum::<f64>() / n;
            let m4 = path.returns.iter().map(|r| r.powi(4)).sum::<f64>() / n;
            let kurt = if m2 > 0.0 {
                m4 / (m2 * m2) - 3.0
            } else {
                f64::NAN
            };
            let vols: Vec<f64> = path.sigma_eff_sq.iter().map(|s| (a * s).sqrt()).collect();
            let min = vols.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vols.iter().copied().fold(0.0, f64::max);
            summary
                .write_record([
                    spec.label().to_string(),
                    p.to_string(),
                    sim.steps.to_string(),
                    (a * m2).sqrt().to_string(),
                    kurt.to_string(),
                    min.to_string(),
                    max.to_string(),
                    vols.last().expect("initial row").to_string(),
                ])
                .map_err(|e| csv_err("simulation.csv", e))?;
            if sim.dump_paths {
                // row t carries r(t) and sigma_eff^2(t - 1), the variance it was drawn with
                for (t, r) in path.returns.iter().enumerate() {
                    dump.write_record([
                        p.to_string(),
                        (t + 1).to_string(),
                        r.to_string(),
                        path.sigma_eff_sq[t].to_string(),
                    ])
                    .map_err(|e| csv_err("paths", e))?;
                }
            }
        }
        if sim.dump_paths {
            let name = format!("paths_{}.csv", file_safe(spec.label()));
            let bytes = dump.into_inner().expect("in-memory writer");
            written.push(write_atomic(&config.out_dir, &name, &bytes)?);
        }
    }
    let bytes = summary.into_inner().expect("in-memory writer");
    written.insert(0, write_atomic(&config.out_dir, "simulation.csv", &bytes)?);

    if let Some(mc) = &sim.martingale {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record([
            "spec",
            "t_prime",
            "horizon",
            "expected",
            "mean",
            "std_error",
            "z",
            "n_paths",
        ])
        .map_err(|e| csv_err("martingale.csv", e))?;
        for spec in &specs {
            let initial = VolState::uniform(spec, sim.initial_vol.powi(2) / a)
                .map_err(|e| CliError::core(spec.label(), e))?;
            let rep = martingale_check_with(
                spec,
                dist,
                &initial,
                mc.t_prime,
                mc.horizon,
                mc.paths,
                config.seed,
            )
            .map_err(|e| CliError::core(spec.label(), e))?;
            wtr.write_record([
                spec.label().to_string(),
                mc.t_prime.to_string(),
                mc.horizon.to_string(),
                rep.expected.to_string(),
                rep.mean.to_string(),
                rep.std_error.to_string(),
                rep.z.to_string(),
                rep.n_paths.to_string(),
            ])
            .map_err(|e| csv_err("martingale.csv", e))?;
        }
        let bytes = wtr.into_inner().expect("in-memory writer");
        written.push(write_atomic(&config.out_dir, "martingale.csv", &bytes)?);
    }
    Ok(written)
}

/// Rolling evaluation: `records.csv`, `distances.csv` and one
/// `snapshot_<date>.csv` per requested date.
pub fn cmd_evaluate(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = prepare(config)?;
    let path = config
        .evaluate
        .prices
        .as_deref()
        .ok_or(CliError::MissingInput("evaluate.prices"))?;
    let prices = load_prices(path)?;
    let implied = match &config.evaluate.implied {
        Some(p) => {
            Some(load_implied_vol_csv(p).map_err(|e| CliError::core(p.display().to_string(), e))?)
        }
        None => None,
    };
    let eval = EvalConfig {
        year_days: config.year_days,
        warmup: config.warmup,
        burn_in: config.burn_in,
        stride: config.evaluate.stride,
    };
    let result = rolling_evaluation(&prices, implied.as_ref(), &specs, &config.horizons, &eval)
        .map_err(|e| CliError::core(path.display().to_string(), e))?;
    // resolve snapshots before writing anything
    let snaps: Vec<(NaiveDate, Vec<mcarch::EvalRecord>)> = config
        .evaluate
        .snapshots
        .iter()
        .map(|d| {
            snapshot(&result.records, *d)
                .map(|rows| (*d, rows))
                .map_err(|e| CliError::core("evaluate.snapshots", e))
        })
        .collect::<Result<_>>()?;

    let out = &config.out_dir;
    let mut written = Vec::new();
    let bytes = render("records.csv", |w| write_records_csv(w, &result.records))?;
    written.push(write_atomic(out, "records.csv", &bytes)?);
    let bytes = render("distances.csv", |w| {
        write_distances_csv(w, &result.distances)
    })?;
    written.push(write_atomic(out, "distances.csv", &bytes)?);
    for (date, rows) in &snaps {
        let name = format!("snapshot_{date}.csv");
        let bytes = render(&name, |w| write_snapshot_csv(w, rows))?;
        written.push(write_atomic(out, &name, &bytes)?);
    }
    Ok(written)
}

/// Forward-variance curves grouped by date. Accepts `date,horizon_days` (or
/// `horizon`) with `forward_var` or `forward_vol`, and an optional `spec`
/// column used for filtering.
pub fn read_forward_curves(
    path: &Path,
    spec_filter: Option<&str>,
) -> Result<Vec<(NaiveDate, ForwardCurveObs)>> {
    let ctx = path.display().to_string();
    let bad =
        |line: u64, message: String| CliError::core(&ctx, mcarch::Error::Csv { line, message });
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(&ctx, e))?;
    let header = rdr.headers().map_err(|e| csv_err(&ctx, e))?.clone();
    let col = |names: &[&str]| header.iter().position(|h| names.contains(&h.trim()));
    let date_col = col(&["date"]).ok_or_else(|| bad(1, "missing date column".into()))?;
    let h_col = col(&["horizon_days", "horizon"])
        .ok_or_else(|| bad(1, "missing horizon_days column".into()))?;
    let (v_col, squared) = match (col(&["forward_var"]), col(&["forward_vol"])) {
        (Some(c), _) => (c, false),
        (None, Some(c)) => (c, true),
        _ => return Err(bad(1, "missing forward_var or forward_vol column".into())),
    };
    let spec_col = col(&["spec"]);

    let mut groups: BTreeMap<NaiveDate, Vec<(f64, f64)>> = BTreeMap::new();
    let mut labels: Vec<String> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&ctx, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if let Some(c) = spec_col {
            let label = rec.get(c).unwrap_or("").trim();
            if let Some(f) = spec_filter {
                if label != f {
                    continue;
                }
            } else if !labels.iter().any(|l| l == label) {
                labels.push(label.to_string());
            }
        }
        let field = |c: usize| rec.get(c).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(field(date_col), "%Y-%m-%d")
            .map_err(|e| bad(line, format!("bad date {:?}: {e}", field(date_col))))?;
        let h: f64 = field(h_col)
            .parse()
            .map_err(|_| bad(line, format!("bad horizon {:?}", field(h_col))))?;
        let v: f64 = field(v_col)
            .parse()
            .map_err(|_| bad(line, format!("bad value {:?}", field(v_col))))?;
        groups
            .entry(date)
            .or_default()
            .push((h, if squared { v * v } else { v }));
    }
    if labels.len() > 1 {
        return Err(CliError::Config {
            path: "market_fit.spec".into(),
            message: format!(
                "curve file holds several specs ({}); select one",
                labels.join(", ")
            ),
        });
    }
    if groups.is_empty() {
        return Err(CliError::core(&ctx, mcarch::Error::NoDataRows));
    }
    groups
        .into_iter()
        .map(|(date, mut rows)| {
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (h, v) = rows.into_iter().unzip();
            ForwardCurveObs::new(h, v)
                .map(|obs| (date, obs))
                .map_err(|e| CliError::core(format!("{ctx} ({date})"), e))
        })
        .collect()
}

/// Fits the configured market model to every dated curve in the input and
/// writes `fits.csv` (`date,v1[,v2],residual`).
pub fn cmd_market_fit(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let mf = &config.market_fit;
    let path = mf
        .curve
        .as_deref()
        .ok_or(CliError::MissingInput("market_fit.curve"))?;
    let model = mf.model(config.year_days).map_err(|e| CliError::Config {
        path: "market_fit".into(),
        message: e.to_string(),
    })?;
    let curves = read_forward_curves(path, mf.spec.as_deref())?;
    let fits = curves
        .iter()
        .map(|(date, obs)| {
            fit_factors(&model, obs)
                .map(|f| (*date, f))
                .map_err(|e| CliError::core(format!("{} ({date})", path.display()), e))
        })
        .collect::<Result<Vec<_>>>()?;
    let bytes = render("fits.csv", |w| write_fits_csv(w, model.n_factors(), &fits))?;
    Ok(vec![write_atomic(&config.out_dir, "fits.csv", &bytes)?])
}
