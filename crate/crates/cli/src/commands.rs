use std::path::{Path, PathBuf};

use coaltm::estimator::{estimate_at, relative_sd, DataRedraw, GridRequest};
use coaltm::oracle::LevelDistribution;
use coaltm::{estimate, grid_sweep, Configuration, Executor, GridResult, GridRow, MutationModel, Oracle};

use crate::config::{BiasTarget, DataSpec, ExperimentConfig, MuGrid};
use crate::error::CliError;
use crate::format::{csv_field, g12, grid_row, write_csv, GRID_HEADER};
use crate::svg::{line_chart, Series};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub mu: Option<f64>,
    pub mu_grid: Option<MuGrid>,
    pub ntm: Option<Vec<u32>>,
    pub no_timing: bool,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        if let Some(mu) = self.mu {
            cfg.mu_grid = None;
            cfg.mu_values = Some(vec![mu]);
        }
        if let Some(g) = self.mu_grid {
            cfg.mu_values = None;
            cfg.mu_grid = Some(g);
        }
        if let Some(levels) = &self.ntm {
            cfg.tm_levels = levels.clone();
        }
        if self.no_timing {
            cfg.timing = false;
        }
        cfg
    }
}

/// A validated configuration with its model and data built.
pub struct Experiment {
    pub cfg: ExperimentConfig,
    pub model: MutationModel,
    pub data: Configuration,
    pub mus: Vec<f64>,
    pub executor: Executor,
}

impl Experiment {
    pub fn prepare(cfg: ExperimentConfig) -> Result<Self, CliError> {
        let model = cfg.build_model()?;
        let data = cfg.build_data(&model)?;
        cfg.validate(&model, &data)?;
        let mus = cfg.mu_values()?;
        std::fs::create_dir_all(&cfg.output_dir).map_err(|e| {
            CliError::Config(format!("output_dir {}: {e}", cfg.output_dir.display()))
        })?;
        let resolved = cfg.output_dir.join("config.resolved.json");
        std::fs::write(&resolved, cfg.to_json() + "\n").map_err(|e| CliError::io(&resolved, e))?;
        let executor = match cfg.workers {
            None | Some(0) => Executor::Auto,
            Some(k) => Executor::with_workers(k),
        };
        Ok(Self {
            cfg,
            model,
            data,
            mus,
            executor,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn grid_request(&self) -> Result<GridRequest, CliError> {
        let redraw = match (&self.cfg.data, self.cfg.redraw_per_repeat) {
            (DataSpec::Generate(g), true) => Some(DataRedraw {
                generator: self.cfg.generator(&self.model, g)?,
                sample_size: g.n,
                method: g.method,
            }),
            _ => None,
        };
        let mut req = GridRequest::new(
            self.model.clone(),
            self.mus.clone(),
            self.cfg.tm_levels.clone(),
            self.data.clone(),
            self.cfg.replicates,
            self.cfg.repeats,
            self.cfg.seed,
        );
        req.weights = self.cfg.weights;
        req.event_cap = self.cfg.event_cap;
        req.redraw = redraw;
        Ok(req)
    }
}

pub fn cmd_estimate(exp: &Experiment) -> Result<(), CliError> {
    let (&[mu], &[ntm]) = (&exp.mus[..], &exp.cfg.tm_levels[..]) else {
        return Err(CliError::Config(format!(
            "estimate needs a single mu and a single TM level, got {} and {}",
            exp.mus.len(),
            exp.cfg.tm_levels.len()
        )));
    };
    let request = exp.grid_request()?.cell(mu, ntm)?;
    let est = estimate(&request, &exp.executor)?;
    write_csv(&exp.path("estimate.csv"), GRID_HEADER, [grid_row(&est.row, exp.cfg.timing)])?;
    write_csv(
        &exp.path("estimate_repeats.csv"),
        "repeat,loglik",
        est.per_repeat.iter().enumerate().map(|(r, l)| format!("{r},{}", g12(*l))),
    )?;
    println!(
        "mu={} ntm={} data={} mean_loglik={} sd_loglik={} mean_events={} ({} x {} replicates)",
        g12(mu),
        ntm,
        exp.data,
        g12(est.row.mean_loglik),
        g12(est.row.sd_loglik),
        g12(est.row.mean_events),
        est.row.repeats,
        est.row.replicates
    );
    Ok(())
}

pub fn cmd_grid(exp: &Experiment, plot: bool) -> Result<(), CliError> {
    let result = grid_sweep(&exp.grid_request()?, &exp.executor)?;
    write_csv(
        &exp.path("grid.csv"),
        GRID_HEADER,
        result.rows.iter().map(|r| grid_row(r, exp.cfg.timing)),
    )?;
    if plot {
        write_plots(exp, &result)?;
    }
    println!("data={} rows={}", exp.data, result.rows.len());
    for &ntm in &exp.cfg.tm_levels {
        if let Some(best) = result.argmax_mu(ntm) {
            println!("ntm={ntm} argmax_mu={}", g12(best));
        }
    }
    Ok(())
}

fn write_plots(exp: &Experiment, result: &GridResult) -> Result<(), CliError> {
    let series = |value: fn(&GridRow) -> f64| -> Vec<Series> {
        exp.cfg
            .tm_levels
            .iter()
            .map(|&ntm| Series {
                label: format!("TM={ntm}"),
                points: result.rows_for(ntm).iter().map(|r| (r.mu, value(r))).collect(),
            })
            .collect()
    };
    let n = exp.data.total();
    let loglik = line_chart(
        &format!("Mean log-likelihood, n={n}"),
        "mu",
        "mean log-likelihood",
        &series(|r| r.mean_loglik),
    );
    let events = line_chart(
        &format!("Backward events per replicate, n={n}"),
        "mu",
        "mean events",
        &series(|r| r.mean_events),
    );
    write_file(&exp.path("grid_loglik.svg"), &loglik)?;
    write_file(&exp.path("grid_events.svg"), &events)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn oracle_levels(exp: &Experiment) -> Vec<u32> {
    exp.cfg
        .oracle
        .as_ref()
        .and_then(|o| o.m.clone())
        .unwrap_or_else(|| exp.cfg.tm_levels.clone())
}

/// `h` at size `m` for the requested bias target.
fn bias_target(oracle: &Oracle, m: u32, target: BiasTarget) -> Result<LevelDistribution, CliError> {
    Ok(match target {
        BiasTarget::Pim => oracle.pim_sample_distribution(m)?,
        BiasTarget::Exact => oracle.exact_last_exit_marginal(m)?,
    })
}

/// Biased likelihood at stopping size `m`; `m = 1` is the full tree.
fn biased(oracle: &Oracle, y: &Configuration, m: u32, target: BiasTarget, exact: f64) -> Result<f64, CliError> {
    if m <= 1 {
        return Ok(exact);
    }
    let h = bias_target(oracle, m, target)?;
    Ok(oracle.exact_biased_likelihood(y, m, &h)?.configuration_probability)
}

pub fn cmd_oracle(exp: &Experiment) -> Result<(), CliError> {
    let target = exp.cfg.oracle.as_ref().map(|o| o.h).unwrap_or_default();
    let h_name = match target {
        BiasTarget::Pim => "pim",
        BiasTarget::Exact => "exact",
    };
    let levels = oracle_levels(exp);
    let n = exp.data.total();
    if let Some(bad) = levels.iter().find(|&&m| m < 1 || m > n) {
        return Err(CliError::Config(format!("oracle.m: {bad} is outside [1, {n}]")));
    }
    let y = &exp.data;
    let mut rows = Vec::new();
    let mut level_rows = Vec::new();
    for &mu in &exp.mus {
        let model = exp.model.with_mu(mu)?;
        let oracle = Oracle::new(&model);
        let lik = oracle.exact_likelihood(y)?;
        let l = lik.configuration_probability;
        for &m in &levels {
            let lb = biased(&oracle, y, m, target, l)?;
            rows.push(format!(
                "{},{},{m},{h_name},{},{},{},{}",
                g12(mu),
                csv_field(&y.to_string()),
                g12(l),
                g12(lik.ordered_probability),
                g12(lb),
                g12((lb - l).abs())
            ));
            if m >= 2 {
                for (kind, dist) in [
                    ("last_exit", oracle.exact_last_exit_marginal(m)?),
                    ("pim", oracle.pim_sample_distribution(m)?),
                ] {
                    for (z, p) in dist.iter() {
                        level_rows.push(format!("{},{kind},{m},{},{}", g12(mu), csv_field(&z.to_string()), g12(p)));
                    }
                }
            }
        }
    }
    write_csv(
        &exp.path("oracle.csv"),
        "mu,y,m,h,likelihood,ordered_likelihood,biased_likelihood,bias_gap",
        rows,
    )?;
    write_csv(&exp.path("oracle_levels.csv"), "mu,kind,m,configuration,probability", level_rows)?;
    println!("data={y} mu values={} levels={levels:?}", exp.mus.len());
    Ok(())
}

pub const COMPARE_HEADER: &str =
    "mu,ntm,oracle_l,oracle_lb,target,mc_estimate,mc_se,z,mean_events,mean_loglik,sd_loglik,sd_ratio";

pub fn cmd_compare(exp: &Experiment) -> Result<(), CliError> {
    let grid = exp.grid_request()?;
    let y = &exp.data;
    let mut cells = Vec::new();
    exp.executor.install(|exec| -> Result<(), CliError> {
        for (mi, &mu) in exp.mus.iter().enumerate() {
            for (ti, &ntm) in exp.cfg.tm_levels.iter().enumerate() {
                let est = estimate_at(&grid.cell(mu, ntm)?, mi, ti, exec)?;
                cells.push(est);
            }
        }
        Ok(())
    })??;

    let rows: Vec<GridRow> = cells.iter().map(|c| c.row.clone()).collect();
    let baseline: Vec<GridRow> = rows.iter().filter(|r| r.ntm == 1).cloned().collect();
    let mut lines = Vec::new();
    let mut worst_z = 0.0f64;
    for cell in &cells {
        let row = &cell.row;
        let model = exp.model.with_mu(row.mu)?;
        let oracle = Oracle::new(&model);
        let l = oracle.exact_likelihood(y)?.configuration_probability;
        let lb = biased(&oracle, y, row.ntm, BiasTarget::Pim, l)?;
        let target = if row.ntm == 1 { l } else { lb };
        let mc = cell.pooled.log_mean.exp();
        let se = cell.pooled.relative_se * mc;
        let z = z_score(mc, se, target);
        worst_z = worst_z.max(z.abs());
        let ratio = if baseline.is_empty() {
            None
        } else {
            relative_sd(std::slice::from_ref(row), &baseline)?[0].ratio
        };
        lines.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            g12(row.mu),
            row.ntm,
            g12(l),
            g12(lb),
            g12(target),
            g12(mc),
            g12(se),
            g12(z),
            g12(row.mean_events),
            g12(row.mean_loglik),
            g12(row.sd_loglik),
            ratio.map_or_else(|| "nan".to_string(), g12)
        ));
    }
    write_csv(&exp.path("compare.csv"), COMPARE_HEADER, lines)?;
    println!("data={y} rows={} max|z|={}", cells.len(), g12(worst_z));
    Ok(())
}

/// `(mc - target) / se`, taking an exact match with zero spread as `z = 0`.
fn z_score(mc: f64, se: f64, target: f64) -> f64 {
    let diff = mc - target;
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-10 * target.abs() {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}
