//! Replicate batches, log-sum-exp aggregation and mu / stopping-size sweeps.
//!
//! Every replicate runs on its own stream seeded from
//! `(master seed, mu index, TM index, repeat, replicate)`, and aggregation
//! walks the collected results in replicate order, so a [`GridResult`] is a
//! pure function of the request whatever the worker count.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::model::{Configuration, MutationModel, SampleMethod};
use crate::seed::{derive, StreamId};
use crate::simulator::{run_replicate, SimulationSettings, WeightScheme, DEFAULT_EVENT_CAP};

/// `log((1/N) sum exp(W_i - W_max)) + W_max`.
pub fn aggregate_log_likelihood(log_weights: &[f64]) -> Result<f64> {
    if log_weights.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = log_weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::NumericalOverflow(format!("non-finite log weight {bad}")));
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_weights.iter().map(|w| (w - max).exp()).sum();
    Ok(sum.ln() - (log_weights.len() as f64).ln() + max)
}

/// Compact per-replicate record kept by batch runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateSummary {
    pub log_weight: f64,
    pub events: u64,
    pub elapsed: Duration,
}

/// Fresh data for every repeat, drawn from a fixed generating model.
#[derive(Debug, Clone)]
pub struct DataRedraw {
    pub generator: MutationModel,
    pub sample_size: u32,
    pub method: SampleMethod,
}

#[derive(Debug, Clone)]
pub struct EstimateRequest {
    pub model: MutationModel,
    pub data: Configuration,
    pub stop_population: u32,
    pub replicates: usize,
    pub repeats: usize,
    pub master_seed: u64,
    pub weights: WeightScheme,
    pub event_cap: u64,
    /// `None` keeps `data` fixed across repeats.
    pub redraw: Option<DataRedraw>,
}

impl EstimateRequest {
    pub fn new(
        model: MutationModel,
        data: Configuration,
        stop_population: u32,
        replicates: usize,
        repeats: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            model,
            data,
            stop_population,
            replicates,
            repeats,
            master_seed,
            weights: WeightScheme::default(),
            event_cap: DEFAULT_EVENT_CAP,
            redraw: None,
        }
    }

    fn settings(&self) -> SimulationSettings {
        SimulationSettings {
            stop_population: self.stop_population,
            seed: self.master_seed,
            weights: self.weights,
            event_cap: self.event_cap,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 || self.repeats == 0 {
            return Err(Error::InvalidParameter(format!(
                "replicates and repeats must be >= 1, got N={}, R={}",
                self.replicates, self.repeats
            )));
        }
        if !(self.model.mu() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mu must be > 0, got {}",
                self.model.mu()
            )));
        }
        self.settings().validate(&self.data)
    }

    /// Data used by `repeat`: the fixed data, or a redraw seeded by
    /// `(master, repeat)` so every grid row sees the same sequence of data sets.
    pub fn data_for_repeat(&self, repeat: usize) -> Result<Configuration> {
        match &self.redraw {
            None => Ok(self.data.clone()),
            Some(r) => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive(
                    self.master_seed,
                    &[u64::MAX, repeat as u64],
                ));
                r.method.draw(&r.generator, r.sample_size, &mut rng)
            }
        }
    }
}

use rand::SeedableRng;

/// One output row: a (mu, N_TM) pair summarised over repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub mu: f64,
    pub ntm: u32,
    pub mean_loglik: f64,
    pub sd_loglik: f64,
    pub mean_events: f64,
    /// Mean wall time per replicate in milliseconds; not reproducible.
    pub mean_wall_ms: f64,
    pub replicates: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl GridRow {
    /// Equality on every field except wall time, comparing floats bitwise.
    pub fn same_outcome(&self, other: &GridRow) -> bool {
        self.mu.to_bits() == other.mu.to_bits()
            && self.ntm == other.ntm
            && self.mean_loglik.to_bits() == other.mean_loglik.to_bits()
            && self.sd_loglik.to_bits() == other.sd_loglik.to_bits()
            && self.mean_events.to_bits() == other.mean_events.to_bits()
            && self.replicates == other.replicates
            && self.repeats == other.repeats
            && self.seed == other.seed
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
}

impl GridResult {
    pub fn rows_for(&self, ntm: u32) -> Vec<&GridRow> {
        self.rows.iter().filter(|r| r.ntm == ntm).collect()
    }

    /// Row with the largest mean log-likelihood among those with `ntm`.
    pub fn argmax_mu(&self, ntm: u32) -> Option<f64> {
        self.rows_for(ntm)
            .into_iter()
            .max_by(|a, b| a.mean_loglik.total_cmp(&b.mean_loglik))
            .map(|r| r.mu)
    }

    pub fn same_outcome(&self, other: &GridResult) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.same_outcome(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    /// Aggregated log-likelihood of each repeat.
    pub per_repeat: Vec<f64>,
    pub row: GridRow,
    /// All replicates of all repeats pooled.
    pub pooled: PooledWeights,
}

/// Mean of `exp(W)` over a pooled sample, kept in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledWeights {
    pub log_mean: f64,
    /// Standard error of the mean divided by the mean.
    pub relative_se: f64,
    pub count: usize,
}

/// Running `sum exp(W)` and `sum exp(2W)` relative to the largest `W` seen.
#[derive(Debug, Clone, Copy)]
struct ShiftedMoments {
    shift: f64,
    s1: f64,
    s2: f64,
    count: usize,
}

impl ShiftedMoments {
    fn new() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            s1: 0.0,
            s2: 0.0,
            count: 0,
        }
    }

    fn push(&mut self, w: f64) {
        if w > self.shift {
            let r = (self.shift - w).exp();
            self.s1 *= r;
            self.s2 *= r * r;
            self.shift = w;
        }
        let e = (w - self.shift).exp();
        self.s1 += e;
        self.s2 += e * e;
        self.count += 1;
    }

    fn finish(&self) -> PooledWeights {
        let n = self.count as f64;
        let mean = self.s1 / n;
        let relative_se = if self.count < 2 {
            0.0
        } else {
            let var = ((self.s2 - self.s1 * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt() / mean
        };
        PooledWeights {
            log_mean: mean.ln() + self.shift,
            relative_se,
            count: self.count,
        }
    }
}

/// Runs `count` replicates of one repeat, results in replicate order.
pub fn simulate_repeat(
    request: &EstimateRequest,
    stream: StreamId,
    executor: &Executor,
) -> Result<Vec<ReplicateSummary>> {
    let data = request.data_for_repeat(stream.repeat as usize)?;
    let settings = request.settings();
    settings.validate(&data)?;
    let outcomes = executor.map(request.replicates, |r| {
        let id = StreamId {
            replicate: r as u64,
            ..stream
        };
        let mut rng = id.rng(request.master_seed);
        run_replicate(&request.model, &data, &settings, &mut rng).map(|res| ReplicateSummary {
            log_weight: res.log_weight,
            events: res.events(),
            elapsed: res.elapsed,
        })
    })?;
    outcomes
        .into_iter()
        .enumerate()
        .map(|(r, out)| {
            out.map_err(|e| Error::ReplicateFailed {
                repeat: stream.repeat as usize,
                replicate: r,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn estimate(request: &EstimateRequest, executor: &Executor) -> Result<Estimate> {
    executor.install(|exec| estimate_at(request, 0, 0, exec))?
}

/// `estimate` with explicit grid coordinates for seed derivation.
pub fn estimate_at(
    request: &EstimateRequest,
    mu_index: usize,
    tm_index: usize,
    executor: &Executor,
) -> Result<Estimate> {
    request.validate()?;
    let mut per_repeat = Vec::with_capacity(request.repeats);
    let mut events = 0u128;
    let mut wall = Duration::ZERO;
    let mut log_weights = Vec::with_capacity(request.replicates);
    let mut moments = ShiftedMoments::new();
    for repeat in 0..request.repeats {
        let stream = StreamId {
            mu_index: mu_index as u64,
            tm_index: tm_index as u64,
            repeat: repeat as u64,
            replicate: 0,
        };
        let batch = simulate_repeat(request, stream, executor)?;
        log_weights.clear();
        for s in &batch {
            log_weights.push(s.log_weight);
            moments.push(s.log_weight);
            events += s.events as u128;
            wall += s.elapsed;
        }
        per_repeat.push(aggregate_log_likelihood(&log_weights)?);
    }
    let total = (request.replicates * request.repeats) as f64;
    let row = GridRow {
        mu: request.model.mu(),
        ntm: request.stop_population,
        mean_loglik: mean(&per_repeat),
        sd_loglik: sample_sd(&per_repeat),
        mean_events: events as f64 / total,
        mean_wall_ms: wall.as_secs_f64() * 1e3 / total,
        replicates: request.replicates,
        repeats: request.repeats,
        seed: request.master_seed,
    };
    Ok(Estimate {
        per_repeat,
        row,
        pooled: moments.finish(),
    })
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub(crate) fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Cross product of a mu grid and a list of stopping sizes.
#[derive(Debug, Clone)]
pub struct GridRequest {
    /// Supplies the matrix and stationary vector; its own mu is ignored.
    pub model: MutationModel,
    pub mu_values: Vec<f64>,
    pub stop_populations: Vec<u32>,
    pub data: Configuration,
    pub replicates: usize,
    pub repeats: usize,
    pub master_seed: u64,
    pub weights: WeightScheme,
    pub event_cap: u64,
    pub redraw: Option<DataRedraw>,
}

impl GridRequest {
    pub fn new(
        model: MutationModel,
        mu_values: Vec<f64>,
        stop_populations: Vec<u32>,
        data: Configuration,
        replicates: usize,
        repeats: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            model,
            mu_values,
            stop_populations,
            data,
            replicates,
            repeats,
            master_seed,
            weights: WeightScheme::default(),
            event_cap: DEFAULT_EVENT_CAP,
            redraw: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu_values.is_empty() || self.stop_populations.is_empty() {
            return Err(Error::InvalidParameter("grid is empty".into()));
        }
        if self.mu_values.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidParameter("mu values must be finite and > 0".into()));
        }
        if self.mu_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("mu grid must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Request for one grid cell.
    pub fn cell(&self, mu: f64, stop_population: u32) -> Result<EstimateRequest> {
        Ok(EstimateRequest {
            model: self.model.with_mu(mu)?,
            data: self.data.clone(),
            stop_population,
            replicates: self.replicates,
            repeats: self.repeats,
            master_seed: self.master_seed,
            weights: self.weights,
            event_cap: self.event_cap,
            redraw: self.redraw.clone(),
        })
    }
}

/// Evenly spaced grid `start, .., stop` with `count` points.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

pub fn grid_sweep(request: &GridRequest, executor: &Executor) -> Result<GridResult> {
    request.validate()?;
    executor.install(|exec| {
        let mut rows = Vec::with_capacity(request.mu_values.len() * request.stop_populations.len());
        for (mi, &mu) in request.mu_values.iter().enumerate() {
            for (ti, &ntm) in request.stop_populations.iter().enumerate() {
                let cell = request.cell(mu, ntm)?;
                rows.push(estimate_at(&cell, mi, ti, exec)?.row);
            }
        }
        Ok(GridResult { rows })
    })?
}

/// Ratio of repeat standard deviations, time machine over full tree, at one mu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdRatio {
    pub mu: f64,
    pub ntm: u32,
    /// `None` when the baseline standard deviation is zero.
    pub ratio: Option<f64>,
}

pub fn relative_sd(tm_rows: &[GridRow], baseline_rows: &[GridRow]) -> Result<Vec<SdRatio>> {
    tm_rows
        .iter()
        .map(|row| {
            let base = baseline_rows
                .iter()
                .find(|b| b.mu.to_bits() == row.mu.to_bits())
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("no baseline row at mu = {}", row.mu))
                })?;
            let ratio = if base.sd_loglik > 0.0 {
                Some(row.sd_loglik / base.sd_loglik)
            } else if std::ptr::eq(row, base) || row == base {
                Some(1.0)
            } else {
                None
            };
            Ok(SdRatio {
                mu: row.mu,
                ntm: row.ntm,
                ratio,
            })
        })
        .collect()
}
