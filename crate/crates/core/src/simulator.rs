//! Backward-in-time importance sampling of coalescent histories.
//!
//! Starting from the observed configuration, each step picks an offspring
//! lineage uniformly (type `i` with probability `x_i / |x|`), then proposes
//! its ancestry: a coalescence with weight `x_i - 1` or a `j -> i` mutation
//! with weight `mu * kappa_ij * p_ji`, where
//!
//! ```text
//! kappa_ij = (x_j - [i == j] + mu * psi_j) / (|x| - 1 + mu)
//! ```
//!
//! Log-weights accumulate per event. In full-tree mode (`stop_population == 1`)
//! the walk runs down to two lineages and [`final_stage_sd`] finishes at the
//! root. In time-machine mode the walk stops at `stop_population` lineages and
//! the parent-independent sample probability of the stopped configuration,
//! [`log_bias_correction`], stands in for the unsimulated top of the tree.
//!
//! Two weight schemes are available. [`WeightScheme::Corrected`] (default) is
//! the forward-kernel over proposal ratio and gives an unbiased estimate of the
//! unordered sample probability. [`WeightScheme::Published`] evaluates the
//! closed forms
//!
//! ```text
//! mutation:   (K1/K2) * (kappa_ii / kappa_ij) * x_j' / |x|
//! coalescent: (K1/K2) * (1 / kappa_ii) * x_i' (|x'| - 1) / (x_i (x_i - 1))
//! K1 = |x| (|x| - 1 + mu),  K2 = |x'| (|x'| - 1 + mu)
//! ```
//!
//! with a two-lineage stage that stops at the first pair of equal types. It is
//! kept for comparison; its mean does not match the exact sample probability.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ln_factorial, Configuration, MutationModel};

pub const DEFAULT_EVENT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    #[default]
    Corrected,
    Published,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Simulate to the most recent common ancestor.
    FullTree,
    /// Stop early and apply the bias correction.
    TimeMachine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationSettings {
    /// Number of lineages left when the backward walk stops (`N_TM`).
    pub stop_population: u32,
    pub seed: u64,
    pub weights: WeightScheme,
    pub event_cap: u64,
}

impl SimulationSettings {
    pub fn new(stop_population: u32, seed: u64) -> Self {
        Self {
            stop_population,
            seed,
            weights: WeightScheme::default(),
            event_cap: DEFAULT_EVENT_CAP,
        }
    }

    pub fn with_weights(mut self, weights: WeightScheme) -> Self {
        self.weights = weights;
        self
    }

    pub fn mode(&self) -> Mode {
        if self.stop_population == 1 {
            Mode::FullTree
        } else {
            Mode::TimeMachine
        }
    }

    pub fn validate(&self, data: &Configuration) -> Result<()> {
        if self.stop_population < 1 || self.stop_population > data.total() {
            return Err(Error::InvalidParameter(format!(
                "stop population {} must lie in [1, {}]",
                self.stop_population,
                data.total()
            )));
        }
        if self.event_cap == 0 {
            return Err(Error::InvalidParameter("event cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Coalescent,
    Mutation,
}

/// One backward step: lineage of type `offspring` either coalesces with
/// another of its type or descends from a lineage of type `ancestor` by mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AncestralEvent {
    pub kind: EventKind,
    pub offspring: usize,
    pub ancestor: usize,
}

impl AncestralEvent {
    pub fn coalescent(offspring: usize) -> Self {
        Self {
            kind: EventKind::Coalescent,
            offspring,
            ancestor: offspring,
        }
    }

    pub fn mutation(offspring: usize, ancestor: usize) -> Self {
        Self {
            kind: EventKind::Mutation,
            offspring,
            ancestor,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    /// Accumulated log importance weight `W`, bias term included.
    pub log_weight: f64,
    /// Generation at which the walk stopped; the data are generation 1.
    pub stop_generation: u64,
    pub final_configuration: Configuration,
    pub mutation_events: u64,
    pub coalescent_events: u64,
    pub elapsed: Duration,
}

impl ReplicateResult {
    pub fn events(&self) -> u64 {
        self.mutation_events + self.coalescent_events
    }
}

fn check_sampleable(x: &Configuration) -> Result<()> {
    if x.total() < 2 {
        return Err(Error::InvalidConfiguration(format!(
            "need at least two sequences, got {x}"
        )));
    }
    Ok(())
}

/// Type `i` with probability `x_i / |x|`.
pub fn sample_offspring_type<R: Rng + ?Sized>(x: &Configuration, rng: &mut R) -> Result<usize> {
    check_sampleable(x)?;
    Ok(pick_lineage(x, rng))
}

#[inline]
fn pick_lineage<R: Rng + ?Sized>(x: &Configuration, rng: &mut R) -> usize {
    let mut r = rng.random_range(0..x.total());
    for (i, &c) in x.counts().iter().enumerate() {
        if r < c {
            return i;
        }
        r -= c;
    }
    unreachable!("lineage index exceeds configuration total")
}

/// `kappa_ij`, the parent-independent estimate of the chance that an extra
/// lineage drawn from `x - e_i` has type `j`.
#[inline]
pub fn kappa(model: &MutationModel, x: &Configuration, i: usize, j: usize) -> f64 {
    let own = if i == j { 1.0 } else { 0.0 };
    (x.count(j) as f64 - own + model.mu() * model.stationary()[j])
        / (x.total() as f64 - 1.0 + model.mu())
}

/// Normalised proposal over the ancestry of an offspring of type `offspring`.
#[derive(Debug, Clone, PartialEq)]
pub struct AncestorDistribution {
    pub offspring: usize,
    pub coalescent: f64,
    /// `(ancestor type j, probability)` for every `j` with `p_ji > 0`.
    pub mutation: Vec<(usize, f64)>,
    /// Sum of unnormalised weights, `Z_i`.
    pub normalizer: f64,
}

impl AncestorDistribution {
    pub fn probability(&self, event: &AncestralEvent) -> f64 {
        if event.offspring != self.offspring {
            return 0.0;
        }
        match event.kind {
            EventKind::Coalescent => self.coalescent,
            EventKind::Mutation => self
                .mutation
                .iter()
                .find(|&&(j, _)| j == event.ancestor)
                .map_or(0.0, |&(_, p)| p),
        }
    }

    pub fn total(&self) -> f64 {
        self.coalescent + self.mutation.iter().map(|&(_, p)| p).sum::<f64>()
    }
}

pub fn ancestor_event_distribution(
    model: &MutationModel,
    x: &Configuration,
    offspring: usize,
) -> Result<AncestorDistribution> {
    model.check_configuration(x)?;
    check_sampleable(x)?;
    if x.count(offspring) == 0 {
        return Err(Error::InvalidConfiguration(format!(
            "offspring type {offspring} is absent from {x}"
        )));
    }
    let coalescent = (x.count(offspring) - 1) as f64;
    let mutation: Vec<(usize, f64)> = model
        .transition()
        .column(offspring)
        .iter()
        .map(|&(j, p_ji)| (j, model.mu() * kappa(model, x, offspring, j) * p_ji))
        .collect();
    let normalizer = coalescent + mutation.iter().map(|&(_, w)| w).sum::<f64>();
    if !(normalizer > 0.0) {
        return Err(Error::ImpossibleAncestry {
            offspring,
            config: x.to_string(),
        });
    }
    Ok(AncestorDistribution {
        offspring,
        coalescent: coalescent / normalizer,
        mutation: mutation
            .into_iter()
            .map(|(j, w)| (j, w / normalizer))
            .collect(),
        normalizer,
    })
}

/// Draws the ancestry of `offspring` without allocating. Returns the event and
/// the normaliser `Z_i`.
fn sample_ancestor<R: Rng + ?Sized>(
    model: &MutationModel,
    x: &Configuration,
    offspring: usize,
    allow_coalescence: bool,
    rng: &mut R,
) -> Result<(AncestralEvent, f64)> {
    let column = model.transition().column(offspring);
    let mu = model.mu();
    let coalescent = if allow_coalescence {
        (x.count(offspring) - 1) as f64
    } else {
        0.0
    };
    let weight = |j: usize, p_ji: f64| mu * kappa(model, x, offspring, j) * p_ji;
    let normalizer = coalescent + column.iter().map(|&(j, p)| weight(j, p)).sum::<f64>();
    if !(normalizer > 0.0) {
        return Err(Error::ImpossibleAncestry {
            offspring,
            config: x.to_string(),
        });
    }
    let mut u = rng.random::<f64>() * normalizer;
    if u < coalescent {
        return Ok((AncestralEvent::coalescent(offspring), normalizer));
    }
    u -= coalescent;
    let mut chosen = None;
    for &(j, p) in column {
        let w = weight(j, p);
        if w <= 0.0 {
            continue;
        }
        chosen = Some(j);
        if u < w {
            break;
        }
        u -= w;
    }
    // rounding can leave u just past the last positive weight
    let j = chosen.expect("positive normaliser implies a positive mutation weight");
    Ok((AncestralEvent::mutation(offspring, j), normalizer))
}

/// Mutation: `x - e_i + e_j`; coalescence: `x - e_i`.
pub fn apply_event(x: &Configuration, event: &AncestralEvent) -> Result<Configuration> {
    let invalid = || Error::InvalidEvent {
        event: format!("{event:?}"),
        config: x.to_string(),
    };
    let d = x.type_count();
    if event.offspring >= d || event.ancestor >= d {
        return Err(invalid());
    }
    let mut next = x.clone();
    match event.kind {
        EventKind::Coalescent => {
            if x.count(event.offspring) < 2 || event.ancestor != event.offspring {
                return Err(invalid());
            }
            next.decrement(event.offspring);
        }
        EventKind::Mutation => {
            if x.count(event.offspring) < 1 {
                return Err(invalid());
            }
            next.move_one(event.offspring, event.ancestor);
        }
    }
    Ok(next)
}

/// Per-event importance weight `w_t` (not logged).
pub fn event_weight(
    model: &MutationModel,
    x_t: &Configuration,
    x_next: &Configuration,
    event: &AncestralEvent,
    scheme: WeightScheme,
) -> Result<f64> {
    let lw = log_event_weight(model, x_t, x_next, event, scheme)?;
    let w = lw.exp();
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::NumericalOverflow(format!(
            "event weight exp({lw}) is not representable"
        )));
    }
    Ok(w)
}

/// `log w_t`, computed from logs of the factors.
pub fn log_event_weight(
    model: &MutationModel,
    x_t: &Configuration,
    x_next: &Configuration,
    event: &AncestralEvent,
    scheme: WeightScheme,
) -> Result<f64> {
    model.check_configuration(x_t)?;
    check_sampleable(x_t)?;
    if apply_event(x_t, event)? != *x_next {
        return Err(Error::InvalidEvent {
            event: format!("{event:?}"),
            config: format!("{x_t} -> {x_next}"),
        });
    }
    let normalizer = match scheme {
        WeightScheme::Corrected => ancestor_event_distribution(model, x_t, event.offspring)?.normalizer,
        WeightScheme::Published => f64::NAN,
    };
    let lw = step_log_weight(model, x_t, event, normalizer, scheme);
    if !lw.is_finite() {
        return Err(Error::NumericalOverflow(format!(
            "log weight {lw} for {event:?} at {x_t}"
        )));
    }
    Ok(lw)
}

/// Log weight of `event` at `x`, `normalizer` being the proposal's `Z_i`.
#[inline]
fn step_log_weight(
    model: &MutationModel,
    x: &Configuration,
    event: &AncestralEvent,
    normalizer: f64,
    scheme: WeightScheme,
) -> f64 {
    let mu = model.mu();
    let k = x.total() as f64;
    let i = event.offspring;
    let x_i = x.count(i) as f64;
    match (scheme, event.kind) {
        (WeightScheme::Corrected, EventKind::Coalescent) => {
            // forward: lineage of type i splits, (x_i - 1)/(k - 1 + mu) per level
            let mut lw = k.ln() + normalizer.ln() - x_i.ln() - (k - 1.0 + mu).ln();
            if x.total() == 2 {
                lw += model.stationary()[i].ln();
            }
            lw
        }
        (WeightScheme::Corrected, EventKind::Mutation) => {
            let j = event.ancestor;
            let x_j_next = if i == j { x_i } else { x.count(j) as f64 + 1.0 };
            x_j_next.ln() + normalizer.ln()
                - (k - 1.0 + mu).ln()
                - x_i.ln()
                - kappa(model, x, i, j).ln()
        }
        (WeightScheme::Published, EventKind::Mutation) => {
            let j = event.ancestor;
            let x_j_next = if i == j { x_i } else { x.count(j) as f64 + 1.0 };
            kappa(model, x, i, i).ln() - kappa(model, x, i, j).ln() + x_j_next.ln() - k.ln()
        }
        (WeightScheme::Published, EventKind::Coalescent) => {
            let k_next = k - 1.0;
            let k1 = k * (k - 1.0 + mu);
            let k2 = k_next * (k_next - 1.0 + mu);
            k1.ln() - k2.ln() - kappa(model, x, i, i).ln() + (x_i - 1.0).ln() + (k_next - 1.0).ln()
                - x_i.ln()
                - (x_i - 1.0).ln()
        }
    }
}

/// Log of the parent-independent unordered sample probability of `x`:
///
/// ```text
/// log(|x|! G(mu) / G(mu + |x|)) + sum_i log(G(x_i + mu psi_i) / (x_i! G(mu psi_i)))
/// ```
pub fn log_bias_correction(model: &MutationModel, x: &Configuration) -> Result<f64> {
    model.check_configuration(x)?;
    let mu = model.mu();
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bias correction needs mu > 0, got {mu}"
        )));
    }
    let n = x.total();
    let psi = model.stationary();
    let mut acc = ln_factorial(n) + libm::lgamma(mu) - libm::lgamma(mu + n as f64);
    for (i, &c) in x.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        if psi[i] <= 0.0 {
            return Err(Error::DegenerateStationary { type_index: i });
        }
        let a = mu * psi[i];
        acc += libm::lgamma(c as f64 + a) - ln_factorial(c) - libm::lgamma(a);
    }
    Ok(acc)
}

/// Outcome of the two-lineage stage in full-tree mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalStage {
    /// Per-generation log-weight contributions, in order.
    pub contributions: Vec<f64>,
    pub mutation_events: u64,
    pub coalescent_events: u64,
    /// Configuration when the stage ended (both lineages of one type).
    pub last_configuration: Configuration,
}

/// Finishes a full-tree replicate from two lineages.
///
/// Each generation picks one of the two lineages with probability 1/2 and
/// proposes its ancestry. A coalescence is only possible when both share a
/// type. Under [`WeightScheme::Corrected`] the stage ends with that proposed
/// coalescence, weighted by the root type's stationary probability. Under
/// [`WeightScheme::Published`] coalescence is never proposed; mutations are
/// drawn until both lineages match, weighting each generation by
/// `mu psi_i / (x_j + mu psi_j)`, halved except at the last generation. If the
/// lineages already match on entry that last-generation step is taken at once.
pub fn final_stage_sd<R: Rng + ?Sized>(
    model: &MutationModel,
    x: &Configuration,
    scheme: WeightScheme,
    event_cap: u64,
    rng: &mut R,
) -> Result<FinalStage> {
    model.check_configuration(x)?;
    if x.total() != 2 {
        return Err(Error::InvalidConfiguration(format!(
            "final stage needs exactly two sequences, got {x}"
        )));
    }
    match scheme {
        WeightScheme::Corrected => final_stage_corrected(model, x, event_cap, rng),
        WeightScheme::Published => final_stage_published(model, x, event_cap, rng),
    }
}

fn final_stage_corrected<R: Rng + ?Sized>(
    model: &MutationModel,
    x: &Configuration,
    event_cap: u64,
    rng: &mut R,
) -> Result<FinalStage> {
    let mut x = x.clone();
    let mut out = FinalStage {
        contributions: Vec::new(),
        mutation_events: 0,
        coalescent_events: 0,
        last_configuration: x.clone(),
    };
    loop {
        if out.mutation_events >= event_cap {
            return Err(Error::IterationCap { cap: event_cap });
        }
        let i = pick_lineage(&x, rng);
        let (event, z) = sample_ancestor(model, &x, i, true, rng)?;
        out.contributions
            .push(step_log_weight(model, &x, &event, z, WeightScheme::Corrected));
        match event.kind {
            EventKind::Coalescent => {
                out.coalescent_events += 1;
                out.last_configuration = x;
                return Ok(out);
            }
            EventKind::Mutation => {
                out.mutation_events += 1;
                x.move_one(event.offspring, event.ancestor);
            }
        }
    }
}

fn final_stage_published<R: Rng + ?Sized>(
    model: &MutationModel,
    x: &Configuration,
    event_cap: u64,
    rng: &mut R,
) -> Result<FinalStage> {
    let mu = model.mu();
    let psi = model.stationary();
    let mut x = x.clone();
    let mut out = FinalStage {
        contributions: Vec::new(),
        mutation_events: 0,
        coalescent_events: 0,
        last_configuration: x.clone(),
    };
    if x.is_monomorphic() {
        let a = x.counts().iter().position(|&c| c == 2).expect("monomorphic pair");
        out.contributions
            .push((mu * psi[a]).ln() - (2.0 + mu * psi[a]).ln());
        out.mutation_events = 1;
        return Ok(out);
    }
    loop {
        if out.mutation_events >= event_cap {
            return Err(Error::IterationCap { cap: event_cap });
        }
        let i = pick_lineage(&x, rng);
        let (event, _) = sample_ancestor(model, &x, i, false, rng)?;
        let j = event.ancestor;
        let x_j = x.count(j) as f64;
        x.move_one(i, j);
        out.mutation_events += 1;
        let last = x.is_monomorphic();
        let mut lw = (mu * psi[i]).ln() - (x_j + mu * psi[j]).ln();
        if !last {
            lw -= std::f64::consts::LN_2;
        }
        out.contributions.push(lw);
        if last {
            out.last_configuration = x;
            return Ok(out);
        }
    }
}

/// Simulates one backward history from `data` and returns its log weight.
pub fn run_replicate<R: Rng + ?Sized>(
    model: &MutationModel,
    data: &Configuration,
    settings: &SimulationSettings,
    rng: &mut R,
) -> Result<ReplicateResult> {
    let started = Instant::now();
    model.check_configuration(data)?;
    check_sampleable(data)?;
    settings.validate(data)?;
    let scheme = settings.weights;
    let floor = settings.stop_population.max(2);

    let mut x = data.clone();
    let mut log_weight = 0.0;
    let mut mutations = 0u64;
    let mut coalescences = 0u64;
    while x.total() > floor {
        if mutations + coalescences >= settings.event_cap {
            return Err(Error::IterationCap {
                cap: settings.event_cap,
            });
        }
        let i = pick_lineage(&x, rng);
        let (event, z) = sample_ancestor(model, &x, i, true, rng)?;
        log_weight += step_log_weight(model, &x, &event, z, scheme);
        match event.kind {
            EventKind::Coalescent => {
                coalescences += 1;
                x.decrement(i);
            }
            EventKind::Mutation => {
                mutations += 1;
                x.move_one(i, event.ancestor);
            }
        }
    }

    match settings.mode() {
        Mode::TimeMachine => {
            log_weight += log_bias_correction(model, &x)?;
        }
        Mode::FullTree => {
            let remaining = settings.event_cap - (mutations + coalescences);
            let stage = final_stage_sd(model, &x, scheme, remaining, rng)?;
            log_weight += stage.contributions.iter().sum::<f64>();
            mutations += stage.mutation_events;
            coalescences += stage.coalescent_events;
            x = stage.last_configuration;
            if scheme == WeightScheme::Corrected {
                // the root lineage
                let root = x.counts().iter().position(|&c| c == 2).expect("monomorphic pair");
                x = Configuration::monomorphic(x.type_count(), root, 1);
            }
        }
    }
    if !log_weight.is_finite() {
        return Err(Error::NumericalOverflow(format!(
            "accumulated log weight {log_weight}"
        )));
    }
    Ok(ReplicateResult {
        log_weight,
        stop_generation: 1 + mutations + coalescences,
        final_configuration: x,
        mutation_events: mutations,
        coalescent_events: coalescences,
        elapsed: started.elapsed(),
    })
}
