//! Mutation models, sample configurations and the forward coalescent kernel.
//!
//! A [`MutationModel`] pairs a mutation rate `mu` with a row-stochastic
//! transition matrix over `d` types and its stationary vector. Matrices are
//! stored sparsely (rows and columns) because the multi-locus product space
//! reaches 2^10 types with only `L + 1` nonzeros per row.
//!
//! Multi-locus models use a uniform-over-loci update: a mutation event picks
//! one locus uniformly at random and applies that locus's matrix to it, so
//! `T = (1/L) * sum_l (I ⊗ .. ⊗ P_l ⊗ .. ⊗ I)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row sums and stationary sums must match 1 within this bound.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Tolerance used when validating a user supplied stationary vector.
pub const STATIONARY_CHECK_TOL: f64 = 1e-10;
pub const DEFAULT_STATIONARY_TOL: f64 = 1e-12;
pub const DEFAULT_STATIONARY_MAX_ITER: usize = 1_000_000;
/// Largest product type space `build_multilocus_model` will construct.
pub const DEFAULT_MAX_TYPES: usize = 1 << 16;

/// Counts of sampled sequences per type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    counts: Vec<u32>,
    total: u32,
}

impl Configuration {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if counts.is_empty() {
            return Err(Error::InvalidConfiguration("no types".into()));
        }
        if total == 0 {
            return Err(Error::InvalidConfiguration(
                "configuration must hold at least one sequence".into(),
            ));
        }
        let total = u32::try_from(total)
            .map_err(|_| Error::InvalidConfiguration("total does not fit in u32".into()))?;
        Ok(Self { counts, total })
    }

    /// `size` copies of a single type.
    pub fn monomorphic(type_count: usize, type_index: usize, size: u32) -> Self {
        let mut counts = vec![0; type_count];
        counts[type_index] = size;
        Self {
            counts,
            total: size,
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn type_count(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn count(&self, type_index: usize) -> u32 {
        self.counts[type_index]
    }

    /// True when every sequence carries the same type.
    pub fn is_monomorphic(&self) -> bool {
        self.counts.contains(&self.total)
    }

    pub(crate) fn increment(&mut self, type_index: usize) {
        self.counts[type_index] += 1;
        self.total += 1;
    }

    pub(crate) fn decrement(&mut self, type_index: usize) {
        debug_assert!(self.counts[type_index] > 0);
        self.counts[type_index] -= 1;
        self.total -= 1;
    }

    pub(crate) fn move_one(&mut self, from: usize, to: usize) {
        debug_assert!(self.counts[from] > 0);
        self.counts[from] -= 1;
        self.counts[to] += 1;
    }

    /// Log of `prod_i counts_i! / total!`, the ordered-to-unordered factor.
    pub fn log_ordering_factor(&self) -> f64 {
        self.counts
            .iter()
            .map(|&c| ln_factorial(c))
            .sum::<f64>()
            - ln_factorial(self.total)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.counts.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn ln_factorial(n: u32) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Sparse row-stochastic matrix with column access.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    /// Validates a dense matrix: square, entries in [0,1], rows summing to 1.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidModel("matrix has no rows".into()));
        }
        let mut sparse = Vec::with_capacity(dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidModel(format!(
                    "matrix row {r} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            let mut entries = Vec::new();
            for (c, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidModel(format!(
                        "matrix row {r} column {c} is {p}, outside [0,1]"
                    )));
                }
                if p > 0.0 {
                    entries.push((c, p));
                }
            }
            sparse.push(entries);
        }
        Self::from_sparse_rows(sparse)
    }

    fn from_sparse_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let dim = rows.len();
        for (r, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidModel(format!(
                    "matrix row {r} sums to {sum}, expected 1"
                )));
            }
        }
        let mut cols = vec![Vec::new(); dim];
        for (r, row) in rows.iter().enumerate() {
            for &(c, p) in row {
                cols[c].push((r, p));
            }
        }
        Ok(Self { dim, rows, cols })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero entries `(column, p)` of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Nonzero entries `(row, p)` of column `j`, sorted by row.
    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        match row.binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => row[k].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, p) in row {
                out[r][c] = p;
            }
        }
        out
    }

    /// `v P` for a row vector `v`.
    pub fn left_multiply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (r, row) in self.rows.iter().enumerate() {
            let vr = v[r];
            if vr == 0.0 {
                continue;
            }
            for &(c, p) in row {
                out[c] += vr * p;
            }
        }
    }

    /// True when all rows are identical (parent-independent mutation).
    pub fn is_parent_independent(&self) -> bool {
        self.rows.windows(2).all(|w| w[0] == w[1])
    }
}

/// Stationary vector of `matrix` with default iteration cap.
pub fn stationary_distribution(matrix: &TransitionMatrix, tol: f64) -> Result<Vec<f64>> {
    stationary_distribution_capped(matrix, tol, DEFAULT_STATIONARY_MAX_ITER)
}

/// Power iteration on the lazy chain `(I + P) / 2`, which has the same fixed
/// points as `P` and is aperiodic. A second run from a single vertex detects
/// multiple closed classes.
pub fn stationary_distribution_capped(
    matrix: &TransitionMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    let d = matrix.dim();
    if d == 1 {
        return Ok(vec![1.0]);
    }
    let uniform = vec![1.0 / d as f64; d];
    let a = power_iterate(matrix, uniform, tol, max_iter)?;
    let vertex = (d as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17) as usize % d;
    let mut start = vec![0.0; d];
    start[vertex] = 1.0;
    let b = power_iterate(matrix, start, tol, max_iter)?;
    let gap = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if gap > tol.sqrt().max(1e-9) {
        return Err(Error::NonUniqueStationary);
    }
    Ok(a)
}

fn power_iterate(
    matrix: &TransitionMatrix,
    mut psi: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let d = matrix.dim();
    let mut next = vec![0.0; d];
    let mut residual = f64::INFINITY;
    for _ in 0..=max_iter {
        matrix.left_multiply(&psi, &mut next);
        residual = psi
            .iter()
            .zip(&next)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if residual <= tol {
            // one more application of P; exact when P has identical rows
            let sum: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= sum);
            return Ok(next);
        }
        let mut sum = 0.0;
        for (x, y) in psi.iter_mut().zip(&next) {
            *x = 0.5 * (*x + y);
            sum += *x;
        }
        psi.iter_mut().for_each(|x| *x /= sum);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Mutation rate plus a shared transition matrix and its stationary vector.
#[derive(Debug, Clone)]
pub struct MutationModel {
    mu: f64,
    matrix: Arc<TransitionMatrix>,
    stationary: Arc<Vec<f64>>,
}

impl MutationModel {
    pub fn new(mu: f64, matrix: TransitionMatrix) -> Result<Self> {
        check_mu(mu)?;
        let stationary = stationary_distribution(&matrix, DEFAULT_STATIONARY_TOL)?;
        Ok(Self {
            mu,
            matrix: Arc::new(matrix),
            stationary: Arc::new(stationary),
        })
    }

    pub fn from_dense(mu: f64, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(mu, TransitionMatrix::from_dense(rows)?)
    }

    /// Uses a caller supplied stationary vector after checking `psi P = psi`.
    pub fn with_stationary(mu: f64, matrix: TransitionMatrix, stationary: Vec<f64>) -> Result<Self> {
        check_mu(mu)?;
        if stationary.len() != matrix.dim() {
            return Err(Error::InvalidModel(format!(
                "stationary has {} entries, matrix has {} types",
                stationary.len(),
                matrix.dim()
            )));
        }
        if stationary.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidModel("stationary has negative entries".into()));
        }
        let sum: f64 = stationary.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidModel(format!("stationary sums to {sum}")));
        }
        let mut image = vec![0.0; matrix.dim()];
        matrix.left_multiply(&stationary, &mut image);
        for (k, (a, b)) in stationary.iter().zip(&image).enumerate() {
            if (a - b).abs() > STATIONARY_CHECK_TOL {
                return Err(Error::InvalidModel(format!(
                    "stationary is not invariant at type {k}: {a} vs {b}"
                )));
            }
        }
        Ok(Self {
            mu,
            matrix: Arc::new(matrix),
            stationary: Arc::new(stationary),
        })
    }

    /// Same matrix and stationary vector, different mutation rate.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self {
            mu,
            matrix: Arc::clone(&self.matrix),
            stationary: Arc::clone(&self.stationary),
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn type_count(&self) -> usize {
        self.matrix.dim()
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// `p_ij`
    pub fn p(&self, from: usize, to: usize) -> f64 {
        self.matrix.get(from, to)
    }

    pub fn is_parent_independent(&self) -> bool {
        self.matrix.is_parent_independent()
    }

    pub(crate) fn check_configuration(&self, z: &Configuration) -> Result<()> {
        if z.type_count() != self.type_count() {
            return Err(Error::InvalidConfiguration(format!(
                "configuration has {} types, model has {}",
                z.type_count(),
                self.type_count()
            )));
        }
        Ok(())
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidModel(format!(
            "mutation rate must be finite and >= 0, got {mu}"
        )));
    }
    Ok(())
}

/// Per-locus mutation matrices combined into a product type space.
#[derive(Debug, Clone, PartialEq)]
pub struct LocusSpec {
    loci: Vec<TransitionMatrix>,
}

impl LocusSpec {
    pub fn new(loci: Vec<TransitionMatrix>) -> Result<Self> {
        if loci.is_empty() {
            return Err(Error::InvalidModel("at least one locus is required".into()));
        }
        Ok(Self { loci })
    }

    pub fn from_dense(loci: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mats = loci
            .iter()
            .enumerate()
            .map(|(l, m)| {
                TransitionMatrix::from_dense(m).map_err(|e| match e {
                    Error::InvalidModel(msg) => Error::InvalidModel(format!("locus {l}: {msg}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    pub fn loci(&self) -> &[TransitionMatrix] {
        &self.loci
    }

    /// Product of per-locus type counts, `None` on overflow.
    pub fn combined_type_count(&self) -> Option<usize> {
        self.loci
            .iter()
            .try_fold(1usize, |acc, m| acc.checked_mul(m.dim()))
    }

    /// Per-locus digits of a combined type index; locus 0 is most significant.
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.loci.len()];
        for (l, m) in self.loci.iter().enumerate().rev() {
            digits[l] = index % m.dim();
            index /= m.dim();
        }
        digits
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        self.loci
            .iter()
            .zip(digits)
            .fold(0, |acc, (m, &d)| acc * m.dim() + d)
    }
}

pub fn build_multilocus_model(spec: &LocusSpec, mu: f64) -> Result<MutationModel> {
    build_multilocus_model_capped(spec, mu, DEFAULT_MAX_TYPES)
}

pub fn build_multilocus_model_capped(
    spec: &LocusSpec,
    mu: f64,
    max_types: usize,
) -> Result<MutationModel> {
    let total = spec.combined_type_count().unwrap_or(usize::MAX);
    if total > max_types {
        return Err(Error::CapacityExceeded {
            what: "multi-locus type space",
            needed: total,
            limit: max_types,
        });
    }
    MutationModel::new(mu, multilocus_transition(spec, total)?)
}

fn multilocus_transition(spec: &LocusSpec, total: usize) -> Result<TransitionMatrix> {
    let loci = spec.loci();
    if loci.len() == 1 {
        return Ok(loci[0].clone());
    }
    let weight = 1.0 / loci.len() as f64;
    // stride of locus l in the mixed-radix index
    let mut strides = vec![1usize; loci.len()];
    for l in (0..loci.len() - 1).rev() {
        strides[l] = strides[l + 1] * loci[l + 1].dim();
    }
    let mut rows = Vec::with_capacity(total);
    for a in 0..total {
        let digits = spec.decode(a);
        let mut row: Vec<(usize, f64)> = Vec::new();
        for (l, m) in loci.iter().enumerate() {
            let base = a - digits[l] * strides[l];
            for &(v, p) in m.row(digits[l]) {
                row.push((base + v * strides[l], p * weight));
            }
        }
        row.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (c, p) in row {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += p,
                _ => merged.push((c, p)),
            }
        }
        rows.push(merged);
    }
    TransitionMatrix::from_sparse_rows(rows)
}

/// Multinomial(n, psi) draw of the initial sample.
pub fn sample_initial_data<R: Rng + ?Sized>(
    model: &MutationModel,
    n: u32,
    rng: &mut R,
) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("sample size must be >= 2, got {n}")));
    }
    let psi = model.stationary();
    let mut counts = vec![0u32; psi.len()];
    let mut remaining = n as u64;
    let mut mass_left = 1.0f64;
    for (k, &p) in psi.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == psi.len() || mass_left <= 0.0 {
            counts[k] = remaining as u32;
            break;
        }
        let q = (p / mass_left).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng);
        counts[k] = draw as u32;
        remaining -= draw;
        mass_left -= p;
    }
    Configuration::new(counts)
}

/// Simulates a sample of size `n` from the coalescent forward in time:
/// a founder drawn from psi doubles to two lineages, then each step picks a
/// lineage uniformly and either splits it (probability `(k-1)/(k-1+mu)`) or
/// mutates it along `P`. Returns the configuration at the moment level `n`
/// ends with a split.
pub fn simulate_coalescent_sample<R: Rng + ?Sized>(
    model: &MutationModel,
    n: u32,
    rng: &mut R,
) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("sample size must be >= 2, got {n}")));
    }
    let d = model.type_count();
    let founder = sample_index(model.stationary().iter().copied().enumerate(), rng);
    let mut z = Configuration::monomorphic(d, founder, 2);
    let mu = model.mu();
    loop {
        let k = z.total();
        let i = sample_index(
            z.counts().iter().map(|&c| c as f64).enumerate(),
            rng,
        );
        let split = (k - 1) as f64 / (k as f64 - 1.0 + mu);
        if rng.random::<f64>() < split {
            if k == n {
                return Ok(z);
            }
            z.increment(i);
        } else {
            let to = sample_index(model.transition().row(i).iter().copied(), rng);
            z.move_one(i, to);
        }
    }
}

/// How a synthetic data set is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMethod {
    /// Multinomial(n, psi); exact only for parent-independent models.
    #[default]
    Multinomial,
    /// Forward coalescent simulation.
    Coalescent,
}

impl SampleMethod {
    pub fn draw<R: Rng + ?Sized>(
        self,
        model: &MutationModel,
        n: u32,
        rng: &mut R,
    ) -> Result<Configuration> {
        match self {
            SampleMethod::Multinomial => sample_initial_data(model, n, rng),
            SampleMethod::Coalescent => simulate_coalescent_sample(model, n, rng),
        }
    }

    /// `draw` on a ChaCha8 stream seeded with `seed`.
    pub fn draw_seeded(self, model: &MutationModel, n: u32, seed: u64) -> Result<Configuration> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        self.draw(model, n, &mut rng)
    }
}

/// Draws an index proportional to nonnegative weights.
pub(crate) fn sample_index<R, I>(weights: I, rng: &mut R) -> usize
where
    R: Rng + ?Sized,
    I: Iterator<Item = (usize, f64)> + Clone,
{
    let total: f64 = weights.clone().map(|(_, w)| w).sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (k, w) in weights {
        if w <= 0.0 {
            continue;
        }
        last = k;
        if u < w {
            return k;
        }
        u -= w;
    }
    last
}

/// Forward kernel probability of moving from `z` to `z_next` in one event.
pub fn forward_transition_probability(
    model: &MutationModel,
    z: &Configuration,
    z_next: &Configuration,
) -> Result<f64> {
    model.check_configuration(z)?;
    model.check_configuration(z_next)?;
    let k = z.total();
    if k < 2 {
        return Err(Error::InvalidConfiguration(format!(
            "forward kernel needs at least 2 sequences, got {z}"
        )));
    }
    let kf = k as f64;
    let mu = model.mu();
    let mutate = mu / (kf - 1.0 + mu);
    let split = (kf - 1.0) / (kf - 1.0 + mu);
    let (a, b) = (z.counts(), z_next.counts());

    if z_next.total() == k + 1 {
        let mut grown = None;
        for t in 0..a.len() {
            match b[t] as i64 - a[t] as i64 {
                0 => {}
                1 if grown.is_none() => grown = Some(t),
                _ => return Ok(0.0),
            }
        }
        return Ok(grown.map_or(0.0, |i| a[i] as f64 / kf * split));
    }
    if z_next.total() != k {
        return Ok(0.0);
    }
    let (mut lost, mut gained) = (None, None);
    for t in 0..a.len() {
        match b[t] as i64 - a[t] as i64 {
            0 => {}
            -1 if lost.is_none() => lost = Some(t),
            1 if gained.is_none() => gained = Some(t),
            _ => return Ok(0.0),
        }
    }
    Ok(match (lost, gained) {
        (Some(i), Some(l)) => a[i] as f64 / kf * mutate * model.p(i, l),
        (None, None) => (0..a.len())
            .map(|i| a[i] as f64 / kf * mutate * model.p(i, i))
            .sum(),
        _ => 0.0,
    })
}

/// JSON model definition: `mu` plus either `matrix` or `loci`, with an
/// optional validated `stationary` override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loci: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<Vec<f64>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Builds the model at `mu` (ignoring `self.mu`), used by grid sweeps.
    pub fn build_at(&self, mu: f64) -> Result<MutationModel> {
        let base = match (&self.matrix, &self.loci) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidModel(
                    "give either `matrix` or `loci`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidModel("one of `matrix` or `loci` is required".into()))
            }
            (Some(rows), None) => TransitionMatrix::from_dense(rows)?,
            (None, Some(loci)) => {
                let spec = LocusSpec::from_dense(loci)?;
                let total = spec.combined_type_count().unwrap_or(usize::MAX);
                if total > DEFAULT_MAX_TYPES {
                    return Err(Error::CapacityExceeded {
                        what: "multi-locus type space",
                        needed: total,
                        limit: DEFAULT_MAX_TYPES,
                    });
                }
                multilocus_transition(&spec, total)?
            }
        };
        match &self.stationary {
            Some(psi) => MutationModel::with_stationary(mu, base, psi.clone()),
            None => MutationModel::new(mu, base),
        }
    }

    pub fn build(&self) -> Result<MutationModel> {
        self.build_at(self.mu)
    }
}
