//! Exact small-sample likelihoods by dynamic programming over size levels.
//!
//! The forward process moves through levels `k = 2, 3, ...` (number of
//! lineages). Within a level only mutations happen; a level ends when a lineage
//! splits. For each level we keep the distribution of the configuration at the
//! moment the level ends (the split-moment distribution). Given the
//! distribution on entering level `k`, the split-moment distribution is
//!
//! ```text
//! (1 - c) * entering * sum_{m >= 0} (c M_k)^m,   c = mu / (k - 1 + mu)
//! ```
//!
//! with `M_k` the within-level mutation matrix (lineage of type `i` chosen with
//! probability `z_i / k`, new type from row `i` of `P`). The series is
//! evaluated with one dense LU solve per level. The split-moment distribution
//! at level `n` is the sampling distribution of unordered samples of size `n`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Configuration, MutationModel};
use crate::simulator::log_bias_correction;

/// Tolerance for "sums to one" checks on level distributions.
pub const LEVEL_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_types: usize,
    pub max_sample: u32,
    /// Upper bound on the number of configurations in one level.
    pub max_states: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_types: 4,
            max_sample: 12,
            max_states: 5_000,
        }
    }
}

impl OracleLimits {
    fn check(&self, d: usize, k: u32) -> Result<()> {
        if d > self.max_types {
            return Err(Error::CapacityExceeded {
                what: "oracle type count",
                needed: d,
                limit: self.max_types,
            });
        }
        if k > self.max_sample {
            return Err(Error::CapacityExceeded {
                what: "oracle sample size",
                needed: k as usize,
                limit: self.max_sample as usize,
            });
        }
        let states = level_size(d, k);
        if states > self.max_states {
            return Err(Error::CapacityExceeded {
                what: "oracle level states",
                needed: states,
                limit: self.max_states,
            });
        }
        Ok(())
    }
}

/// `C(k + d - 1, d - 1)`, saturating.
pub fn level_size(d: usize, k: u32) -> usize {
    let mut acc: u128 = 1;
    let n = k as u128 + d as u128 - 1;
    for t in 0..(d as u128 - 1) {
        acc = acc * (n - t) / (t + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// All configurations of `k` sequences over `d` types, first coordinate
/// descending: `(k,0,..), (k-1,1,..), ..`.
pub fn enumerate_configurations(d: usize, k: u32) -> Result<Vec<Configuration>> {
    enumerate_configurations_within(d, k, &OracleLimits::default())
}

pub fn enumerate_configurations_within(
    d: usize,
    k: u32,
    limits: &OracleLimits,
) -> Result<Vec<Configuration>> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "need d >= 1 and k >= 1, got d={d}, k={k}"
        )));
    }
    limits.check(d, k)?;
    let mut out = Vec::with_capacity(level_size(d, k));
    let mut counts = vec![0u32; d];
    fill(&mut counts, 0, k, &mut out);
    Ok(out)
}

fn fill(counts: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Configuration>) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        out.push(Configuration::new(counts.clone()).expect("positive total"));
        return;
    }
    for c in (0..=left).rev() {
        counts[pos] = c;
        fill(counts, pos + 1, left - c, out);
    }
    counts[pos] = 0;
}

/// Probability vector over every configuration of one size.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDistribution {
    size: u32,
    support: Vec<Configuration>,
    probabilities: Vec<f64>,
    index: HashMap<Configuration, usize>,
}

impl LevelDistribution {
    fn from_parts(size: u32, support: Vec<Configuration>, probabilities: Vec<f64>) -> Self {
        let index = support
            .iter()
            .enumerate()
            .map(|(k, z)| (z.clone(), k))
            .collect();
        Self {
            size,
            support,
            probabilities,
            index,
        }
    }

    /// Builds a distribution on size `k` from explicit masses; missing
    /// configurations get zero. Masses must be nonnegative and sum to one.
    pub fn from_masses<I>(d: usize, k: u32, masses: I, limits: &OracleLimits) -> Result<Self>
    where
        I: IntoIterator<Item = (Configuration, f64)>,
    {
        let support = enumerate_configurations_within(d, k, limits)?;
        let mut dist = Self::from_parts(k, support, vec![0.0; level_size(d, k)]);
        for (z, p) in masses {
            let at = dist.index.get(&z).copied().ok_or_else(|| {
                Error::SizeMismatch {
                    expected: k,
                    found: z.total(),
                }
            })?;
            if !(p >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative mass {p} at {z}")));
            }
            dist.probabilities[at] += p;
        }
        dist.check_normalised()?;
        Ok(dist)
    }

    pub fn point_mass(z: &Configuration, limits: &OracleLimits) -> Result<Self> {
        Self::from_masses(z.type_count(), z.total(), [(z.clone(), 1.0)], limits)
    }

    fn check_normalised(&self) -> Result<()> {
        let sum: f64 = self.probabilities.iter().sum();
        if (sum - 1.0).abs() > LEVEL_SUM_TOL || self.probabilities.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "level {} distribution sums to {sum}",
                self.size
            )));
        }
        Ok(())
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn type_count(&self) -> usize {
        self.support[0].type_count()
    }

    pub fn support(&self) -> &[Configuration] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, z: &Configuration) -> f64 {
        self.index.get(z).map_or(0.0, |&k| self.probabilities[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, f64)> {
        self.support.iter().zip(self.probabilities.iter().copied())
    }

    pub fn total_variation(&self, other: &LevelDistribution) -> Result<f64> {
        if self.size != other.size || self.support.len() != other.support.len() {
            return Err(Error::SizeMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        Ok(0.5
            * self
                .probabilities
                .iter()
                .zip(&other.probabilities)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}

/// Unordered and ordered sample probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Likelihood {
    pub configuration_probability: f64,
    pub ordered_probability: f64,
}

impl Likelihood {
    fn of(y: &Configuration, configuration_probability: f64) -> Self {
        Self {
            configuration_probability,
            ordered_probability: configuration_probability * y.log_ordering_factor().exp(),
        }
    }
}

/// Exact dynamic-programming oracle bound to one model and size limits.
#[derive(Debug, Clone)]
pub struct Oracle<'a> {
    model: &'a MutationModel,
    limits: OracleLimits,
}

impl<'a> Oracle<'a> {
    pub fn new(model: &'a MutationModel) -> Self {
        Self::with_limits(model, OracleLimits::default())
    }

    pub fn with_limits(model: &'a MutationModel, limits: OracleLimits) -> Self {
        Self { model, limits }
    }

    pub fn limits(&self) -> &OracleLimits {
        &self.limits
    }

    fn d(&self) -> usize {
        self.model.type_count()
    }

    /// Distribution at the moment the level of `entering` ends with a split.
    pub fn split_moment_distribution(&self, entering: &LevelDistribution) -> Result<LevelDistribution> {
        let k = entering.size();
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "split-moment distribution needs size >= 2, got {k}"
            )));
        }
        if entering.type_count() != self.d() {
            return Err(Error::InvalidConfiguration(format!(
                "level has {} types, model has {}",
                entering.type_count(),
                self.d()
            )));
        }
        let mu = self.model.mu();
        let c = mu / (k as f64 - 1.0 + mu);
        let support = entering.support().to_vec();
        let states = support.len();
        if c == 0.0 {
            return Ok(LevelDistribution::from_parts(
                k,
                support,
                entering.probabilities().to_vec(),
            ));
        }
        // A = (I - c M)^T, so that A v = entering gives v = entering (I - c M)^{-1}
        let mut a = DMatrix::<f64>::identity(states, states);
        let kf = k as f64;
        let p = self.model.transition();
        for (from, z) in support.iter().enumerate() {
            for (i, &zi) in z.counts().iter().enumerate() {
                if zi == 0 {
                    continue;
                }
                let pick = zi as f64 / kf;
                for &(l, p_il) in p.row(i) {
                    let mut next = z.clone();
                    next.move_one(i, l);
                    let to = entering.index[&next];
                    a[(to, from)] -= c * pick * p_il;
                }
            }
        }
        let rhs = DVector::from_column_slice(entering.probabilities());
        let v = a
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularSystem { level: k })?;
        let probabilities: Vec<f64> = v.iter().map(|&x| ((1.0 - c) * x).max(0.0)).collect();
        Ok(LevelDistribution::from_parts(k, support, probabilities))
    }

    /// Pushes a split-moment distribution at size `k` through the split:
    /// `z -> z + e_i` with probability `z_i / k`.
    pub fn split(&self, ended: &LevelDistribution) -> Result<LevelDistribution> {
        let k = ended.size();
        let d = ended.type_count();
        let support = enumerate_configurations_within(d, k + 1, &self.limits)?;
        let mut next = LevelDistribution::from_parts(k + 1, support, vec![0.0; level_size(d, k + 1)]);
        for (z, p) in ended.iter() {
            if p == 0.0 {
                continue;
            }
            for (i, &zi) in z.counts().iter().enumerate() {
                if zi == 0 {
                    continue;
                }
                let mut up = z.clone();
                up.increment(i);
                let at = next.index[&up];
                next.probabilities[at] += p * zi as f64 / k as f64;
            }
        }
        Ok(next)
    }

    /// Split-moment distribution at size 2: founder type from psi, doubled.
    fn root_level(&self) -> Result<LevelDistribution> {
        let d = self.d();
        let psi = self.model.stationary();
        let entering = LevelDistribution::from_masses(
            d,
            2,
            (0..d).map(|i| (Configuration::monomorphic(d, i, 2), psi[i])),
            &self.limits,
        )?;
        self.split_moment_distribution(&entering)
    }

    /// Propagates a split-moment distribution up to size `n`.
    fn propagate(&self, ended: LevelDistribution, n: u32) -> Result<LevelDistribution> {
        let mut current = ended;
        while current.size() < n {
            let entering = self.split(&current)?;
            current = self.split_moment_distribution(&entering)?;
        }
        Ok(current)
    }

    /// Exact split-moment (last-exit) distribution at size `m`.
    pub fn exact_last_exit_marginal(&self, m: u32) -> Result<LevelDistribution> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("need m >= 2, got {m}")));
        }
        self.limits.check(self.d(), m)?;
        self.propagate(self.root_level()?, m)
    }

    pub fn exact_likelihood(&self, y: &Configuration) -> Result<Likelihood> {
        self.model.check_configuration(y)?;
        let n = y.total();
        if n < 2 {
            return Err(Error::InvalidConfiguration(format!("need at least 2 sequences, got {y}")));
        }
        let level = self.exact_last_exit_marginal(n)?;
        Ok(Likelihood::of(y, level.probability(y)))
    }

    /// Likelihood with the split-moment distribution at size `m` replaced by `h`.
    pub fn exact_biased_likelihood(
        &self,
        y: &Configuration,
        m: u32,
        h: &LevelDistribution,
    ) -> Result<Likelihood> {
        self.model.check_configuration(y)?;
        let n = y.total();
        if m < 2 || m > n {
            return Err(Error::InvalidParameter(format!("need 2 <= m <= {n}, got {m}")));
        }
        if h.size() != m {
            return Err(Error::SizeMismatch {
                expected: m,
                found: h.size(),
            });
        }
        self.limits.check(self.d(), n)?;
        let level = self.propagate(h.clone(), n)?;
        Ok(Likelihood::of(y, level.probability(y)))
    }

    /// Parent-independent sampling distribution at size `k`, the exponentiated
    /// bias-correction term over every configuration.
    pub fn pim_sample_distribution(&self, k: u32) -> Result<LevelDistribution> {
        let support = enumerate_configurations_within(self.d(), k, &self.limits)?;
        let probabilities = support
            .iter()
            .map(|z| log_bias_correction(self.model, z).map(f64::exp))
            .collect::<Result<Vec<_>>>()?;
        let dist = LevelDistribution::from_parts(k, support, probabilities);
        dist.check_normalised()?;
        Ok(dist)
    }

    /// Total variation between the split-moment distributions reached from two
    /// point masses at size `m`, for every size `m..=n_max`.
    pub fn tv_contraction_profile(
        &self,
        start_a: &Configuration,
        start_b: &Configuration,
        n_max: u32,
    ) -> Result<Vec<f64>> {
        let m = start_a.total();
        if start_b.total() != m {
            return Err(Error::SizeMismatch {
                expected: m,
                found: start_b.total(),
            });
        }
        if m < 2 || n_max < m {
            return Err(Error::InvalidParameter(format!(
                "need 2 <= m <= n_max, got m={m}, n_max={n_max}"
            )));
        }
        self.model.check_configuration(start_a)?;
        self.model.check_configuration(start_b)?;
        self.limits.check(self.d(), n_max)?;
        let mut a = LevelDistribution::point_mass(start_a, &self.limits)?;
        let mut b = LevelDistribution::point_mass(start_b, &self.limits)?;
        let mut profile = vec![a.total_variation(&b)?];
        for _ in m..n_max {
            a = self.split_moment_distribution(&self.split(&a)?)?;
            b = self.split_moment_distribution(&self.split(&b)?)?;
            profile.push(a.total_variation(&b)?.clamp(0.0, 1.0));
        }
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn cfg(c: &[u32]) -> Configuration {
        Configuration::new(c.to_vec()).unwrap()
    }
    fn model(mu: f64, rows: &[&[f64]]) -> MutationModel {
        MutationModel::from_dense(mu, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }
    const PIM55: &[&[f64]] = &[&[0.5, 0.5], &[0.5, 0.5]];
    const PIM19: &[&[f64]] = &[&[0.1, 0.9], &[0.1, 0.9]];
    const PDM: &[&[f64]] = &[&[0.5, 0.5], &[0.1, 0.9]];

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_configurations(2, 2).unwrap(),
            vec![cfg(&[2, 0]), cfg(&[1, 1]), cfg(&[0, 2])]
        );
        assert_eq!(enumerate_configurations(1, 5).unwrap(), vec![cfg(&[5])]);
        assert_eq!(enumerate_configurations(3, 2).unwrap().len(), 6);
        assert_eq!(enumerate_configurations(4, 12).unwrap().len(), level_size(4, 12));
        assert!(matches!(
            enumerate_configurations(5, 2),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(matches!(
            enumerate_configurations(2, 13),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        for d in 1..=4 {
            for k in 1..=8 {
                let all = enumerate_configurations(d, k).unwrap();
                let set: std::collections::HashSet<_> = all.iter().collect();
                assert_eq!(set.len(), all.len());
                assert_eq!(all.len(), level_size(d, k));
            }
        }
    }

    #[test]
    fn split_moment_example() {
        let m = model(1.0, PIM55);
        let o = Oracle::new(&m);
        let lim = OracleLimits::default();
        let entering =
            LevelDistribution::from_masses(2, 2, [(cfg(&[2, 0]), 0.5), (cfg(&[0, 2]), 0.5)], &lim).unwrap();
        let out = o.split_moment_distribution(&entering).unwrap();
        assert_abs_diff_eq!(out.probability(&cfg(&[2, 0])), 0.375, epsilon = 1e-14);
        assert_abs_diff_eq!(out.probability(&cfg(&[1, 1])), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(out.probability(&cfg(&[0, 2])), 0.375, epsilon = 1e-14);
    }

    #[test]
    fn split_moment_without_mutation_is_identity() {
        let m = model(0.0, PDM);
        let o = Oracle::new(&m);
        let lim = OracleLimits::default();
        let entering =
            LevelDistribution::from_masses(2, 3, [(cfg(&[2, 1]), 0.3), (cfg(&[0, 3]), 0.7)], &lim).unwrap();
        assert_eq!(o.split_moment_distribution(&entering).unwrap(), entering);
    }

    #[test]
    fn split_moment_respects_type_swap_symmetry() {
        let m = model(2.5, &[&[0.3, 0.7], &[0.7, 0.3]]);
        let o = Oracle::new(&m);
        let lim = OracleLimits::default();
        let entering =
            LevelDistribution::from_masses(2, 4, [(cfg(&[3, 1]), 0.5), (cfg(&[1, 3]), 0.5)], &lim).unwrap();
        let out = o.split_moment_distribution(&entering).unwrap();
        for z in out.support() {
            let swapped = cfg(&[z.count(1), z.count(0)]);
            assert_abs_diff_eq!(out.probability(z), out.probability(&swapped), epsilon = 1e-14);
        }
    }

    #[test]
    fn last_exit_examples() {
        let m = model(1.0, PIM55);
        let h = Oracle::new(&m).exact_last_exit_marginal(2).unwrap();
        assert_eq!(h.probabilities().len(), 3);
        assert_abs_diff_eq!(h.probabilities()[0], 0.375, epsilon = 1e-14);
        assert_abs_diff_eq!(h.probabilities()[1], 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(h.probabilities()[2], 0.375, epsilon = 1e-14);

        let one = MutationModel::from_dense(3.0, &[vec![1.0]]).unwrap();
        let h = Oracle::new(&one).exact_last_exit_marginal(7).unwrap();
        assert_eq!(h.probabilities(), &[1.0]);

        let frozen = MutationModel::with_stationary(
            0.0,
            crate::model::TransitionMatrix::from_dense(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap(),
            vec![1.0, 0.0],
        )
        .unwrap();
        let h = Oracle::new(&frozen).exact_last_exit_marginal(5).unwrap();
        assert_eq!(h.probability(&cfg(&[5, 0])), 1.0);
    }

    #[test]
    fn likelihood_examples() {
        let m = model(1.0, PIM55);
        let l = Oracle::new(&m).exact_likelihood(&cfg(&[2, 0])).unwrap();
        assert_abs_diff_eq!(l.configuration_probability, 0.375, epsilon = 1e-14);
        assert_abs_diff_eq!(l.ordered_probability, 0.375, epsilon = 1e-14);

        let m = model(1.0, PIM19);
        let o = Oracle::new(&m);
        assert_abs_diff_eq!(
            o.exact_likelihood(&cfg(&[0, 2])).unwrap().configuration_probability,
            0.855,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            o.exact_likelihood(&cfg(&[1, 1])).unwrap().configuration_probability,
            0.09,
            epsilon = 1e-12
        );
        let l = o.exact_likelihood(&cfg(&[1, 1])).unwrap();
        assert_abs_diff_eq!(l.ordered_probability, 0.045, epsilon = 1e-12);

        let one = MutationModel::from_dense(0.4, &[vec![1.0]]).unwrap();
        assert_abs_diff_eq!(
            Oracle::new(&one)
                .exact_likelihood(&Configuration::new(vec![9]).unwrap())
                .unwrap()
                .configuration_probability,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn pim_distribution_examples() {
        let m = model(1.0, PIM55);
        let h = Oracle::new(&m).pim_sample_distribution(2).unwrap();
        for (got, want) in h.probabilities().iter().zip([0.375, 0.25, 0.375]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let m = model(1.0, PIM19);
        let h = Oracle::new(&m).pim_sample_distribution(2).unwrap();
        for (got, want) in h.probabilities().iter().zip([0.055, 0.09, 0.855]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let one = MutationModel::from_dense(2.0, &[vec![1.0]]).unwrap();
        assert_abs_diff_eq!(
            Oracle::new(&one).pim_sample_distribution(6).unwrap().probabilities()[0],
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exact_h_reproduces_likelihood() {
        let m = model(1.0, PDM);
        let o = Oracle::new(&m);
        let y = cfg(&[2, 4]);
        let exact = o.exact_likelihood(&y).unwrap();
        for mm in 2..=6 {
            let h = o.exact_last_exit_marginal(mm).unwrap();
            let b = o.exact_biased_likelihood(&y, mm, &h).unwrap();
            assert_abs_diff_eq!(b.configuration_probability, exact.configuration_probability, epsilon = 1e-12);
        }
    }

    #[test]
    fn point_mass_h_is_biased() {
        let m = model(1.0, PDM);
        let o = Oracle::new(&m);
        let y = cfg(&[2, 4]);
        let exact = o.exact_likelihood(&y).unwrap().configuration_probability;
        let h = LevelDistribution::point_mass(&cfg(&[0, 3]), o.limits()).unwrap();
        let b = o.exact_biased_likelihood(&y, 3, &h).unwrap().configuration_probability;
        assert!((b - exact).abs() > 1e-6, "{b} vs {exact}");
    }

    #[test]
    fn biased_at_full_size_is_h_of_y() {
        let m = model(1.0, PDM);
        let o = Oracle::new(&m);
        let y = cfg(&[2, 3]);
        let h = o.pim_sample_distribution(5).unwrap();
        let b = o.exact_biased_likelihood(&y, 5, &h).unwrap();
        assert_eq!(b.configuration_probability, h.probability(&y));
        assert_relative_eq!(
            b.ordered_probability,
            h.probability(&y) * 2.0 * 6.0 / 120.0,
            max_relative = 1e-12
        );
        assert!(matches!(
            o.exact_biased_likelihood(&y, 4, &h),
            Err(Error::SizeMismatch { expected: 4, found: 5 })
        ));
    }

    #[test]
    fn split_conserves_mass() {
        let m = model(2.0, PDM);
        let o = Oracle::new(&m);
        for k in 2..8 {
            let h = o.exact_last_exit_marginal(k).unwrap();
            let up = o.split(&h).unwrap();
            assert_abs_diff_eq!(up.probabilities().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tv_profile_examples() {
        let m = model(10.0, PIM55);
        let o = Oracle::new(&m);
        let same = o.tv_contraction_profile(&cfg(&[3, 0]), &cfg(&[3, 0]), 8).unwrap();
        assert!(same.iter().all(|&v| v.abs() < 1e-14));
        let p = o.tv_contraction_profile(&cfg(&[3, 0]), &cfg(&[0, 3]), 8).unwrap();
        assert_eq!(p.len(), 6);
        assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(p.windows(2).all(|w| w[1] < w[0]), "{p:?}");
    }

    #[test]
    fn level_distributions_are_probabilities() {
        let three = model(1.5, &[&[0.2, 0.5, 0.3], &[0.1, 0.8, 0.1], &[0.3, 0.3, 0.4]]);
        let o = Oracle::new(&three);
        for k in 2..=9 {
            let h = o.exact_last_exit_marginal(k).unwrap();
            assert_abs_diff_eq!(h.probabilities().iter().sum::<f64>(), 1.0, epsilon = 1e-10);
            assert!(h.probabilities().iter().all(|&p| p >= 0.0));
            assert_eq!(h.support().len(), level_size(3, k));
        }
    }
}
