#![allow(dead_code)]

use coaltm::estimator::simulate_repeat;
use coaltm::seed::StreamId;
use coaltm::{Configuration, EstimateRequest, Executor, MutationModel};

pub const PIM55: [[f64; 2]; 2] = [[0.5, 0.5], [0.5, 0.5]];
pub const PIM19: [[f64; 2]; 2] = [[0.1, 0.9], [0.1, 0.9]];
pub const PDM: [[f64; 2]; 2] = [[0.5, 0.5], [0.1, 0.9]];

pub fn model(mu: f64, rows: [[f64; 2]; 2]) -> MutationModel {
    MutationModel::from_dense(mu, &rows.map(|r| r.to_vec())).unwrap()
}

pub fn cfg(c: &[u32]) -> Configuration {
    Configuration::new(c.to_vec()).unwrap()
}

/// Sample mean of exp(W) and its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McMean {
    pub mean: f64,
    pub se: f64,
    pub events: f64,
}

impl McMean {
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target) / self.se
    }

    /// Within `k` standard errors, with slack for rounding when every weight
    /// is identical and the standard error vanishes.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se + 1e-10 * target.abs()
    }
}

pub fn mc_mean(
    model: &MutationModel,
    y: &Configuration,
    stop: u32,
    replicates: usize,
    seed: u64,
) -> McMean {
    let req = EstimateRequest::new(model.clone(), y.clone(), stop, replicates, 1, seed);
    let batch = simulate_repeat(&req, StreamId::default(), &Executor::Auto).unwrap();
    let w: Vec<f64> = batch.iter().map(|s| s.log_weight.exp()).collect();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    McMean {
        mean,
        se: (var / n).sqrt(),
        events: batch.iter().map(|s| s.events as f64).sum::<f64>() / n,
    }
}
