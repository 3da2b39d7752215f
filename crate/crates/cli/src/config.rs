//! Experiment configuration: a single JSON document.

use std::path::{Path, PathBuf};

use coaltm::estimator::linear_grid;
use coaltm::seed::DEFAULT_MASTER_SEED;
use coaltm::simulator::DEFAULT_EVENT_CAP;
use coaltm::{Configuration, ModelFile, MutationModel, SampleMethod, WeightScheme};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_grid: Option<MuGrid>,
    /// Explicit mu values, an alternative to `mu_grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_values: Option<Vec<f64>>,
    pub data: DataSpec,
    #[serde(default)]
    pub redraw_per_repeat: bool,
    pub tm_levels: Vec<u32>,
    pub replicates: usize,
    pub repeats: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_true")]
    pub timing: bool,
    #[serde(default)]
    pub weights: WeightScheme,
    #[serde(default = "default_event_cap")]
    pub event_cap: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOptions>,
}

fn default_seed() -> u64 {
    DEFAULT_MASTER_SEED
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_true() -> bool {
    true
}
fn default_event_cap() -> u64 {
    DEFAULT_EVENT_CAP
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl MuGrid {
    pub fn values(&self) -> Vec<f64> {
        linear_grid(self.start, self.stop, self.count)
    }
}

impl std::str::FromStr for MuGrid {
    type Err = String;

    /// `start:stop:count`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected start:stop:count, got `{s}`"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        Ok(MuGrid {
            start: num(a)?,
            stop: num(b)?,
            count: c.trim().parse().map_err(|e| format!("`{c}`: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Counts(Vec<u32>),
    Generate(GenerateSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub n: u32,
    /// Defaults to the master seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub method: SampleMethod,
    /// Generating mutation rate; defaults to `model.mu`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasTarget {
    /// Parent-independent closed form, as used by the simulator.
    #[default]
    Pim,
    /// Exact split-moment distribution; the bias gap is then zero.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOptions {
    /// Stopping sizes to evaluate; defaults to `tm_levels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u32>>,
    #[serde(default)]
    pub h: BiasTarget,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("{e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn build_model(&self) -> Result<MutationModel, CliError> {
        self.model.build().map_err(|e| field_error("model", e))
    }

    /// The mu values swept, or `model.mu` alone.
    pub fn mu_values(&self) -> Result<Vec<f64>, CliError> {
        let values = match (&self.mu_grid, &self.mu_values) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either `mu_grid` or `mu_values`, not both".into()))
            }
            (Some(g), None) => {
                if g.count == 0 {
                    return Err(CliError::Config("mu_grid.count must be >= 1".into()));
                }
                if g.count > 1 && !(g.stop > g.start) {
                    return Err(CliError::Config("mu_grid.stop must exceed mu_grid.start".into()));
                }
                g.values()
            }
            (None, Some(v)) => v.clone(),
            (None, None) => vec![self.model.mu],
        };
        if values.is_empty() {
            return Err(CliError::Config("mu_values is empty".into()));
        }
        if let Some(bad) = values.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(CliError::Config(format!("mu values must be finite and > 0, got {bad}")));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Config("mu values must be strictly increasing".into()));
        }
        Ok(values)
    }

    /// The observed sample (generated data is drawn from the model at the
    /// generating mu).
    pub fn build_data(&self, model: &MutationModel) -> Result<Configuration, CliError> {
        match &self.data {
            DataSpec::Counts(c) => {
                let y = Configuration::new(c.clone()).map_err(|e| field_error("data.counts", e))?;
                if y.type_count() != model.type_count() {
                    return Err(CliError::Config(format!(
                        "data.counts: {} types given, model has {}",
                        y.type_count(),
                        model.type_count()
                    )));
                }
                Ok(y)
            }
            DataSpec::Generate(g) => {
                let generator = self.generator(model, g)?;
                g.method
                    .draw_seeded(&generator, g.n, g.seed.unwrap_or(self.seed))
                    .map_err(|e| field_error("data.generate", e))
            }
        }
    }

    pub fn generator(&self, model: &MutationModel, g: &GenerateSpec) -> Result<MutationModel, CliError> {
        model
            .with_mu(g.mu.unwrap_or(self.model.mu))
            .map_err(|e| field_error("data.generate.mu", e))
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self, model: &MutationModel, data: &Configuration) -> Result<(), CliError> {
        self.mu_values()?;
        if self.tm_levels.is_empty() {
            return Err(CliError::Config("tm_levels is empty".into()));
        }
        let n = data.total();
        if let Some(bad) = self.tm_levels.iter().find(|&&t| t < 1 || t > n) {
            return Err(CliError::Config(format!("tm_levels: {bad} is outside [1, {n}]")));
        }
        if self.replicates == 0 || self.repeats == 0 {
            return Err(CliError::Config("replicates and repeats must be >= 1".into()));
        }
        if self.redraw_per_repeat && !matches!(self.data, DataSpec::Generate(_)) {
            return Err(CliError::Config("redraw_per_repeat needs data.generate".into()));
        }
        if data.type_count() != model.type_count() {
            return Err(CliError::Config("data and model type counts differ".into()));
        }
        Ok(())
    }
}

fn field_error(field: &str, e: coaltm::Error) -> CliError {
    CliError::Config(format!("{field}: {e}"))
}
