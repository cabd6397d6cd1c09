use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::InstanceSpec;
use crate::error::{Error, Result};
use crate::kwik::NoisyLinRegConfig;
use crate::linsep::SamplerConfig;

fn one() -> usize {
    1
}

fn default_rounds() -> usize {
    100
}

fn default_m() -> usize {
    100
}

fn default_test_size() -> usize {
    200
}

fn default_eps() -> f64 {
    0.1
}

fn default_delta() -> f64 {
    0.05
}

fn default_noise() -> f64 {
    0.1
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_grid() -> usize {
    32
}

fn default_offset_range() -> [f64; 2] {
    [-2.0, 2.0]
}

fn default_theta() -> f64 {
    0.25
}

/// Learner or classifier to run, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmConfig {
    Enumeration,
    RelaxedEnumeration {
        budget: usize,
    },
    /// Enumeration forced to always predict.
    MbWrapper,
    Coin {
        #[serde(default = "default_eps")]
        epsilon: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    Die {
        #[serde(default = "default_eps")]
        epsilon: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    NoiselessLinreg {
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    NoisyLinreg {
        #[serde(default = "default_noise")]
        noise: f64,
        /// Accuracy counted as correct when judging predictions.
        #[serde(default = "default_eps")]
        tolerance: f64,
        #[serde(default)]
        leverage_threshold: Option<f64>,
        #[serde(default)]
        eigen_floor: Option<f64>,
    },
    LinsepRelaxed {
        budget: usize,
        #[serde(default)]
        num_samples: Option<usize>,
        #[serde(default)]
        burn_in: Option<usize>,
        #[serde(default)]
        walk_steps: Option<usize>,
        /// Measure of the initial version space; defaults to the
        /// separability measure of the instance margin.
        #[serde(default)]
        initial_measure: Option<f64>,
    },
    Css {
        /// Confidence level of the abstention bound check.
        #[serde(default = "default_delta")]
        delta: f64,
    },
    RelaxedCss {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        d: Option<usize>,
        #[serde(default)]
        threshold: Option<f64>,
    },
    Alpha {
        alpha: f64,
    },
    Wm {
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        threshold: Option<f64>,
        /// Affine grid used on vector instances.
        #[serde(default = "default_grid")]
        grid_angles: usize,
        #[serde(default = "default_grid")]
        grid_offsets: usize,
        #[serde(default = "default_offset_range")]
        offset_range: [f64; 2],
    },
}

impl AlgorithmConfig {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmConfig::Enumeration => "enumeration",
            AlgorithmConfig::RelaxedEnumeration { .. } => "relaxed_enumeration",
            AlgorithmConfig::MbWrapper => "mb_wrapper",
            AlgorithmConfig::Coin { .. } => "coin",
            AlgorithmConfig::Die { .. } => "die",
            AlgorithmConfig::NoiselessLinreg { .. } => "noiseless_linreg",
            AlgorithmConfig::NoisyLinreg { .. } => "noisy_linreg",
            AlgorithmConfig::LinsepRelaxed { .. } => "linsep_relaxed",
            AlgorithmConfig::Css { .. } => "css",
            AlgorithmConfig::RelaxedCss { .. } => "relaxed_css",
            AlgorithmConfig::Alpha { .. } => "alpha",
            AlgorithmConfig::Wm { .. } => "wm",
        }
    }

    /// Batch classifiers as opposed to online learners.
    pub fn is_selective(&self) -> bool {
        matches!(
            self,
            AlgorithmConfig::Css { .. }
                | AlgorithmConfig::RelaxedCss { .. }
                | AlgorithmConfig::Alpha { .. }
                | AlgorithmConfig::Wm { .. }
        )
    }

    pub(crate) fn noisy_config(&self) -> NoisyLinRegConfig {
        let mut c = NoisyLinRegConfig::default();
        if let AlgorithmConfig::NoisyLinreg {
            leverage_threshold,
            eigen_floor,
            ..
        } = self
        {
            c.leverage_threshold = leverage_threshold.unwrap_or(c.leverage_threshold);
            c.eigen_floor = eigen_floor.unwrap_or(c.eigen_floor);
        }
        c
    }

    pub(crate) fn sampler_config(&self, seed: u64) -> SamplerConfig {
        let mut c = SamplerConfig {
            seed,
            ..SamplerConfig::default()
        };
        if let AlgorithmConfig::LinsepRelaxed {
            num_samples,
            burn_in,
            walk_steps,
            ..
        } = self
        {
            c.num_samples = num_samples.unwrap_or(c.num_samples);
            c.burn_in = burn_in.unwrap_or(c.burn_in);
            c.walk_steps = walk_steps.unwrap_or(c.walk_steps);
        }
        c
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    /// Shadow-learner adversary that hunts for abstentions.
    #[default]
    Greedy,
    /// Points drawn from the instance distribution.
    Iid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Online rounds per trial.
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// Training-set size for batch classifiers.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default)]
    pub adversary: AdversaryKind,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rounds: default_rounds(),
            m: default_m(),
            test_size: default_test_size(),
            adversary: AdversaryKind::default(),
        }
    }
}

/// Parameter varied by `sweep`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    /// Abstention margin of weighted majority.
    WmThreshold,
    /// Mistake budget of relaxed enumeration.
    Budget,
    RelaxedCssThreshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<String>,
    /// Skip per-trial CSV files, keeping only the summary.
    #[serde(default)]
    pub summary_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default = "one")]
    pub workers: usize,
    pub instance: InstanceSpec,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let loc = match e.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    format!("{origin}:{line}")
                }
                None => origin.to_string(),
            };
            Error::config(loc, e.message().to_string())
        })?;
        cfg.validate(origin)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn validate(&self, origin: &str) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config(format!("{origin}: trials"), "trials must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config(format!("{origin}: workers"), "workers must be at least 1"));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(Error::config(format!("{origin}: sweep.values"), "sweep grid is empty"));
            }
        }
        Ok(())
    }
}
