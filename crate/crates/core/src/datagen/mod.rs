//! Synthetic instances and adversaries. Every generator is a pure function
//! of its parameters and seed.

mod adversary;
mod arcs;
mod halfspace;
mod random_table;
mod singleton;

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use adversary::{exhaustive_game, universal_class, GameValue, GreedyAdversary};
pub use arcs::{gen_two_arcs, ArcSpec, TwoArcsSpec};
pub use halfspace::{gen_margin_halfspace, perceptron, MarginInstance, PerceptronRun};
pub use random_table::{gen_random_table, RandomTable};
pub use singleton::gen_singleton_class;

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::types::{FiniteHypothesisClass, LabeledSet};

fn default_arcs() -> TwoArcsSpec {
    TwoArcsSpec::default()
}

/// What to generate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceParams {
    SingletonClass {
        bits: u32,
    },
    Coin {
        p: f64,
        flips: usize,
    },
    Die {
        probs: Vec<f64>,
        rolls: usize,
    },
    NoiselessLinear {
        dim: usize,
        points: usize,
    },
    MarginHalfspace {
        dim: usize,
        gamma: f64,
        m: usize,
    },
    TwoArcs {
        #[serde(default = "default_arcs")]
        arcs: TwoArcsSpec,
        m: usize,
    },
    RandomTable {
        hypotheses: usize,
        points: usize,
        realizable: bool,
    },
}

impl InstanceParams {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceParams::SingletonClass { .. } => "singleton_class",
            InstanceParams::Coin { .. } => "coin",
            InstanceParams::Die { .. } => "die",
            InstanceParams::NoiselessLinear { .. } => "noiseless_linear",
            InstanceParams::MarginHalfspace { .. } => "margin_halfspace",
            InstanceParams::TwoArcs { .. } => "two_arcs",
            InstanceParams::RandomTable { .. } => "random_table",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub params: InstanceParams,
    #[serde(default)]
    pub seed: u64,
}

/// A generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Instance {
    Finite {
        class: FiniteHypothesisClass,
        distribution: Vec<f64>,
        positive_rate: Vec<f64>,
    },
    Flips {
        p: f64,
        flips: Vec<bool>,
    },
    Rolls {
        probs: Vec<f64>,
        rolls: Vec<usize>,
    },
    Linear {
        theta: Vec<f64>,
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
    },
    Labeled {
        sample: LabeledSet<Vec<f64>>,
        /// Hidden separator when one is known.
        w_star: Option<Vec<f64>>,
    },
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    let seed = spec.seed;
    match &spec.params {
        InstanceParams::SingletonClass { bits } => {
            let class = gen_singleton_class(*bits)?;
            let n = class.num_points();
            let truth = seeded(seed).random_range(0..n);
            let positive_rate = (0..n).map(|x| if x == truth { 1.0 } else { 0.0 }).collect();
            Ok(Instance::Finite {
                class: class.with_truth(truth)?,
                distribution: vec![1.0 / n as f64; n],
                positive_rate,
            })
        }
        InstanceParams::Coin { p, flips } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::invalid(format!("coin bias must lie in [0, 1], got {p}")));
            }
            let mut rng = seeded(seed);
            Ok(Instance::Flips {
                p: *p,
                flips: (0..*flips).map(|_| rng.random::<f64>() < *p).collect(),
            })
        }
        InstanceParams::Die { probs, rolls } => {
            let total: f64 = probs.iter().sum();
            if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::invalid("die probabilities must be nonnegative and sum to 1"));
            }
            let dist = rand::distr::weighted::WeightedIndex::new(probs).map_err(|e| Error::invalid(e.to_string()))?;
            let mut rng = seeded(seed);
            Ok(Instance::Rolls {
                probs: probs.clone(),
                rolls: (0..*rolls).map(|_| rng.sample(&dist)).collect(),
            })
        }
        InstanceParams::NoiselessLinear { dim, points } => {
            if *dim == 0 {
                return Err(Error::invalid("dimension must be positive"));
            }
            let mut rng = seeded(seed);
            let theta: Vec<f64> = (0..*dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let pts: Vec<Vec<f64>> = (0..*points)
                .map(|_| (0..*dim).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let values = pts.iter().map(|x| crate::types::dot(&theta, x)).collect();
            Ok(Instance::Linear {
                theta,
                points: pts,
                values,
            })
        }
        InstanceParams::MarginHalfspace { dim, gamma, m } => {
            let inst = gen_margin_halfspace(*dim, *gamma, *m, seed)?;
            Ok(Instance::Labeled {
                sample: inst.sample,
                w_star: Some(inst.w_star),
            })
        }
        InstanceParams::TwoArcs { arcs, m } => Ok(Instance::Labeled {
            sample: gen_two_arcs(arcs, *m, seed)?,
            w_star: None,
        }),
        InstanceParams::RandomTable {
            hypotheses,
            points,
            realizable,
        } => {
            let t = gen_random_table(*hypotheses, *points, *realizable, seed)?;
            Ok(Instance::Finite {
                class: t.class,
                distribution: t.distribution,
                positive_rate: t.positive_rate,
            })
        }
    }
}

/// Replayable instance file: the generating parameters and seed together with the output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub spec: InstanceSpec,
    pub instance: Instance,
}

impl InstanceFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
