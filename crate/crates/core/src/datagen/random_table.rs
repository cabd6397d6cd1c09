use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{seeded, SeededRng};
use crate::types::{FiniteHypothesisClass, Label, LabeledSet};

/// A random finite class with a distribution over points and a target
/// conditional `P(y = +1 | x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomTable {
    pub class: FiniteHypothesisClass,
    pub distribution: Vec<f64>,
    pub positive_rate: Vec<f64>,
}

pub fn gen_random_table(num_hypotheses: usize, num_points: usize, realizable: bool, seed: u64) -> Result<RandomTable> {
    if num_hypotheses == 0 || num_points == 0 {
        return Err(Error::invalid("table sizes must be positive"));
    }
    let mut rng = seeded(seed);
    let mut class = FiniteHypothesisClass::from_fn(num_hypotheses, num_points, |_, _| {
        if rng.random::<bool>() { Label::Pos } else { Label::Neg }
    })?;
    let raw: Vec<f64> = (0..num_points).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let distribution = raw.into_iter().map(|w| w / total).collect();
    let positive_rate = if realizable {
        let t = rng.random_range(0..num_hypotheses);
        class = class.with_truth(t)?;
        (0..num_points).map(|x| if class.label(t, x) == Label::Pos { 1.0 } else { 0.0 }).collect()
    } else {
        (0..num_points).map(|_| rng.random::<f64>()).collect()
    };
    Ok(RandomTable {
        class,
        distribution,
        positive_rate,
    })
}

impl RandomTable {
    /// `m` IID draws of `(x, y)`.
    pub fn sample(&self, m: usize, rng: &mut SeededRng) -> Result<LabeledSet<usize>> {
        let points = WeightedIndex::new(&self.distribution).map_err(|e| Error::invalid(e.to_string()))?;
        Ok((0..m)
            .map(|_| {
                let x = points.sample(rng);
                let y = if rng.random::<f64>() < self.positive_rate[x] { Label::Pos } else { Label::Neg };
                (x, y)
            })
            .collect())
    }

    /// Probability that `h` mislabels a fresh draw.
    pub fn true_error(&self, h: usize) -> f64 {
        (0..self.class.num_points())
            .map(|x| {
                let p = self.positive_rate[x];
                let err = if self.class.label(h, x) == Label::Pos { 1.0 - p } else { p };
                self.distribution[x] * err
            })
            .sum()
    }
}
