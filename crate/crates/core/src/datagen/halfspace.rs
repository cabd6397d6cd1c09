use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{seeded, SeededRng};
use crate::types::{dot, norm, Label, LabeledSet};

pub(crate) const MAX_REJECTION_ATTEMPTS: usize = 1_000_000;

pub(crate) fn unit_vector(rng: &mut SeededRng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginInstance {
    pub w_star: Vec<f64>,
    pub gamma: f64,
    pub sample: LabeledSet<Vec<f64>>,
}

/// Unit vectors labeled by a hidden unit `w*`, kept only when
/// `|w* . x| >= gamma`.
pub fn gen_margin_halfspace(dim: usize, gamma: f64, m: usize, seed: u64) -> Result<MarginInstance> {
    if dim == 0 || m == 0 {
        return Err(Error::invalid("need d >= 1 and m >= 1"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("margin must lie in (0, 1), got {gamma}")));
    }
    let mut rng = seeded(seed);
    let w_star = unit_vector(&mut rng, dim);
    let mut items = Vec::with_capacity(m);
    let mut attempts = 0;
    while items.len() < m {
        attempts += 1;
        if attempts > MAX_REJECTION_ATTEMPTS {
            return Err(Error::invalid(format!(
                "margin {gamma} in dimension {dim} too rare: gave up after {MAX_REJECTION_ATTEMPTS} draws"
            )));
        }
        let x = unit_vector(&mut rng, dim);
        let s = dot(&w_star, &x);
        if s.abs() >= gamma {
            items.push((x, if s > 0.0 { Label::Pos } else { Label::Neg }));
        }
    }
    Ok(MarginInstance {
        w_star,
        gamma,
        sample: LabeledSet::new(items),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerceptronRun {
    pub w: Vec<f64>,
    pub updates: usize,
    pub converged: bool,
}

/// Cycles through `sample` until an epoch passes with no update.
pub fn perceptron(sample: &LabeledSet<Vec<f64>>, max_epochs: usize) -> Result<PerceptronRun> {
    let dim = sample
        .iter()
        .next()
        .map(|(x, _)| x.len())
        .ok_or_else(|| Error::invalid("empty sample"))?;
    let mut w = vec![0.0; dim];
    let mut updates = 0;
    for _ in 0..max_epochs {
        let mut clean = true;
        for (x, y) in sample.iter() {
            let s = y.as_f64();
            if s * dot(&w, x) <= 0.0 {
                w.iter_mut().zip(x).for_each(|(a, b)| *a += s * b);
                updates += 1;
                clean = false;
            }
        }
        if clean {
            return Ok(PerceptronRun { w, updates, converged: true });
        }
    }
    Ok(PerceptronRun { w, updates, converged: false })
}
