use serde::Serialize;

use super::sampler::{hit_and_run_sample, vote_fraction, SamplerConfig, SeparatorVersionSpace};
use crate::error::{Error, Result};
use crate::kwik::KwikLearner;
use crate::rng::derive_seed;
use crate::types::{norm, Decision, Label};

/// `R = (1 + sqrt(d) / gamma)^d`.
pub fn separability_measure(dim: usize, gamma: f64) -> Result<f64> {
    if dim == 0 || !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("need d >= 1 and gamma in (0, 1]"));
    }
    Ok((1.0 + (dim as f64).sqrt() / gamma).powi(dim as i32))
}

/// `R^(1/k) ln R`, the growth rate of the abstention bound for budget `k`.
/// Constants are not known, so this is a scale, not a bound.
pub fn linsep_abstention_scale(dim: usize, gamma: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("mistake budget must be at least 1"));
    }
    let r = separability_measure(dim, gamma)?;
    Ok(r.powf(1.0 / k as f64) * r.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinsepBudgetState {
    pub budget: usize,
    pub mistakes: usize,
    /// Volume ratio when the threshold was last reset.
    pub ratio_at_reset: f64,
    pub threshold: f64,
}

/// Relaxed enumeration over homogeneous linear separators with volumes in
/// place of counts. The version-space measure is `volume_ratio * initial`,
/// and a prediction is made on the sampled majority when the minority's
/// measure is at most `(measure at last mistake)^((k - m)/(k + 1 - m))`.
#[derive(Clone, Debug)]
pub struct LinsepRelaxedEnumeration {
    vs: SeparatorVersionSpace,
    sampler: SamplerConfig,
    initial_measure: f64,
    state: LinsepBudgetState,
    round: u64,
    pending: Option<(Decision<Label>, Vec<Vec<f64>>)>,
}

fn threshold(measure: f64, k: usize, m: usize) -> f64 {
    if m >= k {
        0.0
    } else {
        let (k, m) = (k as f64, m as f64);
        measure.powf((k - m) / (k + 1.0 - m))
    }
}

impl LinsepRelaxedEnumeration {
    /// `initial_measure` normalizes the unit ball; `separability_measure`
    /// is the natural choice when a margin is known.
    pub fn new(dim: usize, budget: usize, initial_measure: f64, sampler: SamplerConfig) -> Result<Self> {
        sampler.validate()?;
        if !(initial_measure >= 1.0) {
            return Err(Error::invalid("initial measure must be at least 1"));
        }
        Ok(LinsepRelaxedEnumeration {
            vs: SeparatorVersionSpace::new(dim)?,
            sampler,
            initial_measure,
            state: LinsepBudgetState {
                budget,
                mistakes: 0,
                ratio_at_reset: 1.0,
                threshold: threshold(initial_measure, budget, 0),
            },
            round: 0,
            pending: None,
        })
    }

    pub fn version_space(&self) -> &SeparatorVersionSpace {
        &self.vs
    }

    pub fn state(&self) -> &LinsepBudgetState {
        &self.state
    }

    pub fn measure(&self) -> f64 {
        self.vs.volume_ratio() * self.initial_measure
    }

    fn decide(&self, p_pos: f64) -> Decision<Label> {
        let minority = p_pos.min(1.0 - p_pos);
        let majority = if p_pos > 0.5 { Label::Pos } else { Label::Neg };
        if minority == 0.0 {
            return Decision::Predict(majority);
        }
        if self.state.mistakes >= self.state.budget || p_pos == 0.5 {
            return Decision::Abstain;
        }
        if minority * self.measure() <= self.state.threshold {
            Decision::Predict(majority)
        } else {
            Decision::Abstain
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.vs.dim() {
            return Err(Error::ArityMismatch { expected: self.vs.dim(), got: x.len() });
        }
        if norm(x) == 0.0 {
            return Err(Error::invalid("query must be nonzero"));
        }
        Ok(())
    }

    fn sample_and_decide(&mut self, x: &[f64]) -> Result<(Decision<Label>, Vec<Vec<f64>>)> {
        let cfg = SamplerConfig {
            seed: derive_seed(self.sampler.seed, self.round),
            ..self.sampler
        };
        self.round += 1;
        let samples = hit_and_run_sample(&self.vs, &cfg)?;
        let d = self.decide(vote_fraction(&samples, x));
        Ok((d, samples))
    }
}

impl KwikLearner for LinsepRelaxedEnumeration {
    type Point = Vec<f64>;
    type Prediction = Label;
    type Observation = Label;

    fn predict(&mut self, x: &Vec<f64>) -> Result<Decision<Label>> {
        self.check(x)?;
        let (d, samples) = self.sample_and_decide(x)?;
        self.pending = Some((d, samples));
        Ok(d)
    }

    fn observe(&mut self, x: &Vec<f64>, y: &Label) -> Result<()> {
        self.check(x)?;
        let (d, samples) = match self.pending.take() {
            Some(p) => p,
            None => self.sample_and_decide(x)?,
        };
        self.vs.add_constraint(x, *y, &samples)?;
        if matches!(d, Decision::Predict(p) if p != *y) {
            self.state.mistakes += 1;
            self.state.ratio_at_reset = self.vs.volume_ratio();
            self.state.threshold = threshold(self.measure(), self.state.budget, self.state.mistakes);
        }
        Ok(())
    }

    fn needs_every_label(&self) -> bool {
        true
    }
}
