use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SelectiveClassifier;
use crate::error::{Error, Result};
use crate::rng::CoinStream;
use crate::types::{Decision, HypothesisSet, Label, LabeledSet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WmConfig {
    pub theta: f64,
    pub delta: f64,
    /// Inverse temperature `ln(8|H|) m^(1/2 - theta)`.
    pub eta: f64,
    /// Abstention margin `2 sqrt(ln(sqrt(2)/delta)/m) + eta/(8m)`.
    pub threshold: f64,
}

impl WmConfig {
    pub fn new(theta: f64, delta: f64, class_size: usize, m: usize) -> Result<Self> {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(Error::invalid(format!("theta must lie in (0, 1/2), got {theta}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        if class_size < 2 || m == 0 {
            return Err(Error::invalid("need |H| >= 2 and m >= 1"));
        }
        let mf = m as f64;
        let eta = (8.0 * class_size as f64).ln() * mf.powf(0.5 - theta);
        let threshold = 2.0 * ((2f64.sqrt() / delta).ln() / mf).sqrt() + eta / (8.0 * mf);
        Ok(WmConfig {
            theta,
            delta,
            eta,
            threshold,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }
}

/// Exponentially weighted vote over a finite class with an abstention band.
#[derive(Clone, Debug)]
pub struct WeightedMajority<C> {
    class: Arc<C>,
    /// `-eta * error(h)` per hypothesis.
    log_weights: Vec<f64>,
    cfg: WmConfig,
}

pub fn wm_fit<P, C: HypothesisSet<P>>(class: Arc<C>, sample: &LabeledSet<P>, cfg: WmConfig) -> Result<WeightedMajority<C>> {
    if sample.is_empty() {
        return Err(Error::invalid("weighted majority needs m >= 1"));
    }
    let m = sample.len() as f64;
    let errors: Vec<f64> = (0..class.num_hypotheses())
        .map(|h| class.mistakes_on(h, sample) as f64 / m)
        .collect();
    WeightedMajority::from_errors(class, errors, cfg)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl<C> WeightedMajority<C> {
    /// Weights from arbitrary per-hypothesis error rates, e.g. true risks.
    pub fn from_errors(class: Arc<C>, errors: Vec<f64>, cfg: WmConfig) -> Result<Self> {
        if errors.len() < 2 {
            return Err(Error::invalid("weighted majority needs |H| >= 2"));
        }
        let log_weights = errors.iter().map(|e| -cfg.eta * e).collect();
        Ok(WeightedMajority {
            class,
            log_weights,
            cfg,
        })
    }

    pub fn config(&self) -> &WmConfig {
        &self.cfg
    }

    /// `(1/eta) ln(W+ / W-)`; infinite when one side has no hypotheses.
    pub fn log_odds<P: ?Sized>(&self, x: &P) -> f64
    where
        C: HypothesisSet<P>,
    {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (h, w) in self.log_weights.iter().enumerate() {
            match self.class.predict(h, x) {
                Label::Pos => pos.push(*w),
                Label::Neg => neg.push(*w),
            }
        }
        match (pos.is_empty(), neg.is_empty()) {
            (false, true) => f64::INFINITY,
            (true, false) => f64::NEG_INFINITY,
            _ => (log_sum_exp(&pos) - log_sum_exp(&neg)) / self.cfg.eta,
        }
    }
}

impl<P: ?Sized, C: HypothesisSet<P>> SelectiveClassifier<P> for WeightedMajority<C> {
    fn decide(&self, x: &P, _coins: &mut CoinStream) -> Decision<Label> {
        let l = self.log_odds(x);
        if l.abs() > self.cfg.threshold {
            Decision::Predict(if l > 0.0 { Label::Pos } else { Label::Neg })
        } else {
            Decision::Abstain
        }
    }

    fn name(&self) -> String {
        "wm".into()
    }

    fn params(&self) -> String {
        format!("theta={};delta={};threshold={}", self.cfg.theta, self.cfg.delta, self.cfg.threshold)
    }
}

/// Constants multiplying the asymptotic terms of the weighted-majority
/// bounds. They are not pinned down by the analysis and default to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WmBoundConstants {
    pub error: f64,
    pub abstain: f64,
}

impl Default for WmBoundConstants {
    fn default() -> Self {
        WmBoundConstants {
            error: 1.0,
            abstain: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WmBounds {
    /// `2 err* + error_slack + delta`
    pub error_bound: f64,
    /// `5 err* + abstain_slack`
    pub abstain_bound: f64,
    /// `c_e m^(theta - 1/2)`
    pub error_slack: f64,
    /// `c_a (sqrt(ln(1/delta)) + ln|H|) / m^(1/2 - theta)`
    pub abstain_slack: f64,
}

pub fn wm_bounds(
    class_size: usize,
    m: usize,
    theta: f64,
    delta: f64,
    err_star: f64,
    consts: WmBoundConstants,
) -> Result<WmBounds> {
    if !(theta > 0.0 && theta < 0.5) || !(delta > 0.0 && delta < 1.0) || class_size < 2 || m == 0 {
        return Err(Error::invalid("weighted-majority bound parameters out of range"));
    }
    if !(0.0..=1.0).contains(&err_star) {
        return Err(Error::invalid("err_star must be a probability"));
    }
    let mf = m as f64;
    let error_slack = consts.error * mf.powf(theta - 0.5);
    let abstain_slack =
        consts.abstain * ((1.0 / delta).ln().sqrt() + (class_size as f64).ln()) / mf.powf(0.5 - theta);
    Ok(WmBounds {
        error_bound: 2.0 * err_star + error_slack + delta,
        abstain_bound: 5.0 * err_star + abstain_slack,
        error_slack,
        abstain_slack,
    })
}
