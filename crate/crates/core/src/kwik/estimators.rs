use serde::Serialize;

use super::KwikLearner;
use crate::error::{Error, Result};
use crate::types::Decision;

/// Two-sided Hoeffding sample size `ceil(ln(2 / delta) / (2 eps^2))`.
pub fn hoeffding_sample_budget(eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "eps and delta must lie in (0, 1), got eps={eps} delta={delta}"
        )));
    }
    Ok(((2.0 / delta).ln() / (2.0 * eps * eps)).ceil() as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoinLearnerState {
    pub eps: f64,
    pub delta: f64,
    pub sample_budget: usize,
    pub observed: usize,
    pub successes: usize,
}

/// Learns the bias of a coin: abstain on the first `T` flips, then predict
/// the frozen empirical mean forever.
#[derive(Clone, Debug)]
pub struct CoinLearner {
    state: CoinLearnerState,
}

impl CoinLearner {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        let sample_budget = hoeffding_sample_budget(eps, delta)?;
        Ok(CoinLearner {
            state: CoinLearnerState {
                eps,
                delta,
                sample_budget,
                observed: 0,
                successes: 0,
            },
        })
    }

    pub fn state(&self) -> &CoinLearnerState {
        &self.state
    }

    pub fn trained(&self) -> bool {
        self.state.observed >= self.state.sample_budget
    }

    pub fn estimate(&self) -> Option<f64> {
        (self.trained() && self.state.observed > 0)
            .then(|| self.state.successes as f64 / self.state.observed as f64)
    }

    fn record(&mut self, heads: bool) {
        if !self.trained() {
            self.state.observed += 1;
            self.state.successes += usize::from(heads);
        }
    }
}

impl KwikLearner for CoinLearner {
    type Point = ();
    type Prediction = f64;
    type Observation = bool;

    fn predict(&mut self, _x: &()) -> Result<Decision<f64>> {
        Ok(match self.estimate() {
            Some(p) => Decision::Predict(p),
            None => Decision::Abstain,
        })
    }

    fn observe(&mut self, _x: &(), heads: &bool) -> Result<()> {
        self.record(*heads);
        Ok(())
    }

    fn terminated(&self) -> bool {
        self.trained()
    }
}

/// Learns an `n`-sided die as `n` one-vs-rest coins, each run at
/// confidence `delta / n` so the union of failures stays below `delta`.
#[derive(Clone, Debug)]
pub struct DieLearner {
    coins: Vec<CoinLearner>,
}

impl DieLearner {
    pub fn new(faces: usize, eps: f64, delta: f64) -> Result<Self> {
        if faces == 0 {
            return Err(Error::invalid("die needs at least one face"));
        }
        let coins = (0..faces)
            .map(|_| CoinLearner::new(eps, delta / faces as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(DieLearner { coins })
    }

    pub fn faces(&self) -> usize {
        self.coins.len()
    }

    /// Per-face sample budget; zero for a one-sided die, which is known.
    pub fn per_coin_budget(&self) -> usize {
        if self.faces() == 1 {
            0
        } else {
            self.coins[0].state().sample_budget
        }
    }

    pub fn estimate(&self) -> Option<Vec<f64>> {
        if self.faces() == 1 {
            return Some(vec![1.0]);
        }
        let raw = self
            .coins
            .iter()
            .map(|c| c.estimate())
            .collect::<Option<Vec<f64>>>()?;
        let total: f64 = raw.iter().sum();
        Some(raw.into_iter().map(|p| p / total).collect())
    }
}

impl KwikLearner for DieLearner {
    type Point = ();
    type Prediction = Vec<f64>;
    type Observation = usize;

    fn predict(&mut self, _x: &()) -> Result<Decision<Vec<f64>>> {
        Ok(match self.estimate() {
            Some(p) => Decision::Predict(p),
            None => Decision::Abstain,
        })
    }

    fn observe(&mut self, _x: &(), face: &usize) -> Result<()> {
        if *face >= self.faces() {
            return Err(Error::invalid(format!(
                "face {face} out of range for a {}-sided die",
                self.faces()
            )));
        }
        for (i, c) in self.coins.iter_mut().enumerate() {
            c.record(i == *face);
        }
        Ok(())
    }

    fn terminated(&self) -> bool {
        self.estimate().is_some()
    }
}
