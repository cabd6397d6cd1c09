use super::{KwikLearner, VersionSpaceLearner};
use crate::error::Result;
use crate::types::{Decision, ExplicitVersionSpace, FiniteHypothesisClass, Label};

/// Turns a KWIK learner into a mistake-bound learner by guessing wherever
/// the inner learner would abstain. The guess is the inner learner's
/// fallback (version-space majority) or `+1` when it has none.
///
/// The inner learner is fed exactly the labels it would see under the KWIK
/// protocol, so each wrapper mistake is charged to an inner abstention.
#[derive(Clone, Debug)]
pub struct MbWrapper<L> {
    inner: L,
    inner_abstained: Option<bool>,
    forced: usize,
}

impl<L> MbWrapper<L> {
    pub fn new(inner: L) -> Self {
        MbWrapper {
            inner,
            inner_abstained: None,
            forced: 0,
        }
    }

    pub fn inner(&self) -> &L {
        &self.inner
    }

    /// Rounds on which a prediction was forced.
    pub fn forced_predictions(&self) -> usize {
        self.forced
    }
}

impl<L> KwikLearner for MbWrapper<L>
where
    L: KwikLearner<Prediction = Label, Observation = Label>,
{
    type Point = L::Point;
    type Prediction = Label;
    type Observation = Label;

    fn predict(&mut self, x: &L::Point) -> Result<Decision<Label>> {
        match self.inner.predict(x)? {
            Decision::Predict(y) => {
                self.inner_abstained = Some(false);
                Ok(Decision::Predict(y))
            }
            Decision::Abstain => {
                self.inner_abstained = Some(true);
                self.forced += 1;
                Ok(Decision::Predict(self.inner.fallback_guess(x).unwrap_or(Label::Pos)))
            }
        }
    }

    fn observe(&mut self, x: &L::Point, y: &Label) -> Result<()> {
        let forward = match self.inner_abstained.take() {
            Some(abstained) => abstained || self.inner.needs_every_label(),
            // Observation without a preceding prediction: pass it through.
            None => true,
        };
        if forward {
            self.inner.observe(x, y)?;
        }
        Ok(())
    }

    fn needs_every_label(&self) -> bool {
        true
    }

    fn terminated(&self) -> bool {
        self.inner.terminated()
    }
}

impl<L: VersionSpaceLearner> VersionSpaceLearner for MbWrapper<L> {
    fn class(&self) -> &FiniteHypothesisClass {
        self.inner.class()
    }

    fn version_space(&self) -> &ExplicitVersionSpace {
        self.inner.version_space()
    }

    fn peek(&self, x: usize) -> Decision<Label> {
        match self.inner.peek(x) {
            Decision::Abstain => {
                Decision::Predict(self.inner.fallback_guess(&x).unwrap_or(Label::Pos))
            }
            d => d,
        }
    }
}
