use std::sync::Arc;

use serde::Serialize;

use super::{KwikLearner, VersionSpaceLearner};
use crate::error::{Error, Result};
use crate::types::{Decision, ExplicitVersionSpace, FiniteHypothesisClass, HypothesisSet, Label};

fn check_point(class: &FiniteHypothesisClass, x: usize) -> Result<()> {
    if x >= class.num_points() {
        return Err(Error::invalid(format!(
            "point {x} outside domain of size {}",
            class.num_points()
        )));
    }
    Ok(())
}

/// Zero-mistake learner over a finite class: predict only where the whole
/// version space agrees, otherwise abstain and prune with the label.
#[derive(Clone, Debug)]
pub struct Enumeration {
    class: Arc<FiniteHypothesisClass>,
    vs: ExplicitVersionSpace,
}

impl Enumeration {
    pub fn new(class: Arc<FiniteHypothesisClass>) -> Self {
        let vs = ExplicitVersionSpace::full(class.num_hypotheses());
        Enumeration { class, vs }
    }
}

impl KwikLearner for Enumeration {
    type Point = usize;
    type Prediction = Label;
    type Observation = Label;

    fn predict(&mut self, x: &usize) -> Result<Decision<Label>> {
        check_point(&self.class, *x)?;
        Ok(self.peek(*x))
    }

    fn observe(&mut self, x: &usize, y: &Label) -> Result<()> {
        check_point(&self.class, *x)?;
        self.vs.filter(self.class.as_ref(), x, *y).map(|_| ())
    }

    fn terminated(&self) -> bool {
        self.vs.len() == 1
    }

    fn fallback_guess(&self, x: &usize) -> Option<Label> {
        self.vs.majority(self.class.as_ref(), x)
    }
}

impl VersionSpaceLearner for Enumeration {
    fn class(&self) -> &FiniteHypothesisClass {
        &self.class
    }

    fn version_space(&self) -> &ExplicitVersionSpace {
        &self.vs
    }

    fn peek(&self, x: usize) -> Decision<Label> {
        match self.vs.unanimous(self.class.as_ref(), &x) {
            Some(l) => Decision::Predict(l),
            None => Decision::Abstain,
        }
    }
}

/// Mistake budget bookkeeping for relaxed enumeration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MistakeBudgetState {
    /// Mistakes allowed.
    pub budget: usize,
    pub mistakes: usize,
    /// Largest minority vote that still permits a prediction.
    pub threshold: f64,
    /// `|V|` when the threshold was last set.
    pub version_space_size: usize,
}

impl MistakeBudgetState {
    pub fn new(budget: usize, class_size: usize) -> Self {
        let mut s = MistakeBudgetState {
            budget,
            mistakes: 0,
            threshold: 0.0,
            version_space_size: class_size,
        };
        s.recompute(class_size);
        s
    }

    /// `threshold = |V|^((k - m) / (k + 1 - m))`.
    fn recompute(&mut self, size: usize) {
        self.version_space_size = size;
        let remaining = self.budget.saturating_sub(self.mistakes) as f64;
        self.threshold = (size as f64).powf(remaining / (remaining + 1.0));
    }

    /// Once the budget is spent only unanimous votes are predicted.
    pub fn exhausted(&self) -> bool {
        self.mistakes >= self.budget
    }

    /// `(k + 1) |H|^(1 / (k + 1))`.
    pub fn abstention_bound(budget: usize, class_size: usize) -> f64 {
        let k1 = budget as f64 + 1.0;
        k1 * (class_size as f64).powf(1.0 / k1)
    }
}

/// Enumeration that tolerates up to `k` mistakes in exchange for fewer
/// abstentions. Predicts the majority when the minority vote is small
/// enough; every label is revealed and prunes the version space.
#[derive(Clone, Debug)]
pub struct RelaxedEnumeration {
    class: Arc<FiniteHypothesisClass>,
    vs: ExplicitVersionSpace,
    state: MistakeBudgetState,
}

impl RelaxedEnumeration {
    pub fn new(class: Arc<FiniteHypothesisClass>, budget: usize) -> Self {
        let n = class.num_hypotheses();
        RelaxedEnumeration {
            vs: ExplicitVersionSpace::full(n),
            state: MistakeBudgetState::new(budget, n),
            class,
        }
    }

    pub fn state(&self) -> &MistakeBudgetState {
        &self.state
    }
}

impl KwikLearner for RelaxedEnumeration {
    type Point = usize;
    type Prediction = Label;
    type Observation = Label;

    fn predict(&mut self, x: &usize) -> Result<Decision<Label>> {
        check_point(&self.class, *x)?;
        Ok(self.peek(*x))
    }

    fn observe(&mut self, x: &usize, y: &Label) -> Result<()> {
        check_point(&self.class, *x)?;
        let decision = self.peek(*x);
        self.vs.filter(self.class.as_ref(), x, *y)?;
        if matches!(decision, Decision::Predict(p) if p != *y) {
            self.state.mistakes += 1;
            self.state.recompute(self.vs.len());
        }
        Ok(())
    }

    fn needs_every_label(&self) -> bool {
        true
    }

    fn terminated(&self) -> bool {
        self.vs.len() == 1
    }

    fn fallback_guess(&self, x: &usize) -> Option<Label> {
        self.vs.majority(self.class.as_ref(), x)
    }
}

impl VersionSpaceLearner for RelaxedEnumeration {
    fn class(&self) -> &FiniteHypothesisClass {
        &self.class
    }

    fn version_space(&self) -> &ExplicitVersionSpace {
        &self.vs
    }

    fn peek(&self, x: usize) -> Decision<Label> {
        let (neg, pos) = self.vs.votes(self.class.as_ref(), &x);
        let minority = neg.min(pos);
        let majority = if pos > neg { Label::Pos } else { Label::Neg };
        if minority == 0 {
            return Decision::Predict(majority);
        }
        if self.state.exhausted() || neg == pos {
            return Decision::Abstain;
        }
        if minority as f64 <= self.state.threshold {
            Decision::Predict(majority)
        } else {
            Decision::Abstain
        }
    }
}

/// Mistake-bound baseline for singleton classes: always predict -1. It
/// errs at most once, on the lone positive point.
#[derive(Clone, Debug, Default)]
pub struct NegativeUntilMistake {
    positive: Option<usize>,
}

impl KwikLearner for NegativeUntilMistake {
    type Point = usize;
    type Prediction = Label;
    type Observation = Label;

    fn predict(&mut self, x: &usize) -> Result<Decision<Label>> {
        Ok(Decision::Predict(if self.positive == Some(*x) {
            Label::Pos
        } else {
            Label::Neg
        }))
    }

    fn observe(&mut self, x: &usize, y: &Label) -> Result<()> {
        if *y == Label::Pos {
            self.positive = Some(*x);
        }
        Ok(())
    }

    fn needs_every_label(&self) -> bool {
        true
    }
}
