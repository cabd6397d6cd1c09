//! Online KWIK / mistake-bound learners and the protocol that drives them.
//!
//! Each round the adversary picks a point, the learner predicts or
//! abstains, and the label is shown to the learner according to the
//! [`FeedbackMode`]. KWIK learners see a label only after abstaining;
//! mistake-tolerant learners see every label.

mod combine;
mod enumeration;
mod estimators;
mod linreg;
mod wrapper;

pub use combine::{ProductLearner, UnionLearner};
pub use enumeration::{Enumeration, MistakeBudgetState, NegativeUntilMistake, RelaxedEnumeration};
pub use estimators::{hoeffding_sample_budget, CoinLearner, CoinLearnerState, DieLearner};
pub use linreg::{LinRegState, NoiselessLinReg, NoisyLinReg, NoisyLinRegConfig, SPAN_TOLERANCE};
pub use wrapper::MbWrapper;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{
    Decision, ExplicitVersionSpace, FiniteHypothesisClass, Label, Outcome, PredictionValue,
    RoundRecord, Transcript,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// KWIK: the label is revealed only for abstained rounds.
    LabelOnAbstainOnly,
    /// MB-style: the label is revealed every round.
    LabelAlways,
}

/// An online learner that may abstain.
pub trait KwikLearner {
    type Point;
    type Prediction: PredictionValue;
    type Observation;

    fn predict(&mut self, x: &Self::Point) -> Result<Decision<Self::Prediction>>;

    /// Feeds the label for the point just queried.
    fn observe(&mut self, x: &Self::Point, y: &Self::Observation) -> Result<()>;

    /// Learners that count their own mistakes need every label.
    fn needs_every_label(&self) -> bool {
        false
    }

    /// True once the learner has nothing left to learn.
    fn terminated(&self) -> bool {
        false
    }

    /// Best concrete guess at `x`, used when a forced prediction is wanted.
    fn fallback_guess(&self, _x: &Self::Point) -> Option<Self::Prediction> {
        None
    }
}

/// Finite-class learners whose state is an explicit version space.
pub trait VersionSpaceLearner:
    KwikLearner<Point = usize, Prediction = Label, Observation = Label>
{
    fn class(&self) -> &FiniteHypothesisClass;
    fn version_space(&self) -> &ExplicitVersionSpace;
    /// The decision `predict` would make at `x`, without side effects.
    fn peek(&self, x: usize) -> Decision<Label>;
}

/// One adversarial query: the point, its ground truth for judging the
/// prediction, and what the learner is shown as feedback.
#[derive(Clone, Debug, PartialEq)]
pub struct Query<P, Y, O> {
    pub point: P,
    pub truth: Y,
    pub observation: O,
}

impl<P, Y: Clone> Query<P, Y, Y> {
    /// Query whose feedback is the truth itself (classification, noiseless
    /// regression).
    pub fn labeled(point: P, truth: Y) -> Self {
        Query {
            point,
            observation: truth.clone(),
            truth,
        }
    }
}

pub trait Adversary<P, Y, O> {
    /// Next query given the full history, or `None` when the adversary has
    /// nothing left to ask.
    fn next_query(&mut self, history: &Transcript<P, Y>) -> Option<Query<P, Y, O>>;
}

/// Replays a fixed list of queries, then stops.
#[derive(Clone, Debug)]
pub struct SequenceAdversary<P, Y, O> {
    queries: std::vec::IntoIter<Query<P, Y, O>>,
}

impl<P, Y, O> SequenceAdversary<P, Y, O> {
    pub fn new(queries: Vec<Query<P, Y, O>>) -> Self {
        SequenceAdversary {
            queries: queries.into_iter(),
        }
    }
}

impl<P, Y: Clone> SequenceAdversary<P, Y, Y> {
    pub fn labeled(items: impl IntoIterator<Item = (P, Y)>) -> Self {
        Self::new(items.into_iter().map(|(p, y)| Query::labeled(p, y)).collect())
    }
}

impl<P, Y, O> Adversary<P, Y, O> for SequenceAdversary<P, Y, O> {
    fn next_query(&mut self, _history: &Transcript<P, Y>) -> Option<Query<P, Y, O>> {
        self.queries.next()
    }
}

impl<P, Y, O, F> Adversary<P, Y, O> for F
where
    F: FnMut(&Transcript<P, Y>) -> Option<Query<P, Y, O>>,
{
    fn next_query(&mut self, history: &Transcript<P, Y>) -> Option<Query<P, Y, O>> {
        self(history)
    }
}

/// Runs up to `rounds` rounds of the online protocol.
///
/// The run stops early, with `ended_early` set, when the adversary runs out
/// of queries. A terminated learner keeps answering with its final
/// hypothesis.
pub fn run_protocol<L, A>(
    learner: &mut L,
    adversary: &mut A,
    rounds: usize,
    mode: FeedbackMode,
    eps: f64,
) -> Result<Transcript<L::Point, L::Prediction>>
where
    L: KwikLearner,
    L::Point: Clone,
    A: Adversary<L::Point, L::Prediction, L::Observation>,
{
    if learner.needs_every_label() && mode == FeedbackMode::LabelOnAbstainOnly {
        return Err(Error::invalid(
            "learner needs every label but feedback is abstain-only",
        ));
    }
    let mut transcript = Transcript::new();
    for _ in 0..rounds {
        let Some(q) = adversary.next_query(&transcript) else {
            transcript.mark_ended_early();
            break;
        };
        let decision = learner.predict(&q.point)?;
        if decision.is_abstain() || mode == FeedbackMode::LabelAlways {
            learner.observe(&q.point, &q.observation)?;
        }
        let outcome = Outcome::judge(&decision, &q.truth, eps);
        transcript.push(RoundRecord {
            point: q.point,
            decision,
            truth: q.truth,
            outcome,
        });
    }
    Ok(transcript)
}
