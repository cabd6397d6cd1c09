//! Abstaining binary classifiers.
//!
//! Two settings are covered. In the online KWIK setting ([`kwik`],
//! [`linsep`]) an adversary picks points one at a time and a learner must
//! either predict correctly or say "I don't know". In the batch setting
//! ([`selective`]) a classifier is fit once to an IID sample and then
//! predicts or abstains on fresh points, trading coverage against risk.
//!
//! [`datagen`] builds the synthetic instances and adversaries used to
//! stress these learners, and [`harness`] runs experiments and checks the
//! abstention and mistake bounds empirically.

pub mod datagen;
pub mod error;
pub mod harness;
pub mod kwik;
pub mod linsep;
pub mod lp;
pub mod metrics;
pub mod rng;
pub mod selective;
pub mod types;

pub use error::{Error, Result};
pub use metrics::{evaluate_selective, RiskCoveragePoint};
pub use types::{
    Decision, ExplicitVersionSpace, FiniteHypothesisClass, HalfspaceSystem, HypothesisSet,
    KwikTranscript, Label, LabeledSet, Outcome, Point, PredictionValue, RoundRecord, Transcript,
    VersionSpace,
};
