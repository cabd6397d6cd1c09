//! Domain vocabulary shared by the online and batch learners.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary label in {-1, +1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn sign(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.sign())
    }

    /// Label of a nonzero real by its sign. Zero maps to `None`.
    pub fn from_value(v: f64) -> Option<Label> {
        if v > 0.0 {
            Some(Label::Pos)
        } else if v < 0.0 {
            Some(Label::Neg)
        } else {
            None
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Neg => Label::Pos,
            Label::Pos => Label::Neg,
        }
    }

    pub const BOTH: [Label; 2] = [Label::Neg, Label::Pos];
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        l.sign()
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            -1 => Ok(Label::Neg),
            1 => Ok(Label::Pos),
            other => Err(format!("label must be -1 or +1, got {other}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Neg => f.write_str("-1"),
            Label::Pos => f.write_str("+1"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-1" => Ok(Label::Neg),
            "+1" | "1" => Ok(Label::Pos),
            other => Err(Error::invalid(format!("unparseable label `{other}`"))),
        }
    }
}

/// Output of an abstaining predictor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision<T = Label> {
    Predict(T),
    Abstain,
}

impl<T> Decision<T> {
    pub fn is_abstain(&self) -> bool {
        matches!(self, Decision::Abstain)
    }

    pub fn prediction(&self) -> Option<&T> {
        match self {
            Decision::Predict(v) => Some(v),
            Decision::Abstain => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Decision<U> {
        match self {
            Decision::Predict(v) => Decision::Predict(f(v)),
            Decision::Abstain => Decision::Abstain,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Decision<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Predict(v) => v.fmt(f),
            Decision::Abstain => f.write_str("abstain"),
        }
    }
}

/// Prediction values that can be judged against a ground truth.
///
/// Labels must match exactly; real values must fall strictly within `eps`.
pub trait PredictionValue: Clone + fmt::Debug {
    fn agrees_with(&self, other: &Self, eps: f64) -> bool;
}

impl PredictionValue for Label {
    fn agrees_with(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }
}

impl PredictionValue for f64 {
    fn agrees_with(&self, other: &Self, eps: f64) -> bool {
        (self - other).abs() < eps
    }
}

impl<T: PredictionValue> PredictionValue for Vec<T> {
    fn agrees_with(&self, other: &Self, eps: f64) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(a, b)| a.agrees_with(b, eps))
    }
}

/// A query point: a discrete domain index or a real vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Id(usize),
    Vector(Vec<f64>),
}

impl From<usize> for Point {
    fn from(id: usize) -> Self {
        Point::Id(id)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Vector(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point::Vector(v.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Id(id) => write!(f, "{id}"),
            Point::Vector(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{x:?}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses either an integer id or a `;`-separated vector. `Display`
    /// never renders a coordinate as a bare integer, so the forms are
    /// unambiguous.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(id) = s.parse::<usize>() {
            return Ok(Point::Id(id));
        }
        s.split(';')
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("unparseable coordinate `{c}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Point::Vector)
    }
}

/// Labeled sample `S = {(x_i, y_i)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSet<P> {
    items: Vec<(P, Label)>,
}

impl<P> LabeledSet<P> {
    pub fn new(items: Vec<(P, Label)>) -> Self {
        LabeledSet { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(P, Label)] {
        &self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = &(P, Label)> {
        self.items.iter()
    }

    pub fn into_items(self) -> Vec<(P, Label)> {
        self.items
    }
}

impl<P> FromIterator<(P, Label)> for LabeledSet<P> {
    fn from_iter<I: IntoIterator<Item = (P, Label)>>(iter: I) -> Self {
        LabeledSet::new(iter.into_iter().collect())
    }
}

/// An indexable set of binary hypotheses over points of type `P`.
pub trait HypothesisSet<P: ?Sized> {
    fn num_hypotheses(&self) -> usize;
    fn predict(&self, h: usize, x: &P) -> Label;

    /// Number of training mistakes of hypothesis `h`.
    fn mistakes_on(&self, h: usize, sample: &LabeledSet<P>) -> usize
    where
        P: Sized,
    {
        sample.iter().filter(|(x, y)| self.predict(h, x) != *y).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Storage {
    Dense(Vec<Label>),
    /// `h` is +1 exactly on point `h`; kept implicit because the table is
    /// quadratic in the class size.
    Singleton,
}

/// Prediction table of a finite class over a finite domain, with an optional
/// designated target row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteHypothesisClass {
    num_hypotheses: usize,
    num_points: usize,
    storage: Storage,
    truth: Option<usize>,
}

impl FiniteHypothesisClass {
    pub fn new(rows: Vec<Vec<Label>>) -> Result<Self> {
        let num_hypotheses = rows.len();
        if num_hypotheses == 0 {
            return Err(Error::invalid("hypothesis class must be nonempty"));
        }
        let num_points = rows[0].len();
        if num_points == 0 {
            return Err(Error::invalid("domain must be nonempty"));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != num_points) {
            return Err(Error::invalid(format!(
                "row {bad} has {} entries, expected {num_points}",
                rows[bad].len()
            )));
        }
        Ok(FiniteHypothesisClass {
            num_hypotheses,
            num_points,
            storage: Storage::Dense(rows.into_iter().flatten().collect()),
            truth: None,
        })
    }

    /// `n` hypotheses over `n` points, hypothesis `h` positive only on `h`.
    pub fn singletons(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("hypothesis class must be nonempty"));
        }
        Ok(FiniteHypothesisClass {
            num_hypotheses: n,
            num_points: n,
            storage: Storage::Singleton,
            truth: None,
        })
    }

    pub fn from_fn(
        num_hypotheses: usize,
        num_points: usize,
        mut f: impl FnMut(usize, usize) -> Label,
    ) -> Result<Self> {
        let rows = (0..num_hypotheses)
            .map(|h| (0..num_points).map(|x| f(h, x)).collect())
            .collect();
        Self::new(rows)
    }

    pub fn with_truth(mut self, truth: usize) -> Result<Self> {
        if truth >= self.num_hypotheses {
            return Err(Error::invalid(format!(
                "truth index {truth} out of range for {} hypotheses",
                self.num_hypotheses
            )));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn truth(&self) -> Option<usize> {
        self.truth
    }

    pub fn row(&self, h: usize) -> Vec<Label> {
        (0..self.num_points).map(|x| self.label(h, x)).collect()
    }

    pub fn label(&self, h: usize, x: usize) -> Label {
        match &self.storage {
            Storage::Dense(t) => t[h * self.num_points + x],
            Storage::Singleton if h == x => Label::Pos,
            Storage::Singleton => Label::Neg,
        }
    }

    /// Label of the target hypothesis at `x`, if a target is set.
    pub fn truth_label(&self, x: usize) -> Option<Label> {
        self.truth.map(|t| self.label(t, x))
    }

    /// Labels `points` with the target hypothesis.
    pub fn label_points(&self, points: &[usize]) -> Result<LabeledSet<usize>> {
        let t = self
            .truth
            .ok_or_else(|| Error::invalid("class has no designated target"))?;
        Ok(points.iter().map(|&x| (x, self.label(t, x))).collect())
    }
}

impl HypothesisSet<usize> for FiniteHypothesisClass {
    fn num_hypotheses(&self) -> usize {
        self.num_hypotheses
    }

    fn predict(&self, h: usize, x: &usize) -> Label {
        self.label(h, *x)
    }
}

/// Version space kept as an explicit list of surviving hypothesis ids,
/// always sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExplicitVersionSpace {
    members: Vec<usize>,
}

impl ExplicitVersionSpace {
    pub fn full(num_hypotheses: usize) -> Self {
        ExplicitVersionSpace {
            members: (0..num_hypotheses).collect(),
        }
    }

    pub fn from_members(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        ExplicitVersionSpace { members }
    }

    /// Hypotheses consistent with every example in `sample`.
    pub fn consistent<P, H: HypothesisSet<P>>(class: &H, sample: &LabeledSet<P>) -> Self {
        let members = (0..class.num_hypotheses())
            .filter(|&h| sample.iter().all(|(x, y)| class.predict(h, x) == *y))
            .collect();
        ExplicitVersionSpace { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, h: usize) -> bool {
        self.members.binary_search(&h).is_ok()
    }

    /// `(negative votes, positive votes)` at `x`.
    pub fn votes<P: ?Sized, H: HypothesisSet<P>>(&self, class: &H, x: &P) -> (usize, usize) {
        let pos = self
            .members
            .iter()
            .filter(|&&h| class.predict(h, x) == Label::Pos)
            .count();
        (self.members.len() - pos, pos)
    }

    /// The common label at `x` if every member agrees.
    pub fn unanimous<P: ?Sized, H: HypothesisSet<P>>(&self, class: &H, x: &P) -> Option<Label> {
        let first = class.predict(*self.members.first()?, x);
        self.members[1..]
            .iter()
            .all(|&h| class.predict(h, x) == first)
            .then_some(first)
    }

    /// Strict majority label at `x`; `None` on an exact tie or empty space.
    pub fn majority<P: ?Sized, H: HypothesisSet<P>>(&self, class: &H, x: &P) -> Option<Label> {
        let (neg, pos) = self.votes(class, x);
        match pos.cmp(&neg) {
            std::cmp::Ordering::Greater => Some(Label::Pos),
            std::cmp::Ordering::Less => Some(Label::Neg),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Keeps the members that label `x` as `y`. Emptying the space is a
    /// realizability violation and leaves the space untouched.
    pub fn filter<P: ?Sized, H: HypothesisSet<P>>(&mut self, class: &H, x: &P, y: Label) -> Result<usize> {
        let kept: Vec<usize> = self
            .members
            .iter()
            .copied()
            .filter(|&h| class.predict(h, x) == y)
            .collect();
        if kept.is_empty() {
            return Err(Error::RealizabilityViolation(
                "no hypothesis in the version space is consistent with the label".into(),
            ));
        }
        let removed = self.members.len() - kept.len();
        self.members = kept;
        Ok(removed)
    }
}

/// Homogeneous strict halfspace system `{w : c_i . w > 0}` in `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSystem {
    dim: usize,
    directions: Vec<Vec<f64>>,
}

impl HalfspaceSystem {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        Ok(HalfspaceSystem {
            dim,
            directions: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    /// Adds the constraint `y (w . x) > 0`.
    pub fn push_labeled(&mut self, x: &[f64], y: Label) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::ArityMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if x.iter().all(|v| *v == 0.0) {
            return Err(Error::invalid("zero vector cannot define a halfspace"));
        }
        let s = y.as_f64();
        self.directions.push(x.iter().map(|v| s * v).collect());
        Ok(())
    }

    /// True iff `w` strictly satisfies every constraint.
    pub fn satisfied_by(&self, w: &[f64]) -> bool {
        self.directions.iter().all(|c| dot(c, w) > 0.0)
    }
}

/// Version space of either explicit finite or implicit polytope form.
#[derive(Clone, Debug, PartialEq)]
pub enum VersionSpace {
    Explicit(ExplicitVersionSpace),
    ImplicitPolytope(HalfspaceSystem),
}

/// Outcome of a single online round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Correct,
    Mistake,
    Abstain,
}

impl Outcome {
    pub fn judge<Y: PredictionValue>(decision: &Decision<Y>, truth: &Y, eps: f64) -> Outcome {
        match decision {
            Decision::Abstain => Outcome::Abstain,
            Decision::Predict(p) if p.agrees_with(truth, eps) => Outcome::Correct,
            Decision::Predict(_) => Outcome::Mistake,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Correct => "correct",
            Outcome::Mistake => "mistake",
            Outcome::Abstain => "abstain",
        }
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correct" => Ok(Outcome::Correct),
            "mistake" => Ok(Outcome::Mistake),
            "abstain" => Ok(Outcome::Abstain),
            other => Err(Error::invalid(format!("unknown outcome `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord<P, Y> {
    pub point: P,
    pub decision: Decision<Y>,
    pub truth: Y,
    pub outcome: Outcome,
}

/// Round log of an online run. Counters are maintained on push and always
/// equal a recount of the log.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript<P, Y> {
    rounds: Vec<RoundRecord<P, Y>>,
    mistakes: usize,
    abstentions: usize,
    ended_early: bool,
}

pub type KwikTranscript = Transcript<Point, Label>;

impl<P, Y> Default for Transcript<P, Y> {
    fn default() -> Self {
        Transcript {
            rounds: Vec::new(),
            mistakes: 0,
            abstentions: 0,
            ended_early: false,
        }
    }
}

impl<P, Y> Transcript<P, Y> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: RoundRecord<P, Y>) {
        match record.outcome {
            Outcome::Mistake => self.mistakes += 1,
            Outcome::Abstain => self.abstentions += 1,
            Outcome::Correct => {}
        }
        self.rounds.push(record);
    }

    pub fn rounds(&self) -> &[RoundRecord<P, Y>] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn mistakes(&self) -> usize {
        self.mistakes
    }

    pub fn abstentions(&self) -> usize {
        self.abstentions
    }

    pub fn ended_early(&self) -> bool {
        self.ended_early
    }

    pub fn mark_ended_early(&mut self) {
        self.ended_early = true;
    }

    /// `(mistakes, abstentions)` recounted from the log.
    pub fn recount(&self) -> (usize, usize) {
        self.rounds.iter().fold((0, 0), |(m, a), r| match r.outcome {
            Outcome::Mistake => (m + 1, a),
            Outcome::Abstain => (m, a + 1),
            Outcome::Correct => (m, a),
        })
    }

    pub fn map_points<Q>(self, mut f: impl FnMut(P) -> Q) -> Transcript<Q, Y> {
        Transcript {
            rounds: self
                .rounds
                .into_iter()
                .map(|r| RoundRecord {
                    point: f(r.point),
                    decision: r.decision,
                    truth: r.truth,
                    outcome: r.outcome,
                })
                .collect(),
            mistakes: self.mistakes,
            abstentions: self.abstentions,
            ended_early: self.ended_early,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
