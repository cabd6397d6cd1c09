use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kwik::{Adversary, FeedbackMode, Query, VersionSpaceLearner};
use crate::types::{Decision, FiniteHypothesisClass, HypothesisSet, Label, Transcript};

/// Adaptive adversary for version-space learners.
///
/// It keeps a shadow copy of the learner, replays each finished round on it,
/// and then picks, in order of preference:
/// 1. a point where the learner abstains, labeled to prune as little as
///    possible;
/// 2. a point where the learner predicts but some member of the version
///    space disagrees, labeled against the prediction;
/// 3. a correctly predicted point that still prunes the version space;
/// 4. otherwise the next point in round-robin order with a consistent label.
///
/// Labels always agree with at least one surviving hypothesis, so the stream
/// stays realizable.
#[derive(Clone, Debug)]
pub struct GreedyAdversary<L> {
    shadow: L,
    mode: FeedbackMode,
    replayed: usize,
    cursor: usize,
}

impl<L> GreedyAdversary<L>
where
    L: VersionSpaceLearner + Clone,
{
    /// `shadow` must be in the same state as the learner under attack.
    pub fn new(shadow: L, mode: FeedbackMode) -> Self {
        GreedyAdversary {
            shadow,
            mode,
            replayed: 0,
            cursor: 0,
        }
    }

    fn replay(&mut self, history: &Transcript<usize, Label>) -> Result<()> {
        for r in &history.rounds()[self.replayed..] {
            let d = self.shadow.predict(&r.point)?;
            if d.is_abstain() || self.mode == FeedbackMode::LabelAlways {
                self.shadow.observe(&r.point, &r.truth)?;
            }
        }
        self.replayed = history.len();
        Ok(())
    }

    fn choose(&mut self) -> (usize, Label) {
        let class = self.shadow.class();
        let vs = self.shadow.version_space();
        let n = class.num_points();
        // (priority, removed, point, label), lower is better
        let mut best: Option<(u8, usize, usize, Label)> = None;
        for x in 0..n {
            let (neg, pos) = vs.votes(class, &x);
            if neg == 0 || pos == 0 {
                continue;
            }
            let cand = match self.shadow.peek(x) {
                Decision::Abstain => {
                    let y = if pos >= neg { Label::Pos } else { Label::Neg };
                    (0, neg.min(pos), x, y)
                }
                Decision::Predict(p) => {
                    let against = if p == Label::Pos { neg } else { pos };
                    if against > 0 {
                        (1, vs.len() - against, x, p.flip())
                    } else {
                        (2, neg.min(pos), x, p)
                    }
                }
            };
            if best.is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                best = Some(cand);
            }
        }
        if let Some((_, _, x, y)) = best {
            return (x, y);
        }
        let x = self.cursor % n;
        self.cursor += 1;
        let h = vs.members()[0];
        (x, class.predict(h, &x))
    }
}

impl<L> Adversary<usize, Label, Label> for GreedyAdversary<L>
where
    L: VersionSpaceLearner + Clone,
{
    fn next_query(&mut self, history: &Transcript<usize, Label>) -> Option<Query<usize, Label, Label>> {
        self.replay(history).ok()?;
        let (x, y) = self.choose();
        Some(Query::labeled(x, y))
    }
}

/// Class over every possible column: `n` hypotheses and `2^n` points,
/// hypothesis `h` labels point `x` by bit `h` of `x`.
pub fn universal_class(n: usize) -> Result<FiniteHypothesisClass> {
    if !(1..=16).contains(&n) {
        return Err(Error::invalid(format!("universal class size must lie in 1..=16, got {n}")));
    }
    FiniteHypothesisClass::from_fn(n, 1 << n, |h, x| if (x >> h) & 1 == 1 { Label::Pos } else { Label::Neg })
}

/// Worst case over every adaptive realizable adversary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GameValue {
    pub max_abstentions: usize,
    pub max_mistakes: usize,
}

/// Exhaustive game-tree search against `learner`, which must be built on
/// [`universal_class`]. Every label is revealed. Queries on which the
/// version space is unanimous change nothing and are skipped, so the tree
/// is finite. `key` summarizes the learner state for memoization and must
/// determine its future behaviour.
pub fn exhaustive_game<L, K>(learner: &L, key: impl Fn(&L) -> K + Copy) -> Result<GameValue>
where
    L: VersionSpaceLearner + Clone,
    K: Eq + Hash,
{
    let n = learner.class().num_hypotheses();
    if learner.class().num_points() != 1 << n {
        return Err(Error::invalid("exhaustive search needs the universal class"));
    }
    let mut memo = HashMap::new();
    solve(learner, key, &mut memo)
}

fn solve<L, K>(learner: &L, key: impl Fn(&L) -> K + Copy, memo: &mut HashMap<K, GameValue>) -> Result<GameValue>
where
    L: VersionSpaceLearner + Clone,
    K: Eq + Hash,
{
    let k = key(learner);
    if let Some(v) = memo.get(&k) {
        return Ok(*v);
    }
    let members = learner.version_space().members().to_vec();
    let full: usize = members.iter().map(|h| 1usize << h).sum();
    let mut value = GameValue::default();
    // each nonempty proper subset of V as the positive side
    let v = members.len();
    for mask in 1..(1usize << v) - 1 {
        let x: usize = (0..v).filter(|i| mask >> i & 1 == 1).map(|i| 1usize << members[i]).sum();
        debug_assert!(x & !full == 0);
        for y in Label::BOTH {
            let mut next = learner.clone();
            let d = next.predict(&x)?;
            next.observe(&x, &y)?;
            let (a, m) = match d {
                Decision::Abstain => (1, 0),
                Decision::Predict(p) if p != y => (0, 1),
                Decision::Predict(_) => (0, 0),
            };
            let sub = solve(&next, key, memo)?;
            value.max_abstentions = value.max_abstentions.max(a + sub.max_abstentions);
            value.max_mistakes = value.max_mistakes.max(m + sub.max_mistakes);
        }
    }
    memo.insert(k, value);
    Ok(value)
}
