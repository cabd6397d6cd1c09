use serde::{Deserialize, Serialize};

/// Absolute slack added to the failure level of high-probability bounds.
pub const STATISTICAL_SLACK: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Must hold on every trial.
    Hard,
    /// May fail on at most a `delta + slack` fraction of trials.
    Statistical,
    /// Constants unknown; reported for comparison only.
    Shape,
}

/// One bound check within a single trial.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct BoundCheck {
    pub name: String,
    pub kind: BoundKind,
    pub bound: f64,
    pub observed: f64,
    /// Allowed failure probability of a statistical bound.
    pub delta: f64,
}

impl BoundCheck {
    pub fn hard(name: impl Into<String>, bound: f64, observed: f64) -> Self {
        BoundCheck {
            name: name.into(),
            kind: BoundKind::Hard,
            bound,
            observed,
            delta: 0.0,
        }
    }

    pub fn statistical(name: impl Into<String>, bound: f64, observed: f64, delta: f64) -> Self {
        BoundCheck {
            name: name.into(),
            kind: BoundKind::Statistical,
            bound,
            observed,
            delta,
        }
    }

    pub fn shape(name: impl Into<String>, bound: f64, observed: f64) -> Self {
        BoundCheck {
            name: name.into(),
            kind: BoundKind::Shape,
            bound,
            observed,
            delta: 0.0,
        }
    }

    fn holds(&self) -> bool {
        self.observed <= self.bound + 1e-12 * self.bound.abs().max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub kind: BoundKind,
    /// Hard and shape bounds: the bound itself. Statistical bounds: the
    /// allowed failure frequency `delta`.
    pub bound_value: f64,
    /// Hard and shape bounds: worst observed value. Statistical bounds:
    /// fraction of trials on which the per-trial bound failed.
    pub observed_worst: f64,
    pub satisfied: bool,
    pub trials: usize,
    pub slack: Option<f64>,
    /// Whether a failure counts as a violation.
    pub enforced: bool,
}

impl BoundReport {
    pub fn violated(&self) -> bool {
        self.enforced && !self.satisfied
    }
}

/// Folds per-trial checks into one report per bound name, in order of
/// first appearance.
pub(crate) fn aggregate(per_trial: &[Vec<BoundCheck>]) -> Vec<BoundReport> {
    let mut names: Vec<&str> = Vec::new();
    for c in per_trial.iter().flatten() {
        if !names.contains(&c.name.as_str()) {
            names.push(&c.name);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let checks: Vec<&BoundCheck> = per_trial.iter().flatten().filter(|c| c.name == name).collect();
            let kind = checks[0].kind;
            let trials = checks.len();
            match kind {
                BoundKind::Statistical => {
                    let failures = checks.iter().filter(|c| !c.holds()).count();
                    let freq = failures as f64 / trials as f64;
                    let delta = checks[0].delta;
                    BoundReport {
                        name: name.to_string(),
                        kind,
                        bound_value: delta,
                        observed_worst: freq,
                        satisfied: freq <= delta + STATISTICAL_SLACK,
                        trials,
                        slack: Some(STATISTICAL_SLACK),
                        enforced: true,
                    }
                }
                BoundKind::Hard | BoundKind::Shape => {
                    let worst = checks
                        .iter()
                        .copied()
                        .max_by(|a, b| (a.observed - a.bound).total_cmp(&(b.observed - b.bound)))
                        .expect("at least one check");
                    BoundReport {
                        name: name.to_string(),
                        kind,
                        bound_value: worst.bound,
                        observed_worst: worst.observed,
                        satisfied: checks.iter().all(|c| c.holds()),
                        trials,
                        slack: None,
                        enforced: kind == BoundKind::Hard,
                    }
                }
            }
        })
        .collect()
}
