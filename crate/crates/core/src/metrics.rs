//! Empirical risk and coverage of a fitted selective classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::CoinStream;
use crate::selective::SelectiveClassifier;
use crate::types::{Decision, LabeledSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskCoveragePoint {
    pub coverage: f64,
    /// `None` when nothing was predicted.
    pub risk_on_predicted: Option<f64>,
    pub predicted: usize,
    pub wrong: usize,
    pub total: usize,
    pub params: String,
}

/// Coverage and conditional risk of `classifier` on `test`.
///
/// Test labels are only used for scoring.
pub fn evaluate_selective<P, S>(classifier: &S, test: &LabeledSet<P>) -> Result<RiskCoveragePoint>
where
    S: SelectiveClassifier<P> + ?Sized,
{
    if test.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let mut coins = CoinStream::new(classifier.coin_seed());
    let (mut predicted, mut wrong) = (0, 0);
    for (x, y) in test.iter() {
        if let Decision::Predict(p) = classifier.decide(x, &mut coins) {
            predicted += 1;
            if p != *y {
                wrong += 1;
            }
        }
    }
    let total = test.len();
    Ok(RiskCoveragePoint {
        coverage: predicted as f64 / total as f64,
        risk_on_predicted: (predicted > 0).then(|| wrong as f64 / predicted as f64),
        predicted,
        wrong,
        total,
        params: classifier.params(),
    })
}
