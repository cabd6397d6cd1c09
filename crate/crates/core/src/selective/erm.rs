use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{HypothesisSet, Label, LabeledSet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErmResult {
    pub best_id: usize,
    pub best_mistakes: usize,
    pub best_empirical_error: f64,
}

/// Index of the minimum of `mistakes` over hypotheses passing `allowed`,
/// lowest id first on ties.
pub(crate) fn argmin_mistakes(
    mistakes: &[usize],
    mut allowed: impl FnMut(usize) -> bool,
) -> Option<(usize, usize)> {
    mistakes
        .iter()
        .enumerate()
        .filter(|(h, _)| allowed(*h))
        .min_by_key(|(h, c)| (**c, *h))
        .map(|(h, c)| (h, *c))
}

pub(crate) fn empirical_error(mistakes: usize, m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        mistakes as f64 / m as f64
    }
}

/// Exhaustive empirical risk minimization.
///
/// With `constraint = Some((x, label))` only hypotheses with `h(x) != label`
/// are searched.
pub fn erm_finite<P, C: HypothesisSet<P>>(
    class: &C,
    sample: &LabeledSet<P>,
    constraint: Option<(&P, Label)>,
) -> Result<ErmResult> {
    let mistakes: Vec<usize> = (0..class.num_hypotheses())
        .map(|h| class.mistakes_on(h, sample))
        .collect();
    let found = match constraint {
        None => argmin_mistakes(&mistakes, |_| true),
        Some((x, forbidden)) => argmin_mistakes(&mistakes, |h| class.predict(h, x) != forbidden),
    };
    let (best_id, best_mistakes) = found.ok_or(Error::NoQualifyingHypothesis)?;
    Ok(ErmResult {
        best_id,
        best_mistakes,
        best_empirical_error: empirical_error(best_mistakes, sample.len()),
    })
}
