use std::sync::Arc;

use super::SelectiveClassifier;
use crate::error::{Error, Result};
use crate::rng::CoinStream;
use crate::types::{Decision, ExplicitVersionSpace, HypothesisSet, Label, LabeledSet};

/// Consistent selective strategy: predict exactly where every hypothesis
/// consistent with the sample agrees.
#[derive(Clone, Debug)]
pub struct Css<C> {
    class: Arc<C>,
    vs: ExplicitVersionSpace,
}

pub fn css_fit<P, C: HypothesisSet<P>>(class: Arc<C>, sample: &LabeledSet<P>) -> Result<Css<C>> {
    let vs = ExplicitVersionSpace::consistent(&*class, sample);
    if vs.is_empty() {
        return Err(Error::RealizabilityViolation(
            "no hypothesis is consistent with the training sample".into(),
        ));
    }
    Ok(Css { class, vs })
}

impl<C> Css<C> {
    pub fn version_space(&self) -> &ExplicitVersionSpace {
        &self.vs
    }

    pub fn class(&self) -> &Arc<C> {
        &self.class
    }

    pub fn unanimous<P: ?Sized>(&self, x: &P) -> Option<Label>
    where
        C: HypothesisSet<P>,
    {
        self.vs.unanimous(&*self.class, x)
    }

    /// Points of `0..num_points` on which CSS predicts.
    pub fn prediction_set(&self, num_points: usize) -> Vec<usize>
    where
        C: HypothesisSet<usize>,
    {
        (0..num_points).filter(|x| self.unanimous(x).is_some()).collect()
    }
}

impl<P: ?Sized, C: HypothesisSet<P>> SelectiveClassifier<P> for Css<C> {
    fn decide(&self, x: &P, _coins: &mut CoinStream) -> Decision<Label> {
        self.unanimous(x).map_or(Decision::Abstain, Decision::Predict)
    }

    fn name(&self) -> String {
        "css".into()
    }

    fn params(&self) -> String {
        format!("version_space={}", self.vs.len())
    }
}

/// High-probability bound on the abstain probability of CSS:
/// `(ln 2 * min(|H|, |X|) + ln(1/delta)) / m`.
pub fn css_abstain_bound(m: usize, class_size: usize, domain_size: usize, delta: f64) -> Result<f64> {
    if m == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("need m >= 1 and delta in (0, 1)"));
    }
    let n = class_size.min(domain_size) as f64;
    Ok((std::f64::consts::LN_2 * n + (1.0 / delta).ln()) / m as f64)
}

/// True iff every point of `0..num_points` where `rival` predicts is also a
/// point where CSS fit on `sample` predicts.
pub fn css_maximality_check<C, R>(class: Arc<C>, sample: &LabeledSet<usize>, num_points: usize, rival: R) -> Result<bool>
where
    C: HypothesisSet<usize>,
    R: Fn(usize) -> Decision<Label>,
{
    let css = css_fit(class, sample)?;
    Ok((0..num_points).all(|x| rival(x).is_abstain() || css.unanimous(&x).is_some()))
}
