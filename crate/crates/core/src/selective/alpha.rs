use std::sync::Arc;

use super::{css_fit, Css, SelectiveClassifier};
use crate::error::{Error, Result};
use crate::rng::CoinStream;
use crate::types::{Decision, HypothesisSet, Label, LabeledSet};

/// CSS that, where the version space disagrees, predicts with probability
/// `alpha` instead of always abstaining.
///
/// A coin is drawn on every query, so runs that share a seed but differ in
/// `alpha` see the same coins and coverage is monotone in `alpha` pathwise.
#[derive(Clone, Debug)]
pub struct AlphaInterpolated<C> {
    css: Css<C>,
    alpha: f64,
    seed: u64,
}

pub fn alpha_interpolated_fit<P, C: HypothesisSet<P>>(
    class: Arc<C>,
    sample: &LabeledSet<P>,
    alpha: f64,
    seed: u64,
) -> Result<AlphaInterpolated<C>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(AlphaInterpolated {
        css: css_fit(class, sample)?,
        alpha,
        seed,
    })
}

impl<C> AlphaInterpolated<C> {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn css(&self) -> &Css<C> {
        &self.css
    }
}

impl<P: ?Sized, C: HypothesisSet<P>> SelectiveClassifier<P> for AlphaInterpolated<C> {
    fn decide(&self, x: &P, coins: &mut CoinStream) -> Decision<Label> {
        let u = coins.next_uniform();
        if let Some(y) = self.css.unanimous(x) {
            return Decision::Predict(y);
        }
        if u < self.alpha {
            // any member will do; take the lowest id
            let h = self.css.version_space().members()[0];
            Decision::Predict(self.css.class().predict(h, x))
        } else {
            Decision::Abstain
        }
    }

    fn name(&self) -> String {
        "alpha".into()
    }

    fn params(&self) -> String {
        format!("alpha={}", self.alpha)
    }

    fn coin_seed(&self) -> u64 {
        self.seed
    }
}
