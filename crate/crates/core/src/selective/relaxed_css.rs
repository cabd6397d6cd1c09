use std::sync::Arc;

use super::erm::{argmin_mistakes, empirical_error};
use super::SelectiveClassifier;
use crate::error::{Error, Result};
use crate::rng::CoinStream;
use crate::types::{Decision, HypothesisSet, Label, LabeledSet};

/// `4 sqrt(2 (d ln(2 m e / d) + ln(8 / delta)) / m)`.
pub fn relaxed_css_threshold(m: usize, d: usize, delta: f64) -> Result<f64> {
    if m == 0 || d == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("need m >= 1, d >= 1 and delta in (0, 1)"));
    }
    let (m, d) = (m as f64, d as f64);
    let inner = d * (2.0 * m * std::f64::consts::E / d).ln() + (8.0 / delta).ln();
    Ok(4.0 * (2.0 * inner / m).sqrt())
}

/// Complexity stand-in for a finite class: `max(1, ceil(log2 |H|))`.
pub fn vc_surrogate(class_size: usize) -> usize {
    (class_size.max(1) as f64).log2().ceil().max(1.0) as usize
}

/// Agnostic selective classifier: predicts the ERM label at `x` unless some
/// hypothesis disagreeing there is within `threshold` of the best training
/// error.
#[derive(Clone, Debug)]
pub struct RelaxedCss<C> {
    class: Arc<C>,
    mistakes: Vec<usize>,
    best: usize,
    m: usize,
    threshold: f64,
}

pub fn relaxed_css_fit<P, C: HypothesisSet<P>>(
    class: Arc<C>,
    sample: &LabeledSet<P>,
    delta: f64,
    d: Option<usize>,
) -> Result<RelaxedCss<C>> {
    let n = class.num_hypotheses();
    if n == 0 {
        return Err(Error::invalid("empty hypothesis class"));
    }
    let d = d.unwrap_or_else(|| vc_surrogate(n));
    let threshold = relaxed_css_threshold(sample.len(), d, delta)?;
    let mistakes: Vec<usize> = (0..n).map(|h| class.mistakes_on(h, sample)).collect();
    let (best, _) = argmin_mistakes(&mistakes, |_| true).ok_or(Error::NoQualifyingHypothesis)?;
    Ok(RelaxedCss {
        class,
        mistakes,
        best,
        m: sample.len(),
        threshold,
    })
}

impl<C> RelaxedCss<C> {
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn best_id(&self) -> usize {
        self.best
    }

    pub fn empirical_error(&self, h: usize) -> f64 {
        empirical_error(self.mistakes[h], self.m)
    }
}

impl<P: ?Sized, C: HypothesisSet<P>> SelectiveClassifier<P> for RelaxedCss<C> {
    fn decide(&self, x: &P, _coins: &mut CoinStream) -> Decision<Label> {
        let label = self.class.predict(self.best, x);
        match argmin_mistakes(&self.mistakes, |h| self.class.predict(h, x) != label) {
            None => Decision::Predict(label),
            Some((h, _)) => {
                let excess = self.empirical_error(h) - self.empirical_error(self.best);
                if excess > self.threshold {
                    Decision::Predict(label)
                } else {
                    Decision::Abstain
                }
            }
        }
    }

    fn name(&self) -> String {
        "relaxed_css".into()
    }

    fn params(&self) -> String {
        format!("threshold={}", self.threshold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::FiniteHypothesisClass;
    use Label::*;

    #[test]
    fn threshold_formula() {
        // d=1, m=100, delta=0.1: 4 sqrt(2 (ln(200 e) + ln 80) / 100)
        let want = 4.0 * (2.0 * ((200.0 * std::f64::consts::E).ln() + 80f64.ln()) / 100.0).sqrt();
        assert!((relaxed_css_threshold(100, 1, 0.1).unwrap() - want).abs() < 1e-12);
        assert_eq!(vc_surrogate(1), 1);
        assert_eq!(vc_surrogate(8), 3);
        assert_eq!(vc_surrogate(9), 4);
    }

    #[test]
    fn saturated_threshold_abstains_on_any_disagreement() {
        let c = Arc::new(FiniteHypothesisClass::new(vec![vec![Pos, Pos], vec![Pos, Neg]]).unwrap());
        let s: LabeledSet<usize> = vec![(1, Pos)].into_iter().collect();
        let r = relaxed_css_fit(c, &s, 0.1, None).unwrap();
        assert!(r.threshold() >= 1.0);
        let mut coins = CoinStream::new(0);
        assert_eq!(r.decide(&0, &mut coins), Decision::Predict(Pos));
        assert!(r.decide(&1, &mut coins).is_abstain());
        let r = r.with_threshold(0.5);
        assert_eq!(r.decide(&1, &mut coins), Decision::Predict(Pos));
    }
}
