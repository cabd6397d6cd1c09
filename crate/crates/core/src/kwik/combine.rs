use super::KwikLearner;
use crate::error::{Error, Result};
use crate::types::{Decision, PredictionValue};

type Boxed<P, Y, O> = Box<dyn KwikLearner<Point = P, Prediction = Y, Observation = O>>;

/// KWIK learner for a union of classes, one sub-learner per class.
///
/// Predicts when all live sub-learners predict and agree (within `eps` for
/// real values). A sub-learner is dropped once one of its committed
/// predictions is contradicted by a revealed label, or once it reports a
/// realizability error.
pub struct UnionLearner<P, Y> {
    subs: Vec<Boxed<P, Y, Y>>,
    alive: Vec<bool>,
    last: Vec<Option<Decision<Y>>>,
    eps: f64,
}

impl<P, Y: PredictionValue> UnionLearner<P, Y> {
    pub fn new(subs: Vec<Boxed<P, Y, Y>>, eps: f64) -> Result<Self> {
        if subs.is_empty() {
            return Err(Error::invalid("union needs at least one sub-learner"));
        }
        let n = subs.len();
        Ok(UnionLearner {
            subs,
            alive: vec![true; n],
            last: vec![None; n],
            eps,
        })
    }

    pub fn live_count(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    pub fn is_live(&self, i: usize) -> bool {
        self.alive[i]
    }

    fn ensure_live(&self) -> Result<()> {
        if self.live_count() == 0 {
            return Err(Error::RealizabilityViolation(
                "every sub-learner of the union was eliminated".into(),
            ));
        }
        Ok(())
    }
}

impl<P, Y: PredictionValue> KwikLearner for UnionLearner<P, Y> {
    type Point = P;
    type Prediction = Y;
    type Observation = Y;

    fn predict(&mut self, x: &P) -> Result<Decision<Y>> {
        self.ensure_live()?;
        for i in 0..self.subs.len() {
            if !self.alive[i] {
                self.last[i] = None;
                continue;
            }
            match self.subs[i].predict(x) {
                Ok(d) => self.last[i] = Some(d),
                Err(_) => {
                    self.alive[i] = false;
                    self.last[i] = None;
                }
            }
        }
        self.ensure_live()?;
        let mut agreed: Option<&Y> = None;
        for d in self.last.iter().flatten() {
            match d {
                Decision::Abstain => return Ok(Decision::Abstain),
                Decision::Predict(p) => match agreed {
                    None => agreed = Some(p),
                    Some(a) if a.agrees_with(p, self.eps) => {}
                    Some(_) => return Ok(Decision::Abstain),
                },
            }
        }
        Ok(agreed.cloned().map_or(Decision::Abstain, Decision::Predict))
    }

    fn observe(&mut self, x: &P, y: &Y) -> Result<()> {
        for i in 0..self.subs.len() {
            if !self.alive[i] {
                continue;
            }
            match self.last[i].take() {
                Some(Decision::Predict(p)) => {
                    if !p.agrees_with(y, self.eps) {
                        self.alive[i] = false;
                    }
                }
                Some(Decision::Abstain) | None => {
                    if self.subs[i].observe(x, y).is_err() {
                        self.alive[i] = false;
                    }
                }
            }
        }
        self.ensure_live()
    }

    fn needs_every_label(&self) -> bool {
        self.subs.iter().any(|s| s.needs_every_label())
    }
}

/// KWIK learner over a Cartesian product of domains and ranges: one factor
/// per coordinate, predicting only when every factor predicts.
pub struct ProductLearner<P, Y, O> {
    factors: Vec<Boxed<P, Y, O>>,
    abstained: Option<Vec<bool>>,
}

impl<P, Y, O> ProductLearner<P, Y, O> {
    pub fn new(factors: Vec<Boxed<P, Y, O>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("product needs at least one factor"));
        }
        Ok(ProductLearner {
            factors,
            abstained: None,
        })
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        if got != self.factors.len() {
            return Err(Error::ArityMismatch {
                expected: self.factors.len(),
                got,
            });
        }
        Ok(())
    }
}

impl<P, Y: PredictionValue, O> KwikLearner for ProductLearner<P, Y, O> {
    type Point = Vec<P>;
    type Prediction = Vec<Y>;
    type Observation = Vec<O>;

    fn predict(&mut self, x: &Vec<P>) -> Result<Decision<Vec<Y>>> {
        self.check_arity(x.len())?;
        let mut out = Vec::with_capacity(x.len());
        let mut abstained = Vec::with_capacity(x.len());
        for (f, xi) in self.factors.iter_mut().zip(x) {
            match f.predict(xi)? {
                Decision::Predict(y) => {
                    out.push(y);
                    abstained.push(false);
                }
                Decision::Abstain => abstained.push(true),
            }
        }
        let all = out.len() == x.len();
        self.abstained = Some(abstained);
        Ok(if all { Decision::Predict(out) } else { Decision::Abstain })
    }

    fn observe(&mut self, x: &Vec<P>, y: &Vec<O>) -> Result<()> {
        self.check_arity(x.len())?;
        self.check_arity(y.len())?;
        let mask = self.abstained.take();
        for (i, f) in self.factors.iter_mut().enumerate() {
            let forward = mask.as_ref().is_none_or(|m| m[i]) || f.needs_every_label();
            if forward {
                f.observe(&x[i], &y[i])?;
            }
        }
        Ok(())
    }

    fn needs_every_label(&self) -> bool {
        self.factors.iter().any(|f| f.needs_every_label())
    }
}
