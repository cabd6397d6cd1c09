use serde::{Deserialize, Serialize};

use super::SelectiveClassifier;
use crate::error::{Error, Result};
use crate::lp::{MarginProgram, MARGIN_TOLERANCE};
use crate::rng::CoinStream;
use crate::types::{Decision, HypothesisSet, Label, LabeledSet};

fn lift(x: &[f64], y: Label) -> Vec<f64> {
    let s = y.as_f64();
    x.iter().map(|v| s * v).chain(std::iter::once(s)).collect()
}

/// Finite grid of affine separators in the plane,
/// `h(x) = sign(cos(phi) x0 + sin(phi) x1 - b)` with `sign(0) = +1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineGridClass {
    normals: Vec<[f64; 2]>,
    offsets: Vec<f64>,
}

impl AffineGridClass {
    /// `angles` equally spaced directions crossed with every offset.
    pub fn new(angles: usize, offsets: Vec<f64>) -> Result<Self> {
        if angles == 0 || offsets.is_empty() {
            return Err(Error::invalid("grid needs at least one angle and one offset"));
        }
        let normals = (0..angles)
            .map(|i| {
                let phi = std::f64::consts::TAU * i as f64 / angles as f64;
                [phi.cos(), phi.sin()]
            })
            .collect();
        Ok(AffineGridClass { normals, offsets })
    }

    /// `(normal, offset)` of hypothesis `h`.
    pub fn separator(&self, h: usize) -> ([f64; 2], f64) {
        let k = self.offsets.len();
        (self.normals[h / k], self.offsets[h % k])
    }
}

impl HypothesisSet<Vec<f64>> for AffineGridClass {
    fn num_hypotheses(&self) -> usize {
        self.normals.len() * self.offsets.len()
    }

    fn predict(&self, h: usize, x: &Vec<f64>) -> Label {
        let (n, b) = self.separator(h);
        if n[0] * x[0] + n[1] * x[1] - b >= 0.0 {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

/// CSS over all affine separators of `R^d`, deciding unanimity by linear
/// programming: a label is forced at `x` iff no consistent separator can
/// put `x` strictly on the other side.
#[derive(Clone, Debug)]
pub struct AffineConsistentSelective {
    dim: usize,
    program: MarginProgram,
}

impl AffineConsistentSelective {
    pub fn fit(sample: &LabeledSet<Vec<f64>>) -> Result<Self> {
        let dim = sample
            .iter()
            .next()
            .map(|(x, _)| x.len())
            .ok_or_else(|| Error::invalid("empty training sample"))?;
        let mut rows = Vec::with_capacity(sample.len());
        for (x, y) in sample.iter() {
            if x.len() != dim {
                return Err(Error::ArityMismatch { expected: dim, got: x.len() });
            }
            rows.push(lift(x, *y));
        }
        let program = MarginProgram::solve(dim + 1, &rows)?;
        if !program.feasible() {
            return Err(Error::RealizabilityViolation(
                "training sample is not strictly linearly separable".into(),
            ));
        }
        Ok(AffineConsistentSelective { dim, program })
    }

    /// Can some consistent separator label `x` as `y`?
    pub fn can_label(&self, x: &[f64], y: Label) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::ArityMismatch { expected: self.dim, got: x.len() });
        }
        Ok(self.program.margin_with(&lift(x, y))? > MARGIN_TOLERANCE)
    }

    pub fn try_decide(&self, x: &[f64]) -> Result<Decision<Label>> {
        let pos = self.can_label(x, Label::Pos)?;
        let neg = self.can_label(x, Label::Neg)?;
        Ok(match (pos, neg) {
            (true, false) => Decision::Predict(Label::Pos),
            (false, true) => Decision::Predict(Label::Neg),
            _ => Decision::Abstain,
        })
    }
}

impl SelectiveClassifier<Vec<f64>> for AffineConsistentSelective {
    fn decide(&self, x: &Vec<f64>, _coins: &mut CoinStream) -> Decision<Label> {
        // an LP failure leaves the label undetermined
        self.try_decide(x).unwrap_or(Decision::Abstain)
    }

    fn name(&self) -> String {
        "css_affine".into()
    }
}
