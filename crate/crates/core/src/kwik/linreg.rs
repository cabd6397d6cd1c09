use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::KwikLearner;
use crate::error::{Error, Result};
use crate::types::{dot, norm, Decision};

/// Relative residual below which a point counts as inside the span:
/// `||r|| <= SPAN_TOLERANCE * (1 + ||x||)`.
pub const SPAN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinRegState {
    pub dim: usize,
    /// Stored `(x, f(x))` pairs, linearly independent.
    pub basis: Vec<(Vec<f64>, f64)>,
}

/// KWIK learner for noiseless linear functions `f(x) = theta . x`.
///
/// Keeps an orthonormal basis of the stored points together with the
/// function value on each basis vector, so a point in the span is predicted
/// exactly without ever forming `theta`.
#[derive(Clone, Debug)]
pub struct NoiselessLinReg {
    state: LinRegState,
    ortho: Vec<(Vec<f64>, f64)>,
}

struct Projection {
    residual: Vec<f64>,
    residual_norm: f64,
    value: f64,
}

impl NoiselessLinReg {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(NoiselessLinReg {
            state: LinRegState {
                dim,
                basis: Vec::new(),
            },
            ortho: Vec::new(),
        })
    }

    pub fn state(&self) -> &LinRegState {
        &self.state
    }

    fn project(&self, x: &[f64]) -> Result<Projection> {
        if x.len() != self.state.dim {
            return Err(Error::ArityMismatch {
                expected: self.state.dim,
                got: x.len(),
            });
        }
        let mut residual = x.to_vec();
        let mut coeffs = vec![0.0; self.ortho.len()];
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for (c, (q, _)) in coeffs.iter_mut().zip(&self.ortho) {
                let a = dot(q, &residual);
                *c += a;
                residual.iter_mut().zip(q).for_each(|(r, qi)| *r -= a * qi);
            }
        }
        let value = coeffs.iter().zip(&self.ortho).map(|(c, (_, v))| c * v).sum();
        Ok(Projection {
            residual_norm: norm(&residual),
            residual,
            value,
        })
    }

    pub fn in_span(&self, x: &[f64]) -> Result<bool> {
        let p = self.project(x)?;
        Ok(p.residual_norm <= SPAN_TOLERANCE * (1.0 + norm(x)))
    }
}

impl KwikLearner for NoiselessLinReg {
    type Point = Vec<f64>;
    type Prediction = f64;
    type Observation = f64;

    fn predict(&mut self, x: &Vec<f64>) -> Result<Decision<f64>> {
        let p = self.project(x)?;
        if p.residual_norm <= SPAN_TOLERANCE * (1.0 + norm(x)) {
            Ok(Decision::Predict(p.value))
        } else {
            Ok(Decision::Abstain)
        }
    }

    fn observe(&mut self, x: &Vec<f64>, y: &f64) -> Result<()> {
        let p = self.project(x)?;
        let scale = 1.0 + norm(x);
        if p.residual_norm <= SPAN_TOLERANCE * scale {
            let gap = (p.value - y).abs();
            if gap > 1e-6 * (1.0 + y.abs()) {
                return Err(Error::NoiseModelViolation(format!(
                    "point in span predicted {} but labeled {y}",
                    p.value
                )));
            }
            return Ok(());
        }
        let q: Vec<f64> = p.residual.iter().map(|r| r / p.residual_norm).collect();
        let qv = (y - p.value) / p.residual_norm;
        self.ortho.push((q, qv));
        self.state.basis.push((x.clone(), *y));
        Ok(())
    }

    fn terminated(&self) -> bool {
        self.state.basis.len() == self.state.dim
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyLinRegConfig {
    /// Predict only when `sqrt(x' S^-1 x)` is below this.
    pub leverage_threshold: f64,
    /// Abstain whenever the smallest eigenvalue of `S` is at or below this.
    pub eigen_floor: f64,
}

impl Default for NoisyLinRegConfig {
    fn default() -> Self {
        NoisyLinRegConfig {
            leverage_threshold: 0.5,
            eigen_floor: 1e-6,
        }
    }
}

/// Least-squares learner for `y = theta . x + noise`. Confidence is judged
/// on the spectrum of the data matrix `S = sum x x'`: abstain while `S` is
/// near-singular or the query has high leverage.
#[derive(Clone, Debug)]
pub struct NoisyLinReg {
    cfg: NoisyLinRegConfig,
    gram: DMatrix<f64>,
    moment: DVector<f64>,
    observed: usize,
}

impl NoisyLinReg {
    pub fn new(dim: usize, cfg: NoisyLinRegConfig) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(cfg.leverage_threshold > 0.0) || !(cfg.eigen_floor >= 0.0) {
            return Err(Error::invalid("leverage threshold must be positive, floor nonnegative"));
        }
        Ok(NoisyLinReg {
            cfg,
            gram: DMatrix::zeros(dim, dim),
            moment: DVector::zeros(dim),
            observed: 0,
        })
    }

    pub fn observed(&self) -> usize {
        self.observed
    }

    /// `(leverage, estimate)` at `x`, or `None` when the data matrix is
    /// too poorly conditioned to invert.
    pub fn confidence(&self, x: &[f64]) -> Result<Option<(f64, f64)>> {
        let dim = self.gram.nrows();
        if x.len() != dim {
            return Err(Error::ArityMismatch { expected: dim, got: x.len() });
        }
        let eig = self.gram.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_eig > self.cfg.eigen_floor) {
            return Ok(None);
        }
        let xv = DVector::from_column_slice(x);
        // S^-1 = Q diag(1/l) Q'
        let proj = eig.eigenvectors.transpose() * &xv;
        let leverage_sq: f64 = proj
            .iter()
            .zip(eig.eigenvalues.iter())
            .map(|(p, l)| p * p / l)
            .sum();
        let mproj = eig.eigenvectors.transpose() * &self.moment;
        let scaled = DVector::from_iterator(
            dim,
            mproj.iter().zip(eig.eigenvalues.iter()).map(|(m, l)| m / l),
        );
        let theta = &eig.eigenvectors * scaled;
        Ok(Some((leverage_sq.sqrt(), theta.dot(&xv))))
    }
}

impl KwikLearner for NoisyLinReg {
    type Point = Vec<f64>;
    type Prediction = f64;
    type Observation = f64;

    fn predict(&mut self, x: &Vec<f64>) -> Result<Decision<f64>> {
        Ok(match self.confidence(x)? {
            Some((lev, est)) if lev < self.cfg.leverage_threshold => Decision::Predict(est),
            _ => Decision::Abstain,
        })
    }

    fn observe(&mut self, x: &Vec<f64>, y: &f64) -> Result<()> {
        let dim = self.gram.nrows();
        if x.len() != dim {
            return Err(Error::ArityMismatch { expected: dim, got: x.len() });
        }
        let xv = DVector::from_column_slice(x);
        self.gram += &xv * xv.transpose();
        self.moment += xv * *y;
        self.observed += 1;
        Ok(())
    }
}
