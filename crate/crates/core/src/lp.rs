//! Strict feasibility of homogeneous linear systems via a max-margin LP.
//!
//! `{v : c_i . v > 0}` is nonempty iff the LP
//! `max t  s.t.  c_i . v >= t,  -1 <= v_j <= 1,  t <= 1` has a positive
//! optimum. The box keeps the problem bounded.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Solution, Variable};

use crate::error::{Error, Result};

/// Margins at or below this are treated as infeasible.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// A solved max-margin problem that can be re-solved with extra cuts.
#[derive(Clone)]
pub struct MarginProgram {
    vars: Vec<Variable>,
    margin: Variable,
    solution: Solution,
}

impl std::fmt::Debug for MarginProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MarginProgram")
            .field("dim", &self.vars.len())
            .field("margin", &self.margin())
            .finish()
    }
}

impl MarginProgram {
    pub fn solve(dim: usize, directions: &[Vec<f64>]) -> Result<Self> {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<Variable> = (0..dim).map(|_| problem.add_var(0.0, (-1.0, 1.0))).collect();
        let margin = problem.add_var(1.0, (f64::NEG_INFINITY, 1.0));
        for c in directions {
            if c.len() != dim {
                return Err(Error::ArityMismatch {
                    expected: dim,
                    got: c.len(),
                });
            }
            let mut terms: Vec<(Variable, f64)> = vars.iter().copied().zip(c.iter().copied()).collect();
            terms.push((margin, -1.0));
            problem.add_constraint(terms.as_slice(), ComparisonOp::Ge, 0.0);
        }
        let solution = problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
        Ok(MarginProgram {
            vars,
            margin,
            solution,
        })
    }

    pub fn margin(&self) -> f64 {
        *self.solution.var_value(self.margin)
    }

    pub fn feasible(&self) -> bool {
        self.margin() > MARGIN_TOLERANCE
    }

    pub fn point(&self) -> Vec<f64> {
        self.vars.iter().map(|v| *self.solution.var_value(*v)).collect()
    }

    /// Optimal margin after adding `c . v >= t`.
    pub fn margin_with(&self, c: &[f64]) -> Result<f64> {
        if c.len() != self.vars.len() {
            return Err(Error::ArityMismatch {
                expected: self.vars.len(),
                got: c.len(),
            });
        }
        let mut terms: Vec<(Variable, f64)> = self.vars.iter().copied().zip(c.iter().copied()).collect();
        terms.push((self.margin, -1.0));
        let sol = self
            .solution
            .clone()
            .add_constraint(terms.as_slice(), ComparisonOp::Ge, 0.0)
            .map_err(|e| Error::Lp(e.to_string()))?;
        Ok(*sol.var_value(self.margin))
    }
}

/// True iff some `v` satisfies every `c_i . v > 0`.
pub fn strictly_feasible(dim: usize, directions: &[Vec<f64>]) -> Result<bool> {
    Ok(MarginProgram::solve(dim, directions)?.feasible())
}
