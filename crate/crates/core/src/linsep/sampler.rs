use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::MarginProgram;
use crate::rng::{seeded, SeededRng};
use crate::types::{dot, norm, HalfspaceSystem, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub num_samples: usize,
    pub burn_in: usize,
    pub walk_steps: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            num_samples: 400,
            burn_in: 500,
            walk_steps: 50,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 || self.burn_in == 0 || self.walk_steps == 0 {
            return Err(Error::invalid("sampler counts must all be positive"));
        }
        Ok(())
    }
}

/// Version space of homogeneous separators `{w : ||w|| <= 1, c_i . w > 0}`
/// together with a running estimate of its volume relative to the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatorVersionSpace {
    system: HalfspaceSystem,
    volume_ratio: f64,
}

impl SeparatorVersionSpace {
    pub fn new(dim: usize) -> Result<Self> {
        Ok(SeparatorVersionSpace {
            system: HalfspaceSystem::new(dim)?,
            volume_ratio: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn constraints(&self) -> &[Vec<f64>] {
        self.system.directions()
    }

    pub fn system(&self) -> &HalfspaceSystem {
        &self.system
    }

    pub fn volume_ratio(&self) -> f64 {
        self.volume_ratio
    }

    pub fn contains(&self, w: &[f64]) -> bool {
        norm(w) <= 1.0 && self.system.satisfied_by(w)
    }

    /// Adds `y (w . x) > 0`. The volume ratio is scaled by the fraction of
    /// `samples` (drawn before the update) that survive; zero survivors
    /// count as half a sample.
    pub fn add_constraint(&mut self, x: &[f64], y: Label, samples: &[Vec<f64>]) -> Result<f64> {
        self.system.push_labeled(x, y)?;
        if samples.is_empty() {
            return Ok(self.volume_ratio);
        }
        let s = y.as_f64();
        let alive = samples.iter().filter(|w| s * dot(w, x) > 0.0).count();
        let frac = if alive == 0 {
            0.5 / samples.len() as f64
        } else {
            alive as f64 / samples.len() as f64
        };
        self.volume_ratio *= frac;
        Ok(self.volume_ratio)
    }
}

/// A point strictly inside the version space with norm 1/2.
pub fn interior_point(system: &HalfspaceSystem) -> Result<Vec<f64>> {
    let dim = system.dim();
    let dirs = system.directions();
    let to_half = |w: Vec<f64>| -> Vec<f64> {
        let n = norm(&w);
        w.into_iter().map(|v| 0.5 * v / n).collect()
    };
    if dirs.is_empty() {
        let mut w = vec![0.0; dim];
        w[0] = 0.5;
        return Ok(w);
    }
    let unit: Vec<Vec<f64>> = dirs
        .iter()
        .map(|c| {
            let n = norm(c);
            c.iter().map(|v| v / n).collect()
        })
        .collect();
    let mut w = vec![0.0; dim];
    for u in &unit {
        w.iter_mut().zip(u).for_each(|(a, b)| *a += b);
    }
    // perceptron refinement
    for _ in 0..(20 * unit.len() + 200) {
        if norm(&w) > 0.0 && system.satisfied_by(&w) {
            return Ok(to_half(w));
        }
        let Some(u) = unit.iter().find(|u| dot(u, &w) <= 0.0) else {
            break;
        };
        w.iter_mut().zip(u).for_each(|(a, b)| *a += b);
    }
    if norm(&w) > 0.0 && system.satisfied_by(&w) {
        return Ok(to_half(w));
    }
    let lp = MarginProgram::solve(dim, dirs)?;
    let w = lp.point();
    if lp.feasible() && norm(&w) > 0.0 && system.satisfied_by(&w) {
        return Ok(to_half(w));
    }
    Err(Error::Infeasible("no strictly separating direction exists".into()))
}

fn random_direction(rng: &mut SeededRng, dim: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&u);
        if n > 1e-12 {
            return u.into_iter().map(|v| v / n).collect();
        }
    }
}

/// One Hit-and-Run move: pick a random chord through `w` and jump to a
/// uniform point on it. Stays put if the chord is numerically degenerate.
fn step(w: &mut [f64], dirs: &[Vec<f64>], rng: &mut SeededRng) {
    let u = random_direction(rng, w.len());
    // |w + t u|^2 <= 1 with |u| = 1
    let b = dot(w, &u);
    let c = dot(w, w) - 1.0;
    let disc = (b * b - c).max(0.0).sqrt();
    let (mut lo, mut hi) = (-b - disc, -b + disc);
    for d in dirs {
        let cw = dot(d, w);
        let cu = dot(d, &u);
        if cu > 0.0 {
            lo = lo.max(-cw / cu);
        } else if cu < 0.0 {
            hi = hi.min(-cw / cu);
        }
    }
    if !(hi > lo) {
        return;
    }
    for _ in 0..8 {
        let t = rng.random_range(lo..hi);
        let cand: Vec<f64> = w.iter().zip(&u).map(|(a, b)| a + t * b).collect();
        // boundary hits are rejected so membership stays strict
        if norm(&cand) <= 1.0 && dirs.iter().all(|d| dot(d, &cand) > 0.0) {
            w.copy_from_slice(&cand);
            return;
        }
    }
}

/// Approximately uniform samples from the version space.
pub fn hit_and_run_sample(vs: &SeparatorVersionSpace, cfg: &SamplerConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let dirs = vs.constraints();
    let mut w = interior_point(vs.system())?;
    for _ in 0..cfg.burn_in {
        step(&mut w, dirs, &mut rng);
    }
    let mut out = Vec::with_capacity(cfg.num_samples);
    for _ in 0..cfg.num_samples {
        for _ in 0..cfg.walk_steps {
            step(&mut w, dirs, &mut rng);
        }
        out.push(w.clone());
    }
    Ok(out)
}

/// Fraction of `samples` with `w . x > 0`.
pub fn vote_fraction(samples: &[Vec<f64>], x: &[f64]) -> f64 {
    let pos = samples.iter().filter(|w| dot(w, x) > 0.0).count();
    pos as f64 / samples.len() as f64
}

/// Monte-Carlo estimate of the fraction of the version space labeling `x`
/// positive.
pub fn estimate_vote_fraction(vs: &SeparatorVersionSpace, x: &[f64], cfg: &SamplerConfig) -> Result<f64> {
    if x.len() != vs.dim() {
        return Err(Error::ArityMismatch { expected: vs.dim(), got: x.len() });
    }
    if norm(x) == 0.0 {
        return Err(Error::invalid("query must be nonzero"));
    }
    Ok(vote_fraction(&hit_and_run_sample(vs, cfg)?, x))
}
