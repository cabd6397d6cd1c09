use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::strictly_feasible;
use crate::rng::seeded;
use crate::types::{Label, LabeledSet};

/// Circular arc `center + radius (cos t, sin t)` for `t` in `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub start: f64,
    pub end: f64,
}

impl ArcSpec {
    pub fn point(&self, t: f64) -> Vec<f64> {
        vec![
            self.center[0] + self.radius * t.cos(),
            self.center[1] + self.radius * t.sin(),
        ]
    }

    pub fn length(&self) -> f64 {
        self.radius * (self.end - self.start)
    }

    fn contains_angle(&self, t: f64) -> bool {
        let k = ((self.start - t) / TAU).ceil();
        let t = t + TAU * k;
        t <= self.end + 1e-12
    }

    fn validate(&self) -> Result<()> {
        let ok = self.radius > 0.0
            && self.end > self.start
            && self.end - self.start < TAU
            && self.center.iter().chain([&self.start, &self.end]).all(|v| v.is_finite());
        if !ok {
            return Err(Error::invalid(format!("malformed arc {self:?}")));
        }
        Ok(())
    }
}

/// A positively and a negatively labeled arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoArcsSpec {
    pub positive: ArcSpec,
    pub negative: ArcSpec,
}

impl TwoArcsSpec {
    /// Two unit-radius arcs of half-angle `half_angle` bulging toward each
    /// other across a gap `gap` on the vertical axis.
    pub fn facing(half_angle: f64, gap: f64) -> Self {
        TwoArcsSpec {
            positive: ArcSpec {
                center: [0.0, 1.0],
                radius: 1.0,
                start: -FRAC_PI_2 - half_angle,
                end: -FRAC_PI_2 + half_angle,
            },
            negative: ArcSpec {
                center: [0.0, -1.0 - gap],
                radius: 1.0,
                start: FRAC_PI_2 - half_angle,
                end: FRAC_PI_2 + half_angle,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.positive.validate()?;
        self.negative.validate()?;
        if arcs_intersect(&self.positive, &self.negative) {
            return Err(Error::invalid("arcs intersect"));
        }
        let mut dirs = Vec::new();
        for (arc, y) in [(&self.positive, 1.0), (&self.negative, -1.0)] {
            for i in 0..=256 {
                let t = arc.start + (arc.end - arc.start) * i as f64 / 256.0;
                let p = arc.point(t);
                dirs.push(vec![y * p[0], y * p[1], y]);
            }
        }
        if !strictly_feasible(3, &dirs)? {
            return Err(Error::invalid("arcs are not linearly separable"));
        }
        Ok(())
    }
}

impl Default for TwoArcsSpec {
    fn default() -> Self {
        TwoArcsSpec::facing(0.5, 1.0)
    }
}

fn arcs_intersect(a: &ArcSpec, b: &ArcSpec) -> bool {
    let dx = b.center[0] - a.center[0];
    let dy = b.center[1] - a.center[1];
    let d = dx.hypot(dy);
    if d < 1e-12 && (a.radius - b.radius).abs() < 1e-12 {
        // same circle: overlap iff an endpoint of one lies on the other
        return [b.start, b.end].iter().any(|&t| a.contains_angle(t))
            || [a.start, a.end].iter().any(|&t| b.contains_angle(t));
    }
    if d > a.radius + b.radius || d < (a.radius - b.radius).abs() || d < 1e-12 {
        return false;
    }
    // angle at a's center toward the intersection points
    let base = dy.atan2(dx);
    let cos = ((a.radius * a.radius + d * d - b.radius * b.radius) / (2.0 * a.radius * d)).clamp(-1.0, 1.0);
    let spread = cos.acos();
    [base - spread, base + spread].iter().any(|&ta| {
        let p = a.point(ta);
        let tb = (p[1] - b.center[1]).atan2(p[0] - b.center[0]);
        a.contains_angle(ta) && b.contains_angle(tb)
    })
}

/// `m` points uniform (by length) on the two arcs, labeled by arc.
pub fn gen_two_arcs(spec: &TwoArcsSpec, m: usize, seed: u64) -> Result<LabeledSet<Vec<f64>>> {
    spec.validate()?;
    let mut rng = seeded(seed);
    let p_pos = spec.positive.length() / (spec.positive.length() + spec.negative.length());
    let items = (0..m)
        .map(|_| {
            let (arc, y) = if rng.random::<f64>() < p_pos {
                (&spec.positive, Label::Pos)
            } else {
                (&spec.negative, Label::Neg)
            };
            let t = rng.random_range(arc.start..arc.end);
            (arc.point(t), y)
        })
        .collect();
    Ok(LabeledSet::new(items))
}
