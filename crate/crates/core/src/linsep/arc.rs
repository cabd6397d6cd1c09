use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Open arc `(lo, hi)` of the circle, `hi - lo <= pi`.
#[derive(Clone, Copy, Debug)]
struct Arc {
    lo: f64,
    hi: f64,
}

impl Arc {
    fn half_circle(center: f64) -> Self {
        Arc {
            lo: center - FRAC_PI_2,
            hi: center + FRAC_PI_2,
        }
    }

    fn width(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    /// Intersection with the half circle centered at `phi`.
    fn cut(&self, phi: f64) -> Arc {
        let mid = 0.5 * (self.lo + self.hi);
        let phi = phi + TAU * ((mid - phi) / TAU).round();
        Arc {
            lo: self.lo.max(phi - FRAC_PI_2),
            hi: self.hi.min(phi + FRAC_PI_2),
        }
    }
}

fn angle(v: &[f64]) -> Result<f64> {
    if v.len() != 2 {
        return Err(Error::ArityMismatch { expected: 2, got: v.len() });
    }
    if v[0] == 0.0 && v[1] == 0.0 {
        return Err(Error::invalid("zero vector has no direction"));
    }
    Ok(v[1].atan2(v[0]))
}

/// Exact fraction of the unit directions `w` with `c . w > 0` for every
/// constraint `c` that also satisfy `w . query > 0`, by angular intervals.
pub fn analytic_arc_fraction_2d(constraints: &[Vec<f64>], query: &[f64]) -> Result<f64> {
    let q = angle(query)?;
    let Some((first, rest)) = constraints.split_first() else {
        return Ok(0.5);
    };
    let mut arc = Arc::half_circle(angle(first)?);
    for c in rest {
        arc = arc.cut(angle(c)?);
    }
    let w = arc.width();
    if w <= 0.0 {
        return Err(Error::Infeasible("constraints leave an empty arc".into()));
    }
    Ok((arc.cut(q).width() / w).clamp(0.0, 1.0))
}

/// Angular width of the feasible arc, `2 pi` with no constraints.
pub fn analytic_arc_width_2d(constraints: &[Vec<f64>]) -> Result<f64> {
    let Some((first, rest)) = constraints.split_first() else {
        return Ok(TAU);
    };
    let mut arc = Arc::half_circle(angle(first)?);
    for c in rest {
        arc = arc.cut(angle(c)?);
    }
    Ok(arc.width().min(PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(a: f64) -> Vec<f64> {
        vec![a.cos(), a.sin()]
    }

    #[test]
    fn hand_examples() {
        assert_eq!(analytic_arc_fraction_2d(&[], &[1.0, 0.0]).unwrap(), 0.5);
        // arc (0, pi/2)
        let cs = vec![dir(FRAC_PI_2), dir(0.0)];
        let f = analytic_arc_fraction_2d(&cs, &dir(0.75 * PI)).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
        assert!((analytic_arc_fraction_2d(&cs, &dir(0.25 * PI)).unwrap() - 1.0).abs() < 1e-12);
        assert!((analytic_arc_width_2d(&cs).unwrap() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn wraparound_is_handled() {
        // arc (3pi/4, 5pi/4) straddles the branch cut of atan2
        let cs = vec![dir(PI - 0.25 * PI), dir(PI + 0.25 * PI)];
        assert!((analytic_arc_width_2d(&cs).unwrap() - FRAC_PI_2).abs() < 1e-12);
        let f = analytic_arc_fraction_2d(&cs, &dir(FRAC_PI_2)).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_arc_is_infeasible() {
        let cs = vec![dir(0.0), dir(PI)];
        assert!(matches!(
            analytic_arc_fraction_2d(&cs, &[0.0, 1.0]),
            Err(Error::Infeasible(_))
        ));
    }
}
