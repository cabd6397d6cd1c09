use crate::error::{Error, Result};

/// Lower bound on the risk of any learner with abstain probability `rho`:
///
/// `min(1/2 - 1/(4 rho), 1/2 - 1/(2 rho) + (d + (16/3) ln(1 - 2 delta)) / (16 rho m))`
///
/// Evaluated as written; the result is negative (vacuous) in many regimes.
pub fn upper_envelope_bound(rho: f64, m: usize, d: usize, delta: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid(format!("abstain probability must lie in (0, 1], got {rho}")));
    }
    if !(0.0..=0.25).contains(&delta) {
        return Err(Error::invalid(format!("delta must lie in [0, 1/4], got {delta}")));
    }
    if m == 0 || d == 0 {
        return Err(Error::invalid("need m >= 1 and d >= 1"));
    }
    let (m, d) = (m as f64, d as f64);
    let first = 0.5 - 1.0 / (4.0 * rho);
    let second = 0.5 - 1.0 / (2.0 * rho)
        + (d + 16.0 / 3.0 * (1.0 - 2.0 * delta).ln()) / (16.0 * rho * m);
    Ok(first.min(second))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let v = upper_envelope_bound(0.5, 100, 3, 0.1).unwrap();
        let want = -0.5 + (3.0 + 16.0 / 3.0 * 0.8f64.ln()) / 800.0;
        assert!((v - want).abs() < 1e-12);
        assert!((v + 0.497_738).abs() < 1e-6);
        // rho=1: 1/2 - 1/(2 rho) vanishes, leaving 10/320
        assert!((upper_envelope_bound(1.0, 20, 10, 0.0).unwrap() - 0.031_25).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(upper_envelope_bound(0.0, 10, 1, 0.1).is_err());
        assert!(upper_envelope_bound(0.5, 10, 1, 0.3).is_err());
        assert!(upper_envelope_bound(0.5, 0, 1, 0.1).is_err());
    }

    #[test]
    fn large_m_limit() {
        let v = upper_envelope_bound(1.0, 100_000_000, 1, 0.0).unwrap();
        assert!(v.abs() < 1e-6);
    }
}
