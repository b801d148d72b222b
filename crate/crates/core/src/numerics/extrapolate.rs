use num_complex::Complex64;

use crate::error::{Error, Result};

/// Limit of a sequence of regularised values as the regulator goes to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    /// Difference between the full fit and the fit that drops the largest regulator.
    pub error_estimate: f64,
    /// Whether successive samples approached the limit monotonically.
    pub monotone: bool,
}

/// Neville evaluation at zero of the interpolating polynomial through `points`.
fn neville_at_zero(points: &[(f64, Complex64)]) -> Complex64 {
    let mut p: Vec<Complex64> = points.iter().map(|&(_, v)| v).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}

/// Richardson (polynomial) extrapolation of `(epsilon, value)` samples to
/// `epsilon = 0`.
///
/// Needs at least three samples at strictly decreasing positive regulators.
pub fn epsilon_extrapolate(samples: &[(f64, Complex64)]) -> Result<Extrapolated> {
    if samples.len() < 3 {
        return Err(Error::Extrapolation(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[0].0 > w[1].0 && w[1].0 > 0.0) {
            return Err(Error::Extrapolation(
                "regulators must be positive and strictly decreasing".into(),
            ));
        }
    }
    if samples.iter().any(|(_, v)| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Extrapolation("non-finite sample".into()));
    }

    let value = neville_at_zero(samples);
    let reduced = neville_at_zero(&samples[1..]);
    let error_estimate = (value - reduced).norm();

    let scale = samples.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let floor = 1e-13 * scale;
    let steps: Vec<f64> = samples.windows(2).map(|w| (w[1].1 - w[0].1).norm()).collect();
    let monotone = steps.windows(2).all(|s| s[1] <= s[0] || s[1] <= floor);

    Ok(Extrapolated {
        value,
        error_estimate,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn linear_in_epsilon() {
        let s: Vec<_> = [0.1, 0.05, 0.025].iter().map(|&e| (e, c(1.0 + e))).collect();
        let r = epsilon_extrapolate(&s).unwrap();
        assert!((r.value - c(1.0)).norm() < 1e-14);
        assert!(r.monotone);
    }

    #[test]
    fn quadratic_is_exact() {
        let s: Vec<_> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&e| (e, c(2.0 + 3.0 * e + e * e)))
            .collect();
        let r = epsilon_extrapolate(&s).unwrap();
        assert!((r.value - c(2.0)).norm() < 1e-13);
    }

    #[test]
    fn rejects_short_or_unordered_schedules() {
        assert!(epsilon_extrapolate(&[(0.1, c(1.0)), (0.05, c(1.0))]).is_err());
        assert!(epsilon_extrapolate(&[(0.1, c(1.0)), (0.2, c(1.0)), (0.05, c(1.0))]).is_err());
    }

    #[test]
    fn flags_non_monotone_convergence() {
        let s = [(0.1, c(1.0)), (0.05, c(1.1)), (0.025, c(0.5))];
        let r = epsilon_extrapolate(&s).unwrap();
        assert!(!r.monotone);
    }

    #[test]
    fn complex_values() {
        let s: Vec<_> = [1e-3, 5e-4, 2.5e-4]
            .iter()
            .map(|&e| (e, Complex64::new(1.0 - e, 2.0 + 4.0 * e)))
            .collect();
        let r = epsilon_extrapolate(&s).unwrap();
        assert!((r.value - Complex64::new(1.0, 2.0)).norm() < 1e-12);
    }
}
