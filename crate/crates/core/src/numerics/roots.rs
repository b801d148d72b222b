use crate::error::{Error, Result};

/// Guaranteed absolute accuracy of roots returned by [`find_root_bracketed`]
/// for brackets of moderate magnitude; bisection actually runs until the bracket
/// endpoints are adjacent floats, since principal values are sensitive to pole offsets.
pub const ROOT_TOL: f64 = 1e-13;

/// Finds a root of `g` in `[lo, hi]` by bisection.
///
/// Requires a sign change across the bracket; a zero at either end is returned
/// directly.
pub fn find_root_bracketed<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if !(ga * gb < 0.0) {
        return Err(Error::BracketViolation {
            lo: a,
            hi: b,
            g_lo: ga,
            g_hi: gb,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn square_root_of_two() {
        let r = find_root_bracketed(|x| x * x - 2.0, 1.0, 2.0).unwrap();
        assert!((r - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn cosine_zero() {
        let r = find_root_bracketed(f64::cos, 1.0, 2.0).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_bracket() {
        let r = find_root_bracketed(f64::cos, 2.0, 1.0).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_violation() {
        let err = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::BracketViolation { .. }));
    }
}
