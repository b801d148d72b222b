//! Transition probability of a single circularly moving detector near the mirror.
//!
//! The production path is the reduced four-term expression
//!
//! ```text
//! P = K   int_0^inf e^{-alpha x^2} cos(beta x) (x^2 - sin^2 x) / (x^2 (x^2 - v^2 sin^2 x))
//!   + c_w PV int_0^inf e^{-alpha x^2} cos(beta x) / (x^2 - v^2 sin^2 x - omega^2 dz^2)
//!   + (1/4pi) [e^{-Omega^2} - sqrt(pi) Omega erfc(Omega)]
//!   + c_w pi e^{-alpha S^2} sin(beta S) / (2S - v^2 sin 2S)
//! ```
//!
//! with `alpha = 1/(omega gamma)^2`, `beta = 2 Omega/(gamma omega)`,
//! `K = v^2 gamma omega / (4 pi^{3/2})`, `c_w = omega / (4 pi^{3/2} gamma)` and `S` the
//! positive root of `x^2 - v^2 sin^2 x = omega^2 dz^2`. The oracle integrates the
//! Gaussian-switched double integral along the worldline with a finite regulator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kinematics::{trajectory_point, CircularDetector};
use crate::numerics::{
    epsilon_extrapolate, find_root_bracketed, gaussian_cutoff, integrate_with,
    principal_value_integral, Extrapolated, QuadOptions,
};
use crate::wightman::{wightman_boundary, wightman_free};

/// Regulator schedule used by the oracles.
pub const DEFAULT_EPSILONS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// The four additive pieces of the reduced transition probability (units of `lambda^2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseBreakdown {
    /// Bounded motion integral (free-space correction from rotation).
    pub term_bounded: f64,
    /// Principal-value integral of the image term.
    pub term_pv: f64,
    /// Inertial closed form.
    pub term_inertial: f64,
    /// Half-residue of the image pole at `S`.
    pub term_pole: f64,
    pub total: f64,
    pub error_estimate: f64,
    pub pole_s: f64,
    /// `S` lay beyond the Gaussian cut-off; the image integral had no pole to excise.
    pub pole_beyond_cutoff: bool,
}

/// `x - sin x` without cancellation near the origin.
pub(crate) fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        // x^3/3! - x^5/5! + ... - x^13/13!
        let mut term = x * x2 / 6.0;
        let mut sum = term;
        for k in 1..6 {
            let n = (2 * k + 2) * (2 * k + 3);
            term *= -x2 / n as f64;
            sum += term;
        }
        sum
    } else {
        x - x.sin()
    }
}

/// `x^2 - sin^2 x`.
fn x2_minus_sin2(x: f64) -> f64 {
    x_minus_sin(x) * (x + x.sin())
}

/// `x^2 - v^2 sin^2 x`, written as a sum of non-negative pieces.
fn orbit_denominator(x: f64, one_minus_v2: f64) -> f64 {
    let s = x.sin();
    x2_minus_sin2(x) + one_minus_v2 * s * s
}

/// `(x^2 - sin^2 x) / (x^2 (x^2 - v^2 sin^2 x))`, continuous at `x = 0`.
fn bounded_kernel(x: f64, one_minus_v2: f64) -> f64 {
    if x == 0.0 {
        return 1.0 / (3.0 * one_minus_v2);
    }
    x2_minus_sin2(x) / (x * x * orbit_denominator(x, one_minus_v2))
}

/// Inertial detector response `(1/4pi)[e^{-Omega^2} - sqrt(pi) Omega erfc(Omega)]`.
pub fn inertial_term(gap: f64) -> f64 {
    ((-gap * gap).exp() - PI.sqrt() * gap * libm::erfc(gap)) / (4.0 * PI)
}

struct Shape {
    alpha: f64,
    beta: f64,
    k: f64,
    c_w: f64,
}

fn shape(det: &CircularDetector) -> Shape {
    let (w, g, v) = (det.omega(), det.gamma(), det.speed());
    Shape {
        alpha: 1.0 / (w * g).powi(2),
        beta: 2.0 * det.energy_gap() / (g * w),
        k: v * v * g * w / (4.0 * PI.powf(1.5)),
        c_w: w / (4.0 * PI.powf(1.5) * g),
    }
}

fn panel_width(sh: &Shape) -> f64 {
    let mut w = 1.0f64.min(sh.alpha.sqrt().recip());
    if sh.beta > 0.0 {
        w = w.min(2.0 * PI / sh.beta);
    }
    w
}

/// Positive root `S` of `x^2 - v^2 sin^2 x - omega^2 dz^2 = 0`.
///
/// The left side is strictly increasing for `x > 0` when `v < 1`, so the root is unique.
pub fn solve_pole_s(det: &CircularDetector, dz: f64) -> Result<f64> {
    if !(dz > 0.0 && dz.is_finite()) {
        return Err(domain("dz", dz, "boundary distance must be positive"));
    }
    if det.is_static() {
        return Err(domain(
            "omega",
            0.0,
            "static detector has no image pole in the reduced form",
        ));
    }
    let c = det.omega() * dz;
    if det.speed() < 1e-12 {
        return Ok(c);
    }
    let omv2 = det.one_minus_v2();
    let g = |x: f64| orbit_denominator(x, omv2) - c * c;
    if g(c) == 0.0 {
        return Ok(c);
    }
    find_root_bracketed(g, c, c * det.gamma())
}

fn bounded_integral(det: &CircularDetector, sh: &Shape, tol: f64) -> Result<(f64, f64)> {
    let omv2 = det.one_minus_v2();
    let opts = QuadOptions::absolute(tol).with_panel_width(panel_width(sh));
    let x_max = gaussian_cutoff(sh.alpha, tol);
    let f = |x: f64| (-sh.alpha * x * x).exp() * (sh.beta * x).cos() * bounded_kernel(x, omv2);
    let r = integrate_with(f, 0.0, x_max, &[], &opts);
    let tail = f(x_max).abs() / (2.0 * sh.alpha * x_max);
    if !r.converged {
        return Err(Error::Quadrature {
            what: "bounded response integral",
            error_estimate: r.abs_error_estimate,
            tol,
        });
    }
    Ok((r.value, r.abs_error_estimate + tail))
}

/// Transition probability `P_D / lambda^2` of a rotating detector at distance `dz`
/// from the mirror, term by term. `tol` is the absolute accuracy asked of the total.
pub fn transition_probability(
    det: &CircularDetector,
    dz: f64,
    tol: f64,
) -> Result<ResponseBreakdown> {
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "must be positive"));
    }
    let s = solve_pole_s(det, dz)?;
    let sh = shape(det);
    let omv2 = det.one_minus_v2();

    let (bounded, bounded_err) = bounded_integral(det, &sh, tol / (3.0 * sh.k))?;
    let term_bounded = sh.k * bounded;

    let pv_tol = tol / (3.0 * sh.c_w);
    let x_max = gaussian_cutoff(sh.alpha, pv_tol);
    let c2 = (det.omega() * dz).powi(2);
    let numerator = |x: f64| (-sh.alpha * x * x).exp() * (sh.beta * x).cos();
    let denominator = |x: f64| orbit_denominator(x, omv2) - c2;
    let opts = QuadOptions::absolute(pv_tol).with_panel_width(panel_width(&sh));
    let pole_beyond_cutoff = s >= x_max;
    let pv = if pole_beyond_cutoff {
        integrate_with(|x| numerator(x) / denominator(x), 0.0, x_max, &[], &opts)
    } else {
        principal_value_integral(numerator, denominator, s, 0.0, x_max, &opts)?
    };
    if !pv.converged {
        return Err(Error::Quadrature {
            what: "image principal value",
            error_estimate: pv.abs_error_estimate,
            tol: pv_tol,
        });
    }
    let pv_tail = (numerator(x_max) / denominator(x_max)).abs() / (2.0 * sh.alpha * x_max);
    let term_pv = sh.c_w * pv.value;

    let term_inertial = inertial_term(det.energy_gap());
    let slope = x_minus_sin(2.0 * s) + omv2 * (2.0 * s).sin();
    let term_pole = sh.c_w * PI * (-sh.alpha * s * s).exp() * (sh.beta * s).sin() / slope;

    Ok(ResponseBreakdown {
        term_bounded,
        term_pv,
        term_inertial,
        term_pole,
        total: term_bounded + term_pv + term_inertial + term_pole,
        error_estimate: sh.k * bounded_err + sh.c_w * (pv.abs_error_estimate + pv_tail),
        pole_s: s,
        pole_beyond_cutoff,
    })
}

/// Transition probability without the mirror (the `dz -> inf` limit).
pub fn transition_probability_free(det: &CircularDetector, tol: f64) -> Result<f64> {
    Ok(transition_probability_free_with_error(det, tol)?.0)
}

pub(crate) fn transition_probability_free_with_error(
    det: &CircularDetector,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "must be positive"));
    }
    let inertial = inertial_term(det.energy_gap());
    if det.is_static() {
        return Ok((inertial, 0.0));
    }
    let sh = shape(det);
    let (bounded, err) = bounded_integral(det, &sh, tol / sh.k)?;
    Ok((sh.k * bounded + inertial, sh.k * err))
}

/// Definition-level oracle: the Gaussian-switched double integral of the Wightman
/// function along the worldline, evaluated at each regulator in `epsilons` and
/// extrapolated to zero. `dz = None` means free space. The probability is
/// `value.re`; `value.im` should vanish.
///
/// The double integral runs over `u = tau + tau'` (inner) and `s = tau - tau'` (outer).
pub fn transition_probability_oracle(
    det: &CircularDetector,
    dz: Option<f64>,
    epsilons: &[f64],
    tol: f64,
) -> Result<Extrapolated> {
    if let Some(dz) = dz {
        if !(dz > 0.0) {
            return Err(domain("dz", dz, "boundary distance must be positive"));
        }
    }
    let z = dz.unwrap_or(0.0);
    let gap = det.energy_gap();
    let window = gaussian_cutoff(0.25, tol);
    let inner_opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_subdivisions: 200,
        max_panel_width: None,
    };
    let outer_opts = QuadOptions {
        abs_tol: tol,
        rel_tol: 0.0,
        max_subdivisions: 50_000,
        max_panel_width: Some(0.25),
    };

    let mut samples = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let wightman = |s: f64, u: f64| {
            let p = trajectory_point(det, z, 0.5 * (u + s));
            let q = trajectory_point(det, z, 0.5 * (u - s));
            match dz {
                Some(_) => wightman_boundary(&p, &q, eps),
                None => wightman_free(&p, &q, eps),
            }
        };
        let outer = |s: f64| {
            let inner = integrate_with(
                |u: f64| wightman(s, u) * (0.5 * (-(u * u + s * s) / 4.0).exp()),
                -window,
                window,
                &[],
                &inner_opts,
            );
            inner.value * Complex64::new(0.0, -gap * s).exp()
        };
        let r = integrate_with(outer, -window, window, &[0.0], &outer_opts);
        if !r.converged {
            return Err(Error::Quadrature {
                what: "response oracle",
                error_estimate: r.abs_error_estimate,
                tol,
            });
        }
        samples.push((eps, r.value));
    }
    let lim = epsilon_extrapolate(&samples)?;
    if !lim.monotone {
        return Err(Error::Extrapolation(
            "response oracle did not converge monotonically in epsilon".into(),
        ));
    }
    Ok(lim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(gap: f64, a: f64, r: f64) -> CircularDetector {
        CircularDetector::new(gap, a, r).unwrap()
    }

    #[test]
    fn series_matches_direct_difference() {
        for x in [0.3, 0.49, 0.51, 1.0] {
            assert!((x_minus_sin(x) - (x - f64::sin(x))).abs() < 1e-15);
        }
        let x = 1e-3;
        assert!((x_minus_sin(x) / (x * x * x / 6.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kernel_is_continuous_at_origin() {
        let omv2 = 0.3;
        let at0 = bounded_kernel(0.0, omv2);
        assert!((bounded_kernel(1e-6, omv2) - at0).abs() < 1e-9);
        assert!((bounded_kernel(1e-3, omv2) - at0).abs() < 1e-5);
    }

    #[test]
    fn pole_static_speed_limit() {
        // v tiny: S = omega dz
        let d = det(0.1, 1e-26, 1.0);
        assert!(d.speed() < 1e-12);
        let s = solve_pole_s(&d, 0.7).unwrap();
        assert_eq!(s, d.omega() * 0.7);
    }

    #[test]
    fn pole_far_limit_bound() {
        let d = det(0.1, 5.0, 0.02);
        let dz = 40.0;
        let c = d.omega() * dz;
        let s = solve_pole_s(&d, dz).unwrap();
        let v2 = d.speed().powi(2);
        assert!((s - c).abs() / c <= v2 / (c * c));
    }

    #[test]
    fn pole_matches_dense_scan() {
        let d = det(0.1, 5.0, 0.02);
        let s = solve_pole_s(&d, 0.1).unwrap();
        let (v2, c) = (d.speed().powi(2), d.omega() * 0.1);
        let g = |x: f64| x * x - v2 * x.sin().powi(2) - c * c;
        let n = 200_000;
        let hi = 5.0;
        let mut oracle = f64::NAN;
        for k in 0..n {
            let (a, b) = (hi * k as f64 / n as f64, hi * (k + 1) as f64 / n as f64);
            if g(a) < 0.0 && g(b) >= 0.0 {
                oracle = find_root_bracketed(g, a, b).unwrap();
            }
        }
        assert!((s - oracle).abs() < 1e-12, "{s} vs {oracle}");
        assert!(g(s).abs() < 1e-10);
    }

    #[test]
    fn pole_rejects_bad_inputs() {
        assert!(solve_pole_s(&det(0.1, 5.0, 0.02), 0.0).is_err());
        assert!(solve_pole_s(&det(0.1, 0.0, 0.02), 1.0).is_err());
    }

    #[test]
    fn pole_equation_is_monotone() {
        for (a, r) in [(5.0, 0.02), (0.1, 10.0), (5.0, 10.0), (500.0, 1.0)] {
            let d = det(0.1, a, r);
            let v2 = d.speed().powi(2);
            let lhs = |x: f64| x * x - v2 * x.sin().powi(2);
            let mut prev = lhs(0.0);
            for k in 1..5000 {
                let x = k as f64 * 0.01;
                let cur = lhs(x);
                assert!(cur > prev);
                prev = cur;
            }
        }
    }

    #[test]
    fn breakdown_sums() {
        let b = transition_probability(&det(0.1, 5.0, 0.02), 0.1, 1e-9).unwrap();
        assert_eq!(
            b.total,
            b.term_bounded + b.term_pv + b.term_inertial + b.term_pole
        );
        assert!(b.total > 0.0);
        assert!(b.term_inertial >= 0.0);
    }

    #[test]
    fn inertial_term_limits() {
        assert!((inertial_term(0.0) - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(inertial_term(30.0) < 1e-300);
        let mut prev = inertial_term(0.0);
        for k in 1..100 {
            let cur = inertial_term(0.05 * k as f64);
            assert!(cur > 0.0 && cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn free_static_is_inertial() {
        let p = transition_probability_free(&det(0.3, 0.0, 1.0), 1e-10).unwrap();
        assert_eq!(p, inertial_term(0.3));
        let slow = transition_probability_free(&det(0.3, 1e-8, 1e-3), 1e-12).unwrap();
        assert!((slow - inertial_term(0.3)).abs() < 1e-10);
    }

    #[test]
    fn free_vanishes_at_large_gap() {
        let p = transition_probability_free(&det(12.0, 1.0, 1.0), 1e-12).unwrap();
        assert!(p.abs() < 1e-10);
    }

    #[test]
    fn static_with_boundary_routes_to_oracle() {
        assert!(transition_probability(&det(0.1, 0.0, 1.0), 1.0, 1e-8).is_err());
    }
}
