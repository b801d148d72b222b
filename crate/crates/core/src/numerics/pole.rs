//! Simple real poles: location, principal values and the Sokhotski-Plemelj split.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::{integrate_with, QuadOptions, QuadratureResult};
use super::roots::find_root_bracketed;
use super::QuadValue;
use crate::error::{Error, Result};

/// Zeros with `|D'|` below this are treated as tangential (non-simple).
pub const TANGENTIAL_SLOPE: f64 = 1e-8;

/// Number of samples used to count sign changes of a denominator.
const SIGN_SCAN_SAMPLES: usize = 1024;

/// A simple real zero of a denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: f64,
    /// `D'(location)`.
    pub slope: f64,
    /// Disagreement between five-point stencils at two step sizes.
    pub slope_error: f64,
}

/// Strictly ordered simple poles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoleSet {
    poles: Vec<Pole>,
}

impl PoleSet {
    pub fn new(mut poles: Vec<Pole>) -> Result<Self> {
        poles.sort_by(|a, b| a.location.total_cmp(&b.location));
        for p in &poles {
            if !(p.slope.abs() >= TANGENTIAL_SLOPE) {
                return Err(Error::TangentialZero {
                    at: p.location,
                    slope: p.slope,
                });
            }
        }
        for w in poles.windows(2) {
            if !(w[1].location > w[0].location) {
                return Err(Error::PoleSpacing {
                    left: w[0].location,
                    right: w[1].location,
                });
            }
        }
        Ok(Self { poles })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

fn five_point<D: Fn(f64) -> f64>(d: &D, x: f64, h: f64) -> f64 {
    let (m2, m1, p1, p2) = (d(x - 2.0 * h), d(x - h), d(x + h), d(x + 2.0 * h));
    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
}

/// Five-point derivative at half step; the error is its distance to the full-step value.
fn slope_at<D: Fn(f64) -> f64>(d: &D, x: f64, step: f64) -> (f64, f64) {
    let h = step * x.abs().max(1.0);
    let coarse = five_point(d, x, h);
    let fine = five_point(d, x, 0.5 * h);
    (fine, (fine - coarse).abs())
}

/// Locates every sign change of `d` on `[lo, hi]` by scanning at `scan_step`
/// and refining each bracket by bisection.
///
/// The caller must choose `scan_step` below the shortest oscillation scale of `d`;
/// zeros that touch the axis without crossing it are not seen.
pub fn poles_of_denominator<D: Fn(f64) -> f64>(
    d: D,
    lo: f64,
    hi: f64,
    scan_step: f64,
) -> Result<PoleSet> {
    if !(hi > lo) || !(scan_step > 0.0) {
        return Err(Error::Config(format!(
            "pole scan needs lo < hi and a positive step (got [{lo}, {hi}], step {scan_step})"
        )));
    }
    let n = ((hi - lo) / scan_step).ceil().max(1.0) as usize;
    let stencil = (scan_step * 1e-2).min(1e-3);
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut d_prev = d(lo);
    if d_prev == 0.0 {
        roots.push(lo);
    }
    for k in 1..=n {
        let x = if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 };
        let dx = d(x);
        if dx == 0.0 {
            roots.push(x);
        } else if d_prev != 0.0 && (dx < 0.0) != (d_prev < 0.0) {
            roots.push(find_root_bracketed(&d, x_prev, x)?);
        }
        x_prev = x;
        d_prev = dx;
    }

    let poles = roots
        .into_iter()
        .map(|location| {
            let (slope, slope_error) = slope_at(&d, location, stencil);
            Pole {
                location,
                slope,
                slope_error,
            }
        })
        .collect();
    PoleSet::new(poles)
}

fn count_sign_changes<D: Fn(f64) -> f64>(d: &D, lo: f64, hi: f64) -> usize {
    let mut last_sign = 0.0;
    let mut changes = 0;
    for k in 0..=SIGN_SCAN_SAMPLES {
        let x = lo + (hi - lo) * k as f64 / SIGN_SCAN_SAMPLES as f64;
        let v = d(x);
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            changes += 1;
        }
        last_sign = s;
    }
    changes
}

fn excised<T, F, D>(
    f: &F,
    d: &D,
    pole: f64,
    lo: f64,
    hi: f64,
    half_width: f64,
    opts: &QuadOptions,
) -> QuadratureResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
    D: Fn(f64) -> f64,
{
    let ratio = |x: f64| f(x) * d(x).recip();
    let sub = QuadOptions {
        abs_tol: opts.abs_tol / 3.0,
        ..opts.clone()
    };
    let left = integrate_with(ratio, lo, pole - half_width, &[], &sub);
    let right = integrate_with(ratio, pole + half_width, hi, &[], &sub);
    // Symmetric neighbourhood folded onto [0, half_width]: the odd singular
    // part cancels between x = pole + t and x = pole - t. Closer to the pole than
    // `t_floor` the cancellation is pure rounding noise, so the integrand is held
    // at its value there; the folded integrand is smooth, so this costs O(t_floor^2).
    let t_floor = 1e-6 * half_width;
    let folded = integrate_with(
        |t: f64| {
            let t = t.max(t_floor);
            ratio(pole + t) + ratio(pole - t)
        },
        0.0,
        half_width,
        &[],
        &QuadOptions {
            max_panel_width: None,
            ..sub
        },
    );
    left.combine(right).combine(folded)
}

/// Cauchy principal value of `f(x) / d(x)` over `[lo, hi]`, where `d` has a single
/// simple zero at `pole`.
///
/// A symmetric window around the pole is folded so that the odd singular part
/// cancels analytically; the rest is integrated directly. The result is
/// recomputed with the window halved and both must agree within `10 * abs_tol`.
pub fn principal_value_integral<T, F, D>(
    f: F,
    d: D,
    pole: f64,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
    D: Fn(f64) -> f64,
{
    if !(lo < pole && pole < hi) {
        return Err(Error::Config(format!(
            "pole {pole} is not strictly inside [{lo}, {hi}]"
        )));
    }
    let found = count_sign_changes(&d, lo, hi);
    if found != 1 {
        return Err(Error::PoleCount { lo, hi, found });
    }

    let half_width = 0.5 * (pole - lo).min(hi - pole);
    let wide = excised(&f, &d, pole, lo, hi, half_width, opts);
    let narrow = excised(&f, &d, pole, lo, hi, 0.5 * half_width, opts);
    let diff = (wide.value - narrow.value).magnitude();
    let limit = 10.0 * opts.abs_tol.max(opts.rel_tol * narrow.value.magnitude());
    if diff > limit {
        return Err(Error::PrincipalValueUnstable { diff, limit });
    }
    Ok(QuadratureResult {
        value: narrow.value,
        abs_error_estimate: narrow.abs_error_estimate.max(diff),
        evaluations: wide.evaluations + narrow.evaluations,
        converged: wide.converged && narrow.converged,
    })
}

/// Integral over `[lo, hi]` of `numerator(x) / (d(x) - i0 * s_k)` near each pole,
/// i.e. the distributional limit of an `i epsilon` regularised denominator.
///
/// `shift_sign(pole)` gives `s_k = +1` or `-1`: the direction in which the
/// regulator moves the denominator off the real axis at that pole. Each pole then
/// contributes `PV + i pi s_k numerator(x_k) / |d'(x_k)|`.
pub fn real_line_pole_integral<N, D, S>(
    numerator: N,
    d: D,
    poles: &PoleSet,
    shift_sign: S,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult<Complex64>>
where
    N: Fn(f64) -> Complex64,
    D: Fn(f64) -> f64,
    S: Fn(&Pole) -> f64,
{
    let inside: Vec<Pole> = poles
        .poles()
        .iter()
        .copied()
        .filter(|p| p.location > lo && p.location < hi)
        .collect();
    if inside.is_empty() {
        let r = integrate_with(|x| numerator(x) * d(x).recip(), lo, hi, &[], opts);
        return Ok(r);
    }
    for w in inside.windows(2) {
        let gap = w[1].location - w[0].location;
        if gap < 1e-9 * w[0].location.abs().max(1.0) {
            return Err(Error::PoleSpacing {
                left: w[0].location,
                right: w[1].location,
            });
        }
    }

    let mut edges = Vec::with_capacity(inside.len() + 1);
    edges.push(lo);
    for w in inside.windows(2) {
        edges.push(0.5 * (w[0].location + w[1].location));
    }
    edges.push(hi);

    let seg_opts = QuadOptions {
        abs_tol: opts.abs_tol / inside.len() as f64,
        ..opts.clone()
    };
    let mut total = QuadratureResult::<Complex64>::empty();
    for (k, pole) in inside.iter().enumerate() {
        let pv = principal_value_integral(
            &numerator,
            &d,
            pole.location,
            edges[k],
            edges[k + 1],
            &seg_opts,
        )?;
        let sign = shift_sign(pole).signum();
        let n = numerator(pole.location);
        let half_residue = Complex64::new(0.0, PI * sign) * n / pole.slope.abs();
        let residue_error = half_residue.norm() * pole.slope_error / pole.slope.abs();
        total = total.combine(QuadratureResult {
            value: pv.value + half_residue,
            abs_error_estimate: pv.abs_error_estimate + residue_error,
            evaluations: pv.evaluations + 1,
            converged: pv.converged,
        });
    }
    Ok(total)
}
