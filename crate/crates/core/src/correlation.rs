//! Field-mediated correlation `C` between two detectors orbiting the same axis.
//!
//! Detector A orbits at height `dz` above the mirror and detector B at `dz + L`.
//! Both start on the positive x axis at `t = 0`. When the two angular velocities
//! agree the Wightman function along the pair depends only on the time difference
//! and `C` reduces to one integral over `s`; otherwise the double integral is used.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kinematics::{trajectory_point_at_time, CircularDetector};
use crate::numerics::{
    epsilon_extrapolate, find_root_bracketed, gaussian_cutoff, integrate_with,
    poles_of_denominator, principal_value_integral, real_line_pole_integral, Extrapolated,
    QuadOptions,
};
use crate::response::x_minus_sin;
pub use crate::wightman::wightman_boundary;
use crate::wightman::wightman_free;

/// Two detectors, their distance to the mirror and their separation along z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairParams", into = "PairParams")]
pub struct PairConfig {
    det_a: CircularDetector,
    det_b: CircularDetector,
    dz: Option<f64>,
    sep: f64,
    equal_kinematics: bool,
}

#[derive(Serialize, Deserialize)]
struct PairParams {
    det_a: CircularDetector,
    det_b: CircularDetector,
    #[serde(default)]
    dz: Option<f64>,
    sep: f64,
}

impl TryFrom<PairParams> for PairConfig {
    type Error = Error;
    fn try_from(p: PairParams) -> Result<Self> {
        Self::new(p.det_a, p.det_b, p.dz, p.sep)
    }
}

impl From<PairConfig> for PairParams {
    fn from(p: PairConfig) -> Self {
        Self {
            det_a: p.det_a,
            det_b: p.det_b,
            dz: p.dz,
            sep: p.sep,
        }
    }
}

impl PairConfig {
    /// `dz = None` places the pair in free space.
    pub fn new(
        det_a: CircularDetector,
        det_b: CircularDetector,
        dz: Option<f64>,
        sep: f64,
    ) -> Result<Self> {
        if let Some(z) = dz {
            if !(z > 0.0 && z.is_finite()) {
                return Err(domain("dz", z, "boundary distance must be positive"));
            }
        }
        if !(sep >= 0.0 && sep.is_finite()) {
            return Err(domain("sep", sep, "separation must be finite and non-negative"));
        }
        let equal_kinematics = det_a.same_orbit(&det_b);
        if sep == 0.0 && equal_kinematics {
            return Err(domain("sep", sep, "detectors on the same orbit would coincide"));
        }
        Ok(Self {
            det_a,
            det_b,
            dz,
            sep,
            equal_kinematics,
        })
    }

    pub fn det_a(&self) -> &CircularDetector {
        &self.det_a
    }
    pub fn det_b(&self) -> &CircularDetector {
        &self.det_b
    }
    pub fn dz(&self) -> Option<f64> {
        self.dz
    }
    pub fn sep(&self) -> f64 {
        self.sep
    }
    /// Same acceleration and radius (to `1e-12` relative).
    pub fn equal_kinematics(&self) -> bool {
        self.equal_kinematics
    }

    /// Same angular velocity, so that the Wightman function depends on `s` only.
    pub fn synchronous(&self) -> bool {
        let (wa, wb) = (self.det_a.omega(), self.det_b.omega());
        (wa - wb).abs() <= 1e-12 * wa.max(wb)
    }

    /// Height of detector A and detector B above the mirror (0 and `L` in free space).
    pub fn heights(&self) -> (f64, f64) {
        let za = self.dz.unwrap_or(0.0);
        (za, za + self.sep)
    }

    /// The same pair with the labels exchanged.
    pub fn swapped_gaps(&self) -> Result<Self> {
        let a = self.det_a.with_gap(self.det_b.energy_gap())?;
        let b = self.det_b.with_gap(self.det_a.energy_gap())?;
        Self::new(a, b, self.dz, self.sep)
    }
}

/// `C = C_1 - C_2`: free-space part and mirror part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub c_total: Complex64,
    pub c_free: Complex64,
    pub c_boundary: Complex64,
    pub error_estimate: f64,
}

impl CorrelationResult {
    fn assemble(c_free: Complex64, c_boundary: Complex64, error_estimate: f64) -> Self {
        Self {
            c_total: c_free - c_boundary,
            c_free,
            c_boundary,
            error_estimate,
        }
    }
}

/// Real-axis denominator `Q + 4 R_A R_B sin^2(omega s / 2) - s^2` for a synchronous pair.
#[derive(Debug, Clone, Copy)]
struct Denominator {
    q: f64,
    rr4: f64,
    omega: f64,
    one_minus_vv: f64,
}

impl Denominator {
    fn new(pair: &PairConfig, image: bool) -> Self {
        let (a, b) = (&pair.det_a, &pair.det_b);
        let (ra, rb, l) = (a.radius(), b.radius(), pair.sep);
        let mut q = l * l + (ra - rb).powi(2);
        if image {
            let (za, zb) = pair.heights();
            q = (za + zb).powi(2) + (ra - rb).powi(2);
        }
        let omega = a.omega();
        Self {
            q,
            rr4: 4.0 * ra * rb,
            omega,
            // 1 - v_A v_B, from the exact 1 - v^2 of each detector when they agree
            one_minus_vv: if a.same_orbit(b) {
                a.one_minus_v2()
            } else {
                1.0 - a.speed() * b.speed()
            },
        }
    }

    /// `s^2 - 4 R_A R_B sin^2(omega s / 2)`, increasing on `s > 0`.
    fn lhs(&self, s: f64) -> f64 {
        if self.omega == 0.0 {
            return s * s;
        }
        let h = 0.5 * self.omega * s;
        self.one_minus_vv * s * s + self.rr4 * x_minus_sin(h) * (h + h.sin())
    }

    fn eval(&self, s: f64) -> f64 {
        self.q - self.lhs(s)
    }

    /// `|D'(s)|` for `s > 0`.
    fn slope(&self, s: f64) -> f64 {
        if self.omega == 0.0 {
            return 2.0 * s;
        }
        let x = self.omega * s;
        let kappa = 1.0 - self.one_minus_vv;
        2.0 / self.omega * (x_minus_sin(x) + (1.0 - kappa) * x.sin())
    }

    /// Largest `|s|` at which `D` can vanish.
    fn root_bound(&self) -> f64 {
        (self.q + self.rr4).sqrt()
    }

    fn positive_root(&self) -> Result<f64> {
        let lo = self.q.sqrt();
        let hi = self.root_bound();
        if self.eval(lo) == 0.0 || hi == lo {
            return Ok(lo);
        }
        find_root_bracketed(|s| self.eval(s), lo, hi)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "must be positive"));
    }
    Ok(())
}

/// Equal-kinematics correlation as two real-line integrals in `s`, each split into
/// principal value and half-residues at the real zeros of its denominator.
pub fn correlation_equal(pair: &PairConfig, tol: f64) -> Result<CorrelationResult> {
    check_tol(tol)?;
    if !pair.equal_kinematics {
        return Err(Error::Config(
            "reduced correlation needs equal acceleration and radius".into(),
        ));
    }
    let det = &pair.det_a;
    let (gap_a, gap_b) = (det.energy_gap(), pair.det_b.energy_gap());
    let gamma = det.gamma();
    let delta = gap_b - gap_a;
    let prefactor = (-0.25 * delta * delta).exp() / (4.0 * PI.powf(1.5) * gamma);
    if prefactor == 0.0 {
        return Ok(CorrelationResult::assemble(Complex64::default(), Complex64::default(), 0.0));
    }
    let k = (delta + 2.0 * gap_a) / (2.0 * gamma);
    let alpha = 1.0 / (4.0 * gamma * gamma);
    let numerator = |s: f64| Complex64::new(0.0, k * s).exp() * (-alpha * s * s).exp();

    let parts = if pair.dz.is_some() { 2.0 } else { 1.0 };
    let int_tol = tol / (parts * prefactor);
    let mut panel = 1.0f64.min(gamma);
    if k > 0.0 {
        panel = panel.min(2.0 * PI / k);
    }
    if det.omega() > 0.0 {
        panel = panel.min(PI / det.omega());
    }
    let opts = QuadOptions::absolute(int_tol).with_panel_width(panel);
    let scan_step = 0.1f64.min(panel);

    let one = |image: bool| -> Result<(Complex64, f64)> {
        let den = Denominator::new(pair, image);
        let d = |s: f64| den.eval(s);
        let window = gaussian_cutoff(alpha, int_tol).max(den.root_bound() + 1.0);
        let bound = den.root_bound() + scan_step;
        let poles = poles_of_denominator(d, -bound, bound, scan_step)?;
        let r = real_line_pole_integral(numerator, d, &poles, |p| p.location.signum(), -window, window, &opts)?;
        if !r.converged {
            return Err(Error::Quadrature {
                what: "correlation integral",
                error_estimate: r.abs_error_estimate,
                tol: int_tol,
            });
        }
        Ok((r.value * prefactor, r.abs_error_estimate * prefactor))
    };
    let (c_free, e_free) = one(false)?;
    let (c_boundary, e_boundary) = match pair.dz {
        Some(_) => one(true)?,
        None => (Complex64::default(), 0.0),
    };
    Ok(CorrelationResult::assemble(c_free, c_boundary, e_free + e_boundary))
}

/// Correlation for any pair sharing the same angular velocity (radii and gaps may
/// differ). The integrand is even in `s` apart from the phase, so each term is
/// folded onto `s > 0`: a cosine principal value minus a sine half-residue.
pub fn correlation_s_only(pair: &PairConfig, tol: f64) -> Result<CorrelationResult> {
    check_tol(tol)?;
    if !pair.synchronous() {
        return Err(Error::Config(
            "s-only correlation needs equal angular velocities".into(),
        ));
    }
    let (a, b) = (&pair.det_a, &pair.det_b);
    let (ga, gb) = (a.gamma(), b.gamma());
    let (wa, wb) = (a.energy_gap(), b.energy_gap());
    let sigma2 = ga * ga + gb * gb;
    let prefactor = (2.0 * PI / sigma2).sqrt()
        * (-(ga * wb - gb * wa).powi(2) / (2.0 * sigma2)).exp()
        / (4.0 * PI * PI);
    if prefactor == 0.0 {
        return Ok(CorrelationResult::assemble(Complex64::default(), Complex64::default(), 0.0));
    }
    let k = (gb * wb + ga * wa) / sigma2;
    let alpha = 1.0 / (2.0 * sigma2);
    let envelope = |s: f64| (-alpha * s * s).exp();

    let parts = if pair.dz.is_some() { 2.0 } else { 1.0 };
    let int_tol = tol / (2.0 * parts * prefactor);
    let mut panel = 1.0f64.min(alpha.sqrt().recip());
    if k > 0.0 {
        panel = panel.min(2.0 * PI / k);
    }
    if a.omega() > 0.0 {
        panel = panel.min(PI / a.omega());
    }
    let opts = QuadOptions::absolute(int_tol).with_panel_width(panel);

    let one = |image: bool| -> Result<(f64, f64)> {
        let den = Denominator::new(pair, image);
        let root = den.positive_root()?;
        let window = gaussian_cutoff(alpha, int_tol);
        let f = |s: f64| envelope(s) * (k * s).cos();
        let d = |s: f64| den.eval(s);
        let (pv, pv_err) = if root < window {
            let r = principal_value_integral(f, d, root, 0.0, window, &opts)?;
            (r.value, r.abs_error_estimate)
        } else {
            let r = integrate_with(|s| f(s) / d(s), 0.0, window, &[], &opts);
            (r.value, r.abs_error_estimate)
        };
        let residue = PI * envelope(root) * (k * root).sin() / den.slope(root);
        let value = 2.0 * (pv - residue);
        Ok((value * prefactor, 2.0 * pv_err * prefactor))
    };
    let (c_free, e_free) = one(false)?;
    let (c_boundary, e_boundary) = match pair.dz {
        Some(_) => one(true)?,
        None => (0.0, 0.0),
    };
    Ok(CorrelationResult::assemble(
        Complex64::new(c_free, 0.0),
        Complex64::new(c_boundary, 0.0),
        e_free + e_boundary,
    ))
}

/// Production correlation: the reduced single integral whenever the pair is
/// synchronous, otherwise the extrapolated double integral.
pub fn correlation(pair: &PairConfig, tol: f64) -> Result<CorrelationResult> {
    if pair.equal_kinematics {
        correlation_equal(pair, tol)
    } else if pair.synchronous() {
        correlation_s_only(pair, tol)
    } else {
        let c = correlation_general(pair, &crate::response::DEFAULT_EPSILONS, tol)?;
        Ok(CorrelationResult {
            c_total: c.value,
            c_free: c.value,
            c_boundary: Complex64::default(),
            error_estimate: c.error_estimate,
        })
    }
}

/// Definition-level correlation: the double integral over coordinate times
/// `t = u` (detector B) and `t' = u - s` (detector A) of the switched, phased
/// Wightman function, evaluated at each regulator and extrapolated to zero.
/// Valid for arbitrary kinematics. For unequal orbits the free/mirror split is
/// not reported separately.
pub fn correlation_general(
    pair: &PairConfig,
    epsilons: &[f64],
    tol: f64,
) -> Result<Extrapolated> {
    check_tol(tol)?;
    let (a, b) = (&pair.det_a, &pair.det_b);
    let (ga, gb) = (a.gamma(), b.gamma());
    let (wa, wb) = (a.energy_gap(), b.energy_gap());
    let (za, zb) = pair.heights();
    let u_window = gaussian_cutoff(1.0 / (2.0 * gb * gb), tol);
    let v_window = gaussian_cutoff(1.0 / (2.0 * ga * ga), tol);
    let norm = 1.0 / (ga * gb);
    let inner_opts = QuadOptions {
        abs_tol: 0.1 * tol / (2.0 * u_window),
        rel_tol: 1e-11,
        max_subdivisions: 50_000,
        max_panel_width: Some(0.1),
    };
    let outer_opts = QuadOptions {
        abs_tol: tol,
        rel_tol: 0.0,
        max_subdivisions: 2_000,
        max_panel_width: Some(0.5 * ga.min(gb)),
    };

    let mut samples = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut inner_failed = false;
        let failed = std::cell::Cell::new(false);
        let outer = |u: f64| {
            let pb = trajectory_point_at_time(b, zb, u);
            let weight_b = Complex64::new(-u * u / (2.0 * gb * gb), u * wb / gb).exp();
            let r = integrate_with(
                |s: f64| {
                    let t = u - s;
                    let pa = trajectory_point_at_time(a, za, t);
                    let w = match pair.dz {
                        Some(_) => wightman_boundary(&pa, &pb, eps),
                        None => wightman_free(&pa, &pb, eps),
                    };
                    w * Complex64::new(-t * t / (2.0 * ga * ga), -t * wa / ga).exp()
                },
                u - v_window,
                u + v_window,
                &[u],
                &inner_opts,
            );
            if !r.converged {
                failed.set(true);
            }
            r.value * weight_b * norm
        };
        let r = integrate_with(outer, -u_window, u_window, &[], &outer_opts);
        inner_failed |= failed.get();
        if !r.converged || inner_failed {
            return Err(Error::Quadrature {
                what: "correlation oracle",
                error_estimate: r.abs_error_estimate,
                tol,
            });
        }
        samples.push((eps, r.value));
    }
    let lim = epsilon_extrapolate(&samples)?;
    if !lim.monotone {
        return Err(Error::Extrapolation(
            "correlation oracle did not converge monotonically in epsilon".into(),
        ));
    }
    Ok(lim)
}

/// Reduced correlation at finite regulator: the same single integrals as
/// [`correlation_equal`], with `(s + i eps)^2` kept in the denominators, evaluated
/// for each `eps` and extrapolated to zero. An independent check of the
/// principal-value/half-residue split.
pub fn correlation_equal_regularized(
    pair: &PairConfig,
    epsilons: &[f64],
    tol: f64,
) -> Result<CorrelationResult> {
    check_tol(tol)?;
    if !pair.equal_kinematics {
        return Err(Error::Config(
            "reduced correlation needs equal acceleration and radius".into(),
        ));
    }
    let det = &pair.det_a;
    let (gap_a, gap_b) = (det.energy_gap(), pair.det_b.energy_gap());
    let gamma = det.gamma();
    let delta = gap_b - gap_a;
    let prefactor = (-0.25 * delta * delta).exp() / (4.0 * PI.powf(1.5) * gamma);
    let k = (delta + 2.0 * gap_a) / (2.0 * gamma);
    let alpha = 1.0 / (4.0 * gamma * gamma);
    let int_tol = tol / (2.0 * prefactor.max(f64::MIN_POSITIVE));
    let opts = QuadOptions {
        abs_tol: int_tol,
        rel_tol: 0.0,
        max_subdivisions: 100_000,
        max_panel_width: Some(0.25),
    };

    let one = |image: bool| -> Result<(Complex64, f64)> {
        let den = Denominator::new(pair, image);
        let root = den.positive_root()?;
        let window = gaussian_cutoff(alpha, int_tol).max(root + 1.0);
        let mut samples = Vec::with_capacity(epsilons.len());
        for &eps in epsilons {
            let integrand = |s: f64| {
                let f = Complex64::new(den.eval(s) + eps * eps, -2.0 * eps * s);
                Complex64::new(-alpha * s * s, k * s).exp() / f
            };
            let r = integrate_with(integrand, -window, window, &[-root, 0.0, root], &opts);
            if !r.converged {
                return Err(Error::Quadrature {
                    what: "regularised correlation",
                    error_estimate: r.abs_error_estimate,
                    tol: int_tol,
                });
            }
            samples.push((eps, r.value));
        }
        let lim = epsilon_extrapolate(&samples)?;
        Ok((lim.value * prefactor, lim.error_estimate * prefactor))
    };
    let (c_free, e_free) = one(false)?;
    let (c_boundary, e_boundary) = match pair.dz {
        Some(_) => one(true)?,
        None => (Complex64::default(), 0.0),
    };
    Ok(CorrelationResult::assemble(c_free, c_boundary, e_free + e_boundary))
}
