//! Leading-order density matrix of the detector pair and its mutual information.
//!
//! All quantities are in units of `lambda^2`. Because `L+ + L- = P_A + P_B`, the
//! logarithms of `lambda^2` cancel and the mutual information computed from the
//! rescaled inputs is exactly `I / lambda^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::{correlation, CorrelationResult, PairConfig};
use crate::error::{domain, Error, Result};
use crate::kinematics::CircularDetector;
use crate::response::{
    transition_probability, transition_probability_free_with_error,
    transition_probability_oracle, DEFAULT_EPSILONS,
};

/// Tolerated negative positivity slack `P_A P_B - |C|^2` (quadrature noise).
pub const SLACK_TOLERANCE: f64 = 1e-9;

/// Negative mutual information smaller than this in magnitude is rounding noise.
pub const NEGATIVE_MI_CLIP: f64 = 1e-14;

/// `lambda^2 (P_A + P_B)` above which the second-order truncation is suspect.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// Marks that the double-excitation coherence `X` is not computed: it does not
/// enter the mutual information at this order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct XOmitted;

/// Single-excitation block `[[P_B, C], [C*, P_A]]` plus the ground population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBlock {
    pub p_a: f64,
    pub p_b: f64,
    pub c: Complex64,
    pub x_omitted: XOmitted,
    /// `P_A P_B - |C|^2`.
    pub positivity_slack: f64,
    /// Slack below `-SLACK_TOLERANCE`.
    pub positivity_violated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MIResult {
    pub l_plus: f64,
    pub l_minus: f64,
    pub mutual_info: f64,
    pub positivity_slack: f64,
}

/// Builds the block and records whether positivity holds.
pub fn assemble_density_block(p_a: f64, p_b: f64, c: Complex64) -> Result<DensityBlock> {
    for (name, p) in [("p_a", p_a), ("p_b", p_b)] {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(domain(name, p, "transition probability must be finite and non-negative"));
        }
    }
    if !(c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::InvalidBlock("correlation is not finite".into()));
    }
    let positivity_slack = p_a * p_b - c.norm_sqr();
    Ok(DensityBlock {
        p_a,
        p_b,
        c,
        x_omitted: XOmitted,
        positivity_slack,
        positivity_violated: positivity_slack < -SLACK_TOLERANCE,
    })
}

/// `I = L+ ln L+ + L- ln L- - P_A ln P_A - P_B ln P_B`.
///
/// Written as `delta ln(P_hi/P_lo) + L+ ln(1 + delta/P_hi) + L- ln(1 - delta/P_lo)`
/// with `delta = L+ - P_hi = P_lo - L-`, which keeps full relative accuracy when
/// `|C|` is small. A slightly negative slack (within tolerance) is treated as zero.
pub fn mutual_information(block: &DensityBlock) -> Result<MIResult> {
    if block.positivity_violated {
        return Err(Error::InvalidBlock(format!(
            "positivity slack {} below -{SLACK_TOLERANCE}",
            block.positivity_slack
        )));
    }
    let (p_hi, p_lo) = if block.p_a >= block.p_b {
        (block.p_a, block.p_b)
    } else {
        (block.p_b, block.p_a)
    };
    let c2 = block.c.norm_sqr();
    let gap = p_hi - p_lo;
    let root = gap.hypot(2.0 * c2.sqrt());
    let l_plus = 0.5 * (p_hi + p_lo + root);
    let slack = block.positivity_slack;
    if c2 == 0.0 || l_plus == 0.0 {
        return Ok(MIResult {
            l_plus: p_hi,
            l_minus: p_lo,
            mutual_info: 0.0,
            positivity_slack: slack,
        });
    }
    let (l_plus, l_minus, delta) = if slack > 0.0 {
        (l_plus, slack / l_plus, (2.0 * c2 / (root + gap)).min(p_lo))
    } else {
        (p_hi + p_lo, 0.0, p_lo)
    };
    let mut mi = l_plus * (delta / p_hi).ln_1p();
    if delta > 0.0 && p_lo > 0.0 {
        mi += delta * (p_hi / p_lo).ln();
    }
    if l_minus > 0.0 {
        mi += l_minus * (-delta / p_lo).ln_1p();
    }
    if mi < 0.0 {
        if mi < -NEGATIVE_MI_CLIP {
            return Err(Error::NegativeMutualInformation(mi));
        }
        mi = 0.0;
    }
    Ok(MIResult {
        l_plus,
        l_minus,
        mutual_info: mi,
        positivity_slack: slack,
    })
}

/// Everything evaluated at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvestPoint {
    pub p_a: f64,
    pub p_b: f64,
    pub correlation: CorrelationResult,
    pub block: DensityBlock,
    pub mi: MIResult,
    /// Sum of the absolute error estimates of `P_A`, `P_B` and `C`.
    pub error_estimate: f64,
    pub warnings: Vec<String>,
}

/// Transition probability of one detector at height `z` (`None` = no mirror) with
/// its error estimate. A static detector next to the mirror has no reduced form
/// and goes through the double-integral oracle.
pub fn response_with_error(det: &CircularDetector, z: Option<f64>, tol: f64) -> Result<(f64, f64)> {
    match z {
        None => transition_probability_free_with_error(det, tol),
        Some(z) if det.is_static() => {
            let r = transition_probability_oracle(det, Some(z), &DEFAULT_EPSILONS, tol)?;
            Ok((r.value.re, r.error_estimate))
        }
        Some(z) => {
            let b = transition_probability(det, z, tol)?;
            Ok((b.total, b.error_estimate))
        }
    }
}

/// End-to-end evaluation at unit coupling. Detector A sits at `dz`, detector B at `dz + L`.
pub fn mutual_information_point(pair: &PairConfig, tol: f64) -> Result<HarvestPoint> {
    mutual_information_point_with(pair, tol, 1.0)
}

/// As [`mutual_information_point`], with the perturbative guard evaluated at
/// coupling `lambda`.
pub fn mutual_information_point_with(
    pair: &PairConfig,
    tol: f64,
    coupling: f64,
) -> Result<HarvestPoint> {
    let (za, zb) = pair.heights();
    let (za, zb) = match pair.dz() {
        Some(_) => (Some(za), Some(zb)),
        None => (None, None),
    };
    let (p_a, e_a) = response_with_error(pair.det_a(), za, tol)?;
    let (p_b, e_b) = response_with_error(pair.det_b(), zb, tol)?;
    let corr = correlation(pair, tol)?;
    let block = assemble_density_block(p_a, p_b, corr.c_total)?;
    let mi = mutual_information(&block)?;
    let mut warnings = Vec::new();
    if coupling * coupling * (p_a + p_b) > PERTURBATIVE_LIMIT {
        warnings.push("perturbative".to_string());
    }
    if block.positivity_slack < 0.0 {
        warnings.push("slack".to_string());
    }
    Ok(HarvestPoint {
        p_a,
        p_b,
        correlation: corr,
        block,
        mi,
        error_estimate: e_a + e_b + corr.error_estimate,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(p_a: f64, p_b: f64, c: Complex64) -> MIResult {
        mutual_information(&assemble_density_block(p_a, p_b, c).unwrap()).unwrap()
    }

    fn naive(p_a: f64, p_b: f64, c: f64) -> f64 {
        let root = ((p_a - p_b).powi(2) + 4.0 * c * c).sqrt();
        let lp = 0.5 * (p_a + p_b + root);
        let lm = 0.5 * (p_a + p_b - root);
        let xlx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
        xlx(lp) + xlx(lm) - xlx(p_a) - xlx(p_b)
    }

    #[test]
    fn boundary_block_is_valid() {
        let b = assemble_density_block(0.01, 0.01, Complex64::new(0.01, 0.0)).unwrap();
        assert!(b.positivity_slack.abs() < 1e-18);
        assert!(!b.positivity_violated);
        let bad = assemble_density_block(0.01, 0.01, Complex64::new(0.02, 0.0)).unwrap();
        assert!(bad.positivity_violated);
        assert!(mutual_information(&bad).is_err());
        assert!(assemble_density_block(-1e-3, 0.01, Complex64::default()).is_err());
    }

    #[test]
    fn zero_correlation_gives_zero() {
        let r = mi(0.02, 0.01, Complex64::default());
        assert_eq!(r.mutual_info, 0.0);
        assert_eq!((r.l_plus, r.l_minus), (0.02, 0.01));
    }

    #[test]
    fn saturated_symmetric_block() {
        let r = mi(0.01, 0.01, Complex64::new(0.0, 0.01));
        assert!((r.mutual_info - 0.02 * 2f64.ln()).abs() < 1e-12);
        assert!((r.l_plus - 0.02).abs() < 1e-15);
        assert_eq!(r.l_minus, 0.0);
    }

    #[test]
    fn matches_direct_formula() {
        for &(a, b, c) in &[(0.02, 0.01, 0.005), (0.3, 0.1, 0.1), (0.05, 0.05, 0.01)] {
            let r = mi(a, b, Complex64::new(c, 0.0));
            assert!((r.mutual_info - naive(a, b, c)).abs() < 1e-14);
        }
    }

    #[test]
    fn small_correlation_keeps_precision() {
        // leading term |C|^2 ln(P_A/P_B)/(P_A - P_B) for P_A != P_B
        let (a, b, c) = (0.02, 0.01, 1e-9f64);
        let r = mi(a, b, Complex64::new(c, 0.0));
        let lead = c * c * (a / b).ln() / (a - b);
        assert!((r.mutual_info / lead - 1.0).abs() < 1e-6);
        // equal P: I ~ |C|^2 / P
        let r = mi(0.01, 0.01, Complex64::new(c, 0.0));
        assert!((r.mutual_info / (c * c / 0.01) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tolerated_negative_slack() {
        let p = 0.01;
        let c = (p * p + 5e-10f64).sqrt();
        let r = mi(p, p, Complex64::new(c, 0.0));
        assert_eq!(r.l_minus, 0.0);
        assert!((r.mutual_info - 2.0 * p * 2f64.ln()).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn symmetric_and_phase_blind(
            p_a in 1e-6f64..0.5,
            p_b in 1e-6f64..0.5,
            frac in 0.0f64..1.0,
            phase in 0.0f64..std::f64::consts::TAU,
        ) {
            let c = frac * (p_a * p_b).sqrt();
            let base = mi(p_a, p_b, Complex64::new(c, 0.0));
            let swapped = mi(p_b, p_a, Complex64::new(c, 0.0));
            let rotated = mi(p_a, p_b, Complex64::from_polar(c, phase));
            prop_assert!(base.mutual_info >= 0.0);
            prop_assert!((base.mutual_info - swapped.mutual_info).abs() <= 1e-15 * (1.0 + base.mutual_info));
            prop_assert!((base.mutual_info - rotated.mutual_info).abs() <= 1e-13 * base.mutual_info + 1e-17);
            prop_assert!((base.l_plus + base.l_minus - p_a - p_b).abs() <= 1e-12);
            prop_assert!(base.l_plus >= base.l_minus && base.l_minus >= 0.0);
        }

        #[test]
        fn increases_with_correlation(
            p_a in 1e-6f64..0.5,
            p_b in 1e-6f64..0.5,
            frac in 0.01f64..0.99,
        ) {
            let s = (p_a * p_b).sqrt();
            let lo = mi(p_a, p_b, Complex64::new(frac * s, 0.0)).mutual_info;
            let hi = mi(p_a, p_b, Complex64::new((frac + 0.01) * s, 0.0)).mutual_info;
            prop_assert!(hi > lo);
        }
    }
}
