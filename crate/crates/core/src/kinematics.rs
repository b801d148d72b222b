//! Circular-motion kinematics in units of the switching width.
//!
//! A detector is specified by its gap `Omega sigma`, proper acceleration
//! `a sigma` and orbit radius `R / sigma`. Angular velocity, speed and Lorentz
//! factor are always derived from `(a, R)` so that `a = gamma^2 omega^2 R` holds
//! by construction.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Angular velocity `omega sigma = sqrt(a / (R (1 + a R)))` of a circular orbit.
pub fn omega_from_accel_radius(accel: f64, radius: f64) -> Result<f64> {
    check_accel_radius(accel, radius)?;
    Ok((accel / (radius * (1.0 + accel * radius))).sqrt())
}

fn check_accel_radius(accel: f64, radius: f64) -> Result<()> {
    if !(accel >= 0.0 && accel.is_finite()) {
        return Err(domain("accel", accel, "must be finite and non-negative"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(domain("radius", radius, "must be finite and positive"));
    }
    Ok(())
}

/// One detector on a circular orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorParams", into = "DetectorParams")]
pub struct CircularDetector {
    energy_gap: f64,
    accel: f64,
    radius: f64,
    omega: f64,
    speed: f64,
    gamma: f64,
    one_minus_v2: f64,
}

#[derive(Serialize, Deserialize)]
struct DetectorParams {
    energy_gap: f64,
    accel: f64,
    radius: f64,
}

impl TryFrom<DetectorParams> for CircularDetector {
    type Error = crate::Error;
    fn try_from(p: DetectorParams) -> Result<Self> {
        Self::new(p.energy_gap, p.accel, p.radius)
    }
}

impl From<CircularDetector> for DetectorParams {
    fn from(d: CircularDetector) -> Self {
        Self {
            energy_gap: d.energy_gap,
            accel: d.accel,
            radius: d.radius,
        }
    }
}

impl CircularDetector {
    pub fn new(energy_gap: f64, accel: f64, radius: f64) -> Result<Self> {
        if !(energy_gap >= 0.0 && energy_gap.is_finite()) {
            return Err(domain("energy_gap", energy_gap, "must be finite and non-negative"));
        }
        let omega = omega_from_accel_radius(accel, radius)?;
        let ar = accel * radius;
        // v^2 = aR / (1 + aR), 1 - v^2 = 1 / (1 + aR)
        Ok(Self {
            energy_gap,
            accel,
            radius,
            omega,
            speed: (ar / (1.0 + ar)).sqrt(),
            gamma: (1.0 + ar).sqrt(),
            one_minus_v2: 1.0 / (1.0 + ar),
        })
    }

    /// Same orbit, different gap.
    pub fn with_gap(&self, energy_gap: f64) -> Result<Self> {
        Self::new(energy_gap, self.accel, self.radius)
    }

    pub fn energy_gap(&self) -> f64 {
        self.energy_gap
    }
    pub fn accel(&self) -> f64 {
        self.accel
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn speed(&self) -> f64 {
        self.speed
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    /// `1 - v^2` without cancellation.
    pub fn one_minus_v2(&self) -> f64 {
        self.one_minus_v2
    }

    pub fn is_static(&self) -> bool {
        self.omega == 0.0
    }

    /// Orbit equality (acceleration and radius) to `1e-12` relative.
    pub fn same_orbit(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        close(self.accel, other.accel) && close(self.radius, other.radius)
    }
}

/// An event in Minkowski space, in units of `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Position at proper time `tau` of a detector orbiting the z axis at height `z_offset`.
pub fn trajectory_point(det: &CircularDetector, z_offset: f64, tau: f64) -> SpacetimePoint {
    let t = tau * det.gamma;
    let (sin, cos) = (det.omega * t).sin_cos();
    SpacetimePoint {
        t,
        x: det.radius * cos,
        y: det.radius * sin,
        z: z_offset,
    }
}

/// Position at coordinate time `t`; the same worldline as [`trajectory_point`].
pub fn trajectory_point_at_time(det: &CircularDetector, z_offset: f64, t: f64) -> SpacetimePoint {
    let (sin, cos) = (det.omega * t).sin_cos();
    SpacetimePoint {
        t,
        x: det.radius * cos,
        y: det.radius * sin,
        z: z_offset,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::find_root_bracketed;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn unit_accel_unit_radius() {
        let w = omega_from_accel_radius(1.0, 1.0).unwrap();
        assert!((w - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn static_limit() {
        let d = CircularDetector::new(0.1, 0.0, 3.0).unwrap();
        assert_eq!(d.omega(), 0.0);
        assert_eq!(d.speed(), 0.0);
        assert_eq!(d.gamma(), 1.0);
        assert!(d.is_static());
    }

    #[test]
    fn closed_form_chains() {
        let d = CircularDetector::new(0.1, 5.0, 0.02).unwrap();
        assert!((d.speed().powi(2) - 0.1 / 1.1).abs() < 1e-15);
        assert!((d.gamma() - 1.048_808_848_170_151_5).abs() < 1e-12);

        let d = CircularDetector::new(0.1, 0.1, 10.0).unwrap();
        assert!((d.speed().powi(2) - 0.5).abs() < 1e-15);
        assert!((d.gamma() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inversion_oracle_recovers_omega() {
        // Invert a(omega) = omega^2 R / (1 - omega^2 R^2) on omega in (0, 1/R).
        let (accel, radius) = (30.0, 0.02);
        let d = CircularDetector::new(0.1, accel, radius).unwrap();
        let omega = find_root_bracketed(
            |w| w * w * radius / (1.0 - w * w * radius * radius) - accel,
            0.0,
            (1.0 - 1e-12) / radius,
        )
        .unwrap();
        assert!(rel(d.omega(), omega) < 1e-10);
        assert!((d.omega() - 30.618_621_784_789_73).abs() < 1e-9);
        let v = omega * radius;
        assert!(rel(d.speed(), v) < 1e-10);
        assert!(rel(d.gamma(), 1.0 / (1.0 - v * v).sqrt()) < 1e-10);
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(omega_from_accel_radius(1.0, 0.0).is_err());
        assert!(omega_from_accel_radius(1.0, -2.0).is_err());
        assert!(omega_from_accel_radius(-1.0, 2.0).is_err());
        assert!(CircularDetector::new(-0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn omega_curves_are_ordered_and_decreasing() {
        let radii: Vec<f64> = (1..=200).map(|k| 0.01 * k as f64).collect();
        let curves: Vec<Vec<f64>> = [1.0, 10.0, 500.0]
            .iter()
            .map(|&a| radii.iter().map(|&r| omega_from_accel_radius(a, r).unwrap()).collect())
            .collect();
        for c in &curves {
            assert!(c.windows(2).all(|w| w[1] < w[0]));
        }
        for ((x, y), z) in curves[0].iter().zip(&curves[1]).zip(&curves[2]) {
            assert!(x < y && y < z);
        }
    }

    #[test]
    fn trajectory_origin_and_period() {
        let d = CircularDetector::new(0.1, 1.0, 1.0).unwrap();
        let p0 = trajectory_point(&d, 0.7, 0.0);
        assert_eq!(
            p0,
            SpacetimePoint {
                t: 0.0,
                x: 1.0,
                y: 0.0,
                z: 0.7
            }
        );
        let period = 2.0 * PI / (d.omega() * d.gamma());
        let p1 = trajectory_point(&d, 0.7, period);
        assert!((p1.x - p0.x).abs() < 1e-12 && (p1.y - p0.y).abs() < 1e-12);
        assert!((p1.t - 2.0 * PI / d.omega()).abs() < 1e-12);
    }

    #[test]
    fn interior_trajectory_sample() {
        let d = CircularDetector::new(0.1, 1.0, 1.0).unwrap();
        let p = trajectory_point(&d, 0.0, 0.3);
        // gamma = sqrt(2), omega = 1/sqrt(2): t = 0.3 sqrt(2), phase = 0.3.
        assert!((p.t - 0.3 * 2f64.sqrt()).abs() < 1e-15);
        assert!((p.x - 0.3f64.cos()).abs() < 1e-15);
        assert!((p.y - 0.3f64.sin()).abs() < 1e-15);
        assert!((p.x * p.x + p.y * p.y - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn kinematic_identities(accel in 0.0f64..1000.0, radius in 1e-3f64..100.0) {
            let d = CircularDetector::new(0.1, accel, radius).unwrap();
            prop_assert!(d.speed() < 1.0);
            prop_assert!((d.speed() - d.omega() * radius).abs() <= 1e-12 * d.speed().max(1e-300));
            // 1 - v^2 formed from v loses digits as v -> 1
            prop_assert!(rel(d.gamma(), 1.0 / (1.0 - d.speed().powi(2)).sqrt()) < 1e-15 / d.one_minus_v2());
            prop_assert!(rel(d.gamma(), 1.0 / d.one_minus_v2().sqrt()) < 1e-12);
            if accel > 0.0 {
                let back = d.gamma().powi(2) * d.omega().powi(2) * radius;
                prop_assert!(rel(back, accel) < 1e-10);
            }
        }

        #[test]
        fn omega_monotone(accel in 0.01f64..100.0, radius in 0.01f64..10.0) {
            let w = omega_from_accel_radius(accel, radius).unwrap();
            prop_assert!(omega_from_accel_radius(accel * 1.01, radius).unwrap() > w);
            prop_assert!(omega_from_accel_radius(accel, radius * 1.01).unwrap() < w);
        }

        #[test]
        fn trajectory_on_circle(tau in -20.0f64..20.0, accel in 0.0f64..50.0, radius in 0.01f64..10.0) {
            let d = CircularDetector::new(0.1, accel, radius).unwrap();
            let p = trajectory_point(&d, 1.5, tau);
            prop_assert!((p.x.hypot(p.y) - radius).abs() < 1e-12 * radius);
            prop_assert_eq!(p.z, 1.5);
            let h = 1e-4;
            let dt = (trajectory_point(&d, 1.5, tau + h).t - trajectory_point(&d, 1.5, tau - h).t) / (2.0 * h);
            prop_assert!((dt - d.gamma()).abs() < 1e-6);
        }
    }
}
