//! Vacuum Wightman function of a massless scalar, free and with a Dirichlet plane at `z = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::kinematics::SpacetimePoint;

fn interval(dt: f64, epsilon: f64, spatial2: f64) -> Complex64 {
    let shifted = Complex64::new(dt, -epsilon);
    shifted * shifted - spatial2
}

/// `W(p1, p2)` in free Minkowski space with regulator `epsilon > 0`.
pub fn wightman_free(p1: &SpacetimePoint, p2: &SpacetimePoint, epsilon: f64) -> Complex64 {
    let (dx, dy, dz) = (p1.x - p2.x, p1.y - p2.y, p1.z - p2.z);
    let direct = interval(p1.t - p2.t, epsilon, dx * dx + dy * dy + dz * dz);
    -direct.inv() / (4.0 * PI * PI)
}

/// `W(p1, p2)` with a perfectly reflecting plane at `z = 0`: the free term minus
/// its mirror image.
pub fn wightman_boundary(p1: &SpacetimePoint, p2: &SpacetimePoint, epsilon: f64) -> Complex64 {
    let (dx, dy) = (p1.x - p2.x, p1.y - p2.y);
    let transverse = dx * dx + dy * dy;
    let dz = p1.z - p2.z;
    let zs = p1.z + p2.z;
    let dt = p1.t - p2.t;
    let direct = interval(dt, epsilon, transverse + dz * dz);
    let image = interval(dt, epsilon, transverse + zs * zs);
    -(direct.inv() - image.inv()) / (4.0 * PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::epsilon_extrapolate;

    fn pt(t: f64, x: f64, y: f64, z: f64) -> SpacetimePoint {
        SpacetimePoint { t, x, y, z }
    }

    #[test]
    fn vanishes_on_the_mirror() {
        let w = wightman_boundary(&pt(0.3, 0.1, 0.2, 0.0), &pt(-0.4, 1.0, -0.5, 0.0), 1e-3);
        assert_eq!(w, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn spacelike_equal_time_is_positive() {
        let r = 1.7;
        let w = wightman_free(&pt(0.0, 0.0, 0.0, 0.0), &pt(0.0, r, 0.0, 0.0), 1e-9);
        let expected = 1.0 / (4.0 * PI * PI * r * r);
        assert!((w.re - expected).abs() < 1e-12);
        assert!(w.im.abs() < 1e-9);
    }

    #[test]
    fn image_term_reduces_far_from_mirror() {
        let (a, b) = (pt(0.2, 0.0, 0.0, 1e4), pt(0.0, 0.5, 0.0, 1e4 + 0.3));
        let free = wightman_free(&a, &b, 1e-3);
        let bounded = wightman_boundary(&a, &b, 1e-3);
        assert!((free - bounded).norm() < 1e-9);
    }

    #[test]
    fn near_light_cone_extrapolation_is_consistent() {
        // Timelike pair close to the light cone; the regulated values must
        // extrapolate to the unregulated real value.
        let (a, b) = (pt(1.05, 0.0, 0.0, 0.5), pt(0.0, 1.0, 0.0, 0.5));
        let exact = -1.0 / (4.0 * PI * PI * (1.05f64.powi(2) - 1.0));
        let coarse: Vec<_> = [1e-3, 5e-4, 2.5e-4]
            .iter()
            .map(|&e| (e, wightman_free(&a, &b, e)))
            .collect();
        let fine: Vec<_> = [5e-4, 2.5e-4, 1.25e-4]
            .iter()
            .map(|&e| (e, wightman_free(&a, &b, e)))
            .collect();
        let (c, f) = (
            epsilon_extrapolate(&coarse).unwrap(),
            epsilon_extrapolate(&fine).unwrap(),
        );
        // leading neglected term ~ (2 dt eps / (dt^2 - r^2))^3
        let (ce, fe) = ((c.value - exact).norm(), (f.value - exact).norm());
        assert!(ce < 1e-4 * exact.abs(), "{ce}");
        assert!(fe < ce / 4.0, "{fe} {ce}");
        assert!(c.error_estimate >= ce / 10.0);
    }
}
