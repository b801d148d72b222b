//! Quadrature, principal values, real-axis pole handling, epsilon extrapolation
//! and bracketed root finding.
//!
//! Everything here is a pure function of its inputs. Integrand callbacks must be
//! free of side effects so that the routines can run inside data-parallel sweeps.

mod extrapolate;
mod pole;
mod quadrature;
mod roots;

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub use extrapolate::{epsilon_extrapolate, Extrapolated};
pub use pole::{
    poles_of_denominator, principal_value_integral, real_line_pole_integral, Pole, PoleSet,
    TANGENTIAL_SLOPE,
};
pub use quadrature::{
    gaussian_cutoff, integrate_adaptive, integrate_semiinfinite_gaussian,
    integrate_semiinfinite_gaussian_with, integrate_with, QuadOptions, QuadratureResult,
};
pub use roots::{find_root_bracketed, ROOT_TOL};

/// Default absolute tolerance for inner quadratures.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Values an integrand may return: real or complex.
pub trait QuadValue:
    Copy + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}
