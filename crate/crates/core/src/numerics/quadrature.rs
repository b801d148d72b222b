//! Globally adaptive Gauss-Kronrod (10/21) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::QuadValue;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// `true` only when `abs_error_estimate` met the requested tolerance.
    pub converged: bool,
}

impl<T: QuadValue> QuadratureResult<T> {
    pub(crate) fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub(crate) fn empty() -> Self {
        Self {
            value: T::zero(),
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    pub(crate) fn map_value<U>(self, f: impl FnOnce(T) -> U) -> QuadratureResult<U> {
        QuadratureResult {
            value: f(self.value),
            abs_error_estimate: self.abs_error_estimate,
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Initial panels are no wider than this.
    pub max_panel_width: Option<f64>,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn with_panel_width(mut self, width: f64) -> Self {
        self.max_panel_width = Some(width);
        self
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: super::DEFAULT_TOL,
            rel_tol: 0.0,
            max_subdivisions: 20_000,
            max_panel_width: None,
        }
    }
}

struct Segment<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
}

struct Ranked {
    error: f64,
    index: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

fn gauss_kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, lo: f64, hi: f64) -> (T, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [T::zero(); 21];
    fv[10] = f(center);
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[j] = f(center - dx);
        fv[20 - j] = f(center + dx);
    }

    let mut kronrod = fv[10] * WGK[10];
    let mut gauss = T::zero();
    let mut res_abs = fv[10].magnitude() * WGK[10];
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        kronrod = kronrod + pair * WGK[j];
        res_abs += WGK[j] * (fv[j].magnitude() + fv[20 - j].magnitude());
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fv[10] - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[j] - mean).magnitude() + (fv[20 - j] - mean).magnitude());
    }

    let h = half.abs();
    let res_abs = res_abs * h;
    let res_asc = res_asc * h;
    let mut err = (kronrod - gauss).magnitude() * h;
    // QUADPACK rescaling of the raw Gauss/Kronrod difference.
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !kronrod.is_finite_value() {
        err = f64::INFINITY;
    }
    (kronrod * half, err)
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`.
pub fn integrate_adaptive<T, F>(f: F, lo: f64, hi: f64, tol: f64) -> QuadratureResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_with(f, lo, hi, &[], &QuadOptions::absolute(tol))
}

/// Adaptive integration with initial breakpoints and explicit options.
///
/// Breakpoints outside `(lo, hi)` are ignored. The interval with the largest error
/// estimate is bisected until the summed estimate meets the target, the subdivision
/// budget runs out, or no interval can be split further in floating point.
pub fn integrate_with<T, F>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> QuadratureResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if lo == hi {
        return QuadratureResult::empty();
    }
    if hi < lo {
        let r = integrate_with(f, hi, lo, breakpoints, opts);
        return r.map_value(|v| v * -1.0);
    }

    let mut edges: Vec<f64> = vec![lo, hi];
    edges.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    if let Some(width) = opts.max_panel_width.filter(|w| *w > 0.0) {
        let mut refined = Vec::with_capacity(edges.len());
        for w in edges.windows(2) {
            let n = ((w[1] - w[0]) / width).ceil().clamp(1.0, 100_000.0) as usize;
            for k in 0..n {
                refined.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
            }
        }
        refined.push(hi);
        edges = refined;
    }

    let mut segments: Vec<Segment<T>> = Vec::with_capacity(edges.len() * 4);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total = T::zero();
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let (value, error) = gauss_kronrod(&f, w[0], w[1]);
        evaluations += 21;
        total = total + value;
        total_err += error;
        heap.push(Ranked {
            error,
            index: segments.len(),
        });
        segments.push(Segment {
            lo: w[0],
            hi: w[1],
            value,
            error,
        });
    }

    let mut splits = 0;
    while total_err > opts.target(total.magnitude()) && splits < opts.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let seg = &segments[worst.index];
        let (a, b) = (seg.lo, seg.hi);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            // Cannot split further; the segment stays as is.
            continue;
        }
        let (v1, e1) = gauss_kronrod(&f, a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, b);
        evaluations += 42;
        splits += 1;
        total = total - seg.value + v1 + v2;
        total_err += e1 + e2 - seg.error;

        segments[worst.index] = Segment {
            lo: a,
            hi: mid,
            value: v1,
            error: e1,
        };
        heap.push(Ranked {
            error: e1,
            index: worst.index,
        });
        heap.push(Ranked {
            error: e2,
            index: segments.len(),
        });
        segments.push(Segment {
            lo: mid,
            hi: b,
            value: v2,
            error: e2,
        });
    }

    // Resum in positional order so that the result does not depend on the
    // drift of the running totals.
    segments.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut value = T::zero();
    let mut error = 0.0;
    for s in &segments {
        value = value + s.value;
        error += s.error;
    }
    let converged = error.is_finite() && error <= opts.target(value.magnitude());
    QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
        converged,
    }
}

/// Cut-off beyond which `exp(-alpha x^2)` is negligible at tolerance `tol`.
///
/// Returns `sqrt(ln(1/t)/alpha) + 6/sqrt(alpha)` with `t = tol/10`.
pub fn gaussian_cutoff(alpha: f64, tol: f64) -> f64 {
    let t = (tol / 10.0).min(0.1);
    (t.recip().ln() / alpha).sqrt() + 6.0 / alpha.sqrt()
}

/// Integrates `f` over `[0, inf)` where `|f(x)|` is bounded by a Gaussian envelope
/// `exp(-alpha x^2)` times a slowly varying factor.
pub fn integrate_semiinfinite_gaussian<T, F>(f: F, alpha: f64, tol: f64) -> QuadratureResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let opts = QuadOptions::absolute(tol).with_panel_width(1.0 / alpha.sqrt());
    integrate_semiinfinite_gaussian_with(f, alpha, &opts)
}

/// As [`integrate_semiinfinite_gaussian`] with explicit options (the cut-off is
/// derived from `opts.abs_tol`).
pub fn integrate_semiinfinite_gaussian_with<T, F>(
    f: F,
    alpha: f64,
    opts: &QuadOptions,
) -> QuadratureResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let x_max = gaussian_cutoff(alpha, opts.abs_tol);
    let tail = f(x_max).magnitude() / (2.0 * alpha * x_max);
    let mut r = integrate_with(&f, 0.0, x_max, &[], opts);
    r.abs_error_estimate += tail;
    r.evaluations += 1;
    r.converged = r.abs_error_estimate <= opts.target(r.value.magnitude());
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    /// Composite Gauss-Legendre with many panels, used as a reference.
    fn reference<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
        // 5-point Gauss-Legendre.
        let x = [
            0.0,
            0.538_469_310_105_683_1,
            -0.538_469_310_105_683_1,
            0.906_179_845_938_664,
            -0.906_179_845_938_664,
        ];
        let w = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let h = (hi - lo) / panels as f64;
        (0..panels)
            .map(|k| {
                let c = lo + (k as f64 + 0.5) * h;
                x.iter()
                    .zip(w.iter())
                    .map(|(xi, wi)| wi * f(c + 0.5 * h * xi))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }

    #[test]
    fn polynomial() {
        let r = integrate_adaptive(|x: f64| x * x, 0.0, 1.0, 1e-12);
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = integrate_adaptive(|x: f64| x * x, 1.0, 0.0, 1e-12);
        assert!((r.value + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_half_line() {
        let r = integrate_semiinfinite_gaussian(|x: f64| (-x * x).exp(), 1.0, 1e-12);
        assert!(r.converged);
        assert!((r.value - PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_cosine_half_line() {
        let (alpha, beta) = (0.04, 2.0);
        let r = integrate_semiinfinite_gaussian(
            |x: f64| (-alpha * x * x).exp() * (beta * x).cos(),
            alpha,
            1e-12,
        );
        let exact = 0.5 * (PI / alpha).sqrt() * (-beta * beta / (4.0 * alpha)).exp();
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-11, "{} vs {}", r.value, exact);
    }

    #[test]
    fn damped_oscillation_matches_fine_reference() {
        let f = |x: f64| (-x * x / 4.0).exp() * (7.0 * x).cos();
        let reference = reference(f, 0.0, 20.0, 20_000);
        let r = integrate_adaptive(f, 0.0, 20.0, 1e-12);
        assert!(r.converged);
        assert!((r.value - reference).abs() < 1e-11);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate_adaptive(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            PI,
            1e-12,
        );
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            max_subdivisions: 3,
            ..QuadOptions::default()
        };
        let r = integrate_with(|x: f64| x.abs().sqrt().recip(), -1.0, 1.0, &[], &opts);
        assert!(!r.converged);
        assert!(r.abs_error_estimate > 1e-14);
    }

    type Case = (Box<dyn Fn(f64) -> f64>, f64, f64);

    #[test]
    fn error_estimates_are_honest() {
        let battery: Vec<Case> = vec![
            (Box::new(|x: f64| x.exp()), 0.0, 1.0),
            (Box::new(|x: f64| (-x * x).exp() * (5.0 * x).sin()), -3.0, 4.0),
            (Box::new(|x: f64| 1.0 / (1.0 + 25.0 * x * x)), -1.0, 1.0),
            (Box::new(|x: f64| x.sqrt()), 0.0, 1.0),
            (Box::new(|x: f64| (30.0 * x).cos() / (1.0 + x)), 0.0, 3.0),
        ];
        for (f, lo, hi) in &battery {
            for tol in [1e-4, 1e-6, 1e-8] {
                let coarse = integrate_adaptive(f, *lo, *hi, tol);
                let fine = integrate_adaptive(f, *lo, *hi, tol / 10.0);
                assert!(coarse.converged && fine.converged);
                assert!(
                    (coarse.value - fine.value).abs() <= coarse.abs_error_estimate,
                    "estimate {} not honest at tol {}",
                    coarse.abs_error_estimate,
                    tol
                );
            }
        }
    }
}
