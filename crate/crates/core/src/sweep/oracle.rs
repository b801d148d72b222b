//! Cross-checks of the reduced single-integral forms against the
//! double-integral oracles.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{correlation, correlation_general, CorrelationResult, PairConfig};
use crate::error::{Error, Result};
use crate::infomeasure::{response_with_error, HarvestPoint};
use crate::kinematics::CircularDetector;
use crate::response::{transition_probability_oracle, DEFAULT_EPSILONS};

/// Relative deviation above which a point fails.
pub const ORACLE_THRESHOLD: f64 = 1e-3;

/// The production evaluation path being checked. Swappable so that the suite
/// itself can be tested against a deliberately broken model.
pub trait PipelineModel: Sync {
    fn response(&self, det: &CircularDetector, dz: Option<f64>, tol: f64) -> Result<f64>;
    fn correlation(&self, pair: &PairConfig, tol: f64) -> Result<CorrelationResult>;
}

/// The library's own reduced forms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReducedModel;

impl PipelineModel for ReducedModel {
    fn response(&self, det: &CircularDetector, dz: Option<f64>, tol: f64) -> Result<f64> {
        Ok(response_with_error(det, dz, tol)?.0)
    }
    fn correlation(&self, pair: &PairConfig, tol: f64) -> Result<CorrelationResult> {
        correlation(pair, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseGrid {
    pub accels: Vec<f64>,
    pub radii: Vec<f64>,
    /// Ignored in free space.
    #[serde(default)]
    pub boundary_distances: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationPoint {
    pub accel: f64,
    pub radius: f64,
    #[serde(default)]
    pub boundary_distance: Option<f64>,
    pub sep: f64,
    #[serde(default)]
    pub gap_ratio: f64,
}

fn default_threshold() -> f64 {
    ORACLE_THRESHOLD
}
fn default_tolerance() -> f64 {
    1e-9
}

/// Points to check. Response points are the Cartesian product of the listed axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleGrid {
    pub gap: f64,
    pub response: Option<ResponseGrid>,
    #[serde(default)]
    pub correlation: Vec<CorrelationPoint>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub free_space: bool,
}

impl OracleGrid {
    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if !(g.threshold > 0.0 && g.tolerance > 0.0) {
            return Err(Error::Config("threshold and tolerance must be positive".into()));
        }
        Ok(g)
    }

    /// 27 response points over `a in {0.1, 1, 5}`, `R in {0.02, 1, 10}`,
    /// `dz in {0.1, 1, 5}` at gap 0.1, plus 12 correlation points covering the
    /// separation sweeps near the mirror.
    pub fn standard() -> Self {
        let mut correlation = Vec::new();
        for &(accel, radius) in &[(0.1, 0.02), (1.0, 0.02), (5.0, 0.02), (0.1, 10.0), (1.0, 10.0), (5.0, 10.0)] {
            for &(sep, gap_ratio) in &[(0.5, 0.0), (3.0, 2.0)] {
                correlation.push(CorrelationPoint {
                    accel,
                    radius,
                    boundary_distance: Some(0.1),
                    sep,
                    gap_ratio,
                });
            }
        }
        Self {
            gap: 0.1,
            response: Some(ResponseGrid {
                accels: vec![0.1, 1.0, 5.0],
                radii: vec![0.02, 1.0, 10.0],
                boundary_distances: vec![0.1, 1.0, 5.0],
            }),
            correlation,
            threshold: ORACLE_THRESHOLD,
            tolerance: 1e-9,
            free_space: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Response,
    Correlation,
}

/// One compared point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub kind: CheckKind,
    pub accel: f64,
    pub radius: f64,
    pub boundary_distance: Option<f64>,
    pub sep: Option<f64>,
    pub gap_ratio: Option<f64>,
    pub reduced: Complex64,
    /// Mirror part of the reduced correlation (zero in free space).
    pub reduced_boundary: Option<Complex64>,
    pub oracle: Complex64,
    pub oracle_error: f64,
    pub deviation: f64,
    pub passed: bool,
    /// Set when either side failed to evaluate.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub threshold: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub checks: Vec<OracleCheck>,
}

fn relative(reduced: Complex64, oracle: Complex64) -> f64 {
    let diff = (reduced - oracle).norm();
    let scale = oracle.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

enum Job {
    Response { accel: f64, radius: f64, dz: Option<f64> },
    Correlation(CorrelationPoint),
}

fn run_job<M: PipelineModel>(grid: &OracleGrid, model: &M, job: &Job) -> OracleCheck {
    let tol = grid.tolerance;
    let mut check = match *job {
        Job::Response { accel, radius, dz } => OracleCheck {
            kind: CheckKind::Response,
            accel,
            radius,
            boundary_distance: dz,
            sep: None,
            gap_ratio: None,
            reduced: Complex64::default(),
            reduced_boundary: None,
            oracle: Complex64::default(),
            oracle_error: 0.0,
            deviation: f64::INFINITY,
            passed: false,
            error: None,
        },
        Job::Correlation(p) => OracleCheck {
            kind: CheckKind::Correlation,
            accel: p.accel,
            radius: p.radius,
            boundary_distance: if grid.free_space { None } else { p.boundary_distance },
            sep: Some(p.sep),
            gap_ratio: Some(p.gap_ratio),
            reduced: Complex64::default(),
            reduced_boundary: None,
            oracle: Complex64::default(),
            oracle_error: 0.0,
            deviation: f64::INFINITY,
            passed: false,
            error: None,
        },
    };
    let outcome: Result<()> = (|| {
        match job {
            Job::Response { .. } => {
                let det = CircularDetector::new(grid.gap, check.accel, check.radius)?;
                let dz = check.boundary_distance;
                check.reduced = Complex64::new(model.response(&det, dz, tol)?, 0.0);
                let o = transition_probability_oracle(&det, dz, &DEFAULT_EPSILONS, tol)?;
                check.oracle = o.value;
                check.oracle_error = o.error_estimate;
            }
            Job::Correlation(p) => {
                let a = CircularDetector::new(grid.gap, p.accel, p.radius)?;
                let b = a.with_gap(grid.gap * (1.0 + p.gap_ratio))?;
                let pair = PairConfig::new(a, b, check.boundary_distance, p.sep)?;
                let c = model.correlation(&pair, tol * 1e-2)?;
                check.reduced = c.c_total;
                check.reduced_boundary = Some(c.c_boundary);
                let o = correlation_general(&pair, &DEFAULT_EPSILONS, tol)?;
                check.oracle = o.value;
                check.oracle_error = o.error_estimate;
            }
        }
        Ok(())
    })();
    match outcome {
        Ok(()) => {
            check.deviation = relative(check.reduced, check.oracle);
            check.passed = check.deviation <= grid.threshold;
        }
        Err(e) => check.error = Some(e.to_string()),
    }
    check
}

/// Runs every grid point through the library's reduced forms and the oracles.
pub fn run_oracle_suite(grid: &OracleGrid) -> OracleReport {
    run_oracle_suite_with(grid, &ReducedModel)
}

/// As [`run_oracle_suite`] with a substitute production model.
pub fn run_oracle_suite_with<M: PipelineModel>(grid: &OracleGrid, model: &M) -> OracleReport {
    let mut jobs = Vec::new();
    if let Some(r) = &grid.response {
        let dzs: Vec<Option<f64>> = if grid.free_space {
            vec![None]
        } else {
            r.boundary_distances.iter().map(|&d| Some(d)).collect()
        };
        for &accel in &r.accels {
            for &radius in &r.radii {
                for &dz in &dzs {
                    jobs.push(Job::Response { accel, radius, dz });
                }
            }
        }
    }
    jobs.extend(grid.correlation.iter().map(|&p| Job::Correlation(p)));
    let checks: Vec<OracleCheck> = jobs.par_iter().map(|j| run_job(grid, model, j)).collect();
    let max_deviation = checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
    OracleReport {
        threshold: grid.threshold,
        max_deviation,
        passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Largest relative deviation of `P_A`, `P_B` and `C` at a sweep point from the oracles.
pub(crate) fn point_deviation(pair: &PairConfig, h: &HarvestPoint, tol: f64) -> Result<f64> {
    let (za, zb) = pair.heights();
    let (za, zb) = match pair.dz() {
        Some(_) => (Some(za), Some(zb)),
        None => (None, None),
    };
    let pa = transition_probability_oracle(pair.det_a(), za, &DEFAULT_EPSILONS, tol)?;
    let pb = transition_probability_oracle(pair.det_b(), zb, &DEFAULT_EPSILONS, tol)?;
    let c = correlation_general(pair, &DEFAULT_EPSILONS, tol)?;
    Ok(relative(Complex64::new(h.p_a, 0.0), pa.value)
        .max(relative(Complex64::new(h.p_b, 0.0), pb.value))
        .max(relative(h.correlation.c_total, c.value)))
}
