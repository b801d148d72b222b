//! Parameter sweeps over one axis and a list of gap ratios, evaluated in parallel
//! with results in deterministic axis order.

mod oracle;
mod shape;
mod table;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::PairConfig;
use crate::error::{Error, Result};
use crate::infomeasure::mutual_information_point_with;
use crate::kinematics::CircularDetector;

pub use oracle::{
    run_oracle_suite, run_oracle_suite_with, CheckKind, CorrelationPoint, OracleCheck, OracleGrid,
    OracleReport, ResponseGrid, ORACLE_THRESHOLD,
    PipelineModel, ReducedModel,
};
pub use shape::{count_peaks, is_non_increasing, PEAK_PROMINENCE};
pub use table::{emit_table, write_table, TableFormat, COLUMNS};

/// Quantity swept along the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Sep,
    BoundaryDistance,
    Accel,
    Gap,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == n {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// Values held fixed; the swept one may be omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    /// Gap of detector A, `Omega_A sigma`.
    #[serde(default)]
    pub gap_a: Option<f64>,
    #[serde(default)]
    pub accel: Option<f64>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub boundary_distance: Option<f64>,
    #[serde(default)]
    pub sep: Option<f64>,
}

fn default_ratios() -> Vec<f64> {
    vec![0.0]
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_coupling() -> f64 {
    1.0
}

/// One sweep run. Detector B has gap `Omega_A (1 + ratio)` for each gap ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub fixed: FixedParams,
    pub axis: Axis,
    #[serde(default = "default_ratios")]
    pub gap_ratios: Vec<f64>,
    #[serde(default)]
    pub free_space: bool,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Recompute every point with the double-integral oracles and flag deviations.
    #[serde(default)]
    pub oracle_check: bool,
    /// Coupling `lambda` used only by the perturbative-load warning.
    #[serde(default = "default_coupling")]
    pub coupling: f64,
}

/// Inputs of one evaluated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointParams {
    pub gap_a: f64,
    pub gap_ratio: f64,
    pub gap_b: f64,
    pub accel: f64,
    pub radius: f64,
    /// `None` in free space.
    pub boundary_distance: Option<f64>,
    pub sep: f64,
}

/// Outputs of one evaluated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointValues {
    pub p_a: f64,
    pub p_b: f64,
    pub c: num_complex::Complex64,
    pub c1: num_complex::Complex64,
    pub c2: num_complex::Complex64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub mutual_info: f64,
    pub slack: f64,
    pub err: f64,
}

/// `ok`, `warn:<reason>[+<reason>]` or `fail:<reason>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Ok,
    Warn(Vec<String>),
    Fail(String),
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Status::Ok => write!(f, "ok"),
            Status::Warn(r) => write!(f, "warn:{}", r.join("+")),
            Status::Fail(r) => write!(f, "fail:{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: PointParams,
    /// Absent when the point failed.
    pub values: Option<PointValues>,
    pub status: Status,
}

impl SweepRow {
    pub fn is_failed(&self) -> bool {
        matches!(self.status, Status::Fail(_))
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn fixed_value(&self, param: AxisParam) -> Option<f64> {
        match param {
            AxisParam::Sep => self.fixed.sep,
            AxisParam::BoundaryDistance => self.fixed.boundary_distance,
            AxisParam::Accel => self.fixed.accel,
            AxisParam::Gap => self.fixed.gap_a,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let ax = &self.axis;
        if !(ax.min.is_finite() && ax.max.is_finite() && ax.min < ax.max) {
            return bad(format!("axis needs finite min < max (got {} .. {})", ax.min, ax.max));
        }
        if ax.points < 2 {
            return bad(format!("axis needs at least 2 points (got {})", ax.points));
        }
        if ax.spacing == Spacing::Log && !(ax.min > 0.0) {
            return bad("log spacing needs a positive minimum".into());
        }
        if self.free_space && ax.param == AxisParam::BoundaryDistance {
            return bad("cannot sweep the boundary distance in free space".into());
        }
        if self.gap_ratios.is_empty() {
            return bad("gap_ratios must not be empty".into());
        }
        if self.gap_ratios.iter().any(|r| !(r.is_finite() && *r >= -1.0)) {
            return bad("gap ratios must be finite and at least -1".into());
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive (got {})", self.tolerance));
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return bad(format!("coupling must be positive (got {})", self.coupling));
        }
        let mut needed = vec![AxisParam::Gap, AxisParam::Accel, AxisParam::Sep];
        if !self.free_space {
            needed.push(AxisParam::BoundaryDistance);
        }
        for p in needed {
            if p != ax.param && self.fixed_value(p).is_none() {
                return bad(format!("fixed parameter {p:?} is missing"));
            }
        }
        if self.fixed.radius.is_none() {
            return bad("fixed parameter radius is missing".into());
        }
        // Domain checks on the fixed values via a trial build with a harmless axis
        // value. Bad axis values fail per point.
        let probe = match ax.param {
            AxisParam::Gap => 0.1,
            _ => 1.0,
        };
        for &ratio in &self.gap_ratios {
            build_pair(&self.point(probe, ratio)).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn point(&self, axis_value: f64, ratio: f64) -> PointParams {
        let pick = |p: AxisParam| {
            if self.axis.param == p {
                axis_value
            } else {
                self.fixed_value(p).unwrap_or(f64::NAN)
            }
        };
        let gap_a = pick(AxisParam::Gap);
        PointParams {
            gap_a,
            gap_ratio: ratio,
            gap_b: gap_a * (1.0 + ratio),
            accel: pick(AxisParam::Accel),
            radius: self.fixed.radius.unwrap_or(f64::NAN),
            boundary_distance: if self.free_space {
                None
            } else {
                Some(pick(AxisParam::BoundaryDistance))
            },
            sep: pick(AxisParam::Sep),
        }
    }

    /// Every point in output order: axis-major, gap ratios in listed order.
    pub fn points(&self) -> Vec<PointParams> {
        self.axis
            .values()
            .into_iter()
            .flat_map(|v| self.gap_ratios.iter().map(move |&r| (v, r)))
            .map(|(v, r)| self.point(v, r))
            .collect()
    }
}

fn build_pair(p: &PointParams) -> Result<PairConfig> {
    let a = CircularDetector::new(p.gap_a, p.accel, p.radius)?;
    let b = CircularDetector::new(p.gap_b, p.accel, p.radius)?;
    PairConfig::new(a, b, p.boundary_distance, p.sep)
}

/// Evaluates one point; failures become a `fail` status.
pub fn evaluate_point(params: &PointParams, tol: f64, coupling: f64, oracle_check: bool) -> SweepRow {
    let outcome = build_pair(params).and_then(|pair| {
        let h = mutual_information_point_with(&pair, tol, coupling)?;
        let mut warnings = h.warnings.clone();
        if oracle_check {
            let dev = oracle::point_deviation(&pair, &h, tol)?;
            if dev > oracle::ORACLE_THRESHOLD {
                warnings.push("oracle_mismatch".into());
            }
        }
        Ok((h, warnings))
    });
    match outcome {
        Ok((h, warnings)) => SweepRow {
            params: *params,
            values: Some(PointValues {
                p_a: h.p_a,
                p_b: h.p_b,
                c: h.correlation.c_total,
                c1: h.correlation.c_free,
                c2: h.correlation.c_boundary,
                l_plus: h.mi.l_plus,
                l_minus: h.mi.l_minus,
                mutual_info: h.mi.mutual_info,
                slack: h.mi.positivity_slack,
                err: h.error_estimate,
            }),
            status: if warnings.is_empty() {
                Status::Ok
            } else {
                Status::Warn(warnings)
            },
        },
        Err(e) => SweepRow {
            params: *params,
            values: None,
            status: Status::Fail(e.code().to_string()),
        },
    }
}

/// Runs the sweep on the global thread pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points();
    Ok(points
        .par_iter()
        .map(|p| evaluate_point(p, spec.tolerance, spec.coupling, spec.oracle_check))
        .collect())
}

pub use rayon::ThreadPool;

/// A pool of `workers` threads for running sweeps or oracle suites.
pub fn thread_pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs the sweep on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    thread_pool(workers)?.install(|| run_sweep(spec))
}
