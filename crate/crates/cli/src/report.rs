//! JSON report schema.

use serde::Serialize;

/// A finite number, or the marker `"quarantined"` when no point produced one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Tag(&'static str),
}

pub const QUARANTINED: Value = Value::Tag("quarantined");

impl Value {
    /// Maximum of the finite entries, `"quarantined"` when there are none.
    pub fn max_of(values: impl IntoIterator<Item = f64>) -> Value {
        values
            .into_iter()
            .filter(|v| v.is_finite())
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
            .map_or(QUARANTINED, Value::Num)
    }

    pub fn min_of(values: impl IntoIterator<Item = f64>) -> Value {
        values
            .into_iter()
            .filter(|v| v.is_finite())
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
            .map_or(QUARANTINED, Value::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Tag(_) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub algebra: AlgebraInfo,
    pub model: ModelInfo,
    pub solution: String,
    pub grid: GridInfo,
    pub fd_step: f64,
    pub transport_step: f64,
    /// Number of timelike normal directions, from the anchor frame.
    pub nu_perp: Option<usize>,
    /// Index of the ambient metric `c k`.
    pub nu_bar: usize,
    /// Index of the induced metric.
    pub nu_sub: usize,
    pub checks: Vec<CheckResult>,
    pub curvature: CurvatureInfo,
    pub second_form: SecondFormInfo,
    pub mean_curvature: MeanCurvatureInfo,
    pub transport: TransportInfo,
    pub goursat: Option<GoursatInfo>,
    pub quarantine: QuarantineInfo,
    pub warnings: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraInfo {
    pub family: String,
    pub n: usize,
    pub alpha_sq: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub c: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub z_min: f64,
    pub z_max: f64,
    pub zbar_min: f64,
    pub zbar_max: f64,
    pub nz: usize,
    pub nzbar: usize,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub enabled: bool,
    pub max_residual: Value,
    pub tolerance: f64,
    /// `None` for disabled checks.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureInfo {
    /// Which formula fills the `K_closed` column.
    pub closed_form: &'static str,
    pub max_abs_closed_minus_fd: Value,
    pub max_abs_closed_minus_gauss: Value,
    pub min_k: Value,
    pub max_k: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondFormInfo {
    /// Largest difference between the potential and frame-derivative routes.
    pub max_route_difference: Value,
    /// Points where the two routes disagree beyond `1e-6`, a sign of a
    /// frame branch change.
    pub flagged_points: Vec<PointNote>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanCurvatureInfo {
    pub min_norm_sq: Value,
    pub max_norm_sq: Value,
    pub max_normal_derivative: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportInfo {
    pub max_killing_drift_per_length: Value,
    pub immersion_written: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoursatInfo {
    pub step: f64,
    pub max_residual: f64,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuarantineInfo {
    pub count: usize,
    pub fraction: f64,
    pub max_fraction: f64,
    pub points: Vec<PointNote>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointNote {
    pub z: f64,
    pub zbar: f64,
    pub reason: String,
}
