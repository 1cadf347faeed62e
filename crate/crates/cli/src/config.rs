//! Run configuration: TOML text, dotted-key overrides and validation.

use std::path::PathBuf;

use serde::Deserialize;

use crate::CliError;

pub const CHECK_NAMES: [&str; 5] = [
    "field_eq",
    "zero_curvature",
    "gcr",
    "gauge_invariance",
    "appendix_christoffel",
];

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Step of every numerical derivative in the forms.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    /// Runge-Kutta step of the transport.
    #[serde(default = "default_fd_step")]
    pub transport_step: f64,
    pub algebra: AlgebraSection,
    pub model: ModelSection,
    pub solution: SolutionSection,
    pub grid: GridSection,
    #[serde(default)]
    pub outputs: OutputSection,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_fd_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    pub family: String,
    pub n: usize,
    pub alpha_sq: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub c: f64,
    #[serde(default)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolutionSection {
    /// Name of a built-in solution.
    pub builtin: Option<String>,
    /// Amplitude parameter of the built-in solution or of the Goursat data.
    pub a: Option<f64>,
    /// Grid field CSV.
    pub grid_file: Option<PathBuf>,
    pub goursat: Option<GoursatSection>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GoursatSection {
    /// Built-in solution sampled on the two characteristics through the
    /// lower-left grid corner, or `"zero"`.
    pub data: String,
    pub a: Option<f64>,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub z_min: f64,
    pub z_max: f64,
    pub zbar_min: f64,
    pub zbar_max: f64,
    pub nz: usize,
    pub nzbar: usize,
}

impl GridSection {
    pub fn z_nodes(&self) -> Vec<f64> {
        nodes(self.z_min, self.z_max, self.nz)
    }

    pub fn zbar_nodes(&self) -> Vec<f64> {
        nodes(self.zbar_min, self.zbar_max, self.nzbar)
    }
}

fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub forms_csv: Option<PathBuf>,
    pub immersion_csv: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    #[serde(default = "all_checks")]
    pub enabled: Vec<String>,
    /// Largest tolerated fraction of quarantined grid points.
    #[serde(default)]
    pub max_quarantine_fraction: f64,
    /// Constant Cartan coefficients of the gauge element `exp(sum x_i h_i)`.
    pub gauge_cartan: Option<Vec<f64>>,
}

impl Default for ChecksSection {
    fn default() -> Self {
        ChecksSection {
            enabled: all_checks(),
            max_quarantine_fraction: 0.0,
            gauge_cartan: None,
        }
    }
}

fn all_checks() -> Vec<String> {
    CHECK_NAMES.iter().map(|s| s.to_string()).collect()
}

impl ChecksSection {
    pub fn is_enabled(&self, name: &str) -> bool {
        self.enabled.iter().any(|c| c == name)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub field_eq: f64,
    pub zero_curvature: f64,
    pub gcr: f64,
    pub gauge_invariance: f64,
    pub appendix_christoffel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            field_eq: 1e-8,
            zero_curvature: 1e-8,
            gcr: 1e-4,
            gauge_invariance: 1e-9,
            appendix_christoffel: 1e-5,
        }
    }
}

impl Tolerances {
    pub fn get(&self, check: &str) -> f64 {
        match check {
            "field_eq" => self.field_eq,
            "zero_curvature" => self.zero_curvature,
            "gcr" => self.gcr,
            "gauge_invariance" => self.gauge_invariance,
            _ => self.appendix_christoffel,
        }
    }
}

/// Where the configured fields come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionSource {
    Builtin { name: String, a: Option<f64> },
    GridFile(PathBuf),
    Goursat(GoursatSection),
}

impl RunConfig {
    /// Parses TOML text, applies `KEY=VALUE` overrides and validates.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut value: toml::Table = text.parse().map_err(|e: toml::de::Error| parse_error(text, &e))?;
        for ov in overrides {
            apply_override(&mut value, ov)?;
        }
        let cfg: RunConfig = if overrides.is_empty() {
            toml::from_str(text).map_err(|e| parse_error(text, &e))?
        } else {
            value
                .try_into()
                .map_err(|e: toml::de::Error| CliError::Config(format!("after overrides: {}", e.message())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.algebra.family != "sl" {
            return bad(format!("algebra.family must be \"sl\", got {:?}", self.algebra.family));
        }
        if !(2..=3).contains(&self.algebra.n) {
            return bad(format!("algebra.n must be 2 or 3, got {}", self.algebra.n));
        }
        if !(self.algebra.alpha_sq > 0.0 && self.algebra.alpha_sq.is_finite()) {
            return bad("algebra.alpha_sq must be positive".into());
        }
        let m = &self.model;
        if m.c == 0.0 || !m.c.is_finite() {
            return bad("model.c must be finite and nonzero (c != 0: the ambient metric c k must be nondegenerate)".into());
        }
        if m.mu_plus == 0.0 || !m.mu_plus.is_finite() {
            return bad("model.mu_plus must be finite and nonzero".into());
        }
        if m.mu_minus == 0.0 || !m.mu_minus.is_finite() {
            return bad("model.mu_minus must be finite and nonzero".into());
        }
        if !m.lambda.is_finite() {
            return bad("model.lambda must be finite".into());
        }
        let g = &self.grid;
        if g.nz < 2 || g.nzbar < 2 {
            return bad("grid.nz and grid.nzbar must be at least 2".into());
        }
        if !(g.z_max > g.z_min && g.zbar_max > g.zbar_min) || ![g.z_min, g.z_max, g.zbar_min, g.zbar_max].iter().all(|v| v.is_finite()) {
            return bad("grid bounds must be finite with z_max > z_min and zbar_max > zbar_min".into());
        }
        for (key, v) in [("fd_step", self.fd_step), ("transport_step", self.transport_step)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{key} must be positive"));
            }
        }
        for name in &self.checks.enabled {
            if !CHECK_NAMES.contains(&name.as_str()) {
                return bad(format!("unknown check {name:?}; known: {}", CHECK_NAMES.join(", ")));
            }
        }
        if !(0.0..=1.0).contains(&self.checks.max_quarantine_fraction) {
            return bad("checks.max_quarantine_fraction must lie in [0, 1]".into());
        }
        if let Some(x) = &self.checks.gauge_cartan {
            if x.len() != self.algebra.n - 1 {
                return bad(format!("checks.gauge_cartan needs {} entries", self.algebra.n - 1));
            }
        }
        self.source()?;
        Ok(())
    }

    pub fn source(&self) -> Result<SolutionSource, CliError> {
        let s = &self.solution;
        match (&s.builtin, &s.grid_file, &s.goursat) {
            (Some(name), None, None) => Ok(SolutionSource::Builtin {
                name: name.clone(),
                a: s.a,
            }),
            (None, Some(p), None) => Ok(SolutionSource::GridFile(p.clone())),
            (None, None, Some(g)) => {
                if !(g.step > 0.0 && g.step.is_finite()) {
                    return Err(CliError::Config("solution.goursat.step must be positive".into()));
                }
                Ok(SolutionSource::Goursat(g.clone()))
            }
            _ => Err(CliError::Config(
                "solution needs exactly one of `builtin`, `grid_file` or a [solution.goursat] table".into(),
            )),
        }
    }
}

fn parse_error(text: &str, e: &toml::de::Error) -> CliError {
    let (line, column) = e
        .span()
        .map(|sp| line_col(text, sp.start))
        .unwrap_or((0, 0));
    CliError::Parse {
        line,
        column,
        message: e.message().to_string(),
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// `KEY=VALUE` with a dotted key; the value is read as a TOML value and
/// falls back to a bare string.
fn apply_override(root: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {spec:?} is not KEY=VALUE")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key {key:?} is malformed")));
    }
    let mut table = root;
    for p in &parts[..parts.len() - 1] {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override key {key:?}: {p} is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[algebra]
family = "sl"
n = 2
alpha_sq = 2.0

[model]
mu_plus = 1.0
mu_minus = 1.0
c = 1.0

[solution]
builtin = "liouville_cosh"
a = 1.0

[grid]
z_min = 0.0
z_max = 1.0
zbar_min = 0.0
zbar_max = 1.0
nz = 3
nzbar = 3
"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::parse(BASE, &[]).unwrap();
        assert_eq!(cfg.fd_step, 1e-3);
        assert_eq!(cfg.checks.enabled.len(), 5);
        assert_eq!(cfg.tolerances.gcr, 1e-4);
        assert_eq!(cfg.grid.z_nodes(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn zero_c_is_rejected() {
        let err = RunConfig::parse(BASE, &["model.c=0".into()]).unwrap_err();
        assert!(err.to_string().contains("c != 0"), "{err}");
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let cfg = RunConfig::parse(
            BASE,
            &["model.c=-2.5".into(), "fd_step=5e-4".into(), "outputs.report_json=out.json".into()],
        )
        .unwrap();
        assert_eq!(cfg.model.c, -2.5);
        assert_eq!(cfg.fd_step, 5e-4);
        assert_eq!(cfg.outputs.report_json, Some(PathBuf::from("out.json")));
        assert!(RunConfig::parse(BASE, &["model".into()]).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let text = BASE.replace("c = 1.0", "c = = 1.0");
        match RunConfig::parse(&text, &[]).unwrap_err() {
            CliError::Parse { line, column, .. } => {
                assert_eq!(line, 10);
                assert!(column > 1);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn solution_source_must_be_unique() {
        let text = BASE.replace("a = 1.0", "a = 1.0\ngrid_file = \"x.csv\"");
        assert!(RunConfig::parse(&text, &[]).is_err());
    }

    #[test]
    fn unknown_check_is_rejected() {
        let text = format!("{BASE}\n[checks]\nenabled = [\"bogus\"]\n");
        assert!(RunConfig::parse(&text, &[]).is_err());
    }
}
