//! Closed-form Toda solutions.
//!
//! Every entry depends on `u = a (z + zbar)` only, so `d1 phi = d2 phi` and
//! the cross derivative is the second `u`-derivative times `a^2`.

use super::fields::{Domain, FieldConfig, FieldSample};
use crate::error::{Error, Result};

pub const SOLUTION_NAMES: &[&str] = &[
    "liouville_log",
    "liouville_cosh",
    "toda_sl3_symmetric",
    "vacuum_perturbation_grid",
];

/// Parameters of a built-in solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionParams {
    /// Amplitude `a`; `None` picks the solution's default.
    pub a: Option<f64>,
    /// Sampling rectangle and node counts for grid-backed solutions.
    pub grid: Domain,
    pub nodes: (usize, usize),
}

impl Default for SolutionParams {
    fn default() -> Self {
        SolutionParams {
            a: None,
            grid: Domain::unit_square(),
            nodes: (41, 41),
        }
    }
}

impl SolutionParams {
    pub fn with_a(a: f64) -> Self {
        SolutionParams {
            a: Some(a),
            ..Default::default()
        }
    }
}

fn default_a(name: &str) -> f64 {
    if name == "vacuum_perturbation_grid" {
        0.1
    } else {
        1.0
    }
}

/// Value of `mu_plus * mu_minus` for which the named solution solves the
/// field equations with `alpha_sq = 2` normalization of the Cartan directions.
pub fn required_coupling_product(name: &str, a: f64) -> Result<f64> {
    match name {
        "liouville_log" => Ok(-a * a),
        "liouville_cosh" | "vacuum_perturbation_grid" => Ok(a * a),
        "toda_sl3_symmetric" => Ok(2.0 * a * a),
        other => Err(Error::Lookup {
            kind: "solution",
            name: other.to_string(),
        }),
    }
}

/// Number of fields the named solution provides.
pub fn solution_fields(name: &str) -> Result<usize> {
    match name {
        "liouville_log" | "liouville_cosh" | "vacuum_perturbation_grid" => Ok(1),
        "toda_sl3_symmetric" => Ok(2),
        other => Err(Error::Lookup {
            kind: "solution",
            name: other.to_string(),
        }),
    }
}

/// `(f, f', f'')` as functions of `u`, replicated over `n` fields.
fn along_sum<F>(name: &str, n: usize, a: f64, domain: Domain, profile: F) -> FieldConfig
where
    F: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
{
    FieldConfig::closed(name, n, domain, move |z, zbar| {
        let (f, df, ddf) = profile(a * (z + zbar));
        FieldSample {
            phi: vec![f; n],
            d1: vec![a * df; n],
            d2: vec![a * df; n],
            d12: Some(vec![a * a * ddf; n]),
        }
    })
}

fn cosh_profile(u: f64) -> (f64, f64, f64) {
    let sech = 1.0 / u.cosh();
    (u.cosh().ln(), u.tanh(), sech * sech)
}

/// Looks up a built-in solution.
///
/// * `liouville_log`: `phi = ln(a (z + zbar))` on `z + zbar >= 0.1`, needs `mu+ mu- = -a^2`.
/// * `liouville_cosh`: `phi = ln cosh(a (z + zbar))`, needs `mu+ mu- = a^2`.
/// * `toda_sl3_symmetric`: `phi_1 = phi_2 = 2 ln cosh(a (z + zbar))`, needs `mu+ mu- = 2 a^2`.
/// * `vacuum_perturbation_grid`: `liouville_cosh` with small `a` (default 0.1)
///   sampled onto the requested grid; derivatives come from the grid.
pub fn exact_solution(name: &str, params: &SolutionParams) -> Result<FieldConfig> {
    let a = params.a.unwrap_or_else(|| default_a(name));
    if !a.is_finite() || a == 0.0 {
        return Err(Error::InvalidInput(format!(
            "solution amplitude must be finite and nonzero, got {a}"
        )));
    }
    match name {
        "liouville_log" => {
            if a < 0.0 {
                return Err(Error::InvalidInput(
                    "liouville_log needs a > 0 on the half plane z + zbar > 0".into(),
                ));
            }
            // the cut keeps clear of the singular line z + zbar = 0
            let mut domain = Domain::everywhere();
            domain.min_sum = Some(0.1);
            Ok(along_sum(name, 1, a, domain, |u| {
                (u.ln(), 1.0 / u, -1.0 / (u * u))
            }))
        }
        "liouville_cosh" => Ok(along_sum(name, 1, a, Domain::everywhere(), cosh_profile)),
        "toda_sl3_symmetric" => Ok(along_sum(name, 2, a, Domain::everywhere(), |u| {
            let (f, df, ddf) = cosh_profile(u);
            (2.0 * f, 2.0 * df, 2.0 * ddf)
        })),
        "vacuum_perturbation_grid" => {
            let exact = along_sum("liouville_cosh", 1, a, Domain::everywhere(), cosh_profile);
            let d = params.grid;
            let (nz, nzbar) = params.nodes;
            if nz < 2 || nzbar < 2 || !(d.z_max > d.z_min && d.zbar_max > d.zbar_min) {
                return Err(Error::InvalidInput("vacuum_perturbation_grid needs a proper grid".into()));
            }
            let hz = (d.z_max - d.z_min) / (nz - 1) as f64;
            let hzbar = (d.zbar_max - d.zbar_min) / (nzbar - 1) as f64;
            let mut grid = exact.to_grid(d.z_min, d.zbar_min, hz, hzbar, nz, nzbar)?;
            // a grid carries first derivatives only; the cross term is rebuilt from them
            grid = super::GridField::new(
                grid.z0, grid.zbar0, grid.hz, grid.hzbar, grid.nz, grid.nzbar, grid.phi, grid.d1, grid.d2, None,
            )?;
            Ok(FieldConfig::grid(grid))
        }
        other => Err(Error::Lookup {
            kind: "solution",
            name: other.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosh_at_origin() {
        let f = exact_solution("liouville_cosh", &SolutionParams::with_a(1.0)).unwrap();
        let s = f.sample(0.0, 0.0).unwrap();
        assert_eq!(s.phi, vec![0.0]);
        assert_eq!(s.d1, vec![0.0]);
    }

    #[test]
    fn log_domain_is_cut() {
        let f = exact_solution("liouville_log", &SolutionParams::with_a(2.0)).unwrap();
        assert!(f.sample(0.02, 0.03).is_err());
        let s = f.sample(0.5, 0.5).unwrap();
        assert!((s.phi[0] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unknown_name_is_a_lookup_error() {
        let err = exact_solution("kink", &SolutionParams::default()).unwrap_err();
        assert!(matches!(err, Error::Lookup { .. }));
        assert!(required_coupling_product("kink", 1.0).is_err());
    }

    #[test]
    fn vacuum_grid_defaults_to_small_amplitude() {
        let f = exact_solution("vacuum_perturbation_grid", &SolutionParams::default()).unwrap();
        let s = f.sample(0.3, 0.4).unwrap();
        let want = (0.1f64 * 0.7).cosh().ln();
        assert!((s.phi[0] - want).abs() < 1e-9);
    }
}
