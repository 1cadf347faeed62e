//! Characteristic initial-value problem for `d1 d2 phi_i = rhs_i(phi)`.
//!
//! Node `(i, j)` sits at `(z0 + i hz, zbar0 + j hzbar)`. Integrating the
//! equation over one cell gives
//! `phi(i+1,j+1) = phi(i+1,j) + phi(i,j+1) - phi(i,j) + (hz hzbar / 4) sum F`
//! with the trapezoidal rule over the four corners; the unknown corner is
//! handled by one predictor and two corrector sweeps.

use super::{field_residual, FieldConfig, GridField, TodaModel};
use crate::error::{Error, Result};

/// Field values along the two characteristics through `(z0, zbar0)`.
#[derive(Debug, Clone)]
pub struct CharacteristicData {
    pub z0: f64,
    pub zbar0: f64,
    pub hz: f64,
    pub hzbar: f64,
    /// `phi(z0 + i hz, zbar0)` for `i < nz`.
    pub along_z: Vec<Vec<f64>>,
    /// `phi(z0, zbar0 + j hzbar)` for `j < nzbar`.
    pub along_zbar: Vec<Vec<f64>>,
}

impl CharacteristicData {
    /// Samples characteristic data from a configuration.
    pub fn from_fields(
        fields: &FieldConfig,
        (z0, zbar0): (f64, f64),
        (hz, hzbar): (f64, f64),
        (nz, nzbar): (usize, usize),
    ) -> Result<Self> {
        let along_z = (0..nz)
            .map(|i| fields.sample(z0 + i as f64 * hz, zbar0).map(|s| s.phi))
            .collect::<Result<_>>()?;
        let along_zbar = (0..nzbar)
            .map(|j| fields.sample(z0, zbar0 + j as f64 * hzbar).map(|s| s.phi))
            .collect::<Result<_>>()?;
        Ok(CharacteristicData {
            z0,
            zbar0,
            hz,
            hzbar,
            along_z,
            along_zbar,
        })
    }

    /// Identically zero data.
    pub fn zeros(n_fields: usize, (z0, zbar0): (f64, f64), (hz, hzbar): (f64, f64), (nz, nzbar): (usize, usize)) -> Self {
        CharacteristicData {
            z0,
            zbar0,
            hz,
            hzbar,
            along_z: vec![vec![0.0; n_fields]; nz],
            along_zbar: vec![vec![0.0; n_fields]; nzbar],
        }
    }

    fn validate(&self, n_fields: usize) -> Result<()> {
        if !(self.hz > 0.0 && self.hzbar > 0.0) {
            return Err(Error::InvalidInput("Goursat step must be positive".into()));
        }
        if self.along_z.len() < 2 || self.along_zbar.len() < 2 {
            return Err(Error::InvalidInput("Goursat data needs at least 2 nodes per characteristic".into()));
        }
        if self.along_z.iter().chain(&self.along_zbar).any(|v| v.len() != n_fields) {
            return Err(Error::DimensionMismatch {
                expected: n_fields,
                found: self.along_z[0].len(),
            });
        }
        if self.along_z.iter().chain(&self.along_zbar).flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("characteristic data".into()));
        }
        let (a, b) = (&self.along_z[0], &self.along_zbar[0]);
        for (x, y) in a.iter().zip(b) {
            if (x - y).abs() > 1e-12 * x.abs().max(y.abs()).max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "corner values disagree: {x} on the z line, {y} on the zbar line"
                )));
            }
        }
        Ok(())
    }
}

/// Result of a Goursat integration.
#[derive(Debug, Clone)]
pub struct GoursatSolution {
    pub fields: FieldConfig,
    pub grid: GridField,
    /// Largest `|d1 d2 phi_i - rhs_i(phi)|` over interior nodes, with the
    /// cross derivative taken by central differences on the grid.
    pub max_residual: f64,
    /// Set when the march stopped early on non-finite values; the grid then
    /// holds the rows computed before the failure.
    pub aborted: Option<String>,
}

pub fn goursat_solve(model: &TodaModel, data: &CharacteristicData) -> Result<GoursatSolution> {
    let n = model.n_fields();
    data.validate(n)?;
    let (nz, nzbar) = (data.along_z.len(), data.along_zbar.len());
    let hk = data.hz * data.hzbar;

    // rows[i][j] = phi at node (i, j)
    let mut rows: Vec<Vec<Vec<f64>>> = Vec::with_capacity(nz);
    rows.push(data.along_zbar.clone());
    let mut aborted = None;
    'march: for i in 0..nz - 1 {
        let prev = &rows[i];
        let prev_f: Vec<Vec<f64>> = prev.iter().map(|p| model.field_rhs(p)).collect();
        let mut row = Vec::with_capacity(nzbar);
        row.push(data.along_z[i + 1].clone());
        let mut left_f = model.field_rhs(&row[0]);
        for j in 0..nzbar - 1 {
            let (p00, p01, p10) = (&prev[j], &prev[j + 1], &row[j]);
            let base: Vec<f64> = (0..n).map(|k| p10[k] + p01[k] - p00[k]).collect();
            let known: Vec<f64> = (0..n).map(|k| prev_f[j][k] + prev_f[j + 1][k] + left_f[k]).collect();
            // predictor: midpoint-like estimate from the two off-diagonal corners
            let mut phi: Vec<f64> = (0..n)
                .map(|k| base[k] + 0.5 * hk * (left_f[k] + prev_f[j + 1][k]))
                .collect();
            for _ in 0..2 {
                let f11 = model.field_rhs(&phi);
                phi = (0..n).map(|k| base[k] + 0.25 * hk * (known[k] + f11[k])).collect();
            }
            if phi.iter().any(|v| !v.is_finite()) {
                aborted = Some(format!(
                    "non-finite value at node ({}, {}), z = {}, zbar = {}",
                    i + 1,
                    j + 1,
                    data.z0 + (i + 1) as f64 * data.hz,
                    data.zbar0 + (j + 1) as f64 * data.hzbar
                ));
                break 'march;
            }
            left_f = model.field_rhs(&phi);
            row.push(phi);
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::NonFinite(aborted.unwrap_or_else(|| "Goursat march failed".into())));
    }

    let nrows = rows.len();
    let mut phi = vec![vec![0.0; nrows * nzbar]; n];
    for (i, row) in rows.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            for k in 0..n {
                phi[k][i * nzbar + j] = p[k];
            }
        }
    }
    let grid = GridField::from_values(data.z0, data.zbar0, data.hz, data.hzbar, nrows, nzbar, phi)?;
    let fields = FieldConfig::grid(grid.clone());

    let mut max_residual: f64 = 0.0;
    for i in 1..nrows.saturating_sub(1) {
        for j in 1..nzbar - 1 {
            let (z, zb) = grid.node(i, j);
            let r = field_residual(model, &fields, z, zb)?;
            for v in model.cartan_coefficients(&r) {
                max_residual = max_residual.max(v.abs());
            }
        }
    }
    Ok(GoursatSolution {
        fields,
        grid,
        max_residual,
        aborted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toda::{exact_solution, solutions::SolutionParams, Couplings};

    #[test]
    fn zero_data_in_the_free_limit_stays_zero() {
        let m = TodaModel::sl(2, 2.0, Couplings::default())
            .unwrap()
            .scaled_limit(1.0, 0.0)
            .unwrap();
        let data = CharacteristicData::zeros(1, (0.0, 0.0), (0.1, 0.1), (11, 11));
        let sol = goursat_solve(&m, &data).unwrap();
        assert!(sol.grid.phi[0].iter().all(|v| *v == 0.0));
        assert_eq!(sol.max_residual, 0.0);
    }

    #[test]
    fn incompatible_corner_is_rejected() {
        let m = TodaModel::sl(2, 2.0, Couplings::default()).unwrap();
        let mut data = CharacteristicData::zeros(1, (0.0, 0.0), (0.1, 0.1), (3, 3));
        data.along_z[0][0] = 1.0;
        assert!(matches!(goursat_solve(&m, &data), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn blow_up_aborts_with_partial_grid() {
        // mu+ mu- < 0 with cosh-like data drives phi to -infinity quickly
        let m = TodaModel::sl(
            2,
            2.0,
            Couplings {
                mu_minus: -2.0,
                ..Default::default()
            },
        )
        .unwrap();
        let f = exact_solution("liouville_cosh", &SolutionParams::with_a(1.0)).unwrap();
        let data = CharacteristicData::from_fields(&f, (0.0, 0.0), (0.05, 0.05), (200, 200)).unwrap();
        let sol = goursat_solve(&m, &data).unwrap();
        assert!(sol.aborted.is_some());
        assert!(sol.grid.nz < 200);
        assert!(sol.grid.phi[0].iter().all(|v| v.is_finite()));
    }
}
