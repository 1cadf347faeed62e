//! Field configurations `phi_i(z, zbar)` with first derivatives.
//!
//! Grid configurations are interpolated by bicubic Hermite patches built from
//! node values, both first derivatives and the cross derivative.

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Values of the fields and their derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub phi: Vec<f64>,
    /// `d phi / dz`.
    pub d1: Vec<f64>,
    /// `d phi / dzbar`.
    pub d2: Vec<f64>,
    /// `d^2 phi / dz dzbar`, when known analytically.
    pub d12: Option<Vec<f64>>,
}

/// Rectangular domain, optionally cut by `z + zbar >= min_sum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub z_min: f64,
    pub z_max: f64,
    pub zbar_min: f64,
    pub zbar_max: f64,
    pub min_sum: Option<f64>,
}

impl Domain {
    pub fn rect(z_min: f64, z_max: f64, zbar_min: f64, zbar_max: f64) -> Self {
        Domain {
            z_min,
            z_max,
            zbar_min,
            zbar_max,
            min_sum: None,
        }
    }

    pub fn unit_square() -> Self {
        Self::rect(0.0, 1.0, 0.0, 1.0)
    }

    /// Unbounded in every direction.
    pub fn everywhere() -> Self {
        Self::rect(f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, z: f64, zbar: f64) -> bool {
        let slack = 1e-12;
        let in_rect = z >= self.z_min - slack
            && z <= self.z_max + slack
            && zbar >= self.zbar_min - slack
            && zbar <= self.zbar_max + slack;
        in_rect && self.min_sum.is_none_or(|s| z + zbar >= s - slack)
    }

    /// Intersection of two domains.
    pub fn intersect(&self, other: &Domain) -> Domain {
        Domain {
            z_min: self.z_min.max(other.z_min),
            z_max: self.z_max.min(other.z_max),
            zbar_min: self.zbar_min.max(other.zbar_min),
            zbar_max: self.zbar_max.min(other.zbar_max),
            min_sum: match (self.min_sum, other.min_sum) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

type Evaluator = Arc<dyn Fn(f64, f64) -> FieldSample + Send + Sync>;

#[derive(Clone)]
pub enum FieldKind {
    Closed { name: String, eval: Evaluator },
    Grid(Arc<GridField>),
}

impl fmt::Debug for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Closed { name, .. } => write!(f, "Closed({name})"),
            FieldKind::Grid(g) => write!(f, "Grid({}x{})", g.nz, g.nzbar),
        }
    }
}

/// A field configuration on a declared domain.
#[derive(Debug, Clone)]
pub struct FieldConfig {
    n_fields: usize,
    domain: Domain,
    kind: FieldKind,
}

/// Step used for second derivatives of closed-form fields lacking analytic ones.
const CLOSED_FD_STEP: f64 = 1e-4;

impl FieldConfig {
    pub fn closed<F>(name: impl Into<String>, n_fields: usize, domain: Domain, eval: F) -> Self
    where
        F: Fn(f64, f64) -> FieldSample + Send + Sync + 'static,
    {
        FieldConfig {
            n_fields,
            domain,
            kind: FieldKind::Closed {
                name: name.into(),
                eval: Arc::new(eval),
            },
        }
    }

    /// Constant fields everywhere (an off-shell configuration in general).
    pub fn constant(values: Vec<f64>) -> Self {
        let n = values.len();
        FieldConfig::closed("constant", n, Domain::everywhere(), move |_, _| FieldSample {
            phi: values.clone(),
            d1: vec![0.0; n],
            d2: vec![0.0; n],
            d12: Some(vec![0.0; n]),
        })
    }

    pub fn grid(grid: GridField) -> Self {
        FieldConfig {
            n_fields: grid.n_fields,
            domain: grid.domain(),
            kind: FieldKind::Grid(Arc::new(grid)),
        }
    }

    pub fn n_fields(&self) -> usize {
        self.n_fields
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            FieldKind::Closed { name, .. } => name,
            FieldKind::Grid(_) => "grid",
        }
    }

    /// Restricts the declared domain.
    pub fn restricted(mut self, domain: Domain) -> Self {
        self.domain = self.domain.intersect(&domain);
        self
    }

    pub fn sample(&self, z: f64, zbar: f64) -> Result<FieldSample> {
        if !self.domain.contains(z, zbar) {
            return Err(Error::OutsideDomain { z, zbar });
        }
        match &self.kind {
            FieldKind::Closed { eval, .. } => Ok(eval(z, zbar)),
            FieldKind::Grid(g) => Ok(g.eval(z, zbar)),
        }
    }

    /// Step `(dz, dzbar)` for the central-difference fallback.
    pub fn fd_step(&self) -> (f64, f64) {
        match &self.kind {
            FieldKind::Closed { .. } => (CLOSED_FD_STEP, CLOSED_FD_STEP),
            FieldKind::Grid(g) => (g.hz, g.hzbar),
        }
    }

    /// `d1 d2 phi`: analytic when available, otherwise the four-point
    /// central difference with the declared step.
    pub fn cross_derivative(&self, z: f64, zbar: f64) -> Result<Vec<f64>> {
        let s = self.sample(z, zbar)?;
        if let Some(d12) = s.d12 {
            return Ok(d12);
        }
        let (h, k) = self.fd_step();
        let pp = self.sample(z + h, zbar + k)?.phi;
        let pm = self.sample(z + h, zbar - k)?.phi;
        let mp = self.sample(z - h, zbar + k)?.phi;
        let mm = self.sample(z - h, zbar - k)?.phi;
        Ok((0..self.n_fields)
            .map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * k))
            .collect())
    }

    /// Samples this configuration onto a uniform grid.
    pub fn to_grid(&self, z0: f64, zbar0: f64, hz: f64, hzbar: f64, nz: usize, nzbar: usize) -> Result<GridField> {
        let n = self.n_fields;
        let mut phi = vec![vec![0.0; nz * nzbar]; n];
        let mut d1 = phi.clone();
        let mut d2 = phi.clone();
        let mut d12 = phi.clone();
        for i in 0..nz {
            for j in 0..nzbar {
                let (z, zb) = (z0 + i as f64 * hz, zbar0 + j as f64 * hzbar);
                let s = self.sample(z, zb)?;
                let cross = match s.d12 {
                    Some(v) => v,
                    None => self.cross_derivative(z, zb)?,
                };
                for f in 0..n {
                    phi[f][i * nzbar + j] = s.phi[f];
                    d1[f][i * nzbar + j] = s.d1[f];
                    d2[f][i * nzbar + j] = s.d2[f];
                    d12[f][i * nzbar + j] = cross[f];
                }
            }
        }
        GridField::new(z0, zbar0, hz, hzbar, nz, nzbar, phi, d1, d2, Some(d12))
    }
}

/// Node data of a uniform grid. Arrays are indexed `[field][i * nzbar + j]`
/// for the node `(z0 + i hz, zbar0 + j hzbar)`.
#[derive(Debug, Clone)]
pub struct GridField {
    pub z0: f64,
    pub zbar0: f64,
    pub hz: f64,
    pub hzbar: f64,
    pub nz: usize,
    pub nzbar: usize,
    pub n_fields: usize,
    pub phi: Vec<Vec<f64>>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
    pub d12: Vec<Vec<f64>>,
}

/// Second-order derivative of equally spaced samples (one-sided at the ends).
fn diff_line(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if n == 2 {
                (v[1] - v[0]) / h
            } else if i == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

impl GridField {
    /// Builds a grid from node data. Missing cross derivatives are obtained
    /// by differencing `d1` along `zbar`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        z0: f64,
        zbar0: f64,
        hz: f64,
        hzbar: f64,
        nz: usize,
        nzbar: usize,
        phi: Vec<Vec<f64>>,
        d1: Vec<Vec<f64>>,
        d2: Vec<Vec<f64>>,
        d12: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if !(hz > 0.0 && hzbar > 0.0) {
            return Err(Error::InvalidInput("grid spacing must be positive".into()));
        }
        if nz < 2 || nzbar < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 nodes per direction".into()));
        }
        let n_fields = phi.len();
        let nodes = nz * nzbar;
        for arr in [&phi, &d1, &d2] {
            if arr.len() != n_fields || arr.iter().any(|a| a.len() != nodes) {
                return Err(Error::InvalidInput("grid arrays have inconsistent sizes".into()));
            }
        }
        let d12 = match d12 {
            Some(v) => v,
            None => d1
                .iter()
                .map(|f| {
                    let mut out = vec![0.0; nodes];
                    for i in 0..nz {
                        let line = &f[i * nzbar..(i + 1) * nzbar];
                        out[i * nzbar..(i + 1) * nzbar].copy_from_slice(&diff_line(line, hzbar));
                    }
                    out
                })
                .collect(),
        };
        Ok(GridField {
            z0,
            zbar0,
            hz,
            hzbar,
            nz,
            nzbar,
            n_fields,
            phi,
            d1,
            d2,
            d12: d12.to_vec(),
        })
    }

    /// Grid from node values only; first derivatives by second-order differences.
    pub fn from_values(z0: f64, zbar0: f64, hz: f64, hzbar: f64, nz: usize, nzbar: usize, phi: Vec<Vec<f64>>) -> Result<Self> {
        let nodes = nz * nzbar;
        if phi.iter().any(|f| f.len() != nodes) {
            return Err(Error::InvalidInput("grid arrays have inconsistent sizes".into()));
        }
        let mut d1 = vec![vec![0.0; nodes]; phi.len()];
        let mut d2 = d1.clone();
        for (f, vals) in phi.iter().enumerate() {
            for i in 0..nz {
                let line = &vals[i * nzbar..(i + 1) * nzbar];
                d2[f][i * nzbar..(i + 1) * nzbar].copy_from_slice(&diff_line(line, hzbar));
            }
            for j in 0..nzbar {
                let line: Vec<f64> = (0..nz).map(|i| vals[i * nzbar + j]).collect();
                for (i, d) in diff_line(&line, hz).into_iter().enumerate() {
                    d1[f][i * nzbar + j] = d;
                }
            }
        }
        GridField::new(z0, zbar0, hz, hzbar, nz, nzbar, phi, d1, d2, None)
    }

    pub fn domain(&self) -> Domain {
        Domain::rect(
            self.z0,
            self.z0 + (self.nz - 1) as f64 * self.hz,
            self.zbar0,
            self.zbar0 + (self.nzbar - 1) as f64 * self.hzbar,
        )
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.z0 + i as f64 * self.hz, self.zbar0 + j as f64 * self.hzbar)
    }

    /// Bicubic Hermite interpolation of the node data.
    pub fn eval(&self, z: f64, zbar: f64) -> FieldSample {
        let (i, s) = locate(z, self.z0, self.hz, self.nz);
        let (j, t) = locate(zbar, self.zbar0, self.hzbar, self.nzbar);
        let (hs, dhs) = hermite(s);
        let (ht, dht) = hermite(t);
        let n = self.n_fields;
        let mut out = FieldSample {
            phi: vec![0.0; n],
            d1: vec![0.0; n],
            d2: vec![0.0; n],
            d12: None,
        };
        for f in 0..n {
            let (mut v, mut vs, mut vt) = (0.0, 0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    let k = (i + a) * self.nzbar + (j + b);
                    // basis weights: value, z-slope, zbar-slope, cross
                    let c = [
                        self.phi[f][k],
                        self.d1[f][k] * self.hz,
                        self.d2[f][k] * self.hzbar,
                        self.d12[f][k] * self.hz * self.hzbar,
                    ];
                    let ws = [hs[a], hs[2 + a], hs[a], hs[2 + a]];
                    let wt = [ht[b], ht[b], ht[2 + b], ht[2 + b]];
                    let dws = [dhs[a], dhs[2 + a], dhs[a], dhs[2 + a]];
                    let dwt = [dht[b], dht[b], dht[2 + b], dht[2 + b]];
                    for q in 0..4 {
                        v += c[q] * ws[q] * wt[q];
                        vs += c[q] * dws[q] * wt[q];
                        vt += c[q] * ws[q] * dwt[q];
                    }
                }
            }
            out.phi[f] = v;
            out.d1[f] = vs / self.hz;
            out.d2[f] = vt / self.hzbar;
        }
        out
    }

    /// Writes `z,zbar,phi_1..phi_n,dphi1_1..dphi1_n,dphi2_1..dphi2_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.n_fields;
        let mut header = vec!["z".to_string(), "zbar".to_string()];
        header.extend((1..=n).map(|i| format!("phi_{i}")));
        header.extend((1..=n).map(|i| format!("dphi1_{i}")));
        header.extend((1..=n).map(|i| format!("dphi2_{i}")));
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.nz {
            for j in 0..self.nzbar {
                let k = i * self.nzbar + j;
                let (z, zb) = self.node(i, j);
                let mut row = vec![fmt_f64(z), fmt_f64(zb)];
                row.extend((0..n).map(|f| fmt_f64(self.phi[f][k])));
                row.extend((0..n).map(|f| fmt_f64(self.d1[f][k])));
                row.extend((0..n).map(|f| fmt_f64(self.d2[f][k])));
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV layout written by [`GridField::write_csv`]. Rows may come
    /// in any order but must cover a uniform rectangular grid.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header = rdr.headers().map_err(csv_err)?.clone();
        let cols = header.len();
        if cols < 5 || (cols - 2) % 3 != 0 {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected z, zbar and 3n field columns, found {cols} columns"),
            });
        }
        let n = (cols - 2) / 3;
        let mut expected = vec!["z".to_string(), "zbar".to_string()];
        expected.extend((1..=n).map(|i| format!("phi_{i}")));
        expected.extend((1..=n).map(|i| format!("dphi1_{i}")));
        expected.extend((1..=n).map(|i| format!("dphi2_{i}")));
        for (got, want) in header.iter().zip(&expected) {
            if got != want {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("column `{got}` where `{want}` was expected"),
                });
            }
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, rec) in rdr.records().enumerate() {
            let line = idx + 2;
            let rec = rec.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let vals = vals.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            if vals.len() != cols {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {cols} values, found {}", vals.len()),
                });
            }
            rows.push(vals);
        }
        let axis = |col: usize| -> Vec<f64> {
            let mut v: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
            v
        };
        let zs = axis(0);
        let zbs = axis(1);
        let (nz, nzbar) = (zs.len(), zbs.len());
        if nz < 2 || nzbar < 2 || nz * nzbar != rows.len() {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "rows do not form a rectangular grid ({} rows for {nz} x {nzbar} nodes)",
                    rows.len()
                ),
            });
        }
        let hz = (zs[nz - 1] - zs[0]) / (nz - 1) as f64;
        let hzbar = (zbs[nzbar - 1] - zbs[0]) / (nzbar - 1) as f64;
        let uniform = |v: &[f64], h: f64| {
            v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(1e-300))
        };
        if !uniform(&zs, hz) || !uniform(&zbs, hzbar) {
            return Err(Error::Parse {
                line: 0,
                message: "grid spacing is not uniform".into(),
            });
        }
        let nodes = nz * nzbar;
        let mut phi = vec![vec![f64::NAN; nodes]; n];
        let mut d1 = phi.clone();
        let mut d2 = phi.clone();
        for r in &rows {
            let i = ((r[0] - zs[0]) / hz).round() as usize;
            let j = ((r[1] - zbs[0]) / hzbar).round() as usize;
            let k = i * nzbar + j;
            for f in 0..n {
                phi[f][k] = r[2 + f];
                d1[f][k] = r[2 + n + f];
                d2[f][k] = r[2 + 2 * n + f];
            }
        }
        if phi.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::Parse {
                line: 0,
                message: "duplicate or missing grid nodes".into(),
            });
        }
        GridField::new(zs[0], zbs[0], hz, hzbar, nz, nzbar, phi, d1, d2, None)
    }
}

/// Cell index and local coordinate in `[0, 1]`.
fn locate(x: f64, x0: f64, h: f64, n: usize) -> (usize, f64) {
    let u = (x - x0) / h;
    let i = (u.floor().max(0.0) as usize).min(n - 2);
    (i, u - i as f64)
}

/// Cubic Hermite basis `[h00, h01, h10, h11]` and derivatives on `[0, 1]`:
/// `h0a` interpolate values at node `a`, `h1a` slopes at node `a`.
fn hermite(s: f64) -> ([f64; 4], [f64; 4]) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        [
            2.0 * s3 - 3.0 * s2 + 1.0,
            -2.0 * s3 + 3.0 * s2,
            s3 - 2.0 * s2 + s,
            s3 - s2,
        ],
        [
            6.0 * s2 - 6.0 * s,
            -6.0 * s2 + 6.0 * s,
            3.0 * s2 - 4.0 * s + 1.0,
            3.0 * s2 - 2.0 * s,
        ],
    )
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    // one spelling for zero
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_grid() -> GridField {
        // bicubic data is reproduced exactly by the Hermite patches
        let f = |z: f64, w: f64| z * z * w - 0.5 * z * w * w * w + 2.0 * w;
        let fz = |z: f64, w: f64| 2.0 * z * w - 0.5 * w * w * w;
        let fw = |z: f64, w: f64| z * z - 1.5 * z * w * w + 2.0;
        let fzw = |z: f64, w: f64| 2.0 * z - 1.5 * w * w;
        let cfg = FieldConfig::closed("poly", 1, Domain::everywhere(), move |z, w| FieldSample {
            phi: vec![f(z, w)],
            d1: vec![fz(z, w)],
            d2: vec![fw(z, w)],
            d12: Some(vec![fzw(z, w)]),
        });
        cfg.to_grid(0.0, -1.0, 0.25, 0.5, 5, 5).unwrap()
    }

    #[test]
    fn hermite_patch_reproduces_bicubic_polynomials() {
        let g = poly_grid();
        for (z, w) in [(0.1, -0.9), (0.63, 0.2), (1.0, 1.0), (0.5, 0.0)] {
            let s = g.eval(z, w);
            let want = z * z * w - 0.5 * z * w * w * w + 2.0 * w;
            assert!((s.phi[0] - want).abs() < 1e-13, "({z},{w})");
            assert!((s.d1[0] - (2.0 * z * w - 0.5 * w * w * w)).abs() < 1e-12);
            assert!((s.d2[0] - (z * z - 1.5 * z * w * w + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_layout_header_is_fixed() {
        let mut buf = Vec::new();
        poly_grid().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "z,zbar,phi_1,dphi1_1,dphi2_1");
        assert_eq!(text.lines().count(), 26);
    }

    #[test]
    fn csv_round_trip_restores_nodes() {
        let g = poly_grid();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = GridField::read_csv(buf.as_slice()).unwrap();
        assert_eq!((back.nz, back.nzbar), (5, 5));
        assert_eq!(back.phi, g.phi);
        assert_eq!(back.d1, g.d1);
    }

    #[test]
    fn csv_rejects_bad_header_and_values() {
        let err = GridField::read_csv("z,zbar,phi_1,dphi2_1,dphi1_1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let text = "z,zbar,phi_1,dphi1_1,dphi2_1\n0,0,1,2,3\n0,1,x,2,3\n";
        let err = GridField::read_csv(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn outside_domain_is_an_error() {
        let g = FieldConfig::grid(poly_grid());
        assert!(matches!(g.sample(1.5, 0.0), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn bad_spacing_is_rejected() {
        let err = GridField::new(0.0, 0.0, 0.0, 1.0, 2, 2, vec![vec![0.0; 4]], vec![vec![0.0; 4]], vec![vec![0.0; 4]], None)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
