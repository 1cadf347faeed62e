//! Transport of `(d_mu + a_mu) U = 0` in the adjoint representation and the
//! immersion `r = U^-1 d_lambda U`.
//!
//! `U` is stored as the matrix of `Ad_U`, so `U X U^-1` is `u * x` on
//! coefficient vectors and `U^-1 X U` is `u^-1 * x`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{orthonormal_basis, AlgebraElement};
use crate::error::{Error, Result};
use crate::linalg;
use crate::toda::{gauge_at, zero_curvature_residual, FieldConfig, TodaModel};

/// Step of the central difference in `lambda`.
pub const LAMBDA_STEP: f64 = 1e-5;
/// Largest accepted `|ad_r - U^-1 U_lambda|` relative to `max(1, |U^-1 U_lambda|)`.
pub const PROJECTION_TOL: f64 = 1e-6;
/// Zero-curvature residual above which a transport carries a warning.
pub const FLATNESS_TOL: f64 = 1e-6;

/// A monotone path made of segments parallel to the coordinate axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    corners: Vec<(f64, f64)>,
}

impl Staircase {
    /// Through the given corners; consecutive corners must share a coordinate.
    pub fn through(corners: Vec<(f64, f64)>) -> Result<Self> {
        if corners.is_empty() {
            return Err(Error::InvalidInput("a path needs at least one point".into()));
        }
        for w in corners.windows(2) {
            if w[0].0 != w[1].0 && w[0].1 != w[1].1 {
                return Err(Error::InvalidInput(format!(
                    "segment {:?} -> {:?} is not parallel to an axis",
                    w[0], w[1]
                )));
            }
        }
        Ok(Staircase { corners })
    }

    /// Along `z` first, then along `zbar`.
    pub fn z_first(from: (f64, f64), to: (f64, f64)) -> Self {
        Staircase {
            corners: vec![from, (to.0, from.1), to],
        }
    }

    /// Along `zbar` first, then along `z`.
    pub fn zbar_first(from: (f64, f64), to: (f64, f64)) -> Self {
        Staircase {
            corners: vec![from, (from.0, to.1), to],
        }
    }

    /// `n` alternating steps from `from` to `to`.
    pub fn zigzag(from: (f64, f64), to: (f64, f64), n: usize) -> Self {
        let n = n.max(1);
        let mut corners = vec![from];
        let (dz, dw) = ((to.0 - from.0) / n as f64, (to.1 - from.1) / n as f64);
        for k in 1..=n {
            let prev = *corners.last().unwrap();
            corners.push((from.0 + k as f64 * dz, prev.1));
            corners.push((from.0 + k as f64 * dz, from.1 + k as f64 * dw));
        }
        corners.pop();
        corners.push(to);
        Staircase { corners }
    }

    pub fn start(&self) -> (f64, f64) {
        self.corners[0]
    }

    pub fn end(&self) -> (f64, f64) {
        *self.corners.last().unwrap()
    }

    pub fn corners(&self) -> &[(f64, f64)] {
        &self.corners
    }

    pub fn length(&self) -> f64 {
        self.corners
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).abs() + (w[1].1 - w[0].1).abs())
            .sum()
    }
}

/// `U` (as `Ad_U`) at the end of a path.
#[derive(Debug, Clone)]
pub struct TransportState {
    pub u: DMatrix<f64>,
    pub base_point: (f64, f64),
    pub base_value: DMatrix<f64>,
    pub path: Staircase,
    pub step: f64,
    /// Largest `|U^T k U - k| / |k|` seen along the path.
    pub killing_drift: f64,
    pub warnings: Vec<String>,
    /// `r = U^-1 d_lambda U`, when integrated alongside `U`.
    pub r: Option<AlgebraElement>,
}

impl TransportState {
    pub fn end_point(&self) -> (f64, f64) {
        self.path.end()
    }

    pub fn u_inverse(&self) -> Result<DMatrix<f64>> {
        self.u
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Consistency("transport matrix is singular".into()))
    }

    /// `U^-1 x U`.
    pub fn pull_back(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        Ok(AlgebraElement::from_vector(self.u_inverse()? * x.coeffs()))
    }

    /// Drift of the invariant form divided by the path length.
    pub fn drift_per_length(&self) -> f64 {
        let len = self.path.length();
        if len > 0.0 {
            self.killing_drift / len
        } else {
            self.killing_drift
        }
    }
}

fn killing_drift(u: &DMatrix<f64>, kappa: &DMatrix<f64>) -> f64 {
    (u.transpose() * kappa * u - kappa).amax() / kappa.amax()
}

/// Integrates `dU/ds = -ad(a_mu) U` with classical fourth-order Runge-Kutta.
pub fn transport(model: &TodaModel, fields: &FieldConfig, path: &Staircase, h: f64) -> Result<TransportState> {
    let m = model.algebra().dim();
    transport_from(model, fields, path, h, DMatrix::identity(m, m), false)
}

/// As [`transport`] from a given base value; with `with_position` the
/// immersion `r` is integrated alongside by `dr/ds = -U^-1 d_lambda a_mu U`,
/// starting from `r = 0`.
pub fn transport_from(
    model: &TodaModel,
    fields: &FieldConfig,
    path: &Staircase,
    h: f64,
    base_value: DMatrix<f64>,
    with_position: bool,
) -> Result<TransportState> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("transport step must be positive, got {h}")));
    }
    let alg = model.algebra();
    let m = alg.dim();
    if base_value.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: base_value.nrows(),
        });
    }
    let kappa = alg.killing_matrix();
    let mut u = base_value.clone();
    let mut r = DVector::zeros(m);
    let mut drift = killing_drift(&u, kappa);
    let mut warnings = Vec::new();

    let check_flat = |z: f64, zbar: f64, warnings: &mut Vec<String>| -> Result<()> {
        let res = zero_curvature_residual(model, fields, z, zbar)?.max_abs();
        if res > FLATNESS_TOL {
            warnings.push(format!(
                "zero-curvature residual {res:.3e} at ({z}, {zbar}); the result depends on the path"
            ));
        }
        Ok(())
    };

    // generator and lambda-derivative for the direction of a segment
    let rhs = |z: f64, zbar: f64, axis: usize| -> Result<(DMatrix<f64>, DVector<f64>)> {
        let g = gauge_at(model, fields, z, zbar)?;
        Ok((alg.ad(g.a(axis)), g.a_l(axis).coeffs().clone()))
    };

    for w in path.corners().windows(2) {
        let (p, q) = (w[0], w[1]);
        check_flat(p.0, p.1, &mut warnings)?;
        let (axis, len) = if p.1 == q.1 { (0, q.0 - p.0) } else { (1, q.1 - p.1) };
        if len == 0.0 {
            continue;
        }
        let n = (len.abs() / h).ceil().max(1.0) as usize;
        let ds = len / n as f64;
        let at = |s: f64| -> (f64, f64) {
            if axis == 0 {
                (p.0 + s, p.1)
            } else {
                (p.0, p.1 + s)
            }
        };
        for k in 0..n {
            let s0 = k as f64 * ds;
            let (z0, w0) = at(s0);
            let (zm, wm) = at(s0 + 0.5 * ds);
            let (z1, w1) = at(s0 + ds);
            let (a0, l0) = rhs(z0, w0, axis)?;
            let (am, lm) = rhs(zm, wm, axis)?;
            let (a1, l1) = rhs(z1, w1, axis)?;

            let k1 = -(&a0 * &u);
            let u2 = &u + &k1 * (0.5 * ds);
            let k2 = -(&am * &u2);
            let u3 = &u + &k2 * (0.5 * ds);
            let k3 = -(&am * &u3);
            let u4 = &u + &k3 * ds;
            let k4 = -(&a1 * &u4);
            if with_position {
                let pull = |uu: &DMatrix<f64>, l: &DVector<f64>| -> Result<DVector<f64>> {
                    uu.clone()
                        .lu()
                        .solve(l)
                        .map(|v| -v)
                        .ok_or_else(|| Error::Consistency("transport matrix became singular".into()))
                };
                let r1 = pull(&u, &l0)?;
                let r2 = pull(&u2, &lm)?;
                let r3 = pull(&u3, &lm)?;
                let r4 = pull(&u4, &l1)?;
                r += (r1 + r2 * 2.0 + r3 * 2.0 + r4) * (ds / 6.0);
            }
            u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (ds / 6.0);
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "transport diverged near ({z1}, {w1})"
                )));
            }
            drift = drift.max(killing_drift(&u, kappa));
        }
    }
    let end = path.end();
    check_flat(end.0, end.1, &mut warnings)?;
    Ok(TransportState {
        u,
        base_point: path.start(),
        base_value,
        path: path.clone(),
        step: h,
        killing_drift: drift,
        warnings,
        r: with_position.then(|| AlgebraElement::from_vector(r)),
    })
}

/// `r = U^-1 d_lambda U` at the end of `state`'s path, with `d_lambda U`
/// from two extra transports at `lambda +- LAMBDA_STEP`.
pub fn position_vector(state: &TransportState, model: &TodaModel, fields: &FieldConfig) -> Result<AlgebraElement> {
    let lam = model.lambda();
    let run = |l: f64| {
        transport_from(
            &model.with_lambda(l),
            fields,
            &state.path,
            state.step,
            state.base_value.clone(),
            false,
        )
    };
    let up = run(lam + LAMBDA_STEP)?;
    let dn = run(lam - LAMBDA_STEP)?;
    let u_l = (up.u - dn.u) / (2.0 * LAMBDA_STEP);
    let pulled = state.u_inverse()? * u_l;
    let (r, resid) = model.algebra().element_from_ad(&pulled);
    let tol = PROJECTION_TOL * pulled.amax().max(1.0);
    if resid > tol {
        return Err(Error::Consistency(format!(
            "U^-1 U_lambda is not in the adjoint image (residual {resid:.3e})"
        )));
    }
    Ok(r)
}

/// `r` by integrating `dr = -U^-1 a_{mu,lambda} U dz^mu` along the path.
pub fn position_vector_integral(model: &TodaModel, fields: &FieldConfig, path: &Staircase, h: f64) -> Result<AlgebraElement> {
    let m = model.algebra().dim();
    let st = transport_from(model, fields, path, h, DMatrix::identity(m, m), true)?;
    Ok(st.r.expect("position integrated"))
}

/// Tangent vectors `r_{,mu} = -U^-1 a_{mu,lambda} U` at the end of the path.
pub fn tangent_vectors(state: &TransportState, model: &TodaModel, fields: &FieldConfig) -> Result<[AlgebraElement; 2]> {
    let (z, zbar) = state.end_point();
    let g = gauge_at(model, fields, z, zbar)?;
    let inv = state.u_inverse()?;
    let t = |mu: usize| AlgebraElement::from_vector(-(&inv * g.a_l(mu).coeffs()));
    Ok([t(0), t(1)])
}

/// Smallest singular value of the `2 x m` matrix of tangent coefficients.
pub fn tangent_rank_margin(tangents: &[AlgebraElement; 2]) -> f64 {
    let m = tangents[0].dim();
    let mat = DMatrix::from_fn(2, m, |i, j| tangents[i].coeffs()[j]);
    linalg::min_singular_value(&mat)
}

/// Largest `|r_{,mu} + U^-1 a_{mu,lambda} U|` at `(z, zbar)`, with `r_{,mu}`
/// from a fourth-order central difference of `r` (step `fd`) and `r` from
/// the `lambda` difference of transports along `z`-first staircases.
pub fn tangent_derivative_residual(
    model: &TodaModel,
    fields: &FieldConfig,
    base: (f64, f64),
    point: (f64, f64),
    h: f64,
    fd: f64,
) -> Result<f64> {
    let r_at = |z: f64, zbar: f64| -> Result<DVector<f64>> {
        let st = transport(model, fields, &Staircase::z_first(base, (z, zbar)), h)?;
        Ok(position_vector(&st, model, fields)?.into_vector())
    };
    let st = transport(model, fields, &Staircase::z_first(base, point), h)?;
    let tangents = tangent_vectors(&st, model, fields)?;
    let mut worst: f64 = 0.0;
    for (mu, t) in tangents.iter().enumerate() {
        let shift = |k: f64| {
            if mu == 0 {
                (point.0 + k * fd, point.1)
            } else {
                (point.0, point.1 + k * fd)
            }
        };
        let mut d = DVector::zeros(t.dim());
        for (k, w) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
            let (z, zb) = shift(k);
            d += r_at(z, zb)? * w;
        }
        d /= 12.0 * fd;
        worst = worst.max((d - t.coeffs()).amax());
    }
    Ok(worst)
}

/// Immersion coordinates on a rectangular grid of nodes.
#[derive(Debug, Clone)]
pub struct ImmersionPatch {
    pub z: Vec<f64>,
    pub zbar: Vec<f64>,
    /// `r` at node `(i, j)`, index `i * zbar.len() + j`.
    pub r: Vec<AlgebraElement>,
    /// Coordinates along `T_i / sqrt|c|`, where `T_i` is the Killing-orthonormal
    /// basis of the algebra: `y^i = sqrt|c| eps_i k(r, T_i)`.
    pub y: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Marches `U` and `r` over the grid from its first node: along `zbar = zbar[0]`
/// in `z`, then along `zbar` from each of those nodes.
pub fn immersion_patch(model: &TodaModel, fields: &FieldConfig, z: &[f64], zbar: &[f64], h: f64) -> Result<ImmersionPatch> {
    if z.is_empty() || zbar.is_empty() {
        return Err(Error::InvalidInput("immersion grid is empty".into()));
    }
    let alg = model.algebra();
    let m = alg.dim();
    let ortho = orthonormal_basis(alg, 1.0)?;
    let root_c = model.c().abs().sqrt();
    let mut warnings = Vec::new();
    let mut r_nodes = vec![alg.zero(); z.len() * zbar.len()];

    let step = |from: (f64, f64), to: (f64, f64), u: DMatrix<f64>| {
        transport_from(model, fields, &Staircase::through(vec![from, to])?, h, u, true)
    };
    let mut u_row = DMatrix::identity(m, m);
    let mut r_row = DVector::zeros(m);
    for (i, &zi) in z.iter().enumerate() {
        if i > 0 {
            let st = step((z[i - 1], zbar[0]), (zi, zbar[0]), u_row.clone())?;
            // the increment is integrated with the full U, so it adds directly
            r_row += st.r.unwrap().coeffs();
            u_row = st.u;
            warnings.extend(st.warnings);
        }
        let mut u = u_row.clone();
        let mut r = r_row.clone();
        r_nodes[i * zbar.len()] = AlgebraElement::from_vector(r.clone());
        for j in 1..zbar.len() {
            let st = step((zi, zbar[j - 1]), (zi, zbar[j]), u.clone())?;
            r += st.r.unwrap().coeffs();
            u = st.u;
            warnings.extend(st.warnings);
            r_nodes[i * zbar.len() + j] = AlgebraElement::from_vector(r.clone());
        }
    }
    warnings.dedup();
    let y = r_nodes
        .iter()
        .map(|r| {
            ortho
                .vectors
                .iter()
                .zip(&ortho.signs)
                .map(|(t, s)| root_c * f64::from(*s) * alg.kf(r, t))
                .collect()
        })
        .collect();
    Ok(ImmersionPatch {
        z: z.to_vec(),
        zbar: zbar.to_vec(),
        r: r_nodes,
        y,
        warnings,
    })
}

impl ImmersionPatch {
    /// CSV with columns `z, zbar, y1..ym`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let m = self.y.first().map_or(0, Vec::len);
        let mut header = vec!["z".to_string(), "zbar".to_string()];
        header.extend((1..=m).map(|i| format!("y{i}")));
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for (i, z) in self.z.iter().enumerate() {
            for (j, zb) in self.zbar.iter().enumerate() {
                let mut row = vec![crate::toda::fmt_f64(*z), crate::toda::fmt_f64(*zb)];
                row.extend(self.y[i * self.zbar.len() + j].iter().map(|v| crate::toda::fmt_f64(*v)));
                w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
