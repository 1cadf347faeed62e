//! Gauge potentials `a_1 = e^-l B eps- B^-1`, `a_2 = -e^l eps+ - d2B B^-1`
//! and their analytic derivatives.

use super::{FieldConfig, TodaModel};
use crate::algebra::{AlgebraElement, LieAlgebra};
use crate::error::{Error, Result};

/// `|k(B eps- B^-1, eps+)|` below this marks a degenerate point.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Potentials and their derivatives at one point.
///
/// `aA_Bl` is `d_B d_lambda a_A`; the `a_2` mixed derivatives vanish
/// identically but are stored so consumers can index uniformly.
#[derive(Debug, Clone)]
pub struct GaugeData {
    pub z: f64,
    pub zbar: f64,
    pub phi: Vec<f64>,
    pub d1_phi: Vec<f64>,
    pub d2_phi: Vec<f64>,
    pub a1: AlgebraElement,
    pub a2: AlgebraElement,
    pub a1_l: AlgebraElement,
    pub a2_l: AlgebraElement,
    pub a1_1l: AlgebraElement,
    pub a1_2l: AlgebraElement,
    pub a2_1l: AlgebraElement,
    pub a2_2l: AlgebraElement,
    /// `B eps- B^-1`.
    pub b_conj_eps: AlgebraElement,
    /// `d1 B B^-1 = sum_i d1 phi_i h_i`.
    pub dbbinv_1: AlgebraElement,
    /// `d2 B B^-1 = sum_i d2 phi_i h_i`.
    pub dbbinv_2: AlgebraElement,
    /// `k(B eps- B^-1, eps+)`.
    pub pairing: f64,
}

impl GaugeData {
    pub fn a(&self, mu: usize) -> &AlgebraElement {
        [&self.a1, &self.a2][mu]
    }

    /// `d_lambda a_mu`.
    pub fn a_l(&self, mu: usize) -> &AlgebraElement {
        [&self.a1_l, &self.a2_l][mu]
    }

    /// `d_nu d_lambda a_mu`.
    pub fn a_nl(&self, mu: usize, nu: usize) -> &AlgebraElement {
        [[&self.a1_1l, &self.a1_2l], [&self.a2_1l, &self.a2_2l]][mu][nu]
    }

    /// The point violates the nondegeneracy condition on `k(B eps- B^-1, eps+)`.
    pub fn is_degenerate(&self) -> bool {
        self.pairing.abs() < DEGENERACY_TOL
    }
}

fn check_fields(model: &TodaModel, fields: &FieldConfig) -> Result<()> {
    if fields.n_fields() != model.n_fields() {
        return Err(Error::DimensionMismatch {
            expected: model.n_fields(),
            found: fields.n_fields(),
        });
    }
    Ok(())
}

pub fn gauge_at(model: &TodaModel, fields: &FieldConfig, z: f64, zbar: f64) -> Result<GaugeData> {
    check_fields(model, fields)?;
    let s = fields.sample(z, zbar)?;
    if s.phi.iter().chain(&s.d1).chain(&s.d2).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("field values at ({z}, {zbar})")));
    }
    let alg = model.algebra();
    let lam = model.lambda();
    let (em, ep) = ((-lam).exp(), lam.exp());
    let p = model.conj_eps_minus(&s.phi);
    let d1 = model.cartan_combination(&s.d1);
    let d2 = model.cartan_combination(&s.d2);
    let zero = alg.zero();
    Ok(GaugeData {
        z,
        zbar,
        a1: p.scaled(em),
        a2: -model.eps_plus().scaled(ep) - d2.clone(),
        a1_l: p.scaled(-em),
        a2_l: model.eps_plus().scaled(-ep),
        a1_1l: alg.br(&d1, &p).scaled(-em),
        a1_2l: alg.br(&d2, &p).scaled(-em),
        a2_1l: zero.clone(),
        a2_2l: zero,
        pairing: alg.kf(&p, model.eps_plus()),
        b_conj_eps: p,
        dbbinv_1: d1,
        dbbinv_2: d2,
        phi: s.phi,
        d1_phi: s.d1,
        d2_phi: s.d2,
    })
}

/// `sum_i (d1 d2 phi_i) h_i + [eps-, B^-1 eps+ B]`.
pub fn field_residual(model: &TodaModel, fields: &FieldConfig, z: f64, zbar: f64) -> Result<AlgebraElement> {
    check_fields(model, fields)?;
    let s = fields.sample(z, zbar)?;
    let d12 = fields.cross_derivative(z, zbar)?;
    let conj = model.inv_conj_eps_plus(&s.phi);
    Ok(model.cartan_combination(&d12) + model.algebra().br(model.eps_minus(), &conj))
}

/// `d1 a2 - d2 a1 + [a1, a2]` from given parts.
pub fn zero_curvature_from_parts(
    algebra: &LieAlgebra,
    a1: &AlgebraElement,
    a2: &AlgebraElement,
    d1_a2: &AlgebraElement,
    d2_a1: &AlgebraElement,
) -> AlgebraElement {
    d1_a2 - d2_a1 + algebra.br(a1, a2)
}

/// Curvature of the potentials, with `d1 a2 = -sum_i d1 d2 phi_i h_i` and
/// `d2 a1 = e^-l [d2B B^-1, B eps- B^-1]`.
pub fn zero_curvature_residual(model: &TodaModel, fields: &FieldConfig, z: f64, zbar: f64) -> Result<AlgebraElement> {
    let g = gauge_at(model, fields, z, zbar)?;
    let d12 = fields.cross_derivative(z, zbar)?;
    let d1_a2 = -model.cartan_combination(&d12);
    let d2_a1 = model
        .algebra()
        .br(&g.dbbinv_2, &g.b_conj_eps)
        .scaled((-model.lambda()).exp());
    Ok(zero_curvature_from_parts(model.algebra(), &g.a1, &g.a2, &d1_a2, &d2_a1))
}
