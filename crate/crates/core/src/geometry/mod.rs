//! Fundamental forms, normal frames and curvature of the surfaces swept by
//! `r = U^-1 d_lambda U`.
//!
//! Everything here is evaluated from a [`Potentials`] source: the gauge
//! potentials and their `lambda` and mixed derivatives at a point. Toda
//! configurations provide them analytically; [`Gauged`] conjugates any source
//! by a constant group element.

mod forms;
mod frame;
mod gauge_check;

pub use forms::{
    christoffel_direct, christoffel_metric, gauss_extrinsic_curvature, gaussian_curvature,
    gcr_residuals, mean_curvature, metric, normal_connection, point_forms, riemann, second_form,
    second_form_from_frame_derivatives, tangent_pair, CurvatureMode, FundamentalForms,
    GcrResiduals, MeanCurvature, Riemann,
};
pub use frame::{
    normal_frame, normal_projector, explicit_sl3_frame, ConjugatedFrames, FrameField, FramePlan,
    NormalFrame, ExplicitSl3Frames, SolverFrames,
};
pub use gauge_check::{gauge_invariance_check, GaugeDeviation};

use nalgebra::DMatrix;

use crate::algebra::{AlgebraElement, LieAlgebra};
use crate::error::Result;
use crate::toda::{gauge_at, FieldConfig, TodaModel};

/// 2 x 2 array indexed `[mu][nu]`.
pub type Mat2 = [[f64; 2]; 2];
/// `gamma[mu][alpha][beta] = Gamma^mu_{alpha beta}`.
pub type Christoffel = [[[f64; 2]; 2]; 2];

/// Potentials at a point: `a_mu`, `d_lambda a_mu` and `d_nu d_lambda a_mu`.
#[derive(Debug, Clone)]
pub struct Jet {
    pub a: [AlgebraElement; 2],
    pub a_l: [AlgebraElement; 2],
    /// `a_nl[mu][nu] = d_nu d_lambda a_mu`.
    pub a_nl: [[AlgebraElement; 2]; 2],
}

/// A source of gauge potentials together with the ambient metric constant.
pub trait Potentials: Sync {
    fn algebra(&self) -> &LieAlgebra;
    fn c(&self) -> f64;
    fn jet(&self, z: f64, zbar: f64) -> Result<Jet>;
}

/// A Toda model paired with a field configuration.
#[derive(Debug, Clone, Copy)]
pub struct TodaSurface<'a> {
    pub model: &'a TodaModel,
    pub fields: &'a FieldConfig,
}

impl<'a> TodaSurface<'a> {
    pub fn new(model: &'a TodaModel, fields: &'a FieldConfig) -> Self {
        TodaSurface { model, fields }
    }
}

impl Potentials for TodaSurface<'_> {
    fn algebra(&self) -> &LieAlgebra {
        self.model.algebra()
    }

    fn c(&self) -> f64 {
        self.model.c()
    }

    fn jet(&self, z: f64, zbar: f64) -> Result<Jet> {
        let g = gauge_at(self.model, self.fields, z, zbar)?;
        if g.is_degenerate() {
            return Err(crate::Error::DegeneratePoint {
                z,
                zbar,
                reason: format!("k(B eps- B^-1, eps+) = {:e}", g.pairing),
            });
        }
        Ok(Jet {
            a: [g.a1.clone(), g.a2.clone()],
            a_l: [g.a1_l.clone(), g.a2_l.clone()],
            a_nl: [
                [g.a1_1l.clone(), g.a1_2l.clone()],
                [g.a2_1l.clone(), g.a2_2l.clone()],
            ],
        })
    }
}

/// Potentials conjugated by a constant group element: `a^g = g a g^-1`.
#[derive(Debug, Clone)]
pub struct Gauged<P> {
    pub inner: P,
    /// Matrix of `Ad_g`.
    pub ad_g: DMatrix<f64>,
}

impl<P: Potentials> Gauged<P> {
    /// Gauge transformation by `g = exp(x)`.
    pub fn by_exp(inner: P, x: &AlgebraElement) -> Self {
        let ad_g = inner.algebra().ad_exp_matrix(x);
        Gauged { inner, ad_g }
    }

    pub fn conj(&self, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_vector(&self.ad_g * x.coeffs())
    }
}

impl<P: Potentials> Potentials for Gauged<P> {
    fn algebra(&self) -> &LieAlgebra {
        self.inner.algebra()
    }

    fn c(&self) -> f64 {
        self.inner.c()
    }

    fn jet(&self, z: f64, zbar: f64) -> Result<Jet> {
        let j = self.inner.jet(z, zbar)?;
        let t = |x: &AlgebraElement| self.conj(x);
        Ok(Jet {
            a: [t(&j.a[0]), t(&j.a[1])],
            a_l: [t(&j.a_l[0]), t(&j.a_l[1])],
            a_nl: [
                [t(&j.a_nl[0][0]), t(&j.a_nl[0][1])],
                [t(&j.a_nl[1][0]), t(&j.a_nl[1][1])],
            ],
        })
    }
}

/// Central difference of a vector-valued map along `axis` (0: `z`, 1: `zbar`).
/// `order` 2 uses two samples, `order` 4 uses four.
pub(crate) fn central_diff<F>(f: F, z: f64, zbar: f64, axis: usize, h: f64, order: usize) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> Result<Vec<f64>>,
{
    let at = |k: f64| {
        if axis == 0 {
            f(z + k * h, zbar)
        } else {
            f(z, zbar + k * h)
        }
    };
    let stencil: &[(f64, f64)] = if order >= 4 {
        &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)]
    } else {
        &[(-1.0, -0.5), (1.0, 0.5)]
    };
    let mut out: Option<Vec<f64>> = None;
    for &(k, w) in stencil {
        let v = at(k)?;
        let acc = out.get_or_insert_with(|| vec![0.0; v.len()]);
        for (o, x) in acc.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    Ok(out.unwrap_or_default().into_iter().map(|v| v / h).collect())
}

#[cfg(test)]
mod tests;
