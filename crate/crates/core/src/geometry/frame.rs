//! Normal frames `N^0_A`: `k(a_{mu,lambda}, N^0_A) = 0`, `c k(N^0_A, N^0_B) = eta_AB`.

use nalgebra::{DMatrix, DVector};

use super::{Potentials, TodaSurface};
use crate::algebra::{
    indefinite_gram_schmidt, orthonormal::leading_index, orthonormal_basis, replay_gram_schmidt,
    AlgebraElement, PivotStep,
};
use crate::error::{Error, Result};
use crate::linalg;

/// Pivot choices and orientation coefficients of a frame construction,
/// replayed at nearby points so that the frame varies smoothly.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    pub steps: Vec<PivotStep>,
    /// Coefficient index made positive for each frame vector.
    pub sign_index: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct NormalFrame {
    pub n0: Vec<AlgebraElement>,
    /// Diagonal of `eta_AB`.
    pub eta: Vec<i8>,
    /// Number of negative entries of `eta`.
    pub nu_perp: usize,
    pub plan: Option<FramePlan>,
}

impl NormalFrame {
    pub fn len(&self) -> usize {
        self.n0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n0.is_empty()
    }

    fn from_parts(n0: Vec<AlgebraElement>, eta: Vec<i8>, plan: Option<FramePlan>) -> Self {
        let nu_perp = eta.iter().filter(|s| **s < 0).count();
        NormalFrame { n0, eta, nu_perp, plan }
    }

    /// Largest `|k(a_{mu,lambda}, N_A)|` and `|c k(N_A, N_B) - eta_AB|`.
    pub fn defects<P: Potentials + ?Sized>(&self, p: &P, z: f64, zbar: f64) -> Result<(f64, f64)> {
        let alg = p.algebra();
        let jet = p.jet(z, zbar)?;
        let mut orth: f64 = 0.0;
        let mut norm: f64 = 0.0;
        for (a, na) in self.n0.iter().enumerate() {
            for al in &jet.a_l {
                orth = orth.max(alg.kf(al, na).abs());
            }
            for (b, nb) in self.n0.iter().enumerate() {
                let want = if a == b { f64::from(self.eta[a]) } else { 0.0 };
                norm = norm.max((p.c() * alg.kf(na, nb) - want).abs());
            }
        }
        Ok((orth, norm))
    }
}

/// Anything that yields a normal frame at each point.
pub trait FrameField: Sync {
    fn frame(&self, z: f64, zbar: f64) -> Result<NormalFrame>;
}

/// `v - sum k(v, a_mu,l) G^{mu nu} a_nu,l` for every candidate.
fn projected_candidates<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64) -> Result<Vec<DVector<f64>>> {
    let alg = p.algebra();
    let jet = p.jet(z, zbar)?;
    let gram = DMatrix::from_fn(2, 2, |i, j| alg.kf(&jet.a_l[i], &jet.a_l[j]));
    let scale = linalg::scale_of(gram.as_slice());
    if gram.determinant().abs() < 1e-12 * scale * scale {
        return Err(Error::DegeneratePoint {
            z,
            zbar,
            reason: "tangent directions pair degenerately under the Killing form".into(),
        });
    }
    let ginv = gram.try_inverse().ok_or_else(|| Error::DegeneratePoint {
        z,
        zbar,
        reason: "singular tangent Gram matrix".into(),
    })?;
    let reference = orthonormal_basis(alg, 1.0)?;
    Ok(reference
        .vectors
        .iter()
        .map(|v| {
            let pair = [alg.kf(v, &jet.a_l[0]), alg.kf(v, &jet.a_l[1])];
            let mut out = v.coeffs().clone();
            for mu in 0..2 {
                for nu in 0..2 {
                    out -= jet.a_l[nu].coeffs() * (pair[mu] * ginv[(mu, nu)]);
                }
            }
            out
        })
        .collect())
}

fn build<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64, plan: Option<&FramePlan>) -> Result<NormalFrame> {
    let alg = p.algebra();
    let rank = alg.dim().checked_sub(2).ok_or_else(|| {
        Error::UnsupportedAlgebra("algebra too small for a two-dimensional surface".into())
    })?;
    let cands = projected_candidates(p, z, zbar)?;
    let form = alg.killing_matrix() * p.c();
    let gs = match plan {
        Some(plan) => replay_gram_schmidt(&cands, &form, &plan.steps)?,
        None => indefinite_gram_schmidt(&cands, &form, rank)?,
    };
    let mut sign_index = Vec::with_capacity(rank);
    let mut n0 = Vec::with_capacity(rank);
    for (a, v) in gs.vectors.into_iter().enumerate() {
        let idx = match plan {
            Some(pl) => pl.sign_index[a],
            None => leading_index(&v),
        };
        sign_index.push(idx);
        n0.push(AlgebraElement::from_vector(if v[idx] < 0.0 { -v } else { v }));
    }
    let plan = FramePlan {
        steps: gs.plan,
        sign_index,
    };
    Ok(NormalFrame::from_parts(n0, gs.signs, Some(plan)))
}

/// Killing-orthogonal complement of the tangent directions, orthonormalized
/// for `c k` by the pivoted indefinite Gram-Schmidt.
///
/// Candidates are the field-independent orthonormal basis of the algebra
/// projected onto the complement. Each vector is oriented so that its first
/// non-negligible coefficient is positive.
pub fn normal_frame<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64) -> Result<NormalFrame> {
    build(p, z, zbar, None)
}

/// Frames built by the solver with a plan fixed at an anchor point.
pub struct SolverFrames<'a, P: ?Sized> {
    pub potentials: &'a P,
    pub plan: FramePlan,
}

impl<'a, P: Potentials + ?Sized> SolverFrames<'a, P> {
    /// Builds the frame at the anchor and keeps its plan.
    pub fn anchored(potentials: &'a P, z: f64, zbar: f64) -> Result<(Self, NormalFrame)> {
        let frame = normal_frame(potentials, z, zbar)?;
        let plan = frame.plan.clone().expect("solver frames carry a plan");
        Ok((SolverFrames { potentials, plan }, frame))
    }
}

impl<P: Potentials + ?Sized> FrameField for SolverFrames<'_, P> {
    fn frame(&self, z: f64, zbar: f64) -> Result<NormalFrame> {
        build(self.potentials, z, zbar, Some(&self.plan))
    }
}

/// Another frame field conjugated by a constant `Ad_g`.
pub struct ConjugatedFrames<'a, F: ?Sized> {
    pub inner: &'a F,
    pub ad_g: DMatrix<f64>,
}

impl<F: FrameField + ?Sized> FrameField for ConjugatedFrames<'_, F> {
    fn frame(&self, z: f64, zbar: f64) -> Result<NormalFrame> {
        let f = self.inner.frame(z, zbar)?;
        let n0 = f
            .n0
            .iter()
            .map(|n| AlgebraElement::from_vector(&self.ad_g * n.coeffs()))
            .collect();
        Ok(NormalFrame::from_parts(n0, f.eta, f.plan))
    }
}

/// The explicit `sl(3)` frame with
/// `c_1 = e^{(3/2)(phi_1 - phi_2)} / (2 cosh((3/2)(phi_1 - phi_2)))` and
/// `c_2 = e^{-(3/2)(phi_1 - phi_2)} / (2 cosh((3/2)(phi_1 - phi_2)))`.
/// Requires the principal `sl(3)` model with `alpha_sq = 2`.
pub fn explicit_sl3_frame(surface: &TodaSurface<'_>, z: f64, zbar: f64) -> Result<NormalFrame> {
    let model = surface.model;
    match model.sl_params() {
        Some((3, a2)) if (a2 - 2.0).abs() < 1e-15 => {}
        _ => {
            return Err(Error::UnsupportedAlgebra(
                "the explicit frame exists for sl(3) with alpha_sq = 2 only".into(),
            ))
        }
    }
    let phi = surface.fields.sample(z, zbar)?.phi;
    let alg = model.algebra();
    let e = |label: &str| alg.basis_element(alg.index_of(label).expect("sl(3) label"));
    let d = 1.5 * (phi[0] - phi[1]);
    let denom = 2.0 * d.cosh();
    let (c1, c2) = (d.exp() / denom, (-d).exp() / denom);
    let s = 1.0 / model.c().abs().sqrt();
    let s2 = 1.0 / (2.0 * model.c().abs()).sqrt();
    let x = e("E_a1").scaled(c1) - e("E_a2").scaled(c2);
    let y = e("E_-a1") - e("E_-a2");
    let (top, bottom) = (e("E_a1+a2"), e("E_-(a1+a2)"));
    let n0 = vec![
        e("H1").scaled(s),
        e("H2").scaled(s),
        (&x - &y).scaled(s2),
        (&x + &y).scaled(s2),
        (&top + &bottom).scaled(s2),
        (&top - &bottom).scaled(s2),
    ];
    let sc: i8 = if model.c() > 0.0 { 1 } else { -1 };
    let eta = vec![sc, sc, -sc, sc, sc, -sc];
    Ok(NormalFrame::from_parts(n0, eta, None))
}

/// Frame field wrapper around [`explicit_sl3_frame`].
pub struct ExplicitSl3Frames<'a>(pub TodaSurface<'a>);

impl FrameField for ExplicitSl3Frames<'_> {
    fn frame(&self, z: f64, zbar: f64) -> Result<NormalFrame> {
        explicit_sl3_frame(&self.0, z, zbar)
    }
}

/// Projector onto the span of the frame: `x -> sum_A eta_A N_A c k(N_A, x)`.
pub fn normal_projector(algebra: &crate::algebra::LieAlgebra, c: f64, frame: &NormalFrame) -> DMatrix<f64> {
    let m = algebra.dim();
    let mut p = DMatrix::zeros(m, m);
    for (n, s) in frame.n0.iter().zip(&frame.eta) {
        let row = (algebra.killing_matrix() * n.coeffs()) * c;
        p += n.coeffs() * row.transpose() * f64::from(*s);
    }
    p
}
