//! Abelian Toda models, their field configurations and gauge potentials.

mod fields;
mod gauge;
mod goursat;
mod solutions;

pub use fields::{fmt_f64, Domain, FieldConfig, FieldKind, FieldSample, GridField};
pub use gauge::{
    field_residual, gauge_at, zero_curvature_from_parts, zero_curvature_residual, GaugeData,
    DEGENERACY_TOL,
};
pub use goursat::{goursat_solve, CharacteristicData, GoursatSolution};
pub use solutions::{
    exact_solution, required_coupling_product, solution_fields, SolutionParams, SOLUTION_NAMES,
};

use nalgebra::DMatrix;

use crate::algebra::{build_sl, AlgebraElement, Grading, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg;

/// Scalar parameters of a Toda model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub mu_plus: f64,
    pub mu_minus: f64,
    /// Metric constant of the ambient space, `g = c k`.
    pub c: f64,
    /// Spectral parameter.
    pub lambda: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings {
            mu_plus: 1.0,
            mu_minus: 1.0,
            c: 1.0,
            lambda: 0.0,
        }
    }
}

/// An abelian Toda model: `B = exp(sum_i phi_i h_i)` with constant
/// `eps_plus` in `G_1` and `eps_minus` in `G_-1`.
#[derive(Debug, Clone)]
pub struct TodaModel {
    algebra: LieAlgebra,
    grading: Grading,
    eps_plus: AlgebraElement,
    eps_minus: AlgebraElement,
    cartan_dirs: Vec<AlgebraElement>,
    couplings: Couplings,
    /// `(n, alpha_sq)` when built from `sl(n)`.
    sl: Option<(usize, f64)>,
    cartan_ad: Vec<DMatrix<f64>>,
    cartan_pinv: DMatrix<f64>,
}

impl TodaModel {
    /// Builds a model from unit generators `e_plus` in `G_1`, `e_minus` in
    /// `G_-1`; the constants are `eps_plus = mu_plus e_plus`, `eps_minus = mu_minus e_minus`.
    pub fn new(
        algebra: LieAlgebra,
        grading: Grading,
        e_plus: AlgebraElement,
        e_minus: AlgebraElement,
        cartan_dirs: Vec<AlgebraElement>,
        couplings: Couplings,
    ) -> Result<Self> {
        let model = Self::assemble(algebra, grading, e_plus, e_minus, cartan_dirs, couplings, None)?;
        if model.eps_plus.max_abs() == 0.0 || model.eps_minus.max_abs() == 0.0 {
            return Err(Error::InvalidModel(
                "eps_plus and eps_minus must both be nonzero".into(),
            ));
        }
        Ok(model)
    }

    /// The principal abelian Toda model of `sl(n, R)`:
    /// `eps_plus = mu_plus sum_i E_{alpha_i}`, `eps_minus = mu_minus sum_i E_{-alpha_i}`,
    /// `B = exp(sum_i phi_i h_i)`.
    pub fn sl(n: usize, alpha_sq: f64, couplings: Couplings) -> Result<Self> {
        let sl = build_sl(n, alpha_sq)?;
        let dim = sl.algebra.dim();
        let sum = |v: &[AlgebraElement]| {
            v.iter()
                .fold(AlgebraElement::zeros(dim), |acc, x| &acc + x)
        };
        let e_plus = sum(&sl.chevalley.e_plus);
        let e_minus = sum(&sl.chevalley.e_minus);
        let h = sl.chevalley.h.clone();
        let mut model = Self::new(sl.algebra, sl.grading, e_plus, e_minus, h, couplings)?;
        model.sl = Some((n, alpha_sq));
        Ok(model)
    }

    /// Same model with `eps_plus`, `eps_minus` multiplied by the given factors.
    /// Zero factors are allowed here; the result is a decoupled limit model.
    pub fn scaled_limit(&self, plus_factor: f64, minus_factor: f64) -> Result<Self> {
        let mut c = self.couplings;
        c.mu_plus *= plus_factor;
        c.mu_minus *= minus_factor;
        let mut m = self.clone();
        m.eps_plus = self.eps_plus.scaled(plus_factor);
        m.eps_minus = self.eps_minus.scaled(minus_factor);
        m.couplings = c;
        Ok(m)
    }

    fn assemble(
        algebra: LieAlgebra,
        grading: Grading,
        e_plus: AlgebraElement,
        e_minus: AlgebraElement,
        cartan_dirs: Vec<AlgebraElement>,
        couplings: Couplings,
        sl: Option<(usize, f64)>,
    ) -> Result<Self> {
        algebra.check(&e_plus)?;
        algebra.check(&e_minus)?;
        let Couplings {
            mu_plus,
            mu_minus,
            c,
            lambda,
        } = couplings;
        for (name, v) in [("mu_plus", mu_plus), ("mu_minus", mu_minus), ("c", c), ("lambda", lambda)] {
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!("{name} must be finite")));
            }
        }
        if c == 0.0 {
            return Err(Error::InvalidModel("metric constant c must be nonzero".into()));
        }
        let tol = 1e-12 * e_plus.max_abs().max(e_minus.max_abs()).max(1.0);
        if grading.off_grade_residual(&e_plus, 1) > tol {
            return Err(Error::InvalidModel("eps_plus is not in G_1".into()));
        }
        if grading.off_grade_residual(&e_minus, -1) > tol {
            return Err(Error::InvalidModel("eps_minus is not in G_-1".into()));
        }
        if cartan_dirs.is_empty() {
            return Err(Error::InvalidModel("at least one Cartan direction is needed".into()));
        }
        for h in &cartan_dirs {
            algebra.check(h)?;
            if grading.off_grade_residual(h, 0) > 1e-12 * h.max_abs().max(1.0) {
                return Err(Error::InvalidModel("Cartan direction outside G_0".into()));
            }
        }
        for (i, hi) in cartan_dirs.iter().enumerate() {
            for hj in &cartan_dirs[i + 1..] {
                let b = algebra.br(hi, hj);
                if b.max_abs() > 1e-12 * hi.max_abs().max(hj.max_abs()).max(1.0) {
                    return Err(Error::InvalidModel(
                        "Cartan directions do not commute (non-abelian G_0 is unsupported)".into(),
                    ));
                }
            }
        }
        let m = algebra.dim();
        let r = cartan_dirs.len();
        let hmat = DMatrix::from_fn(m, r, |row, col| cartan_dirs[col].coeffs()[row]);
        let gram = hmat.transpose() * &hmat;
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidModel("Cartan directions are linearly dependent".into()))?;
        let cartan_pinv = gram_inv * hmat.transpose();
        let cartan_ad = cartan_dirs.iter().map(|h| algebra.ad(h)).collect();

        Ok(TodaModel {
            eps_plus: e_plus.scaled(mu_plus),
            eps_minus: e_minus.scaled(mu_minus),
            algebra,
            grading,
            cartan_dirs,
            couplings,
            sl,
            cartan_ad,
            cartan_pinv,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn eps_plus(&self) -> &AlgebraElement {
        &self.eps_plus
    }

    pub fn eps_minus(&self) -> &AlgebraElement {
        &self.eps_minus
    }

    pub fn cartan_dirs(&self) -> &[AlgebraElement] {
        &self.cartan_dirs
    }

    pub fn n_fields(&self) -> usize {
        self.cartan_dirs.len()
    }

    pub fn couplings(&self) -> Couplings {
        self.couplings
    }

    pub fn c(&self) -> f64 {
        self.couplings.c
    }

    pub fn lambda(&self) -> f64 {
        self.couplings.lambda
    }

    /// `(n, alpha_sq)` for the built-in `sl(n)` models.
    pub fn sl_params(&self) -> Option<(usize, f64)> {
        self.sl
    }

    /// Same model at another spectral parameter.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        let mut m = self.clone();
        m.couplings.lambda = lambda;
        m
    }

    /// Same model with another metric constant (must be nonzero).
    pub fn with_c(&self, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidModel("metric constant c must be nonzero".into()));
        }
        let mut m = self.clone();
        m.couplings.c = c;
        Ok(m)
    }

    /// `sum_i v_i h_i`.
    pub fn cartan_combination(&self, v: &[f64]) -> AlgebraElement {
        let mut out = self.algebra.zero();
        for (h, x) in self.cartan_dirs.iter().zip(v) {
            out += &h.scaled(*x);
        }
        out
    }

    /// Adjoint matrix of `B = exp(sum_i phi_i h_i)`.
    pub fn b_adjoint(&self, phi: &[f64]) -> DMatrix<f64> {
        let m = self.algebra.dim();
        let mut gen = DMatrix::zeros(m, m);
        for (ad, p) in self.cartan_ad.iter().zip(phi) {
            gen += ad * *p;
        }
        linalg::expm(&gen)
    }

    /// `B eps_minus B^-1`.
    pub fn conj_eps_minus(&self, phi: &[f64]) -> AlgebraElement {
        AlgebraElement::from_vector(self.b_adjoint(phi) * self.eps_minus.coeffs())
    }

    /// `B^-1 eps_plus B`.
    pub fn inv_conj_eps_plus(&self, phi: &[f64]) -> AlgebraElement {
        let neg: Vec<f64> = phi.iter().map(|p| -p).collect();
        AlgebraElement::from_vector(self.b_adjoint(&neg) * self.eps_plus.coeffs())
    }

    /// Coefficients of an algebra element along the Cartan directions.
    pub fn cartan_coefficients(&self, x: &AlgebraElement) -> Vec<f64> {
        (&self.cartan_pinv * x.coeffs()).iter().copied().collect()
    }

    /// Right-hand side of `d1 d2 phi_i = rhs_i(phi)`: the Cartan coefficients
    /// of `-[eps_minus, B^-1 eps_plus B]`.
    pub fn field_rhs(&self, phi: &[f64]) -> Vec<f64> {
        let w = -self.algebra.br(&self.eps_minus, &self.inv_conj_eps_plus(phi));
        self.cartan_coefficients(&w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_rhs_is_liouville() {
        let m = TodaModel::sl(
            2,
            2.0,
            Couplings {
                mu_plus: 0.7,
                mu_minus: 1.3,
                ..Default::default()
            },
        )
        .unwrap();
        for phi in [-0.4, 0.0, 0.9] {
            let rhs = m.field_rhs(&[phi]);
            let want = 0.7 * 1.3 * (-2.0 * phi).exp();
            assert!((rhs[0] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn sl3_rhs_uses_cartan_matrix() {
        let m = TodaModel::sl(3, 2.0, Couplings::default()).unwrap();
        let (p1, p2) = (0.3, -0.2);
        let rhs = m.field_rhs(&[p1, p2]);
        assert!((rhs[0] - (-2.0 * p1 + p2).exp()).abs() < 1e-13);
        assert!((rhs[1] - (p1 - 2.0 * p2).exp()).abs() < 1e-13);
    }

    #[test]
    fn zero_c_and_zero_eps_are_rejected() {
        let bad_c = Couplings {
            c: 0.0,
            ..Default::default()
        };
        assert!(matches!(TodaModel::sl(2, 2.0, bad_c), Err(Error::InvalidModel(_))));
        let bad_mu = Couplings {
            mu_minus: 0.0,
            ..Default::default()
        };
        assert!(matches!(TodaModel::sl(2, 2.0, bad_mu), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn eps_outside_grade_is_rejected() {
        let sl = build_sl(2, 2.0).unwrap();
        let h = sl.chevalley.h[0].clone();
        let err = TodaModel::new(
            sl.algebra,
            sl.grading,
            h.clone(),
            sl.chevalley.e_minus[0].clone(),
            vec![h],
            Couplings::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidModel(_)));
    }

    #[test]
    fn scaled_limit_allows_decoupling() {
        let m = TodaModel::sl(2, 2.0, Couplings::default()).unwrap();
        let free = m.scaled_limit(1.0, 0.0).unwrap();
        assert_eq!(free.eps_minus().max_abs(), 0.0);
        assert_eq!(free.field_rhs(&[0.3])[0], 0.0);
    }
}
