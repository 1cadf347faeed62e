//! Finite-dimensional semisimple real Lie algebras as numerical objects.
//!
//! A [`LieAlgebra`] is fixed by its structure constants `c[k][i][j]`
//! (`[T_i, T_j] = sum_k c[k][i][j] T_k`) together with a positive
//! normalization of the invariant form. The form itself is never taken
//! from the caller: it is always recomputed as `scale * trace(ad_i ad_j)`.

mod element;
mod grading;
pub(crate) mod orthonormal;
mod sl;

pub use element::AlgebraElement;
pub use grading::Grading;
pub use orthonormal::{
    indefinite_gram_schmidt, orthonormal_basis, replay_gram_schmidt, GramSchmidt,
    OrthonormalBasis, PivotStep,
};
pub use sl::{build_sl, ChevalleyHandles, SlAlgebra};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

const STRUCTURE_TOL: f64 = 1e-12;

/// Serializable description of an algebra: labels, structure constants and
/// the normalization of the invariant form.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgebraDefinition {
    pub labels: Vec<String>,
    /// `structure_constants[k][i][j]`.
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    /// Positive factor multiplying `trace(ad ad)`.
    #[serde(default = "default_form_scale")]
    pub form_scale: f64,
    /// Optional user-supplied invariant form; only cross-checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing_matrix: Option<Vec<Vec<f64>>>,
}

fn default_form_scale() -> f64 {
    1.0
}

/// A real semisimple Lie algebra with its (normalized) Killing form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "AlgebraDefinition", into = "AlgebraDefinition")]
pub struct LieAlgebra {
    labels: Vec<String>,
    structure: Vec<f64>,
    form_scale: f64,
    ad_basis: Vec<DMatrix<f64>>,
    killing: DMatrix<f64>,
}

impl LieAlgebra {
    /// Builds an algebra from flat structure constants, index `(k * m + i) * m + j`.
    pub fn new(labels: Vec<String>, structure: Vec<f64>, form_scale: f64) -> Result<Self> {
        let m = labels.len();
        if m == 0 {
            return Err(Error::InvalidStructure("empty basis".into()));
        }
        if structure.len() != m * m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m * m,
                found: structure.len(),
            });
        }
        if !(form_scale.is_finite() && form_scale > 0.0) {
            return Err(Error::InvalidStructure(format!(
                "form scale must be positive, got {form_scale}"
            )));
        }
        let idx = |k: usize, i: usize, j: usize| (k * m + i) * m + j;
        let scale = linalg::scale_of(&structure);

        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let s = structure[idx(k, i, j)] + structure[idx(k, j, i)];
                    if s.abs() > STRUCTURE_TOL * scale {
                        return Err(Error::InvalidStructure(format!(
                            "antisymmetry fails at c[{k}][{i}][{j}]"
                        )));
                    }
                }
            }
        }

        // Jacobi: sum_l c[l][i][j] c[n][l][k] + cyclic(i, j, k) = 0
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for n in 0..m {
                        let mut acc = 0.0;
                        for l in 0..m {
                            acc += structure[idx(l, i, j)] * structure[idx(n, l, k)]
                                + structure[idx(l, j, k)] * structure[idx(n, l, i)]
                                + structure[idx(l, k, i)] * structure[idx(n, l, j)];
                        }
                        if acc.abs() > STRUCTURE_TOL * scale * scale {
                            return Err(Error::InvalidStructure(format!(
                                "Jacobi identity fails for ({i}, {j}, {k}) component {n}: {acc:e}"
                            )));
                        }
                    }
                }
            }
        }

        // (ad_{T_i})_{k j} = c[k][i][j]
        let ad_basis: Vec<DMatrix<f64>> = (0..m)
            .map(|i| DMatrix::from_fn(m, m, |k, j| structure[idx(k, i, j)]))
            .collect();
        let killing = DMatrix::from_fn(m, m, |i, j| {
            form_scale * (&ad_basis[i] * &ad_basis[j]).trace()
        });

        let eig = SymmetricEigen::new(killing.clone());
        let kscale = linalg::scale_of(killing.as_slice());
        let min_abs = eig.eigenvalues.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        if min_abs <= 1e-10 * kscale {
            return Err(Error::NotSemisimple(format!(
                "invariant form is degenerate (smallest |eigenvalue| {min_abs:e})"
            )));
        }

        Ok(LieAlgebra {
            labels,
            structure,
            form_scale,
            ad_basis,
            killing,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn form_scale(&self) -> f64 {
        self.form_scale
    }

    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> f64 {
        let m = self.dim();
        self.structure[(k * m + i) * m + j]
    }

    /// `kappa_ij = scale * trace(ad_{T_i} ad_{T_j})`.
    pub fn killing_matrix(&self) -> &DMatrix<f64> {
        &self.killing
    }

    /// Adjoint matrix of the `i`-th basis vector.
    pub fn ad_basis(&self, i: usize) -> &DMatrix<f64> {
        &self.ad_basis[i]
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zeros(self.dim())
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        AlgebraElement::basis(self.dim(), i)
    }

    /// Index of the basis vector with the given label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Matrix of `ad_x = [x, .]`.
    pub fn ad(&self, x: &AlgebraElement) -> DMatrix<f64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        for (i, xi) in x.coeffs().iter().enumerate() {
            if *xi != 0.0 {
                out += &self.ad_basis[i] * *xi;
            }
        }
        out
    }

    /// `[x, y]`.
    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.br(x, y))
    }

    pub(crate) fn br(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let m = self.dim();
        let (xs, ys) = (x.as_slice(), y.as_slice());
        let mut out = vec![0.0; m];
        for i in 0..m {
            if xs[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                if ys[j] == 0.0 {
                    continue;
                }
                let w = xs[i] * ys[j];
                for (k, o) in out.iter_mut().enumerate() {
                    *o += self.structure[(k * m + i) * m + j] * w;
                }
            }
        }
        AlgebraElement::from_vec(out)
    }

    /// Killing form `x^T kappa y`.
    pub fn killing(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.kf(x, y))
    }

    pub(crate) fn kf(&self, x: &AlgebraElement, y: &AlgebraElement) -> f64 {
        x.coeffs().dot(&(&self.killing * y.coeffs()))
    }

    /// `exp(ad_x)` as a matrix.
    pub fn ad_exp_matrix(&self, x: &AlgebraElement) -> DMatrix<f64> {
        linalg::expm(&self.ad(x))
    }

    /// `exp(ad_x)(y)`, i.e. `B y B^-1` for `B = exp(x)`.
    pub fn ad_exp(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(AlgebraElement::from_vector(self.ad_exp_matrix(x) * y.coeffs()))
    }

    /// Number of negative eigenvalues of the invariant form.
    pub fn killing_index(&self) -> usize {
        SymmetricEigen::new(self.killing.clone())
            .eigenvalues
            .iter()
            .filter(|v| **v < 0.0)
            .count()
    }

    /// Recovers `x` from a matrix assumed to equal `ad_x`; returns the
    /// element and the Frobenius residual `|ad_x - mat|`.
    pub fn element_from_ad(&self, mat: &DMatrix<f64>) -> (AlgebraElement, f64) {
        let m = self.dim();
        let design = DMatrix::from_fn(m * m, m, |row, col| self.ad_basis[col].as_slice()[row]);
        let rhs = DVector::from_column_slice(mat.as_slice());
        let (x, resid) = linalg::least_squares(&design, &rhs);
        (AlgebraElement::from_vector(x), resid)
    }

    /// Structure constants as the nested `c[k][i][j]` array.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<f64>>> {
        let m = self.dim();
        (0..m)
            .map(|k| {
                (0..m)
                    .map(|i| (0..m).map(|j| self.structure_constant(k, i, j)).collect())
                    .collect()
            })
            .collect()
    }
}

impl TryFrom<AlgebraDefinition> for LieAlgebra {
    type Error = Error;

    fn try_from(def: AlgebraDefinition) -> Result<Self> {
        let m = def.labels.len();
        let mut flat = Vec::with_capacity(m * m * m);
        if def.structure_constants.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: def.structure_constants.len(),
            });
        }
        for plane in &def.structure_constants {
            if plane.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: plane.len(),
                });
            }
            for row in plane {
                if row.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        found: row.len(),
                    });
                }
                flat.extend_from_slice(row);
            }
        }
        let alg = LieAlgebra::new(def.labels, flat, def.form_scale)?;
        if let Some(user) = def.killing_matrix {
            let scale = linalg::scale_of(alg.killing.as_slice());
            for i in 0..m {
                for j in 0..m {
                    let given = user.get(i).and_then(|r| r.get(j)).copied().ok_or(
                        Error::DimensionMismatch {
                            expected: m,
                            found: user.len(),
                        },
                    )?;
                    if (given - alg.killing[(i, j)]).abs() > STRUCTURE_TOL * scale {
                        return Err(Error::Consistency(format!(
                            "supplied invariant form disagrees with trace(ad ad) at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }
}

impl From<LieAlgebra> for AlgebraDefinition {
    fn from(alg: LieAlgebra) -> Self {
        let m = alg.dim();
        AlgebraDefinition {
            structure_constants: alg.structure_constants(),
            killing_matrix: Some(
                (0..m)
                    .map(|i| (0..m).map(|j| alg.killing[(i, j)]).collect())
                    .collect(),
            ),
            labels: alg.labels,
            form_scale: alg.form_scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3() -> LieAlgebra {
        // [L_i, L_j] = eps_ijk L_k
        let m = 3;
        let mut c = vec![0.0; 27];
        let eps = |i: usize, j: usize, k: usize| -> f64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                _ => 0.0,
            }
        };
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    c[(k * m + i) * m + j] = eps(i, j, k);
                }
            }
        }
        LieAlgebra::new(vec!["L1".into(), "L2".into(), "L3".into()], c, 1.0).unwrap()
    }

    #[test]
    fn so3_killing_is_negative_definite() {
        let alg = so3();
        assert_eq!(alg.killing_index(), 3);
        for i in 0..3 {
            assert!((alg.killing_matrix()[(i, i)] + 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn abelian_algebra_is_rejected() {
        let err = LieAlgebra::new(vec!["a".into(), "b".into()], vec![0.0; 8], 1.0).unwrap_err();
        assert!(matches!(err, Error::NotSemisimple(_)));
    }

    #[test]
    fn broken_antisymmetry_is_rejected() {
        let mut c = vec![0.0; 27];
        c[1] = 1.0; // c[0][0][1] without its partner
        let err = LieAlgebra::new(vec!["a".into(), "b".into(), "c".into()], c, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidStructure(_)));
    }

    #[test]
    fn bracket_rejects_dimension_mismatch() {
        let alg = so3();
        let err = alg
            .bracket(&AlgebraElement::zeros(3), &AlgebraElement::zeros(2))
            .unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
        assert!(alg.killing(&AlgebraElement::zeros(4), &alg.zero()).is_err());
    }

    #[test]
    fn element_recovered_from_its_ad_matrix() {
        let alg = so3();
        let x = AlgebraElement::from_vec(vec![0.3, -1.1, 2.0]);
        let (back, resid) = alg.element_from_ad(&alg.ad(&x));
        assert!(resid < 1e-13);
        assert!((back - x).max_abs() < 1e-13);
    }

    #[test]
    fn definition_round_trip_keeps_structure() {
        let alg = so3();
        let def: AlgebraDefinition = alg.clone().into();
        let back = LieAlgebra::try_from(def.clone()).unwrap();
        assert_eq!(back.structure_constants(), alg.structure_constants());

        let mut bad = def;
        bad.killing_matrix.as_mut().unwrap()[0][0] = 5.0;
        assert!(matches!(LieAlgebra::try_from(bad), Err(Error::Consistency(_))));
    }
}
