use std::collections::BTreeMap;

use super::{AlgebraElement, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg;

const EIGEN_TOL: f64 = 1e-10;

/// Integer grading `G = sum_i G_i` induced by a grading operator `Q`,
/// with `[Q, T] = i T` for every `T` in `G_i`.
#[derive(Debug, Clone)]
pub struct Grading {
    q: AlgebraElement,
    grade_of_basis: Vec<i32>,
    subspaces: BTreeMap<i32, Vec<usize>>,
}

impl Grading {
    /// Reads off the grade of each basis vector from `ad_Q`. Every basis
    /// vector must be an eigenvector with an integer eigenvalue.
    pub fn new(algebra: &LieAlgebra, q: AlgebraElement) -> Result<Self> {
        algebra.check(&q)?;
        let m = algebra.dim();
        let adq = algebra.ad(&q);
        let scale = linalg::scale_of(adq.as_slice());
        let mut grade_of_basis = Vec::with_capacity(m);
        for j in 0..m {
            let eig = adq[(j, j)];
            let grade = eig.round();
            if (eig - grade).abs() > EIGEN_TOL * scale {
                return Err(Error::InvalidGrading(format!(
                    "basis vector {} has non-integer grade {eig}",
                    algebra.labels()[j]
                )));
            }
            for k in 0..m {
                if k != j && adq[(k, j)].abs() > EIGEN_TOL * scale {
                    return Err(Error::InvalidGrading(format!(
                        "basis vector {} is not an eigenvector of ad_Q",
                        algebra.labels()[j]
                    )));
                }
            }
            grade_of_basis.push(grade as i32);
        }
        let mut subspaces: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (j, g) in grade_of_basis.iter().enumerate() {
            subspaces.entry(*g).or_default().push(j);
        }

        let kscale = linalg::scale_of(algebra.killing_matrix().as_slice());
        for i in 0..m {
            for j in 0..m {
                if grade_of_basis[i] + grade_of_basis[j] != 0
                    && algebra.killing_matrix()[(i, j)].abs() > 1e-12 * kscale
                {
                    return Err(Error::InvalidGrading(format!(
                        "k(G_{}, G_{}) does not vanish",
                        grade_of_basis[i], grade_of_basis[j]
                    )));
                }
            }
        }

        Ok(Grading {
            q,
            grade_of_basis,
            subspaces,
        })
    }

    pub fn q(&self) -> &AlgebraElement {
        &self.q
    }

    pub fn grade(&self, basis_index: usize) -> i32 {
        self.grade_of_basis[basis_index]
    }

    pub fn grades(&self) -> &[i32] {
        &self.grade_of_basis
    }

    /// Basis indices spanning `G_grade` (empty when the grade is absent).
    pub fn subspace(&self, grade: i32) -> &[usize] {
        self.subspaces.get(&grade).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn subspaces(&self) -> &BTreeMap<i32, Vec<usize>> {
        &self.subspaces
    }

    /// Component of `x` in `G_grade`.
    pub fn project(&self, x: &AlgebraElement, grade: i32) -> AlgebraElement {
        let mut v = nalgebra::DVector::zeros(x.dim());
        for &j in self.subspace(grade) {
            v[j] = x.coeffs()[j];
        }
        AlgebraElement::from_vector(v)
    }

    /// Largest coefficient of `x` outside `G_grade`.
    pub fn off_grade_residual(&self, x: &AlgebraElement, grade: i32) -> f64 {
        x.as_slice()
            .iter()
            .enumerate()
            .filter(|(j, _)| self.grade_of_basis[*j] != grade)
            .fold(0.0, |acc, (_, v)| acc.max(v.abs()))
    }
}
