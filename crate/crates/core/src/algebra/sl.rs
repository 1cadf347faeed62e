//! `sl(n, R)` in a Cartan-Weyl basis, built from its defining representation.
//!
//! The invariant form is normalized so that every root has squared length
//! `alpha_sq`: on matrices it is `k(X, Y) = (2 / alpha_sq) tr(XY)`, which is
//! `trace(ad_X ad_Y) / (n alpha_sq)`.

use nalgebra::{DMatrix, DVector};

use super::{AlgebraElement, Grading, LieAlgebra};
use crate::error::{Error, Result};

/// Chevalley generators associated with the simple roots.
#[derive(Debug, Clone)]
pub struct ChevalleyHandles {
    /// Simple coroots `h_i = 2 alpha_i . H / alpha_i^2`.
    pub h: Vec<AlgebraElement>,
    /// `E_{alpha_i}`.
    pub e_plus: Vec<AlgebraElement>,
    /// `E_{-alpha_i}`.
    pub e_minus: Vec<AlgebraElement>,
    /// `cartan[i][j] = alpha_j(h_i)`.
    pub cartan: DMatrix<f64>,
}

/// An `sl(n, R)` algebra together with its principal grading.
#[derive(Debug, Clone)]
pub struct SlAlgebra {
    pub n: usize,
    pub alpha_sq: f64,
    pub algebra: LieAlgebra,
    pub grading: Grading,
    pub chevalley: ChevalleyHandles,
    basis_matrices: Vec<DMatrix<f64>>,
}

impl SlAlgebra {
    /// `n x n` matrix representing `x` in the defining representation.
    pub fn matrix_of(&self, x: &AlgebraElement) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (b, xi) in self.basis_matrices.iter().zip(x.as_slice()) {
            out += b * *xi;
        }
        out
    }

    /// Number of Cartan basis vectors (`n - 1`).
    pub fn rank(&self) -> usize {
        self.n - 1
    }

    /// Basis element `E_root` for the root `e_i - e_j` (0-based `i != j`).
    pub fn root_vector(&self, i: usize, j: usize) -> AlgebraElement {
        decompose(&elementary(self.n, i, j), &self.basis_matrices, self.n, self.alpha_sq)
    }
}

fn elementary(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(n, n);
    e[(i, j)] = 1.0;
    e
}

/// Orthonormal (for the trace form) basis of the traceless diagonal matrices.
fn cartan_directions(n: usize) -> Vec<DVector<f64>> {
    (1..n)
        .map(|k| {
            let norm = ((k * (k + 1)) as f64).sqrt();
            DVector::from_fn(n, |i, _| {
                if i < k {
                    1.0 / norm
                } else if i == k {
                    -(k as f64) / norm
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// Coordinates of a traceless matrix in the Cartan-Weyl basis.
fn decompose(x: &DMatrix<f64>, basis: &[DMatrix<f64>], n: usize, alpha_sq: f64) -> AlgebraElement {
    let rank = n - 1;
    let mut coeffs = vec![0.0; basis.len()];
    // Cartan part: k(H_k, X) = (2/alpha_sq) tr(H_k X) and k(H_k, H_l) = delta
    for (k, c) in coeffs.iter_mut().enumerate().take(rank) {
        let hk = &basis[k];
        *c = (2.0 / alpha_sq) * (0..n).map(|i| hk[(i, i)] * x[(i, i)]).sum::<f64>();
    }
    for (idx, b) in basis.iter().enumerate().skip(rank) {
        let (i, j) = b
            .iter()
            .enumerate()
            .find(|(_, v)| **v != 0.0)
            .map(|(lin, _)| (lin % n, lin / n))
            .expect("root vectors are nonzero");
        coeffs[idx] = x[(i, j)];
    }
    AlgebraElement::from_vec(coeffs)
}

fn root_label(i: usize, j: usize) -> String {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let sum: Vec<String> = (lo..hi).map(|k| format!("a{}", k + 1)).collect();
    let sum = sum.join("+");
    if i < j {
        format!("E_{sum}")
    } else if hi - lo == 1 {
        format!("E_-{sum}")
    } else {
        format!("E_-({sum})")
    }
}

/// Builds `sl(n, R)` with roots of squared length `alpha_sq`.
///
/// Basis order: `H_1..H_{n-1}` (orthonormal Cartan directions), positive root
/// vectors by height, then negative root vectors in the same order. The
/// principal grading operator gives each root vector its height as grade.
pub fn build_sl(n: usize, alpha_sq: f64) -> Result<SlAlgebra> {
    if n < 2 {
        return Err(Error::UnsupportedAlgebra(format!("sl({n}) is not semisimple")));
    }
    if n > 8 {
        return Err(Error::UnsupportedAlgebra(format!(
            "sl({n}) exceeds the supported size (n <= 8)"
        )));
    }
    if !(alpha_sq.is_finite() && alpha_sq > 0.0) {
        return Err(Error::UnsupportedAlgebra(format!(
            "root normalization must be positive, got {alpha_sq}"
        )));
    }
    let alpha = alpha_sq.sqrt();

    let mut labels = Vec::new();
    let mut basis = Vec::new();
    for (k, d) in cartan_directions(n).into_iter().enumerate() {
        // k(H, H) = (2/alpha_sq) (alpha^2/2) = 1
        basis.push(DMatrix::from_diagonal(&(d * (alpha / 2f64.sqrt()))));
        labels.push(format!("H{}", k + 1));
    }
    let mut positive = Vec::new();
    for height in 1..n {
        for i in 0..n - height {
            positive.push((i, i + height));
        }
    }
    for &(i, j) in &positive {
        basis.push(elementary(n, i, j));
        labels.push(root_label(i, j));
    }
    for &(i, j) in &positive {
        basis.push(elementary(n, j, i));
        labels.push(root_label(j, i));
    }

    let m = basis.len();
    let mut structure = vec![0.0; m * m * m];
    for i in 0..m {
        for j in 0..m {
            let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
            let coords = decompose(&comm, &basis, n, alpha_sq);
            for (k, v) in coords.as_slice().iter().enumerate() {
                structure[(k * m + i) * m + j] = *v;
            }
        }
    }
    let algebra = LieAlgebra::new(labels, structure, 1.0 / (n as f64 * alpha_sq))?;

    let q_diag = DVector::from_fn(n, |i, _| (n as f64 - 1.0) / 2.0 - i as f64);
    let q = decompose(&DMatrix::from_diagonal(&q_diag), &basis, n, alpha_sq);
    let grading = Grading::new(&algebra, q)?;

    let rank = n - 1;
    let h: Vec<AlgebraElement> = (0..rank)
        .map(|i| {
            let mut d = DMatrix::zeros(n, n);
            d[(i, i)] = 1.0;
            d[(i + 1, i + 1)] = -1.0;
            decompose(&d, &basis, n, alpha_sq)
        })
        .collect();
    let e_plus: Vec<AlgebraElement> = (0..rank)
        .map(|i| decompose(&elementary(n, i, i + 1), &basis, n, alpha_sq))
        .collect();
    let e_minus: Vec<AlgebraElement> = (0..rank)
        .map(|i| decompose(&elementary(n, i + 1, i), &basis, n, alpha_sq))
        .collect();
    let cartan = DMatrix::from_fn(rank, rank, |i, j| {
        let b = algebra.br(&h[i], &e_plus[j]);
        b.coeffs().dot(e_plus[j].coeffs())
    });

    Ok(SlAlgebra {
        n,
        alpha_sq,
        algebra,
        grading,
        chevalley: ChevalleyHandles {
            h,
            e_plus,
            e_minus,
            cartan,
        },
        basis_matrices: basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_labels_and_grades() {
        let sl2 = build_sl(2, 2.0).unwrap();
        assert_eq!(sl2.algebra.labels(), &["H1", "E_a1", "E_-a1"]);
        assert_eq!(sl2.grading.grades(), &[0, 1, -1]);
    }

    #[test]
    fn sl3_basis_and_highest_root_grade() {
        let sl3 = build_sl(3, 2.0).unwrap();
        assert_eq!(sl3.algebra.dim(), 8);
        let top = sl3.algebra.index_of("E_a1+a2").unwrap();
        assert_eq!(sl3.grading.grade(top), 2);
        let bottom = sl3.algebra.index_of("E_-(a1+a2)").unwrap();
        assert_eq!(sl3.grading.grade(bottom), -2);
    }

    #[test]
    fn cartan_matrix_is_a_n() {
        let sl4 = build_sl(4, 2.0).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert!((&sl4.chevalley.cartan - want).amax() < 1e-13);
    }

    #[test]
    fn killing_matches_trace_form_on_matrices() {
        for (n, a2) in [(2, 2.0), (3, 2.0), (3, 0.7), (4, 1.0)] {
            let s = build_sl(n, a2).unwrap();
            let m = s.algebra.dim();
            for i in 0..m {
                for j in 0..m {
                    let tr = (s.matrix_of(&s.algebra.basis_element(i))
                        * s.matrix_of(&s.algebra.basis_element(j)))
                    .trace();
                    let want = 2.0 / a2 * tr;
                    assert!((s.algebra.killing_matrix()[(i, j)] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(build_sl(1, 2.0), Err(Error::UnsupportedAlgebra(_))));
        assert!(matches!(build_sl(9, 2.0), Err(Error::UnsupportedAlgebra(_))));
        assert!(matches!(build_sl(3, -1.0), Err(Error::UnsupportedAlgebra(_))));
    }
}
