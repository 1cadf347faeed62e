//! Gram-Schmidt for indefinite symmetric forms.
//!
//! The next pivot is always the remaining residual of largest `|<v, v>|`.
//! When every residual is null the two residuals whose sum or difference has
//! the largest `|norm|` are mixed. The sequence of choices is recorded as a
//! plan so the same construction can be replayed on nearby data, which keeps
//! frames smooth under finite differencing.

use nalgebra::{DMatrix, DVector};

use super::{AlgebraElement, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg;

/// Residuals shorter than this fraction of the longest candidate are dropped.
const DROP_TOL: f64 = 1e-8;
/// A residual with `|<v,v>| < NULL_TOL * |v|^2 * |form|` counts as null.
const NULL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum PivotStep {
    /// Candidate `index` (its current residual) is normalized next.
    Single(usize),
    /// The residual of `first + sign * second` is normalized next; `first`
    /// is consumed and `second` stays in the pool.
    Mix {
        first: usize,
        second: usize,
        sign: f64,
    },
}

/// Output of an indefinite Gram-Schmidt pass.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    /// Vectors with `<b_i, b_j> = delta_ij * signs[i]`.
    pub vectors: Vec<DVector<f64>>,
    pub signs: Vec<i8>,
    pub plan: Vec<PivotStep>,
}

struct Pool<'a> {
    form: &'a DMatrix<f64>,
    fscale: f64,
    residuals: Vec<DVector<f64>>,
    active: Vec<bool>,
    drop_len: f64,
}

impl<'a> Pool<'a> {
    fn new(candidates: &[DVector<f64>], form: &'a DMatrix<f64>) -> Self {
        let longest = candidates.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let fscale = linalg::scale_of(form.as_slice());
        let mut pool = Pool {
            form,
            fscale,
            residuals: candidates.to_vec(),
            active: vec![true; candidates.len()],
            drop_len: DROP_TOL * longest,
        };
        pool.prune();
        pool
    }

    fn ip(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(self.form * b))
    }

    fn is_null(&self, v: &DVector<f64>, n: f64) -> bool {
        n.abs() < NULL_TOL * v.norm_squared() * self.fscale
    }

    fn prune(&mut self) {
        for (v, a) in self.residuals.iter().zip(self.active.iter_mut()) {
            if *a && v.norm() <= self.drop_len {
                *a = false;
            }
        }
    }

    fn choose(&self) -> Option<PivotStep> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.residuals.iter().enumerate() {
            if !self.active[i] {
                continue;
            }
            let n = self.ip(v, v).abs();
            if best.is_none_or(|(_, bn)| n > bn) {
                best = Some((i, n));
            }
        }
        let (i, n) = best?;
        if !self.is_null(&self.residuals[i], n) {
            return Some(PivotStep::Single(i));
        }
        let mut best_mix: Option<(PivotStep, f64)> = None;
        let live: Vec<usize> = (0..self.residuals.len()).filter(|&i| self.active[i]).collect();
        for (a, &i) in live.iter().enumerate() {
            for &j in &live[a + 1..] {
                for sign in [1.0, -1.0] {
                    let w = &self.residuals[i] + &self.residuals[j] * sign;
                    let n = self.ip(&w, &w);
                    if self.is_null(&w, n) {
                        continue;
                    }
                    if best_mix.as_ref().is_none_or(|(_, bn)| n.abs() > *bn) {
                        best_mix = Some((
                            PivotStep::Mix {
                                first: i,
                                second: j,
                                sign,
                            },
                            n.abs(),
                        ));
                    }
                }
            }
        }
        best_mix.map(|(s, _)| s)
    }

    /// Normalizes the pivot named by `step`, removes its direction from the pool.
    fn apply(&mut self, step: &PivotStep) -> Result<(DVector<f64>, i8)> {
        let w = match *step {
            PivotStep::Single(i) => {
                self.require(i)?;
                self.active[i] = false;
                self.residuals[i].clone()
            }
            PivotStep::Mix {
                first,
                second,
                sign,
            } => {
                self.require(first)?;
                self.require(second)?;
                self.active[first] = false;
                &self.residuals[first] + &self.residuals[second] * sign
            }
        };
        let n = self.ip(&w, &w);
        if self.is_null(&w, n) || !n.is_finite() {
            return Err(Error::Consistency(format!(
                "pivot {step:?} has null norm {n:e}"
            )));
        }
        let sign: i8 = if n > 0.0 { 1 } else { -1 };
        let b = w / n.abs().sqrt();
        let fb = self.form * &b;
        for (v, a) in self.residuals.iter_mut().zip(self.active.iter()) {
            if *a {
                let coeff = f64::from(sign) * v.dot(&fb);
                *v -= &b * coeff;
            }
        }
        self.prune();
        Ok((b, sign))
    }

    fn require(&self, i: usize) -> Result<()> {
        if i < self.active.len() && self.active[i] {
            Ok(())
        } else {
            Err(Error::Consistency(format!(
                "pivot candidate {i} is exhausted"
            )))
        }
    }
}

/// Extracts `rank` vectors orthonormal for `form` from the span of `candidates`.
pub fn indefinite_gram_schmidt(
    candidates: &[DVector<f64>],
    form: &DMatrix<f64>,
    rank: usize,
) -> Result<GramSchmidt> {
    let mut pool = Pool::new(candidates, form);
    let mut out = GramSchmidt {
        vectors: Vec::with_capacity(rank),
        signs: Vec::with_capacity(rank),
        plan: Vec::with_capacity(rank),
    };
    while out.vectors.len() < rank {
        let step = pool.choose().ok_or_else(|| {
            Error::NotSemisimple(format!(
                "form is degenerate on the candidate span: found {} of {rank} directions",
                out.vectors.len()
            ))
        })?;
        let (b, s) = pool.apply(&step)?;
        out.vectors.push(b);
        out.signs.push(s);
        out.plan.push(step);
    }
    Ok(out)
}

/// Re-runs a recorded plan on new candidates.
pub fn replay_gram_schmidt(
    candidates: &[DVector<f64>],
    form: &DMatrix<f64>,
    plan: &[PivotStep],
) -> Result<GramSchmidt> {
    let mut pool = Pool::new(candidates, form);
    let mut out = GramSchmidt {
        vectors: Vec::with_capacity(plan.len()),
        signs: Vec::with_capacity(plan.len()),
        plan: plan.to_vec(),
    };
    for step in plan {
        let (b, s) = pool.apply(step)?;
        out.vectors.push(b);
        out.signs.push(s);
    }
    Ok(out)
}

/// Index of the first coefficient whose magnitude is not negligible.
pub(crate) fn leading_index(v: &DVector<f64>) -> usize {
    let tol = 1e-9 * v.amax();
    v.iter().position(|x| x.abs() > tol).unwrap_or(0)
}

/// Basis orthonormal for `c * k`, with its signature.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    pub vectors: Vec<AlgebraElement>,
    /// `c k(b_i, b_j) = delta_ij signs[j]`.
    pub signs: Vec<i8>,
    /// Number of negative signs: the index of `c k`.
    pub index: usize,
}

/// Orthonormal basis of the algebra for the metric `c * k`.
///
/// Each vector is oriented so that its first non-negligible coefficient is positive.
pub fn orthonormal_basis(algebra: &LieAlgebra, c: f64) -> Result<OrthonormalBasis> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidInput(format!(
            "metric constant must be finite and nonzero, got {c}"
        )));
    }
    let m = algebra.dim();
    let form = algebra.killing_matrix() * c;
    let candidates: Vec<DVector<f64>> = (0..m)
        .map(|i| algebra.basis_element(i).into_vector())
        .collect();
    let gs = indefinite_gram_schmidt(&candidates, &form, m)?;
    let vectors: Vec<AlgebraElement> = gs
        .vectors
        .into_iter()
        .map(|v| {
            let lead = leading_index(&v);
            let v = if v[lead] < 0.0 { -v } else { v };
            AlgebraElement::from_vector(v)
        })
        .collect();
    let index = gs.signs.iter().filter(|s| **s < 0).count();
    Ok(OrthonormalBasis {
        vectors,
        signs: gs.signs,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_plane_with_null_basis_is_mixed() {
        // hyperbolic plane: <e1, e2> = 1, e1 and e2 null
        let form = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let cands = vec![
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        ];
        let gs = indefinite_gram_schmidt(&cands, &form, 2).unwrap();
        assert_eq!(
            gs.plan[0],
            PivotStep::Mix {
                first: 0,
                second: 1,
                sign: 1.0
            }
        );
        let mut signs = gs.signs.clone();
        signs.sort();
        assert_eq!(signs, vec![-1, 1]);
        for (i, a) in gs.vectors.iter().enumerate() {
            for (j, b) in gs.vectors.iter().enumerate() {
                let want = if i == j { f64::from(gs.signs[i]) } else { 0.0 };
                assert!((a.dot(&(&form * b)) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_form_errors() {
        let form = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let cands = vec![
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        ];
        assert!(matches!(
            indefinite_gram_schmidt(&cands, &form, 2),
            Err(Error::NotSemisimple(_))
        ));
    }

    #[test]
    fn replay_reproduces_the_original_pass() {
        let form = DMatrix::from_row_slice(3, 3, &[2.0, 0.1, 0.0, 0.1, -1.0, 0.3, 0.0, 0.3, 0.5]);
        let cands: Vec<_> = (0..3)
            .map(|i| {
                let mut v = DVector::zeros(3);
                v[i] = 1.0;
                v
            })
            .collect();
        let gs = indefinite_gram_schmidt(&cands, &form, 3).unwrap();
        let again = replay_gram_schmidt(&cands, &form, &gs.plan).unwrap();
        for (a, b) in gs.vectors.iter().zip(again.vectors.iter()) {
            assert!((a - b).amax() < 1e-15);
        }
    }
}
