use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DVector;

/// Coordinates of a Lie-algebra element in the basis of its owning algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement(DVector<f64>);

impl AlgebraElement {
    pub fn zeros(dim: usize) -> Self {
        AlgebraElement(DVector::zeros(dim))
    }

    /// The `index`-th basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = 1.0;
        AlgebraElement(v)
    }

    pub fn from_vec(coeffs: Vec<f64>) -> Self {
        AlgebraElement(DVector::from_vec(coeffs))
    }

    pub fn from_vector(coeffs: DVector<f64>) -> Self {
        AlgebraElement(coeffs)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn euclid_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        AlgebraElement(&self.0 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<DVector<f64>> for AlgebraElement {
    fn from(v: DVector<f64>) -> Self {
        AlgebraElement(v)
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        AlgebraElement(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.0 + &rhs.0)
    }
}

impl AddAssign<&AlgebraElement> for AlgebraElement {
    fn add_assign(&mut self, rhs: &AlgebraElement) {
        self.0 += &rhs.0;
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        AlgebraElement(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, s: f64) -> AlgebraElement {
        AlgebraElement(self.0 * s)
    }
}

impl Mul<f64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, s: f64) -> AlgebraElement {
        AlgebraElement(&self.0 * s)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-self.0)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-&self.0)
    }
}
