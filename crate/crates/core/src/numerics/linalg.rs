use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::Index;

use super::NumericsError;

/// Fixed-length complex vector holding steering vectors, channels and
/// precoders.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `selfᴴ · other`, conjugating the receiver.
    pub fn dot(&self, other: &ComplexVector) -> Complex64 {
        assert_eq!(self.len(), other.len(), "length mismatch in inner product");
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    /// `self += scale · other`.
    pub fn axpy(&mut self, scale: Complex64, other: &ComplexVector) {
        assert_eq!(self.len(), other.len(), "length mismatch in axpy");
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += scale * b;
        }
    }

    pub fn scaled(&self, scale: Complex64) -> ComplexVector {
        Self(self.0.iter().map(|z| z * scale).collect())
    }

    /// Unit-norm copy, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<ComplexVector> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Relative threshold on `σ_min / σ_max` below which a matrix is treated as
/// rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Moore–Penrose pseudo-inverse of a full-row-rank matrix.
pub fn pseudo_inverse(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>, NumericsError> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(NumericsError::Dimension(format!("empty {rows}x{cols} matrix")));
    }
    if rows > cols {
        return Err(NumericsError::Dimension(format!(
            "{rows}x{cols} matrix cannot have full row rank"
        )));
    }
    let svd = m.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    if smallest.is_nan() || smallest <= RANK_TOLERANCE * largest {
        return Err(NumericsError::Singular { smallest });
    }
    svd.pseudo_inverse(0.0)
        .map_err(|e| NumericsError::Dimension(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let a = ComplexVector::new(vec![c(1.0, 2.0), c(-0.5, 0.25)]);
        let b = ComplexVector::new(vec![c(0.3, -1.0), c(2.0, 1.5)]);
        assert_eq!(a.dot(&b), b.dot(&a).conj());
        assert!((a.dot(&a).re - a.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_has_no_direction() {
        assert!(ComplexVector::zeros(4).normalized().is_none());
    }

    #[test]
    fn identity_is_its_own_pseudo_inverse() {
        let id = DMatrix::<Complex64>::identity(4, 4);
        let p = pseudo_inverse(&id).unwrap();
        assert!((p - id).camax() < 1e-14);
    }

    #[test]
    fn scalar_inverts() {
        let z = c(0.6, -0.8) * 2.5;
        let p = pseudo_inverse(&DMatrix::from_element(1, 1, z)).unwrap();
        assert!((p[(0, 0)] - z.inv()).norm() < 1e-15);
    }

    #[test]
    fn wide_random_matrix_right_inverse() {
        let mut rng = RngStream::new(7, 0);
        let m = DMatrix::from_fn(3, 8, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let p = pseudo_inverse(&m).unwrap();
        let residual = &m * &p - DMatrix::<Complex64>::identity(3, 3);
        assert!(residual.camax() <= 1e-8, "residual {}", residual.camax());
    }

    #[test]
    fn rank_deficient_reports_smallest_singular_value() {
        let row = [c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0)];
        let m = DMatrix::from_fn(2, 3, |_, j| row[j]);
        match pseudo_inverse(&m) {
            Err(NumericsError::Singular { smallest }) => assert!(smallest < 1e-10),
            other => panic!("expected singular error, got {other:?}"),
        }
    }
}
