//! Second-order jets: value, gradient and Hessian of a function at a point.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Value, gradient and Hessian of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Jet2 {
    /// Builds a jet, rejecting a Hessian that is not symmetric to 1e-12
    /// relative tolerance.
    pub fn new(value: f64, gradient: DVector<f64>, hessian: DMatrix<f64>) -> Result<Self> {
        let n = gradient.len();
        if hessian.nrows() != n || hessian.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: hessian.nrows(),
            });
        }
        let asym = asymmetry(&hessian);
        if asym > 1e-12 {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            value,
            gradient,
            hessian,
        })
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn det_hessian(&self) -> f64 {
        self.hessian.clone().determinant()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.hessian)
    }

    /// `x . Du(x) - u(x)`, the support-type quantity entering the affine
    /// sphere right-hand side.
    pub fn support(&self, x: &[f64]) -> f64 {
        self.gradient
            .iter()
            .zip(x)
            .map(|(g, xi)| g * xi)
            .sum::<f64>()
            - self.value
    }
}

/// Largest |A_ij - A_ji| relative to the largest entry magnitude.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..i {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst / scale
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_hessian() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        let err = Jet2::new(0.0, DVector::zeros(2), h).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric(_)));
    }

    #[test]
    fn support_of_quadratic() {
        // u = |x|^2/2 - 1 at x = (1, 2): x.Du - u = |x|^2 - |x|^2/2 + 1
        let x = [1.0, 2.0];
        let jet = Jet2::new(
            2.5 - 1.0,
            DVector::from_column_slice(&x),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        assert!((jet.support(&x) - 3.5).abs() < 1e-15);
        assert!((jet.det_hessian() - 1.0).abs() < 1e-15);
        assert!((jet.min_eigenvalue() - 1.0).abs() < 1e-15);
    }
}
