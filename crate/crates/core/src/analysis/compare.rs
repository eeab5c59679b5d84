//! Pointwise comparison of sub/supersolutions and discrete solutions, and
//! the sup-norm bounds.

use nalgebra::DMatrix;
use rand::Rng;

use crate::barriers::{c_alpha, sup_norm_lower_constant, Barrier};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::jet::{asymmetry, min_eigenvalue};
use crate::sampling::sample_interior;
use crate::solver::DiscreteSolution;

/// Anything that can be evaluated at interior points.
pub trait Evaluable {
    fn evaluate(&self, x: &[f64]) -> Result<f64>;
}

impl Evaluable for Barrier {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.value_on_closure(x)
    }
}

impl Evaluable for DiscreteSolution {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: x.len(),
            });
        }
        self.value_at([x[0], x[1]])
    }
}

impl<F: Fn(&[f64]) -> Result<f64>> Evaluable for F {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub pass: bool,
    /// Smallest `upper - lower` over the samples.
    pub worst_gap: f64,
    pub worst_point: Vec<f64>,
}

/// Checks `upper >= lower` at `n_samples` interior points.
pub fn check_comparison<R: Rng>(
    lower: &dyn Evaluable,
    upper: &dyn Evaluable,
    domain: &Domain,
    n_samples: usize,
    rng: &mut R,
) -> Result<Comparison> {
    let pts = sample_interior(domain, n_samples, 0.0, rng);
    let mut worst = (f64::INFINITY, Vec::new());
    for x in pts {
        let gap = upper.evaluate(&x)? - lower.evaluate(&x)?;
        if gap < worst.0 {
            worst = (gap, x);
        }
    }
    Ok(Comparison {
        pass: worst.0 >= 0.0,
        worst_gap: worst.0,
        worst_point: worst.1,
    })
}

/// `trace(AB) >= n det(A)^{1/n} det(B)^{1/n}` for symmetric positive
/// semidefinite `A`, `B`, with 1e-12 relative slack.
pub fn trace_inequality_check(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<bool> {
    let n = a.nrows();
    for m in [a, b] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nrows(),
            });
        }
        let asym = asymmetry(m);
        if asym > 1e-12 {
            return Err(Error::NotSymmetric(asym));
        }
        let lam = min_eigenvalue(m);
        if lam < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(lam));
        }
    }
    let nf = n as f64;
    let lhs = (a * b).trace();
    let rhs = nf * a.determinant().max(0.0).powf(1.0 / nf) * b.determinant().max(0.0).powf(1.0 / nf);
    Ok(lhs >= rhs - 1e-12 * rhs.abs().max(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub pass: bool,
    /// Largest `lower - u_h` over the nodes (positive means violated).
    pub lower_violation: f64,
    /// Largest `u_h - upper` over the nodes.
    pub upper_violation: f64,
}

/// Nodal check of `lower <= u_h <= upper` within `tol`.
pub fn sandwich(sol: &DiscreteSolution, lower: &dyn Evaluable, upper: &dyn Evaluable, tol: f64) -> Result<Sandwich> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (x, &u) in sol.grid.positions().iter().zip(&sol.values) {
        lo = lo.max(lower.evaluate(x)? - u);
        hi = hi.max(u - upper.evaluate(x)?);
    }
    Ok(Sandwich {
        pass: lo <= tol && hi <= tol,
        lower_violation: lo,
        upper_violation: hi,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupNormBounds {
    /// `c(n,p) |Omega|^{2/(n+p)}`.
    pub lower_bound: f64,
    pub sup_norm: f64,
    pub lower_pass: bool,
    /// `C_alpha` with `alpha = 2/(n+p)`.
    pub upper_constant: f64,
    /// Largest `|u_h(x)| / (C_alpha dist(x)^alpha)` over the nodes.
    pub worst_upper_ratio: f64,
    pub upper_pass: bool,
    /// `c(n,p) |Omega|^{2/(n+p)} <= C_alpha (diam/2)^alpha`.
    pub compatible: bool,
}

/// Lower bound on `||u_h||_inf` and the pointwise upper bound
/// `|u_h| <= C_alpha dist^alpha` at every node, for `det D^2 u = |u|^{-p}`.
pub fn sup_norm_bound_check(sol: &DiscreteSolution, p: f64) -> Result<SupNormBounds> {
    let domain = sol.grid.domain();
    let n = domain.dim();
    let alpha = 2.0 / (n as f64 + p);
    let lower_bound = sup_norm_lower_constant(n, p) * domain.volume()?.powf(alpha);
    let sup_norm = sol.sup_norm();
    let upper_constant = c_alpha(domain.diameter(), alpha)?;
    let mut worst: f64 = 0.0;
    for (x, &u) in sol.grid.positions().iter().zip(&sol.values) {
        let d = domain.dist_to_boundary(x)?;
        worst = worst.max(u.abs() / (upper_constant * d.powf(alpha)));
    }
    Ok(SupNormBounds {
        lower_bound,
        sup_norm,
        lower_pass: sup_norm >= lower_bound,
        upper_constant,
        worst_upper_ratio: worst,
        upper_pass: worst <= 1.0,
        compatible: lower_bound <= upper_constant * (0.5 * domain.diameter()).powf(alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded_rng;

    #[test]
    fn reflexive_and_antisymmetric() {
        let d = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
        let sub = Barrier::sub_valpha_for_power(&d, 1.0).unwrap();
        let sup = Barrier::super_w(2, 1.0).unwrap();
        let mut rng = seeded_rng(1);
        let same = check_comparison(&sup, &sup, &d, 500, &mut rng).unwrap();
        assert!(same.pass && same.worst_gap == 0.0);
        assert!(check_comparison(&sub, &sup, &d, 500, &mut rng).unwrap().pass);
        assert!(!check_comparison(&sup, &sub, &d, 500, &mut rng).unwrap().pass);
    }

    #[test]
    fn trace_inequality_cases() {
        let i = DMatrix::<f64>::identity(2, 2);
        assert!(trace_inequality_check(&i, &i).unwrap());
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(trace_inequality_check(&e, &i).unwrap());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(trace_inequality_check(&bad, &i), Err(Error::NotSymmetric(_))));
        let neg = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(trace_inequality_check(&neg, &i), Err(Error::NotPositiveSemidefinite(_))));
    }
}
