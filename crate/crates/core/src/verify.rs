//! Sampling checks of the barrier inequalities: residual sign, convexity,
//! boundary values and agreement with finite differences.

use nalgebra::DMatrix;

use crate::barriers::{Barrier, BarrierKind, Role};
use crate::error::Result;
use crate::oracle::{relative_gap, richardson_jet};
use crate::sampling::{sample_boundary, sample_half_cylinder, sample_interior, seeded_rng, unit_vector, SampleRng};

/// Residual margins below this count as failures.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Relative tolerance for the explicit solutions' residual.
pub const EXACT_TOL: f64 = 1e-10;
pub const CONVEXITY_TOL: f64 = 1e-10;
pub const BOUNDARY_TOL: f64 = 1e-12;
pub const FD_TOL: f64 = 1e-4;
pub const FD_STEP: f64 = 1e-4;
/// Distance from singular sets for the finite-difference comparison.
pub const FD_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub barrier: String,
    pub check: &'static str,
    pub samples: usize,
    /// Smallest signed margin over the samples; `>= 0` means satisfied.
    pub worst_margin: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(barrier: &Barrier, check: &'static str, samples: usize, worst_margin: f64) -> Self {
        Self {
            barrier: barrier.label(),
            check,
            samples,
            worst_margin,
            pass: worst_margin >= 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub samples: usize,
    pub fd_samples: usize,
    /// Distance from the boundary of sampled interior points.
    pub margin: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            fd_samples: 1_000,
            margin: 1e-3,
            seed: 0x5eed,
        }
    }
}

pub(crate) fn interior_points(b: &Barrier, count: usize, margin: f64, rng: &mut SampleRng) -> Vec<Vec<f64>> {
    match b.domain() {
        Some(d) => sample_interior(d, count, margin, rng),
        None => sample_half_cylinder(b.dim(), 1.0, count, margin, rng),
    }
}

/// Signed residual check: `det/f - 1 >= -tol` for subsolutions,
/// `1 - det/f >= -tol` for supersolutions, `|det/f - 1| <= tol` for exact
/// solutions. The reported margin has the tolerance added back so that
/// `worst_margin >= 0` is the pass condition.
pub fn residual_sign(b: &Barrier, points: &[Vec<f64>]) -> Result<CheckRow> {
    let rhs = b.equation().expect("barrier built for an equation");
    let mut worst = f64::INFINITY;
    for x in points {
        let rel = b.relative_residual(&rhs, x)?;
        let m = match b.role() {
            Role::Sub => rel + RESIDUAL_TOL,
            Role::Super => -rel + RESIDUAL_TOL,
            Role::Exact => EXACT_TOL - rel.abs(),
        };
        worst = worst.min(m);
    }
    Ok(CheckRow::new(b, "residual_sign", points.len(), worst))
}

pub fn convexity(b: &Barrier, points: &[Vec<f64>]) -> Result<CheckRow> {
    let mut worst = f64::INFINITY;
    for x in points {
        worst = worst.min(b.eval_jet(x)?.min_eigenvalue() + CONVEXITY_TOL);
    }
    Ok(CheckRow::new(b, "convexity", points.len(), worst))
}

/// Supersolutions and explicit solutions vanish on the boundary;
/// subsolutions are nonpositive there.
pub fn boundary_values(b: &Barrier, count: usize, rng: &mut SampleRng) -> Result<CheckRow> {
    let points = match b.domain() {
        Some(d) => sample_boundary(d, count, rng),
        None => half_cylinder_boundary(b.dim(), count, rng),
    };
    let mut worst = f64::INFINITY;
    for x in &points {
        let v = b.value_on_closure(x)?;
        let m = match b.role() {
            Role::Sub => -v + BOUNDARY_TOL,
            Role::Super | Role::Exact => BOUNDARY_TOL - v.abs(),
        };
        worst = worst.min(m);
    }
    Ok(CheckRow::new(b, "boundary_values", points.len(), worst))
}

fn half_cylinder_boundary(n: usize, count: usize, rng: &mut SampleRng) -> Vec<Vec<f64>> {
    let mut pts = sample_half_cylinder(n, 1.0, count, 0.0, rng);
    for (i, x) in pts.iter_mut().enumerate() {
        if i % 2 == 0 {
            x[n - 1] = 0.0;
        } else {
            // Land on or just outside |x'| = 1 so rounding cannot leave the
            // point strictly inside the cylinder.
            for (v, d) in x[..n - 1].iter_mut().zip(unit_vector(n - 1, rng)) {
                *v = d * (1.0 + 1e-14);
            }
        }
    }
    pts
}

/// Closed-form gradient/Hessian against Richardson-extrapolated central
/// differences.
pub fn fd_jet(b: &Barrier, points: &[Vec<f64>]) -> Result<CheckRow> {
    let f = |y: &[f64]| b.value(y).unwrap_or(f64::NAN);
    let mut worst = f64::INFINITY;
    for x in points {
        let jet = b.eval_jet(x)?;
        let fd = richardson_jet(&f, x, FD_STEP);
        let gap = relative_gap(jet.gradient.as_slice(), fd.gradient.as_slice())
            .max(relative_gap(jet.hessian.as_slice(), fd.hessian.as_slice()));
        worst = worst.min(FD_TOL - gap);
    }
    Ok(CheckRow::new(b, "fd_jet", points.len(), worst))
}

/// Closed-form determinant against the determinant of the finite-difference
/// Hessian.
pub fn fd_det(b: &Barrier, points: &[Vec<f64>]) -> Result<CheckRow> {
    let f = |y: &[f64]| b.value(y).unwrap_or(f64::NAN);
    let mut worst = f64::INFINITY;
    for x in points {
        let det = b.det_hessian(x)?;
        let fd: DMatrix<f64> = richardson_jet(&f, x, FD_STEP).hessian;
        let gap = ((fd.determinant() - det) / det).abs();
        worst = worst.min(FD_TOL - gap);
    }
    Ok(CheckRow::new(b, "fd_det", points.len(), worst))
}

/// `x . Dv_a - v_a >= (x_n + gamma)^{a-1} a gamma0 (C - |x'|^2)`.
pub fn support_bound(b: &Barrier, points: &[Vec<f64>]) -> Result<CheckRow> {
    let mut worst = f64::INFINITY;
    for x in points {
        let s = b.support(x)?;
        let lb = b.support_lower_bound(x)?;
        worst = worst.min(s / lb - 1.0 + RESIDUAL_TOL);
    }
    Ok(CheckRow::new(b, "support_lower_bound", points.len(), worst))
}

/// All checks for one barrier.
pub fn verify_barrier(b: &Barrier, opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let mut rng = seeded_rng(opts.seed);
    let pts = interior_points(b, opts.samples, opts.margin, &mut rng);
    let fd_pts = interior_points(b, opts.fd_samples, FD_MARGIN, &mut rng);
    let mut rows = vec![
        residual_sign(b, &pts)?,
        convexity(b, &pts)?,
        boundary_values(b, opts.samples.min(2_000), &mut rng)?,
        fd_jet(b, &fd_pts)?,
        fd_det(b, &fd_pts)?,
    ];
    if b.kind() == BarrierKind::SubVAlphaK {
        rows.push(support_bound(b, &pts)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::ExplicitKind;

    #[test]
    fn super_w_passes_all_checks() {
        let b = Barrier::super_w(2, 1.0).unwrap();
        let opts = VerifyOptions {
            samples: 500,
            fd_samples: 50,
            ..Default::default()
        };
        for row in verify_barrier(&b, &opts).unwrap() {
            assert!(row.pass, "{row:?}");
        }
    }

    #[test]
    fn cylinder_boundary_points_lie_on_the_boundary() {
        for seed in 0..20 {
            let mut rng = seeded_rng(seed);
            for n in [2, 3] {
                for x in half_cylinder_boundary(n, 200, &mut rng) {
                    let r = x[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!(x[n - 1] == 0.0 || r >= 1.0, "{x:?}");
                }
                let b = Barrier::explicit(ExplicitKind::P1Cylinder, n).unwrap();
                assert!(boundary_values(&b, 200, &mut rng).unwrap().pass);
            }
        }
    }

    #[test]
    fn wrong_role_fails_residual_sign() {
        // The explicit p = 1 solution shifted down is a strict subsolution,
        // so a sign check against the exact tolerance must fail when the
        // residual is scaled up.
        let b = Barrier::explicit(ExplicitKind::P1Cylinder, 2).unwrap();
        let rhs = crate::RhsSpec::PowerSingular { p: 2.0 };
        let x = [0.1, 0.5];
        assert!(b.relative_residual(&rhs, &x).unwrap().abs() > EXACT_TOL);
    }
}
