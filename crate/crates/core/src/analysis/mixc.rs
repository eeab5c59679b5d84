//! Boundary behaviour of the affine-sphere right-hand side along the axis of
//! the shifted parabola cap.

use super::fit::{fit_exponent, FitResult};
use crate::barriers::affine_sphere_exponent;
use crate::error::{Error, Result};
use crate::solver::DiscreteSolution;

/// `e = ((n-4)k - (2n+4)) / (2n+2k+2)`, the rate of
/// `f = |u|^{-n-2-k} (x.Du - u)^{-k}` at the flat face.
pub fn mixc_exponent(n: usize, k: f64) -> f64 {
    let nf = n as f64;
    ((nf - 4.0) * k - (2.0 * nf + 4.0)) / (2.0 * nf + 2.0 * k + 2.0)
}

/// `|-a(n+2+k) - k(a-1) - e|` with `a = (2+k)/(2n+2k+2)`.
pub fn mixc_identity_gap(n: usize, k: f64) -> f64 {
    let a = affine_sphere_exponent(n, k);
    let lhs = -a * (n as f64 + 2.0 + k) - k * (a - 1.0);
    (lhs - mixc_exponent(n, k)).abs()
}

/// `k* = (2n+4)/(n-4)` above which `e > 0`; none for `n <= 4`.
pub fn mixc_threshold(n: usize) -> Option<f64> {
    (n > 4).then(|| (2.0 * n as f64 + 4.0) / (n as f64 - 4.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixcReport {
    /// Fit of `log f` against `log(x_2 + gamma)`.
    pub fit: FitResult,
    pub exponent: f64,
    /// Smallest `C` with `f <= C (x_2 + gamma)^e` at the sampled nodes.
    pub constant: f64,
    pub identity_gap: f64,
    /// Smallest discrete `x.Du - u` among the samples.
    pub min_support: f64,
}

/// Samples `f` at the axis nodes of a planar affine-sphere solution on the
/// cap shifted by `gamma`, with `x_2 + gamma` in `window`.
pub fn mixc_probe(sol: &DiscreteSolution, k: f64, gamma: f64, window: (f64, f64), support_floor: f64) -> Result<MixcReport> {
    let n = 2;
    let e = mixc_exponent(n, k);
    let mut samples = Vec::new();
    let mut min_support = f64::INFINITY;
    for node in 0..sol.grid.len() {
        if sol.grid.lattice(node)[0] != 0 {
            continue;
        }
        let s = sol.grid.position(node)[1] + gamma;
        if s < window.0 || s > window.1 {
            continue;
        }
        let support = sol.support(node);
        if support <= support_floor {
            return Err(Error::NonPositiveSupport(support));
        }
        min_support = min_support.min(support);
        let u = sol.values[node].abs();
        let f = u.powf(-(n as f64) - 2.0 - k) * support.powf(-k);
        samples.push((s, f));
    }
    let fit = fit_exponent(&samples, window)?;
    let constant = samples
        .iter()
        .map(|&(s, f)| f / s.powf(e))
        .fold(0.0, f64::max);
    Ok(MixcReport {
        fit,
        exponent: e,
        constant,
        identity_gap: mixc_identity_gap(n, k),
        min_support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_grid() {
        for n in 2..=8 {
            for &k in &[0.5, 1.0, 2.0, 5.0, 14.0, 20.0] {
                assert!(mixc_identity_gap(n, k) < 1e-12);
            }
        }
    }

    #[test]
    fn threshold_case() {
        assert_eq!(mixc_threshold(5), Some(14.0));
        assert_eq!(mixc_exponent(5, 14.0), 0.0);
        assert_eq!(mixc_threshold(4), None);
        assert!((mixc_exponent(2, 1.0) + 1.25).abs() < 1e-15);
    }
}
