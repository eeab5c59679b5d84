//! Log-log least-squares fits of boundary decay.

use crate::barriers::Barrier;
use crate::error::{invalid, Error, Result};
use crate::solver::DiscreteSolution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Fits `log |u| = slope * log dist + intercept` over the samples whose
/// distance lies in `window`.
pub fn fit_exponent(samples: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid("window", lo, "needs 0 < dist_min < dist_max"));
    }
    let mut pts = Vec::new();
    for &(d, v) in samples {
        if d >= lo && d <= hi {
            if !(v.abs() > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveValue(v));
            }
            pts.push((d.ln(), v.abs().ln()));
        }
    }
    if pts.len() < 5 {
        return Err(Error::InsufficientSamples {
            got: pts.len(),
            need: 5,
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(invalid("window", lo, "samples share a single distance"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        window,
        n_points: pts.len(),
    })
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[count - 1] = hi;
    out
}

/// `(s, |b(0, ..., 0, s - shift)|)` along the `x_n` axis, `s` being the
/// height above the flat face `{x_n = -shift}`.
pub fn barrier_axis_samples(b: &Barrier, heights: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = b.dim();
    heights
        .iter()
        .map(|&s| {
            let mut x = vec![0.0; n];
            x[n - 1] = s - b.shift();
            Ok((s, b.value(&x)?.abs()))
        })
        .collect()
}

/// `(s, |u_h|)` at the grid nodes on the vertical axis `x_1 = 0`, with `s`
/// measured from the flat face `{x_2 = base}`.
pub fn axis_profile(sol: &DiscreteSolution, base: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = (0..sol.grid.len())
        .filter(|&k| sol.grid.lattice(k)[0] == 0)
        .map(|k| (sol.grid.position(k)[1] - base, sol.values[k].abs()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::ExplicitKind;

    #[test]
    fn exact_power_data() {
        let data: Vec<(f64, f64)> = log_spaced(1e-3, 0.1, 20)
            .into_iter()
            .map(|d| (d, 3.0 * d.powf(1.0 / 3.0)))
            .collect();
        let fit = fit_exponent(&data, (1e-3, 0.1)).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.n_points, 20);
    }

    #[test]
    fn rejects_short_or_bad_data() {
        let data = vec![(0.1, 1.0), (0.2, 2.0), (0.3, 3.0), (0.4, 4.0)];
        assert_eq!(
            fit_exponent(&data, (0.01, 1.0)).unwrap_err(),
            Error::InsufficientSamples { got: 4, need: 5 }
        );
        let mut bad = data.clone();
        bad.push((0.5, 0.0));
        assert_eq!(fit_exponent(&bad, (0.01, 1.0)).unwrap_err(), Error::NonPositiveValue(0.0));
    }

    #[test]
    fn ujl_axis_slope() {
        let b = Barrier::explicit(ExplicitKind::Ujl, 2).unwrap();
        let data = barrier_axis_samples(&b, &log_spaced(1e-3, 0.1, 30)).unwrap();
        let fit = fit_exponent(&data, (1e-3, 0.1)).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 1e-6, "{}", fit.slope);
    }
}
