//! Finite-difference derivatives of a scalar function, used to check the
//! closed-form jets independently of their formulas.

use nalgebra::{DMatrix, DVector};

/// Central-difference gradient and Hessian at spacing `h`.
pub fn central_jet<F>(f: &F, x: &[f64], h: f64) -> (DVector<f64>, DMatrix<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let at = |offsets: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, d) in offsets {
            y[i] += d;
        }
        f(&y)
    };
    let f0 = f(x);
    let mut grad = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = at(&[(i, h)]);
        let fm = at(&[(i, -h)]);
        grad[i] = (fp - fm) / (2.0 * h);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    (grad, hess)
}

/// Derivatives from spacings `h` and `h/2`, combined by Richardson
/// extrapolation, plus the largest relative disagreement between the two
/// spacings (a consistency check on the step).
#[derive(Debug, Clone)]
pub struct FdJet {
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    pub step_disagreement: f64,
}

pub fn richardson_jet<F>(f: &F, x: &[f64], h: f64) -> FdJet
where
    F: Fn(&[f64]) -> f64,
{
    let (g1, h1) = central_jet(f, x, h);
    let (g2, h2) = central_jet(f, x, h / 2.0);
    let gradient = (&g2 * 4.0 - &g1) / 3.0;
    let hessian = (&h2 * 4.0 - &h1) / 3.0;
    let scale = h2.amax().max(g2.amax()).max(f64::MIN_POSITIVE);
    let step_disagreement = (&h2 - &h1).amax().max((&g2 - &g1).amax()) / scale;
    FdJet {
        gradient,
        hessian,
        step_disagreement,
    }
}

/// `max_i |a_i - b_i| / max_i |b_i|`.
pub fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let f = |x: &[f64]| x[0].powi(3) + 2.0 * x[0] * x[1] * x[1] - x[1];
        let x = [0.7, -0.3];
        let jet = richardson_jet(&f, &x, 1e-3);
        let g = [3.0 * 0.49 + 2.0 * 0.09, 4.0 * 0.7 * -0.3 - 1.0];
        assert!(relative_gap(jet.gradient.as_slice(), &g) < 1e-8);
        let h = [6.0 * 0.7, 4.0 * -0.3, 4.0 * -0.3, 4.0 * 0.7];
        assert!(relative_gap(jet.hessian.as_slice(), &h) < 1e-6);
    }
}
