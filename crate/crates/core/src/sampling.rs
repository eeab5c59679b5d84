//! Seeded sampling of interior and boundary points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Domain, DomainKind};

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` points of `domain` with `dist_to_boundary >= margin`, by rejection
/// from the bounding box.
///
/// # Panics
///
/// Panics if no point is accepted after a very large number of draws, which
/// only happens when `margin` exceeds the inradius.
pub fn sample_interior<R: Rng>(domain: &Domain, count: usize, margin: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let (lo, hi) = domain.bounding_box();
    let mut out = Vec::with_capacity(count);
    let mut misses = 0usize;
    while out.len() < count {
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..*h)).collect();
        match domain.dist_to_boundary(&x) {
            Ok(d) if d >= margin => out.push(x),
            _ => {
                misses += 1;
                assert!(misses < 1_000 * (count + 1_000), "margin {margin} leaves no room to sample");
            }
        }
    }
    out
}

/// Points of `{|x'| < 1 - margin, margin < x_n < height}`, the truncated half
/// cylinder on which the explicit solutions live.
pub fn sample_half_cylinder<R: Rng>(n: usize, height: f64, count: usize, margin: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let rmax = 1.0 - margin;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-rmax..rmax)).collect();
        if x[..n - 1].iter().map(|v| v * v).sum::<f64>() >= rmax * rmax {
            continue;
        }
        x[n - 1] = rng.random_range(margin..height);
        out.push(x);
    }
    out
}

pub(crate) fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-3 && len <= 1.0 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// `count` points on the boundary of `domain`.
pub fn sample_boundary<R: Rng>(domain: &Domain, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = domain.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = match domain.kind() {
            DomainKind::ParabolaCap { t, gamma } => {
                let dir = unit_vector(n - 1, rng);
                let r = t * rng.random::<f64>().sqrt();
                let mut x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                let height = if rng.random_bool(0.5) { 0.0 } else { t * t - r * r };
                x.push(height - gamma);
                x
            }
            DomainKind::SphereCap => {
                if rng.random_bool(0.5) {
                    let dir = unit_vector(n - 1, rng);
                    let r = rng.random::<f64>().sqrt();
                    let mut x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                    x.push(0.0);
                    x
                } else {
                    let mut x = unit_vector(n, rng);
                    x[n - 1] = x[n - 1].abs();
                    x
                }
            }
            DomainKind::Ball { radius } => unit_vector(n, rng).into_iter().map(|v| v * radius).collect(),
            DomainKind::HalfspaceIntersection { faces } => {
                let f = &faces[rng.random_range(0..faces.len())];
                let (lo, hi) = domain.bounding_box();
                let y: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..=*h)).collect();
                let excess = f.normal.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - f.offset;
                let x: Vec<f64> = y.iter().zip(&f.normal).map(|(v, a)| v - excess * a).collect();
                let feasible = faces
                    .iter()
                    .all(|g| g.normal.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= g.offset + 1e-12);
                if !feasible {
                    continue;
                }
                x
            }
        };
        out.push(x);
    }
    out
}
