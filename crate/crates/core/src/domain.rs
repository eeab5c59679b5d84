//! Bounded convex domains used by the barrier constructions and the solver.
//!
//! Points are written `x = (x', x_n)` with `x' in R^{n-1}`; `r = |x'|`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// A closed halfspace face `normal . x <= offset`, stored with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// `{|x'| < t, 0 < x_n + gamma < t^2 - |x'|^2}`.
    ParabolaCap { t: f64, gamma: f64 },
    /// `{|x'| < 1, 0 < x_n < sqrt(1 - |x'|^2)}`, the upper half ball.
    SphereCap,
    /// Open ball of the given radius centred at the origin.
    Ball { radius: f64 },
    /// `{x : normal_i . x < offset_i for all i}`.
    HalfspaceIntersection { faces: Vec<Halfspace> },
}

/// An open, bounded, convex region of `R^n`, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    dim: usize,
}

impl Domain {
    pub fn parabola_cap(dim: usize, t: f64, gamma: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", t, "must be positive and finite"));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", gamma, "must be nonnegative and finite"));
        }
        Ok(Self {
            kind: DomainKind::ParabolaCap { t, gamma },
            dim,
        })
    }

    pub fn sphere_cap(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            kind: DomainKind::SphereCap,
            dim,
        })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("radius", radius, "must be positive and finite"));
        }
        Ok(Self {
            kind: DomainKind::Ball { radius },
            dim,
        })
    }

    /// Intersection of halfspaces `normal . x < offset`. Normals are rescaled
    /// to unit length; the region must be bounded with nonempty interior.
    pub fn polytope(dim: usize, faces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        check_dim(dim)?;
        let mut unit = Vec::with_capacity(faces.len());
        for (normal, offset) in faces {
            if normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: normal.len(),
                });
            }
            let len = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(len > 0.0 && len.is_finite() && offset.is_finite()) {
                return Err(invalid("normal", len, "face normal must be finite and nonzero"));
            }
            unit.push(Halfspace {
                normal: normal.iter().map(|v| v / len).collect(),
                offset: offset / len,
            });
        }
        if !polytope_bounded(dim, &unit) {
            return Err(Error::Unsupported(
                "halfspace intersection is unbounded".into(),
            ));
        }
        let vertices = polytope_vertices(dim, &unit);
        if vertices.len() <= dim {
            return Err(Error::Unsupported(
                "halfspace intersection has empty interior".into(),
            ));
        }
        let d = Self {
            kind: DomainKind::HalfspaceIntersection { faces: unit },
            dim,
        };
        let centroid = centroid(&vertices);
        if !d.contains(&centroid)? {
            return Err(Error::Unsupported(
                "halfspace intersection has empty interior".into(),
            ));
        }
        Ok(d)
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// True iff `x` lies in the open region.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_point(x)?;
        let n = self.dim;
        let rho = radial_sq(x);
        Ok(match &self.kind {
            DomainKind::ParabolaCap { t, gamma } => {
                let s = x[n - 1] + gamma;
                rho < t * t && s > 0.0 && s < t * t - rho
            }
            DomainKind::SphereCap => x[n - 1] > 0.0 && rho + x[n - 1] * x[n - 1] < 1.0,
            DomainKind::Ball { radius } => norm_sq(x) < radius * radius,
            DomainKind::HalfspaceIntersection { faces } => faces
                .iter()
                .all(|f| dot(&f.normal, x) < f.offset),
        })
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn dist_to_boundary(&self, x: &[f64]) -> Result<f64> {
        if !self.contains(x)? {
            return Err(Error::OutsideDomain);
        }
        let n = self.dim;
        Ok(match &self.kind {
            DomainKind::ParabolaCap { t, gamma } => {
                let s = x[n - 1] + gamma;
                let r = radial_sq(x).sqrt();
                s.min(parabola_graph_distance(*t, r, s))
            }
            DomainKind::SphereCap => x[n - 1].min(1.0 - norm_sq(x).sqrt()),
            DomainKind::Ball { radius } => radius - norm_sq(x).sqrt(),
            DomainKind::HalfspaceIntersection { faces } => faces
                .iter()
                .map(|f| f.offset - dot(&f.normal, x))
                .fold(f64::INFINITY, f64::min),
        })
    }

    /// Supremum of pairwise distances of the closure.
    pub fn diameter(&self) -> f64 {
        match &self.kind {
            DomainKind::ParabolaCap { t, .. } => parabola_cap_diameter(*t),
            DomainKind::SphereCap => 2.0,
            DomainKind::Ball { radius } => 2.0 * radius,
            DomainKind::HalfspaceIntersection { faces } => {
                let v = polytope_vertices(self.dim, faces);
                let mut best = 0.0_f64;
                for i in 0..v.len() {
                    for j in 0..i {
                        best = best.max(norm_sq(&sub(&v[i], &v[j])));
                    }
                }
                best.sqrt()
            }
        }
    }

    /// `Some(gamma0)` with `gamma0 = dist(0, boundary)` when the origin is an
    /// interior point, `None` otherwise.
    pub fn contains_origin_interior(&self) -> Option<f64> {
        let origin = vec![0.0; self.dim];
        match self.contains(&origin) {
            Ok(true) => self.dist_to_boundary(&origin).ok(),
            _ => None,
        }
    }

    /// Axis-aligned bounding box `(lo, hi)` of the closure.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim;
        match &self.kind {
            DomainKind::ParabolaCap { t, gamma } => {
                let mut lo = vec![-t; n];
                let mut hi = vec![*t; n];
                lo[n - 1] = -gamma;
                hi[n - 1] = t * t - gamma;
                (lo, hi)
            }
            DomainKind::SphereCap => {
                let mut lo = vec![-1.0; n];
                lo[n - 1] = 0.0;
                (lo, vec![1.0; n])
            }
            DomainKind::Ball { radius } => (vec![-radius; n], vec![*radius; n]),
            DomainKind::HalfspaceIntersection { faces } => {
                let v = polytope_vertices(n, faces);
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for p in &v {
                    for i in 0..n {
                        lo[i] = lo[i].min(p[i]);
                        hi[i] = hi[i].max(p[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Lebesgue measure `|Omega|`.
    pub fn volume(&self) -> Result<f64> {
        let n = self.dim;
        match &self.kind {
            DomainKind::ParabolaCap { t, .. } => {
                Ok(unit_ball_volume(n - 1) * t.powi(n as i32 + 1) * 2.0 / (n as f64 + 1.0))
            }
            DomainKind::SphereCap => Ok(unit_ball_volume(n) / 2.0),
            DomainKind::Ball { radius } => Ok(unit_ball_volume(n) * radius.powi(n as i32)),
            DomainKind::HalfspaceIntersection { faces } => {
                if n != 2 {
                    return Err(Error::Unsupported(
                        "polytope volume is implemented for n = 2 only".into(),
                    ));
                }
                let mut v = polytope_vertices(2, faces);
                let c = centroid(&v);
                v.sort_by(|a, b| {
                    let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
                    let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
                    ta.total_cmp(&tb)
                });
                let mut area = 0.0;
                for i in 0..v.len() {
                    let p = &v[i];
                    let q = &v[(i + 1) % v.len()];
                    area += p[0] * q[1] - q[0] * p[1];
                }
                Ok(area.abs() / 2.0)
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(invalid("n", dim as f64, "dimension must be at least 2"));
    }
    Ok(())
}

/// `|B_1|` in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

pub(crate) fn radial_sq(x: &[f64]) -> f64 {
    x[..x.len() - 1].iter().map(|v| v * v).sum()
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let mut c = vec![0.0; n];
    for p in points {
        for i in 0..n {
            c[i] += p[i];
        }
    }
    c.iter_mut().for_each(|v| *v /= points.len() as f64);
    c
}

/// Distance from `(r, s)` to the meridian curve `{(sigma, t^2 - sigma^2) :
/// |sigma| <= t}` of the curved face, measured in the plane spanned by `x'`
/// and `e_n` (`s` is the height above the flat face).
///
/// The stationarity condition is the cubic `2 sigma^3 + (1 - 2H) sigma - r = 0`
/// with `H = t^2 - s`; each monotone piece is bisected to 1e-12 and compared
/// with the rim endpoints `sigma = +-t`.
fn parabola_graph_distance(t: f64, r: f64, s: f64) -> f64 {
    let hgt = t * t - s;
    let g = |sig: f64| 2.0 * sig * sig * sig + (1.0 - 2.0 * hgt) * sig - r;
    let dist_sq = |sig: f64| {
        let dy = t * t - sig * sig - s;
        (sig - r) * (sig - r) + dy * dy
    };

    let mut breaks = vec![-t];
    if 2.0 * hgt > 1.0 {
        let c = ((2.0 * hgt - 1.0) / 6.0).sqrt();
        for b in [-c, c] {
            if b > -t && b < t {
                breaks.push(b);
            }
        }
    }
    breaks.push(t);

    let mut best = dist_sq(-t).min(dist_sq(t));
    for w in breaks.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (glo, ghi) = (g(lo), g(hi));
        if glo == 0.0 {
            best = best.min(dist_sq(lo));
        }
        if glo * ghi >= 0.0 {
            continue;
        }
        let rising = glo < 0.0;
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) < 0.0) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(dist_sq(0.5 * (lo + hi)));
    }
    best.sqrt()
}

/// Diameter of `{|x'| < t, 0 < x_n < t^2 - |x'|^2}`.
///
/// The extreme points are the curved face; the farthest pair lies in one
/// meridian plane on opposite sides of the axis, at radii `s1, s2`, giving
/// `(s1 + s2)^2 (1 + (s1 - s2)^2)`. For `S = s1 + s2` the optimal spread is
/// `min(S, 2t - S)`, which leaves a one-variable maximisation whose interior
/// critical points solve `2u^2 - 2tu + 1 = 0` for `u = 2t - S`.
fn parabola_cap_diameter(t: f64) -> f64 {
    let g = |s: f64| {
        let d = s.min(2.0 * t - s);
        s * s * (1.0 + d * d)
    };
    let mut best = g(t).max(g(2.0 * t));
    let disc = t * t - 2.0;
    if disc >= 0.0 {
        for u in [(t - disc.sqrt()) / 2.0, (t + disc.sqrt()) / 2.0] {
            if (0.0..=t).contains(&u) {
                best = best.max(g(2.0 * t - u));
            }
        }
    }
    best.sqrt()
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

fn polytope_vertices(n: usize, faces: &[Halfspace]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for combo in combinations(faces.len(), n) {
        let a = DMatrix::from_fn(n, n, |i, j| faces[combo[i]].normal[j]);
        let b = DVector::from_fn(n, |i, _| faces[combo[i]].offset);
        if a.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = a.lu().solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        let feasible = faces
            .iter()
            .all(|f| dot(&f.normal, &x) <= f.offset + 1e-9);
        if feasible && !out.iter().any(|v| norm_sq(&sub(v, &x)) < 1e-18) {
            out.push(x);
        }
    }
    out
}

/// Bounded iff the recession cone `{d : N d <= 0}` is trivial: `N` has full
/// rank and no extreme ray (a null direction of `n - 1` faces) recedes.
fn polytope_bounded(n: usize, faces: &[Halfspace]) -> bool {
    let all = DMatrix::from_fn(faces.len(), n, |i, j| faces[i].normal[j]);
    if faces.len() < n + 1 || all.rank(1e-10) < n {
        return false;
    }
    for combo in combinations(faces.len(), n - 1) {
        // Generalised cross product of the n-1 chosen normals.
        let d: Vec<f64> = (0..n)
            .map(|col| {
                let minor = DMatrix::from_fn(n - 1, n - 1, |i, j| {
                    let jj = if j < col { j } else { j + 1 };
                    faces[combo[i]].normal[jj]
                });
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                sign * minor.determinant()
            })
            .collect();
        let len = norm_sq(&d).sqrt();
        if len < 1e-10 {
            continue;
        }
        for sign in [1.0, -1.0] {
            if faces
                .iter()
                .all(|f| sign * dot(&f.normal, &d) / len <= 1e-12)
            {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Domain {
        Domain::polytope(
            2,
            vec![
                (vec![1.0, 0.0], 1.0),
                (vec![-1.0, 0.0], 1.0),
                (vec![0.0, 2.0], 2.0),
                (vec![0.0, -1.0], 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let cap = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
        assert!(cap.contains(&[0.0, 0.5]).unwrap());
        assert!(!cap.contains(&[0.0, 0.0]).unwrap());
        let ball = Domain::ball(2, 1.0).unwrap();
        assert!(!ball.contains(&[0.6, 0.8]).unwrap());
        assert!(matches!(
            ball.contains(&[0.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let ball = Domain::ball(2, 1.0).unwrap();
        assert_eq!(ball.dist_to_boundary(&[0.0, 0.0]).unwrap(), 1.0);
        let cap = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
        assert!((cap.dist_to_boundary(&[0.0, 0.1]).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(
            cap.dist_to_boundary(&[0.0, -0.1]),
            Err(Error::OutsideDomain)
        );
    }

    #[test]
    fn diameters() {
        assert_eq!(Domain::ball(3, 1.0).unwrap().diameter(), 2.0);
        assert_eq!(Domain::parabola_cap(2, 1.0, 0.0).unwrap().diameter(), 2.0);
        assert_eq!(Domain::parabola_cap(2, 0.5, 0.0).unwrap().diameter(), 1.0);
        // t = 2: the pair (s1, s2) = (2, 0) gives sqrt(4 (1 + 4)) = sqrt(20).
        let d = Domain::parabola_cap(2, 2.0, 0.0).unwrap().diameter();
        assert!(d >= 20f64.sqrt() - 1e-12);
        assert!((square().diameter() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn origin_interior() {
        let cap = Domain::parabola_cap(2, 1.0, 0.5).unwrap();
        let g = cap.contains_origin_interior().unwrap();
        assert!((g - 0.5).abs() < 1e-12);
        assert_eq!(
            Domain::parabola_cap(2, 1.0, 0.0)
                .unwrap()
                .contains_origin_interior(),
            None
        );
        assert_eq!(
            Domain::ball(2, 1.0).unwrap().contains_origin_interior(),
            Some(1.0)
        );
    }

    #[test]
    fn volumes() {
        let cap = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
        assert!((cap.volume().unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((Domain::ball(2, 1.0).unwrap().volume().unwrap() - PI).abs() < 1e-14);
        assert!((Domain::ball(3, 1.0).unwrap().volume().unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((square().volume().unwrap() - 4.0).abs() < 1e-12);
        assert!((Domain::sphere_cap(2).unwrap().volume().unwrap() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn polytope_validation() {
        let open = Domain::polytope(2, vec![(vec![1.0, 0.0], 1.0), (vec![-1.0, 0.0], 1.0), (vec![0.0, 1.0], 1.0)]);
        assert!(matches!(open, Err(Error::Unsupported(_))));
        let wedge = Domain::polytope(2, vec![(vec![1.0, 1.0], 0.0), (vec![-1.0, 1.0], 0.0), (vec![0.0, -1.0], 5.0)]);
        assert!(wedge.is_ok());
        let sq = square();
        assert!((sq.dist_to_boundary(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((sq.dist_to_boundary(&[0.5, 0.8]).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Domain::ball(1, 1.0).is_err());
        assert!(Domain::parabola_cap(2, 0.0, 0.0).is_err());
        assert!(Domain::parabola_cap(2, 1.0, -0.1).is_err());
    }
}
