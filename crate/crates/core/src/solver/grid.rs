//! Masked Cartesian grids with boundary-cut stencil arms.

use crate::domain::Domain;
use crate::error::{invalid, Error, Result};

/// Marker for an arm that ends on the boundary instead of at a node.
pub const BOUNDARY: u32 = u32::MAX;

/// Primitive lattice directions `(a, b)` with `max(|a|, |b|) <= width`, one
/// per line through the origin, ordered by lattice radius then angle.
pub fn stencil_directions(width: usize) -> Vec<[i32; 2]> {
    fn gcd(a: i32, b: i32) -> i32 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let w = width as i32;
    let mut dirs = Vec::new();
    for a in 0..=w {
        for b in -w..=w {
            if (a == 0 && b <= 0) || gcd(a, b) != 1 {
                continue;
            }
            dirs.push([a, b]);
        }
    }
    dirs.sort_by(|p, q| {
        let rp = p[0].abs().max(p[1].abs());
        let rq = q[0].abs().max(q[1].abs());
        let ap = (p[1] as f64).atan2(p[0] as f64);
        let aq = (q[1] as f64).atan2(q[0] as f64);
        rp.cmp(&rq).then(ap.total_cmp(&aq))
    });
    // Axis directions first so the gradient and the coordinate frame are
    // at fixed positions.
    dirs.sort_by_key(|d| if *d == [1, 0] { 0 } else if *d == [0, 1] { 1 } else { 2 });
    dirs
}

/// Index pairs of mutually orthogonal directions.
pub fn orthogonal_frames(dirs: &[[i32; 2]]) -> Vec<(usize, usize)> {
    let mut frames = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let perp = [-d[1], d[0]];
        let canon = if perp[0] < 0 || (perp[0] == 0 && perp[1] < 0) {
            [-perp[0], -perp[1]]
        } else {
            perp
        };
        if let Some(j) = dirs.iter().position(|e| *e == canon) {
            if i < j {
                frames.push((i, j));
            }
        }
    }
    frames
}

/// One side of a centred difference: either the neighbouring node or the
/// point where the ray leaves the domain (Dirichlet value 0 there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arm {
    pub target: u32,
    pub length: f64,
}

impl Arm {
    pub fn is_cut(&self) -> bool {
        self.target == BOUNDARY
    }
}

/// Masked lattice `h Z^2` restricted to a planar convex domain.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub h: f64,
    domain: Domain,
    /// Lattice coordinates of node 0 of the bounding index box.
    lo: [i64; 2],
    shape: [usize; 2],
    /// Box position -> node index (or `BOUNDARY` when masked out).
    lookup: Vec<u32>,
    lattice: Vec<[i64; 2]>,
    positions: Vec<[f64; 2]>,
    directions: Vec<[i32; 2]>,
    frames: Vec<(usize, usize)>,
    /// `arms[node * 2 * D + 2 * d]` is the `+v` arm of direction `d`,
    /// `+ 1` the `-v` arm.
    arms: Vec<Arm>,
    /// For each cut arm, the boundary intersection point, in arm order.
    projections: Vec<(usize, [f64; 2])>,
    colors: [std::ops::Range<usize>; 4],
}

impl GridSpec {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, node: usize) -> [f64; 2] {
        self.positions[node]
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn lattice(&self, node: usize) -> [i64; 2] {
        self.lattice[node]
    }

    pub fn directions(&self) -> &[[i32; 2]] {
        &self.directions
    }

    pub fn frames(&self) -> &[(usize, usize)] {
        &self.frames
    }

    /// `(+v arm, -v arm)` of direction `d` at `node`.
    #[inline]
    pub fn arms(&self, node: usize, d: usize) -> (Arm, Arm) {
        let base = node * 2 * self.directions.len() + 2 * d;
        (self.arms[base], self.arms[base + 1])
    }

    /// Node at lattice coordinates `(i, j)`, if interior.
    pub fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        let di = i - self.lo[0];
        let dj = j - self.lo[1];
        if di < 0 || dj < 0 || di as usize >= self.shape[0] || dj as usize >= self.shape[1] {
            return None;
        }
        let id = self.lookup[dj as usize * self.shape[0] + di as usize];
        (id != BOUNDARY).then_some(id as usize)
    }

    /// Boundary intersection points of all cut arms, as `(node, point)`.
    pub fn boundary_projections(&self) -> &[(usize, [f64; 2])] {
        &self.projections
    }

    /// Node ranges of the four lattice-parity colours. Primitive directions
    /// never join two nodes of equal parity, so each colour can be updated
    /// in parallel.
    pub fn colors(&self) -> &[std::ops::Range<usize>; 4] {
        &self.colors
    }
}

/// Builds the interior mask of `h Z^2` inside `domain` and cuts every stencil
/// arm that leaves the domain at its boundary crossing (bisection to 1e-10).
pub fn build_grid(domain: &Domain, h: f64, stencil_width: usize) -> Result<GridSpec> {
    if domain.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "grid solves are two-dimensional, domain has n = {}",
            domain.dim()
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h", h, "must be positive"));
    }
    if stencil_width == 0 {
        return Err(invalid("stencil_width", 0.0, "must be at least 1"));
    }
    let (blo, bhi) = domain.bounding_box();
    let lo = [(blo[0] / h).floor() as i64, (blo[1] / h).floor() as i64];
    let hi = [(bhi[0] / h).ceil() as i64, (bhi[1] / h).ceil() as i64];
    let shape = [(hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize];

    // Collect interior lattice points, grouped by parity colour.
    let mut by_color: [Vec<[i64; 2]>; 4] = Default::default();
    for j in lo[1]..=hi[1] {
        for i in lo[0]..=hi[0] {
            let x = [i as f64 * h, j as f64 * h];
            if domain.contains(&x)? {
                let c = (i.rem_euclid(2) + 2 * j.rem_euclid(2)) as usize;
                by_color[c].push([i, j]);
            }
        }
    }
    let total: usize = by_color.iter().map(Vec::len).sum();
    if total == 0 {
        return Err(Error::EmptyMask(h));
    }
    let mut lattice = Vec::with_capacity(total);
    let mut colors: [std::ops::Range<usize>; 4] = Default::default();
    for (c, nodes) in by_color.iter().enumerate() {
        let start = lattice.len();
        lattice.extend_from_slice(nodes);
        colors[c] = start..lattice.len();
    }
    let mut lookup = vec![BOUNDARY; shape[0] * shape[1]];
    for (id, p) in lattice.iter().enumerate() {
        let k = (p[1] - lo[1]) as usize * shape[0] + (p[0] - lo[0]) as usize;
        lookup[k] = id as u32;
    }
    let positions: Vec<[f64; 2]> = lattice
        .iter()
        .map(|p| [p[0] as f64 * h, p[1] as f64 * h])
        .collect();

    let directions = stencil_directions(stencil_width);
    let frames = orthogonal_frames(&directions);
    let mut arms = Vec::with_capacity(total * 2 * directions.len());
    let mut projections = Vec::new();
    for (id, p) in lattice.iter().enumerate() {
        for d in &directions {
            for sign in [1i64, -1] {
                let ti = p[0] + sign * d[0] as i64;
                let tj = p[1] + sign * d[1] as i64;
                let full = h * ((d[0] * d[0] + d[1] * d[1]) as f64).sqrt();
                let inside = {
                    let di = ti - lo[0];
                    let dj = tj - lo[1];
                    if di >= 0 && dj >= 0 && (di as usize) < shape[0] && (dj as usize) < shape[1] {
                        lookup[dj as usize * shape[0] + di as usize]
                    } else {
                        BOUNDARY
                    }
                };
                if inside != BOUNDARY {
                    arms.push(Arm {
                        target: inside,
                        length: full,
                    });
                    continue;
                }
                let x0 = positions[id];
                let step = [sign as f64 * d[0] as f64 * h, sign as f64 * d[1] as f64 * h];
                let (mut a, mut b) = (0.0_f64, 1.0_f64);
                while (b - a) * full > 1e-10 {
                    let m = 0.5 * (a + b);
                    if domain.contains(&[x0[0] + m * step[0], x0[1] + m * step[1]])? {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let point = [x0[0] + b * step[0], x0[1] + b * step[1]];
                projections.push((id, point));
                arms.push(Arm {
                    target: BOUNDARY,
                    length: b * full,
                });
            }
        }
    }

    Ok(GridSpec {
        h,
        domain: domain.clone(),
        lo: [lo[0], lo[1]],
        shape,
        lookup,
        lattice,
        positions,
        directions,
        frames,
        arms,
        projections,
        colors,
    })
}
