//! The monotone wide-stencil Monge-Ampère operator and its pointwise solve.

use super::grid::{Arm, GridSpec};

#[inline]
fn arm_value(values: &[f64], arm: Arm) -> f64 {
    if arm.is_cut() {
        0.0
    } else {
        values[arm.target as usize]
    }
}

/// Second difference with unequal arms `lp`, `lm`:
/// `2/(lp+lm) [(up-u0)/lp + (um-u0)/lm]`.
#[inline]
pub fn second_difference(u0: f64, up: f64, um: f64, lp: f64, lm: f64) -> f64 {
    2.0 / (lp + lm) * ((up - u0) / lp + (um - u0) / lm)
}

/// Writes the second difference along direction `d` as `B (t - u0)` and
/// returns `(t, B)`.
#[inline]
fn split(grid: &GridSpec, values: &[f64], node: usize, d: usize) -> (f64, f64) {
    let (p, m) = grid.arms(node, d);
    let (up, um) = (arm_value(values, p), arm_value(values, m));
    let (lp, lm) = (p.length, m.length);
    let b = 2.0 / (lp * lm);
    // A / B with A = 2/(lp+lm) (up/lp + um/lm)
    let t = (up * lm + um * lp) / (lp + lm);
    (t, b)
}

/// Second difference of `values` along stencil direction `d` at `node`.
pub fn directional_second_difference(grid: &GridSpec, values: &[f64], node: usize, d: usize) -> f64 {
    let (p, m) = grid.arms(node, d);
    second_difference(
        values[node],
        arm_value(values, p),
        arm_value(values, m),
        p.length,
        m.length,
    )
}

/// Minimum over orthogonal frames of the product of positive parts of the
/// two second differences. Ties keep the first frame.
pub fn ma_operator(grid: &GridSpec, values: &[f64], node: usize) -> f64 {
    let mut best = f64::INFINITY;
    for &(i, j) in grid.frames() {
        let a = directional_second_difference(grid, values, node, i).max(0.0);
        let b = directional_second_difference(grid, values, node, j).max(0.0);
        let v = a * b;
        if v < best {
            best = v;
        }
    }
    best
}

/// Index of the frame attaining the minimum in [`ma_operator`].
pub fn active_frame(grid: &GridSpec, values: &[f64], node: usize) -> usize {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (k, &(i, j)) in grid.frames().iter().enumerate() {
        let a = directional_second_difference(grid, values, node, i).max(0.0);
        let b = directional_second_difference(grid, values, node, j).max(0.0);
        if a * b < best {
            best = a * b;
            arg = k;
        }
    }
    arg
}

/// Value `u0` at `node` with neighbours frozen such that
/// `ma_operator = f`. The frame product is decreasing in `u0`, so the
/// operator equals `f` at the smallest per-frame root.
pub fn local_solve(grid: &GridSpec, values: &[f64], node: usize, f: f64) -> f64 {
    let mut u0 = f64::INFINITY;
    for &(i, j) in grid.frames() {
        let (t1, b1) = split(grid, values, node, i);
        let (t2, b2) = split(grid, values, node, j);
        // (t1 - u)(t2 - u) = g with u below both t's.
        let g = f / (b1 * b2);
        let delta = (t1 - t2).abs();
        let y = 2.0 * g / (delta + (delta * delta + 4.0 * g).sqrt());
        let root = if g > 0.0 { t1.min(t2) - y } else { t1.min(t2) };
        u0 = u0.min(root);
    }
    u0
}

/// Discrete gradient from the axis arms: the three-point derivative with
/// unequal spacing, centred on full stencils.
pub fn gradient(grid: &GridSpec, values: &[f64], node: usize) -> [f64; 2] {
    let u0 = values[node];
    let mut g = [0.0; 2];
    for (k, gk) in g.iter_mut().enumerate() {
        let (p, m) = grid.arms(node, k);
        let (up, um) = (arm_value(values, p), arm_value(values, m));
        let (lp, lm) = (p.length, m.length);
        *gk = (lm / (lp * (lp + lm))) * (up - u0) + (lp / (lm * (lp + lm))) * (u0 - um);
    }
    g
}

/// `x . Du - u` from the discrete gradient.
pub fn support(grid: &GridSpec, values: &[f64], node: usize) -> f64 {
    let g = gradient(grid, values, node);
    let x = grid.position(node);
    g[0] * x[0] + g[1] * x[1] - values[node]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::solver::grid::build_grid;
    use rand::Rng;

    fn full_stencil(grid: &GridSpec, node: usize) -> bool {
        (0..grid.directions().len()).all(|d| {
            let (p, m) = grid.arms(node, d);
            !p.is_cut() && !m.is_cut()
        })
    }

    fn sample(grid: &GridSpec, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        grid.positions().iter().map(|&x| f(x)).collect()
    }

    #[test]
    fn quadratic_gives_one() {
        let d = Domain::ball(2, 1.0).unwrap();
        let g = build_grid(&d, 1.0 / 16.0, 2).unwrap();
        let u = sample(&g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1]) - 0.5);
        for node in 0..g.len() {
            let v = ma_operator(&g, &u, node);
            if full_stencil(&g, node) {
                assert!((v - 1.0).abs() < 1e-10, "{v}");
            }
        }
    }

    #[test]
    fn affine_and_degenerate_give_zero() {
        let d = Domain::ball(2, 1.0).unwrap();
        let g = build_grid(&d, 1.0 / 16.0, 2).unwrap();
        let affine = sample(&g, |x| 0.3 * x[0] - 0.7 * x[1] - 2.0);
        let ridge = sample(&g, |x| 0.5 * x[0] * x[0]);
        for node in 0..g.len() {
            if full_stencil(&g, node) {
                assert!(ma_operator(&g, &affine, node).abs() < 1e-10);
                assert!(ma_operator(&g, &ridge, node).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn local_solve_inverts_operator() {
        let d = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
        let g = build_grid(&d, 1.0 / 16.0, 2).unwrap();
        let mut rng = crate::sampling::seeded_rng(3);
        let mut u: Vec<f64> = (0..g.len()).map(|_| -rng.random::<f64>()).collect();
        for node in (0..g.len()).step_by(7) {
            let f = 0.1 + 5.0 * rng.random::<f64>();
            u[node] = local_solve(&g, &u, node, f);
            let back = ma_operator(&g, &u, node);
            assert!((back - f).abs() < 1e-9 * f.max(1.0), "{back} vs {f}");
        }
    }

    #[test]
    fn gradient_is_exact_for_quadratics() {
        let d = Domain::ball(2, 1.0).unwrap();
        let g = build_grid(&d, 1.0 / 8.0, 2).unwrap();
        // Vanishes on the circle, so cut arms carry the right boundary value.
        let u = sample(&g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1] - 1.0));
        for node in 0..g.len() {
            let gr = gradient(&g, &u, node);
            let x = g.position(node);
            assert!((gr[0] - x[0]).abs() < 1e-8 && (gr[1] - x[1]).abs() < 1e-8);
        }
    }
}
