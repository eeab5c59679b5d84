//! Policy iteration for the frozen problem `MA_h(u) = f`.
//!
//! On convex grid functions the frame product satisfies
//! `sqrt(D1 D2) = min_{mu > 0} (mu D1 + D2 / mu) / 2`, so the scheme is the
//! Bellman equation `min_{frame, mu} L_{frame, mu} u = sqrt(f)` over linear
//! monotone operators. Each policy step solves one sparse linear system.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{Argsort, Pair, SparseColMat, SymbolicSparseColMat};
use faer::Mat;

use super::grid::GridSpec;
use super::scheme::directional_second_difference;
use crate::error::{Error, Result};

/// Bounds on the frame weight `mu`.
const MU_MIN: f64 = 1e-6;
const MU_MAX: f64 = 1e6;

/// `min_{mu in [MU_MIN, MU_MAX]} (mu a + b / mu) / 2` and its minimizer.
fn best_weight(a: f64, b: f64) -> (f64, f64) {
    let eval = |mu: f64| (0.5 * (mu * a + b / mu), mu);
    if a > 0.0 && b > 0.0 {
        eval((b / a).sqrt().clamp(MU_MIN, MU_MAX))
    } else {
        let lo = eval(MU_MIN);
        let hi = eval(MU_MAX);
        if hi.0 < lo.0 { hi } else { lo }
    }
}

/// Sparse operator with the union pattern of all frames, factorized
/// symbolically once per grid.
pub struct PolicySystem {
    symbolic: SymbolicSparseColMat<usize>,
    argsort: Argsort<usize>,
    lu: SymbolicLu<usize>,
    /// Value slot of `(node, direction, side)`; `u32::MAX` for cut arms.
    slots: Vec<u32>,
    /// Row `i` owns slots `diagonal[i]..diagonal[i + 1]`, diagonal first.
    diagonal: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    /// Factorization of an earlier policy, reused while refinement with it
    /// contracts fast enough.
    factor: Option<Lu<usize, f64>>,
    pub factorizations: usize,
}

/// Refinement stops once the correction falls below this, relative to the
/// iterate.
const REFINE_TOL: f64 = 1e-13;
/// Inner solves stop once the correction has shrunk by this factor; the
/// outer iteration does not need more.
const REFINE_REL: f64 = 1e-2;
const MAX_REFINE: usize = 40;
/// A refinement step that shrinks the correction by less than this triggers
/// a fresh factorization.
const STALE_RATIO: f64 = 0.25;

impl PolicySystem {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        let n = grid.len();
        let dirs = grid.directions().len();
        let mut pairs = Vec::with_capacity(n * (2 * dirs + 1));
        let mut slots = vec![u32::MAX; n * 2 * dirs];
        let mut diagonal = Vec::with_capacity(n);
        for node in 0..n {
            diagonal.push(pairs.len() as u32);
            pairs.push(Pair { row: node, col: node });
            for d in 0..dirs {
                let (p, m) = grid.arms(node, d);
                for (side, arm) in [p, m].into_iter().enumerate() {
                    if !arm.is_cut() {
                        slots[node * 2 * dirs + 2 * d + side] = pairs.len() as u32;
                        pairs.push(Pair {
                            row: node,
                            col: arm.target as usize,
                        });
                    }
                }
            }
        }
        diagonal.push(pairs.len() as u32);
        let cols = pairs.iter().map(|p| p.col as u32).collect();
        let (symbolic, argsort) = SymbolicSparseColMat::try_new_from_indices(n, n, &pairs)
            .map_err(|e| Error::Unsupported(format!("sparse pattern: {e:?}")))?;
        let lu = SymbolicLu::try_new(symbolic.as_ref())
            .map_err(|e| Error::Unsupported(format!("symbolic factorization: {e:?}")))?;
        Ok(Self {
            symbolic,
            argsort,
            lu,
            slots,
            diagonal,
            cols,
            vals: vec![0.0; pairs.len()],
            factor: None,
            factorizations: 0,
        })
    }

    /// One policy step from `values`: picks the minimizing frame and weight
    /// at every node and returns the solution of the resulting linear scheme
    /// with right-hand side `sqrt_f`.
    pub fn step(&mut self, grid: &GridSpec, values: &[f64], sqrt_f: &[f64]) -> Result<Vec<f64>> {
        let n = grid.len();
        let dirs = grid.directions().len();
        self.vals.iter_mut().for_each(|v| *v = 0.0);
        for node in 0..n {
            let mut best = (f64::INFINITY, 0usize, 1.0);
            for (k, &(i, j)) in grid.frames().iter().enumerate() {
                let a = directional_second_difference(grid, values, node, i);
                let b = directional_second_difference(grid, values, node, j);
                let (v, mu) = best_weight(a, b);
                if v < best.0 {
                    best = (v, k, mu);
                }
            }
            let (_, k, mu) = best;
            let (i, j) = grid.frames()[k];
            let mut diag = 0.0;
            for (d, w) in [(i, 0.5 * mu), (j, 0.5 / mu)] {
                let (p, m) = grid.arms(node, d);
                let (lp, lm) = (p.length, m.length);
                let cp = 2.0 / (lp * (lp + lm));
                let cm = 2.0 / (lm * (lp + lm));
                diag += w * (cp + cm);
                for (side, c) in [cp, cm].into_iter().enumerate() {
                    let slot = self.slots[node * 2 * dirs + 2 * d + side];
                    if slot != u32::MAX {
                        self.vals[slot as usize] -= w * c;
                    }
                }
            }
            self.vals[self.diagonal[node] as usize] = diag;
        }
        let mut x = values.to_vec();
        let mut previous = f64::INFINITY;
        let mut first = None;
        for _ in 0..MAX_REFINE {
            if self.factor.is_none() {
                self.refactor()?;
                previous = f64::INFINITY;
            }
            let mut r = Mat::<f64>::from_fn(n, 1, |row, _| {
                let (lo, hi) = (self.diagonal[row] as usize, self.diagonal[row + 1] as usize);
                let ax: f64 = (lo..hi).map(|k| self.vals[k] * x[self.cols[k] as usize]).sum();
                -sqrt_f[row] - ax
            });
            self.factor.as_ref().expect("factorized above").solve_in_place(r.as_mut());
            let size = (0..n).fold(0.0_f64, |m, row| m.max(r[(row, 0)].abs()));
            if size > STALE_RATIO * previous {
                // The old factorization no longer contracts; drop this
                // correction and factorize the current policy.
                self.factor = None;
                continue;
            }
            let mut scale = 0.0_f64;
            for (row, xr) in x.iter_mut().enumerate() {
                *xr += r[(row, 0)];
                scale = scale.max(xr.abs());
            }
            let first = *first.get_or_insert(size);
            if size <= REFINE_TOL * scale.max(1.0) || size <= REFINE_REL * first {
                break;
            }
            previous = size;
        }
        Ok(x.into_iter().map(|v| v.min(0.0)).collect())
    }

    fn refactor(&mut self) -> Result<()> {
        let mat = SparseColMat::new_from_argsort(self.symbolic.clone(), &self.argsort, &self.vals)
            .map_err(|e| Error::Unsupported(format!("sparse assembly: {e:?}")))?;
        let lu = Lu::try_new_with_symbolic(self.lu.clone(), mat.as_ref())
            .map_err(|e| Error::Unsupported(format!("sparse factorization: {e:?}")))?;
        self.factor = Some(lu);
        self.factorizations += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::solver::grid::build_grid;
    use crate::solver::scheme::ma_operator;

    #[test]
    fn weight_realizes_geometric_mean() {
        let (v, mu) = best_weight(4.0, 9.0);
        assert!((v - 6.0).abs() < 1e-14);
        assert!((mu - 1.5).abs() < 1e-14);
        let (v, _) = best_weight(-1.0, 2.0);
        assert!(v < 0.0);
    }

    #[test]
    fn policy_iteration_solves_constant_rhs() {
        let d = Domain::ball(2, 1.0).unwrap();
        let g = build_grid(&d, 1.0 / 16.0, 2).unwrap();
        let mut sys = PolicySystem::new(&g).unwrap();
        let mut u: Vec<f64> = g.positions().iter().map(|x| -d.dist_to_boundary(x).unwrap()).collect();
        let one = vec![1.0; g.len()];
        for _ in 0..20 {
            u = sys.step(&g, &u, &one).unwrap();
        }
        for node in 0..g.len() {
            assert!((ma_operator(&g, &u, node) - 1.0).abs() < 1e-8);
            let x = g.position(node);
            assert!((u[node] - 0.5 * (x[0] * x[0] + x[1] * x[1] - 1.0)).abs() < 1e-8);
        }
    }
}
