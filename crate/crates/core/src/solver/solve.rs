//! Lagged fixed point with epsilon continuation.

use std::time::Instant;

use rayon::prelude::*;

use super::grid::{build_grid, GridSpec};
use super::policy::PolicySystem;
use super::scheme::{directional_second_difference, local_solve, ma_operator, support};
use crate::barriers::{volume_ratio_constant, Barrier};
use crate::domain::{Domain, DomainKind};
use crate::error::{invalid, Error, Result};
use crate::rhs::RhsSpec;

/// Starting iterate.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Matched subsolution when one exists, otherwise the cone.
    Auto,
    /// `-dist_to_boundary`.
    Cone,
    /// Explicit nodal values, one per node of the grid.
    Values(Vec<f64>),
}

/// How the frozen problem `MA_h(u) = f_m` is advanced inside one outer
/// iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    /// Policy-iteration steps, one sparse solve each.
    Policy { steps: usize },
    /// Nonlinear Gauss-Seidel sweeps in four-colour order.
    GaussSeidel { sweeps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub h: f64,
    /// Lattice radius of the stencil; 2 gives 8 direction pairs.
    pub stencil_width: usize,
    /// Initial regularization, `None` for [`epsilon_zero`].
    pub eps0: Option<f64>,
    pub eps_ratio: f64,
    pub eps_floor: f64,
    /// Update size below which the next epsilon stage starts.
    pub stage_tolerance: f64,
    /// Relaxation `lambda` of the outer update, `None` for
    /// [`default_damping`].
    pub damping: Option<f64>,
    /// Sup-norm update at which the final stage stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Solver for each frozen right-hand side.
    pub inner: InnerSolver,
    /// Lower cutoff for `x . Du - u` in the affine-sphere right-hand side.
    pub support_floor: f64,
    pub init: Init,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            h: 1.0 / 64.0,
            stencil_width: 2,
            eps0: None,
            eps_ratio: 0.5,
            eps_floor: 1e-8,
            stage_tolerance: 1e-3,
            damping: None,
            tolerance: 1e-10,
            max_iterations: 200_000,
            inner: InnerSolver::Policy { steps: 1 },
            support_floor: 1e-8,
            init: Init::Auto,
        }
    }
}

impl SolveConfig {
    pub fn with_h(h: f64) -> Self {
        Self {
            h,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(invalid("h", self.h, "must be positive"));
        }
        if self.stencil_width == 0 {
            return Err(invalid("stencil_width", 0.0, "must be at least 1"));
        }
        if let Some(e) = self.eps0 {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(invalid("eps0", e, "must be nonnegative"));
            }
        }
        if !(self.eps_ratio > 0.0 && self.eps_ratio < 1.0) {
            return Err(invalid("eps_ratio", self.eps_ratio, "must lie in (0, 1)"));
        }
        if !(self.eps_floor >= 0.0 && self.eps_floor.is_finite()) {
            return Err(invalid("eps_floor", self.eps_floor, "must be nonnegative"));
        }
        if let Some(l) = self.damping {
            if !(l > 0.0 && l <= 1.0) {
                return Err(invalid("damping", l, "must lie in (0, 1]"));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", self.tolerance, "must be positive"));
        }
        if !(self.stage_tolerance > 0.0) {
            return Err(invalid("stage_tolerance", self.stage_tolerance, "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations", 0.0, "must be positive"));
        }
        match self.inner {
            InnerSolver::Policy { steps: 0 } => {
                return Err(invalid("inner_steps", 0.0, "must be positive"))
            }
            InnerSolver::GaussSeidel { sweeps: 0 } => {
                return Err(invalid("inner_sweeps", 0.0, "must be positive"))
            }
            _ => {}
        }
        if !(self.support_floor > 0.0) {
            return Err(invalid("support_floor", self.support_floor, "must be positive"));
        }
        Ok(())
    }
}

/// Converged nodal solution on a masked grid.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub rhs: RhsSpec,
    pub eps_final: f64,
    pub iterations: usize,
    /// Largest relative residual `|MA_h(u) / f(u) - 1|` over the nodes.
    pub residual_norm: f64,
    /// Set when the support floor is active at some node at convergence.
    pub floor_bound: bool,
    pub runtime_seconds: f64,
}

impl DiscreteSolution {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Bilinear interpolation of the nodal values. Cell corners outside the
    /// domain take the boundary value 0; points outside the domain give 0.
    pub fn value_at(&self, x: [f64; 2]) -> Result<f64> {
        let domain = self.grid.domain();
        if !domain.contains(&x)? {
            return Ok(0.0);
        }
        let h = self.grid.h;
        let (fi, fj) = (x[0] / h, x[1] / h);
        let (i0, j0) = (fi.floor() as i64, fj.floor() as i64);
        let (tx, ty) = (fi - i0 as f64, fj - j0 as f64);
        let corner = |i: i64, j: i64| -> f64 {
            self.grid.node_at(i, j).map_or(0.0, |k| self.values[k])
        };
        Ok((1.0 - tx) * (1.0 - ty) * corner(i0, j0)
            + tx * (1.0 - ty) * corner(i0 + 1, j0)
            + (1.0 - tx) * ty * corner(i0, j0 + 1)
            + tx * ty * corner(i0 + 1, j0 + 1))
    }

    /// Smallest second difference over all nodes and stencil directions.
    pub fn min_second_difference(&self) -> f64 {
        (0..self.grid.len())
            .into_par_iter()
            .map(|node| {
                (0..self.grid.directions().len())
                    .map(|d| directional_second_difference(&self.grid, &self.values, node, d))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// Discrete `x . Du - u` at a node.
    pub fn support(&self, node: usize) -> f64 {
        support(&self.grid, &self.values, node)
    }
}

/// Degree `m` of homogeneity of `f` in `u` (`x . Du - u` scales with `u`).
fn homogeneity(rhs: &RhsSpec) -> f64 {
    match *rhs {
        RhsSpec::PowerSingular { p } => p,
        RhsSpec::Degenerate { q } => q,
        RhsSpec::AffineSphere { k } => 4.0 + 2.0 * k,
    }
}

/// `lambda = 2n / (2n + m)` for a right-hand side homogeneous of degree
/// `m`. Scaling `u` by `1 + d` changes the frozen solve by `-m d / n`, and
/// this choice balances that mode against the slowest local one.
pub fn default_damping(rhs: &RhsSpec) -> f64 {
    4.0 / (4.0 + homogeneity(rhs).abs())
}

/// Largest `eps0` with `eps0^n (2 eps0)^p C(n) / area^2 < 1/2`, by bisection.
pub fn epsilon_zero(n: usize, p: f64, area: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", n as f64, "dimension must be at least 2"));
    }
    if !(p >= 0.0 && p.is_finite()) {
        return Err(invalid("p", p, "must be nonnegative"));
    }
    if !(area > 0.0 && area.is_finite()) {
        return Err(invalid("area", area, "must be positive"));
    }
    let c = volume_ratio_constant(n);
    let ok = |e: f64| e.powi(n as i32) * (2.0 * e).powf(p) * c / (area * area) < 0.5;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn initial_values(grid: &GridSpec, rhs: &RhsSpec, init: &Init) -> Result<Vec<f64>> {
    let domain = grid.domain();
    let barrier = match (init, rhs, domain.kind()) {
        (Init::Values(v), _, _) => {
            if v.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
            return Ok(v.iter().map(|x| x.min(0.0)).collect());
        }
        (Init::Cone, _, _) => None,
        (Init::Auto, RhsSpec::PowerSingular { p }, DomainKind::ParabolaCap { gamma, .. })
            if *gamma == 0.0 =>
        {
            Some(Barrier::sub_valpha_for_power(domain, *p)?)
        }
        (Init::Auto, RhsSpec::PowerSingular { p }, DomainKind::SphereCap) => {
            Some(Barrier::sub_valpha_for_power(domain, *p)?)
        }
        (Init::Auto, RhsSpec::AffineSphere { k }, DomainKind::ParabolaCap { t, gamma })
            if *t == 1.0 && *gamma > 0.0 =>
        {
            Some(Barrier::sub_valpha_k(2, *k, *gamma, *gamma, domain.diameter())?)
        }
        _ => None,
    };
    grid.positions()
        .iter()
        .map(|x| match &barrier {
            Some(b) => b.value(x).map(|v| v.min(0.0)),
            None => domain.dist_to_boundary(x).map(|d| -d),
        })
        .collect()
}

struct Rhs<'a> {
    grid: &'a GridSpec,
    spec: RhsSpec,
    floor: f64,
}

impl Rhs<'_> {
    /// Frozen right-hand side; returns whether the support floor was used.
    fn fill(&self, values: &[f64], eps: f64, out: &mut [f64]) -> Result<bool> {
        let spec = self.spec;
        let floored = out
            .par_iter_mut()
            .enumerate()
            .map(|(node, f)| {
                let (s, hit) = if spec.needs_support() {
                    let s = support(self.grid, values, node);
                    if s < self.floor { (self.floor, true) } else { (s, false) }
                } else {
                    (0.0, false)
                };
                *f = spec.eval_regularized(2, values[node], s, eps)?;
                Ok(hit)
            })
            .try_reduce(|| false, |a, b| Ok(a || b))?;
        Ok(floored)
    }
}

/// One four-colour Gauss-Seidel sweep with frozen `f`.
fn sweep(grid: &GridSpec, values: &mut [f64], f: &[f64], buf: &mut [f64]) {
    for range in grid.colors().iter() {
        let chunk = &mut buf[range.clone()];
        let v: &[f64] = values;
        chunk
            .par_iter_mut()
            .enumerate()
            .for_each(|(k, out)| {
                let node = range.start + k;
                *out = local_solve(grid, v, node, f[node]).min(0.0);
            });
        values[range.clone()].copy_from_slice(chunk);
    }
}

/// Solves `det D^2 u = f` with `u = 0` on the boundary of a planar domain.
pub fn solve(domain: &Domain, rhs: RhsSpec, cfg: &SolveConfig) -> Result<DiscreteSolution> {
    cfg.validate()?;
    if let RhsSpec::AffineSphere { .. } = rhs {
        if domain.contains_origin_interior().is_none() {
            return Err(Error::Unsupported(
                "the affine-sphere equation needs the origin inside the domain".into(),
            ));
        }
    }
    let grid = build_grid(domain, cfg.h, cfg.stencil_width)?;
    let values = initial_values(&grid, &rhs, &cfg.init)?;
    solve_on(grid, rhs, cfg, values)
}

/// Runs the iteration on a prepared grid from the given starting values.
pub fn solve_on(grid: GridSpec, rhs: RhsSpec, cfg: &SolveConfig, mut values: Vec<f64>) -> Result<DiscreteSolution> {
    cfg.validate()?;
    let start = Instant::now();
    let n = grid.len();
    let regularized = !matches!(rhs, RhsSpec::Degenerate { .. });
    let mut eps = if regularized {
        match cfg.eps0 {
            Some(e) => e,
            None => {
                let p = match rhs {
                    RhsSpec::PowerSingular { p } => p,
                    RhsSpec::AffineSphere { k } => 4.0 + k,
                    RhsSpec::Degenerate { .. } => 0.0,
                };
                epsilon_zero(2, p, grid.domain().volume()?)?
            }
        }
        .max(cfg.eps_floor)
    } else {
        0.0
    };
    let lambda = cfg.damping.unwrap_or_else(|| default_damping(&rhs));
    let floor = if regularized { cfg.eps_floor } else { 0.0 };
    let source = Rhs {
        grid: &grid,
        spec: rhs,
        floor: cfg.support_floor,
    };
    let mut f = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut buf = vec![0.0; n];
    let mut sqrt_f = vec![0.0; n];
    let mut policy: Option<PolicySystem> = None;
    let mut last_update = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        source.fill(&values, eps, &mut f)?;
        next.copy_from_slice(&values);
        match cfg.inner {
            InnerSolver::Policy { steps } => {
                if policy.is_none() {
                    policy = Some(PolicySystem::new(&grid)?);
                }
                let system = policy.as_mut().expect("initialized above");
                sqrt_f.par_iter_mut().zip(f.par_iter()).for_each(|(r, v)| *r = v.sqrt());
                for _ in 0..steps {
                    next = system.step(&grid, &next, &sqrt_f)?;
                }
            }
            InnerSolver::GaussSeidel { sweeps } => {
                for _ in 0..sweeps {
                    sweep(&grid, &mut next, &f, &mut buf);
                }
            }
        }
        last_update = values
            .par_iter_mut()
            .zip(next.par_iter())
            .map(|(u, &w)| {
                let step = lambda * (w - *u);
                *u = (*u + step).min(0.0);
                step.abs()
            })
            .reduce(|| 0.0, f64::max);
        if !last_update.is_finite() {
            break;
        }
        if eps > floor {
            if last_update < cfg.stage_tolerance {
                eps = (eps * cfg.eps_ratio).max(floor);
            }
        } else if last_update < cfg.tolerance {
            let floor_bound = source.fill(&values, eps, &mut f)?;
            let residual_norm = (0..n)
                .into_par_iter()
                .map(|node| (ma_operator(&grid, &values, node) / f[node] - 1.0).abs())
                .reduce(|| 0.0, f64::max);
            return Ok(DiscreteSolution {
                grid,
                values,
                rhs,
                eps_final: eps,
                iterations: iteration,
                residual_norm,
                floor_bound,
                runtime_seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        last_update,
    })
}
