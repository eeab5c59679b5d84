//! Planar grid solver: masked lattice, monotone wide-stencil operator and
//! the regularized fixed point.

pub mod grid;
pub mod policy;
pub mod scheme;
pub mod solve;

pub use grid::{build_grid, GridSpec};
pub use scheme::ma_operator;
pub use solve::{default_damping, epsilon_zero, solve, solve_on, DiscreteSolution, Init, InnerSolver, SolveConfig};
