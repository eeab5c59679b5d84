//! Barrier constructions, a monotone wide-stencil solver and verification
//! tools for the singular Monge-Ampere equations
//!
//! ```text
//! det D^2 u = |u|^{-p}                          in Omega, u = 0 on the boundary,
//! det D^2 u = |u|^{-n-2-k} (x . Du - u)^{-k}    in Omega, u = 0 on the boundary,
//! ```
//!
//! on bounded convex domains.
//!
//! * [`domain`]: the parametric convex domains and their geometry.
//! * [`barriers`]: closed-form sub/supersolutions, explicit solutions and
//!   their admissibility constants, in any dimension `n >= 2`.
//! * [`solver`]: planar grid solver with singular right-hand sides.
//! * [`analysis`]: Holder-exponent fits, the exponent bootstrap, comparison
//!   and bound checks.

pub mod analysis;
pub mod barriers;
pub mod domain;
pub mod error;
pub mod jet;
pub mod oracle;
pub mod rhs;
pub mod sampling;
pub mod solver;
pub mod verify;

pub use barriers::{Barrier, BarrierKind, ExplicitKind, Role};
pub use domain::{Domain, DomainKind};
pub use error::{Error, Result};
pub use jet::Jet2;
pub use rhs::RhsSpec;
