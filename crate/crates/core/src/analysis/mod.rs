//! Exponent fits, the bootstrap recurrence, comparison and bound checks.

pub mod bootstrap;
pub mod compare;
pub mod fit;
pub mod mixc;

pub use bootstrap::{bootstrap, minimal_steps, BootstrapTrace};
pub use compare::{check_comparison, sandwich, sup_norm_bound_check, trace_inequality_check, Comparison, Evaluable, Sandwich, SupNormBounds};
pub use fit::{axis_profile, barrier_axis_samples, fit_exponent, log_spaced, FitResult};
pub use mixc::{mixc_exponent, mixc_identity_gap, mixc_probe, mixc_threshold, MixcReport};
