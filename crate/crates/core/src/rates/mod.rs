//! Halanay-type rate equations, theorem preconditions, the shrink factor and
//! the convexity bound.

mod convexity;
mod equality;
mod halanay;
mod shrink;
mod theorems;

pub use convexity::{convexity_bound_check, ConvexWeights, ConvexityCheck};
pub use equality::{max_normalized_excess, simulate_halanay_equality, HalanayTrace};
pub use halanay::{solve_halanay, HalanayProblem, Measure, RateResult, BRACKET_WIDTH};
pub use shrink::{shrink_factor, shrink_iteration, ShrinkEstimate, ShrinkRecord};
pub use theorems::{
    check_preconditions, psi0_lower, rate_reaction_nonsymmetric, rate_transmission_normalized, PreconditionReport,
    TheoremCheck,
};
