//! Relaxed enumeration for homogeneous linear separators, with version-space
//! volumes estimated by Hit-and-Run sampling in the unit ball.

mod arc;
mod learner;
mod sampler;

pub use arc::{analytic_arc_fraction_2d, analytic_arc_width_2d};
pub use learner::{linsep_abstention_scale, separability_measure, LinsepBudgetState, LinsepRelaxedEnumeration};
pub use sampler::{
    estimate_vote_fraction, hit_and_run_sample, interior_point, vote_fraction, SamplerConfig,
    SeparatorVersionSpace,
};
