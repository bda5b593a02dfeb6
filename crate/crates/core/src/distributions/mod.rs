//! Exact laws on the nonnegative integers: standard families, convolutions,
//! compound sums, moments and distances.

mod compound;
mod families;
mod metrics;
mod pmf;

pub use compound::{pmf_compound_explicit, pmf_compound_panjer, PanjerCounting, SeverityLaw};
pub(crate) use families::bernoulli_step;
pub use families::{
    pmf_bcp, pmf_binomial, pmf_negative_binomial, pmf_poisson, pmf_poisson_binomial,
    pmf_pseudo_binomial,
};
pub(crate) use metrics::wasserstein1_slices;
pub use metrics::{
    convolve, first_difference_norm, l1_distance, second_difference_norm, tv_interval, tv_norm,
    wasserstein1, TvInterval,
};
pub use pmf::{moments, MomentKind, Pmf, DEFAULT_TOL};
