//! Approximating a sum of indicators by a binomial convolved with a Poisson
//! law: parameter fitting, smoothness of the sum's law, and itemized bounds
//! on the total variation error.

mod bounds;
mod fit;
mod model;
mod report;
mod smoothness;

pub use bounds::{
    approximant, bound_cor42, bound_cor45, bound_thm41, bound_thm44, bound_thm44_with_d2,
    model_fit, t_hat, tail_bound_psi, theta1, theta2, APPROX_TOL,
};
pub use fit::{fit_bcp, BcpParams, PowerSums};
pub use model::{IndicatorModel, JointLaw, ModelSpec, MAX_JOINT_INDICATORS};
pub(crate) use report::{exact_tv, fit_summary};
pub use report::{BoundItem, BoundReport, Hypothesis, Quantity, Relation, Theorem};
pub use smoothness::{
    coupling_distances, d1_bound, d_bound, eta1, smoothness_exact, SmoothnessStats,
};
