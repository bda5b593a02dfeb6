//! Solutions of the Stein equation for birth-death operators, their
//! smoothness bounds, and perturbation constants.

mod birth_death;
mod bounds;

pub use birth_death::{solve_stein, stationary_pmf, BirthDeathOperator, SteinSolution};
pub use bounds::{
    delta_bound_check, negative_binomial_delta_bound, perturbation_bound, perturbation_constants,
    perturbation_report, poisson_delta_bound, pseudo_binomial_delta_bound, DeltaBoundReport,
    PerturbationConstants, PerturbationKind, PerturbationParams, PerturbationReport,
};
