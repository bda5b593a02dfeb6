//! Stein operators for discrete laws, exact distributions, and perturbation
//! bounds for approximating indicator sums by a binomial convolved with a
//! Poisson law.

pub mod bcp_indicators;
pub mod distributions;
pub mod error;
pub mod formats;
pub mod numeric;
pub mod runs_model;
pub mod stein_catalog;
pub mod stein_solver;

pub use distributions::{Pmf, SeverityLaw, TvInterval};
pub use error::{Error, Result};
pub use stein_catalog::{AffineOperator, TestFunction};
