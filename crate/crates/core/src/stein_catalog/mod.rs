//! Stein operators in a common affine normal form, and the check that each
//! operator annihilates its law.

mod catalog;
mod grid;
mod operator;

pub use catalog::*;
pub use grid::{catalog_cases, CatalogCase, CatalogGrid};
pub use operator::{
    characterization_defect, indicator_defects, max_indicator_defect, AffineOperator, AffineTerm,
    DefectReport, TabulatedTerm, TestFunction,
};
