use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, CompensatedSum};

/// Default truncation tolerance for infinite-support laws.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A probability mass function on `{0, 1, 2, ...}`, stored up to a truncation
/// point. Mass beyond the stored window is accounted for by `tail_mass`, an
/// upper bound on the probability that was not materialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    masses: Vec<f64>,
    tail_mass: f64,
    tol: f64,
}

/// Raw or central moment selector for [`Pmf::moment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    Raw,
    Central,
}

impl Pmf {
    /// Validating constructor for externally supplied masses.
    pub fn new(masses: Vec<f64>, tail_mass: f64, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(crate::error::invalid("tol", tol, "must be positive"));
        }
        if !(tail_mass.is_finite() && tail_mass >= 0.0) {
            return Err(crate::error::invalid(
                "tail_mass",
                tail_mass,
                "must be nonnegative",
            ));
        }
        if tail_mass > tol {
            return Err(Error::NotNormalized(format!(
                "tail mass {tail_mass:e} exceeds tolerance {tol:e}"
            )));
        }
        for (index, &value) in masses.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let total = numeric::sum(masses.iter().copied()) + tail_mass;
        // rounding slack proportional to the number of stored entries
        let slack = tol + 4.0 * f64::EPSILON * masses.len() as f64;
        if (total - 1.0).abs() > slack {
            return Err(Error::NotNormalized(format!(
                "masses plus tail sum to {total}, expected 1 within {tol:e}"
            )));
        }
        Ok(Self {
            masses,
            tail_mass,
            tol,
        })
    }

    /// Internal constructor; trailing exact zeros are trimmed.
    pub(crate) fn from_parts(mut masses: Vec<f64>, tail_mass: f64, tol: f64) -> Self {
        while masses.len() > 1 && masses.last() == Some(&0.0) {
            masses.pop();
        }
        if masses.is_empty() {
            masses.push(0.0);
        }
        Self {
            masses,
            tail_mass: tail_mass.max(0.0),
            tol,
        }
    }

    /// Point mass at `k`.
    pub fn point(k: usize) -> Self {
        let mut masses = vec![0.0; k + 1];
        masses[k] = 1.0;
        Self {
            masses,
            tail_mass: 0.0,
            tol: DEFAULT_TOL,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn into_masses(self) -> Vec<f64> {
        self.masses
    }

    /// `P(X = j)` within the stored window, zero beyond it.
    #[inline]
    pub fn get(&self, j: usize) -> f64 {
        self.masses.get(j).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Sum of the stored masses.
    pub fn stored_mass(&self) -> f64 {
        numeric::sum(self.masses.iter().copied())
    }

    /// Largest index carrying positive stored mass.
    pub fn max_support(&self) -> usize {
        self.masses.iter().rposition(|&m| m > 0.0).unwrap_or(0)
    }

    /// Interval `[lower, upper]` containing `P(X > t)`.
    pub fn upper_tail(&self, t: usize) -> (f64, f64) {
        let stored = if t + 1 < self.masses.len() {
            numeric::sum(self.masses[t + 1..].iter().copied())
        } else {
            0.0
        };
        (stored, stored + self.tail_mass)
    }

    /// Cumulative distribution over the stored window.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        self.masses
            .iter()
            .map(|&m| {
                acc.add(m);
                acc.value()
            })
            .collect()
    }

    pub fn mean(&self) -> f64 {
        numeric::sum(self.masses.iter().enumerate().map(|(j, &m)| j as f64 * m))
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        numeric::sum(
            self.masses
                .iter()
                .enumerate()
                .map(|(j, &m)| (j as f64 - mean).powi(2) * m),
        )
    }

    /// Raw or central moment of order `k` in `1..=4`, by direct summation over
    /// the stored window.
    pub fn moment(&self, k: u32, kind: MomentKind) -> Result<f64> {
        if !(1..=4).contains(&k) {
            return Err(crate::error::invalid(
                "k",
                k as f64,
                "moment order must be in 1..=4",
            ));
        }
        let shift = match kind {
            MomentKind::Raw => 0.0,
            MomentKind::Central => self.mean(),
        };
        Ok(numeric::sum(
            self.masses
                .iter()
                .enumerate()
                .map(|(j, &m)| (j as f64 - shift).powi(k as i32) * m),
        ))
    }

    /// Same law with the stored masses scaled to sum to exactly one and the
    /// tail dropped. Used where a finite law is needed (e.g. Stein solutions).
    pub fn renormalized(&self) -> Self {
        let total = self.stored_mass();
        Self {
            masses: self.masses.iter().map(|m| m / total).collect(),
            tail_mass: 0.0,
            tol: self.tol,
        }
    }
}

/// Raw or central moment of order `k` in `1..=4`.
pub fn moments(p: &Pmf, k: u32, kind: MomentKind) -> Result<f64> {
    p.moment(k, kind)
}
