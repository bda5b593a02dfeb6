use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::numeric;

/// Parameters of the binomial-convolved-with-Poisson approximant
/// `Bi(M, p) * Poisson(α)`, with `δ` the fractional part dropped from `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcpParams {
    pub m: u64,
    pub delta: f64,
    pub p: f64,
    pub alpha: f64,
}

/// Power sums `Σ p_i^k` for `k = 1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSums {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

impl PowerSums {
    pub fn of(probs: &[f64]) -> Self {
        let s = |k: i32| numeric::sum(probs.iter().map(|p| p.powi(k)));
        Self {
            s1: s(1),
            s2: s(2),
            s3: s(3),
            s4: s(4),
        }
    }

    /// `σ² = Σ p_i q_i`.
    pub fn sigma2(&self) -> f64 {
        self.s1 - self.s2
    }

    /// `τ = max_i p_i q_i`.
    pub fn tau(probs: &[f64]) -> f64 {
        probs.iter().map(|p| p * (1.0 - p)).fold(0.0, f64::max)
    }
}

/// Ratios this close to an integer are treated as that integer, so that equal
/// probabilities give `δ = 0` despite rounding in the power sums.
const SNAP: f64 = 1e-12;

/// Matches the first three moments of an independent sum:
/// `M + δ = (Σp²)³/(Σp³)²`, `p = Σp³/Σp²`, `α = Σp - Mp`.
pub fn fit_bcp(probs: &[f64]) -> Result<BcpParams> {
    if probs.is_empty() {
        return Err(Error::Empty("success probabilities"));
    }
    for &p in probs {
        check_open_unit("p_i", p)?;
    }
    let s = PowerSums::of(probs);
    let p = s.s3 / s.s2;
    let ratio = s.s2 * (s.s2 / s.s3) * (s.s2 / s.s3);
    let nearest = ratio.round();
    let (m, delta) = if (ratio - nearest).abs() <= SNAP * ratio {
        (nearest, 0.0)
    } else {
        let m = ratio.floor();
        (m, ratio - m)
    };
    // Σp - Mp >= δp >= 0 exactly; clamp the rounding residue
    let alpha = (s.s1 - m * p).max(0.0);
    Ok(BcpParams {
        m: m as u64,
        delta,
        p,
        alpha,
    })
}
