use serde::{Deserialize, Serialize};

use crate::distributions::{first_difference_norm, second_difference_norm, wasserstein1_slices};
use crate::runs_model::runs_smoothness;

use super::fit::PowerSums;
use super::model::IndicatorModel;

/// Smoothness of the law of `W` and of its leave-one-out and leave-two-out
/// versions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessStats {
    /// `Σ_k |Δ²P(W = k)|`.
    pub d: f64,
    /// `max_i Σ_k |Δ²P(W^{(i)} = k)|`.
    pub d1: f64,
    /// `max_{i≠j} Σ_k |ΔP(W^{(ij)} = k)|`; `None` when not computed.
    pub d2: Option<f64>,
    /// `max_{i≠j} Σ_k |Δ²P(W^{(ij)} = k)|`, the second-difference analogue.
    pub d2_second: Option<f64>,
}

/// Exact `d`, `d1`, and optionally `d2`, from the model's exact laws.
pub fn smoothness_exact(model: &IndicatorModel, with_pairs: bool) -> SmoothnessStats {
    let n = model.n();
    let (d, d1) = match model {
        IndicatorModel::Runs(r) => runs_smoothness(r),
        _ => {
            let d = second_difference_norm(&model.law_without(&[]));
            let d1 = (0..n)
                .map(|i| second_difference_norm(&model.law_without(&[i])))
                .fold(0.0, f64::max);
            (d, d1)
        }
    };
    let (d2, d2_second) = if with_pairs {
        let (first, second) = pair_smoothness(model);
        (Some(first), Some(second))
    } else {
        (None, None)
    };
    SmoothnessStats {
        d,
        d1,
        d2,
        d2_second,
    }
}

/// Without any pair the quantity never enters a bound; the largest possible
/// first (second) difference norm of a law, 2 (4), is returned.
fn pair_smoothness(model: &IndicatorModel) -> (f64, f64) {
    let n = model.n();
    if n < 2 {
        return (2.0, 4.0);
    }
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let law = model.law_without(&[i, j]);
            first = first.max(first_difference_norm(&law));
            second = second.max(second_difference_norm(&law));
        }
    }
    (first, second)
}

/// `2/(σ√(σ² - τ))`, an upper bound on `d` for independent indicators.
pub fn d_bound(probs: &[f64]) -> Option<f64> {
    let (sigma2, tau) = (PowerSums::of(probs).sigma2(), PowerSums::tau(probs));
    (sigma2 > tau).then(|| 2.0 / (sigma2.sqrt() * (sigma2 - tau).sqrt()))
}

/// `2/√((σ² - τ)(σ² - 3τ))`, an upper bound on `d1` for independent
/// indicators with `σ² > 3τ`.
pub fn d1_bound(probs: &[f64]) -> Option<f64> {
    let (sigma2, tau) = (PowerSums::of(probs).sigma2(), PowerSums::tau(probs));
    (sigma2 > 3.0 * tau).then(|| 2.0 / ((sigma2 - tau) * (sigma2 - 3.0 * tau)).sqrt())
}

/// `E|W̃^{(i)} - W^{(i)}|` under the minimal coupling, for every `i`.
pub fn coupling_distances(model: &IndicatorModel) -> Vec<f64> {
    if model.is_independent() {
        return vec![0.0; model.n()];
    }
    (0..model.n())
        .map(|i| wasserstein1_slices(&model.law_without_given(&[i], i), &model.law_without(&[i])))
        .collect()
}

/// `η_1 = Σ p_i (1 + 2p_i + 4p_i²) E|W̃^{(i)} - W^{(i)}|`.
pub fn eta1(model: &IndicatorModel) -> f64 {
    eta1_from(&model.marginals(), &coupling_distances(model))
}

pub(crate) fn eta1_from(probs: &[f64], couplings: &[f64]) -> f64 {
    crate::numeric::sum(
        probs
            .iter()
            .zip(couplings)
            .map(|(p, c)| p * (1.0 + 2.0 * p + 4.0 * p * p) * c),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcp_indicators::JointLaw;

    #[test]
    fn single_fair_indicator() {
        let m = IndicatorModel::independent(vec![0.5]).unwrap();
        let s = smoothness_exact(&m, true);
        assert!((s.d - 2.0).abs() < 1e-15);
        // W^{(1)} = 0 identically
        assert!((s.d1 - 4.0).abs() < 1e-15);
    }

    #[test]
    fn independent_eta_vanishes() {
        let m = IndicatorModel::independent(vec![0.1, 0.2]).unwrap();
        assert_eq!(eta1(&m), 0.0);
    }

    #[test]
    fn correlated_pair_coupling() {
        let law = JointLaw::new(2, vec![(0b11, 0.3), (0b00, 0.7)]).unwrap();
        let m = IndicatorModel::joint(law).unwrap();
        let c = coupling_distances(&m);
        assert!((c[0] - 0.7).abs() < 1e-15 && (c[1] - 0.7).abs() < 1e-15);
    }
}
