//! Benchmark fixtures.

use steinops::bcp_indicators::{IndicatorModel, JointLaw};

/// Half the probabilities at 1/6, the rest at 1/12.
pub fn two_level(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i < n / 2 { 1.0 / 6.0 } else { 1.0 / 12.0 })
        .collect()
}

/// Equal mixture of two independent laws on `n` indicators, which makes
/// every pair positively correlated.
pub fn mixed_joint(n: usize) -> IndicatorModel {
    let a: Vec<f64> = (0..n).map(|i| 0.02 + 0.01 * i as f64).collect();
    let b: Vec<f64> = (0..n).map(|i| 0.12 - 0.005 * i as f64).collect();
    let prob = |q: &[f64], m: u32| {
        (0..n)
            .map(|i| if m >> i & 1 == 1 { q[i] } else { 1.0 - q[i] })
            .product::<f64>()
    };
    let atoms = (0..1u32 << n)
        .map(|m| (m, 0.5 * prob(&a, m) + 0.5 * prob(&b, m)))
        .collect();
    IndicatorModel::joint(JointLaw::new(n, atoms).expect("valid mixture")).expect("valid model")
}
