//! The (1,1)-runs statistic `W = Σ_{j=2}^n X_j (1 - X_{j-1})` over iid
//! Bernoulli(`p*`) trials: exact law, moments, fitted approximation and bounds.

use serde::{Deserialize, Serialize};

use crate::bcp_indicators::{
    exact_tv, fit_summary, BcpParams, BoundItem, BoundReport, Hypothesis, Quantity, Theorem,
};
use crate::distributions::{pmf_bcp, second_difference_norm, Pmf};
use crate::error::{check_open_unit, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunsModel {
    pub n: usize,
    pub p_star: f64,
}

impl RunsModel {
    pub fn new(n: usize, p_star: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", n as f64, "runs model needs n >= 2"));
        }
        check_open_unit("p_star", p_star)?;
        Ok(Self { n, p_star })
    }

    /// `a = p*(1 - p*) = P(I_j = 1)`.
    pub fn a(&self) -> f64 {
        self.p_star * (1.0 - self.p_star)
    }

    /// `(n - 2) a >= 8`, the condition for the smoothness bounds.
    pub fn smoothness_hypothesis(&self) -> bool {
        (self.n as f64 - 2.0) * self.a() >= 8.0
    }

    /// Number of indicators, `n - 1`.
    pub fn indicators(&self) -> usize {
        self.n - 1
    }
}

/// Dynamic program over `(X_{j-1}, count)`.
///
/// `skip[j]` drops indicator `I_j` from the count; `forced[j]` pins `X_j`.
/// Returns the unnormalized masses of the count restricted to the forced
/// event, whose total is the event's probability.
pub(crate) fn runs_dp(model: &RunsModel, skip: &[usize], forced: &[(usize, bool)]) -> Vec<f64> {
    let n = model.n;
    let (p, q) = (model.p_star, 1.0 - model.p_star);
    let pinned = |j: usize| forced.iter().find(|&&(k, _)| k == j).map(|&(_, v)| v);
    let weight = |j: usize, x: bool| match pinned(j) {
        Some(v) if v != x => 0.0,
        _ => {
            if x {
                p
            } else {
                q
            }
        }
    };
    // cur[x][c]: probability of X_j = x with count c so far
    let mut cur = [vec![0.0; n], vec![0.0; n]];
    cur[0][0] = weight(1, false);
    cur[1][0] = weight(1, true);
    for j in 2..=n {
        let counts = !skip.contains(&j);
        let (w0, w1) = (weight(j, false), weight(j, true));
        let mut next = [vec![0.0; n], vec![0.0; n]];
        for c in 0..j - 1 {
            let (from0, from1) = (cur[0][c], cur[1][c]);
            if from0 == 0.0 && from1 == 0.0 {
                continue;
            }
            next[0][c] += (from0 + from1) * w0;
            next[1][c] += from1 * w1;
            let bump = if counts { c + 1 } else { c };
            next[1][bump] += from0 * w1;
        }
        cur = next;
    }
    let mut masses: Vec<f64> = cur[0].iter().zip(&cur[1]).map(|(a, b)| a + b).collect();
    while masses.len() > 1 && masses.last() == Some(&0.0) {
        masses.pop();
    }
    masses
}

fn normalized(masses: Vec<f64>) -> Vec<f64> {
    let total = crate::numeric::sum(masses.iter().copied());
    masses.into_iter().map(|m| m / total).collect()
}

/// Law of `W` minus the indicators at positions `skip` (each in `2..=n`),
/// optionally conditioned on `I_given = 1`.
pub(crate) fn runs_law(model: &RunsModel, skip: &[usize], given: Option<usize>) -> Vec<f64> {
    let forced: Vec<(usize, bool)> = match given {
        Some(j) => vec![(j - 1, false), (j, true)],
        None => Vec::new(),
    };
    normalized(runs_dp(model, skip, &forced))
}

/// Exact law of `W`.
pub fn exact_runs_law(model: &RunsModel) -> Pmf {
    let masses = runs_dp(model, &[], &[]);
    Pmf::from_parts(masses, 0.0, crate::distributions::DEFAULT_TOL)
}

/// Mean, variance and third central moment in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunsMoments {
    pub mean: f64,
    pub variance: f64,
    pub third_central: f64,
}

pub fn runs_moments(model: &RunsModel) -> RunsMoments {
    let n = model.n as f64;
    let a = model.a();
    RunsMoments {
        mean: (n - 1.0) * a,
        variance: (n - 1.0) * a + (5.0 - 3.0 * n) * a * a,
        third_central: (n - 1.0) * a
            + (15.0 - 9.0 * n) * a * a
            + 4.0 * (5.0 * n - 11.0) * a.powi(3),
    }
}

/// Matches the first three moments of `W` with a binomial convolved with a
/// Poisson: `Mp² = (3n-5)a²` and `Mp³ = 2(5n-11)a³`, so
/// `p = (10n-22)a/(3n-5)`, `M + δ = (3n-5)³/(10n-22)²`, `α = (n-1)a - Mp`.
pub fn fit_runs_bcp(model: &RunsModel) -> Result<BcpParams> {
    if model.n < 3 {
        return Err(invalid("n", model.n as f64, "moment fit needs n >= 3"));
    }
    let n = model.n as f64;
    let a = model.a();
    let (u, v) = (3.0 * n - 5.0, 10.0 * n - 22.0);
    let p = v / u * a;
    if p >= 1.0 {
        return Err(invalid(
            "p",
            p,
            "fitted success probability must be below 1",
        ));
    }
    let ratio = u.powi(3) / (v * v);
    let m = ratio.floor();
    let alpha = ((n - 1.0) * a - m * p).max(0.0);
    Ok(BcpParams {
        m: m as u64,
        delta: ratio - m,
        p,
        alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunsConstants {
    pub k1: f64,
    pub k2: f64,
    pub c1: f64,
    /// `K1/(n-1) + K2/√(n-1)`.
    pub gamma_n1: f64,
}

pub fn runs_constants(model: &RunsModel) -> RunsConstants {
    let a = model.a();
    let k1 = 288.0 * (1.0 - 3.0 * a) / a;
    let k2 = 4.0 / (a * (1.0 - a).min(0.5).sqrt());
    let c1 = 2.0
        * 1.0f64.max(2.0 * (1.0 - a))
        * a
        * (1.0 + 2.0 * a + 4.0 * a * a)
        * (1.0 - a * (1.0 - a));
    let m = model.n as f64 - 1.0;
    RunsConstants {
        k1,
        k2,
        c1,
        gamma_n1: k1 / m + k2 / m.sqrt(),
    }
}

/// `K1/m + K2/√m`.
fn gamma_at(c: &RunsConstants, m: f64) -> f64 {
    c.k1 / m + c.k2 / m.sqrt()
}

/// Exact smoothness quantities against their runs-model bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunsSmoothnessReport {
    pub hypothesis_holds: bool,
    pub d: f64,
    pub d_bound: f64,
    pub d1: f64,
    pub d1_bound: f64,
}

impl RunsSmoothnessReport {
    pub fn d_holds(&self) -> bool {
        self.d <= self.d_bound
    }

    pub fn d1_holds(&self) -> bool {
        self.d1 <= self.d1_bound
    }
}

/// Exact `d` and `d1 = max_i Σ|Δ²P(W^{(i)} = k)|`, the latter by the DP with
/// indicator `i` excluded from the count.
pub fn runs_smoothness(model: &RunsModel) -> (f64, f64) {
    let d = second_difference_norm(exact_runs_law(model).masses());
    let d1 = (2..=model.n)
        .map(|i| second_difference_norm(&runs_law(model, &[i], None)))
        .fold(0.0, f64::max);
    (d, d1)
}

pub fn runs_smoothness_check(model: &RunsModel) -> RunsSmoothnessReport {
    let c = runs_constants(model);
    let (d, d1) = runs_smoothness(model);
    let n = model.n as f64;
    RunsSmoothnessReport {
        hypothesis_holds: model.smoothness_hypothesis(),
        d,
        d_bound: gamma_at(&c, n - 1.0),
        d1,
        d1_bound: if model.n > 2 {
            gamma_at(&c, n - 2.0)
        } else {
            f64::INFINITY
        },
    }
}

/// Mean and variance of the waiting time for the first `01` pattern,
/// `E T = 1/a`, `V T = (1 - 3a)/a²`.
pub fn waiting_time_moments(p_star: f64) -> Result<(f64, f64)> {
    check_open_unit("p_star", p_star)?;
    let a = p_star * (1.0 - p_star);
    Ok((1.0 / a, (1.0 - 3.0 * a) / (a * a)))
}

/// Runs-model bound built from the fitted parameters, the smoothness
/// constants and the coupling constant `C1`.
pub fn bound_cor48(model: &RunsModel) -> Result<BoundReport> {
    let params = fit_runs_bcp(model)?;
    let c = runs_constants(model);
    let n = model.n as f64;
    let a = model.a();
    let (m, p, delta, alpha) = (params.m as f64, params.p, params.delta, params.alpha);
    let lambda_hat = (n - 1.0) * a;
    let one_minus_2p = 1.0 - 2.0 * p;
    let theta1 = m * p * p / (one_minus_2p * one_minus_2p * (m * p + alpha));
    let prefactor = 2.0 / ((1.0 - 2.0 * theta1) * lambda_hat);
    let smooth = gamma_at(&c, n - 2.0);

    let items = vec![
        BoundItem::new(
            "smoothness",
            (n * a.powi(4) + m * p.powi(4) / (one_minus_2p * one_minus_2p)) * smooth,
            prefactor,
        ),
        BoundItem::new("fractional", (1.0 + 2.0 * p) * delta * p * p, prefactor),
        BoundItem::new("coupling", (n - 1.0) * c.c1, prefactor),
    ];
    let hypotheses = vec![
        Hypothesis::at_most("p", p, 0.5),
        Hypothesis::at_most("theta1", theta1, 0.5),
        Hypothesis::at_least("(n-2)a", (n - 2.0) * a, 8.0),
    ];
    let law = exact_runs_law(model);
    let approx = pmf_bcp(params.m, p, alpha, crate::distributions::DEFAULT_TOL)?;
    let mut quantities = fit_summary(&params);
    quantities.extend([
        Quantity::new("lambda_hat", lambda_hat),
        Quantity::new("theta1", theta1),
        Quantity::new("K1", c.k1),
        Quantity::new("K2", c.k2),
        Quantity::new("C1", c.c1),
        Quantity::new("gamma(n-2)", smooth),
    ]);
    let tv = exact_tv(&law, &approx);
    Ok(BoundReport::assemble(
        Theorem::Cor48,
        model.indicators(),
        params,
        hypotheses,
        quantities,
        items,
        tv,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_trials_give_one_indicator() {
        let m = RunsModel::new(2, 0.3).unwrap();
        let law = exact_runs_law(&m);
        assert!((law.get(1) - 0.21).abs() < 1e-16);
        assert!((law.get(0) - 0.79).abs() < 1e-15);
        let mo = runs_moments(&m);
        assert!((mo.variance - 0.21 * 0.79).abs() < 1e-15);
    }

    #[test]
    fn half_probability_mean() {
        let m = RunsModel::new(10, 0.5).unwrap();
        assert_eq!(runs_moments(&m).mean, 2.25);
    }

    #[test]
    fn fitted_parameters_for_ten_trials() {
        let m = RunsModel::new(10, 0.5).unwrap();
        let f = fit_runs_bcp(&m).unwrap();
        // (3n-5)³/(10n-22)² = 15625/6084
        assert_eq!(f.m, 2);
        assert!((f.delta - (15625.0 / 6084.0 - 2.0)).abs() < 1e-15);
        assert!((f.p - 78.0 / 25.0 * 0.25).abs() < 1e-15);
        assert!(fit_runs_bcp(&RunsModel::new(2, 0.5).unwrap()).is_err());
    }

    #[test]
    fn constants_at_half() {
        let c = runs_constants(&RunsModel::new(50, 0.5).unwrap());
        assert!((c.k1 - 288.0).abs() < 1e-12);
        assert!((c.k2 - 16.0 * 2f64.sqrt()).abs() < 1e-12);
        let (mean, var) = waiting_time_moments(0.5).unwrap();
        assert_eq!((mean, var), (4.0, 4.0));
    }
}
