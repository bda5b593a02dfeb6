use crate::distributions::{pmf_bcp, wasserstein1_slices, Pmf};
use crate::error::{check_open_unit, invalid, Result};
use crate::numeric::{self, CompensatedSum};
use crate::runs_model::fit_runs_bcp;

use super::fit::{fit_bcp, BcpParams, PowerSums};
use super::model::IndicatorModel;
use super::report::{exact_tv, fit_summary, BoundItem, BoundReport, Hypothesis, Quantity, Theorem};
use super::smoothness::{coupling_distances, d1_bound, d_bound, eta1_from, smoothness_exact};

/// Truncation tolerance for the approximant's Poisson factor; it enters the
/// exact-TV interval directly.
pub const APPROX_TOL: f64 = 1e-15;

/// Fitted parameters: moment matching on the marginals, or the runs fit.
pub fn model_fit(model: &IndicatorModel) -> Result<BcpParams> {
    match model {
        IndicatorModel::Runs(r) => fit_runs_bcp(r),
        _ => fit_bcp(&model.marginals()),
    }
}

pub fn approximant(params: &BcpParams) -> Result<Pmf> {
    pmf_bcp(params.m, params.p, params.alpha, APPROX_TOL)
}

/// `θ_1 = Mp²/((1-2p)²(Mp+α))`.
pub fn theta1(params: &BcpParams) -> f64 {
    let m = params.m as f64;
    if m == 0.0 {
        return 0.0;
    }
    let p = params.p;
    let d = 1.0 - 2.0 * p;
    m * p * p / (d * d * (m * p + params.alpha))
}

/// `T̂ = ⌊M + α/p⌋`.
pub fn t_hat(params: &BcpParams) -> u64 {
    (params.m as f64 + params.alpha / params.p).floor() as u64
}

/// `θ_2 = α/(qT̂)`.
pub fn theta2(params: &BcpParams) -> f64 {
    if params.alpha == 0.0 {
        return 0.0;
    }
    params.alpha / ((1.0 - params.p) * t_hat(params) as f64)
}

struct Common {
    params: BcpParams,
    probs: Vec<f64>,
    sums: PowerSums,
    law: Pmf,
    approx: Pmf,
}

impl Common {
    fn new(model: &IndicatorModel) -> Result<Self> {
        let params = model_fit(model)?;
        let probs = model.marginals();
        Ok(Self {
            sums: PowerSums::of(&probs),
            law: model.law(),
            approx: approximant(&params)?,
            params,
            probs,
        })
    }

    fn lambda_hat(&self) -> f64 {
        self.sums.s1
    }

    fn poisson_prefactor(&self) -> f64 {
        2.0 / ((1.0 - 2.0 * theta1(&self.params)) * self.lambda_hat())
    }

    fn poisson_hypotheses(&self) -> Vec<Hypothesis> {
        vec![
            Hypothesis::less_than("p", self.params.p, 0.5),
            Hypothesis::less_than("theta1", theta1(&self.params), 0.5),
        ]
    }

    fn binomial_hypotheses(&self) -> Vec<Hypothesis> {
        vec![
            Hypothesis::at_least("T_hat", t_hat(&self.params) as f64, 1.0),
            Hypothesis::less_than("theta2", theta2(&self.params), 0.5),
        ]
    }

    fn variance_hypothesis(&self) -> Hypothesis {
        Hypothesis::greater_than(
            "sigma2 - 3 tau",
            self.sums.sigma2() - 3.0 * PowerSums::tau(&self.probs),
            0.0,
        )
    }

    fn base_quantities(&self) -> Vec<Quantity> {
        let mut q = fit_summary(&self.params);
        q.extend([
            Quantity::new("lambda_hat", self.lambda_hat()),
            Quantity::new("sigma2", self.sums.sigma2()),
            Quantity::new("tau", PowerSums::tau(&self.probs)),
        ]);
        q
    }

    /// `(1 + 2p) δ p²`.
    fn fractional_poisson(&self) -> f64 {
        let p = self.params.p;
        (1.0 + 2.0 * p) * self.params.delta * p * p
    }

    /// `Mp⁴/(1-2p)²`.
    fn binomial_weight(&self) -> f64 {
        let p = self.params.p;
        self.params.m as f64 * p.powi(4) / (1.0 - 2.0 * p).powi(2)
    }

    /// `Σp_i⁴ - pΣp_i³`, nonnegative by Cauchy–Schwarz.
    fn spread(&self) -> Result<f64> {
        let v = self.sums.s4 - self.params.p * self.sums.s3;
        if v < -1e-12 * self.sums.s4 {
            return Err(invalid("sum p^4 - p sum p^3", v, "must be nonnegative"));
        }
        Ok(v.max(0.0))
    }

    /// Prefactor of the braces and of the tail terms in the binomial bounds.
    fn binomial_prefactors(&self) -> (f64, f64) {
        let p = self.params.p;
        let outer = 2.0 / (1.0 - 2.0 * theta2(&self.params));
        (outer / (p * (1.0 - p) * t_hat(&self.params) as f64), outer)
    }

    fn tails(&self) -> (f64, f64) {
        let t = t_hat(&self.params) as usize;
        (self.law.upper_tail(t).1, self.approx.upper_tail(t).1)
    }

    fn finish(
        self,
        theorem: Theorem,
        n: usize,
        hypotheses: Vec<Hypothesis>,
        quantities: Vec<Quantity>,
        items: Vec<BoundItem>,
    ) -> BoundReport {
        let tv = exact_tv(&self.law, &self.approx);
        BoundReport::assemble(theorem, n, self.params, hypotheses, quantities, items, tv)
    }
}

/// Poisson-perturbation bound with exact smoothness and coupling terms:
/// `2/((1-2θ_1)λ̂) {d_1 Σp_i⁴ + d Mp⁴/(1-2p)² + (1+2p)δp² + η_1}`.
pub fn bound_thm41(model: &IndicatorModel) -> Result<BoundReport> {
    let c = Common::new(model)?;
    let s = smoothness_exact(model, false);
    let eta = eta1_from(&c.probs, &coupling_distances(model));
    let pre = c.poisson_prefactor();
    let items = vec![
        BoundItem::new("d1_sum_p4", s.d1 * c.sums.s4, pre),
        BoundItem::new("d_binomial", s.d * c.binomial_weight(), pre),
        BoundItem::new("fractional", c.fractional_poisson(), pre),
        BoundItem::new("eta1", eta, pre),
    ];
    let mut q = c.base_quantities();
    q.extend([
        Quantity::new("theta1", theta1(&c.params)),
        Quantity::new("d", s.d),
        Quantity::new("d1", s.d1),
        Quantity::new("eta1", eta),
    ]);
    let hyps = c.poisson_hypotheses();
    Ok(c.finish(Theorem::Thm41, model.n(), hyps, q, items))
}

/// The independent case of [`bound_thm41`] with `d` and `d_1` replaced by
/// their closed-form bounds.
pub fn bound_cor42(probs: &[f64]) -> Result<BoundReport> {
    let model = IndicatorModel::independent(probs.to_vec())?;
    let c = Common::new(&model)?;
    let pre = c.poisson_prefactor();
    let db = d_bound(probs).unwrap_or(f64::INFINITY);
    let d1b = d1_bound(probs).unwrap_or(f64::INFINITY);
    let items = vec![
        BoundItem::new("d1_sum_p4", d1b * c.sums.s4, pre),
        BoundItem::new("d_binomial", db * c.binomial_weight(), pre),
        BoundItem::new("fractional", c.fractional_poisson(), pre),
    ];
    let mut q = c.base_quantities();
    q.extend([
        Quantity::new("theta1", theta1(&c.params)),
        Quantity::new("d_bound", db),
        Quantity::new("d1_bound", d1b),
    ]);
    let mut hyps = c.poisson_hypotheses();
    hyps.push(c.variance_hypothesis());
    Ok(c.finish(Theorem::Cor42, probs.len(), hyps, q, items))
}

/// Binomial-perturbation bound for general indicators with the exact `d_2`.
pub fn bound_thm44(model: &IndicatorModel) -> Result<BoundReport> {
    let d2 = smoothness_exact_pairs(model);
    bound_thm44_with(model, d2.0, Some(d2.1))
}

fn smoothness_exact_pairs(model: &IndicatorModel) -> (f64, f64) {
    let s = smoothness_exact(model, true);
    (s.d2.unwrap_or(2.0), s.d2_second.unwrap_or(4.0))
}

/// [`bound_thm44`] with `d_2` supplied, e.g. replaced by an upper bound.
pub fn bound_thm44_with_d2(model: &IndicatorModel, d2: f64) -> Result<BoundReport> {
    bound_thm44_with(model, d2, None)
}

fn bound_thm44_with(
    model: &IndicatorModel,
    d2: f64,
    d2_second: Option<f64>,
) -> Result<BoundReport> {
    let c = Common::new(model)?;
    let n = model.n();
    let p = c.params.p;
    let (pre, outer) = c.binomial_prefactors();
    let couplings = coupling_distances(model);
    let coupling = numeric::sum(
        c.probs
            .iter()
            .zip(&couplings)
            .map(|(pi, ci)| pi * (2.0 + 2.0 * (pi - p).abs()) * ci),
    );

    // ordered pairs i ≠ j; both double sums vanish for independent indicators
    let mut cov_sum = CompensatedSum::new();
    let mut pair_sum = CompensatedSum::new();
    if !model.is_independent() {
        for i in 0..n {
            for j in 0..n {
                let gap = (c.probs[i] - c.probs[j]).abs();
                if i == j || gap == 0.0 {
                    continue;
                }
                let w = c.probs[i] * c.probs[j] * gap;
                cov_sum.add(w * d2 * gap * model.covariance(i, j).abs());
                let w1 = wasserstein1_slices(
                    &model.law_without_given(&[i, j], i),
                    &model.law_without(&[i, j]),
                );
                pair_sum.add(w * 4.0 * c.probs[i] * c.probs[j] * w1);
            }
        }
    }
    let half_inv = 1.0 / (2.0 * c.sums.s2);
    let (tail_w, tail_bcp) = c.tails();
    let items = vec![
        BoundItem::new("d2_spread", d2 * c.spread()?, pre),
        BoundItem::new("fractional", c.params.delta * p * p, pre),
        BoundItem::new("coupling", coupling, pre),
        BoundItem::new("covariance", half_inv * cov_sum.value(), pre),
        BoundItem::new("pair_coupling", half_inv * pair_sum.value(), pre),
        BoundItem::new("tail_bcp", tail_bcp, outer),
        BoundItem::new("tail_w", tail_w, outer),
    ];
    let mut q = c.base_quantities();
    q.extend([
        Quantity::new("T_hat", t_hat(&c.params) as f64),
        Quantity::new("theta2", theta2(&c.params)),
        Quantity::new("d2", d2),
    ]);
    if let Some(v) = d2_second {
        q.push(Quantity::new("d2_second_difference", v));
    }
    let hyps = c.binomial_hypotheses();
    Ok(c.finish(Theorem::Thm44, n, hyps, q, items))
}

/// Binomial-perturbation bound for independent indicators:
/// `2/(1-2θ_2) {4(Σp_i⁴ - pΣp_i³)/(pqT̂(σ²-3τ)) + δp² + P(W > T̂) + P(Y_1+Y_2 > T̂)}`.
pub fn bound_cor45(probs: &[f64]) -> Result<BoundReport> {
    let model = IndicatorModel::independent(probs.to_vec())?;
    let c = Common::new(&model)?;
    let p = c.params.p;
    let (pre, outer) = c.binomial_prefactors();
    let gap = c.sums.sigma2() - 3.0 * PowerSums::tau(probs);
    let spread = c.spread()?;
    let spread_term = if spread == 0.0 {
        0.0
    } else if gap > 0.0 {
        4.0 * spread / gap
    } else {
        f64::INFINITY
    };
    let (tail_w, tail_bcp) = c.tails();
    let items = vec![
        BoundItem::new("spread", spread_term, pre),
        BoundItem::new("fractional", c.params.delta * p * p, outer),
        BoundItem::new("tail_w", tail_w, outer),
        BoundItem::new("tail_bcp", tail_bcp, outer),
    ];
    let mut q = c.base_quantities();
    q.extend([
        Quantity::new("T_hat", t_hat(&c.params) as f64),
        Quantity::new("theta2", theta2(&c.params)),
        Quantity::new("spread", spread),
        Quantity::new("tail_psi", tail_bound_psi(p, c.lambda_hat())?),
    ]);
    let mut hyps = c.binomial_hypotheses();
    hyps.push(c.variance_hypothesis());
    Ok(c.finish(Theorem::Cor45, probs.len(), hyps, q, items))
}

/// `exp(-λ̂ψ(p))` with `ψ(p) = (-ln p - 1)/p + 1`, an analytic bound on
/// `P(W > T̂) + P(Y_1 + Y_2 > T̂)` for independent indicators.
pub fn tail_bound_psi(p: f64, lambda_hat: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    if !(lambda_hat.is_finite() && lambda_hat >= 0.0) {
        return Err(invalid("lambda_hat", lambda_hat, "must be nonnegative"));
    }
    let psi = (-p.ln() - 1.0) / p + 1.0;
    Ok((-lambda_hat * psi).exp())
}
