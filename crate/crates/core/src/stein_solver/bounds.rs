use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, check_positive, invalid, Error, Result};

use super::birth_death::{BirthDeathOperator, SteinSolution};

/// Outcome of checking `|Δg(j)| <= c ‖f‖ min(1/α_j, 1/β_j)` on a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaBoundReport {
    /// The monotone-rate hypothesis holds on the whole support.
    pub hypothesis_holds: bool,
    /// Set when the hypothesis fails: the comparison is reported but not
    /// asserted.
    pub informational: bool,
    /// `c` above: 1 for `[0, 1]`-valued `f`, else 2.
    pub factor: f64,
    /// `max_j |Δg(j)|` over `j >= 1` in the window.
    pub sup_delta: f64,
    /// `max_j |Δg(j)| / (c ‖f‖ min(1/α_j, 1/β_j))`; at most 1 when the bound holds.
    pub worst_ratio: f64,
    pub violations: usize,
}

impl DeltaBoundReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Pointwise comparison of the solved `Δg` against the rate bound.
pub fn delta_bound_check(bd: &BirthDeathOperator, sol: &SteinSolution) -> DeltaBoundReport {
    let n = sol.law.len();
    let factor = if sol.unit_valued { 1.0 } else { 2.0 };
    let scale = if sol.unit_valued {
        1.0
    } else {
        2.0 * sol.f_norm
    };
    let hypothesis_holds = bd.is_monotone(n) && bd.closes_at_end();
    let mut sup_delta: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut violations = 0;
    // stop one short of the window end, where the truncated chain is closed off
    for j in 1..n.saturating_sub(1) {
        let delta = (sol.g.get(j + 1) - sol.g.get(j)).abs();
        sup_delta = sup_delta.max(delta);
        let rate = bd.alpha(j).max(bd.beta(j));
        if rate <= 0.0 {
            continue;
        }
        let bound = scale / rate;
        // slack for rounding in the solved values
        let slack = 1e-12 * scale.max(delta);
        if delta > bound + slack {
            violations += 1;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(delta / bound);
        }
    }
    DeltaBoundReport {
        hypothesis_holds,
        informational: !hypothesis_holds,
        factor,
        sup_delta,
        worst_ratio,
        violations,
    }
}

/// Uniform bounds on `‖Δg‖` for the three standard families.
pub fn poisson_delta_bound(lambda: f64, f_norm: f64) -> f64 {
    2.0 * f_norm / lambda.max(1.0)
}

pub fn negative_binomial_delta_bound(r: f64, p_bar: f64, f_norm: f64) -> f64 {
    2.0 * f_norm / (r * (1.0 - p_bar))
}

pub fn pseudo_binomial_delta_bound(m_tilde: f64, p: f64, f_norm: f64) -> f64 {
    2.0 * f_norm / (m_tilde.floor() * p * (1.0 - p))
}

/// Which perturbation is being used, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PerturbationParams {
    /// Compound Poisson as a perturbed Poisson; `lambdas[0]` is `λ_1`.
    O1 { lambdas: Vec<f64> },
    /// Binomial convolved with Poisson, around a pseudo-binomial.
    O2 { m: u64, p: f64, alpha: f64 },
    /// Binomial convolved with Poisson, around a Poisson.
    O3 { m: u64, p: f64, alpha: f64 },
    /// Binomial convolved with negative binomial, around a pseudo-binomial.
    O4 { m: u64, p: f64, r: f64, p_bar: f64 },
    /// Binomial convolved with negative binomial, around a negative binomial.
    O5 { m: u64, p: f64, r: f64, p_bar: f64 },
    /// Binomial convolved with negative binomial, around a Poisson.
    O6 { m: u64, p: f64, r: f64, p_bar: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationKind {
    O1,
    O2,
    O3,
    O4,
    O5,
    O6,
}

/// Constants with `‖Δg_0‖ <= ω_1 ‖f‖ min(1, 1/γ)` and `‖Ug‖ <= ω_2 ‖Δg‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConstants {
    pub kind: PerturbationKind,
    pub omega1: f64,
    pub omega2: f64,
    pub gamma: f64,
    /// `ω_1 ω_2 < γ`.
    pub valid: bool,
}

fn q_minus_p_sq(p: f64) -> Result<f64> {
    let d = 1.0 - 2.0 * p;
    if d == 0.0 {
        Err(invalid("p", p, "p = q makes the series constants infinite"))
    } else {
        Ok(d * d)
    }
}

pub fn perturbation_constants(params: &PerturbationParams) -> Result<PerturbationConstants> {
    use PerturbationParams::*;
    let (kind, omega1, omega2, gamma) = match *params {
        O1 { ref lambdas } => {
            if lambdas.is_empty() {
                return Err(Error::Empty("compound Poisson rates"));
            }
            let gamma: f64 = lambdas
                .iter()
                .enumerate()
                .map(|(i, l)| (i + 1) as f64 * l)
                .sum();
            let omega2: f64 = lambdas
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, l)| ((i + 1) * i) as f64 * l.abs())
                .sum();
            (PerturbationKind::O1, 2.0, omega2, gamma)
        }
        O2 { m, p, alpha } => {
            check_open_unit("p", p)?;
            let q = 1.0 - p;
            let gamma = (m as f64 + alpha / p).floor();
            (PerturbationKind::O2, 2.0 / (p * q), p * alpha, gamma)
        }
        O3 { m, p, alpha } => {
            check_open_unit("p", p)?;
            let mf = m as f64;
            (
                PerturbationKind::O3,
                2.0,
                mf * p * p / q_minus_p_sq(p)?,
                mf * p + alpha,
            )
        }
        O4 { m, p, r, p_bar } => {
            check_open_unit("p", p)?;
            check_positive("r", r)?;
            check_open_unit("p_bar", p_bar)?;
            let (q, q_bar) = (1.0 - p, 1.0 - p_bar);
            let gamma = (m as f64 + r * q_bar / (p * p_bar)).floor() * p * q;
            let omega2 = r * q_bar * (q * q_bar + p) / (p_bar * p_bar);
            (PerturbationKind::O4, 2.0, omega2, gamma)
        }
        O5 { m, p, r, p_bar } => {
            check_open_unit("p", p)?;
            check_positive("r", r)?;
            check_open_unit("p_bar", p_bar)?;
            let (q, q_bar) = (1.0 - p, 1.0 - p_bar);
            let mf = m as f64;
            let omega2 = mf * p * q * (p / q + q_bar) / q_minus_p_sq(p)?;
            (
                PerturbationKind::O5,
                2.0,
                omega2,
                mf * p * p_bar + r * q_bar,
            )
        }
        O6 { m, p, r, p_bar } => {
            check_open_unit("p", p)?;
            check_positive("r", r)?;
            check_open_unit("p_bar", p_bar)?;
            let q_bar = 1.0 - p_bar;
            let mf = m as f64;
            let omega2 = mf * p * p / q_minus_p_sq(p)? + r * q_bar * q_bar / (p_bar * p_bar);
            (
                PerturbationKind::O6,
                2.0,
                omega2,
                mf * p + r * q_bar / p_bar,
            )
        }
    };
    Ok(PerturbationConstants {
        kind,
        omega1,
        omega2,
        gamma,
        valid: gamma > 0.0 && omega1 * omega2 < gamma,
    })
}

/// `γ/(γ - ω_1 ω_2) (ε ω_1 min(1, 1/γ) + 2 P(Z > K) + 2 P(W > K))`.
pub fn perturbation_bound(
    pc: &PerturbationConstants,
    eps: f64,
    pz_tail: f64,
    pw_tail: f64,
) -> Result<f64> {
    if !pc.valid {
        return Err(Error::InvalidPerturbation {
            product: pc.omega1 * pc.omega2,
            gamma: pc.gamma,
        });
    }
    for (name, v) in [("eps", eps), ("pz_tail", pz_tail), ("pw_tail", pw_tail)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(invalid(name, v, "must be nonnegative"));
        }
    }
    let g = pc.gamma;
    Ok(g / (g - pc.omega1 * pc.omega2)
        * (eps * pc.omega1 * (1.0f64).min(1.0 / g) + 2.0 * pz_tail + 2.0 * pw_tail))
}

/// JSON record of a perturbation bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub kind: PerturbationKind,
    pub omega1: f64,
    pub omega2: f64,
    pub gamma: f64,
    pub valid: bool,
    /// `None` when the constants are invalid.
    pub bound: Option<f64>,
}

pub fn perturbation_report(
    pc: &PerturbationConstants,
    eps: f64,
    pz_tail: f64,
    pw_tail: f64,
) -> PerturbationReport {
    PerturbationReport {
        kind: pc.kind,
        omega1: pc.omega1,
        omega2: pc.omega2,
        gamma: pc.gamma,
        valid: pc.valid,
        bound: perturbation_bound(pc, eps, pz_tail, pw_tail).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_perturbation_example() {
        let pc = perturbation_constants(&PerturbationParams::O3 {
            m: 10,
            p: 0.05,
            alpha: 1.0,
        })
        .unwrap();
        assert!((pc.gamma - 1.5).abs() < 1e-15);
        assert!((pc.omega2 - 10.0 * 0.0025 / 0.81).abs() < 1e-15);
        assert!(pc.valid);
        let b = perturbation_bound(&pc, 0.01, 0.0, 0.0).unwrap();
        let want = 1.5 / (1.5 - 2.0 * pc.omega2) * 0.01 * 2.0 / 1.5;
        assert!((b - want).abs() < 1e-15);
        assert_eq!(perturbation_bound(&pc, 0.0, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pure_poisson_has_no_perturbation() {
        let pc = perturbation_constants(&PerturbationParams::O1 {
            lambdas: vec![0.7, 0.0],
        })
        .unwrap();
        assert_eq!(pc.omega2, 0.0);
        assert!(pc.valid);
        let b = perturbation_bound(&pc, 0.3, 0.0, 0.0).unwrap();
        assert!((b - 0.3 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn large_p_inflates_and_invalidates() {
        let small = perturbation_constants(&PerturbationParams::O3 {
            m: 10,
            p: 0.4,
            alpha: 0.1,
        })
        .unwrap();
        assert!((small.omega2 - 10.0 * 0.16 / 0.04).abs() < 1e-12);
        assert!(!small.valid);
        assert!(perturbation_bound(&small, 0.1, 0.0, 0.0).is_err());
        assert!(perturbation_constants(&PerturbationParams::O3 {
            m: 1,
            p: 0.5,
            alpha: 1.0
        })
        .is_err());
    }

    #[test]
    fn report_serializes_with_kind() {
        let pc = perturbation_constants(&PerturbationParams::O2 {
            m: 20,
            p: 0.1,
            alpha: 1.0,
        })
        .unwrap();
        assert_eq!(pc.gamma, 30.0);
        let json = serde_json::to_string(&perturbation_report(&pc, 0.1, 0.0, 0.0)).unwrap();
        assert!(json.starts_with(r#"{"kind":"O2","omega1":"#));
    }
}
