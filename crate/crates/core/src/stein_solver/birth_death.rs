use serde::{Deserialize, Serialize};

use crate::distributions::Pmf;
use crate::error::{check_open_unit, check_positive, invalid, Error, Result};
use crate::numeric::CompensatedSum;
use crate::stein_catalog::{AffineOperator, TestFunction};

const MAX_TERMS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Rates {
    Poisson { lambda: f64 },
    NegativeBinomial { r: f64, p_bar: f64 },
    PseudoBinomial { m_tilde: f64, p: f64 },
    Tabulated { alpha: Vec<f64>, beta: Vec<f64> },
}

/// Operator `(Ag)(j) = α_j g(j+1) - β_j g(j)` with `β_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathOperator {
    rates: Rates,
    /// Last support point, `None` for infinite support.
    pub support_end: Option<usize>,
}

impl BirthDeathOperator {
    /// `α_j = λ`, `β_j = j`.
    pub fn poisson(lambda: f64) -> Result<Self> {
        check_positive("lambda", lambda)?;
        Ok(Self {
            rates: Rates::Poisson { lambda },
            support_end: None,
        })
    }

    /// `α_j = q̄ (r + j)`, `β_j = j`.
    pub fn negative_binomial(r: f64, p_bar: f64) -> Result<Self> {
        check_positive("r", r)?;
        check_open_unit("p_bar", p_bar)?;
        Ok(Self {
            rates: Rates::NegativeBinomial { r, p_bar },
            support_end: None,
        })
    }

    /// `α_j = (M̃ - j) p`, `β_j = j q` on `0..=floor(M̃)`.
    pub fn pseudo_binomial(m_tilde: f64, p: f64) -> Result<Self> {
        check_open_unit("p", p)?;
        if !(m_tilde.is_finite() && m_tilde > 1.0) {
            return Err(invalid("m_tilde", m_tilde, "must exceed 1"));
        }
        Ok(Self {
            rates: Rates::PseudoBinomial { m_tilde, p },
            support_end: Some(m_tilde.floor() as usize),
        })
    }

    /// Finite chain on `0..alpha.len()`; `beta[0]` must be 0.
    pub fn from_tables(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::Empty("birth and death rate tables of equal length"));
        }
        if beta[0] != 0.0 {
            return Err(invalid("beta_0", beta[0], "must be zero"));
        }
        let end = alpha.len() - 1;
        Ok(Self {
            rates: Rates::Tabulated { alpha, beta },
            support_end: Some(end),
        })
    }

    /// Reads `α_j` and `-β_j` off an operator with terms at offsets 0 and 1
    /// only (affine or tabulated).
    pub fn from_affine(op: &AffineOperator, window: usize) -> Result<Self> {
        if op.max_offset() > 1 || op.terms.iter().any(|t| t.offset > 1) {
            return Err(invalid(
                "max_offset",
                op.max_offset() as f64,
                "not of birth-death form",
            ));
        }
        let end = op.support_end.unwrap_or(window).min(window);
        let alpha: Vec<f64> = (0..=end).map(|j| op.coefficient(1, j)).collect();
        let beta: Vec<f64> = (0..=end).map(|j| -op.coefficient(0, j)).collect();
        Self::from_tables(alpha, beta)
    }

    pub fn alpha(&self, j: usize) -> f64 {
        let jf = j as f64;
        match &self.rates {
            Rates::Poisson { lambda } => *lambda,
            Rates::NegativeBinomial { r, p_bar } => (1.0 - p_bar) * (r + jf),
            Rates::PseudoBinomial { m_tilde, p } => {
                if jf > *m_tilde {
                    0.0
                } else {
                    (m_tilde - jf) * p
                }
            }
            Rates::Tabulated { alpha, .. } => alpha.get(j).copied().unwrap_or(0.0),
        }
    }

    pub fn beta(&self, j: usize) -> f64 {
        let jf = j as f64;
        match &self.rates {
            Rates::Poisson { .. } | Rates::NegativeBinomial { .. } => jf,
            Rates::PseudoBinomial { p, .. } => jf * (1.0 - p),
            Rates::Tabulated { beta, .. } => beta.get(j).copied().unwrap_or(0.0),
        }
    }

    /// Upper bound on `α_k / β_{k+1}` for every `k >= j`, when one is known.
    fn ratio_sup(&self, j: usize) -> Option<f64> {
        let ratio = self.alpha(j) / self.beta(j + 1);
        match &self.rates {
            Rates::Poisson { .. } => Some(ratio),
            Rates::NegativeBinomial { p_bar, .. } => Some(ratio.max(1.0 - p_bar)),
            _ => None,
        }
    }

    /// Whether `α_k - α_{k-1} <= β_k - β_{k-1}` for `k = 1..=upto` (and up to
    /// the end of a finite support).
    pub fn is_monotone(&self, upto: usize) -> bool {
        let last = self.support_end.map_or(upto, |e| e.min(upto));
        (1..=last)
            .all(|k| self.alpha(k) - self.alpha(k - 1) <= self.beta(k) - self.beta(k - 1) + 1e-15)
    }

    /// Whether the chain stops exactly at the end of a finite support
    /// (`α` vanishes there); an operator with a positive birth rate at its
    /// last point is only a truncation of a longer chain.
    pub fn closes_at_end(&self) -> bool {
        self.support_end.is_none_or(|e| self.alpha(e) == 0.0)
    }
}

/// The law whose ratio operator is `bd`: `μ_{j+1} = μ_j α_j / β_{j+1}`.
pub fn stationary_pmf(bd: &BirthDeathOperator, tol: f64) -> Result<Pmf> {
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", tol, "must lie in (0, 1)"));
    }
    let mut logs = vec![0.0f64];
    let mut tail_rel = 0.0;
    let mut total = 1.0f64; // unnormalized sum, rescaled as the peak moves
    let mut peak = 0.0f64;
    let mut j = 0usize;
    loop {
        if bd.support_end == Some(j) {
            break;
        }
        if j >= MAX_TERMS {
            return Err(Error::NoConvergence(MAX_TERMS));
        }
        let (a, b) = (bd.alpha(j), bd.beta(j + 1));
        if a == 0.0 && bd.support_end.is_some() {
            break;
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::ZeroInteriorMass(j + 1));
        }
        let ratio = a / b;
        if bd.support_end.is_none() && ratio < 1.0 {
            if let Some(sup) = bd.ratio_sup(j + 1).filter(|&s| s < 1.0) {
                let m = (logs[j] - peak).exp();
                let bound = m * ratio / (1.0 - sup);
                if bound <= tol * total {
                    tail_rel = bound / total;
                    break;
                }
            }
        }
        let next = logs[j] + ratio.ln();
        if next > peak {
            total *= (peak - next).exp();
            peak = next;
        }
        total += (next - peak).exp();
        logs.push(next);
        j += 1;
    }
    let raw: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
    let sum = crate::numeric::sum(raw.iter().copied());
    let masses = raw.into_iter().map(|m| m / sum).collect();
    Pmf::new(masses, tail_rel, tol.max(tail_rel))
}

/// Solution of `α_j g(j+1) - β_j g(j) = f(j) - E f(Y)` with `g(0) = 0`.
#[derive(Debug, Clone)]
pub struct SteinSolution {
    pub g: TestFunction,
    /// The (renormalized, finite) law the equation was solved against.
    pub law: Pmf,
    pub mean_f: f64,
    /// `sup_j |f(j)|` over the support window.
    pub f_norm: f64,
    /// Whether `f` maps the window into `[0, 1]`.
    pub unit_valued: bool,
}

impl SteinSolution {
    /// Largest `|α_j g(j+1) - β_j g(j) - (f(j) - Ef)|` over the window.
    pub fn max_residual(&self, bd: &BirthDeathOperator, f: impl Fn(usize) -> f64) -> f64 {
        (0..self.law.len())
            .map(|j| {
                let lhs = bd.alpha(j) * self.g.get(j + 1) - bd.beta(j) * self.g.get(j);
                (lhs - (f(j) - self.mean_f)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves the Stein equation via partial sums,
/// `g(j+1) = Σ_{k<=j} μ_k (f(k) - Ef) / (α_j μ_j)`, switching to the
/// complementary tail sum past the median so both ends stay accurate.
pub fn solve_stein(
    bd: &BirthDeathOperator,
    f: impl Fn(usize) -> f64,
    tol: f64,
) -> Result<SteinSolution> {
    let law = stationary_pmf(bd, tol)?.renormalized();
    let mu = law.masses();
    let n = mu.len();
    let fv: Vec<f64> = (0..n).map(&f).collect();
    if let Some(v) = fv.iter().find(|v| !v.is_finite()) {
        return Err(invalid("f", *v, "must be bounded"));
    }
    let mean_f = crate::numeric::sum(mu.iter().zip(&fv).map(|(m, v)| m * v));
    let centered: Vec<f64> = mu.iter().zip(&fv).map(|(m, v)| m * (v - mean_f)).collect();

    // prefix[j] = Σ_{k<=j} centered[k], suffix[j] = Σ_{k>j} centered[k]
    let mut prefix = vec![0.0; n];
    let mut acc = CompensatedSum::new();
    for j in 0..n {
        acc.add(centered[j]);
        prefix[j] = acc.value();
    }
    let mut suffix = vec![0.0; n];
    let mut acc = CompensatedSum::new();
    for j in (0..n).rev() {
        suffix[j] = acc.value();
        acc.add(centered[j]);
    }
    let cdf = law.cdf();

    let mut values = vec![0.0; n + 1];
    for j in 0..n {
        let partial = if cdf[j] <= 0.5 { prefix[j] } else { -suffix[j] };
        let a = bd.alpha(j);
        values[j + 1] = if j + 1 == n && bd.support_end.is_some() {
            0.0 // g vanishes past a finite support
        } else if a > 0.0 && mu[j] > 0.0 {
            partial / (a * mu[j])
        } else if partial == 0.0 {
            0.0
        } else {
            return Err(Error::ZeroInteriorMass(j));
        };
    }
    let f_norm = fv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let unit_valued = fv.iter().all(|&v| (0.0..=1.0).contains(&v));
    Ok(SteinSolution {
        g: TestFunction::new(values)?,
        law,
        mean_f,
        f_norm,
        unit_valued,
    })
}
