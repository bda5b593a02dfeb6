use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, check_positive, invalid, Error, Result};
use crate::numeric::{self, CompensatedSum};

use super::families::{pmf_binomial, pmf_negative_binomial, pmf_poisson};
use super::metrics::convolve_slices;
use super::pmf::Pmf;

const MAX_TERMS: usize = 10_000_000;

/// Severity law of the summands `X_j` of a compound sum; `p_0 > 0` allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityLaw {
    masses: Vec<f64>,
}

impl SeverityLaw {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Empty("severity masses"));
        }
        for (index, &value) in masses.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let total = numeric::sum(masses.iter().copied());
        if (total - 1.0).abs() > 1e-12 + 4.0 * f64::EPSILON * masses.len() as f64 {
            return Err(Error::NotNormalized(format!(
                "severity masses sum to {total}"
            )));
        }
        Ok(Self { masses })
    }

    /// Normalizes nonnegative weights into a severity law.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total = numeric::sum(weights.iter().copied());
        if !(total.is_finite() && total > 0.0) {
            return Err(invalid("weights", total, "must have positive finite sum"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn point(k: usize) -> Self {
        let mut masses = vec![0.0; k + 1];
        masses[k] = 1.0;
        Self { masses }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `p_k`, zero beyond the stored support.
    pub fn get(&self, k: usize) -> f64 {
        self.masses.get(k).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        numeric::sum(self.masses.iter().enumerate().map(|(k, &m)| k as f64 * m))
    }

    /// Largest index with positive mass.
    pub fn max_support(&self) -> usize {
        self.masses.iter().rposition(|&m| m > 0.0).unwrap_or(0)
    }
}

/// Counting family `N` satisfying `(k+1) μ_{k+1} = μ_k (a + b k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanjerCounting {
    pub a: f64,
    pub b: f64,
    /// Last support point for finite laws (binomial), `None` otherwise.
    pub k: Option<u64>,
    /// `P(N = 0)`.
    pub mu0: f64,
    family: PanjerFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum PanjerFamily {
    Poisson { lambda: f64 },
    Binomial { n: u64, p: f64 },
    NegativeBinomial { r: f64, p_bar: f64 },
}

impl PanjerCounting {
    pub fn poisson(lambda: f64) -> Result<Self> {
        check_positive("lambda", lambda)?;
        Ok(Self {
            a: lambda,
            b: 0.0,
            k: None,
            mu0: (-lambda).exp(),
            family: PanjerFamily::Poisson { lambda },
        })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        check_open_unit("p", p)?;
        if n == 0 {
            return Err(invalid("n", 0.0, "must be positive"));
        }
        let q = 1.0 - p;
        Ok(Self {
            a: n as f64 * p / q,
            b: -p / q,
            k: Some(n),
            mu0: q.powf(n as f64),
            family: PanjerFamily::Binomial { n, p },
        })
    }

    pub fn negative_binomial(r: f64, p_bar: f64) -> Result<Self> {
        check_positive("r", r)?;
        check_open_unit("p_bar", p_bar)?;
        let q_bar = 1.0 - p_bar;
        Ok(Self {
            a: r * q_bar,
            b: q_bar,
            k: None,
            mu0: p_bar.powf(r),
            family: PanjerFamily::NegativeBinomial { r, p_bar },
        })
    }

    pub fn geometric(p_bar: f64) -> Result<Self> {
        Self::negative_binomial(1.0, p_bar)
    }

    /// Recovers the family from the recursion coefficients: `b = 0` is
    /// Poisson, `b < 0` binomial (requires `-a/b` integral), `0 < b < 1`
    /// negative binomial.
    pub fn from_ab(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid("a", a, "must be positive"));
        }
        if !b.is_finite() || b >= 1.0 {
            return Err(invalid("b", b, "must be finite and below 1"));
        }
        if b == 0.0 {
            Self::poisson(a)
        } else if b < 0.0 {
            let n = -a / b;
            let rounded = n.round();
            if (n - rounded).abs() > 1e-9 * n.max(1.0) || rounded < 1.0 {
                return Err(invalid("a", a, "-a/b must be a positive integer"));
            }
            Self::binomial(rounded as u64, -b / (1.0 - b))
        } else {
            Self::negative_binomial(a / b, 1.0 - b)
        }
    }

    /// `G_N(s) = E s^N` in closed form.
    pub fn pgf(&self, s: f64) -> f64 {
        match self.family {
            PanjerFamily::Poisson { lambda } => (lambda * (s - 1.0)).exp(),
            PanjerFamily::Binomial { n, p } => (1.0 - p + p * s).powf(n as f64),
            PanjerFamily::NegativeBinomial { r, p_bar } => {
                (p_bar / (1.0 - (1.0 - p_bar) * s)).powf(r)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            PanjerFamily::Poisson { lambda } => lambda,
            PanjerFamily::Binomial { n, p } => n as f64 * p,
            PanjerFamily::NegativeBinomial { r, p_bar } => r * (1.0 - p_bar) / p_bar,
        }
    }

    /// Law of `N` itself.
    pub fn pmf(&self, tol: f64) -> Result<Pmf> {
        match self.family {
            PanjerFamily::Poisson { lambda } => pmf_poisson(lambda, tol),
            PanjerFamily::Binomial { n, p } => pmf_binomial(n, p),
            PanjerFamily::NegativeBinomial { r, p_bar } => pmf_negative_binomial(r, p_bar, tol),
        }
    }
}

/// Law of the compound sum `S_N` by the Panjer-type recursion
/// `π_j = (1 - b p_0)^{-1} Σ_{i=1}^{j} (b + (a - b) i / j) p_i π_{j-i}`,
/// seeded with `π_0 = G_N(p_0)`.
pub fn pmf_compound_panjer(
    counting: &PanjerCounting,
    severity: &SeverityLaw,
    tol: f64,
) -> Result<Pmf> {
    let (a, b) = (counting.a, counting.b);
    let p = severity.masses();
    let p0 = p[0];
    let s = severity.max_support();
    let pi0 = counting.pgf(p0);
    if s == 0 {
        return Ok(Pmf::point(0));
    }
    let finite_end = counting.k.map(|k| k as usize * s);
    let norm = 1.0 - b * p0;
    let mean = counting.mean() * severity.mean();
    let mut masses = vec![pi0];
    let mut total = CompensatedSum::new();
    total.add(pi0);
    for j in 1..MAX_TERMS {
        if let Some(end) = finite_end {
            if j > end {
                break;
            }
        } else if j as f64 > mean && 1.0 - total.value() <= tol {
            break;
        }
        let jf = j as f64;
        let mut acc = CompensatedSum::new();
        for i in 1..=j.min(s) {
            acc.add((b + (a - b) * i as f64 / jf) * p[i] * masses[j - i]);
        }
        let mut v = acc.value() / norm;
        if v < 0.0 {
            if v < -1e-9 {
                return Err(Error::NegativeMass { index: j, value: v });
            }
            v = 0.0;
        }
        total.add(v);
        masses.push(v);
        if j + 1 == MAX_TERMS {
            return Err(Error::NoConvergence(MAX_TERMS));
        }
    }
    let tail = if finite_end.is_some() {
        0.0
    } else {
        (1.0 - total.value()).max(0.0)
    };
    Ok(Pmf::from_parts(masses, tail, tol))
}

/// Law of the compound sum by the defining mixture
/// `π_j = Σ_k μ_k P(X_1 + ... + X_k = j)`, with `S_0 ≡ 0`.
pub fn pmf_compound_explicit(counting: &Pmf, severity: &SeverityLaw, tol: f64) -> Result<Pmf> {
    let deficit = 1.0 - counting.stored_mass() - counting.tail_mass();
    if deficit.abs() > tol.max(counting.tol()) {
        return Err(Error::NotNormalized(format!(
            "counting masses miss unit mass by {deficit:e}"
        )));
    }
    let sev = &severity.masses()[..=severity.max_support()];
    let kmax = counting.max_support();
    let mut out = vec![0.0; kmax * (sev.len() - 1) + 1];
    let mut power = vec![1.0];
    for k in 0..=kmax {
        let mu = counting.get(k);
        if mu > 0.0 {
            for (j, &v) in power.iter().enumerate() {
                out[j] += mu * v;
            }
        }
        if k < kmax {
            power = convolve_slices(&power, sev);
        }
    }
    Ok(Pmf::from_parts(out, counting.tail_mass(), tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::l1_distance;

    #[test]
    fn degenerate_severity_recovers_counting_law() {
        let c = PanjerCounting::poisson(2.5).unwrap();
        let s = pmf_compound_panjer(&c, &SeverityLaw::point(1), 1e-13).unwrap();
        assert!(l1_distance(&s, &pmf_poisson(2.5, 1e-13).unwrap()) < 1e-12);
        let z = pmf_compound_panjer(&c, &SeverityLaw::point(0), 1e-13).unwrap();
        assert_eq!(z.masses(), &[1.0]);
    }

    #[test]
    fn negative_binomial_matches_explicit_sum() {
        let c = PanjerCounting::negative_binomial(2.0, 0.6).unwrap();
        let sev = SeverityLaw::new(vec![0.0, 0.5, 0.5]).unwrap();
        let rec = pmf_compound_panjer(&c, &sev, 1e-14).unwrap();
        let exp = pmf_compound_explicit(&c.pmf(1e-14).unwrap(), &sev, 1e-14).unwrap();
        assert!(l1_distance(&rec, &exp) < 1e-10);
    }

    #[test]
    fn binomial_counting_with_zero_severity_mass() {
        let c = PanjerCounting::from_ab(3.0 * 0.4 / 0.6, -0.4 / 0.6).unwrap();
        assert_eq!(c.k, Some(3));
        let sev = SeverityLaw::new(vec![0.2, 0.5, 0.3]).unwrap();
        let rec = pmf_compound_panjer(&c, &sev, 1e-14).unwrap();
        let exp = pmf_compound_explicit(&pmf_binomial(3, 0.4).unwrap(), &sev, 1e-14).unwrap();
        assert!(l1_distance(&rec, &exp) < 1e-10);
        assert_eq!(rec.tail_mass(), 0.0);
    }

    #[test]
    fn explicit_degenerate_counts() {
        let sev = SeverityLaw::new(vec![0.1, 0.6, 0.3]).unwrap();
        let one = pmf_compound_explicit(&Pmf::point(1), &sev, 1e-12).unwrap();
        assert_eq!(one.masses(), sev.masses());
        let zero = pmf_compound_explicit(&Pmf::point(0), &sev, 1e-12).unwrap();
        assert_eq!(zero.masses(), &[1.0]);
    }

    #[test]
    fn family_inference() {
        assert!(PanjerCounting::from_ab(1.0, 0.0).unwrap().k.is_none());
        let nb = PanjerCounting::from_ab(0.8, 0.4).unwrap();
        assert!((nb.mu0 - 0.6f64.powi(2)).abs() < 1e-15);
        assert!(PanjerCounting::from_ab(1.0, -0.3).is_err());
        assert!(PanjerCounting::from_ab(1.0, 1.0).is_err());
    }
}
