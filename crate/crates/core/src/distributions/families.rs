use crate::error::{check_open_unit, check_positive, invalid, Error, Result};

use super::metrics::convolve;
use super::pmf::Pmf;

/// Hard cap on the number of stored masses for infinite-support laws.
const MAX_TERMS: usize = 50_000_000;

/// Builds masses from a log-space ratio chain `ln m_{j+1} = ln m_j + ln r_j`.
///
/// For infinite support, the chain stops once `j` is past the mode and the
/// remaining mass, bounded geometrically by `ratio_sup(j)` (an upper bound on
/// every ratio from `j` onwards), is at most `tol`. That bound becomes the
/// recorded tail mass.
fn log_chain(
    log_m0: f64,
    ratio: impl Fn(usize) -> f64,
    ratio_sup: impl Fn(usize) -> f64,
    tol: f64,
) -> Result<Pmf> {
    let mut masses = Vec::new();
    let mut log_m = log_m0;
    for j in 0..MAX_TERMS {
        let m = log_m.exp();
        masses.push(m);
        let r = ratio(j);
        if r < 1.0 {
            let sup = ratio_sup(j + 1);
            if sup < 1.0 {
                // P(X > j) <= m_{j+1} / (1 - sup)
                let bound = m * r / (1.0 - sup);
                if bound <= tol {
                    return Ok(Pmf::from_parts(masses, bound, tol));
                }
            }
        }
        log_m += r.ln();
    }
    Err(Error::NoConvergence(MAX_TERMS))
}

/// Normalized finite law from unnormalized log masses.
fn from_log_masses(log_masses: &[f64], tol: f64) -> Pmf {
    let peak = log_masses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_masses.iter().map(|l| (l - peak).exp()).collect();
    let total = crate::numeric::sum(raw.iter().copied());
    Pmf::from_parts(raw.into_iter().map(|m| m / total).collect(), 0.0, tol)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(invalid("tol", tol, "must lie in (0, 1)"))
    }
}

/// Poisson(`alpha`), truncated once the remaining mass is at most `tol`.
pub fn pmf_poisson(alpha: f64, tol: f64) -> Result<Pmf> {
    check_positive("alpha", alpha)?;
    check_tol(tol)?;
    log_chain(
        -alpha,
        |j| alpha / (j as f64 + 1.0),
        |j| alpha / (j as f64 + 1.0),
        tol,
    )
}

/// Binomial(`n`, `p`), exact with zero tail.
pub fn pmf_binomial(n: u64, p: f64) -> Result<Pmf> {
    check_open_unit("p", p)?;
    if n as usize >= MAX_TERMS {
        return Err(Error::TooLarge(format!("binomial with n = {n}")));
    }
    let q = 1.0 - p;
    let n_f = n as f64;
    let mut log_m = n_f * q.ln();
    let mut masses = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        masses.push(log_m.exp());
        let jf = j as f64;
        log_m += ((n_f - jf) * p / ((jf + 1.0) * q)).ln();
    }
    Ok(Pmf::from_parts(masses, 0.0, super::pmf::DEFAULT_TOL))
}

/// Pseudo-binomial law with real exponent `m_tilde > 1`: masses proportional
/// to the generalized binomial coefficient times `p^j q^(m_tilde - j)` on
/// `0..=floor(m_tilde)`.
pub fn pmf_pseudo_binomial(m_tilde: f64, p: f64) -> Result<Pmf> {
    check_open_unit("p", p)?;
    if !(m_tilde.is_finite() && m_tilde > 1.0) {
        return Err(invalid("m_tilde", m_tilde, "must exceed 1"));
    }
    let top = m_tilde.floor() as usize;
    if top >= MAX_TERMS {
        return Err(Error::TooLarge(format!(
            "pseudo-binomial with M = {m_tilde}"
        )));
    }
    let q = 1.0 - p;
    let mut logs = Vec::with_capacity(top + 1);
    let mut log_m = 0.0;
    for j in 0..=top {
        logs.push(log_m);
        let jf = j as f64;
        log_m += ((m_tilde - jf) * p / ((jf + 1.0) * q)).ln();
    }
    Ok(from_log_masses(&logs, super::pmf::DEFAULT_TOL))
}

/// Negative binomial with masses `Γ(r+j)/(Γ(r) j!) p̄^r q̄^j`.
pub fn pmf_negative_binomial(r: f64, p_bar: f64, tol: f64) -> Result<Pmf> {
    check_positive("r", r)?;
    check_open_unit("p_bar", p_bar)?;
    check_tol(tol)?;
    let q_bar = 1.0 - p_bar;
    let ratio = move |j: usize| q_bar * (r + j as f64) / (j as f64 + 1.0);
    log_chain(r * p_bar.ln(), ratio, move |j| ratio(j).max(q_bar), tol)
}

/// Convolution of Bi(`m`, `p`) with Poisson(`alpha`). Either part may be
/// degenerate: `alpha = 0` gives the binomial, `m = 0` the Poisson.
pub fn pmf_bcp(m: u64, p: f64, alpha: f64, tol: f64) -> Result<Pmf> {
    check_open_unit("p", p)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid("alpha", alpha, "must be nonnegative"));
    }
    check_tol(tol)?;
    match (m, alpha > 0.0) {
        (0, false) => Ok(Pmf::point(0)),
        (0, true) => pmf_poisson(alpha, tol),
        (_, false) => pmf_binomial(m, p),
        (_, true) => Ok(convolve(&pmf_binomial(m, p)?, &pmf_poisson(alpha, tol)?)),
    }
}

/// Law of a sum of independent Bernoulli(`p_i`) variables, by sequential
/// convolution.
pub fn pmf_poisson_binomial(probs: &[f64]) -> Result<Pmf> {
    if probs.is_empty() {
        return Err(Error::Empty("success probabilities"));
    }
    for &p in probs {
        check_open_unit("p_i", p)?;
    }
    let mut masses = vec![1.0];
    for &p in probs {
        bernoulli_step(&mut masses, p);
    }
    Ok(Pmf::from_parts(masses, 0.0, super::pmf::DEFAULT_TOL))
}

/// In-place update of a law by adding an independent Bernoulli(`p`).
pub(crate) fn bernoulli_step(masses: &mut Vec<f64>, p: f64) {
    let q = 1.0 - p;
    masses.push(0.0);
    for k in (1..masses.len()).rev() {
        masses[k] = masses[k] * q + masses[k - 1] * p;
    }
    masses[0] *= q;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{tv_norm, MomentKind};

    #[test]
    fn poisson_values() {
        let p = pmf_poisson(1.0, 1e-12).unwrap();
        assert!((p.get(0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(p.tail_mass() <= 1e-12);
        let tiny = pmf_poisson(1e-12, 1e-12).unwrap();
        assert!((tiny.get(0) - 1.0).abs() < 1e-11);
        let five = pmf_poisson(5.0, 1e-12).unwrap();
        assert!((five.mean() - 5.0).abs() < 1e-10);
        assert!((five.variance() - 5.0).abs() < 1e-9);
        assert!(pmf_poisson(0.0, 1e-12).is_err());
        assert!(pmf_poisson(-1.0, 1e-12).is_err());
    }

    #[test]
    fn large_poisson_does_not_underflow() {
        let p = pmf_poisson(2000.0, 1e-12).unwrap();
        assert!((p.stored_mass() - 1.0).abs() < 1e-10);
        assert!((p.mean() - 2000.0).abs() < 1e-7);
    }

    #[test]
    fn binomial_values() {
        let close = |d: &Pmf, want: &[f64]| {
            assert_eq!(d.len(), want.len());
            for (got, want) in d.masses().iter().zip(want) {
                assert!((got - want).abs() < 1e-15);
            }
        };
        close(&pmf_binomial(1, 0.3).unwrap(), &[0.7, 0.3]);
        close(&pmf_binomial(2, 0.5).unwrap(), &[0.25, 0.5, 0.25]);
        let b = pmf_binomial(10, 0.15).unwrap();
        assert!((b.variance() - 10.0 * 0.15 * 0.85).abs() < 1e-12);
        assert!(pmf_binomial(3, 1.0).is_err());
    }

    #[test]
    fn pseudo_binomial_reduces_and_ratios() {
        let pb = pmf_pseudo_binomial(3.0, 0.2).unwrap();
        let b = pmf_binomial(3, 0.2).unwrap();
        assert!(tv_norm(&pb, &b) < 1e-15);
        let pb = pmf_pseudo_binomial(2.5, 0.3).unwrap();
        assert_eq!(pb.len(), 3);
        assert!((pb.stored_mass() - 1.0).abs() < 1e-15);
        assert!((pb.get(0) / pb.get(1) - 0.7 / 0.75).abs() < 1e-14);
        assert!(pmf_pseudo_binomial(1.0, 0.3).is_err());
    }

    #[test]
    fn negative_binomial_values() {
        let g = pmf_negative_binomial(1.0, 0.5, 1e-12).unwrap();
        for j in 0..20 {
            assert!((g.get(j) - 0.5f64.powi(j as i32 + 1)).abs() < 1e-15);
        }
        let nb = pmf_negative_binomial(2.0, 0.6, 1e-12).unwrap();
        assert!((nb.mean() - 2.0 * 0.4 / 0.6).abs() < 1e-10);
        let half = pmf_negative_binomial(0.5, 0.9, 1e-12).unwrap();
        assert!((half.get(0) - 0.9f64.sqrt()).abs() < 1e-15);
        assert!(pmf_negative_binomial(0.0, 0.5, 1e-12).is_err());
    }

    #[test]
    fn bcp_values() {
        let d = pmf_bcp(7, 0.3, 0.0, 1e-12).unwrap();
        assert!(tv_norm(&d, &pmf_binomial(7, 0.3).unwrap()) < 1e-15);
        let d = pmf_bcp(1, 0.5, 1.0, 1e-12).unwrap();
        assert!((d.get(0) - 0.5 * (-1.0f64).exp()).abs() < 1e-15);
        let d = pmf_bcp(3, 0.2, 0.7, 1e-12).unwrap();
        assert!((d.mean() - 1.3).abs() < 1e-10);
        // the third moment weights the truncated tail heavily, so cut deeper
        let d = pmf_bcp(3, 0.2, 0.7, 1e-15).unwrap();
        // third cumulant of a binomial is Mpq(q-p), of a Poisson it is alpha
        let third = d.moment(3, MomentKind::Central).unwrap();
        assert!(
            (third - (3.0 * 0.2 * 0.8 * 0.6 + 0.7)).abs() < 1e-10,
            "{third}"
        );
    }

    #[test]
    fn poisson_binomial_small_cases() {
        assert_eq!(pmf_poisson_binomial(&[0.3]).unwrap().masses(), &[0.7, 0.3]);
        assert_eq!(
            pmf_poisson_binomial(&[0.5, 0.5]).unwrap().masses(),
            &[0.25, 0.5, 0.25]
        );
        assert!(pmf_poisson_binomial(&[]).is_err());
        assert!(pmf_poisson_binomial(&[0.2, 0.0]).is_err());
    }
}
