use crate::distributions::{Pmf, SeverityLaw};
use crate::error::{check_open_unit, check_positive, invalid, Error, Result};

use super::operator::{check_interior, AffineOperator, TabulatedTerm};

/// Default relative cut-off for perturbation series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;

const MAX_SERIES_TERMS: usize = 100_000;

/// Geometric envelope `|c_m| <= Σ_i A_i ρ_i^m` of a series coefficient.
struct Envelope(Vec<(f64, f64)>);

impl Envelope {
    /// `Σ_{m' >= m} Σ_i A_i ρ_i^{m'}`.
    fn tail_from(&self, m: usize) -> f64 {
        self.0
            .iter()
            .map(|&(a, rho)| a.abs() * rho.powi(m as i32) / (1.0 - rho))
            .sum()
    }
}

/// Appends `Σ_{m>=2} c_m Σ_{l=1}^{m-1} Δg(j+l)`, cut once the remaining tail
/// falls below `series_tol` times `scale`.
fn add_series(
    op: &mut AffineOperator,
    c: impl Fn(usize) -> f64,
    env: &Envelope,
    scale: f64,
    series_tol: f64,
) -> Result<()> {
    let cut = series_tol * scale.abs().max(f64::MIN_POSITIVE);
    let mut m = 2;
    while env.tail_from(m) > cut {
        if m > MAX_SERIES_TERMS {
            return Err(Error::NoConvergence(MAX_SERIES_TERMS));
        }
        op.add_delta_sum(m, c(m));
        m += 1;
    }
    op.series_tail = env.tail_from(m);
    Ok(())
}

fn check_series_tol(series_tol: f64) -> Result<()> {
    if series_tol.is_finite() && series_tol > 0.0 {
        Ok(())
    } else {
        Err(invalid("series_tol", series_tol, "must be positive"))
    }
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::Empty("compound Poisson rates"));
    }
    if let Some(&l) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(invalid("lambda", l, "must be finite"));
    }
    Ok(())
}

/// `λ_m` with 1-based index, zero outside the list.
fn rate(lambdas: &[f64], m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        lambdas.get(m - 1).copied().unwrap_or(0.0)
    }
}

fn first_moment_of_rates(lambdas: &[f64]) -> f64 {
    lambdas
        .iter()
        .enumerate()
        .map(|(i, l)| (i + 1) as f64 * l)
        .sum()
}

/// `(Ag)(j) = ((j+1) μ_{j+1} / μ_j) g(j+1) - j g(j)` with the ratio tabulated.
pub fn op_generic_ratio(y: &Pmf) -> Result<AffineOperator> {
    let top = check_interior(y)?;
    let coeffs = (0..=top)
        .map(|j| {
            if j == top {
                0.0
            } else {
                (j as f64 + 1.0) * y.get(j + 1) / y.get(j)
            }
        })
        .collect();
    let mut op = AffineOperator::new("generic_ratio");
    op.add(0, 0.0, -1.0);
    op.tabulated = Some(TabulatedTerm { offset: 1, coeffs });
    Ok(op.finish())
}

/// `α g(j+1) - j g(j)`.
pub fn op_poisson(alpha: f64) -> Result<AffineOperator> {
    check_positive("alpha", alpha)?;
    let mut op = AffineOperator::new("poisson");
    op.add(1, alpha, 0.0).add(0, 0.0, -1.0);
    Ok(op.finish())
}

/// `(M̃ - j) p g(j+1) - j q g(j)` on `0..=floor(M̃)`.
pub fn op_pseudo_binomial(m_tilde: f64, p: f64) -> Result<AffineOperator> {
    check_open_unit("p", p)?;
    if !(m_tilde.is_finite() && m_tilde > 1.0) {
        return Err(invalid("m_tilde", m_tilde, "must exceed 1"));
    }
    let mut op = AffineOperator::new("pseudo_binomial");
    op.add(1, m_tilde * p, -p).add(0, 0.0, -(1.0 - p));
    op.support_end = Some(m_tilde.floor() as usize);
    Ok(op.finish())
}

/// `q̄ (r + j) g(j+1) - j g(j)`.
pub fn op_negative_binomial(r: f64, p_bar: f64) -> Result<AffineOperator> {
    check_positive("r", r)?;
    check_open_unit("p_bar", p_bar)?;
    let q_bar = 1.0 - p_bar;
    let mut op = AffineOperator::new("negative_binomial");
    op.add(1, r * q_bar, q_bar).add(0, 0.0, -1.0);
    Ok(op.finish())
}

/// `Σ_l l λ_l g(j+l) - j g(j)` for rates `λ_1..λ_L` (slice index 0 is `λ_1`).
pub fn op_compound_poisson(lambdas: &[f64]) -> Result<AffineOperator> {
    check_lambdas(lambdas)?;
    let mut op = AffineOperator::new("compound_poisson");
    for (i, &l) in lambdas.iter().enumerate() {
        op.add(i + 1, (i + 1) as f64 * l, 0.0);
    }
    op.add(0, 0.0, -1.0);
    Ok(op.finish())
}

/// Operator for Bi(M, p) convolved with a compound Poisson law:
/// `(M + λ/p - j) p g(j+1) - j q g(j) + Σ_{m>=2} (q m λ_m + p (m-1) λ_{m-1}) Σ_{l<m} Δg(j+l)`.
pub fn op_bi_cp(m: u64, p: f64, lambdas: &[f64]) -> Result<AffineOperator> {
    check_open_unit("p", p)?;
    check_lambdas(lambdas)?;
    let q = 1.0 - p;
    let lambda = first_moment_of_rates(lambdas);
    let mut op = AffineOperator::new("bi_cp");
    op.add(1, m as f64 * p + lambda, -p).add(0, 0.0, -q);
    for k in 2..=lambdas.len() + 1 {
        let c = q * k as f64 * rate(lambdas, k) + p * (k - 1) as f64 * rate(lambdas, k - 1);
        op.add_delta_sum(k, c);
    }
    Ok(op.finish())
}

/// Operator for NB(r, p̄) convolved with a compound Poisson law:
/// `(λ p̄/q̄ + r + j) q̄ g(j+1) - j g(j) + Σ_{m>=2} (m λ_m - q̄ (m-1) λ_{m-1}) Σ_{l<m} Δg(j+l)`.
pub fn op_nb_cp(r: f64, p_bar: f64, lambdas: &[f64]) -> Result<AffineOperator> {
    check_positive("r", r)?;
    check_open_unit("p_bar", p_bar)?;
    check_lambdas(lambdas)?;
    let q_bar = 1.0 - p_bar;
    let lambda = first_moment_of_rates(lambdas);
    let mut op = AffineOperator::new("nb_cp");
    op.add(1, lambda * p_bar + r * q_bar, q_bar)
        .add(0, 0.0, -1.0);
    for k in 2..=lambdas.len() + 1 {
        let c = k as f64 * rate(lambdas, k) - q_bar * (k - 1) as f64 * rate(lambdas, k - 1);
        op.add_delta_sum(k, c);
    }
    Ok(op.finish())
}

/// Binomial-perturbation operator for Bi(M, p) convolved with Poisson(α):
/// `(Mp + α - jp) g(j+1) - q j g(j) + p α Δg(j+1)`.
pub fn op_bcp_binomial_perturbation(m: u64, p: f64, alpha: f64) -> Result<AffineOperator> {
    check_open_unit("p", p)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid("alpha", alpha, "must be nonnegative"));
    }
    let q = 1.0 - p;
    let mut op = AffineOperator::new("bcp_binomial_perturbation");
    op.add(1, m as f64 * p + alpha - p * alpha, -p)
        .add(2, p * alpha, 0.0)
        .add(0, 0.0, -q);
    Ok(op.finish())
}

fn check_p_below_q(p: f64) -> Result<()> {
    if p < 0.5 {
        Ok(())
    } else {
        Err(invalid("p", p, "series expansion requires p < q"))
    }
}

/// Poisson-perturbation operator for Bi(M, p) convolved with Poisson(α):
/// `(α + Mp) g(j+1) - j g(j) + M Σ_{l>=2} (-1)^{l+1} (p/q)^l Σ_{k<l} Δg(j+k)`.
pub fn op_bcp_poisson_perturbation(
    m: u64,
    p: f64,
    alpha: f64,
    series_tol: f64,
) -> Result<AffineOperator> {
    check_open_unit("p", p)?;
    check_p_below_q(p)?;
    check_series_tol(series_tol)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid("alpha", alpha, "must be nonnegative"));
    }
    let rho = p / (1.0 - p);
    let mf = m as f64;
    let mut op = AffineOperator::new("bcp_poisson_perturbation");
    op.add(1, alpha + mf * p, 0.0).add(0, 0.0, -1.0);
    let sign = |l: usize| if l % 2 == 0 { -1.0 } else { 1.0 };
    add_series(
        &mut op,
        |l| mf * sign(l) * rho.powi(l as i32),
        &Envelope(vec![(mf, rho)]),
        alpha + mf * p,
        series_tol,
    )?;
    Ok(op.finish())
}

/// Operators for Bi(M, p) convolved with NB(r, p̄).
///
/// Variant 1 is the exact three-term operator
/// `(Mp + r q q̄ - p j + q q̄ j) g(j+1) + (r q̄ p - M p q̄ + p q̄ j) g(j+2) - q j g(j)`.
/// Variants 2 to 4 are series expansions around a pseudo-binomial, a negative
/// binomial and a Poisson leading part respectively; they require `p < q`.
pub fn op_binb(
    variant: u8,
    m: u64,
    p: f64,
    r: f64,
    p_bar: f64,
    series_tol: f64,
) -> Result<AffineOperator> {
    check_open_unit("p", p)?;
    check_positive("r", r)?;
    check_open_unit("p_bar", p_bar)?;
    let q = 1.0 - p;
    let q_bar = 1.0 - p_bar;
    let mf = m as f64;
    let sign = |l: usize| if l % 2 == 0 { -1.0 } else { 1.0 };
    let rho = p / q;
    let mut op = AffineOperator::new(format!("binb_{variant}"));
    match variant {
        1 => {
            op.add(1, mf * p + r * q * q_bar, q * q_bar - p)
                .add(2, r * q_bar * p - mf * p * q_bar, p * q_bar)
                .add(0, 0.0, -q);
        }
        2 => {
            check_p_below_q(p)?;
            check_series_tol(series_tol)?;
            let lead = mf * p + r * q_bar / p_bar;
            op.add(1, lead, -p).add(0, 0.0, -q);
            let a = r * (q * q_bar + p);
            add_series(
                &mut op,
                |k| a * q_bar.powi(k as i32 - 1),
                &Envelope(vec![(a / q_bar, q_bar)]),
                lead,
                series_tol,
            )?;
        }
        3 => {
            check_p_below_q(p)?;
            check_series_tol(series_tol)?;
            let lead = mf * p * p_bar + r * q_bar;
            op.add(1, lead, q_bar).add(0, 0.0, -1.0);
            let a = mf * (rho + q_bar);
            add_series(
                &mut op,
                |k| a * sign(k) * rho.powi(k as i32 - 1),
                &Envelope(vec![(a / rho, rho)]),
                lead,
                series_tol,
            )?;
        }
        4 => {
            check_p_below_q(p)?;
            check_series_tol(series_tol)?;
            let lead = mf * p + r * q_bar / p_bar;
            op.add(1, lead, 0.0).add(0, 0.0, -1.0);
            add_series(
                &mut op,
                |k| mf * sign(k) * rho.powi(k as i32) + r * q_bar.powi(k as i32),
                &Envelope(vec![(mf, rho), (r, q_bar)]),
                lead,
                series_tol,
            )?;
        }
        _ => return Err(invalid("variant", variant as f64, "must be 1, 2, 3 or 4")),
    }
    Ok(op.finish())
}

/// Operator for a compound sum whose counting law satisfies
/// `(k+1) μ_{k+1} = μ_k (a + b k)`:
/// `Σ_{l>=1} (a l + b j) p_l g(j+l) - (1 - b p_0) j g(j)`.
pub fn op_compound_panjer(a: f64, b: f64, severity: &SeverityLaw) -> Result<AffineOperator> {
    if !a.is_finite() || !b.is_finite() {
        return Err(invalid("a", a, "Panjer coefficients must be finite"));
    }
    let mut op = AffineOperator::new("compound_panjer");
    for (l, &pl) in severity.masses().iter().enumerate().skip(1) {
        if pl != 0.0 {
            op.add(l, a * l as f64 * pl, b * pl);
        }
    }
    op.add(0, 0.0, -(1.0 - b * severity.get(0)));
    Ok(op.finish())
}

/// `q Σ_m p_m g(j+m) - g(j)` for a geometric number of summands with
/// continuation probability `q`; the severity must have `p_0 = 0`.
pub fn op_compound_geometric(q: f64, severity: &SeverityLaw) -> Result<AffineOperator> {
    check_open_unit("q", q)?;
    if severity.get(0) != 0.0 {
        return Err(invalid(
            "p_0",
            severity.get(0),
            "compound geometric operator needs p_0 = 0",
        ));
    }
    let mut op = AffineOperator::new("compound_geometric");
    for (m, &pm) in severity.masses().iter().enumerate().skip(1) {
        if pm != 0.0 {
            op.add(m, q * pm, 0.0);
        }
    }
    op.add(0, -1.0, 0.0);
    Ok(op.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{pmf_negative_binomial, pmf_poisson};
    use crate::stein_catalog::operator::{characterization_defect, TestFunction};

    fn same_coefficients(a: &AffineOperator, b: &AffineOperator, scale: f64, upto: usize) {
        for l in 0..=a.max_offset().max(b.max_offset()) {
            for j in 0..upto {
                let (x, y) = (a.coefficient(l, j), scale * b.coefficient(l, j));
                assert!((x - y).abs() < 1e-10, "offset {l}, j {j}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn ratio_operator_recovers_standard_forms() {
        let y = pmf_poisson(2.0, 1e-12).unwrap();
        let op = op_generic_ratio(&y).unwrap();
        same_coefficients(&op, &op_poisson(2.0).unwrap(), 1.0, y.len() - 1);
        let y = pmf_negative_binomial(2.0, 0.6, 1e-12).unwrap();
        let op = op_generic_ratio(&y).unwrap();
        same_coefficients(
            &op,
            &op_negative_binomial(2.0, 0.6).unwrap(),
            1.0,
            y.len() - 1,
        );
        assert!(op_generic_ratio(&Pmf::point(0)).is_err());
    }

    #[test]
    fn single_rate_compound_poisson_is_poisson() {
        let cp = op_compound_poisson(&[1.7]).unwrap();
        assert_eq!(cp.terms, op_poisson(1.7).unwrap().terms);
    }

    #[test]
    fn poisson_identity_with_linear_test_function() {
        let g = TestFunction::from_fn(200, |k| k as f64);
        let op = op_poisson(3.0).unwrap();
        let matched = characterization_defect(&op, &pmf_poisson(3.0, 1e-15).unwrap(), &g);
        assert!(matched.defect < 1e-12, "{matched:?}");
        // E[α(Y+1) - Y²] = α(μ+1) - μ - μ² = (α - μ)(μ + 1) for Y ~ Poisson(μ)
        let off = characterization_defect(&op, &pmf_poisson(2.5, 1e-15).unwrap(), &g);
        assert!((off.defect - 0.5 * 3.5).abs() < 1e-10);
    }

    #[test]
    fn panjer_operator_reduces_to_standard_ones() {
        let point = SeverityLaw::point(1);
        let cp = op_compound_panjer(1.3, 0.0, &point).unwrap();
        assert_eq!(cp.terms, op_poisson(1.3).unwrap().terms);
        let (n, p) = (6u64, 0.3);
        let q = 1.0 - p;
        let bin = op_compound_panjer(n as f64 * p / q, -p / q, &point).unwrap();
        same_coefficients(&bin, &op_pseudo_binomial(n as f64, p).unwrap(), 1.0 / q, 10);
        let nb = op_compound_panjer(2.0 * 0.4, 0.4, &point).unwrap();
        same_coefficients(&nb, &op_negative_binomial(2.0, 0.6).unwrap(), 1.0, 10);
    }

    #[test]
    fn panjer_poisson_matches_compound_poisson() {
        let sev = SeverityLaw::new(vec![0.0, 0.5, 0.3, 0.2]).unwrap();
        let lambda = 2.0;
        let a = op_compound_panjer(lambda, 0.0, &sev).unwrap();
        let rates: Vec<f64> = sev.masses()[1..].iter().map(|p| lambda * p).collect();
        let b = op_compound_poisson(&rates).unwrap();
        same_coefficients(&a, &b, 1.0, 10);
    }

    #[test]
    fn binb_first_variant_literal_coefficient() {
        let op = op_binb(1, 2, 0.2, 1.0, 0.7, DEFAULT_SERIES_TOL).unwrap();
        let t = op.term(0).unwrap();
        assert_eq!((t.constant, t.slope), (0.0, -0.8));
    }

    #[test]
    fn hypothesis_violations() {
        assert!(op_bcp_poisson_perturbation(3, 0.5, 1.0, 1e-14).is_err());
        assert!(op_binb(2, 3, 0.6, 1.0, 0.5, 1e-14).is_err());
        assert!(op_binb(1, 3, 0.6, 1.0, 0.5, 1e-14).is_ok());
        assert!(op_binb(5, 3, 0.2, 1.0, 0.5, 1e-14).is_err());
        let sev = SeverityLaw::new(vec![0.5, 0.5]).unwrap();
        assert!(op_compound_geometric(0.5, &sev).is_err());
    }

    #[test]
    fn series_cut_records_tail() {
        let op = op_bcp_poisson_perturbation(10, 0.2, 1.0, 1e-14).unwrap();
        assert!(op.series_tail > 0.0);
        assert!(op.series_tail <= 1e-14 * 3.0);
    }
}
