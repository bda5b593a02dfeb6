//! Operator/law pairs over a parameter grid, for checking that every operator
//! annihilates its own law.

use serde::{Deserialize, Serialize};

use crate::distributions::{
    convolve, pmf_bcp, pmf_binomial, pmf_compound_panjer, pmf_negative_binomial, pmf_poisson,
    pmf_pseudo_binomial, PanjerCounting, Pmf, SeverityLaw,
};
use crate::error::{Error, Result};

use super::catalog::*;
use super::operator::{max_indicator_defect, AffineOperator};

/// Parameter grid for the catalog check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CatalogGrid {
    pub lambdas: Vec<f64>,
    /// `(M, p)` pairs.
    pub binomial: Vec<(u64, f64)>,
    /// `(r, p̄)` pairs.
    pub negative_binomial: Vec<(f64, f64)>,
    /// Severity laws as mass vectors indexed from 0.
    pub severities: Vec<Vec<f64>>,
    /// Fractional parts added to `M` for pseudo-binomial laws.
    pub pseudo_offsets: Vec<f64>,
    pub tol: f64,
    pub series_tol: f64,
}

impl Default for CatalogGrid {
    fn default() -> Self {
        Self {
            lambdas: vec![0.5, 1.0, 5.0],
            binomial: vec![(5, 0.1), (10, 0.2)],
            negative_binomial: vec![(1.0, 0.5), (2.0, 0.6)],
            severities: vec![
                vec![0.0, 0.5, 0.3, 0.2],
                vec![0.0, 0.1, 0.2, 0.3, 0.4],
                vec![0.2, 0.3, 0.0, 0.1, 0.4],
            ],
            pseudo_offsets: vec![0.0, 0.5],
            tol: 1e-14,
            series_tol: DEFAULT_SERIES_TOL,
        }
    }
}

impl CatalogGrid {
    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
            && self.binomial.is_empty()
            && self.negative_binomial.is_empty()
            && self.severities.is_empty()
    }
}

/// An operator together with the law it should characterize.
#[derive(Debug, Clone)]
pub struct CatalogCase {
    pub label: String,
    pub operator: AffineOperator,
    pub law: Pmf,
}

impl CatalogCase {
    /// Largest indicator-basis defect over the stored window of the law.
    pub fn max_defect(&self) -> f64 {
        max_indicator_defect(
            &self.operator,
            &self.law,
            self.law.len().saturating_sub(1).max(1),
        )
    }
}

/// Compound Poisson law with rates `λ_l` (slice index 0 is `λ_1`).
fn compound_poisson_law(rates: &[f64], tol: f64) -> Result<Pmf> {
    let total: f64 = rates.iter().sum();
    let mut weights = vec![0.0];
    weights.extend_from_slice(rates);
    let sev = SeverityLaw::from_weights(&weights)?;
    pmf_compound_panjer(&PanjerCounting::poisson(total)?, &sev, tol)
}

fn push(cases: &mut Vec<CatalogCase>, label: String, operator: AffineOperator, law: Pmf) {
    cases.push(CatalogCase {
        label,
        operator,
        law,
    });
}

/// Builds every operator/law pair on the grid.
pub fn catalog_cases(grid: &CatalogGrid) -> Result<Vec<CatalogCase>> {
    if grid.is_empty() {
        return Err(Error::Empty("catalog grid"));
    }
    let tol = grid.tol;
    let sev_tol = grid.series_tol;
    let severities = grid
        .severities
        .iter()
        .map(|m| SeverityLaw::new(m.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut cases = Vec::new();

    for &lambda in &grid.lambdas {
        let law = pmf_poisson(lambda, tol)?;
        push(
            &mut cases,
            format!("poisson(alpha={lambda})"),
            op_poisson(lambda)?,
            law.clone(),
        );
        push(
            &mut cases,
            format!("generic_ratio(poisson {lambda})"),
            op_generic_ratio(&law)?,
            law,
        );
    }
    for &(m, p) in &grid.binomial {
        let law = pmf_binomial(m, p)?;
        push(
            &mut cases,
            format!("generic_ratio(binomial {m},{p})"),
            op_generic_ratio(&law)?,
            law,
        );
        for &frac in &grid.pseudo_offsets {
            let mt = m as f64 + frac;
            push(
                &mut cases,
                format!("pseudo_binomial(M={mt},p={p})"),
                op_pseudo_binomial(mt, p)?,
                pmf_pseudo_binomial(mt, p)?,
            );
        }
    }
    for &(r, pb) in &grid.negative_binomial {
        let law = pmf_negative_binomial(r, pb, tol)?;
        push(
            &mut cases,
            format!("negative_binomial(r={r},p_bar={pb})"),
            op_negative_binomial(r, pb)?,
            law.clone(),
        );
        push(
            &mut cases,
            format!("generic_ratio(nb {r},{pb})"),
            op_generic_ratio(&law)?,
            law,
        );
    }

    // compound Poisson rates from each severity, scaled by each λ
    for (si, sev) in severities.iter().enumerate() {
        let tail = &sev.masses()[1..];
        if tail.iter().all(|&x| x == 0.0) {
            continue;
        }
        for &lambda in &grid.lambdas {
            let rates: Vec<f64> = tail.iter().map(|x| lambda * x).collect();
            let cp = compound_poisson_law(&rates, tol)?;
            push(
                &mut cases,
                format!("compound_poisson(sev{si},lambda={lambda})"),
                op_compound_poisson(&rates)?,
                cp.clone(),
            );
            for &(m, p) in &grid.binomial {
                let law = convolve(&pmf_binomial(m, p)?, &cp);
                push(
                    &mut cases,
                    format!("bi_cp(M={m},p={p},sev{si},lambda={lambda})"),
                    op_bi_cp(m, p, &rates)?,
                    law,
                );
            }
            for &(r, pb) in &grid.negative_binomial {
                let law = convolve(&pmf_negative_binomial(r, pb, tol)?, &cp);
                push(
                    &mut cases,
                    format!("nb_cp(r={r},p_bar={pb},sev{si},lambda={lambda})"),
                    op_nb_cp(r, pb, &rates)?,
                    law,
                );
            }
        }
    }

    for &(m, p) in &grid.binomial {
        for &alpha in &grid.lambdas {
            let law = pmf_bcp(m, p, alpha, tol)?;
            push(
                &mut cases,
                format!("bcp_binomial_perturbation(M={m},p={p},alpha={alpha})"),
                op_bcp_binomial_perturbation(m, p, alpha)?,
                law.clone(),
            );
            push(
                &mut cases,
                format!("bcp_poisson_perturbation(M={m},p={p},alpha={alpha})"),
                op_bcp_poisson_perturbation(m, p, alpha, sev_tol)?,
                law,
            );
        }
        for &(r, pb) in &grid.negative_binomial {
            let law = convolve(&pmf_binomial(m, p)?, &pmf_negative_binomial(r, pb, tol)?);
            for variant in 1..=4 {
                push(
                    &mut cases,
                    format!("binb_{variant}(M={m},p={p},r={r},p_bar={pb})"),
                    op_binb(variant, m, p, r, pb, sev_tol)?,
                    law.clone(),
                );
            }
        }
    }

    // Panjer-class compound laws, one per family and severity
    let mut counts = Vec::new();
    for &lambda in &grid.lambdas {
        counts.push(PanjerCounting::poisson(lambda)?);
    }
    for &(m, p) in &grid.binomial {
        counts.push(PanjerCounting::binomial(m, p)?);
    }
    for &(r, pb) in &grid.negative_binomial {
        counts.push(PanjerCounting::negative_binomial(r, pb)?);
    }
    for (si, sev) in severities.iter().enumerate() {
        for c in &counts {
            let law = pmf_compound_panjer(c, sev, tol)?;
            push(
                &mut cases,
                format!("compound_panjer(a={},b={},sev{si})", c.a, c.b),
                op_compound_panjer(c.a, c.b, sev)?,
                law,
            );
        }
        if sev.get(0) == 0.0 {
            for &(_, pb) in &grid.negative_binomial {
                let law = pmf_compound_panjer(&PanjerCounting::geometric(pb)?, sev, tol)?;
                push(
                    &mut cases,
                    format!("compound_geometric(q={},sev{si})", 1.0 - pb),
                    op_compound_geometric(1.0 - pb, sev)?,
                    law,
                );
            }
        }
    }
    Ok(cases)
}
