use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::{tv_interval, Pmf, TvInterval};

use super::fit::BcpParams;

/// Which bound a report evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// General indicators, Poisson perturbation, exact smoothness terms.
    Thm41,
    /// Independent indicators with closed-form smoothness terms.
    Cor42,
    /// General indicators, binomial perturbation.
    Thm44,
    /// Independent indicators, binomial perturbation.
    Cor45,
    /// Runs statistic.
    Cor48,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::Thm41,
        Theorem::Cor42,
        Theorem::Thm44,
        Theorem::Cor45,
        Theorem::Cor48,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Thm41 => "thm41",
            Theorem::Cor42 => "cor42",
            Theorem::Thm44 => "thm44",
            Theorem::Cor45 => "cor45",
            Theorem::Cor48 => "cor48",
        }
    }

    /// Names of the side conditions, in report order.
    pub fn hypothesis_names(self) -> &'static [&'static str] {
        match self {
            Theorem::Thm41 => &["p", "theta1"],
            Theorem::Cor42 => &["p", "theta1", "sigma2 - 3 tau"],
            Theorem::Thm44 => &["T_hat", "theta2"],
            Theorem::Cor45 => &["T_hat", "theta2", "sigma2 - 3 tau"],
            Theorem::Cor48 => &["p", "theta1", "(n-2)a"],
        }
    }

    /// Names of the bound's terms, in report order.
    pub fn item_names(self) -> &'static [&'static str] {
        match self {
            Theorem::Thm41 => &["d1_sum_p4", "d_binomial", "fractional", "eta1"],
            Theorem::Cor42 => &["d1_sum_p4", "d_binomial", "fractional"],
            Theorem::Thm44 => &[
                "d2_spread",
                "fractional",
                "coupling",
                "covariance",
                "pair_coupling",
                "tail_bcp",
                "tail_w",
            ],
            Theorem::Cor45 => &["spread", "fractional", "tail_w", "tail_bcp"],
            Theorem::Cor48 => &["smoothness", "fractional", "coupling"],
        }
    }

    /// Column names of [`BoundReport::csv_fields`] for this theorem.
    pub fn csv_columns(self) -> Vec<String> {
        let mut cols: Vec<String> = ["theorem", "n", "M", "delta", "p", "alpha"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        cols.extend(self.hypothesis_names().iter().map(|h| format!("hyp:{h}")));
        cols.extend(self.item_names().iter().map(|i| format!("term:{i}")));
        cols.extend(
            ["total", "tv", "tv_lower", "tv_upper", "dominant"]
                .iter()
                .map(|s| s.to_string()),
        );
        cols
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| format!("unknown theorem `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    AtLeast,
}

/// A side condition `value <relation> threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub holds: bool,
}

impl Hypothesis {
    fn new(name: &str, value: f64, relation: Relation, threshold: f64) -> Self {
        let holds = match relation {
            Relation::Less => value < threshold,
            Relation::AtMost => value <= threshold,
            Relation::Greater => value > threshold,
            Relation::AtLeast => value >= threshold,
        };
        Self {
            name: name.to_string(),
            value,
            relation,
            threshold,
            holds,
        }
    }

    pub fn less_than(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::Less, threshold)
    }

    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::AtMost, threshold)
    }

    pub fn greater_than(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::Greater, threshold)
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::AtLeast, threshold)
    }
}

/// A named intermediate value carried for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
}

impl Quantity {
    pub fn new(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
        }
    }
}

/// One additive term of a bound: `contribution = raw * multiplier`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundItem {
    pub name: String,
    pub raw: f64,
    pub multiplier: f64,
    pub contribution: f64,
}

impl BoundItem {
    pub fn new(name: &str, raw: f64, multiplier: f64) -> Self {
        Self {
            name: name.to_string(),
            raw,
            multiplier,
            contribution: raw * multiplier,
        }
    }
}

/// Exact TV interval with an allowance for rounding in the computed masses.
pub(crate) fn exact_tv(law: &Pmf, approx: &Pmf) -> (TvInterval, f64) {
    let rounding = 4.0 * f64::EPSILON * (law.len() + approx.len()) as f64;
    (tv_interval(law, approx), rounding)
}

pub(crate) fn fit_summary(params: &BcpParams) -> Vec<Quantity> {
    vec![
        Quantity::new("M", params.m as f64),
        Quantity::new("delta", params.delta),
        Quantity::new("p", params.p),
        Quantity::new("alpha", params.alpha),
    ]
}

/// Itemized evaluation of a bound on the total variation norm between the
/// law of `W` and the fitted approximant, next to the exact value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub n: usize,
    pub params: BcpParams,
    pub hypotheses: Vec<Hypothesis>,
    pub hypotheses_hold: bool,
    pub quantities: Vec<Quantity>,
    pub items: Vec<BoundItem>,
    pub total: f64,
    pub exact_tv: TvInterval,
    /// Floating-point error allowed in the computed exact value.
    pub rounding: f64,
    /// `Some(total >= exact_tv.upper - rounding)` when every hypothesis holds.
    pub dominant: Option<bool>,
}

impl BoundReport {
    pub(crate) fn assemble(
        theorem: Theorem,
        n: usize,
        params: BcpParams,
        hypotheses: Vec<Hypothesis>,
        quantities: Vec<Quantity>,
        items: Vec<BoundItem>,
        (exact_tv, rounding): (TvInterval, f64),
    ) -> Self {
        let total = crate::numeric::sum(items.iter().map(|i| i.contribution));
        let hypotheses_hold = hypotheses.iter().all(|h| h.holds);
        let dominant = hypotheses_hold.then_some(total >= exact_tv.upper - rounding);
        Self {
            theorem,
            n,
            params,
            hypotheses,
            hypotheses_hold,
            quantities,
            items,
            total,
            exact_tv,
            rounding,
            dominant,
        }
    }

    pub fn item(&self, name: &str) -> Option<&BoundItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities
            .iter()
            .find(|q| q.name == name)
            .map(|q| q.value)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }

    /// Flat `(column, value)` pairs for tabulation. Columns depend only on
    /// the theorem, so rows from one sweep share a header.
    pub fn csv_fields(&self) -> Vec<(String, String)> {
        let num = |v: f64| format!("{v:?}");
        let mut out = vec![
            ("theorem".to_string(), self.theorem.id().to_string()),
            ("n".to_string(), self.n.to_string()),
            ("M".to_string(), self.params.m.to_string()),
            ("delta".to_string(), num(self.params.delta)),
            ("p".to_string(), num(self.params.p)),
            ("alpha".to_string(), num(self.params.alpha)),
        ];
        for h in &self.hypotheses {
            out.push((format!("hyp:{}", h.name), h.holds.to_string()));
        }
        for i in &self.items {
            out.push((format!("term:{}", i.name), num(i.contribution)));
        }
        out.extend([
            ("total".to_string(), num(self.total)),
            ("tv".to_string(), num(self.exact_tv.value)),
            ("tv_lower".to_string(), num(self.exact_tv.lower)),
            ("tv_upper".to_string(), num(self.exact_tv.upper)),
            (
                "dominant".to_string(),
                self.dominant.map_or(String::new(), |d| d.to_string()),
            ),
        ]);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_and_verdict() {
        let params = BcpParams {
            m: 1,
            delta: 0.0,
            p: 0.1,
            alpha: 0.0,
        };
        let tv = TvInterval {
            value: 0.1,
            lower: 0.1,
            upper: 0.1,
        };
        let items = vec![BoundItem::new("a", 0.5, 0.1), BoundItem::new("b", 1.0, 0.2)];
        let r = BoundReport::assemble(
            Theorem::Thm41,
            3,
            params,
            vec![Hypothesis::less_than("p", 0.1, 0.5)],
            vec![],
            items.clone(),
            (tv, 0.0),
        );
        assert!((r.total - 0.25).abs() < 1e-16);
        assert_eq!(r.dominant, Some(true));
        let r = BoundReport::assemble(
            Theorem::Thm41,
            3,
            params,
            vec![Hypothesis::less_than("p", 0.6, 0.5)],
            vec![],
            items,
            (tv, 0.0),
        );
        assert_eq!(r.dominant, None);
        assert_eq!("cor45".parse::<Theorem>().unwrap(), Theorem::Cor45);
    }
}
