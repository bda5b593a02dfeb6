use serde::{Deserialize, Serialize};

use crate::distributions::{bernoulli_step, Pmf, DEFAULT_TOL};
use crate::error::{check_open_unit, invalid, Error, Result};
use crate::numeric;
use crate::runs_model::{runs_law, RunsModel};

/// Largest joint model held as an explicit law over `{0,1}^n`.
pub const MAX_JOINT_INDICATORS: usize = 24;

/// Exact joint law of `n` indicators as weighted bit patterns; bit `i` of a
/// pattern is `I_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    n: usize,
    atoms: Vec<(u32, f64)>,
}

impl JointLaw {
    /// Repeated patterns are merged; zero-weight patterns dropped.
    pub fn new(n: usize, atoms: Vec<(u32, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("indicators"));
        }
        if n > MAX_JOINT_INDICATORS {
            return Err(Error::TooLarge(format!(
                "{n} indicators, at most {MAX_JOINT_INDICATORS} in a joint model"
            )));
        }
        let mut atoms = atoms;
        for (idx, &(mask, w)) in atoms.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::NegativeMass {
                    index: idx,
                    value: w,
                });
            }
            if n < 32 && mask >> n != 0 {
                return Err(invalid("pattern", mask as f64, "sets bits beyond n"));
            }
        }
        let total = numeric::sum(atoms.iter().map(|a| a.1));
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(format!(
                "joint weights sum to {total}"
            )));
        }
        atoms.sort_by_key(|a| a.0);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(atoms.len());
        for (mask, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == mask => last.1 += w,
                _ => merged.push((mask, w)),
            }
        }
        merged.retain(|a| a.1 > 0.0);
        Ok(Self { n, atoms: merged })
    }

    /// Rows of `n` zero/one entries followed by the weight.
    pub fn from_rows(n: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != n + 1 {
                return Err(Error::Parse(format!(
                    "joint atom has {} entries, expected {}",
                    row.len(),
                    n + 1
                )));
            }
            let mut mask = 0u32;
            for (i, &b) in row[..n].iter().enumerate() {
                match b {
                    x if x == 0.0 => {}
                    x if x == 1.0 => mask |= 1 << i,
                    x => return Err(invalid("indicator value", x, "must be 0 or 1")),
                }
            }
            atoms.push((mask, row[n]));
        }
        Self::new(n, atoms)
    }

    /// Law of independent indicators, as a joint model.
    pub fn independent(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        if n > MAX_JOINT_INDICATORS {
            return Err(Error::TooLarge(format!("{n} indicators")));
        }
        let atoms = (0..1u32 << n)
            .map(|mask| {
                let w = probs.iter().enumerate().fold(1.0, |acc, (i, &p)| {
                    acc * if mask >> i & 1 == 1 { p } else { 1.0 - p }
                });
                (mask, w)
            })
            .collect();
        Self::new(n, atoms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(u32, f64)] {
        &self.atoms
    }

    /// Law of the count of set bits outside `drop`, restricted to patterns
    /// containing all of `require` (unnormalized).
    fn count_law(&self, drop: u32, require: u32) -> Vec<f64> {
        let mut masses = vec![0.0; self.n + 1];
        for &(mask, w) in &self.atoms {
            if mask & require == require {
                masses[(mask & !drop).count_ones() as usize] += w;
            }
        }
        masses
    }

    fn prob_all(&self, require: u32) -> f64 {
        numeric::sum(
            self.atoms
                .iter()
                .filter(|a| a.0 & require == require)
                .map(|a| a.1),
        )
    }
}

/// A finite family of indicators `I_1, ..., I_n` with `W = Σ I_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum IndicatorModel {
    Independent(Vec<f64>),
    Joint(JointLaw),
    /// Indicators `I_2, ..., I_n` of a runs model, indexed from zero.
    Runs(RunsModel),
}

/// JSON shape of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Independent { probs: Vec<f64> },
    Joint { n: usize, atoms: Vec<Vec<f64>> },
    Runs { n: usize, p_star: f64 },
}

impl TryFrom<ModelSpec> for IndicatorModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        let model = match spec {
            ModelSpec::Independent { probs } => IndicatorModel::Independent(probs),
            ModelSpec::Joint { n, atoms } => IndicatorModel::Joint(JointLaw::from_rows(n, &atoms)?),
            ModelSpec::Runs { n, p_star } => IndicatorModel::Runs(RunsModel::new(n, p_star)?),
        };
        model.validate()?;
        Ok(model)
    }
}

fn bits(indices: &[usize]) -> u32 {
    indices.iter().fold(0, |m, &i| m | 1 << i)
}

impl IndicatorModel {
    pub fn independent(probs: Vec<f64>) -> Result<Self> {
        let m = IndicatorModel::Independent(probs);
        m.validate()?;
        Ok(m)
    }

    pub fn joint(law: JointLaw) -> Result<Self> {
        let m = IndicatorModel::Joint(law);
        m.validate()?;
        Ok(m)
    }

    pub fn runs(model: RunsModel) -> Self {
        IndicatorModel::Runs(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelSpec>(text)?.try_into()
    }

    /// Every marginal must lie strictly inside `(0, 1)`.
    fn validate(&self) -> Result<()> {
        let probs = self.marginals();
        if probs.is_empty() {
            return Err(Error::Empty("indicators"));
        }
        for p in probs {
            check_open_unit("p_i", p)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        match self {
            IndicatorModel::Independent(p) => p.len(),
            IndicatorModel::Joint(j) => j.n,
            IndicatorModel::Runs(r) => r.indicators(),
        }
    }

    pub fn is_independent(&self) -> bool {
        matches!(self, IndicatorModel::Independent(_))
    }

    pub fn marginals(&self) -> Vec<f64> {
        match self {
            IndicatorModel::Independent(p) => p.clone(),
            IndicatorModel::Joint(j) => (0..j.n).map(|i| j.prob_all(1 << i)).collect(),
            IndicatorModel::Runs(r) => vec![r.a(); r.indicators()],
        }
    }

    /// Exact law of `W`.
    pub fn law(&self) -> Pmf {
        Pmf::from_parts(self.law_without(&[]), 0.0, DEFAULT_TOL)
    }

    /// Masses of `W - Σ_{i in drop} I_i`.
    pub fn law_without(&self, drop: &[usize]) -> Vec<f64> {
        match self {
            IndicatorModel::Independent(p) => {
                let mut masses = vec![1.0];
                for (i, &pi) in p.iter().enumerate() {
                    if !drop.contains(&i) {
                        bernoulli_step(&mut masses, pi);
                    }
                }
                masses
            }
            IndicatorModel::Joint(j) => j.count_law(bits(drop), 0),
            IndicatorModel::Runs(r) => {
                let skip: Vec<usize> = drop.iter().map(|i| i + 2).collect();
                runs_law(r, &skip, None)
            }
        }
    }

    /// Masses of `W - Σ_{i in drop} I_i` conditional on `I_given = 1`.
    pub fn law_without_given(&self, drop: &[usize], given: usize) -> Vec<f64> {
        match self {
            IndicatorModel::Independent(_) => self.law_without(drop),
            IndicatorModel::Joint(j) => {
                let raw = j.count_law(bits(drop), 1 << given);
                let total = numeric::sum(raw.iter().copied());
                raw.into_iter().map(|m| m / total).collect()
            }
            IndicatorModel::Runs(r) => {
                let skip: Vec<usize> = drop.iter().map(|i| i + 2).collect();
                runs_law(r, &skip, Some(given + 2))
            }
        }
    }

    /// `Cov(I_i, I_j)`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        match self {
            IndicatorModel::Independent(p) => {
                if i == j {
                    p[i] * (1.0 - p[i])
                } else {
                    0.0
                }
            }
            IndicatorModel::Joint(law) => {
                law.prob_all(1 << i | 1 << j) - law.prob_all(1 << i) * law.prob_all(1 << j)
            }
            IndicatorModel::Runs(r) => {
                let a = r.a();
                match i.abs_diff(j) {
                    0 => a * (1.0 - a),
                    1 => -a * a, // adjacent indicators cannot both fire
                    _ => 0.0,
                }
            }
        }
    }
}

/// `P(I_i = 1, I_j = 1)` for the runs model, by the DP; used to cross-check
/// the closed-form covariances.
#[cfg(test)]
pub(crate) fn runs_pair_probability(model: &RunsModel, i: usize, j: usize) -> f64 {
    let mut forced = vec![(i + 1, false), (i + 2, true)];
    for f in [(j + 1, false), (j + 2, true)] {
        if forced.iter().any(|&(k, v)| k == f.0 && v != f.1) {
            return 0.0;
        }
        forced.push(f);
    }
    numeric::sum(crate::runs_model::runs_dp(model, &[], &forced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{l1_distance, pmf_poisson_binomial};

    #[test]
    fn joint_enumeration_of_independent_matches_convolution() {
        let probs = [0.1, 0.35, 0.2, 0.6];
        let joint = IndicatorModel::joint(JointLaw::independent(&probs).unwrap()).unwrap();
        let law = joint.law();
        assert!(l1_distance(&law, &pmf_poisson_binomial(&probs).unwrap()) < 1e-15);
        let indep = IndicatorModel::independent(probs.to_vec()).unwrap();
        let a = joint.law_without(&[1, 3]);
        let b = indep.law_without(&[1, 3]);
        for k in 0..a.len().max(b.len()) {
            let (x, y) = (
                a.get(k).copied().unwrap_or(0.0),
                b.get(k).copied().unwrap_or(0.0),
            );
            assert!((x - y).abs() < 1e-15);
        }
        assert!(joint.covariance(0, 2).abs() < 1e-16);
    }

    #[test]
    fn json_models() {
        let m = IndicatorModel::from_json(
            r#"{"kind":"joint","n":2,"atoms":[[1,1,0.2],[1,0,0.2],[0,1,0.2],[0,0,0.4]]}"#,
        )
        .unwrap();
        assert_eq!(m.marginals(), vec![0.4, 0.4]);
        assert!((m.covariance(0, 1) - 0.04).abs() < 1e-16);
        let r = IndicatorModel::from_json(r#"{"kind":"runs","n":5,"p_star":0.5}"#).unwrap();
        assert_eq!(r.n(), 4);
        assert!(IndicatorModel::from_json(r#"{"kind":"independent","probs":[0.2,1.0]}"#).is_err());
        assert!(IndicatorModel::from_json(r#"{"kind":"joint","n":1,"atoms":[[2,1.0]]}"#).is_err());
    }

    #[test]
    fn runs_covariances_match_dp() {
        let r = RunsModel::new(7, 0.3).unwrap();
        let m = IndicatorModel::runs(r);
        let a = r.a();
        for i in 0..m.n() {
            for j in 0..m.n() {
                if i == j {
                    continue;
                }
                let cov = runs_pair_probability(&r, i, j) - a * a;
                assert!((cov - m.covariance(i, j)).abs() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn conditioning_in_a_perfectly_correlated_pair() {
        let law = JointLaw::new(2, vec![(0b11, 0.3), (0b00, 0.7)]).unwrap();
        let m = IndicatorModel::joint(law).unwrap();
        assert_eq!(m.law_without_given(&[0], 0), vec![0.0, 1.0, 0.0]);
        assert_eq!(m.law_without(&[0]), vec![0.7, 0.3, 0.0]);
    }
}
