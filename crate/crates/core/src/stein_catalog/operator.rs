use serde::{Deserialize, Serialize};

use crate::distributions::Pmf;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// One summand `(constant + slope * j) * g(j + offset)` of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineTerm {
    pub offset: usize,
    pub constant: f64,
    pub slope: f64,
}

/// Per-index coefficients `c_j` contributing `c_j * g(j + offset)`; used where
/// the coefficient is not affine in `j`. Indices past the table contribute 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedTerm {
    pub offset: usize,
    pub coeffs: Vec<f64>,
}

/// A Stein operator `(Ag)(j) = Σ_l (u_l + v_l j) g(j + l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineOperator {
    pub name: String,
    /// Sorted by offset, offsets distinct.
    pub terms: Vec<AffineTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tabulated: Option<TabulatedTerm>,
    /// Last index of the domain; test functions vanish beyond it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_end: Option<usize>,
    /// Upper bound on `Σ_m |c_m|` over dropped series coefficients, each of
    /// which would have contributed `c_m (g(j+m) - g(j+1))`.
    #[serde(default)]
    pub series_tail: f64,
}

impl AffineOperator {
    pub(crate) fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            terms: Vec::new(),
            tabulated: None,
            support_end: None,
            series_tail: 0.0,
        }
    }

    /// Adds `(constant + slope * j) g(j + offset)`, merging equal offsets.
    pub(crate) fn add(&mut self, offset: usize, constant: f64, slope: f64) -> &mut Self {
        match self.terms.binary_search_by_key(&offset, |t| t.offset) {
            Ok(i) => {
                self.terms[i].constant += constant;
                self.terms[i].slope += slope;
            }
            Err(i) => self.terms.insert(
                i,
                AffineTerm {
                    offset,
                    constant,
                    slope,
                },
            ),
        }
        self
    }

    /// Adds `c Σ_{l=1}^{m-1} Δg(j + l) = c (g(j + m) - g(j + 1))`.
    pub(crate) fn add_delta_sum(&mut self, m: usize, c: f64) -> &mut Self {
        if m >= 2 && c != 0.0 {
            self.add(m, c, 0.0);
            self.add(1, -c, 0.0);
        }
        self
    }

    pub(crate) fn finish(mut self) -> Self {
        self.terms.retain(|t| t.constant != 0.0 || t.slope != 0.0);
        self
    }

    pub fn max_offset(&self) -> usize {
        let affine = self.terms.iter().map(|t| t.offset).max().unwrap_or(0);
        let tab = self.tabulated.as_ref().map_or(0, |t| t.offset);
        affine.max(tab)
    }

    /// Affine term with the given offset, if any.
    pub fn term(&self, offset: usize) -> Option<&AffineTerm> {
        self.terms.iter().find(|t| t.offset == offset)
    }

    /// Coefficient multiplying `g(j + offset)` in `(Ag)(j)`.
    pub fn coefficient(&self, offset: usize, j: usize) -> f64 {
        let affine = self
            .term(offset)
            .map_or(0.0, |t| t.constant + t.slope * j as f64);
        let tab = match &self.tabulated {
            Some(t) if t.offset == offset => t.coeffs.get(j).copied().unwrap_or(0.0),
            _ => 0.0,
        };
        affine + tab
    }

    fn in_domain(&self, k: usize) -> bool {
        self.support_end.is_none_or(|end| k <= end)
    }

    /// `(Ag)(j)`.
    pub fn apply(&self, g: &TestFunction, j: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        let at = |k: usize| if self.in_domain(k) { g.get(k) } else { 0.0 };
        for t in &self.terms {
            acc.add((t.constant + t.slope * j as f64) * at(j + t.offset));
        }
        if let Some(t) = &self.tabulated {
            if let Some(&c) = t.coeffs.get(j) {
                acc.add(c * at(j + t.offset));
            }
        }
        acc.value()
    }

    /// Offsets present in the operator, affine and tabulated.
    fn offsets(&self) -> Vec<usize> {
        let mut offs: Vec<usize> = self.terms.iter().map(|t| t.offset).collect();
        if let Some(t) = &self.tabulated {
            if !offs.contains(&t.offset) {
                offs.push(t.offset);
            }
        }
        offs
    }
}

/// A test function `g` on the nonnegative integers with `g(0) = 0`, stored up
/// to a window and zero beyond it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first().is_some_and(|&v| v != 0.0) {
            return Err(crate::error::invalid("g(0)", values[0], "must be zero"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(crate::error::invalid("g", *v, "must be finite"));
        }
        Ok(Self { values })
    }

    /// `g(k) = f(k)` for `1 <= k < len`, `g(0) = 0`.
    pub fn from_fn(len: usize, f: impl Fn(usize) -> f64) -> Self {
        let values = (0..len).map(|k| if k == 0 { 0.0 } else { f(k) }).collect();
        Self { values }
    }

    /// `g = I(· = k)` for `k >= 1`.
    pub fn indicator(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(crate::error::invalid(
                "k",
                0.0,
                "indicator of 0 violates g(0) = 0",
            ));
        }
        let mut values = vec![0.0; k + 1];
        values[k] = 1.0;
        Ok(Self { values })
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Value of `|E (Ag)(Y)|` over the stored window of `Y`, with a bound on what
/// the truncated tail and dropped series terms could add.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub defect: f64,
    pub contamination_bound: f64,
}

/// `|Σ_j y_j (Ag)(j)|` for the stored masses of `y`.
pub fn characterization_defect(op: &AffineOperator, y: &Pmf, g: &TestFunction) -> DefectReport {
    let end = y.len();
    let mut acc = CompensatedSum::new();
    for j in 0..end {
        let m = y.get(j);
        if m != 0.0 {
            acc.add(m * op.apply(g, j));
        }
    }
    // (Ag)(j) vanishes once j is past the window of g, so the unstored part of
    // y contributes at most tail_mass * max |(Ag)(j)| over the remaining range
    let mut worst: f64 = 0.0;
    for j in end..g.values().len() {
        worst = worst.max(op.apply(g, j).abs());
    }
    let contamination = y.tail_mass() * worst + 2.0 * op.series_tail * g.sup_norm();
    DefectReport {
        defect: acc.value().abs(),
        contamination_bound: contamination,
    }
}

/// Defects for the indicator basis `g = I(· = k)`, `k = 1..=j_max`, computed
/// directly as `Σ_l y_{k-l} c_l(k - l)` without materializing each `g`.
/// Indices outside the operator's domain are skipped.
pub fn indicator_defects(op: &AffineOperator, y: &Pmf, j_max: usize) -> Vec<(usize, f64)> {
    let offs = op.offsets();
    let last = op.support_end.map_or(j_max, |e| e.min(j_max));
    (1..=last)
        .map(|k| {
            let mut acc = CompensatedSum::new();
            for &l in &offs {
                if l <= k {
                    let j = k - l;
                    acc.add(y.get(j) * op.coefficient(l, j));
                }
            }
            (k, acc.value().abs())
        })
        .collect()
}

/// Largest indicator-basis defect, or 0 when the basis is empty.
pub fn max_indicator_defect(op: &AffineOperator, y: &Pmf, j_max: usize) -> f64 {
    indicator_defects(op, y, j_max)
        .into_iter()
        .fold(0.0, |m, (_, d)| m.max(d))
}

/// Errors unless the law puts positive mass on every index below its last
/// support point.
pub(crate) fn check_interior(y: &Pmf) -> Result<usize> {
    let top = y.max_support();
    if top == 0 {
        return Err(Error::ZeroInteriorMass(0));
    }
    if let Some(j) = (0..top).find(|&j| y.get(j) <= 0.0) {
        return Err(Error::ZeroInteriorMass(j));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_sum_telescopes() {
        let mut op = AffineOperator::new("t");
        op.add_delta_sum(3, 2.0);
        let g = TestFunction::from_fn(10, |k| (k * k) as f64);
        // 2 (Δg(j+1) + Δg(j+2)) = 2 (g(j+3) - g(j+1))
        for j in 0..5 {
            let want = 2.0 * (g.get(j + 3) - g.get(j + 1));
            assert_eq!(op.apply(&g, j), want);
        }
    }

    #[test]
    fn test_function_guards() {
        assert!(TestFunction::new(vec![1.0, 2.0]).is_err());
        assert!(TestFunction::indicator(0).is_err());
        let g = TestFunction::indicator(2).unwrap();
        assert_eq!((g.get(1), g.get(2), g.get(9)), (0.0, 1.0, 0.0));
    }

    #[test]
    fn serializes_as_term_list() {
        let mut op = AffineOperator::new("x");
        op.add(1, 2.0, 0.0).add(0, 0.0, -1.0);
        let json = serde_json::to_string(&op).unwrap();
        assert!(json.contains(r#""terms":[{"offset":0,"constant":0.0,"slope":-1.0}"#));
        let back: AffineOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
    }
}
