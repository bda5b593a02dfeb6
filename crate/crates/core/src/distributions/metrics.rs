use serde::{Deserialize, Serialize};

use crate::numeric::{self, CompensatedSum};

use super::pmf::Pmf;

/// Exact discrete convolution. Tail masses add.
pub fn convolve(a: &Pmf, b: &Pmf) -> Pmf {
    let masses = convolve_slices(a.masses(), b.masses());
    let tail = a.tail_mass() + b.tail_mass();
    Pmf::from_parts(masses, tail, a.tol().max(b.tol()).max(tail))
}

pub(crate) fn convolve_slices(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let len = a.len() + b.len() - 1;
    (0..len)
        .map(|k| {
            let lo = k.saturating_sub(long.len() - 1);
            let hi = k.min(short.len() - 1);
            let mut acc = CompensatedSum::new();
            for i in lo..=hi {
                acc.add(short[i] * long[k - i]);
            }
            acc.value()
        })
        .collect()
}

/// Total variation norm of the difference of two truncated laws, reported as
/// an interval. `value` sums over the stored windows; the true norm lies in
/// `[lower, upper]` once the truncated tails are accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvInterval {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn tv_interval(a: &Pmf, b: &Pmf) -> TvInterval {
    let len = a.len().max(b.len());
    let value = numeric::sum((0..len).map(|j| (a.get(j) - b.get(j)).abs()));
    let tails = a.tail_mass() + b.tail_mass();
    TvInterval {
        value,
        lower: (value - tails).max(0.0),
        upper: value + tails,
    }
}

/// `Σ_j |a_j - b_j|` plus both tail masses: a conservative value of the total
/// variation norm (twice the total variation metric).
pub fn tv_norm(a: &Pmf, b: &Pmf) -> f64 {
    tv_interval(a, b).upper
}

/// Plain L1 distance between the stored windows, tails ignored.
pub fn l1_distance(a: &Pmf, b: &Pmf) -> f64 {
    tv_interval(a, b).value
}

/// Wasserstein-1 distance between two laws on the integers: the L1 distance
/// between their distribution functions, which is also `E|X - Y|` under the
/// quantile (minimal) coupling.
pub fn wasserstein1(a: &Pmf, b: &Pmf) -> f64 {
    wasserstein1_slices(a.masses(), b.masses())
}

pub(crate) fn wasserstein1_slices(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let mut fa = CompensatedSum::new();
    let mut fb = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    // the final CDF difference is zero for normalized inputs, so stop one short
    for j in 0..len.saturating_sub(1) {
        fa.add(a.get(j).copied().unwrap_or(0.0));
        fb.add(b.get(j).copied().unwrap_or(0.0));
        total.add((fa.value() - fb.value()).abs());
    }
    total.value()
}

/// `Σ_k |ΔP(X = k)|`, the norm of the law convolved with `δ_1 - δ_0`.
pub fn first_difference_norm(masses: &[f64]) -> f64 {
    if masses.is_empty() {
        return 0.0;
    }
    let at = |k: isize| -> f64 {
        if k < 0 {
            0.0
        } else {
            masses.get(k as usize).copied().unwrap_or(0.0)
        }
    };
    numeric::sum((0..=masses.len() as isize).map(|k| (at(k) - at(k - 1)).abs()))
}

/// `Σ_k |Δ²P(X = k)|`, the norm of the law convolved with `(δ_1 - δ_0)^{*2}`.
pub fn second_difference_norm(masses: &[f64]) -> f64 {
    if masses.is_empty() {
        return 0.0;
    }
    let at = |k: isize| -> f64 {
        if k < 0 {
            0.0
        } else {
            masses.get(k as usize).copied().unwrap_or(0.0)
        }
    };
    numeric::sum(
        (0..=masses.len() as isize + 1).map(|k| (at(k) - 2.0 * at(k - 1) + at(k - 2)).abs()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{pmf_binomial, pmf_poisson};

    #[test]
    fn convolution_identity_and_additivity() {
        let p = pmf_poisson(1.3, 1e-12).unwrap();
        let same = convolve(&Pmf::point(0), &p);
        assert!(l1_distance(&same, &p) < 1e-16);
        let b1 = pmf_binomial(1, 0.35).unwrap();
        let b2 = convolve(&b1, &b1);
        assert!(l1_distance(&b2, &pmf_binomial(2, 0.35).unwrap()) < 1e-15);
        let p3 = convolve(
            &pmf_poisson(1.0, 1e-14).unwrap(),
            &pmf_poisson(2.0, 1e-14).unwrap(),
        );
        assert!(l1_distance(&p3, &pmf_poisson(3.0, 1e-14).unwrap()) < 1e-12);
    }

    #[test]
    fn tv_extremes() {
        let p = pmf_poisson(2.0, 1e-12).unwrap();
        assert!(tv_interval(&p, &p).value == 0.0);
        assert_eq!(tv_norm(&Pmf::point(0), &Pmf::point(1)), 2.0);
    }

    #[test]
    fn tv_matches_supremum_over_sets() {
        // ‖P - Q‖ = 2 sup_A |P(A) - Q(A)|, checked over every subset of a
        // small window (the rest of the mass is folded into one atom)
        let b = pmf_binomial(10, 0.1).unwrap();
        let p = pmf_poisson(1.0, 1e-15).unwrap();
        let window = 12usize;
        let fold = |d: &Pmf| -> Vec<f64> {
            let mut v: Vec<f64> = (0..window).map(|j| d.get(j)).collect();
            v.push(1.0 - v.iter().sum::<f64>());
            v
        };
        let (fb, fp) = (fold(&b), fold(&p));
        let mut best: f64 = 0.0;
        for mask in 0u32..(1 << (window + 1)) {
            let diff: f64 = (0..=window)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| fb[i] - fp[i])
                .sum();
            best = best.max(diff.abs());
        }
        let tv = tv_interval(&b, &p);
        assert!(tv.value > 0.0);
        assert!((tv.value - 2.0 * best).abs() < 1e-12);
    }

    #[test]
    fn difference_norms_of_bernoulli() {
        assert!((second_difference_norm(&[0.5, 0.5]) - 2.0).abs() < 1e-15);
        assert!((first_difference_norm(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!((second_difference_norm(&[1.0]) - 4.0).abs() < 1e-15);
        assert!((first_difference_norm(&[1.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn wasserstein_of_shifted_point_masses() {
        assert_eq!(wasserstein1(&Pmf::point(1), &Pmf::point(4)), 3.0);
        let b = pmf_binomial(1, 0.3).unwrap();
        assert!((wasserstein1(&Pmf::point(1), &b) - 0.7).abs() < 1e-15);
    }
}
