use steinops::bcp_indicators::{bound_thm41, IndicatorModel};
use steinops::distributions::{l1_distance, MomentKind, Pmf};
use steinops::runs_model::*;

/// Law of the number of `01` patterns by summing over all `2^n` sequences.
fn enumerate(n: usize, p: f64) -> Pmf {
    let mut masses = vec![0.0; n];
    for x in 0u32..1 << n {
        let ones = x.count_ones() as i32;
        let w = p.powi(ones) * (1.0 - p).powi(n as i32 - ones);
        let count = (1..n)
            .filter(|&j| x >> j & 1 == 1 && x >> (j - 1) & 1 == 0)
            .count();
        masses[count] += w;
    }
    Pmf::new(masses, 0.0, 1e-12).unwrap()
}

#[test]
fn dynamic_program_matches_enumeration() {
    for n in 2..=14 {
        for p in [0.1, 0.5, 0.73] {
            let m = RunsModel::new(n, p).unwrap();
            let d = l1_distance(&exact_runs_law(&m), &enumerate(n, p));
            assert!(d <= 1e-12, "n = {n}, p* = {p}: {d:e}");
        }
    }
}

#[test]
fn closed_form_moments_match_exact_law() {
    for n in [5, 20, 100] {
        for p in [0.2, 0.5, 0.9] {
            let m = RunsModel::new(n, p).unwrap();
            let law = exact_runs_law(&m);
            let mo = runs_moments(&m);
            assert!((law.mean() - mo.mean).abs() <= 1e-10);
            assert!((law.variance() - mo.variance).abs() <= 1e-10);
            let third = law.moment(3, MomentKind::Central).unwrap();
            assert!((third - mo.third_central).abs() <= 1e-10, "n = {n}");
        }
    }
}

#[test]
fn fit_is_valid_and_matches_moments() {
    for n in (10..=500).step_by(7) {
        for k in 1..=8 {
            let p_star = 0.1 * k as f64 + 0.05;
            let m = RunsModel::new(n, p_star).unwrap();
            let f = fit_runs_bcp(&m).unwrap();
            assert!(f.alpha >= 0.0 && (0.0..1.0).contains(&f.delta));
            let mo = runs_moments(&m);
            let (mm, p) = (f.m as f64, f.p);
            assert!((mm * p + f.alpha - mo.mean).abs() <= 1e-12 * mo.mean);
            // the dropped fraction δ accounts for the variance mismatch
            let var = mm * p * (1.0 - p) + f.alpha;
            assert!((mo.variance - (var - f.delta * p * p)).abs() <= 1e-10 * mo.mean);
        }
    }
    let m = RunsModel::new(1_000_000, 0.3).unwrap();
    let f = fit_runs_bcp(&m).unwrap();
    assert!((f.p / m.a() - 10.0 / 3.0).abs() < 1e-5);
}

#[test]
fn waiting_time_moments_match_generating_function() {
    for p_star in [0.2, 0.5, 0.7] {
        let a = p_star * (1.0 - p_star);
        let g = |z: f64| a * z * z / (1.0 - z + a * z * z);
        let h = 1e-3;
        // five-point stencils at z = 1
        let d1 = (g(1.0 - 2.0 * h) - 8.0 * g(1.0 - h) + 8.0 * g(1.0 + h) - g(1.0 + 2.0 * h))
            / (12.0 * h);
        let d2 = (-g(1.0 - 2.0 * h) + 16.0 * g(1.0 - h) - 30.0 * g(1.0) + 16.0 * g(1.0 + h)
            - g(1.0 + 2.0 * h))
            / (12.0 * h * h);
        let (mean, var) = waiting_time_moments(p_star).unwrap();
        assert!((d1 - mean).abs() <= 1e-8 * mean.max(1.0), "{d1} vs {mean}");
        assert!(
            (d2 + d1 - d1 * d1 - var).abs() <= 1e-8 * var.max(1.0),
            "variance at {p_star}"
        );
    }
}

#[test]
fn smoothness_lemma_on_large_sequences() {
    for n in [100, 200] {
        for p in [0.3, 0.5] {
            let rep = runs_smoothness_check(&RunsModel::new(n, p).unwrap());
            assert!(rep.hypothesis_holds);
            assert!(rep.d_holds() && rep.d1_holds(), "{rep:?}");
        }
    }
    let small = runs_smoothness_check(&RunsModel::new(10, 0.1).unwrap());
    assert!(!small.hypothesis_holds);
}

#[test]
fn leave_one_out_law_drops_one_indicator() {
    let m = RunsModel::new(6, 0.4).unwrap();
    let model = IndicatorModel::runs(m);
    let full = exact_runs_law(&m);
    for i in 0..model.n() {
        let without = Pmf::new(model.law_without(&[i]), 0.0, 1e-12).unwrap();
        assert!((full.mean() - without.mean() - m.a()).abs() < 1e-14);
    }
}

#[test]
fn runs_bound_reports_its_hypotheses() {
    let m = RunsModel::new(100, 0.5).unwrap();
    let r = bound_cor48(&m).unwrap();
    assert_eq!(r.items.len(), 3);
    assert_eq!(r.hypotheses_hold, r.dominant.is_some());
    assert!(r.hypothesis("(n-2)a").unwrap().holds);
    let general = bound_thm41(&IndicatorModel::runs(m)).unwrap();
    assert_eq!(general.params, r.params);
    assert!(general.quantity("eta1").unwrap() > 0.0);
}
