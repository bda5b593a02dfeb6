use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steinops::bcp_indicators::*;
use steinops::distributions::{pmf_bcp, pmf_poisson_binomial, tv_norm};

fn random_probs(rng: &mut ChaCha8Rng, n: usize, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(1e-3..hi)).collect()
}

#[test]
fn poisson_bound_dominates_on_small_probabilities() {
    let probs: Vec<f64> = (1..=20).map(|i| 0.15 * i as f64 / 21.0).collect();
    let r = bound_thm41(&IndicatorModel::independent(probs.clone()).unwrap()).unwrap();
    assert!(r.hypotheses_hold);
    let p = r.params;
    let exact = tv_norm(
        &pmf_poisson_binomial(&probs).unwrap(),
        &pmf_bcp(p.m, p.p, p.alpha, 1e-15).unwrap(),
    );
    assert!(r.total >= exact, "{} < {exact}", r.total);
    assert_eq!(r.dominant, Some(true));
}

#[test]
fn small_maximum_probability_is_sufficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let limit = (3.0 - 5f64.sqrt()) / 4.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..40);
        let probs = random_probs(&mut rng, n, limit);
        let f = fit_bcp(&probs).unwrap();
        assert!(f.p < 0.5 && theta1(&f) < 0.5, "{probs:?}");
    }
}

#[test]
fn closed_form_smoothness_bounds_exceed_exact_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    for _ in 0..100 {
        let n = rng.gen_range(5..40);
        let probs = random_probs(&mut rng, n, 0.6);
        let Some(d1b) = d1_bound(&probs) else {
            continue;
        };
        let s = smoothness_exact(&IndicatorModel::independent(probs.clone()).unwrap(), false);
        assert!(s.d <= d_bound(&probs).unwrap());
        assert!(s.d1 <= d1b);
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn closed_form_bound_exceeds_exact_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let n = rng.gen_range(10..30);
        let probs = random_probs(&mut rng, n, 0.15);
        let closed = bound_cor42(&probs).unwrap();
        if !closed.hypotheses_hold {
            continue;
        }
        let exact = bound_thm41(&IndicatorModel::independent(probs).unwrap()).unwrap();
        assert!(closed.total >= exact.total);
    }
}

#[test]
fn coupling_distance_matches_coupling_search() {
    // P(I_1 = I_2 = 1) = 0.2 with both marginals 0.4
    let m = IndicatorModel::from_json(
        r#"{"kind":"joint","n":2,"atoms":[[1,1,0.2],[1,0,0.2],[0,1,0.2],[0,0,0.4]]}"#,
    )
    .unwrap();
    // I_2 given I_1 = 1 is Bernoulli(0.5), unconditionally Bernoulli(0.4);
    // a coupling is fixed by t = P(both one), with E|X - Y| = a + b - 2t
    let (a, b) = (0.5, 0.4);
    let best = (0..=100_000)
        .map(|k| k as f64 / 100_000.0)
        .filter(|&t| t >= (a + b - 1.0f64).max(0.0) && t <= a.min(b))
        .map(|t| a + b - 2.0 * t)
        .fold(f64::INFINITY, f64::min);
    let c = coupling_distances(&m);
    assert!((c[0] - best).abs() < 1e-12 && (c[1] - best).abs() < 1e-12);
    let want = 2.0 * 0.4 * (1.0 + 0.8 + 4.0 * 0.16) * best;
    assert!((eta1(&m) - want).abs() < 1e-12);
}

#[test]
fn binomial_bound_vanishes_for_equal_probabilities() {
    let m = IndicatorModel::independent(vec![0.2; 15]).unwrap();
    let r = bound_thm44(&m).unwrap();
    assert!(r.total.abs() <= 1e-12, "{r:?}");
    assert!(r.exact_tv.upper <= 1e-12);
    let r = bound_cor45(&[0.2; 15]).unwrap();
    assert!(r.total.abs() <= 1e-12);
}

#[test]
fn binomial_bound_with_a_correlated_pair() {
    // I_1, I_2 positively correlated, I_3 independent of both
    let pair = [(0b00u32, 0.6), (0b01, 0.1), (0b10, 0.15), (0b11, 0.15)];
    let p3 = 0.05;
    let atoms = pair
        .iter()
        .flat_map(|&(m, w)| [(m, w * (1.0 - p3)), (m | 0b100, w * p3)])
        .collect();
    let m = IndicatorModel::joint(JointLaw::new(3, atoms).unwrap()).unwrap();
    assert!(m.covariance(0, 1) > 0.0);
    let r = bound_thm44(&m).unwrap();
    assert!(r.item("covariance").unwrap().raw > 0.0);
    assert!(r.item("pair_coupling").unwrap().raw > 0.0);
    assert_eq!(r.dominant.is_some(), r.hypotheses_hold);
    if r.hypotheses_hold {
        assert!(r.total >= r.exact_tv.upper);
    }
}

#[test]
fn independent_binomial_bounds_differ_by_the_substituted_d2() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let n = rng.gen_range(10..30);
        let probs = random_probs(&mut rng, n, 0.15);
        let cor = bound_cor45(&probs).unwrap();
        let sums = PowerSums::of(&probs);
        let gap = sums.sigma2() - 3.0 * PowerSums::tau(&probs);
        if gap <= 0.0 {
            continue;
        }
        let model = IndicatorModel::independent(probs).unwrap();
        let thm = bound_thm44_with_d2(&model, 4.0 / gap).unwrap();
        let f = cor.params;
        let pqt = f.p * (1.0 - f.p) * t_hat(&f) as f64;
        let outer = 2.0 / (1.0 - 2.0 * theta2(&f));
        // the corollary keeps δp² outside the 1/(pqT̂) factor
        let want = outer * f.delta * f.p * f.p * (1.0 - 1.0 / pqt);
        let diff = cor.total - thm.total;
        assert!(
            (diff - want).abs() <= 1e-12 * cor.total.abs().max(1.0),
            "{diff} vs {want}"
        );
    }
}

#[test]
fn binomial_bound_dominates_on_a_probability_grid() {
    let probs: Vec<f64> = (0..30)
        .map(|i| 0.05 + 0.1 * (i % 11) as f64 / 10.0)
        .collect();
    let r = bound_cor45(&probs).unwrap();
    assert!(r.hypotheses_hold, "{:?}", r.hypotheses);
    assert!(r.total >= r.exact_tv.upper);
}

#[test]
fn analytic_tail_bound_covers_exact_tails() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let n = rng.gen_range(5..40);
        let probs = random_probs(&mut rng, n, 0.3);
        let r = bound_cor45(&probs).unwrap();
        let tails = r.item("tail_w").unwrap().raw + r.item("tail_bcp").unwrap().raw;
        assert!(
            tails <= r.quantity("tail_psi").unwrap() + 1e-15,
            "{probs:?}"
        );
    }
}

#[test]
fn failed_variance_condition_is_flagged() {
    let r = bound_cor45(&[0.3, 0.1]).unwrap();
    assert!(!r.hypothesis("sigma2 - 3 tau").unwrap().holds);
    assert_eq!(r.dominant, None);
}

#[test]
fn reports_round_trip_through_json() {
    let r = bound_cor42(&[0.05, 0.1, 0.12, 0.08, 0.11, 0.07, 0.09, 0.1]).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: BoundReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    let fields = r.csv_fields();
    assert_eq!(fields[0], ("theorem".into(), "cor42".into()));
    assert!(fields.iter().any(|(k, _)| k == "term:fractional"));
}

#[test]
fn report_columns_are_fixed_per_theorem() {
    let probs: Vec<f64> = (0..12).map(|i| 0.02 + 0.01 * i as f64).collect();
    let model = IndicatorModel::independent(probs.clone()).unwrap();
    let reports = [
        bound_thm41(&model).unwrap(),
        bound_cor42(&probs).unwrap(),
        bound_thm44(&model).unwrap(),
        bound_cor45(&probs).unwrap(),
        steinops::runs_model::bound_cor48(&steinops::runs_model::RunsModel::new(30, 0.2).unwrap())
            .unwrap(),
    ];
    for r in reports {
        let cols: Vec<String> = r.csv_fields().into_iter().map(|(k, _)| k).collect();
        assert_eq!(cols, r.theorem.csv_columns());
    }
}
