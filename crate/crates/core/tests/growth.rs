use conjlen_core::coxeter::{build_affine_a, preset};
use conjlen_core::growth::{self, GrowthConstants};

#[test]
fn fitted_slope_is_stable_when_count_doubles() {
    let (g, _) = build_affine_a(2).unwrap();
    for seed in [1u64, 2, 3] {
        let a = growth::fit_affine_upper(&growth::empirical_tnorm(&g, 30, 200, seed).unwrap()).unwrap();
        let b = growth::fit_affine_upper(&growth::empirical_tnorm(&g, 30, 400, seed).unwrap()).unwrap();
        assert!(a.slope.is_finite() && a.slope > 0.0);
        let ratio = b.slope / a.slope;
        assert!((0.8..=1.2).contains(&ratio), "seed {seed}: slope {} -> {}", a.slope, b.slope);
    }
}

#[test]
fn wallpaper_groups_respect_the_linear_bound() {
    for name in ["p2", "p4"] {
        let g = preset(name).unwrap();
        let k = GrowthConstants::of(&g).unwrap();
        let recs = growth::empirical_tnorm(&g, 15, 60, 21).unwrap();
        let fit = growth::fit_affine_upper(&recs).unwrap();
        assert!(fit.slope.is_finite());
        for r in &recs {
            assert!(r.tnorm_emp <= k.envelope(r.n as f64) + 1e-9, "{name} n={}", r.n);
            assert!(r.tnorm_emp <= fit.eval(r.n as f64) + 1e-9);
        }
    }
}

#[test]
fn identical_seeds_give_identical_records() {
    let (g, _) = build_affine_a(2).unwrap();
    assert_eq!(
        growth::empirical_tnorm(&g, 10, 30, 5).unwrap(),
        growth::empirical_tnorm(&g, 10, 30, 5).unwrap()
    );
    assert_eq!(
        growth::empirical_clf(&g, 8, 30, 5, 10).unwrap(),
        growth::empirical_clf(&g, 8, 30, 5, 10).unwrap()
    );
}

#[test]
fn small_clf_matches_exhaustive_ball_scan() {
    // n <= 2 in A~2: pairs (id, id), (s, s) for the three generators, and
    // (s_i, s_j); the latter need a conjugator of length 2
    let (g, _) = build_affine_a(2).unwrap();
    let out = growth::empirical_clf(&g, 2, 10, 1, 8).unwrap();
    let clf: Vec<_> = out.records.iter().map(|r| r.clf_emp.unwrap()).collect();
    assert_eq!(clf, vec![0, 0, 2]);
    assert_eq!(out.exceeded, 0);
}

#[test]
fn sandwich_holds_on_exhaustive_pairs() {
    let (g, _) = build_affine_a(2).unwrap();
    let samples = growth::paired_cl_ctn(&g, 4, 12).unwrap();
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.cl.unwrap() as f64, s.ctn)).collect();
    let sw = growth::fit_sandwich(&pts).unwrap();
    assert_eq!(sw.violations(&pts, 1e-9), 0);
    assert!(sw.a >= 0.0 && sw.c >= 0.0);
}
