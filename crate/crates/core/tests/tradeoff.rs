use mia_audit_core::*;
use proptest::prelude::{prop_assert, proptest};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// All "reject when score > tau" operating points, tau over -inf and every value.
fn brute_force_beta(out: &[f64], ins: &[f64], alpha: f64) -> f64 {
    std::iter::once(f64::NEG_INFINITY)
        .chain(out.iter().chain(ins).copied())
        .filter_map(|tau| {
            let fpr = out.iter().filter(|&&v| v > tau).count() as f64 / out.len() as f64;
            let fnr = ins.iter().filter(|&&v| v <= tau).count() as f64 / ins.len() as f64;
            (fpr <= alpha).then_some(fnr)
        })
        .fold(1.0, f64::min)
}

proptest! {
    #[test]
    fn curve_is_a_valid_step_function(
        out in proptest::collection::vec(-10.0f64..10.0, 1..60),
        ins in proptest::collection::vec(-10.0f64..10.0, 1..60),
    ) {
        let c = empirical_tradeoff(&out, &ins).unwrap();
        let p = c.points();
        prop_assert!(p.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 >= w[1].1));
        prop_assert!(p.iter().all(|&(a, b)| (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)));
        prop_assert!(p.first().unwrap().0 == 0.0);
        prop_assert!(*p.last().unwrap() == (1.0, 0.0));
    }
}

#[test]
fn matches_brute_force_on_ten_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for round in 0..200 {
        // coarse values so ties between and within the samples occur
        let mut draw = |shift: f64| -> Vec<f64> {
            (0..10)
                .map(|_| ((rng.sample::<f64, _>(StandardNormal) + shift) * 2.0).round())
                .collect()
        };
        let (out, ins) = (draw(0.0), draw(0.7));
        let curve = empirical_tradeoff(&out, &ins).unwrap();
        for k in 0..=40 {
            let alpha = k as f64 / 40.0;
            assert_eq!(
                curve.beta_at(alpha),
                brute_force_beta(&out, &ins, alpha),
                "round {round} alpha {alpha}"
            );
        }
    }
}

#[test]
fn same_values_lie_on_the_diagonal() {
    let v = [0.3, -1.0, 2.5, 4.0, 0.0];
    let c = empirical_tradeoff(&v, &v).unwrap();
    for &(a, b) in c.points() {
        assert!((a + b - 1.0).abs() < 1e-15);
    }
    let sep = empirical_tradeoff(&[0.0, 1.0], &[2.0, 3.0]).unwrap();
    assert_eq!(sep.beta_at(0.0), 0.0);
}

#[test]
fn gaussian_curve_reference_values() {
    assert!((gaussian_tradeoff(2.0, 0.05).unwrap() - 0.361_239_968_687_665).abs() < 1e-9);
    for a in [0.001, 0.3, 0.9] {
        assert!((gaussian_tradeoff(0.0, a).unwrap() - (1.0 - a)).abs() < 1e-12);
    }
    let betas: Vec<f64> = (0..20)
        .map(|i| gaussian_tradeoff(i as f64 * 0.25, 0.05).unwrap())
        .collect();
    assert!(betas.windows(2).all(|w| w[1] < w[0]));
    assert!(gaussian_tradeoff(-1.0, 0.05).is_err());
    assert!(gaussian_tradeoff(1.0, 1.0).is_err());
}

#[test]
fn gaussian_curve_bounds_monte_carlo_curve() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 1_000_000;
    let delta = 1.5;
    let out: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let ins: Vec<f64> = (0..n)
        .map(|_| delta + rng.sample::<f64, _>(StandardNormal))
        .collect();
    let curve = empirical_tradeoff(&out, &ins).unwrap();
    for k in 1..100 {
        let alpha = k as f64 / 100.0;
        let exact = gaussian_tradeoff(delta, alpha).unwrap();
        let emp = curve.beta_at(alpha);
        assert!(
            emp >= exact - 0.01 && emp <= exact + 0.01,
            "alpha {alpha}: {emp} vs {exact}"
        );
    }
}

#[test]
fn monotone_transforms_leave_curve_unchanged() {
    let out = [0.1, -0.4, 1.3, 2.2, 0.0, 0.7];
    let ins = [1.1, 0.5, 2.9, 0.7, 3.3];
    assert_eq!(
        check_postprocessing_invariance(&out, &ins, &|t| 2.0 * t + 3.0).unwrap(),
        0.0
    );
    assert_eq!(
        check_postprocessing_invariance(&out, &ins, &|t| t * t * t).unwrap(),
        0.0
    );
    // decreasing maps are compared after undoing the orientation
    assert_eq!(
        check_postprocessing_invariance(&out, &ins, &|t| -5.0 * t).unwrap(),
        0.0
    );
    assert!(matches!(
        check_postprocessing_invariance(&out, &ins, &|t| t * t),
        Err(Error::NonMonotone)
    ));
}

#[test]
fn many_to_one_maps_never_help_the_tester() {
    let maps: [fn(f64) -> f64; 4] = [
        |t| t * t,
        |t| t.abs().floor(),
        |t| (t * 3.0).sin(),
        |t| t.max(0.5),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let mut draw = |k: usize, shift: f64| -> Vec<f64> {
            (0..k)
                .map(|_| ((rng.sample::<f64, _>(StandardNormal) + shift) * 2.0).round() / 2.0)
                .collect()
        };
        let (out, ins) = (draw(6, 0.0), draw(6, 0.8));
        let exact = deterministic_tradeoff(&out, &ins).unwrap();
        for f in maps {
            let margin = processing_inequality_margin(&out, &ins, &f).unwrap();
            assert!(margin >= 0.0, "{out:?} {ins:?} margin {margin}");
        }
        // threshold rules are a subset of all rejection sets
        let thresholds = empirical_tradeoff(&out, &ins).unwrap();
        assert!(exact.min_margin_to(&thresholds) >= 0.0);
    }
}
