use proptest::prelude::*;

use rankone::hilbert::gaussian_hilbert;
use rankone::model::{ModelParams, PotentialSample};
use rankone::seba::{solve_seba, stieltjes, stieltjes_derivative, PoissonConfiguration};
use rankone::secular::{secular_value, solve_spectrum_full, solve_spectrum_window, DEFAULT_TOL};
use rankone::stats::{hausdorff_distance, ks_distance, participation_ratio, ClosedSet};

fn distinct(mut v: Vec<f64>) -> Option<Vec<f64>> {
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|w| w[1] - w[0] > 1e-6).then_some(v)
}

fn potential() -> impl Strategy<Value = PotentialSample> {
    (prop::collection::vec(-4.0f64..4.0, 2..60), 0.2f64..3.0).prop_filter_map(
        "ties",
        |(v, lambda)| {
            let m = v.len();
            distinct(v.clone())?;
            PotentialSample::from_raw(ModelParams::new(m, lambda, 0).ok()?, v).ok()
        },
    )
}

fn configuration() -> impl Strategy<Value = PoissonConfiguration> {
    prop::collection::vec(-100.0f64..100.0, 20..200).prop_filter_map("ties", |v| {
        PoissonConfiguration::new(100.0, distinct(v)?).ok()
    })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spectrum_interlaces_and_sums_to_trace(s in potential()) {
        let r = solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        let p = &s.sorted_scaled;
        prop_assert_eq!(r.len(), p.len());
        prop_assert!(r.eigenvalues[0] < p[0]);
        for k in 1..p.len() {
            prop_assert!(p[k - 1] <= r.eigenvalues[k] && r.eigenvalues[k] <= p[k]);
        }
        let trace: f64 = p.iter().sum::<f64>() - 1.0;
        let sum: f64 = r.eigenvalues.iter().sum();
        prop_assert!((sum - trace).abs() <= 1e-9 * p.len() as f64);
    }

    #[test]
    fn window_solve_agrees_with_full_solve(s in potential(), a in -2.0f64..1.0, width in 0.01f64..2.0) {
        let full = solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        let win = solve_spectrum_window(&s, a, a + width, DEFAULT_TOL).unwrap();
        let expected: Vec<f64> = full
            .eigenvalues
            .iter()
            .copied()
            .filter(|&e| a <= e && e <= a + width)
            .collect();
        let got: Vec<f64> = win
            .eigenvalues
            .iter()
            .copied()
            .filter(|&e| a <= e && e <= a + width)
            .collect();
        prop_assert_eq!(expected, got);
    }

    #[test]
    fn secular_function_increases_between_poles(s in potential(), t in 0.05f64..0.95) {
        let p = &s.sorted_scaled;
        for k in 1..p.len() {
            let x0 = p[k - 1] + t * 0.5 * (p[k] - p[k - 1]);
            let x1 = p[k - 1] + (0.5 + t * 0.5) * (p[k] - p[k - 1]);
            if x0 < x1 {
                prop_assert!(secular_value(&s, x0).unwrap() <= secular_value(&s, x1).unwrap());
            }
        }
    }

    #[test]
    fn seba_roots_decrease_with_level(c in configuration(), a in -30.0f64..30.0, da in 0.1f64..10.0) {
        let lo = solve_seba(&c, a, 5.0, DEFAULT_TOL).unwrap();
        let hi = solve_seba(&c, a + da, 5.0, DEFAULT_TOL).unwrap();
        prop_assert_eq!(lo.roots.len(), hi.roots.len());
        for (x, y) in lo.roots.iter().zip(&hi.roots) {
            prop_assert_eq!(x.gap, y.gap);
            prop_assert!(y.u <= x.u);
            prop_assert!(x.dist_left > 0.0 && x.dist_right > 0.0);
        }
    }

    #[test]
    fn stieltjes_derivative_matches_difference_quotient(c in configuration(), x in -5.0f64..5.0) {
        let nearest = c.points.iter().map(|p| (p - x).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(nearest > 1e-2);
        let h = 1e-5 * nearest;
        let fd = (stieltjes(&c, x + h).unwrap() - stieltjes(&c, x - h).unwrap()) / (2.0 * h);
        let d = stieltjes_derivative(&c, x).unwrap();
        prop_assert!(d >= 1.0 / (nearest * nearest));
        prop_assert!((fd - d).abs() <= 1e-5 * d, "{} vs {}", fd, d);
    }

    #[test]
    fn hilbert_transform_is_odd_and_bounded(xi in -60.0f64..60.0) {
        let h = gaussian_hilbert(xi);
        prop_assert!((h + gaussian_hilbert(-xi)).abs() <= 1e-15);
        prop_assert!(h.abs() <= 0.8);
        if xi != 0.0 {
            prop_assert!(h * xi < 0.0);
        }
    }

    #[test]
    fn ks_is_a_symmetric_rank_statistic(
        a in prop::collection::vec(-10.0f64..10.0, 1..80),
        b in prop::collection::vec(-10.0f64..10.0, 1..80),
    ) {
        let (a, b) = (sorted(a), sorted(b));
        let d = ks_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_distance(&b, &a).unwrap());
        // Invariant under a strictly increasing map.
        let f = |v: &Vec<f64>| v.iter().map(|x| x.powi(3) + 2.0 * x).collect::<Vec<_>>();
        prop_assert!((d - ks_distance(&f(&a), &f(&b)).unwrap()).abs() <= 1e-12);
        prop_assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_is_a_metric_on_finite_sets(
        a in prop::collection::vec(-10.0f64..10.0, 1..30),
        b in prop::collection::vec(-10.0f64..10.0, 1..30),
        c in prop::collection::vec(-10.0f64..10.0, 1..30),
    ) {
        let h = |x: &[f64], y: &[f64]| hausdorff_distance(x, &ClosedSet::from_points(y)).unwrap();
        prop_assert_eq!(h(&a, &a), 0.0);
        prop_assert!((h(&a, &b) - h(&b, &a)).abs() <= 1e-12);
        prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + 1e-12);
    }

    #[test]
    fn participation_ratio_sandwich(v in prop::collection::vec(-5.0f64..5.0, 1..100), q in 0.6f64..4.0) {
        prop_assume!(v.iter().any(|x| x.abs() > 1e-9));
        let p = participation_ratio(&v, q).unwrap();
        prop_assert!(p.sandwich_holds(), "{:?}", p);
        prop_assert!(p.r > 0.0 && p.r <= 1.0 + 1e-15);
    }
}
