use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use singular_ma::analysis::*;
use singular_ma::barriers::affine_sphere_exponent;
use singular_ma::sampling::seeded_rng;
use singular_ma::{Barrier, Domain, ExplicitKind, Result};

fn random_psd(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let rank_cut = rng.random_range(0..=n);
    let mut a = &m * m.transpose();
    if rank_cut < n && rng.random_bool(0.2) {
        // occasionally singular
        let v = DMatrix::from_fn(n, 1, |_, _| rng.random_range(-1.0..1.0));
        a = &v * v.transpose();
    }
    (&a + a.transpose()) * 0.5
}

#[test]
fn trace_inequality_on_random_pairs() {
    let mut rng = seeded_rng(31);
    for draw in 0..10_000 {
        let n = 2 + draw % 4;
        let a = random_psd(n, &mut rng);
        let b = random_psd(n, &mut rng);
        assert!(trace_inequality_check(&a, &b).unwrap(), "draw {draw}");
    }
    let id = DMatrix::<f64>::identity(2, 2);
    assert!(trace_inequality_check(&id, &id).unwrap());
    let singular = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
    assert!(trace_inequality_check(&singular, &id).unwrap());
    let skew = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    assert!(trace_inequality_check(&skew, &id).is_err());
}

#[test]
fn barrier_ordering_via_comparison() {
    let cap = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
    let v = Barrier::sub_valpha_for_power(&cap, 1.0).unwrap();
    let w = Barrier::super_w(2, 1.0).unwrap();
    let mut rng = seeded_rng(32);
    let c = check_comparison(&v, &w, &cap, 10_000, &mut rng).unwrap();
    assert!(c.pass && c.worst_gap > 0.0);
    let swapped = check_comparison(&w, &v, &cap, 10_000, &mut rng).unwrap();
    assert!(!swapped.pass);
    let same = |x: &[f64]| -> Result<f64> { Ok(x[0] * x[1]) };
    let refl = check_comparison(&same, &same, &cap, 100, &mut rng).unwrap();
    assert!(refl.pass && refl.worst_gap == 0.0);
}

#[test]
fn barrier_axis_slopes_match_exponents() {
    let cap = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
    let window = (1e-3, 5e-2);
    let heights = log_spaced(window.0, window.1, 40);
    for p in [1.0, 4.0] {
        let v = Barrier::sub_valpha_for_power(&cap, p).unwrap();
        let fit = fit_exponent(&barrier_axis_samples(&v, &heights).unwrap(), window).unwrap();
        assert!((fit.slope - 2.0 / (2.0 + p)).abs() < 1e-3);
    }
    for kind in [ExplicitKind::P1Cylinder, ExplicitKind::Ujl] {
        let b = Barrier::explicit(kind, 2).unwrap();
        let fit = fit_exponent(&barrier_axis_samples(&b, &heights).unwrap(), window).unwrap();
        assert!((fit.slope - b.exponent()).abs() < 1e-3);
    }
    // The supersolutions carry a linear term, so their power regime sits
    // closer to the flat face.
    let w = Barrier::super_w(2, 1.0).unwrap();
    let near = (1e-12, 1e-9);
    let fit = fit_exponent(&barrier_axis_samples(&w, &log_spaced(near.0, near.1, 40)).unwrap(), near).unwrap();
    assert!((fit.slope - 2.0 / 3.0).abs() < 1e-3, "{}", fit.slope);
    let wk = Barrier::super_wk(2, 1.0, 0.5).unwrap();
    let near = (1e-8, 1e-5);
    let fit = fit_exponent(&barrier_axis_samples(&wk, &log_spaced(near.0, near.1, 40)).unwrap(), near).unwrap();
    assert!((fit.slope - affine_sphere_exponent(2, 1.0)).abs() < 1e-3, "{}", fit.slope);
}

#[test]
fn bootstrap_reference_cases() {
    for &(n, q) in &[(3usize, 0.5), (4, 1.0), (5, 2.5)] {
        let t = bootstrap(n, q, 50).unwrap();
        for k in 0..=50 {
            assert!((t.error(k) - t.closed_form_error(k)).abs() < 1e-12);
        }
        let target = 0.999 * t.limit;
        let k = minimal_steps(n, q, target).unwrap();
        assert!(t.closed_form_error(k) < t.limit - target);
        assert!(k == 0 || t.closed_form_error(k - 1) >= t.limit - target);
    }
}

#[test]
fn bootstrap_ten_steps_example() {
    let t = bootstrap(3, 1.0, 10).unwrap();
    assert_eq!(t.betas.len(), 11);
    for k in 0..=10 {
        assert!((t.error(k) - t.closed_form_error(k)).abs() < 1e-15);
    }
}

#[test]
fn mixc_identity_grid() {
    for n in 2..=8 {
        for k in [0.5, 1.0, 2.0, 5.0, 14.0, 20.0] {
            assert!(mixc_identity_gap(n, k) < 1e-12);
        }
    }
    assert_eq!(mixc_exponent(5, 14.0), 0.0);
    assert_eq!(mixc_threshold(5), Some(14.0));
    assert_eq!(mixc_threshold(4), None);
}

proptest! {
    #[test]
    fn fits_recover_power_laws(slope in -3.0f64..3.0, c in 0.01f64..100.0, lo in 1e-6f64..1e-2, count in 5usize..60) {
        let hi = lo * 100.0;
        let data: Vec<(f64, f64)> = log_spaced(lo, hi, count).into_iter().map(|d| (d, c * d.powf(slope))).collect();
        let fit = fit_exponent(&data, (lo, hi)).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-10);
        prop_assert_eq!(fit.n_points, count);
    }

    #[test]
    fn bootstrap_is_monotone_and_bounded(n in 3usize..10, frac in 0.01f64..1.0, steps in 1usize..60) {
        let q = frac * (n as f64 - 2.0);
        let t = bootstrap(n, q, steps).unwrap();
        let ulp = 4.0 * f64::EPSILON * t.limit;
        for k in 0..steps {
            prop_assert!(t.betas[k + 1] >= t.betas[k]);
            prop_assert!(t.betas[k + 1] <= t.limit + ulp);
            // Strict once the remaining gap is resolvable in floating point.
            if t.closed_form_error(k + 1) > 1e3 * ulp {
                prop_assert!(t.betas[k + 1] > t.betas[k]);
                prop_assert!(t.betas[k + 1] < t.limit);
                let ratio = t.error(k + 1) / t.error(k);
                prop_assert!((ratio - q / n as f64).abs() < 1e-9 * ratio.max(1e-3) + 1e-12 / t.error(k));
            }
        }
    }

    #[test]
    fn mixc_identity_holds(n in 2usize..12, k in 0.01f64..50.0) {
        prop_assert!(mixc_identity_gap(n, k) < 1e-12);
    }
}
