use nalgebra::DMatrix;
use proptest::prelude::*;
use singular_ma::barriers::{sharp_constant_suplem, sup_norm_lower_constant, c_alpha};
use singular_ma::sampling::{sample_interior, seeded_rng};
use singular_ma::verify::{verify_barrier, VerifyOptions};
use singular_ma::{Barrier, Domain, ExplicitKind, RhsSpec};

/// Fourth-order central-difference Hessian of a scalar function.
fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let shifted = |steps: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in steps {
            y[i] += s * h;
        }
        f(&y)
    };
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let c = [(-2.0, -1.0 / 12.0), (-1.0, 4.0 / 3.0), (0.0, -5.0 / 2.0), (1.0, 4.0 / 3.0), (2.0, -1.0 / 12.0)];
        m[(i, i)] = c.iter().map(|&(s, w)| w * shifted(&[(i, s)])).sum::<f64>() / (h * h);
        for j in 0..i {
            let d = |s: f64| {
                (shifted(&[(i, s), (j, s)]) - shifted(&[(i, s), (j, -s)]) - shifted(&[(i, -s), (j, s)])
                    + shifted(&[(i, -s), (j, -s)]))
                    / (4.0 * s * s * h * h)
            };
            let v = (4.0 * d(1.0) - d(2.0)) / 3.0;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn barriers_for_oracle() -> Vec<Barrier> {
    let mut out = Vec::new();
    for n in [2, 3] {
        let cap = Domain::parabola_cap(n, 1.0, 0.0).unwrap();
        for p in [1.0, 2.0, n as f64 + 2.0] {
            out.push(Barrier::sub_valpha_for_power(&cap, p).unwrap());
            out.push(Barrier::super_w(n, p).unwrap());
            out.push(Barrier::super_wt(n, p, 0.5).unwrap());
        }
        out.push(Barrier::super_w2(n, n as f64 + 4.0).unwrap());
        out.push(Barrier::super_wk(n, 1.0, 0.5).unwrap());
        out.push(Barrier::sub_valpha_k(n, 1.0, 0.5, 0.5, 2.0).unwrap());
        out.push(Barrier::explicit(ExplicitKind::P1Cylinder, n).unwrap());
    }
    out.push(Barrier::explicit(ExplicitKind::Ujl, 2).unwrap());
    out
}

#[test]
fn closed_form_determinants_match_finite_differences() {
    let mut rng = seeded_rng(21);
    for b in barriers_for_oracle() {
        let pts = match b.domain() {
            Some(d) => sample_interior(d, 200, 0.05, &mut rng),
            None => singular_ma::sampling::sample_half_cylinder(b.dim(), 1.0, 200, 0.05, &mut rng),
        };
        let f = |y: &[f64]| b.value(y).unwrap();
        for x in &pts {
            let fd = fd_hessian(&f, x, 1e-3);
            let jet = b.eval_jet(x).unwrap();
            let scale = fd.amax();
            assert!((&jet.hessian - &fd).amax() <= 1e-4 * scale, "{} at {x:?}", b.label());
            let det = b.det_hessian(x).unwrap();
            assert!(((fd.determinant() - det) / det).abs() < 1e-4, "{} at {x:?}", b.label());
        }
    }
}

#[test]
fn planar_hessians_match_hand_derivation() {
    let cap = Domain::parabola_cap(2, 1.0, 0.0).unwrap();
    let p = 1.0;
    let alpha = 2.0 / 3.0;
    let c = c_alpha(2.0, alpha).unwrap();
    let v = Barrier::sub_valpha_for_power(&cap, p).unwrap();
    let cw = sharp_constant_suplem(2, p).unwrap();
    let w = Barrier::super_w(2, p).unwrap();
    let mut rng = seeded_rng(22);
    for x in sample_interior(&cap, 500, 1e-3, &mut rng) {
        let (x1, x2) = (x[0], x[1]);
        // v = x2^alpha (x1^2 - c)
        let v11 = 2.0 * x2.powf(alpha);
        let v12 = 2.0 * alpha * x1 * x2.powf(alpha - 1.0);
        let v22 = alpha * (alpha - 1.0) * x2.powf(alpha - 2.0) * (x1 * x1 - c);
        let det_v = v11 * v22 - v12 * v12;
        assert!((v.det_hessian(&x).unwrap() / det_v - 1.0).abs() < 1e-12);
        // w = cw x2 - cw x2^a (1 - x1^2)^b with a = 2/3, b = 1/3
        let (a, b) = (2.0 / 3.0, 1.0 / 3.0);
        let q = 1.0 - x1 * x1;
        let w11 = -cw * x2.powf(a) * (b * (b - 1.0) * q.powf(b - 2.0) * 4.0 * x1 * x1 - 2.0 * b * q.powf(b - 1.0));
        let w12 = cw * a * x2.powf(a - 1.0) * 2.0 * b * x1 * q.powf(b - 1.0);
        let w22 = -cw * a * (a - 1.0) * x2.powf(a - 2.0) * q.powf(b);
        let det_w = w11 * w22 - w12 * w12;
        assert!((w.det_hessian(&x).unwrap() / det_w - 1.0).abs() < 1e-10);
    }
}

#[test]
fn explicit_solutions_solve_their_equations() {
    let mut rng = seeded_rng(23);
    let cases = [
        (ExplicitKind::P1Cylinder, 2, 1.0),
        (ExplicitKind::P1Cylinder, 3, 1.0),
        (ExplicitKind::P1Cylinder, 4, 1.0),
        (ExplicitKind::Ujl, 2, 4.0),
    ];
    for (kind, n, p) in cases {
        let b = Barrier::explicit(kind, n).unwrap();
        for x in singular_ma::sampling::sample_half_cylinder(n, 1.0, 10_000, 1e-3, &mut rng) {
            let det = b.det_hessian(&x).unwrap();
            let u = b.value(&x).unwrap();
            assert!((det * u.abs().powf(p) - 1.0).abs() < 1e-10, "{} at {x:?}", b.label());
        }
    }
    for n in 2..=6 {
        let nf = n as f64;
        let closed = (nf + 1.0) * (2.0 * (nf - 1.0)).powf(-nf / (nf + 1.0));
        assert!((sharp_constant_suplem(n, 1.0).unwrap() - closed).abs() < 1e-12);
    }
}

#[test]
fn default_checks_pass_for_matched_barriers() {
    let opts = VerifyOptions {
        samples: 2_000,
        fd_samples: 200,
        ..VerifyOptions::default()
    };
    for b in barriers_for_oracle() {
        for row in verify_barrier(&b, &opts).unwrap() {
            assert!(row.pass, "{row:?}");
        }
    }
}

#[test]
fn lower_sup_norm_constant_is_below_upper() {
    // c(n,p) |Omega|^{2/(n+p)} <= C_alpha (diam/2)^{2/(n+p)}
    for &(n, p) in &[(2usize, 1.0), (2, 4.0), (3, 2.0)] {
        let d = Domain::parabola_cap(n, 1.0, 0.0).unwrap();
        let e = 2.0 / (n as f64 + p);
        let lower = sup_norm_lower_constant(n, p) * d.volume().unwrap().powf(e);
        let upper = c_alpha(d.diameter(), e).unwrap() * (d.diameter() / 2.0).powf(e);
        assert!(lower <= upper);
    }
}

fn point_in(d: &Domain, seed: u64, margin: f64) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    sample_interior(d, 1, margin, &mut rng).pop().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn subsolution_and_supersolution_signs(n in 2usize..6, p in 1.0f64..12.0, seed in any::<u64>()) {
        let cap = Domain::parabola_cap(n, 1.0, 0.0).unwrap();
        let x = point_in(&cap, seed, 1e-4);
        let rhs = RhsSpec::power(p).unwrap();
        let v = Barrier::sub_valpha_for_power(&cap, p).unwrap();
        prop_assert!(v.relative_residual(&rhs, &x).unwrap() >= -1e-12);
        let w = Barrier::super_w(n, p).unwrap();
        prop_assert!(w.relative_residual(&rhs, &x).unwrap() <= 1e-12);
        prop_assert!(w.value(&x).unwrap() >= v.value(&x).unwrap());
        prop_assert!(w.eval_jet(&x).unwrap().min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn sphere_cap_supersolution_sign(n in 2usize..6, extra in 0.0f64..8.0, seed in any::<u64>()) {
        let p = n as f64 + 2.0 + extra;
        let w = Barrier::super_w2(n, p).unwrap();
        let x = point_in(w.domain().unwrap(), seed, 1e-4);
        prop_assert!(w.relative_residual(&RhsSpec::power(p).unwrap(), &x).unwrap() <= 1e-12);
    }

    #[test]
    fn affine_sphere_barrier_signs(n in 2usize..6, k in 0.2f64..6.0, gamma in 0.1f64..0.9, seed in any::<u64>()) {
        let rhs = RhsSpec::affine_sphere(k).unwrap();
        let w = Barrier::super_wk(n, k, gamma).unwrap();
        let d = w.domain().unwrap().clone();
        let x = point_in(&d, seed, 1e-4);
        prop_assert!(w.relative_residual(&rhs, &x).unwrap() <= 1e-12);
        let v = Barrier::sub_valpha_k(n, k, gamma, gamma, d.diameter()).unwrap();
        prop_assert!(v.relative_residual(&rhs, &x).unwrap() >= -1e-12);
        prop_assert!(v.support(&x).unwrap() >= v.support_lower_bound(&x).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn removing_the_linear_term_increases_magnitude(n in 2usize..6, p in 1.0f64..12.0, seed in any::<u64>()) {
        let w = Barrier::super_w(n, p).unwrap();
        let x = point_in(w.domain().unwrap(), seed, 1e-4);
        let lin = w.constant() * x[n - 1];
        let wv = w.value(&x).unwrap();
        prop_assert!(wv.abs() <= (wv - lin).abs() + 1e-15);
    }

    #[test]
    fn scaled_supersolution_identities(n in 2usize..5, p in 1.0f64..8.0, t in 0.3f64..3.0, seed in any::<u64>()) {
        let w = Barrier::super_w(n, p).unwrap();
        let wt = Barrier::super_wt(n, p, t).unwrap();
        let x = point_in(wt.domain().unwrap(), seed, 1e-4 * t * t);
        let mut y: Vec<f64> = x.iter().map(|v| v / t).collect();
        y[n - 1] = x[n - 1] / (t * t);
        let nf = n as f64;
        let value_scale = t.powf(2.0 * (nf + 1.0) / (nf + p));
        let det_scale = t.powf(-2.0 * p * (nf + 1.0) / (nf + p));
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        prop_assert!(rel(wt.value(&x).unwrap(), value_scale * w.value(&y).unwrap()) < 1e-10);
        prop_assert!(rel(wt.det_hessian(&x).unwrap(), det_scale * w.det_hessian(&y).unwrap()) < 1e-10);
        prop_assert!(wt.relative_residual(&RhsSpec::power(p).unwrap(), &x).unwrap() <= 1e-12);
    }

    #[test]
    fn jets_are_symmetric(n in 2usize..6, p in 1.0f64..8.0, seed in any::<u64>()) {
        let w = Barrier::super_w(n, p).unwrap();
        let x = point_in(w.domain().unwrap(), seed, 1e-3);
        let h = w.eval_jet(&x).unwrap().hessian;
        prop_assert!((&h - h.transpose()).amax() <= 1e-12 * h.amax());
    }
}
