use genkernel::kernel_dunkl::*;
use genkernel::quadrature::{numeric_laplace, LaplaceOptions};
use genkernel::specfun::{gamma, gegenbauer_weighted, BetaMeasure};
use genkernel::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(r: f64, a: f64) -> DihedralPoint {
    DihedralPoint::new(r, a).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Point pairs with b = r1 r2 <= bmax.
fn pairs(seed: u64, count: usize, bmax: f64) -> Vec<(DihedralPoint, DihedralPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r1 = rng.gen_range(0.2..bmax.sqrt());
            let r2 = rng.gen_range(0.2..bmax.sqrt());
            (pt(r1, rng.gen_range(-3.0..3.0)), pt(r2, rng.gen_range(-3.0..3.0)))
        })
        .collect()
}

fn i4() -> DihedralParams {
    DihedralParams::even(2, 0.5, 0.8).unwrap()
}

#[test]
fn residue_and_pole_power_routes_reproduce_rank_one_and_product_cases() {
    let p1 = DihedralParams::odd(1, 0.5).unwrap();
    let p2 = DihedralParams::even(1, 0.7, 0.3).unwrap();
    for (z1, z2) in pairs(1, 10, 3.0) {
        let want = dunkl_I1(0.5, &z1, &z2).unwrap().value;
        for got in [dunkl_kernel_m1(&p1, &z1, &z2).unwrap(), dunkl_kernel_m2(&p1, &z1, &z2).unwrap()] {
            assert!((got.value - want).norm() < 1e-6, "{}: {} vs {}", got.route, got.value, want);
        }
        let want = dunkl_I2(0.7, 0.3, &z1, &z2).unwrap().value;
        for got in [dunkl_kernel_m1(&p2, &z1, &z2).unwrap(), dunkl_kernel_m2(&p2, &z1, &z2).unwrap()] {
            assert!((got.value - want).norm() < 1e-6, "{}: {} vs {}", got.route, got.value, want);
        }
    }
}

#[test]
fn residue_and_pole_power_routes_agree_on_i3_i4_i6() {
    let groups = [
        DihedralParams::odd(3, 0.7).unwrap(),
        i4(),
        DihedralParams::even(3, 0.4, 0.9).unwrap(),
        DihedralParams::odd(5, 0.35).unwrap(),
    ];
    for p in groups {
        for (z1, z2) in pairs(2 + p.k as u64, 6, 3.0) {
            let a = dunkl_kernel_m1(&p, &z1, &z2).unwrap().value;
            let b = dunkl_kernel_m2(&p, &z1, &z2).unwrap().value;
            assert!((a - b).norm() < 1e-7, "{}: {a} vs {b}", p.name());
            assert!(a.norm() <= 1.0 + 1e-8);
        }
    }
}

#[test]
fn i4_reference_value() {
    let z1 = pt(1.1, 0.4);
    let z2 = pt(1.3, 1.1);
    let want = c(0.8480554438946892, -0.27368937013642564);
    let m2 = dunkl_kernel_m2(&i4(), &z1, &z2).unwrap().value;
    assert!((m2 - want).norm() < 1e-10, "{m2}");
}

#[test]
fn i4_printed_forms_match_each_other_and_the_kernel() {
    for (z1, z2) in pairs(5, 6, 3.0) {
        let a = dunkl_I4(0.5, 0.8, &z1, &z2, I4Variant::A).unwrap().value;
        let b = dunkl_I4(0.5, 0.8, &z1, &z2, I4Variant::B).unwrap().value;
        let m2 = dunkl_kernel_m2(&i4(), &z1, &z2).unwrap().value;
        assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        assert!((b - m2).norm() < 1e-6, "{b} vs {m2}");
    }
}

#[test]
fn rank_one_closed_form_with_real_arguments() {
    let z1 = pt(1.7, 0.0);
    let z2 = pt(0.9, 0.0);
    let v = dunkl_I1(0.5, &z1, &z2).unwrap().value;
    assert!((v - Complex64::from_polar(1.0, -1.7 * 0.9)).norm() < 1e-14);
}

#[test]
fn product_closed_form_swap_symmetry() {
    // alpha = beta: swapping real and imaginary parts of both points
    let (z1, z2) = (pt(1.2, 0.3), pt(0.8, -1.1));
    let swap = |z: &DihedralPoint| DihedralPoint::from_complex(c(z.im(), z.re()));
    let a = dunkl_I2(0.6, 0.6, &z1, &z2).unwrap().value;
    let b = dunkl_I2(0.6, 0.6, &swap(&z1), &swap(&z2)).unwrap().value;
    assert!((a - b).norm() < 1e-13);
}

#[test]
fn every_route_is_one_at_the_origin() {
    let z1 = pt(1.4, 0.3);
    let z0 = pt(0.0, 0.9);
    for p in [DihedralParams::odd(1, 0.5).unwrap(), DihedralParams::odd(3, 0.7).unwrap(), i4()] {
        for e in [
            dunkl_series(&p, &z1, &z0, 1.0, 1e-14).unwrap(),
            dunkl_kernel_m1(&p, &z1, &z0).unwrap(),
            dunkl_kernel_m2(&p, &z1, &z0).unwrap(),
            dunkl_group_average(&p, &z1, &z0, KernelRoute::M2).unwrap(),
        ] {
            assert!((e.value - 1.0).norm() < 1e-8, "{} {}: {}", p.name(), e.route, e.value);
        }
    }
    let closed = [
        dunkl_I1(0.5, &z1, &z0).unwrap(),
        dunkl_I2(0.5, 0.8, &z1, &z0).unwrap(),
        dunkl_I4(0.5, 0.8, &z1, &z0, I4Variant::A).unwrap(),
        dunkl_I4(0.5, 0.8, &z1, &z0, I4Variant::B).unwrap(),
        dunkl_bessel_series(&i4(), &z1, &z0).unwrap(),
        dunkl_bessel_jacobi(&i4(), &z1, &z0).unwrap(),
        dunkl_bessel_I4(0.5, 0.8, &z1, &z0).unwrap(),
    ];
    for e in closed {
        assert!((e.value - 1.0).norm() < 1e-8, "{}: {}", e.route, e.value);
    }
}

#[test]
fn series_matches_pole_power_route() {
    let groups = [
        DihedralParams::odd(1, 0.5).unwrap(),
        DihedralParams::even(1, 0.5, 0.8).unwrap(),
        DihedralParams::odd(3, 0.7).unwrap(),
        i4(),
    ];
    for p in groups {
        for (z1, z2) in pairs(7, 5, 3.0) {
            let s = dunkl_series(&p, &z1, &z2, 1.0, 1e-14).unwrap().value;
            let m2 = dunkl_kernel_m2(&p, &z1, &z2).unwrap().value;
            assert!((s - m2).norm() < 1e-6, "{}: {s} vs {m2}", p.name());
        }
    }
}

#[test]
fn kernel_is_symmetric_in_its_arguments() {
    let p = DihedralParams::odd(3, 0.6).unwrap();
    for (z1, z2) in pairs(9, 5, 3.0) {
        for f in [dunkl_kernel_m1, dunkl_kernel_m2] {
            let a = f(&p, &z1, &z2).unwrap().value;
            let b = f(&p, &z2, &z1).unwrap().value;
            assert!((a - b).norm() < 1e-9);
        }
        let a = dunkl_series(&p, &z1, &z2, 1.0, 1e-14).unwrap().value;
        let b = dunkl_series(&p, &z2, &z1, 1.0, 1e-14).unwrap().value;
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn poisson_kernel_basics() {
    let p = DihedralParams::odd(3, 0.7).unwrap();
    assert!((poisson_dihedral(&p, &pt(0.8, 0.4), &pt(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-14);
    assert!(poisson_dihedral(&p, &pt(1.0, 0.4), &pt(1.0, 0.1)).is_err());
    assert!(poisson_dihedral(&i4(), &pt(0.95, 0.4), &pt(0.9, 1.0)).unwrap() > 0.0);

    // I1, alpha = 1: direct quadrature of the defining integral
    let p1 = DihedralParams::odd(1, 1.0).unwrap();
    let (z1, z2) = (pt(0.7, 0.5), pt(0.9, -1.2));
    let zeta = 0.63f64;
    let th3 = (0.5f64 + 1.2).cos();
    let (ci, cr) = (0.5f64.sin() * (-1.2f64).sin(), 0.5f64.cos() * (-1.2f64).cos());
    let direct = |n: usize| {
        let rule = BetaMeasure::asymmetric(1.0).unwrap().rule(n).unwrap();
        let inner = rule.integrate_real(|u| (1.0 - zeta * zeta) / (1.0 - 2.0 * zeta * (ci * u + cr) + zeta * zeta).powi(2));
        (1.0 - 2.0 * (ci + cr) * zeta + zeta * zeta) / (1.0 - 2.0 * th3 * zeta + zeta * zeta) * inner
    };
    let (d64, d256) = (direct(64), direct(256));
    assert!((d64 - d256).abs() < 1e-12);
    assert!((poisson_dihedral(&p1, &z1, &z2).unwrap() - d256).abs() < 1e-9);
}

#[test]
fn poisson_coefficients_sum_to_the_kernel() {
    for p in [DihedralParams::odd(3, 0.7).unwrap(), i4()] {
        let (w, e) = (DihedralPoint::unit(0.3), DihedralPoint::unit(-0.9));
        let pc = poisson_coefficients(&p, &w, &e, 40).unwrap();
        assert!((pc.values[0] - 1.0).abs() < 1e-12);
        assert!(pc.imag_residue < 1e-8);
        let zeta: f64 = 0.3;
        let sum: f64 = pc.values.iter().enumerate().map(|(j, v)| v * zeta.powi(j as i32)).sum();
        let direct = poisson_dihedral(&p, &pt(zeta, 0.3), &pt(1.0, -0.9)).unwrap();
        assert!((sum - direct).abs() < 1e-9, "{sum} vs {direct}");
        let doubled = poisson_coefficients_with(&p, &w, &e, 40, 640).unwrap();
        for (a, b) in pc.values.iter().zip(&doubled.values).take(20) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn rank_one_poisson_coefficients_match_intertwining_integral() {
    // P_j = (j + alpha)/alpha int C_j^alpha(Re w Re e + u Im w Im e) dmu_alpha(u)
    let alpha = 0.6;
    let p = DihedralParams::odd(1, alpha).unwrap();
    let (a1, a2): (f64, f64) = (0.4, 2.1);
    let pc = poisson_coefficients(&p, &DihedralPoint::unit(a1), &DihedralPoint::unit(a2), 30).unwrap();
    let rule = BetaMeasure::asymmetric(alpha).unwrap().rule(64).unwrap();
    for (j, &got) in pc.values.iter().enumerate().take(16) {
        let want = rule.integrate_real(|u| {
            gegenbauer_weighted(j, alpha, a1.cos() * a2.cos() + u * a1.sin() * a2.sin()).unwrap()
        });
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "j = {j}: {got} vs {want}");
    }
}

#[test]
fn laplace_rank_one_reduction() {
    let alpha = 0.5;
    let p = DihedralParams::odd(1, alpha).unwrap();
    let (z1, z2) = (pt(1.2, 0.7), pt(1.1, -0.4));
    let b = 1.2 * 1.1;
    let (ci, cr) = (0.7f64.sin() * (-0.4f64).sin(), 0.7f64.cos() * (-0.4f64).cos());
    let s = c(4.0, 1.5);
    let rule = BetaMeasure::asymmetric(alpha).unwrap().rule(80).unwrap();
    let want = rule.integrate(|u| (s + c(0.0, b * (ci * u + cr))).powf(-(alpha + 1.0))) * gamma(alpha + 1.0);
    let got = laplace_dunkl(&p, &z1, &z2, s).unwrap();
    assert!((got - want).norm() < 1e-12 * want.norm());
    assert!(laplace_dunkl(&p, &z1, &z2, c(2.0, 0.0)).is_err());
}

#[test]
fn laplace_matches_transform_of_the_series() {
    for p in [DihedralParams::odd(3, 0.7).unwrap(), i4()] {
        let (z1, z2) = (pt(1.1, 0.4), pt(1.3, 1.1));
        let s = c(8.0, 0.0);
        let closed = laplace_dunkl(&p, &z1, &z2, s).unwrap();
        let opts = LaplaceOptions { bound: 2.0 * gamma(p.kappa + 1.0) * 10f64.powf(p.kappa), rate: 1.0, origin_exp: p.kappa + 1.0 };
        let num = numeric_laplace(|t| dunkl_series(&p, &z1, &z2, t, 1e-15).unwrap().value, s, opts, 1e-9).unwrap();
        assert!((num.value - closed).norm() < 1e-7, "{}: {} vs {}", p.name(), num.value, closed);
    }
}

#[test]
fn q11_identity_and_shift_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [DihedralParams::odd(3, 0.7).unwrap(), i4(), DihedralParams::even(3, 0.4, 0.9).unwrap()] {
        for _ in 0..20 {
            let z1 = pt(rng.gen_range(0.3..1.5), rng.gen_range(-3.0..3.0));
            let z2 = pt(rng.gen_range(0.3..1.5), rng.gen_range(-3.0..3.0));
            let inv = PairInvariants::new(&p, &z1, &z2);
            let k = p.k;
            let wk = z1.omega().powu(k) * z2.omega().powu(k).conj();
            assert!((wk.re - inv.c11).abs() < 1e-14);

            let s = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (u, v) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let cuv = inv.c(u, v);
            let g = p.gamma_total();
            let bs = s + c(0.0, inv.b * inv.theta3);
            let a = |cc: f64| dihedral_a(s, inv.b, k, cc);
            let lhs = a(inv.c11) / (bs * a(cuv).powf(g + 1.0));
            let rhs = 1.0 / (bs * a(cuv).powf(g))
                + c(0.0, -inv.b).powu(k) * inv.c_shift(u, v) / (2f64.powi(k as i32 - 1) * bs * a(cuv).powf(g + 1.0));
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm(), "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn g_alpha_single_pole() {
    let (t, q, alpha, b) = (0.8, 0.9, 0.6, 1.7);
    let got = g_alpha(t, q, 1, alpha, b).unwrap();
    let want = Complex64::from_polar(t.powf(alpha - 1.0) / gamma(alpha), -b * q.cos() * t);
    assert!((got.value - want).norm() < 1e-9, "{} vs {want}", got.value);
    assert!(got.partial_fraction.is_none());
}

#[test]
fn g_alpha_two_poles_by_hand() {
    // 1/((s + i b c1)(s + i b c2)) with c1,2 = cos(q/2), cos(q/2 + pi)
    let (t, q, b): (f64, f64, f64) = (1.0, 1.3, 2.2);
    let (p1, p2) = (c(0.0, -b * (q / 2.0).cos()), c(0.0, b * (q / 2.0).cos()));
    let want = ((p1 * t).exp() - (p2 * t).exp()) / (p1 - p2);
    let got = g_alpha(t, q, 2, 1.0, b).unwrap();
    assert!((got.value - want).norm() < 1e-8, "{} vs {want}", got.value);
    assert!((got.partial_fraction.unwrap() - want).norm() < 1e-12);
}

#[test]
fn g_alpha_routes_and_bound() {
    for &(k, alpha, b) in &[(2u32, 0.7, 1.5), (3, 0.45, 2.0), (4, 1.3, 1.0), (3, 2.0, 2.5)] {
        for &t in &[0.3, 1.0] {
            let q = 0.8;
            let ml = g_alpha(t, q, k, alpha, b).unwrap();
            let series = g_alpha_series(t, q, k, alpha, b).unwrap();
            assert!((ml.value - series).norm() < 1e-6, "k={k}: {} vs {series}", ml.value);
            if let Some(pf) = ml.partial_fraction {
                assert!((pf - series).norm() < 1e-10);
            }
            let ka = k as f64 * alpha;
            assert!(series.norm() <= t.powf(ka - 1.0) / gamma(ka) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn bessel_series_matches_closed_form_group_average_and_jacobi_series() {
    let p = i4();
    let (z1, z2) = (pt(1.1, 0.3), pt(1.3, 0.2));
    let want = 0.8658245173021919;
    let series = dunkl_bessel_series(&p, &z1, &z2).unwrap();
    let closed = dunkl_bessel_I4(0.5, 0.8, &z1, &z2).unwrap();
    let jac = dunkl_bessel_jacobi(&p, &z1, &z2).unwrap();
    let avg = dunkl_group_average(&p, &z1, &z2, KernelRoute::M2).unwrap();
    for v in [series.value, closed.value, jac.value, avg.value] {
        assert!((v - want).norm() < 1e-9, "{v}");
    }
    for (z1, z2) in pairs(13, 8, 3.0) {
        let s = dunkl_bessel_series(&p, &z1, &z2).unwrap().value;
        let cl = dunkl_bessel_I4(0.5, 0.8, &z1, &z2).unwrap().value;
        let avg = dunkl_group_average(&p, &z1, &z2, KernelRoute::M2).unwrap().value;
        assert!((s - cl).norm() < 1e-7, "{s} vs {cl}");
        assert!((s - avg).norm() < 1e-7, "{s} vs {avg}");
    }
}

#[test]
fn bessel_series_on_i6_and_i2() {
    let (z1, z2) = (pt(1.1, 0.3), pt(1.3, 0.2));
    let p6 = DihedralParams::even(3, 0.4, 0.9).unwrap();
    let s = dunkl_bessel_series(&p6, &z1, &z2).unwrap().value;
    assert!((s - 0.9000788055).norm() < 1e-9, "{s}");
    let j = dunkl_bessel_jacobi(&p6, &z1, &z2).unwrap().value;
    assert!((s - j).norm() < 1e-10);
    let p2 = DihedralParams::even(1, 0.6, 0.3).unwrap();
    for (z1, z2) in pairs(17, 4, 3.0) {
        let s = dunkl_bessel_series(&p2, &z1, &z2).unwrap().value;
        let avg = dunkl_group_average(&p2, &z1, &z2, KernelRoute::M1).unwrap().value;
        assert!((s - avg).norm() < 1e-7, "{s} vs {avg}");
    }
}

#[test]
fn bessel_function_is_bounded_and_group_invariant() {
    let p = i4();
    let z1 = pt(1.2, 0.35);
    for i in 0..6 {
        for j in 0..6 {
            let z2 = pt(0.4 * (i as f64 + 0.5), 0.3 * j as f64);
            let d = dunkl_bessel_series(&p, &z1, &z2).unwrap().value;
            assert!(d.norm() <= 1.0 + 1e-8);
        }
    }
    let z2 = pt(1.4, 0.6);
    let base = dunkl_group_average(&p, &z1, &z2, KernelRoute::M2).unwrap().value;
    for g in group_images(&p, &z2) {
        let moved = dunkl_group_average(&p, &z1, &g, KernelRoute::M2).unwrap().value;
        assert!((moved - base).norm() < 1e-12, "{moved} vs {base}");
    }
}

#[test]
fn bessel_branch_laplace_pair() {
    let p = i4();
    let (b, zarg) = (1.3, 0.35);
    let s = c(6.0, 1.0);
    for plus in [true, false] {
        let closed = bessel_branch_laplace(&p, b, zarg, plus, s).unwrap();
        let opts = LaplaceOptions { bound: 2.0 * gamma(p.kappa + 1.0) * 10f64.powf(p.kappa), rate: 1.0, origin_exp: p.kappa + 1.0 };
        let num = numeric_laplace(|t| bessel_branch_series(&p, b, zarg, plus, t).unwrap(), s, opts, 1e-10).unwrap();
        assert!((num.value - closed).norm() < 1e-8, "{} vs {closed}", num.value);
    }
}

#[test]
fn dispatch_reports_routes() {
    let (z1, z2) = (pt(1.0, 0.2), pt(0.9, 0.7));
    let p = i4();
    assert_eq!(dunkl_evaluate(&p, &z1, &z2, DunklMethod::Closed).unwrap().route, DunklRoute::ClosedI4B);
    assert_eq!(dunkl_evaluate(&p, &z1, &z2, DunklMethod::Auto).unwrap().route, DunklRoute::PolePower);
    let p3 = DihedralParams::odd(3, 0.5).unwrap();
    assert!(dunkl_evaluate(&p3, &z1, &z2, DunklMethod::Closed).is_err());
    assert!(dunkl_bessel_evaluate(&p3, &z1, &z2, BesselMethod::Series).is_err());
    assert_eq!(dunkl_bessel_evaluate(&p3, &z1, &z2, BesselMethod::Auto).unwrap().route, DunklRoute::AveragePolePower);
    assert!("bogus".parse::<DunklMethod>().is_err());
    assert_eq!("average".parse::<BesselMethod>().unwrap(), BesselMethod::AverageM2);
    assert!(dunkl_kernel_m2(&p, &pt(3.0, 0.0), &pt(2.0, 0.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn odd_kernel_symmetric_and_bounded(r1 in 0.1f64..1.7, a1 in -3.0f64..3.0, r2 in 0.1f64..1.7, a2 in -3.0f64..3.0, alpha in 0.2f64..2.0) {
        let p = DihedralParams::odd(3, alpha).unwrap();
        let (z1, z2) = (pt(r1, a1), pt(r2, a2));
        let e12 = dunkl_kernel_m2(&p, &z1, &z2).unwrap().value;
        let e21 = dunkl_kernel_m2(&p, &z2, &z1).unwrap().value;
        prop_assert!((e12 - e21).norm() < 1e-9);
        prop_assert!(e12.norm() <= 1.0 + 1e-8);
    }

    #[test]
    fn i4_bessel_is_real_and_bounded(r1 in 0.1f64..1.7, a1 in -3.0f64..3.0, r2 in 0.1f64..1.7, a2 in -3.0f64..3.0) {
        let d = dunkl_bessel_I4(0.5, 0.8, &pt(r1, a1), &pt(r2, a2)).unwrap().value;
        prop_assert!(d.im == 0.0 && d.re.abs() <= 1.0 + 1e-8);
    }
}
