use approx::assert_abs_diff_eq;
use genkernel::quadrature::{convolve_on_interval, gauss_jacobi_rule, integrate_measure, numeric_laplace, ConvolutionHints, LaplaceOptions};
use genkernel::specfun::*;
use genkernel::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// (nu, x, J_nu(x)) computed with 40-digit arithmetic.
const BESSEL_TABLE: &[(f64, f64, f64)] = &[
    (-0.75, 0.1, 2.5824445280334728228),
    (-0.75, 1.0, 0.044701115814504631055),
    (-0.75, 3.9, -0.15084650471900221608),
    (-0.75, 4.1, -0.071836474646049751527),
    (-0.75, 8.0, -0.14957166140865285266),
    (-0.75, 12.0, 0.22748429177077274188),
    (-0.75, 20.0, 0.0035419186089718080675),
    (-0.75, 35.0, -0.090060418831666291583),
    (-0.75, 50.0, 0.11188427782016409755),
    (-0.3, 0.1, 1.8856587867457046929),
    (-0.3, 1.0, 0.63387072636938467865),
    (-0.3, 3.9, -0.36730565199288404035),
    (-0.3, 4.1, -0.31879728883552675954),
    (-0.3, 8.0, 0.049935466303370080517),
    (-0.3, 12.0, 0.14543749336803332779),
    (-0.3, 20.0, 0.12009245322630804481),
    (-0.3, 35.0, -0.13379296003528439262),
    (-0.3, 50.0, 0.094306356939065133328),
    (0.0, 0.1, 0.997501562066040032),
    (0.0, 1.0, 0.76519768655796655145),
    (0.0, 3.9, -0.40182601488763990745),
    (0.0, 4.1, -0.38866967983585371972),
    (0.0, 8.0, 0.17165080713755390609),
    (0.0, 12.0, 0.047689310796833536624),
    (0.0, 20.0, 0.16702466434058315473),
    (0.0, 35.0, -0.12684568275631256981),
    (0.0, 50.0, 0.055812327669251815005),
    (0.5, 0.1, 0.25189294032600095267),
    (0.5, 1.0, 0.67139670714180309042),
    (0.5, 3.9, -0.2778744147279186861),
    (0.5, 4.1, -0.322439720735305897),
    (0.5, 8.0, 0.27909280857099206145),
    (0.5, 12.0, -0.12358853595594194375),
    (0.5, 20.0, 0.16288076385502987091),
    (0.5, 35.0, -0.05774775758945884623),
    (0.5, 50.0, -0.029605831888924612568),
    (1.0, 0.1, 0.049937526036242000321),
    (1.0, 1.0, 0.44005058574493351596),
    (1.0, 3.9, -0.027244039620779891184),
    (1.0, 4.1, -0.10327325774733857266),
    (1.0, 8.0, 0.23463634685391462438),
    (1.0, 12.0, -0.22344710449062761237),
    (1.0, 20.0, 0.066833124175850045579),
    (1.0, 35.0, 0.04399094217962563997),
    (1.0, 50.0, -0.097511828125175137661),
    (2.5, 0.1, 0.00016808871900334129365),
    (2.5, 1.0, 0.049496810228477942271),
    (2.5, 3.9, 0.44867797200534363488),
    (2.5, 4.1, 0.43063279890490304753),
    (2.5, 8.0, -0.25061853251660191009),
    (2.5, 12.0, 0.072422673831809521857),
    (2.5, 20.0, -0.17258019384387642416),
    (2.5, 35.0, 0.068053050451804672518),
    (2.5, 50.0, 0.023037219509625530445),
    (7.3, 0.1, 3.4256033750586840514e-14),
    (7.3, 1.0, 6.6338472310364560484e-7),
    (7.3, 3.9, 0.0088198063375923648125),
    (7.3, 4.1, 0.012074806497886308529),
    (7.3, 8.0, 0.29534400148195004452),
    (7.3, 12.0, -0.11210494425320046838),
    (7.3, 20.0, -0.17439710031283123753),
    (7.3, 35.0, -0.0073601619904674657453),
    (7.3, 50.0, 0.094897252152234047355),
    (20.0, 0.1, 3.9194377208586220087e-45),
    (20.0, 1.0, 3.8735030085246577189e-25),
    (20.0, 3.9, 2.1657195887442691707e-13),
    (20.0, 4.1, 5.7761978877861398893e-13),
    (20.0, 8.0, 2.0805829639717027777e-7),
    (20.0, 12.0, 0.00025121327024539953203),
    (20.0, 20.0, 0.16474777377532653234),
    (20.0, 35.0, -0.10927417397178036524),
    (20.0, 50.0, -0.11670435275957973734),
    (45.5, 0.1, 7.8541862551140185343e-117),
    (45.5, 1.0, 2.4705263846670048821e-71),
    (45.5, 3.9, 1.7906860281995729583e-44),
    (45.5, 4.1, 1.7278365060507083394e-43),
    (45.5, 8.0, 2.1663960683205995298e-30),
    (45.5, 12.0, 1.4415944382948979321e-22),
    (45.5, 20.0, 4.3203311231474141621e-13),
    (45.5, 35.0, 0.00034894720597328954649),
    (45.5, 50.0, 0.1558423420385698499),
];

#[test]
fn bessel_matches_reference_table() {
    for &(nu, x, expect) in BESSEL_TABLE {
        let v = bessel_j(nu, x).unwrap();
        assert!((v - expect).abs() <= 1e-13, "J_{nu}({x}) = {v}, expected {expect}");
    }
}

#[test]
fn bessel_half_integer_closed_forms() {
    for i in 1..=250 {
        let x = 0.2 * i as f64;
        let s = (2.0 / (PI * x)).sqrt();
        let (sn, cs) = x.sin_cos();
        let forms = [
            (-0.5, s * cs),
            (0.5, s * sn),
            (1.5, s * (sn / x - cs)),
            (2.5, s * ((3.0 / (x * x) - 1.0) * sn - 3.0 * cs / x)),
        ];
        for (nu, expect) in forms {
            let v = bessel_j(nu, x).unwrap();
            assert!((v - expect).abs() <= 1e-12, "J_{nu}({x}): {v} vs {expect}");
        }
    }
}

// (eps, gamma, delta, z, E(z))
const ML_TABLE: &[(f64, f64, f64, (f64, f64), (f64, f64))] = &[
    (0.5, 1.0, 1.0, (1.2, 0.5), (2.0308637557042347731, 6.2307717153585004795)),
    (2.5, 0.8, 1.7, (-3.0, 4.0), (-1.1943277336189907844, 1.9046675901643799667)),
    (1.5, 2.0, 0.3, (0.0, -6.0), (0.73803126750046871758, -0.43619605555814874243)),
    (0.75, 0.4, 2.2, (2.0, 1.0), (-166.98667165126624375, 108.6616884136482056)),
    (3.0, 1.5, 1.0, (-10.0, 0.0), (0.32122522839323382019, 0.0)),
];

#[test]
fn mittag_leffler_reference_values() {
    for &(eps, gam, delta, (zr, zi), (er, ei)) in ML_TABLE {
        let spec = MLSpec::new(eps, gam, delta, c(zr, zi)).unwrap();
        let v = mittag_leffler(&spec, 1.0).unwrap();
        let e = c(er, ei);
        assert!((v - e).norm() <= 1e-11 * e.norm().max(1.0), "E({zr},{zi}) = {v}, expected {e}");
    }
}

#[test]
fn mittag_leffler_exponential_collapse() {
    for i in 0..40 {
        let theta = 2.0 * PI * i as f64 / 40.0;
        for &r in &[0.5, 5.0, 12.0, 20.0] {
            let beta = Complex64::from_polar(r, theta);
            let spec = MLSpec::new(1.0, 1.0, 1.0, beta).unwrap();
            let v = mittag_leffler(&spec, 1.0).unwrap();
            let e = beta.exp();
            // relative to the largest partial sum, exp(|beta t|)
            assert!((v - e).norm() <= 1e-11 * r.exp(), "beta = {beta}: {v} vs {e}");
            // no cancellation in the series near the positive real axis
            if r * (1.0 - theta.cos()) < 1.0 {
                assert!((v - e).norm() <= 1e-11 * e.norm(), "{beta}: {}", (v - e).norm() / e.norm());
            }
        }
    }
}

#[test]
fn mittag_leffler_laplace_pair() {
    let (eps, gam, delta) = (1.5, 0.7, 1.3);
    let b = c(0.5, 0.3);
    let spec = MLSpec::new(eps, gam, delta, b).unwrap();
    let s = c(3.0, 0.5);
    let opts = LaplaceOptions {
        bound: 3.0,
        rate: b.norm().powf(1.0 / eps),
        origin_exp: gam,
    };
    let r = numeric_laplace(
        |t| mittag_leffler(&spec, t).unwrap() * t.powf(gam - 1.0),
        s,
        opts,
        1e-9,
    )
    .unwrap();
    let one = c(1.0, 0.0);
    let expect = s.powf(-gam) * (one - b * s.powf(-eps)).powf(-delta);
    assert!((r.value - expect).norm() <= 1e-6, "{} vs {}", r.value, expect);
}

#[test]
fn bessel_laplace_pair() {
    let (b, s) = (3.0, c(2.0, 1.0));
    let r = numeric_laplace(|t| c(bessel_j(0.0, b * t).unwrap(), 0.0), s, LaplaceOptions::default(), 1e-10).unwrap();
    let expect = (s * s + b * b).sqrt().inv();
    assert!((r.value - expect).norm() <= 1e-8);
}

// (c1, c2, c3, w, z, Phi2)
const PHI2_TABLE: &[(f64, f64, f64, (f64, f64), (f64, f64), (f64, f64))] = &[
    (0.5, 1.5, 2.0, (1.0, -1.0), (-2.0, 0.5), (0.35386781105997879446, -0.086731172265893448117)),
    (1.0, 1.0, 3.0, (0.0, -1.0), (0.0, -2.0), (0.4967514482834218218, -0.77364454279011131791)),
    (2.3, 0.7, 1.1, (3.0, 0.0), (-4.0, 2.0), (55.867780095348949563, 9.7348360076470292311)),
];

#[test]
fn humbert_reference_values() {
    for &(c1, c2, c3, (wr, wi), (zr, zi), (er, ei)) in PHI2_TABLE {
        let v = humbert_phi2(c1, c2, c3, c(wr, wi), c(zr, zi)).unwrap();
        let e = c(er, ei);
        assert!((v - e).norm() <= 1e-10 * e.norm(), "{v} vs {e}");
    }
    assert!(humbert_phi2(1.0, 1.0, 2.0, c(25.0, 0.0), c(0.0, 0.0)).is_err());
}

fn hyp1f1(a: f64, b: f64, z: Complex64) -> Complex64 {
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    for n in 0..400 {
        let nf = n as f64;
        term *= z * ((a + nf) / ((b + nf) * (nf + 1.0)));
        sum += term;
    }
    sum
}

#[test]
fn humbert_reduces_to_confluent() {
    for &(a, b, w) in &[(0.5, 1.5, c(2.0, -1.0)), (1.3, 2.7, c(-6.0, 0.0)), (2.0, 0.4, c(0.0, 3.0))] {
        let v = humbert_phi2(a, 0.9, b, w, c(0.0, 0.0)).unwrap();
        let e = hyp1f1(a, b, w);
        assert!((v - e).norm() <= 1e-12 * e.norm().max(1.0));
    }
}

/// The three-pole inverse transform in Phi2 form against nested numeric convolution.
fn three_pole_check(k: f64) {
    let a = [1.0, 2.0, 3.0];
    let t = 1.0;
    let factor = |aj: f64| move |tau: f64| Complex64::from_polar(tau.powf(k - 1.0) * rgamma(k), -aj * tau);
    let hints = ConvolutionHints { f_exp: k, g_exp: k };
    let f2 = |tau: f64| {
        convolve_on_interval(factor(a[0]), factor(a[1]), tau, hints, 1e-13)
            .unwrap()
            .value
    };
    let nested = convolve_on_interval(
        f2,
        factor(a[2]),
        t,
        ConvolutionHints { f_exp: 2.0 * k, g_exp: k },
        1e-11,
    )
    .unwrap()
    .value;
    let phi = humbert_phi2(k, k, 3.0 * k, c(0.0, (a[0] - a[1]) * t), c(0.0, (a[0] - a[2]) * t)).unwrap();
    let closed = phi * Complex64::from_polar(t.powf(3.0 * k - 1.0) * rgamma(3.0 * k), -a[0] * t);
    assert!((closed - nested).norm() <= 1e-7, "k = {k}: {closed} vs {nested}");
}

#[test]
fn humbert_three_pole_identity() {
    three_pole_check(1.0);
    three_pole_check(0.6);
}

#[test]
fn poisson_gegenbauer_generating_identity() {
    for &lambda in &[0.5, 1.0, 2.0] {
        for &xi in &[-1.0, -0.6, 0.0, 0.35, 1.0] {
            for i in 0..8 {
                let zc = Complex64::from_polar(0.9, PI * i as f64 / 8.0 + 0.1);
                let closed = poisson_gegenbauer_sum(lambda, xi, zc).unwrap();
                let w = gegenbauer_weighted_seq(1200, lambda, xi).unwrap();
                let mut sum = c(0.0, 0.0);
                let mut p = c(1.0, 0.0);
                for wj in w {
                    sum += p * wj;
                    p *= zc;
                }
                assert!((sum - closed).norm() <= 1e-10 * closed.norm().max(1.0), "lambda {lambda} xi {xi} z {zc}");
            }
        }
    }
}

#[test]
fn gegenbauer_bound_on_grid() {
    for &lambda in &[0.5, 1.0, 2.5] {
        for i in 0..=40 {
            let xi = -1.0 + i as f64 / 20.0;
            let mut bound = 1.0;
            for j in 0..=60 {
                if j > 0 {
                    bound *= (2.0 * lambda + j as f64 - 1.0) / j as f64;
                }
                let v = gegenbauer(j, lambda, xi);
                assert!(v.abs() <= bound * (1.0 + 1e-12), "C_{j}^{lambda}({xi})");
            }
        }
    }
}

#[test]
fn jacobi_orthonormality() {
    for &(a, b) in &[(0.5, 0.5), (-0.3, 0.8), (1.7, -0.6)] {
        let mut rule = gauss_jacobi_rule(40, b, a).unwrap();
        let mass: f64 = rule.weights.iter().sum();
        rule.weights.iter_mut().for_each(|w| *w /= mass);
        for i in 0..6 {
            for j in 0..6 {
                let v = rule.integrate_real(|x| jacobi_orthonormal(i, a, b, x).unwrap() * jacobi_orthonormal(j, a, b, x).unwrap());
                let e = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v, e, epsilon = 1e-12);
            }
        }
    }
    // Explicit norm: for a = b = 1/2, P_1 = 3x/2 and h_1/mass = 9/16, so p_1 = 2x.
    assert_abs_diff_eq!(jacobi_orthonormal(1, 0.5, 0.5, 0.3).unwrap(), 0.6, epsilon = 1e-14);
    assert_abs_diff_eq!(jacobi_orthonormal(1, 0.5, 0.5, 0.0).unwrap(), 0.0, epsilon = 1e-15);
}

#[test]
fn beta_measures_are_probability_measures() {
    for &alpha in &[0.1, 0.5, 0.8, 1.0, 2.3, 6.0] {
        for m in [BetaMeasure::asymmetric(alpha).unwrap(), BetaMeasure::symmetric(alpha).unwrap()] {
            let r = integrate_measure(|_| c(1.0, 0.0), &m, 1e-13).unwrap();
            assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-12);
            let mean = integrate_measure(|u| c(u, 0.0), &m, 1e-13).unwrap().value.re;
            let expect = match m.kind {
                MeasureKind::Symmetric => 0.0,
                MeasureKind::Asymmetric => 1.0 / (2.0 * alpha + 1.0),
            };
            assert_abs_diff_eq!(mean, expect, epsilon = 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn bessel_three_term_recurrence(nu in 1.0f64..30.0, x in 0.05f64..50.0) {
        let jm = bessel_j(nu - 1.0, x).unwrap();
        let j0 = bessel_j(nu, x).unwrap();
        let jp = bessel_j(nu + 1.0, x).unwrap();
        let lhs = jm + jp;
        let rhs = 2.0 * nu / x * j0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + 2.0 * nu / x));
    }

    #[test]
    fn bessel_bounded_by_one(nu in 0.0f64..40.0, x in 0.0f64..50.0) {
        prop_assert!(bessel_j(nu, x).unwrap().abs() <= 1.0 + 1e-13);
    }

    #[test]
    fn gegenbauer_bound_random(j in 0usize..60, lambda in 0.05f64..4.0, xi in -1.0f64..1.0) {
        let bound = pochhammer(2.0 * lambda, j) / (1..=j).map(|i| i as f64).product::<f64>();
        prop_assert!(gegenbauer(j, lambda, xi).abs() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn ml_first_order_recurrence(gam in 0.2f64..3.0, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        // E_{1,gamma}(z) = z E_{1,gamma+1}(z) + 1/Gamma(gamma)
        let z = c(re, im);
        let lhs = ml_series(1.0, gam, 1.0, z).unwrap();
        let rhs = z * ml_series(1.0, gam + 1.0, 1.0, z).unwrap() + rgamma(gam);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * ml_series(1.0, gam, 1.0, c(z.norm(), 0.0)).unwrap().norm());
    }
}
