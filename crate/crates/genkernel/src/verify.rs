//! Self-contained verification suites: every check compares two independent
//! routes (or a route and an identity) on a deterministic sample and reports
//! the largest discrepancy against its budget.

use crate::error::{domain, Error, Result};
use crate::kernel_dunkl::{
    dihedral_a, dunkl_I1, dunkl_I2, dunkl_I4, dunkl_bessel_I4, dunkl_bessel_series, dunkl_group_average,
    dunkl_kernel_m1, dunkl_kernel_m2, dunkl_series, group_images, laplace_dunkl, DihedralParams, DihedralPoint,
    I4Variant, KernelRoute, PairInvariants,
};
use crate::kernel_fourier::{
    bound_scan, kernel_a1, kernel_a2, kernel_halfint_any, kernel_halfint_even, kernel_halfint_m2, kernel_integral_ml,
    laplace_kernel, series_kernel, FourierParams, Method, ScanGrid,
};
use crate::laplace_rational::{
    brugia_derivative, inverse_laplace_rational, partial_fraction_expand, pn_coefficients, pn_poles, pn_scale,
    poly_derivative, qn1_roots, rational_eval, GeomInvariants, PoleSet,
};
use crate::quadrature::{convolve_on_interval, numeric_laplace, ConvolutionHints, LaplaceOptions};
use crate::specfun::{
    bessel_j, gamma, gegenbauer_weighted_seq, humbert_phi2, mittag_leffler, poisson_gegenbauer_sum, rgamma, MLSpec,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Specfun,
    Laplace,
    Fourier,
    Dunkl,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Laplace => "laplace",
            Suite::Fourier => "fourier",
            Suite::Dunkl => "dunkl",
            Suite::All => "all",
        }
    }

    fn contains(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "specfun" => Ok(Suite::Specfun),
            "laplace" => Ok(Suite::Laplace),
            "fourier" => Ok(Suite::Fourier),
            "dunkl" => Ok(Suite::Dunkl),
            "all" => Ok(Suite::All),
            _ => domain(format!("unknown suite '{s}' (specfun, laplace, fourier, dunkl, all)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// Outcome of one check. `max_error` is infinite when a route failed outright;
/// `message` then carries the error.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub max_error: f64,
    pub budget: f64,
    pub samples: usize,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn pass_count(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Pass).count()
    }

    pub fn fail_count(&self) -> usize {
        self.checks.len() - self.pass_count()
    }

    pub fn passed(&self) -> bool {
        self.fail_count() == 0
    }
}

/// Budget overrides by check name; unnamed checks keep their defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyOptions {
    pub overrides: BTreeMap<String, f64>,
}

/// Accumulates the largest discrepancy seen by a check.
#[derive(Debug, Default)]
pub struct Probe {
    max_error: f64,
    samples: usize,
}

impl Probe {
    pub fn record(&mut self, err: f64) {
        self.samples += 1;
        // NaN must not hide behind max
        self.max_error = if err.is_nan() { f64::INFINITY } else { self.max_error.max(err) };
    }

    pub fn compare(&mut self, a: Complex64, b: Complex64) {
        self.record((a - b).norm());
    }
}

type CheckFn = fn(&mut Probe) -> Result<()>;

/// A named check with its default budget.
#[derive(Clone, Copy)]
pub struct CheckSpec {
    pub name: &'static str,
    pub suite: Suite,
    pub budget: f64,
    run: CheckFn,
}

impl fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CheckSpec({}, {}, {:e})", self.name, self.suite, self.budget)
    }
}

impl CheckSpec {
    pub fn run(&self, opts: &VerifyOptions) -> Check {
        let budget = opts.overrides.get(self.name).copied().unwrap_or(self.budget);
        let mut probe = Probe::default();
        let outcome = (self.run)(&mut probe);
        let (max_error, message) = match outcome {
            Ok(()) => (probe.max_error, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        Check {
            name: self.name.to_string(),
            status: if max_error <= budget { Status::Pass } else { Status::Fail },
            max_error,
            budget,
            samples: probe.samples,
            message,
        }
    }
}

macro_rules! check {
    ($name:expr, $suite:ident, $budget:expr, $f:path) => {
        CheckSpec { name: $name, suite: Suite::$suite, budget: $budget, run: $f }
    };
}

/// Every check, in report order.
pub fn registry() -> Vec<CheckSpec> {
    vec![
        check!("bessel-half-integer", Specfun, 1e-12, bessel_half_integer),
        check!("bessel-recurrence", Specfun, 1e-12, bessel_recurrence),
        check!("ml-exp-collapse", Specfun, 1e-11, ml_exp_collapse),
        check!("ml-laplace-pair", Specfun, 1e-6, ml_laplace_pair),
        check!("phi2-convolution", Specfun, 1e-6, phi2_convolution),
        check!("gegenbauer-generating", Specfun, 1e-10, gegenbauer_generating),
        check!("pn-derivative", Laplace, 1e-12, pn_derivative),
        check!("pn-roots", Laplace, 1e-9, pn_roots),
        check!("brugia-finite-difference", Laplace, 1e-6, brugia_finite_difference),
        check!("partial-fraction-pair", Laplace, 1e-13, partial_fraction_pair),
        check!("classical-series", Fourier, 1e-9, classical_series),
        check!("classical-closed", Fourier, 1e-9, classical_closed),
        check!("classical-integral", Fourier, 1e-5, classical_integral),
        check!("a1-closed", Fourier, 1e-9, a1_closed),
        check!("halfint-m2", Fourier, 1e-8, halfint_m2),
        check!("halfint-even", Fourier, 1e-6, halfint_even),
        check!("halfint-convolution", Fourier, 1e-5, halfint_convolution),
        check!("bound-scan", Fourier, 1e-8, fourier_bound_scan),
        check!("ml-integral", Fourier, 1e-5, ml_integral),
        check!("laplace-consistency", Fourier, 1e-6, fourier_laplace_consistency),
        check!("closed-i1", Dunkl, 1e-5, dunkl_closed_i1),
        check!("closed-i2", Dunkl, 1e-5, dunkl_closed_i2),
        check!("m1-m2-i3", Dunkl, 1e-5, dunkl_m1_m2_i3),
        check!("m1-m2-i4", Dunkl, 1e-5, dunkl_m1_m2_i4),
        check!("normalization", Dunkl, 1e-8, dunkl_normalization),
        check!("shift-identity", Dunkl, 1e-12, dunkl_shift_identity),
        check!("dunkl-laplace", Dunkl, 1e-5, dunkl_laplace),
        check!("series-oracle", Dunkl, 1e-4, dunkl_series_oracle),
        check!("bessel-closed", Dunkl, 1e-7, bessel_closed),
        check!("bessel-average", Dunkl, 1e-5, bessel_average),
        check!("bessel-bound", Dunkl, 1e-8, bessel_bound),
        check!("bessel-invariance", Dunkl, 1e-12, bessel_invariance),
    ]
}

/// Runs every check of `suite`.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Report {
    let checks = registry().into_iter().filter(|c| suite.contains(c.suite)).map(|c| c.run(opts)).collect();
    Report { suite, checks }
}

/// Runs one check by name.
pub fn run_check(name: &str, opts: &VerifyOptions) -> Option<Check> {
    registry().into_iter().find(|c| c.name == name).map(|c| c.run(opts))
}

// ---------------------------------------------------------------------------
// Samples

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fourier_points(seed: u64, count: usize, z_max: f64) -> Vec<(f64, f64)> {
    let mut r = rng(seed);
    (0..count).map(|_| (r.gen_range(0.0..z_max), r.gen_range(-1.0..1.0))).collect()
}

fn dunkl_pairs(seed: u64, count: usize, b_max: f64) -> Result<Vec<(DihedralPoint, DihedralPoint)>> {
    let mut r = rng(seed);
    let rmax = b_max.sqrt();
    (0..count)
        .map(|_| {
            let z1 = DihedralPoint::new(r.gen_range(0.1..rmax), r.gen_range(-PI..PI))?;
            let z2 = DihedralPoint::new(r.gen_range(0.1..rmax), r.gen_range(-PI..PI))?;
            Ok((z1, z2))
        })
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn series(a: f64, m: u32, g: &GeomInvariants) -> Result<Complex64> {
    Ok(series_kernel(&FourierParams::new(a, m, Method::Series)?, g, 1.0, 1e-15)?.value)
}

// ---------------------------------------------------------------------------
// specfun

fn bessel_half_integer(p: &mut Probe) -> Result<()> {
    for i in 1..=100 {
        let x = 0.25 * i as f64;
        let s = (2.0 / (PI * x)).sqrt();
        let (sn, cs) = x.sin_cos();
        for (nu, want) in [(-0.5, s * cs), (0.5, s * sn), (1.5, s * (sn / x - cs))] {
            p.record((bessel_j(nu, x)? - want).abs());
        }
    }
    Ok(())
}

fn bessel_recurrence(p: &mut Probe) -> Result<()> {
    // J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu
    for &nu in &[0.3, 1.0, 2.7, 7.5] {
        for i in 1..=60 {
            let x = 0.4 * i as f64;
            let lhs = bessel_j(nu - 1.0, x)? + bessel_j(nu + 1.0, x)?;
            p.record((lhs - 2.0 * nu / x * bessel_j(nu, x)?).abs());
        }
    }
    Ok(())
}

fn ml_exp_collapse(p: &mut Probe) -> Result<()> {
    // E^1_{1,1}(beta) = e^beta, relative to e^|beta|
    for i in 0..40 {
        let theta = 2.0 * PI * i as f64 / 40.0;
        for &r in &[0.5, 5.0, 12.0, 20.0] {
            let beta = Complex64::from_polar(r, theta);
            let v = mittag_leffler(&MLSpec::new(1.0, 1.0, 1.0, beta)?, 1.0)?;
            p.record((v - beta.exp()).norm() / r.exp());
        }
    }
    Ok(())
}

fn ml_laplace_pair(p: &mut Probe) -> Result<()> {
    for &(eps, gam, delta, b) in &[(1.5, 0.7, 1.3, c(0.5, 0.3)), (0.8, 1.2, 2.0, c(-0.4, 0.2)), (1.2, 2.5, 0.6, c(0.0, 0.4))] {
        let spec = MLSpec::new(eps, gam, delta, b)?;
        let s = c(3.0, 0.5);
        let opts = LaplaceOptions { bound: 3.0, rate: b.norm().powf(1.0 / eps), origin_exp: gam };
        let mut bad = None;
        let r = numeric_laplace(
            |t| match mittag_leffler(&spec, t) {
                Ok(v) => v * t.powf(gam - 1.0),
                Err(e) => {
                    bad.get_or_insert(e);
                    c(0.0, 0.0)
                }
            },
            s,
            opts,
            1e-9,
        )?;
        if let Some(e) = bad {
            return Err(e);
        }
        let want = s.powf(-gam) * (c(1.0, 0.0) - b * s.powf(-eps)).powf(-delta);
        p.compare(r.value, want);
    }
    Ok(())
}

fn phi2_convolution(p: &mut Probe) -> Result<()> {
    // inverse transform of prod_j (s + i a_j)^(-k) as Phi2 against nested convolution
    let a = [1.0, 2.0, 3.0];
    for &k in &[1.0, 0.6] {
        let factor = |aj: f64| move |tau: f64| Complex64::from_polar(tau.powf(k - 1.0) * rgamma(k), -aj * tau);
        let hints = ConvolutionHints { f_exp: k, g_exp: k };
        let mut bad = None;
        let f2 = |tau: f64| match convolve_on_interval(factor(a[0]), factor(a[1]), tau, hints, 1e-13) {
            Ok(r) => r.value,
            Err(e) => {
                bad.get_or_insert(e);
                c(0.0, 0.0)
            }
        };
        let nested = convolve_on_interval(f2, factor(a[2]), 1.0, ConvolutionHints { f_exp: 2.0 * k, g_exp: k }, 1e-11)?.value;
        if let Some(e) = bad {
            return Err(e);
        }
        let phi = humbert_phi2(k, k, 3.0 * k, c(0.0, a[0] - a[1]), c(0.0, a[0] - a[2]))?;
        p.compare(phi * Complex64::from_polar(rgamma(3.0 * k), -a[0]), nested);
    }
    Ok(())
}

fn gegenbauer_generating(p: &mut Probe) -> Result<()> {
    for &lambda in &[0.5, 1.0, 2.0] {
        for &xi in &[-1.0, -0.6, 0.0, 0.35, 1.0] {
            let w = gegenbauer_weighted_seq(1200, lambda, xi)?;
            for i in 0..8 {
                let zc = Complex64::from_polar(0.9, PI * i as f64 / 8.0 + 0.1);
                let closed = poisson_gegenbauer_sum(lambda, xi, zc)?;
                let mut sum = c(0.0, 0.0);
                let mut pw = c(1.0, 0.0);
                for &wj in &w {
                    sum += pw * wj;
                    pw *= zc;
                }
                p.record((sum - closed).norm() / closed.norm().max(1.0));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// laplace_rational

fn laplace_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &z in &[0.05, 0.5, 1.0, 2.7, 5.0] {
        for &xi in &[-1.0, -0.8, -0.3, 0.0, 0.45, 0.9, 1.0] {
            out.push((z, xi));
        }
    }
    out
}

fn pn_derivative(p: &mut Probe) -> Result<()> {
    for n in 1..=8u32 {
        for (z, xi) in laplace_grid() {
            let g = GeomInvariants::new(z, xi, 4)?;
            let d = poly_derivative(&pn_coefficients(n, &g));
            let q = qn1_roots(n, z).monic_polynomial();
            if d.len() != q.len() {
                return domain(format!("degree mismatch for n = {n}"));
            }
            let scale = pn_scale(n, z).max(1.0);
            for (i, (dc, qc)) in d.iter().zip(&q).enumerate() {
                let power = (q.len() - 1 - i) as i32;
                p.record((dc - qc * n as f64).norm() / (n as f64 * scale.powi(n as i32 - 1 - power)));
            }
        }
    }
    Ok(())
}

fn pn_roots(p: &mut Probe) -> Result<()> {
    for n in 1..=8u32 {
        for (z, xi) in laplace_grid() {
            let g = GeomInvariants::new(z, xi, 4)?;
            let coeffs = pn_coefficients(n, &g);
            let scale = pn_scale(n, z).max(1.0);
            let from_roots = pn_poles(n, &g).monic_polynomial();
            for (i, (a, b)) in coeffs.iter().zip(&from_roots).enumerate() {
                p.record((a - b).norm() / scale.powi(i as i32));
            }
        }
    }
    Ok(())
}

fn brugia_finite_difference(p: &mut Probe) -> Result<()> {
    let mut r = rng(11);
    for _ in 0..25 {
        let pts: Vec<Complex64> = loop {
            let pts: Vec<Complex64> = (0..6).map(|_| c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))).collect();
            if pts.iter().enumerate().all(|(i, a)| pts.iter().skip(i + 1).all(|b| (a - b).norm() > 0.6)) {
                break pts;
            }
        };
        let poles = PoleSet::from_points(pts[..4].iter().map(|&q| (q, r.gen_range(1..=3))), 1e-10);
        let zeros = PoleSet::from_points(pts[4..].iter().map(|&q| (q, 1)), 1e-10);
        for k in 0..poles.len() {
            let pk = poles.poles[k].location;
            let mut rest = poles.clone();
            rest.poles.remove(k);
            let f = |s: Complex64| rational_eval(&zeros, &rest, s);
            let diff = |h: f64, order: usize| -> Complex64 {
                let h = c(h, 0.0);
                match order {
                    1 => (f(pk + h) - f(pk - h)) / (h * 2.0),
                    2 => (f(pk + h) - f(pk) * 2.0 + f(pk - h)) / (h * h),
                    _ => (f(pk + h * 2.0) - f(pk + h) * 2.0 + f(pk - h) * 2.0 - f(pk - h * 2.0)) / (h * h * h * 2.0),
                }
            };
            for order in 1..=3 {
                let h = 0.004;
                let est = (diff(h / 2.0, order) * 4.0 - diff(h, order)) / 3.0;
                let exact = brugia_derivative(&zeros, &poles, k, order)?;
                p.record((est - exact).norm() / exact.norm().max(f(pk).norm()));
            }
        }
    }
    Ok(())
}

fn partial_fraction_pair(p: &mut Probe) -> Result<()> {
    // 1/((s+1)(s+2)^2) <-> e^-t - e^-2t - t e^-2t
    let poles = PoleSet::from_points([(c(-1.0, 0.0), 1), (c(-2.0, 0.0), 2)], 1e-10);
    let pf = partial_fraction_expand(&PoleSet::empty(1e-10), &poles)?;
    for i in 0..=20 {
        let t = 0.25 * i as f64;
        let want = (-t).exp() - (-2.0 * t).exp() * (1.0 + t);
        p.compare(inverse_laplace_rational(&pf, t), c(want, 0.0));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// kernel_fourier

fn classical_series(p: &mut Probe) -> Result<()> {
    for &m in &[2u32, 3, 4, 6] {
        for (z, xi) in fourier_points(m as u64, 200, 5.0) {
            let g = GeomInvariants::new(z, xi, m)?;
            p.compare(series(2.0, m, &g)?, Complex64::from_polar(1.0, -z * xi));
        }
    }
    Ok(())
}

fn classical_closed(p: &mut Probe) -> Result<()> {
    for &m in &[2u32, 3, 4, 6] {
        for (z, xi) in fourier_points(m as u64, 200, 5.0) {
            let g = GeomInvariants::new(z, xi, m)?;
            p.compare(kernel_a2(&g), Complex64::from_polar(1.0, -z * xi));
        }
    }
    Ok(())
}

fn classical_integral(p: &mut Probe) -> Result<()> {
    for &m in &[3u32, 4, 6] {
        for (z, xi) in fourier_points(m as u64, 200, 5.0) {
            let g = GeomInvariants::new(z, xi, m)?;
            p.compare(kernel_integral_ml(2.0, m, &g)?.value, Complex64::from_polar(1.0, -z * xi));
        }
    }
    Ok(())
}

fn a1_closed(p: &mut Probe) -> Result<()> {
    for &m in &[2u32, 3, 4] {
        for (z, xi) in fourier_points(20 + m as u64, 100, 5.0) {
            let g = GeomInvariants::new(z, xi, m)?;
            p.compare(kernel_a1(&g)?, series(1.0, m, &g)?);
        }
    }
    Ok(())
}

fn halfint_m2(p: &mut Probe) -> Result<()> {
    for n in 2..=5u32 {
        for (z, xi) in fourier_points(30 + n as u64, 100, 5.0) {
            let g = GeomInvariants::new(z, xi, 2)?;
            p.compare(kernel_halfint_m2(n, &g)?, series(2.0 / n as f64, 2, &g)?);
        }
    }
    Ok(())
}

fn halfint_even(p: &mut Probe) -> Result<()> {
    for n in 2..=4u32 {
        for &m in &[4u32, 6] {
            let mut pts = fourier_points(40 + n as u64 + m as u64, 40, 5.0);
            // xi = +-1 makes pole pairs coalesce
            pts.extend([(1.3, 1.0), (2.2, -1.0), (0.7, 1.0), (4.5, -1.0)]);
            for (z, xi) in pts {
                let g = GeomInvariants::new(z, xi, m)?;
                p.compare(kernel_halfint_even(n, m, &g)?, series(2.0 / n as f64, m, &g)?);
            }
        }
    }
    Ok(())
}

fn halfint_convolution(p: &mut Probe) -> Result<()> {
    for n in 2..=3u32 {
        for &m in &[3u32, 5] {
            for (z, xi) in fourier_points(50 + n as u64 + m as u64, 25, 5.0) {
                let g = GeomInvariants::new(z, xi, m)?;
                p.compare(kernel_halfint_any(n, m, &g)?.value, series(2.0 / n as f64, m, &g)?);
            }
        }
    }
    Ok(())
}

fn fourier_bound_scan(p: &mut Probe) -> Result<()> {
    let grid = ScanGrid { z_max: 5.0, nz: 40, nxi: 40 };
    for n in 2..=3u32 {
        for m in 2..=4u32 {
            let r = bound_scan(n, m, &grid)?;
            p.record((r.max_abs - 1.0).max(0.0));
        }
    }
    Ok(())
}

fn ml_integral(p: &mut Probe) -> Result<()> {
    for &a in &[0.8, 1.5, 3.0] {
        for (z, xi) in fourier_points(70 + (a * 10.0) as u64, 25, 5.0) {
            let g = GeomInvariants::new(z, xi, 4)?;
            p.compare(kernel_integral_ml(a, 4, &g)?.value, series(a, 4, &g)?);
        }
    }
    Ok(())
}

fn fourier_laplace_consistency(p: &mut Probe) -> Result<()> {
    for &a in &[1.0, 2.0, 2.0 / 3.0] {
        for &m in &[2u32, 4] {
            let params = FourierParams::new(a, m, Method::Series)?;
            for &(z, xi) in &[(0.2, 0.3), (0.45, -0.7), (0.5, 0.95)] {
                let g = GeomInvariants::new(z, xi, m)?;
                for s in [c(6.0, 0.0), c(8.0, 2.0)] {
                    let closed = laplace_kernel(&params, &g, s)?;
                    let opts = LaplaceOptions { bound: 50.0, rate: 1.0, origin_exp: 1.0 };
                    let mut bad = None;
                    let num = numeric_laplace(
                        |t| match series_kernel(&params, &g, t, 1e-14) {
                            Ok(e) => e.value,
                            Err(e) => {
                                bad.get_or_insert(e);
                                c(0.0, 0.0)
                            }
                        },
                        s,
                        opts,
                        1e-9,
                    )?;
                    if let Some(e) = bad {
                        return Err(e);
                    }
                    p.compare(num.value, closed);
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// kernel_dunkl

fn dunkl_closed_i1(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::odd(1, 0.5)?;
    for (z1, z2) in dunkl_pairs(101, 20, 3.0)? {
        let want = dunkl_I1(0.5, &z1, &z2)?.value;
        p.compare(dunkl_kernel_m1(&params, &z1, &z2)?.value, want);
        p.compare(dunkl_kernel_m2(&params, &z1, &z2)?.value, want);
    }
    Ok(())
}

fn dunkl_closed_i2(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::even(1, 0.7, 0.3)?;
    for (z1, z2) in dunkl_pairs(102, 20, 3.0)? {
        let want = dunkl_I2(0.7, 0.3, &z1, &z2)?.value;
        p.compare(dunkl_kernel_m1(&params, &z1, &z2)?.value, want);
        p.compare(dunkl_kernel_m2(&params, &z1, &z2)?.value, want);
    }
    Ok(())
}

fn dunkl_m1_m2_i3(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::odd(3, 0.7)?;
    for (z1, z2) in dunkl_pairs(103, 20, 3.0)? {
        p.compare(dunkl_kernel_m1(&params, &z1, &z2)?.value, dunkl_kernel_m2(&params, &z1, &z2)?.value);
    }
    Ok(())
}

fn dunkl_m1_m2_i4(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::even(2, 0.5, 0.8)?;
    for (z1, z2) in dunkl_pairs(104, 20, 3.0)? {
        let m2 = dunkl_kernel_m2(&params, &z1, &z2)?.value;
        p.compare(dunkl_kernel_m1(&params, &z1, &z2)?.value, m2);
        p.compare(dunkl_I4(0.5, 0.8, &z1, &z2, I4Variant::B)?.value, m2);
    }
    Ok(())
}

fn dunkl_normalization(p: &mut Probe) -> Result<()> {
    let z1 = DihedralPoint::new(1.4, 0.3)?;
    let z0 = DihedralPoint::new(0.0, 0.9)?;
    let one = c(1.0, 0.0);
    for params in [
        DihedralParams::odd(1, 0.5)?,
        DihedralParams::even(1, 0.5, 0.8)?,
        DihedralParams::odd(3, 0.7)?,
        DihedralParams::even(2, 0.5, 0.8)?,
    ] {
        p.compare(dunkl_series(&params, &z1, &z0, 1.0, 1e-14)?.value, one);
        p.compare(dunkl_kernel_m1(&params, &z1, &z0)?.value, one);
        p.compare(dunkl_kernel_m2(&params, &z1, &z0)?.value, one);
    }
    p.compare(dunkl_I1(0.5, &z1, &z0)?.value, one);
    p.compare(dunkl_I2(0.5, 0.8, &z1, &z0)?.value, one);
    p.compare(dunkl_I4(0.5, 0.8, &z1, &z0, I4Variant::A)?.value, one);
    p.compare(dunkl_I4(0.5, 0.8, &z1, &z0, I4Variant::B)?.value, one);
    p.compare(dunkl_bessel_I4(0.5, 0.8, &z1, &z0)?.value, one);
    Ok(())
}

fn dunkl_shift_identity(p: &mut Probe) -> Result<()> {
    let mut r = rng(105);
    for params in [DihedralParams::odd(3, 0.7)?, DihedralParams::even(2, 0.5, 0.8)?, DihedralParams::even(3, 0.4, 0.9)?] {
        for _ in 0..30 {
            let z1 = DihedralPoint::new(r.gen_range(0.3..1.5), r.gen_range(-PI..PI))?;
            let z2 = DihedralPoint::new(r.gen_range(0.3..1.5), r.gen_range(-PI..PI))?;
            let inv = PairInvariants::new(&params, &z1, &z2);
            let k = params.k;
            let s = c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let (u, v) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            let g = params.gamma_total();
            let bs = s + c(0.0, inv.b * inv.theta3);
            let acuv = dihedral_a(s, inv.b, k, inv.c(u, v));
            let lhs = dihedral_a(s, inv.b, k, inv.c11) / (bs * acuv.powf(g + 1.0));
            let rhs = 1.0 / (bs * acuv.powf(g))
                + c(0.0, -inv.b).powu(k) * inv.c_shift(u, v) / (2f64.powi(k as i32 - 1) * bs * acuv.powf(g + 1.0));
            p.record((lhs - rhs).norm() / lhs.norm());
        }
    }
    Ok(())
}

fn dunkl_laplace(p: &mut Probe) -> Result<()> {
    for params in [DihedralParams::odd(3, 0.7)?, DihedralParams::even(2, 0.5, 0.8)?] {
        for (z1, z2) in dunkl_pairs(106, 3, 3.0)? {
            let s = c(8.0, 0.0);
            let closed = laplace_dunkl(&params, &z1, &z2, s)?;
            let opts = LaplaceOptions {
                bound: 2.0 * gamma(params.kappa + 1.0) * 10f64.powf(params.kappa),
                rate: 2.0,
                origin_exp: params.kappa + 1.0,
            };
            let mut bad = None;
            let num = numeric_laplace(
                |t| match dunkl_series(&params, &z1, &z2, t, 1e-15) {
                    Ok(e) => e.value,
                    Err(e) => {
                        bad.get_or_insert(e);
                        c(0.0, 0.0)
                    }
                },
                s,
                opts,
                1e-9,
            )?;
            if let Some(e) = bad {
                return Err(e);
            }
            p.compare(num.value, closed);
        }
    }
    Ok(())
}

fn dunkl_series_oracle(p: &mut Probe) -> Result<()> {
    for params in [DihedralParams::odd(1, 0.5)?, DihedralParams::even(1, 0.5, 0.8)?, DihedralParams::even(2, 0.5, 0.8)?] {
        for (z1, z2) in dunkl_pairs(107, 10, 3.0)? {
            p.compare(dunkl_series(&params, &z1, &z2, 1.0, 1e-14)?.value, dunkl_kernel_m2(&params, &z1, &z2)?.value);
        }
    }
    Ok(())
}

fn bessel_closed(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::even(2, 0.5, 0.8)?;
    for (z1, z2) in dunkl_pairs(108, 20, 3.0)? {
        p.compare(dunkl_bessel_I4(0.5, 0.8, &z1, &z2)?.value, dunkl_bessel_series(&params, &z1, &z2)?.value);
    }
    Ok(())
}

fn bessel_average(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::even(2, 0.5, 0.8)?;
    for (z1, z2) in dunkl_pairs(109, 6, 3.0)? {
        let avg = dunkl_group_average(&params, &z1, &z2, KernelRoute::M2)?.value;
        p.compare(dunkl_bessel_series(&params, &z1, &z2)?.value, avg);
    }
    Ok(())
}

fn bessel_bound(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::even(2, 0.5, 0.8)?;
    for i in 0..10 {
        for j in 0..10 {
            let z1 = DihedralPoint::new(1.2, 0.35)?;
            let z2 = DihedralPoint::new(0.4 * (i as f64 + 0.5), 0.35 * j as f64)?;
            let d = dunkl_bessel_series(&params, &z1, &z2)?.value;
            p.record((d.norm() - 1.0).max(0.0));
        }
    }
    Ok(())
}

fn bessel_invariance(p: &mut Probe) -> Result<()> {
    let params = DihedralParams::even(2, 0.5, 0.8)?;
    let z1 = DihedralPoint::new(1.2, 0.35)?;
    let z2 = DihedralPoint::new(1.4, 0.6)?;
    let base = dunkl_group_average(&params, &z1, &z2, KernelRoute::M2)?.value;
    for g in group_images(&params, &z2) {
        p.compare(dunkl_group_average(&params, &z1, &g, KernelRoute::M2)?.value, base);
    }
    Ok(())
}
