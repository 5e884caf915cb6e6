//! The (0,a)-generalized Fourier kernel K_a^m(x,y).
//!
//! The kernel depends on the point pair only through z = |x||y| and
//! xi = <x,y>/z (see [`GeomInvariants`]). Routes:
//!
//! * [`series_kernel`]: the defining Bessel-Gegenbauer series,
//! * [`kernel_a2`], [`kernel_a1`]: closed forms for a = 2 and a = 1,
//! * [`kernel_halfint_m2`], [`kernel_halfint_even`]: partial-fraction closed
//!   forms for a = 2/n with m = 2 or m even,
//! * [`kernel_halfint_any`]: the convolution representation for a = 2/n and
//!   any m >= 3,
//! * [`kernel_integral_ml`]: a Bessel-weighted integral over a convolution of
//!   two generalized Mittag-Leffler kernels, valid for every a > 0.
//!
//! Several routes take the auxiliary time variable t of the Laplace-domain
//! picture, in which K(x, y, t) = t^(2 lambda/a) K evaluated at z t^(2/a). The
//! public kernel value is t = 1.

use crate::error::{domain, Error, Result};
use crate::laplace_rational::{inverse_laplace_rational, partial_fraction_expand, pn_poles, pn_scale, GeomInvariants, PoleSet};
use crate::quadrature::{
    convolve_jacobi, convolve_on_interval, gauss_jacobi_rule, integrate_tanh_sinh, ConvolutionHints, QuadResult, QuadratureRule,
};
use crate::specfun::{
    bessel_j, bessel_j_reduced, gamma, gegenbauer_weighted_seq, ln_gamma, mittag_leffler, rgamma, MLSpec, StopRule,
    ML_ENVELOPE,
};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Term limit of the defining series.
pub const SERIES_MAX_TERMS: usize = 500;
/// Largest z for which automatic selection trusts the plain series.
pub const SERIES_Z_LIMIT: f64 = 5.0;

/// Largest n for which `Auto` uses the odd-m convolution route at z <= 5.
pub const AUTO_CONVOLUTION_MAX_N: u32 = 4;

/// Error estimate above which `Auto` prefers the series to the even-m partial fractions.
pub const AUTO_CLOSED_MAX_ERROR: f64 = 1e-10;

/// Requested evaluation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    Closed,
    Convolution,
    Integral,
    Auto,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "series" => Ok(Method::Series),
            "closed" => Ok(Method::Closed),
            "convolution" => Ok(Method::Convolution),
            "integral" => Ok(Method::Integral),
            "auto" => Ok(Method::Auto),
            other => domain(format!("unknown method '{other}'")),
        }
    }
}

/// The concrete formula that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Series,
    ClosedA2,
    ClosedA1,
    HalfIntM2,
    HalfIntEven,
    HalfIntConvolution,
    MlIntegral,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Series => "series",
            Route::ClosedA2 => "closed-a2",
            Route::ClosedA1 => "closed-a1",
            Route::HalfIntM2 => "halfint-m2",
            Route::HalfIntEven => "halfint-even",
            Route::HalfIntConvolution => "halfint-convolution",
            Route::MlIntegral => "ml-integral",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A kernel value with its error estimate and the route used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub error: f64,
    pub route: Route,
}

/// Kernel parameters: the deformation a, the dimension m and the method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierParams {
    pub a: f64,
    /// n when a = 2/n for a positive integer n.
    pub n: Option<u32>,
    pub m: u32,
    pub method: Method,
}

impl FourierParams {
    /// Recognizes a = 2/n when 2/a is an integer to within 1e-12.
    pub fn new(a: f64, m: u32, method: Method) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return domain(format!("fourier: a = {a} must be positive"));
        }
        if m < 2 {
            return domain(format!("fourier: dimension m = {m} < 2"));
        }
        let r = 2.0 / a;
        let n = if (r - r.round()).abs() <= 1e-12 * r && r.round() >= 1.0 && r.round() < 1e6 {
            Some(r.round() as u32)
        } else {
            None
        };
        Ok(Self { a, n, m, method })
    }

    /// a = 2/n exactly.
    pub fn half_integer(n: u32, m: u32, method: Method) -> Result<Self> {
        if n == 0 {
            return domain("fourier: n must be a positive integer");
        }
        let mut p = Self::new(2.0 / n as f64, m, method)?;
        p.n = Some(n);
        Ok(p)
    }

    pub fn lambda(&self) -> f64 {
        (self.m as f64 - 2.0) / 2.0
    }
}

fn check_dim(params: &FourierParams, geom: &GeomInvariants) -> Result<()> {
    if params.m != geom.m {
        return domain(format!(
            "fourier: parameter dimension {} differs from geometry dimension {}",
            params.m, geom.m
        ));
    }
    Ok(())
}

fn same_a(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b
}

/// The defining series with the auxiliary time t, summed until three
/// consecutive terms fall below `tol` (relative to max(1, |partial sum|))
/// once the Bessel orders exceed the argument.
pub fn series_kernel(params: &FourierParams, geom: &GeomInvariants, t: f64, tol: f64) -> Result<Evaluation> {
    check_dim(params, geom)?;
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("series_kernel: t = {t} must be finite and >= 0"));
    }
    let tol = tol.max(1e-16);
    let a = params.a;
    let lam = params.lambda();
    let nu0 = 2.0 * lam / a;
    if t == 0.0 {
        let v = if nu0 == 0.0 { 1.0 } else { 0.0 };
        return Ok(Evaluation { value: Complex64::new(v, 0.0), error: 0.0, route: Route::Series });
    }
    if geom.z == 0.0 {
        return Ok(Evaluation {
            value: Complex64::new(t.powf(nu0), 0.0),
            error: 0.0,
            route: Route::Series,
        });
    }
    let z = geom.z;
    let beta = 2.0 / a * z.powf(0.5 * a);
    let x = beta * t;
    // a^(2 lambda/a) Gamma(2 lambda/a + 1), in log form
    let ln_pre = nu0 * a.ln() + ln_gamma(nu0 + 1.0);
    let weights = gegenbauer_weighted_seq(SERIES_MAX_TERMS, lam, geom.xi)?;
    // For small arguments use (beta t/2)^nu_j = z^(j+lambda) a^(-nu_j) t^nu_j to
    // avoid forming z^(-lambda) J_nu separately.
    let reduced = x <= 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut stop = StopRule::default();
    for (j, &w) in weights.iter().enumerate() {
        let jf = j as f64;
        let nu = 2.0 * (jf + lam) / a;
        let mag = if reduced {
            let ln_scale = ln_pre + jf * z.ln() - nu * a.ln() + nu * t.ln();
            ln_scale.exp() * bessel_j_reduced(nu, x)?
        } else {
            ln_pre.exp() * z.powf(-lam) * bessel_j(nu, x)?
        };
        let term = Complex64::from_polar(w * mag, -PI * jf / a);
        sum += term;
        abs_sum += term.norm();
        if nu > x && stop.push(term.norm(), sum.norm().max(1.0), tol) {
            return Ok(Evaluation {
                value: sum,
                error: 3.0 * term.norm() + 1e-16 * abs_sum,
                route: Route::Series,
            });
        }
    }
    Err(Error::NonConvergence { terms: SERIES_MAX_TERMS })
}

/// Closed Laplace-domain form of the kernel as a function of t.
///
/// Requires Re s >= 2 beta + 1 with beta = (2/a) z^(a/2), which keeps s away
/// from the branch points +-i beta and from every pole.
pub fn laplace_kernel(params: &FourierParams, geom: &GeomInvariants, s: Complex64) -> Result<Complex64> {
    check_dim(params, geom)?;
    let a = params.a;
    let lam = params.lambda();
    let beta = 2.0 / a * geom.z.powf(0.5 * a);
    let required = 2.0 * beta + 1.0;
    if !(s.re >= required) {
        return Err(Error::Branch { re_s: s.re, required });
    }
    let r = (s * s + beta * beta).sqrt();
    let big_r = s + r;
    // r - s = beta^2 / (s + r) without cancellation
    let small_r = beta * beta / big_r;
    let e = 2.0 / a;
    let ph1 = Complex64::from_polar(1.0, -PI / a);
    let ph2 = ph1 * ph1;
    let rp = big_r.powf(e);
    let sp = if beta == 0.0 { Complex64::new(0.0, 0.0) } else { small_r.powf(e) };
    let num = rp - ph2 * sp;
    let den = rp - 2.0 * geom.xi * ph1 * e.powf(e) * geom.z + ph2 * sp;
    let pre = (2.0f64).powf(2.0 * lam / a) * gamma(2.0 * lam / a + 1.0);
    Ok(pre * num / (r * den.powf(lam + 1.0)))
}

/// e^(-i <x,y>), the classical Fourier kernel (a = 2).
pub fn kernel_a2(geom: &GeomInvariants) -> Complex64 {
    Complex64::from_polar(1.0, -geom.inner())
}

/// Gamma(lambda + 1/2) J~_{(m-3)/2}(sqrt(2(z + <x,y>))), the a = 1 kernel,
/// with J~_nu(w) = J_nu(w) (w/2)^(-nu).
pub fn kernel_a1(geom: &GeomInvariants) -> Result<Complex64> {
    let nu = (geom.m as f64 - 3.0) / 2.0;
    let w = (2.0 * (geom.z + geom.inner())).max(0.0).sqrt();
    Ok(Complex64::new(gamma(geom.lambda + 0.5) * bessel_j_reduced(nu, w)?, 0.0))
}

fn exp_sum(n: u32, z: f64, q: f64) -> Complex64 {
    let w = pn_scale(n, z);
    let nf = n as f64;
    let s: Complex64 = (0..n)
        .map(|l| Complex64::from_polar(1.0, -w * ((q + 2.0 * PI * l as f64) / nf).cos()))
        .sum();
    s / nf
}

/// m = 2 kernel for a = 2/n: (1/n) sum_l exp(-i n z^(1/n) cos((q + 2 pi l)/n)).
pub fn kernel_halfint_m2(n: u32, geom: &GeomInvariants) -> Result<Complex64> {
    if n == 0 {
        return domain("kernel_halfint_m2: n must be positive");
    }
    Ok(exp_sum(n, geom.z, geom.q))
}

/// Even-dimensional kernel for a = 2/n: Gamma(n lambda) t L^{-1}[P_n^(-lambda)](t)
/// at t = 1, from the partial-fraction expansion of 1/P_n^lambda over the
/// merged pole set.
pub fn kernel_halfint_even(n: u32, m: u32, geom: &GeomInvariants) -> Result<Complex64> {
    if n == 0 {
        return domain("kernel_halfint_even: n must be positive");
    }
    if m < 4 || m % 2 != 0 {
        return domain(format!("kernel_halfint_even: m = {m} must be even and > 2"));
    }
    if geom.m != m {
        return domain(format!("kernel_halfint_even: geometry dimension {} differs from m = {m}", geom.m));
    }
    if geom.z == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(halfint_even_terms(n, m, geom)?.0)
}

/// Value and the sum of the moduli of its partial-fraction terms, which
/// bounds the rounding error amplification of the expansion.
fn halfint_even_terms(n: u32, m: u32, geom: &GeomInvariants) -> Result<(Complex64, f64)> {
    let lam = (m as usize - 2) / 2;
    let poles = pn_poles(n, geom).powered(lam);
    let pf = partial_fraction_expand(&PoleSet::empty(poles.merge_tolerance), &poles)?;
    let f1 = inverse_laplace_rational(&pf, 1.0);
    let magnitude: f64 = pf
        .terms
        .iter()
        .map(|t| {
            let fact: f64 = (1..t.order).map(|i| i as f64).product();
            t.coefficient.norm() * t.pole.re.exp() / fact
        })
        .sum();
    let g = gamma((n as usize * lam) as f64);
    Ok((g * f1, g * magnitude))
}

/// `kernel_halfint_even` with an error estimate from the cancellation
/// between partial-fraction terms.
pub fn kernel_halfint_even_eval(n: u32, m: u32, geom: &GeomInvariants) -> Result<Evaluation> {
    let value = kernel_halfint_even(n, m, geom)?;
    let error = if geom.z == 0.0 { 0.0 } else { 64.0 * f64::EPSILON * halfint_even_terms(n, m, geom)?.1 };
    if !value.re.is_finite() || !value.im.is_finite() || !error.is_finite() {
        return Err(Error::Singular(format!("even-m partial fractions overflow for n = {n}, m = {m}")));
    }
    Ok(Evaluation { value, error: error.max(1e-15), route: Route::HalfIntEven })
}

/// Nested Gauss-Jacobi evaluator for the inverse transform of
/// prod_l (s - p_l)^(-lambda), i.e. the n-fold convolution of
/// tau^(lambda-1) e^(p_l tau)/Gamma(lambda).
struct NestedConvolution {
    poles: Vec<Complex64>,
    lambda: f64,
    /// rules[j] convolves the (j+1)-fold product with one more factor
    rules: Vec<QuadratureRule>,
}

impl NestedConvolution {
    fn new(poles: Vec<Complex64>, lambda: f64, npts: usize) -> Result<Self> {
        let mut rules = Vec::new();
        for j in 1..poles.len() {
            rules.push(gauss_jacobi_rule(npts, lambda - 1.0, j as f64 * lambda - 1.0)?);
        }
        Ok(Self { poles, lambda, rules })
    }

    /// Smooth part S_j(tau) = tau^(1 - j lambda) f_j(tau) of the j-fold product.
    fn smooth(&self, j: usize, tau: f64) -> Complex64 {
        let rg = rgamma(self.lambda);
        if j == 1 {
            return (self.poles[0] * tau).exp() * rg;
        }
        let rule = &self.rules[j - 2];
        let p = self.poles[j - 1];
        let scale = 0.5f64.powf(j as f64 * self.lambda - 1.0);
        let half = 0.5 * tau;
        let s = rule.integrate(|x| {
            let sigma = half * (1.0 + x);
            let rest = half * (1.0 - x);
            self.smooth(j - 1, rest) * (p * sigma).exp()
        });
        s * (scale * rg)
    }

    fn total(&self) -> usize {
        self.poles.len()
    }
}

fn nested_nodes(w: f64) -> usize {
    (16.0 + 2.0 * w).ceil() as usize
}

fn halfint_poles(n: u32, geom: &GeomInvariants) -> Vec<Complex64> {
    let w = pn_scale(n, geom.z);
    let nf = n as f64;
    (0..n)
        .map(|l| Complex64::new(0.0, -w * ((geom.q + 2.0 * PI * l as f64) / nf).cos()))
        .collect()
}

/// f_{n,lambda}(t): inverse transform of P_n^(-lambda) at t, by nested
/// Gauss-Jacobi convolution. Satisfies |f| <= t^(n lambda - 1)/Gamma(n lambda).
pub fn pole_power_convolution(n: u32, lambda: f64, geom: &GeomInvariants, t: f64) -> Result<Complex64> {
    if n == 0 || !(lambda > 0.0) {
        return domain(format!("pole_power_convolution: need n >= 1 and lambda > 0 (got {n}, {lambda})"));
    }
    if !(t > 0.0) {
        return domain(format!("pole_power_convolution: t = {t} must be positive"));
    }
    let w = pn_scale(n, geom.z) * t;
    let nc = NestedConvolution::new(halfint_poles(n, geom), lambda, nested_nodes(w))?;
    Ok(nc.smooth(nc.total(), t) * t.powf(n as f64 * lambda - 1.0))
}

fn halfint_any_with(n: u32, lambda: f64, geom: &GeomInvariants, npts: usize) -> Result<Complex64> {
    let poles = halfint_poles(n, geom);
    let nf = n as f64;
    let g1 = |u: f64| -> Complex64 { poles.iter().map(|&p| (p * u).exp()).sum::<Complex64>() / nf };
    let nc = NestedConvolution::new(poles.clone(), lambda, npts)?;
    let outer = gauss_jacobi_rule(npts, nf * lambda - 1.0, 0.0)?;
    let v = convolve_jacobi(&outer, g1, |tau| nc.smooth(n as usize, tau), 1.0);
    Ok(v * gamma(nf * lambda + 1.0))
}

/// Kernel for a = 2/n and m >= 3 as Gamma(n lambda + 1) times the
/// convolution at t = 1 of the m = 2 kernel g_1(t) = (1/n) sum_l e^(p_l t)
/// with f_{n,lambda}. The error estimate compares two node counts.
pub fn kernel_halfint_any(n: u32, m: u32, geom: &GeomInvariants) -> Result<Evaluation> {
    if n == 0 {
        return domain("kernel_halfint_any: n must be positive");
    }
    if m < 3 {
        return domain(format!("kernel_halfint_any: m = {m} < 3, use the m = 2 closed form"));
    }
    if geom.m != m {
        return domain(format!("kernel_halfint_any: geometry dimension {} differs from m = {m}", geom.m));
    }
    if geom.z == 0.0 {
        return Ok(Evaluation { value: Complex64::new(1.0, 0.0), error: 0.0, route: Route::HalfIntConvolution });
    }
    let lambda = (m as f64 - 2.0) / 2.0;
    let npts = nested_nodes(pn_scale(n, geom.z));
    let v1 = halfint_any_with(n, lambda, geom, npts)?;
    let v2 = halfint_any_with(n, lambda, geom, npts + 8)?;
    let error = (v1 - v2).norm();
    const BUDGET: f64 = 1e-6;
    if error > BUDGET {
        return Err(Error::Quadrature { estimate: error, tolerance: BUDGET });
    }
    Ok(Evaluation { value: v2, error, route: Route::HalfIntConvolution })
}

/// How the Mittag-Leffler weight w(tau) is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Termwise convolution of the two series.
    Series,
    /// Gauss-Jacobi convolution of two generalized Mittag-Leffler kernels.
    Convolution,
}

/// The inverse transform at t = 1 of R^mu / (r ((R^eps - c+)(R^eps - c-))^delta),
/// R = s + r, r = sqrt(s^2 + b^2):
///
/// T(mu) = b^(-nu) int_0^(1/2) (1-2tau)^(nu/2) J_nu(b sqrt(1-2tau)) w(tau) dtau,
///
/// where w is the convolution of tau^(g-1) E^delta_{eps,g}(c+ tau^eps) and
/// tau^(g-1) E^delta_{eps,g}(c- tau^eps) with 2g = p. With s0 = 2 eps delta - mu,
/// nu = 0 when s0 >= 1 and nu = (s0 - 1)/2 otherwise, and p = s0 - nu.
#[derive(Debug, Clone, PartialEq)]
pub struct MlBesselIntegral {
    pub eps: f64,
    pub delta: f64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub b: f64,
}

impl MlBesselIntegral {
    pub fn new(eps: f64, delta: f64, c_plus: Complex64, c_minus: Complex64, b: f64) -> Result<Self> {
        if !(eps > 0.0 && delta > 0.0 && b >= 0.0) {
            return domain(format!("ml integral: need eps, delta > 0 and b >= 0 (got {eps}, {delta}, {b})"));
        }
        let reach = c_plus.norm().max(c_minus.norm()) * 0.5f64.powf(eps);
        if reach > ML_ENVELOPE {
            return Err(Error::Envelope { modulus: reach, limit: ML_ENVELOPE });
        }
        Ok(Self { eps, delta, c_plus, c_minus, b })
    }

    fn orders(&self, mu: f64) -> Result<(f64, f64)> {
        let s0 = 2.0 * self.eps * self.delta - mu;
        let nu = if s0 >= 1.0 { 0.0 } else { 0.5 * (s0 - 1.0) };
        let p = s0 - nu;
        if !(p > 0.0) {
            return domain(format!("ml integral: order mu = {mu} too large for eps delta"));
        }
        Ok((nu, p))
    }

    /// Coefficients D_N with w(tau) = tau^(p-1) sum_N D_N (2 tau)^(eps N).
    fn weight_coefficients(&self, p: f64) -> Result<Vec<Complex64>> {
        const MAX: usize = 3000;
        let rho = self.c_plus.norm().max(self.c_minus.norm());
        if rho == 0.0 {
            return Ok(vec![Complex64::new(rgamma(p), 0.0)]);
        }
        let up = self.c_plus / rho;
        let um = self.c_minus / rho;
        let ln_rho = (rho * 0.5f64.powf(self.eps)).ln();
        let mut a = vec![1.0f64];
        let mut pp = vec![Complex64::new(1.0, 0.0)];
        let mut pm = vec![Complex64::new(1.0, 0.0)];
        let mut out = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        // ln of (2 delta)_N / N!, the modulus bound of the inner sum
        let mut ln_bound_c = 0.0;
        for nn in 0..MAX {
            if nn > 0 {
                let nf = nn as f64;
                a.push(a[nn - 1] * (self.delta + nf - 1.0) / nf);
                pp.push(pp[nn - 1] * up);
                pm.push(pm[nn - 1] * um);
                ln_bound_c += ((2.0 * self.delta + nf - 1.0) / nf).ln();
            }
            let inner: Complex64 = (0..=nn).map(|i| pp[i] * pm[nn - i] * (a[i] * a[nn - i])).sum();
            let ln_mag = nn as f64 * ln_rho - ln_gamma(self.eps * nn as f64 + p);
            out.push(inner * ln_mag.exp());
            let ln_bound = ln_bound_c + ln_mag;
            peak = peak.max(ln_bound);
            if nn > 4 && ln_bound < peak - 41.5 && ln_bound < -41.5 {
                return Ok(out);
            }
        }
        Err(Error::NonConvergence { terms: MAX })
    }

    /// T(mu) with the series weight.
    pub fn eval(&self, mu: f64, tol: f64) -> Result<QuadResult> {
        self.eval_with(mu, WeightMode::Series, tol)
    }

    pub fn eval_with(&self, mu: f64, mode: WeightMode, tol: f64) -> Result<QuadResult> {
        let (nu, p) = self.orders(mu)?;
        let coeffs = match mode {
            WeightMode::Series => self.weight_coefficients(p)?,
            WeightMode::Convolution => Vec::new(),
        };
        let conv = match mode {
            WeightMode::Convolution => {
                let g = 0.5 * p;
                Some((
                    g,
                    MLSpec::new(self.eps, g, self.delta, self.c_plus)?,
                    MLSpec::new(self.eps, g, self.delta, self.c_minus)?,
                ))
            }
            WeightMode::Series => None,
        };
        let weight = |tau: f64| -> Result<Complex64> {
            match &conv {
                None => {
                    let x = (2.0 * tau).powf(self.eps);
                    let s = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c);
                    Ok(s * tau.powf(p - 1.0))
                }
                // the leading term is exact to double precision this close to 0
                Some(_) if tau < 1e-100 => Ok(Complex64::new(tau.powf(p - 1.0) * rgamma(p), 0.0)),
                Some((g, sp, sm)) => {
                    let mut bad = None;
                    let mut kernel = |spec: &MLSpec, u: f64| match mittag_leffler(spec, u) {
                        Ok(v) => v * u.powf(g - 1.0),
                        Err(e) => {
                            bad.get_or_insert(e);
                            Complex64::new(0.0, 0.0)
                        }
                    };
                    let hints = ConvolutionHints { f_exp: *g, g_exp: *g };
                    let r = convolve_on_interval(
                        |u| kernel(sp, u),
                        |u| mittag_leffler(sm, u).map(|v| v * u.powf(g - 1.0)).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                        tau,
                        hints,
                        0.1 * tol * tau.powf(p - 1.0).max(1.0),
                    )?;
                    match bad {
                        Some(e) => Err(e),
                        None => Ok(r.value),
                    }
                }
            }
        };
        let mut failure: Option<Error> = None;
        let b = self.b;
        let r = integrate_tanh_sinh(
            |_, dl, dr| {
                let one_m = 2.0 * dr;
                let bess = match bessel_j_reduced(nu, b * one_m.sqrt()) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                };
                match weight(dl) {
                    Ok(w) => w * (one_m.powf(nu) * bess),
                    Err(e) => {
                        failure.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            0.0,
            0.5,
            tol,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        if !(r.value.re.is_finite() && r.value.im.is_finite()) {
            return Err(Error::Quadrature { estimate: f64::INFINITY, tolerance: tol });
        }
        let s = 2.0f64.powf(-nu);
        Ok(QuadResult { value: r.value * s, error: r.error * s, evaluations: r.evaluations })
    }
}

fn ml_kernel_with(a: f64, geom: &GeomInvariants, mode: WeightMode, tol: f64) -> Result<Evaluation> {
    let lam = geom.lambda;
    let e = 2.0 / a;
    let z = geom.z;
    if z == 0.0 {
        return Ok(Evaluation { value: Complex64::new(1.0, 0.0), error: 0.0, route: Route::MlIntegral });
    }
    let c0 = Complex64::from_polar(e.powf(e) * z, -PI / a);
    let cp = c0 * Complex64::from_polar(1.0, geom.q);
    let cm = c0 * Complex64::from_polar(1.0, -geom.q);
    let beta = e * z.powf(0.5 * a);
    let eng = MlBesselIntegral::new(e, lam + 1.0, cp, cm, beta)?;
    let t1 = eng.eval_with((2.0 * lam + 4.0) / a, mode, tol)?;
    let t2 = eng.eval_with(2.0 * lam / a, mode, tol)?;
    let pre = 2.0f64.powf(2.0 * lam / a) * gamma(1.0 + 2.0 * lam / a);
    let ph = Complex64::from_polar(beta.powf(2.0 * e), -2.0 * PI / a);
    let value = pre * (t1.value - ph * t2.value);
    let error = pre * (t1.error + ph.norm() * t2.error);
    Ok(Evaluation { value, error, route: Route::MlIntegral })
}

/// Kernel by the Mittag-Leffler integral, valid for every a > 0 and m >= 2:
///
/// K = 2^(2 lambda/a) Gamma(1 + 2 lambda/a) [T((2 lambda + 4)/a) - e^(-2 i pi/a) beta^(4/a) T(2 lambda/a)]
///
/// with eps = 2/a, delta = lambda + 1, c+- = e^(-i pi/a) e^(+-i q) (2/a)^(2/a) z and
/// b = beta = (2/a) z^(a/2) in [`MlBesselIntegral`].
pub fn kernel_integral_ml(a: f64, m: u32, geom: &GeomInvariants) -> Result<Evaluation> {
    let params = FourierParams::new(a, m, Method::Integral)?;
    check_dim(&params, geom)?;
    ml_kernel_with(a, geom, WeightMode::Series, 1e-11)
}

/// Same route with the weight computed by numeric convolution of two
/// Mittag-Leffler kernels; slower, used to cross-check the series weight.
pub fn kernel_integral_ml_convolution(a: f64, m: u32, geom: &GeomInvariants) -> Result<Evaluation> {
    let params = FourierParams::new(a, m, Method::Integral)?;
    check_dim(&params, geom)?;
    ml_kernel_with(a, geom, WeightMode::Convolution, 1e-7)
}

fn closed(params: &FourierParams, geom: &GeomInvariants) -> Result<Evaluation> {
    let exact = |value, route| Evaluation { value, error: 1e-14 * (1.0 + geom.z), route };
    if same_a(params.a, 2.0) {
        return Ok(exact(kernel_a2(geom), Route::ClosedA2));
    }
    if same_a(params.a, 1.0) {
        return Ok(exact(kernel_a1(geom)?, Route::ClosedA1));
    }
    match params.n {
        Some(n) if params.m == 2 => Ok(exact(kernel_halfint_m2(n, geom)?, Route::HalfIntM2)),
        Some(n) if params.m % 2 == 0 => kernel_halfint_even_eval(n, params.m, geom),
        _ => domain(format!(
            "closed form needs a = 2, a = 1 or a = 2/n with even m (got a = {}, m = {})",
            params.a, params.m
        )),
    }
}

/// Kernel value at t = 1 by the requested method.
///
/// `Auto` picks a = 2 and a = 1 closed forms first, then for a = 2/n the
/// m = 2 sum, the even-m partial fractions (while their cancellation estimate
/// stays small) or (n <= 4) the convolution route, and
/// otherwise the series for z <= 5 with the Mittag-Leffler integral as the
/// fallback.
pub fn evaluate(params: &FourierParams, geom: &GeomInvariants, tol: f64) -> Result<Evaluation> {
    check_dim(params, geom)?;
    match params.method {
        Method::Series => series_kernel(params, geom, 1.0, tol),
        Method::Closed => closed(params, geom),
        Method::Convolution => match params.n {
            Some(n) if params.m == 2 => Ok(Evaluation {
                value: kernel_halfint_m2(n, geom)?,
                error: 1e-14,
                route: Route::HalfIntM2,
            }),
            Some(n) => kernel_halfint_any(n, params.m, geom),
            None => domain(format!("convolution route needs a = 2/n (got a = {})", params.a)),
        },
        Method::Integral => kernel_integral_ml(params.a, params.m, geom),
        Method::Auto => {
            if same_a(params.a, 2.0) || same_a(params.a, 1.0) {
                return closed(params, geom);
            }
            if let Some(n) = params.n {
                if params.m == 2 {
                    return closed(params, geom);
                }
                if params.m % 2 == 0 {
                    let e = closed(params, geom);
                    match e {
                        Ok(v) if v.error <= AUTO_CLOSED_MAX_ERROR || geom.z > SERIES_Z_LIMIT => return Ok(v),
                        _ => return series_kernel(params, geom, 1.0, tol).or(e),
                    }
                }
                // the nested convolution grows with n; beyond this the series is cheaper
                if n <= AUTO_CONVOLUTION_MAX_N || geom.z > SERIES_Z_LIMIT {
                    return kernel_halfint_any(n, params.m, geom);
                }
            }
            if geom.z <= SERIES_Z_LIMIT {
                if let Ok(v) = series_kernel(params, geom, 1.0, tol) {
                    return Ok(v);
                }
            }
            kernel_integral_ml(params.a, params.m, geom)
        }
    }
}

/// Closed form of the generating function sum_lambda c_lambda(eps) K_{2/n}^{2 lambda + 2}:
/// the m = 2 kernel at the shifted angle arccos(xi + eps).
pub fn generating_function(n: u32, geom: &GeomInvariants, eps: f64) -> Result<Complex64> {
    if n == 0 {
        return domain("generating_function: n must be positive");
    }
    let shifted = geom.xi + eps;
    if !(-1.0..=1.0).contains(&shifted) {
        return domain(format!("generating_function: xi + eps = {shifted} outside [-1, 1]"));
    }
    Ok(exp_sum(n, geom.z, shifted.acos()))
}

/// Partial sum over lambda = 0..=terms of
/// (2 e^(-i n pi/2) n^n z eps)^lambda / (2^(n lambda) Gamma(n lambda + 1)) K_{2/n}^{2 lambda + 2}.
///
/// The sign of the coefficient is the one that turns xi into xi + eps in the
/// Laplace-domain geometric series.
pub fn generating_partial_sum(n: u32, geom: &GeomInvariants, eps: f64, terms: usize) -> Result<Complex64> {
    if n == 0 {
        return domain("generating_partial_sum: n must be positive");
    }
    let nf = n as f64;
    let x = 2.0 * Complex64::from_polar(1.0, -nf * PI / 2.0) * nf.powf(nf) * geom.z * eps;
    let mut sum = Complex64::new(0.0, 0.0);
    for lam in 0..=terms {
        let m = 2 * lam as u32 + 2;
        let g = geom.with_dimension(m)?;
        let k = if lam == 0 { kernel_halfint_m2(n, &g)? } else { kernel_halfint_even(n, m, &g)? };
        let lf = lam as f64;
        let c = x.powu(lam as u32) * (-(nf * lf * 2.0f64.ln()) - ln_gamma(nf * lf + 1.0)).exp();
        sum += c * k;
    }
    Ok(sum)
}

/// Rectangular (z, xi) grid: z in [0, z_max] and xi in [-1, 1], both with
/// uniform spacing and endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub z_max: f64,
    pub nz: usize,
    pub nxi: usize,
}

impl ScanGrid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let at = |i: usize, n: usize| if n <= 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(self.nz * self.nxi);
        for i in 0..self.nz {
            for j in 0..self.nxi {
                out.push((self.z_max * at(i, self.nz), -1.0 + 2.0 * at(j, self.nxi)));
            }
        }
        out
    }
}

/// Maximum of |K_{2/n}^m| over a grid with its location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub max_abs: f64,
    pub z: f64,
    pub xi: f64,
    pub points: usize,
}

/// Scans |K_{2/n}^m| over the grid using the automatic route at each point.
pub fn bound_scan(n: u32, m: u32, grid: &ScanGrid) -> Result<BoundReport> {
    let params = FourierParams::half_integer(n, m, Method::Auto)?;
    let mut rep = BoundReport { max_abs: f64::NEG_INFINITY, z: 0.0, xi: 0.0, points: 0 };
    for (z, xi) in grid.points() {
        let g = GeomInvariants::new(z, xi, m)?;
        let v = evaluate(&params, &g, 1e-13)?.value.norm();
        rep.points += 1;
        if v > rep.max_abs {
            rep = BoundReport { max_abs: v, z, xi, points: rep.points };
        }
    }
    Ok(rep)
}
