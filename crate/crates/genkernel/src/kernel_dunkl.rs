//! Dunkl kernel and Dunkl Bessel function of the dihedral groups.
//!
//! I_k for odd k carries one multiplicity alpha; I_{2k} carries alpha and
//! beta on its two conjugacy classes of reflections. Both are described by
//! the same k: the Laplace-domain factor A(s, q) always has k roots.

use crate::error::{domain, Error, Result};
use crate::kernel_fourier::MlBesselIntegral;
use crate::laplace_rational::{inverse_laplace_rational, partial_fraction_expand, PolePowerSeries, PoleSet};
use crate::quadrature::{convolve_jacobi, gauss_jacobi_rule, QuadratureRule};
use crate::specfun::{
    bessel_j_reduced, gamma, gegenbauer_weighted_seq, jacobi_orthonormal, ln_gamma, BetaMeasure, StopRule,
};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Largest b = |z1||z2| accepted by the series and integral routes.
pub const DUNKL_B_LIMIT: f64 = 5.0;
/// Largest Poisson coefficient index used by the series.
pub const POISSON_JMAX: usize = 40;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Odd groups I_k or even groups I_{2k}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

/// Group and multiplicities. `kappa` is the exponent k(alpha + beta) (even)
/// or k alpha (odd) that enters every formula as Gamma(kappa + 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralParams {
    pub k: u32,
    pub parity: Parity,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub kappa: f64,
}

impl DihedralParams {
    /// The odd group I_k.
    pub fn odd(k: u32, alpha: f64) -> Result<Self> {
        if k == 0 || k % 2 == 0 {
            return domain(format!("odd dihedral group needs odd k, got {k}"));
        }
        check_multiplicity("alpha", alpha)?;
        Ok(Self { k, parity: Parity::Odd, alpha, beta: None, kappa: k as f64 * alpha })
    }

    /// The even group I_{2k}.
    pub fn even(k: u32, alpha: f64, beta: f64) -> Result<Self> {
        if k == 0 {
            return domain("even dihedral group needs k >= 1");
        }
        check_multiplicity("alpha", alpha)?;
        check_multiplicity("beta", beta)?;
        Ok(Self { k, parity: Parity::Even, alpha, beta: Some(beta), kappa: k as f64 * (alpha + beta) })
    }

    /// I_order, choosing the parity from the order.
    pub fn from_order(order: u32, alpha: f64, beta: Option<f64>) -> Result<Self> {
        match (order % 2, beta) {
            (_, _) if order == 0 => domain("group order must be positive"),
            (1, None) => Self::odd(order, alpha),
            (1, Some(_)) => domain(format!("I{order} has a single multiplicity; drop beta")),
            (_, Some(b)) => Self::even(order / 2, alpha, b),
            (_, None) => domain(format!("I{order} needs both alpha and beta")),
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity == Parity::Even
    }

    /// N in I_N.
    pub fn order(&self) -> u32 {
        match self.parity {
            Parity::Odd => self.k,
            Parity::Even => 2 * self.k,
        }
    }

    pub fn group_size(&self) -> usize {
        2 * self.order() as usize
    }

    /// alpha + beta (even) or alpha (odd).
    pub fn gamma_total(&self) -> f64 {
        self.alpha + self.beta.unwrap_or(0.0)
    }

    pub fn name(&self) -> String {
        format!("I{}", self.order())
    }
}

fn check_multiplicity(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("multiplicity {name} = {x} must be positive"));
    }
    Ok(())
}

/// A point of the plane in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralPoint {
    pub modulus: f64,
    pub angle: f64,
}

impl DihedralPoint {
    pub fn new(modulus: f64, angle: f64) -> Result<Self> {
        if !(modulus >= 0.0) || !modulus.is_finite() || !angle.is_finite() {
            return domain(format!("point needs finite modulus >= 0 and finite angle (got {modulus}, {angle})"));
        }
        Ok(Self { modulus, angle })
    }

    pub fn unit(angle: f64) -> Self {
        Self { modulus: 1.0, angle }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self { modulus: z.norm(), angle: if z == ZERO { 0.0 } else { z.arg() } }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.angle)
    }

    pub fn re(&self) -> f64 {
        self.modulus * self.angle.cos()
    }

    pub fn im(&self) -> f64 {
        self.modulus * self.angle.sin()
    }

    /// Direction on the unit circle.
    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// z e^(2 pi i j / order).
    pub fn rotated(&self, j: u32, order: u32) -> Self {
        Self { modulus: self.modulus, angle: self.angle + 2.0 * PI * j as f64 / order as f64 }
    }

    /// conj(z) e^(2 pi i j / order).
    pub fn reflected(&self, j: u32, order: u32) -> Self {
        Self { modulus: self.modulus, angle: -self.angle + 2.0 * PI * j as f64 / order as f64 }
    }
}

/// Images of z under I_N: the N rotations followed by the N reflections.
pub fn group_images(params: &DihedralParams, z: &DihedralPoint) -> Vec<DihedralPoint> {
    let n = params.order();
    (0..n).map(|j| z.rotated(j, n)).chain((0..n).map(|j| z.reflected(j, n))).collect()
}

/// Quantities of a pair (z1, z2) shared by all routes:
/// b = |z1||z2|, theta3 = Re(omega conj(eta)), ci = Im omega^k Im eta^k,
/// cr = Re omega^k Re eta^k and c11 = ci + cr = Re(omega^k conj(eta)^k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairInvariants {
    pub b: f64,
    pub theta3: f64,
    pub ci: f64,
    pub cr: f64,
    pub c11: f64,
    pub even: bool,
}

impl PairInvariants {
    pub fn new(params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint) -> Self {
        let k = params.k as f64;
        let (s1, c1) = (k * z1.angle).sin_cos();
        let (s2, c2) = (k * z2.angle).sin_cos();
        let ci = s1 * s2;
        let cr = c1 * c2;
        Self {
            b: z1.modulus * z2.modulus,
            theta3: (z1.angle - z2.angle).cos(),
            ci,
            cr,
            c11: ci + cr,
            even: params.is_even(),
        }
    }

    /// cos q(u, v) = ci u + cr v; odd groups have v = 1.
    pub fn c(&self, u: f64, v: f64) -> f64 {
        let v = if self.even { v } else { 1.0 };
        (self.ci * u + self.cr * v).clamp(-1.0, 1.0)
    }

    /// cos q(u - 1, v - 1) = c(u, v) - c11.
    pub fn c_shift(&self, u: f64, v: f64) -> f64 {
        let v = if self.even { v } else { 1.0 };
        self.ci * (u - 1.0) + self.cr * (v - 1.0)
    }
}

/// Roots -i b cos((q + 2 pi l)/k), l = 0..k, of A(s, q) with cos q = c.
pub fn a_roots(b: f64, k: u32, c: f64) -> Vec<Complex64> {
    let q = c.clamp(-1.0, 1.0).acos();
    (0..k)
        .map(|l| Complex64::new(0.0, -b * ((q + 2.0 * PI * l as f64) / k as f64).cos()))
        .collect()
}

/// A(s, q) = prod_l (s + i b cos((q + 2 pi l)/k)).
pub fn dihedral_a(s: Complex64, b: f64, k: u32, c: f64) -> Complex64 {
    a_roots(b, k, c).into_iter().map(|p| s - p).product()
}

/// A(s, q)^p taken factor by factor on the principal branch.
pub fn dihedral_a_power(s: Complex64, b: f64, k: u32, c: f64, p: f64) -> Complex64 {
    a_roots(b, k, c).into_iter().map(|r| (s - r).powf(p)).product()
}

/// Value with its error estimate and the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DunklEvaluation {
    pub value: Complex64,
    pub error: f64,
    pub route: DunklRoute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DunklRoute {
    Series,
    ResidueConvolution,
    PolePower,
    ClosedI1,
    ClosedI2,
    ClosedI4A,
    ClosedI4B,
    BesselSeries,
    BesselJacobi,
    BesselI4,
    AverageResidue,
    AveragePolePower,
}

impl DunklRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            DunklRoute::Series => "series",
            DunklRoute::ResidueConvolution => "m1",
            DunklRoute::PolePower => "m2",
            DunklRoute::ClosedI1 => "closed-i1",
            DunklRoute::ClosedI2 => "closed-i2",
            DunklRoute::ClosedI4A => "closed-i4a",
            DunklRoute::ClosedI4B => "closed-i4b",
            DunklRoute::BesselSeries => "bessel-series",
            DunklRoute::BesselJacobi => "bessel-jacobi",
            DunklRoute::BesselI4 => "bessel-i4",
            DunklRoute::AverageResidue => "average-m1",
            DunklRoute::AveragePolePower => "average-m2",
        }
    }
}

impl fmt::Display for DunklRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

// ---------------------------------------------------------------------------
// Quadrature plumbing

/// Tensor rule for dmu_alpha(u) dmu_beta(v); odd groups get the single node v = 1.
struct OuterRule {
    u: QuadratureRule,
    v: Option<QuadratureRule>,
}

impl OuterRule {
    fn asymmetric(params: &DihedralParams, n: usize) -> Result<Self> {
        let u = BetaMeasure::asymmetric(params.alpha)?.rule(n)?;
        let v = match params.beta {
            Some(beta) if params.is_even() => Some(BetaMeasure::asymmetric(beta)?.rule(n)?),
            _ => None,
        };
        Ok(Self { u, v })
    }

    fn sum<F: FnMut(f64, f64) -> Result<Complex64>>(&self, mut f: F) -> Result<Complex64> {
        let mut total = ZERO;
        for (&u, &wu) in self.u.nodes.iter().zip(&self.u.weights) {
            match &self.v {
                Some(rv) => {
                    let mut inner = ZERO;
                    for (&v, &wv) in rv.nodes.iter().zip(&rv.weights) {
                        inner += f(u, v)? * wv;
                    }
                    total += inner * wu;
                }
                None => total += f(u, 1.0)? * wu,
            }
        }
        Ok(total)
    }
}

/// Evaluates `f(n)` at growing node counts until two successive values agree
/// to `target`; the difference is the reported error.
fn refine<F: FnMut(usize) -> Result<Complex64>>(mut f: F, n0: usize, nmax: usize, target: f64) -> Result<(Complex64, f64)> {
    let mut n = n0;
    let mut prev = f(n)?;
    loop {
        let next = n + n / 2;
        let cur = f(next)?;
        let err = (cur - prev).norm();
        if err <= target {
            return Ok((cur, err));
        }
        if next >= nmax {
            return Err(Error::Quadrature { estimate: err, tolerance: target });
        }
        n = next;
        prev = cur;
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > DUNKL_B_LIMIT {
        return domain(format!("b = |z1||z2| = {b} exceeds {DUNKL_B_LIMIT}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Poisson kernel

struct PoissonInner {
    u: QuadratureRule,
    v: Option<QuadratureRule>,
    gamma: f64,
}

impl PoissonInner {
    fn new(params: &DihedralParams, n: usize) -> Result<Self> {
        let outer = OuterRule::asymmetric(params, n)?;
        Ok(Self { u: outer.u, v: outer.v, gamma: params.gamma_total() })
    }

    /// Analytic continuation of P(G; omega, zeta eta) in zeta. The factor
    /// 1 - zeta^(2k) of the prefactor cancels against the integrand.
    fn eval(&self, inv: &PairInvariants, k: u32, zeta: Complex64) -> Result<Complex64> {
        let zk = zeta.powu(k);
        let z2k = zk * zk;
        let den = ONE - 2.0 * inv.theta3 * zeta + zeta * zeta;
        if den.norm() < 1e-8 {
            return Err(Error::Singular(format!("Poisson prefactor denominator vanishes at zeta = {zeta}")));
        }
        let pre = (ONE - zeta * zeta) * (ONE - 2.0 * inv.c11 * zk + z2k) / den;
        let ex = -(self.gamma + 1.0);
        let mut bad = false;
        let mut term = |c: f64| {
            let d = ONE - 2.0 * c * zk + z2k;
            if d.norm() < 1e-8 {
                bad = true;
            }
            d.powf(ex)
        };
        let mut total = ZERO;
        for (&u, &wu) in self.u.nodes.iter().zip(&self.u.weights) {
            match &self.v {
                Some(rv) => {
                    let mut s = ZERO;
                    for (&v, &wv) in rv.nodes.iter().zip(&rv.weights) {
                        s += term(inv.c(u, v)) * wv;
                    }
                    total += s * wu;
                }
                None => total += term(inv.c(u, 1.0)) * wu,
            }
        }
        if bad {
            return Err(Error::Singular(format!("Poisson integrand denominator vanishes at zeta = {zeta}")));
        }
        Ok(pre * total)
    }
}

/// Poisson kernel P(G; z1, z2) for |z1||z2| < 1.
pub fn poisson_dihedral(params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<f64> {
    let inv = PairInvariants::new(params, z1, z2);
    let zeta = inv.b;
    if zeta >= 1.0 - 1e-6 {
        return domain(format!("Poisson kernel needs |z1||z2| < 1 - 1e-6, got {zeta}"));
    }
    let dir = PairInvariants { b: 1.0, ..inv };
    let zc = Complex64::new(zeta, 0.0);
    let mut n = 32;
    let mut prev = PoissonInner::new(params, n)?.eval(&dir, params.k, zc)?.re;
    while n < 512 {
        n *= 2;
        let cur = PoissonInner::new(params, n)?.eval(&dir, params.k, zc)?.re;
        if (cur - prev).abs() <= 1e-10 * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature { estimate: f64::NAN, tolerance: 1e-9 })
}

/// Taylor coefficients P_j(G; omega, eta) of the Poisson kernel in the
/// radial variable. `imag_residue` is the largest |Im c_j rho^j| among the
/// transformed samples; it is zero in exact arithmetic and measures the
/// rounding floor of the extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonCoefficients {
    pub values: Vec<f64>,
    pub imag_residue: f64,
}

/// Sampling radius of the coefficient extraction.
pub const POISSON_RADIUS: f64 = 0.5;

/// Coefficients j = 0..=jmax from an 8 jmax-point FFT on |zeta| = 1/2.
pub fn poisson_coefficients(
    params: &DihedralParams,
    omega: &DihedralPoint,
    eta: &DihedralPoint,
    jmax: usize,
) -> Result<PoissonCoefficients> {
    poisson_coefficients_with(params, omega, eta, jmax, (8 * jmax).max(16))
}

/// As [`poisson_coefficients`] with an explicit number of samples.
pub fn poisson_coefficients_with(
    params: &DihedralParams,
    omega: &DihedralPoint,
    eta: &DihedralPoint,
    jmax: usize,
    samples: usize,
) -> Result<PoissonCoefficients> {
    if jmax > POISSON_JMAX {
        return domain(format!("poisson_coefficients: jmax = {jmax} exceeds {POISSON_JMAX}"));
    }
    if samples < 4 * jmax.max(1) {
        return domain(format!("poisson_coefficients: {samples} samples is fewer than 4 jmax"));
    }
    let dir = PairInvariants { b: 1.0, ..PairInvariants::new(params, &DihedralPoint::unit(omega.angle), &DihedralPoint::unit(eta.angle)) };
    let inner = PoissonInner::new(params, 40)?;
    let mut buf = (0..samples)
        .map(|i| {
            let zeta = Complex64::from_polar(POISSON_RADIUS, 2.0 * PI * i as f64 / samples as f64);
            inner.eval(&dir, params.k, zeta)
        })
        .collect::<Result<Vec<_>>>()?;
    FftPlanner::<f64>::new().plan_fft_forward(samples).process(&mut buf);
    let mut values = Vec::with_capacity(jmax + 1);
    let mut imag_residue: f64 = 0.0;
    let mut scale = 1.0 / samples as f64;
    for c in buf.iter().take(jmax + 1) {
        imag_residue = imag_residue.max(c.im.abs() / samples as f64);
        values.push(c.re * scale);
        scale /= POISSON_RADIUS;
    }
    Ok(PoissonCoefficients { values, imag_residue })
}

// ---------------------------------------------------------------------------
// Series and Laplace domain

/// The Dunkl kernel with auxiliary time t,
///
/// E(t) = Gamma(kappa+1) sum_j (-i)^j (b/2)^j t^(j+kappa) J~_{j+kappa}(b t) P_j(omega, eta),
///
/// with J~_nu(x) = J_nu(x) (x/2)^(-nu); E(1) is the kernel and E(t) = t^kappa at b = 0.
pub fn dunkl_series(
    params: &DihedralParams,
    z1: &DihedralPoint,
    z2: &DihedralPoint,
    t: f64,
    tol: f64,
) -> Result<DunklEvaluation> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("dunkl_series: t = {t} must be finite and >= 0"));
    }
    let inv = PairInvariants::new(params, z1, z2);
    check_b(inv.b)?;
    let kappa = params.kappa;
    let done = |value: Complex64, error: f64| Ok(DunklEvaluation { value, error, route: DunklRoute::Series });
    if inv.b == 0.0 || t == 0.0 {
        return done(Complex64::new(t.powf(kappa), 0.0), 0.0);
    }
    let coeffs = poisson_coefficients(params, z1, z2, POISSON_JMAX)?;
    let x = inv.b * t;
    let ln_pre = ln_gamma(kappa + 1.0) + kappa * t.ln();
    let tol = tol.max(1e-16);
    let mut sum = ZERO;
    let mut stop = StopRule::default();
    let mut phase = ONE;
    let mut extraction = 0.0;
    for (j, &pj) in coeffs.values.iter().enumerate() {
        let nu = j as f64 + kappa;
        let mag = (ln_pre + j as f64 * (0.5 * x).ln()).exp() * bessel_j_reduced(nu, x)?;
        let term = phase * (mag * pj);
        sum += term;
        extraction += coeffs.imag_residue * mag.abs() * POISSON_RADIUS.powi(-(j as i32));
        if nu > x && stop.push(term.norm(), sum.norm().max(1.0), tol) {
            return done(sum, 3.0 * term.norm() + extraction);
        }
        phase *= -I;
    }
    Err(Error::NonConvergence { terms: POISSON_JMAX + 1 })
}

/// Laplace transform in t of [`dunkl_series`]:
///
/// Gamma(kappa+1) int int A(s, q(1,1)) / (B(s) A(s, q(u,v))^(gamma+1)) dmu_alpha(u) dmu_beta(v),
///
/// B(s) = s + i b theta3. Requires Re s >= 2b + 1.
pub fn laplace_dunkl(params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint, s: Complex64) -> Result<Complex64> {
    let inv = PairInvariants::new(params, z1, z2);
    let required = 2.0 * inv.b + 1.0;
    if s.re < required {
        return Err(Error::Branch { re_s: s.re, required });
    }
    let k = params.k;
    let g1 = params.gamma_total() + 1.0;
    let num = dihedral_a(s, inv.b, k, inv.c11) / (s + I * (inv.b * inv.theta3));
    let (v, _) = refine(
        |n| {
            OuterRule::asymmetric(params, n)?.sum(|u, v| Ok(num / dihedral_a_power(s, inv.b, k, inv.c(u, v), g1)))
        },
        24,
        400,
        1e-13 * num.norm().max(1.0),
    )?;
    Ok(v * gamma(params.kappa + 1.0))
}

/// g_alpha(t, q) = inverse Laplace transform of A(s, q)^(-alpha), by the
/// Mittag-Leffler Bessel integral, with the partial-fraction value when
/// alpha is an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GAlphaValue {
    pub value: Complex64,
    pub error: f64,
    pub partial_fraction: Option<Complex64>,
}

/// With R = s + r, r = sqrt(s^2 + b^2), A(s, q) = (R^k - d+)(R^k - d-)/(2R)^k,
/// d+- = e^(+-iq) (-ib)^k, so that
///
/// g_alpha(1, q) = 2^(k alpha - 1) [T(k alpha + 1) + b^2 T(k alpha - 1)]
///
/// in the notation of [`MlBesselIntegral`]; g(t; b) = t^(k alpha - 1) g(1; b t).
pub fn g_alpha(t: f64, q: f64, k: u32, alpha: f64, b: f64) -> Result<GAlphaValue> {
    if !(alpha > 0.0) || !(t >= 0.0) || !(b >= 0.0) || k == 0 {
        return domain(format!("g_alpha: need t >= 0, alpha > 0, b >= 0, k >= 1 (got {t}, {alpha}, {b}, {k})"));
    }
    let ka = k as f64 * alpha;
    let partial_fraction = if alpha.fract() == 0.0 && alpha <= 8.0 {
        Some(g_alpha_partial_fraction(t, q, k, alpha as usize, b)?)
    } else {
        None
    };
    if t == 0.0 {
        let v = if ka == 1.0 {
            ONE
        } else if ka > 1.0 {
            ZERO
        } else {
            return domain("g_alpha diverges at t = 0 for k alpha < 1");
        };
        return Ok(GAlphaValue { value: v, error: 0.0, partial_fraction });
    }
    let bt = b * t;
    let d0 = Complex64::new(0.0, -bt).powu(k);
    let dp = d0 * Complex64::from_polar(1.0, q);
    let dm = d0 * Complex64::from_polar(1.0, -q);
    let eng = MlBesselIntegral::new(k as f64, alpha, dp, dm, bt)?;
    let tol = 1e-10;
    let t1 = eng.eval(ka + 1.0, tol)?;
    let t2 = eng.eval(ka - 1.0, tol)?;
    let scale = 2f64.powf(ka - 1.0) * t.powf(ka - 1.0);
    Ok(GAlphaValue {
        value: (t1.value + t2.value * (bt * bt)) * scale,
        error: (t1.error + t2.error * bt * bt) * scale,
        partial_fraction,
    })
}

/// g_alpha by the convergent power series of prod (s - p_l)^(-alpha).
pub fn g_alpha_series(t: f64, q: f64, k: u32, alpha: f64, b: f64) -> Result<Complex64> {
    let factors: Vec<_> = a_roots(b, k, q.cos()).into_iter().map(|p| (p, alpha)).collect();
    PolePowerSeries::new(&factors, t.max(1.0))?.eval(t)
}

fn g_alpha_partial_fraction(t: f64, q: f64, k: u32, alpha: usize, b: f64) -> Result<Complex64> {
    let poles = PoleSet::from_points(a_roots(b, k, q.cos()).into_iter().map(|p| (p, alpha)), merge_tolerance(b));
    let pf = partial_fraction_expand(&PoleSet::empty(merge_tolerance(b)), &poles)?;
    Ok(inverse_laplace_rational(&pf, t))
}

fn merge_tolerance(b: f64) -> f64 {
    1e-7 * b.max(1.0)
}

// ---------------------------------------------------------------------------
// Integral representations

/// Residue-convolution route: at each (u, v) the rational factor
/// A(s, q(1,1)) / (B(s) A(s, q(u,v))) is inverted by partial fractions to
/// R(t), and E = Gamma(kappa+1) int int (R * g_gamma)(1) dmu_alpha dmu_beta.
/// The convolution uses a Gauss-Jacobi rule carrying tau^(k gamma - 1).
pub fn dunkl_kernel_m1(params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    let inv = PairInvariants::new(params, z1, z2);
    check_b(inv.b)?;
    let k = params.k;
    let gam = params.gamma_total();
    let tol = merge_tolerance(inv.b);
    let numerator = PoleSet::from_points(a_roots(inv.b, k, inv.c11).into_iter().map(|p| (p, 1)), tol);
    let pb = Complex64::new(0.0, -inv.b * inv.theta3);
    let node = |rule: &QuadratureRule, c: f64| -> Result<Complex64> {
        let roots = a_roots(inv.b, k, c);
        let den = PoleSet::from_points(roots.iter().map(|&p| (p, 1)).chain(std::iter::once((pb, 1))), tol);
        let pf = partial_fraction_expand(&numerator, &den)?;
        let factors: Vec<_> = roots.iter().map(|&p| (p, gam)).collect();
        let g = PolePowerSeries::new(&factors, 1.0)?;
        let mut bad = None;
        let v = convolve_jacobi(
            rule,
            |rest| inverse_laplace_rational(&pf, rest),
            |tau| {
                g.eval_smooth(tau).unwrap_or_else(|e| {
                    bad.get_or_insert(e);
                    ZERO
                })
            },
            1.0,
        );
        match bad {
            Some(e) => Err(e),
            None => Ok(v),
        }
    };
    let (value, error) = refine(
        |n| {
            let rule = gauss_jacobi_rule(n, k as f64 * gam - 1.0, 0.0)?;
            OuterRule::asymmetric(params, n)?.sum(|u, v| node(&rule, inv.c(u, v)))
        },
        16,
        160,
        1e-9,
    )?;
    let g = gamma(params.kappa + 1.0);
    Ok(DunklEvaluation { value: value * g, error: error * g, route: DunklRoute::ResidueConvolution })
}

/// Pole-power route:
///
/// E = Gamma(kappa+1) int int [h_gamma(1) + 2^(1-k) (-ib)^k cos q(u-1,v-1) h_(gamma+1)(1)] dmu_alpha dmu_beta,
///
/// with h_c the inverse transform of 1/(B(s) A(s, q(u,v))^c), summed as a power series.
pub fn dunkl_kernel_m2(params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    let inv = PairInvariants::new(params, z1, z2);
    check_b(inv.b)?;
    let k = params.k;
    let gam = params.gamma_total();
    let pb = Complex64::new(0.0, -inv.b * inv.theta3);
    let lead = Complex64::new(0.0, -inv.b).powu(k) * 2f64.powi(1 - k as i32);
    let node = |u: f64, v: f64| -> Result<Complex64> {
        let roots = a_roots(inv.b, k, inv.c(u, v));
        let h = |c: f64| -> Result<Complex64> {
            let factors: Vec<_> = std::iter::once((pb, 1.0)).chain(roots.iter().map(|&p| (p, c))).collect();
            PolePowerSeries::new(&factors, 1.0)?.eval(1.0)
        };
        Ok(h(gam)? + lead * inv.c_shift(u, v) * h(gam + 1.0)?)
    };
    let (value, error) = refine(|n| OuterRule::asymmetric(params, n)?.sum(node), 16, 160, 1e-10)?;
    let g = gamma(params.kappa + 1.0);
    Ok(DunklEvaluation { value: value * g, error: error * g, route: DunklRoute::PolePower })
}

/// I_1 kernel: int exp(-i(u Im z1 Im z2 + Re z1 Re z2)) dmu_alpha(u).
#[allow(non_snake_case)]
pub fn dunkl_I1(alpha: f64, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    let params = DihedralParams::odd(1, alpha)?;
    let (yy, xx) = (z1.im() * z2.im(), z1.re() * z2.re());
    let (value, error) = refine(
        |n| OuterRule::asymmetric(&params, n)?.sum(|u, _| Ok(Complex64::from_polar(1.0, -(u * yy + xx)))),
        16,
        400,
        1e-12,
    )?;
    Ok(DunklEvaluation { value, error, route: DunklRoute::ClosedI1 })
}

/// I_2 kernel: int int exp(-i(u Im z1 Im z2 + v Re z1 Re z2)) dmu_alpha(u) dmu_beta(v).
#[allow(non_snake_case)]
pub fn dunkl_I2(alpha: f64, beta: f64, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    let params = DihedralParams::even(1, alpha, beta)?;
    let (yy, xx) = (z1.im() * z2.im(), z1.re() * z2.re());
    let (value, error) = refine(
        |n| OuterRule::asymmetric(&params, n)?.sum(|u, v| Ok(Complex64::from_polar(1.0, -(u * yy + v * xx)))),
        16,
        400,
        1e-12,
    )?;
    Ok(DunklEvaluation { value, error, route: DunklRoute::ClosedI2 })
}

/// The two printed triple-integral forms of the I_4 kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum I4Variant {
    /// Form obtained from the residue route.
    A,
    /// Form obtained from the pole-power route.
    B,
}

/// I_4 kernel as a triple integral over (u, v, tau). With nu = alpha + beta - 1/2,
/// theta1^2 = (1 + c11)/2, theta2^2 = (1 + c(u,v))/2 and x = b theta2 (1 - tau), the
/// tau integrand carries the weight (1 - tau)^(2 nu) and the Bessel factors
/// (1-tau)^nu J_nu(x)/(b theta2)^nu = (1-tau)^(2nu) 2^(-nu) J~_nu(x).
#[allow(non_snake_case)]
pub fn dunkl_I4(alpha: f64, beta: f64, z1: &DihedralPoint, z2: &DihedralPoint, variant: I4Variant) -> Result<DunklEvaluation> {
    let params = DihedralParams::even(2, alpha, beta)?;
    let inv = PairInvariants::new(&params, z1, z2);
    check_b(inv.b)?;
    let b = inv.b;
    let gam = alpha + beta;
    let nu = gam - 0.5;
    let th1sq = 0.5 * (1.0 + inv.c11);
    let th3 = inv.theta3;
    let constant = PI.sqrt() * gamma(2.0 * gam + 1.0) / (2f64.powf(nu) * gamma(gam));
    let two_nu = 2f64.powf(-nu);
    let form_a = |th2sq: f64, tau: f64, jt: f64| -> Complex64 {
        let th2 = th2sq.max(0.0).sqrt();
        let arg = b * th2 * tau;
        let sin_over = b * tau * sinc(arg);
        let bracket = Complex64::from_polar(th1sq - th3 * th3, -b * th3 * tau)
            + (th1sq - th2sq) * Complex64::new(-arg.cos(), th3 * sin_over);
        bracket / (th2sq - th3 * th3) * (two_nu * jt)
    };
    let inner = |u: f64, v: f64, tau_rule: &[(f64, f64)]| -> Result<Complex64> {
        let th2sq = 0.5 * (1.0 + inv.c(u, v));
        let th2 = th2sq.sqrt();
        let mut s = ZERO;
        for &(tau, w) in tau_rule {
            let x = b * th2 * (1.0 - tau);
            let j0 = bessel_j_reduced(nu, x)?;
            let f = match variant {
                I4Variant::A => {
                    let gap = th2sq - th3 * th3;
                    if gap.abs() < 1e-7 {
                        // removable singularity: average of two nearby evaluations
                        let h = 1e-7;
                        let jp = bessel_j_reduced(nu, b * (th2sq + h).sqrt() * (1.0 - tau))?;
                        let jm = bessel_j_reduced(nu, b * (th2sq - h).max(0.0).sqrt() * (1.0 - tau))?;
                        0.5 * (form_a(th2sq + h, tau, jp) + form_a(th2sq - h, tau, jm))
                    } else {
                        form_a(th2sq, tau, j0)
                    }
                }
                I4Variant::B => {
                    let j1 = bessel_j_reduced(nu + 1.0, x)?;
                    let second = b * b * (th1sq - th2sq) / (2.0 * gam) * (1.0 - tau).powi(2) * (0.5 * two_nu) * j1;
                    Complex64::from_polar(1.0, -b * th3 * tau) * (two_nu * j0 + second)
                }
            };
            s += f * w;
        }
        Ok(s)
    };
    let (value, error) = refine(
        |n| {
            let rule = gauss_jacobi_rule(n, 0.0, 2.0 * nu)?;
            let scale = 0.5f64.powf(2.0 * nu + 1.0);
            let tau_rule: Vec<(f64, f64)> =
                rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| (0.5 * (1.0 + x), w * scale)).collect();
            OuterRule::asymmetric(&params, n)?.sum(|u, v| inner(u, v, &tau_rule))
        },
        16,
        120,
        1e-9,
    )?;
    let route = match variant {
        I4Variant::A => DunklRoute::ClosedI4A,
        I4Variant::B => DunklRoute::ClosedI4B,
    };
    Ok(DunklEvaluation { value: value * constant, error: error * constant, route })
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

// ---------------------------------------------------------------------------
// Dunkl Bessel function

/// Which kernel route feeds the group average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelRoute {
    M1,
    M2,
}

fn kernel_by(route: KernelRoute, params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    match route {
        KernelRoute::M1 => dunkl_kernel_m1(params, z1, z2),
        KernelRoute::M2 => dunkl_kernel_m2(params, z1, z2),
    }
}

/// D(z1, z2) = (1/|G|) sum_g E(z1, g z2).
pub fn dunkl_group_average(
    params: &DihedralParams,
    z1: &DihedralPoint,
    z2: &DihedralPoint,
    route: KernelRoute,
) -> Result<DunklEvaluation> {
    let images = group_images(params, z2);
    let mut vals = images.iter().map(|g| kernel_by(route, params, z1, g)).collect::<Result<Vec<_>>>()?;
    // order-independent summation so that D(z1, g z2) reproduces D(z1, z2)
    vals.sort_by(|a, b| {
        (a.value.re, a.value.im).partial_cmp(&(b.value.re, b.value.im)).unwrap_or(std::cmp::Ordering::Equal)
    });
    let n = vals.len() as f64;
    let value = vals.iter().map(|e| e.value).sum::<Complex64>() / n;
    let error = vals.iter().map(|e| e.error).sum::<f64>() / n;
    let route = match route {
        KernelRoute::M1 => DunklRoute::AverageResidue,
        KernelRoute::M2 => DunklRoute::AveragePolePower,
    };
    Ok(DunklEvaluation { value, error, route })
}

fn even_params(params: &DihedralParams) -> Result<f64> {
    match (params.parity, params.beta) {
        (Parity::Even, Some(beta)) => Ok(beta),
        _ => domain(format!("the Dunkl Bessel series is available for even groups only, not {}", params.name())),
    }
}

/// Factors e_j = (b/2)^(kj) J~_{kj+kappa}(b) for j = 0..J, stopping once the
/// Gegenbauer-weighted tail bound drops below 1e-17.
fn bessel_factors(k: u32, kappa: f64, lambda: f64, b: f64, step: usize) -> Result<Vec<f64>> {
    const MAX: usize = 400;
    let mut out = Vec::new();
    let mut small = 0;
    for j in 0..MAX {
        let jf = j as f64;
        let nu = k as f64 * jf + kappa;
        let e = if j == 0 { 1.0 } else { (k as f64 * jf * (0.5 * b).ln()).exp() } * bessel_j_reduced(nu, b)?;
        out.push(e);
        if j % step == 0 {
            // |(j+l)/l C_j^l| <= (j+l)/l (2l)_j / j!
            let ln_w = ((jf + lambda) / lambda).ln() + ln_gamma(jf + 2.0 * lambda) - ln_gamma(jf + 1.0) - ln_gamma(2.0 * lambda);
            if e.abs() * ln_w.exp() < 1e-17 && nu > b {
                small += 1;
                if small >= 2 {
                    return Ok(out);
                }
            } else {
                small = 0;
            }
        }
    }
    Err(Error::NonConvergence { terms: MAX })
}

/// One branch f^+ or f^- of the series integrand with auxiliary time t:
///
/// f(t) = Gamma(kappa+1) t^kappa sum_j (j+g)/g C_j^g(zarg) (sign i^k)^j (bt/2)^(kj) J~_{kj+kappa}(bt),
///
/// g = alpha + beta. The constant phase e^(i pi kappa/2) is omitted, which
/// makes D real and equal to 1 at b = 0.
pub fn bessel_branch_series(params: &DihedralParams, b: f64, zarg: f64, plus: bool, t: f64) -> Result<Complex64> {
    even_params(params)?;
    let lam = params.gamma_total();
    let x = b * t;
    let e = bessel_factors(params.k, params.kappa, lam, x, 1)?;
    let w = gegenbauer_weighted_seq(e.len() - 1, lam, zarg)?;
    let unit = I.powu(params.k) * if plus { 1.0 } else { -1.0 };
    let mut ph = ONE;
    let mut s = ZERO;
    for (ej, wj) in e.iter().zip(&w) {
        s += ph * (ej * wj);
        ph *= unit;
    }
    Ok(s * (gamma(params.kappa + 1.0) * t.powf(params.kappa)))
}

/// Laplace transform of [`bessel_branch_series`]:
/// Gamma(kappa+1) 2^kappa / (r R^kappa) (1 - w^2)/(1 - 2 zarg w + w^2)^(g+1), w = +-(ib/R)^k.
pub fn bessel_branch_laplace(params: &DihedralParams, b: f64, zarg: f64, plus: bool, s: Complex64) -> Result<Complex64> {
    even_params(params)?;
    if s.re < 2.0 * b + 1.0 {
        return Err(Error::Branch { re_s: s.re, required: 2.0 * b + 1.0 });
    }
    let r = (s * s + b * b).sqrt();
    let big_r = s + r;
    let w = (I * b / big_r).powu(params.k) * if plus { 1.0 } else { -1.0 };
    let kappa = params.kappa;
    let lam = params.gamma_total();
    let pre = gamma(kappa + 1.0) * 2f64.powf(kappa) / (r * big_r.powf(kappa));
    Ok(pre * (ONE - w * w) / (ONE - 2.0 * zarg * w + w * w).powf(lam + 1.0))
}

/// z_{phi1,phi2}(u, v) = u cos phi1 cos phi2 + v sin phi1 sin phi2 at the angles k phi.
fn z_arg(k: u32, z1: &DihedralPoint, z2: &DihedralPoint) -> (f64, f64) {
    let kf = k as f64;
    ((kf * z1.angle).cos() * (kf * z2.angle).cos(), (kf * z1.angle).sin() * (kf * z2.angle).sin())
}

/// Dunkl Bessel function of I_{2k} from the product-formula series
///
/// D = Gamma(kappa+1) int int sum_{j even} (j+g)/g C_j^g(Z) i^(kj) (b/2)^(kj) J~_{kj+kappa}(b) dmu^beta(u) dmu^alpha(v),
///
/// Z = u cos k phi1 cos k phi2 + v sin k phi1 sin k phi2, with mu^a the symmetric
/// beta measures. The u variable pairs with beta.
pub fn dunkl_bessel_series(params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    let beta = even_params(params)?;
    let b = z1.modulus * z2.modulus;
    check_b(b)?;
    let lam = params.gamma_total();
    let k = params.k;
    let e = bessel_factors(k, params.kappa, lam, b, 2)?;
    let jmax = e.len() - 1;
    let ik = I.powu(k);
    let phases: Vec<Complex64> = (0..=jmax).map(|j| if j % 2 == 0 { ik.powu(j as u32) * e[j] } else { ZERO }).collect();
    let (cc, ss) = z_arg(k, z1, z2);
    let mu_u = BetaMeasure::symmetric(beta)?;
    let mu_v = BetaMeasure::symmetric(params.alpha)?;
    let (value, error) = refine(
        |n| {
            let ru = mu_u.rule(n)?;
            let rv = mu_v.rule(n)?;
            let mut total = ZERO;
            for (&u, &wu) in ru.nodes.iter().zip(&ru.weights) {
                let mut inner = ZERO;
                for (&v, &wv) in rv.nodes.iter().zip(&rv.weights) {
                    let z = (u * cc + v * ss).clamp(-1.0, 1.0);
                    let w = gegenbauer_weighted_seq(jmax, lam, z)?;
                    let s: Complex64 = phases.iter().zip(&w).step_by(2).map(|(p, wj)| p * wj).sum();
                    inner += s * wv;
                }
                total += inner * wu;
            }
            Ok(total)
        },
        16,
        240,
        1e-11,
    )?;
    let g = gamma(params.kappa + 1.0);
    Ok(DunklEvaluation { value: value * g, error: error * g, route: DunklRoute::BesselSeries })
}

/// Dunkl Bessel function of I_{2k} as the Jacobi series
///
/// D = Gamma(kappa+1) sum_j i^(2kj) (b/2)^(2kj) J~_{2kj+kappa}(b) p_j(cos 2k phi1) p_j(cos 2k phi2),
///
/// p_j orthonormal for the probability weight (1-x)^(alpha-1/2) (1+x)^(beta-1/2).
pub fn dunkl_bessel_jacobi(params: &DihedralParams, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    let beta = even_params(params)?;
    let b = z1.modulus * z2.modulus;
    check_b(b)?;
    let k = params.k;
    let (a, bb) = (params.alpha - 0.5, beta - 0.5);
    let x1 = (2.0 * k as f64 * z1.angle).cos().clamp(-1.0, 1.0);
    let x2 = (2.0 * k as f64 * z2.angle).cos().clamp(-1.0, 1.0);
    let step = Complex64::new(-1.0, 0.0).powu(k);
    let mut ph = ONE;
    let mut sum = ZERO;
    let mut stop = StopRule::default();
    for j in 0..200usize {
        let nu = 2.0 * k as f64 * j as f64 + params.kappa;
        let e = if j == 0 { 1.0 } else { (2.0 * k as f64 * j as f64 * (0.5 * b).ln()).exp() } * bessel_j_reduced(nu, b)?;
        let term = ph * (e * jacobi_orthonormal(j, a, bb, x1)? * jacobi_orthonormal(j, a, bb, x2)?);
        sum += term;
        if nu > b && stop.push(term.norm(), sum.norm().max(1.0), 1e-16) {
            let g = gamma(params.kappa + 1.0);
            return Ok(DunklEvaluation { value: sum * g, error: 3.0 * term.norm() * g, route: DunklRoute::BesselJacobi });
        }
        ph *= step;
    }
    Err(Error::NonConvergence { terms: 200 })
}

/// Dunkl Bessel function of I_4 as a double integral:
///
/// D = Gamma(g + 1/2)/2 int int (J~_{g-1/2}(b1) + J~_{g-1/2}(b2)) dmu^beta(u) dmu^alpha(v),
///
/// b1 = b sqrt((1 - Z)/2), b2 = b sqrt((1 + Z)/2), Z at the angles 2 phi.
#[allow(non_snake_case)]
pub fn dunkl_bessel_I4(alpha: f64, beta: f64, z1: &DihedralPoint, z2: &DihedralPoint) -> Result<DunklEvaluation> {
    let params = DihedralParams::even(2, alpha, beta)?;
    let b = z1.modulus * z2.modulus;
    check_b(b)?;
    let nu = params.gamma_total() - 0.5;
    let (cc, ss) = z_arg(2, z1, z2);
    let mu_u = BetaMeasure::symmetric(beta)?;
    let mu_v = BetaMeasure::symmetric(alpha)?;
    let (value, error) = refine(
        |n| {
            let ru = mu_u.rule(n)?;
            let rv = mu_v.rule(n)?;
            let mut total = 0.0;
            for (&u, &wu) in ru.nodes.iter().zip(&ru.weights) {
                let mut inner = 0.0;
                for (&v, &wv) in rv.nodes.iter().zip(&rv.weights) {
                    let z = (u * cc + v * ss).clamp(-1.0, 1.0);
                    let b1 = b * (0.5 * (1.0 - z)).sqrt();
                    let b2 = b * (0.5 * (1.0 + z)).sqrt();
                    inner += (bessel_j_reduced(nu, b1)? + bessel_j_reduced(nu, b2)?) * wv;
                }
                total += inner * wu;
            }
            Ok(Complex64::new(total, 0.0))
        },
        16,
        240,
        1e-12,
    )?;
    let c = 0.5 * gamma(nu + 1.0);
    Ok(DunklEvaluation { value: value * c, error: error * c, route: DunklRoute::BesselI4 })
}

// ---------------------------------------------------------------------------
// Dispatch

/// Requested strategy for the Dunkl kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DunklMethod {
    Series,
    Closed,
    M1,
    M2,
    Auto,
}

impl FromStr for DunklMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Self::Series),
            "closed" => Ok(Self::Closed),
            "m1" | "residue" => Ok(Self::M1),
            "m2" | "integral" => Ok(Self::M2),
            "auto" => Ok(Self::Auto),
            _ => domain(format!("unknown Dunkl method '{s}' (series, closed, m1, m2, auto)")),
        }
    }
}

/// Dunkl kernel E(z1, z2). Closed forms exist for I1, I2 and I4; automatic
/// selection uses the pole-power route.
pub fn dunkl_evaluate(
    params: &DihedralParams,
    z1: &DihedralPoint,
    z2: &DihedralPoint,
    method: DunklMethod,
) -> Result<DunklEvaluation> {
    match method {
        DunklMethod::Series => dunkl_series(params, z1, z2, 1.0, 1e-14),
        DunklMethod::M1 => dunkl_kernel_m1(params, z1, z2),
        DunklMethod::M2 | DunklMethod::Auto => dunkl_kernel_m2(params, z1, z2),
        DunklMethod::Closed => match (params.order(), params.beta) {
            (1, _) => dunkl_I1(params.alpha, z1, z2),
            (2, Some(beta)) => dunkl_I2(params.alpha, beta, z1, z2),
            (4, Some(beta)) => dunkl_I4(params.alpha, beta, z1, z2, I4Variant::B),
            _ => domain(format!("no closed form for the Dunkl kernel of {}", params.name())),
        },
    }
}

/// Requested strategy for the Dunkl Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselMethod {
    Series,
    Closed,
    Jacobi,
    AverageM1,
    AverageM2,
    Auto,
}

impl FromStr for BesselMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Self::Series),
            "closed" => Ok(Self::Closed),
            "jacobi" => Ok(Self::Jacobi),
            "average-m1" | "m1" => Ok(Self::AverageM1),
            "average-m2" | "average" | "m2" => Ok(Self::AverageM2),
            "auto" => Ok(Self::Auto),
            _ => domain(format!(
                "unknown Dunkl Bessel method '{s}' (series, closed, jacobi, average-m1, average-m2, auto)"
            )),
        }
    }
}

/// Dunkl Bessel function D(z1, z2). Automatic selection uses the series for
/// even groups and the group average otherwise.
pub fn dunkl_bessel_evaluate(
    params: &DihedralParams,
    z1: &DihedralPoint,
    z2: &DihedralPoint,
    method: BesselMethod,
) -> Result<DunklEvaluation> {
    match method {
        BesselMethod::Series => dunkl_bessel_series(params, z1, z2),
        BesselMethod::Jacobi => dunkl_bessel_jacobi(params, z1, z2),
        BesselMethod::AverageM1 => dunkl_group_average(params, z1, z2, KernelRoute::M1),
        BesselMethod::AverageM2 => dunkl_group_average(params, z1, z2, KernelRoute::M2),
        BesselMethod::Closed => match (params.order(), params.beta) {
            (4, Some(beta)) => dunkl_bessel_I4(params.alpha, beta, z1, z2),
            _ => domain(format!("no closed form for the Dunkl Bessel function of {}", params.name())),
        },
        BesselMethod::Auto if params.is_even() => dunkl_bessel_series(params, z1, z2),
        BesselMethod::Auto => dunkl_group_average(params, z1, z2, KernelRoute::M2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(r: f64, a: f64) -> DihedralPoint {
        DihedralPoint::new(r, a).unwrap()
    }

    #[test]
    fn params_from_order() {
        let p = DihedralParams::from_order(4, 0.5, Some(0.8)).unwrap();
        assert_eq!((p.k, p.parity, p.group_size()), (2, Parity::Even, 8));
        assert!((p.kappa - 2.6).abs() < 1e-15);
        assert!(DihedralParams::from_order(3, 0.5, Some(0.8)).is_err());
        assert!(DihedralParams::from_order(4, 0.5, None).is_err());
        assert!(DihedralParams::odd(3, 0.0).is_err());
    }

    #[test]
    fn a_factor_chebyshev_form() {
        // A(s, q) = (-ib)^k 2^(1-k) (T_k(is/b) - cos q)
        let s = Complex64::new(0.7, -0.3);
        let (b, c) = (1.3, 0.4);
        for k in 1..6u32 {
            let x = I * s / b;
            let tk = (x.acos() * k as f64).cos();
            let want = Complex64::new(0.0, -b).powu(k) * 2f64.powi(1 - k as i32) * (tk - c);
            assert!((dihedral_a(s, b, k, c) - want).norm() < 1e-12 * want.norm());
        }
    }

    #[test]
    fn group_images_close_under_action() {
        let p = DihedralParams::from_order(3, 0.5, None).unwrap();
        let imgs = group_images(&p, &pt(1.0, 0.2));
        assert_eq!(imgs.len(), 6);
        assert!((imgs[3].to_complex() - pt(1.0, -0.2).to_complex()).norm() < 1e-15);
    }
}
