//! Scalar special functions: Bessel J, Gegenbauer and Jacobi polynomials,
//! generalized Mittag-Leffler, Humbert Phi2, and the beta measures used by the
//! dihedral kernels.

use crate::error::{domain, Error, Result};
use crate::quadrature::{gauss_jacobi_rule, QuadratureRule};
use num_complex::Complex64;

/// Maximum modulus of a Mittag-Leffler argument evaluated by plain series.
pub const ML_ENVELOPE: f64 = 30.0;
/// Maximum modulus of either Humbert Phi2 argument.
pub const PHI2_ENVELOPE: f64 = 20.0;

const SERIES_EPS: f64 = 1e-17;
const MAX_ML_TERMS: usize = 4000;

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// 1/Gamma(x), zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

pub fn beta_fn(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Pochhammer symbol (x)_n.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x + i as f64))
}

/// Tracks the "three consecutive small terms" stopping rule.
#[derive(Debug, Default)]
pub(crate) struct StopRule {
    small: u32,
}

impl StopRule {
    pub(crate) fn push(&mut self, term: f64, scale: f64, tol: f64) -> bool {
        if term <= tol * scale || term == 0.0 {
            self.small += 1;
        } else {
            self.small = 0;
        }
        self.small >= 3
    }
}

/// Bessel function of the first kind J_nu(x) for real order nu >= -1 and x >= 0.
///
/// Power series where it is free of cancellation, Miller backward recurrence
/// with the Neumann-sum normalization otherwise. Absolute error is below
/// 1e-13 for x <= 50.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !x.is_finite() {
        return domain(format!("bessel_j: non-finite input nu={nu}, x={x}"));
    }
    if nu < -1.0 {
        return domain(format!("bessel_j: order {nu} < -1"));
    }
    if x < 0.0 {
        return domain(format!("bessel_j: argument {x} < 0"));
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 || nu == -1.0 {
            Ok(0.0)
        } else {
            domain(format!("bessel_j: J_{nu}(0) is unbounded"))
        };
    }
    if nu == -1.0 {
        return bessel_j(1.0, x).map(|v| -v);
    }
    if x <= 4.0 || x * x <= 4.0 * (nu + 1.0) {
        Ok(bessel_series(nu, x))
    } else if nu < 0.0 {
        let mu = nu + 1.0;
        let (j0, j1) = bessel_miller(mu, x, 1);
        Ok(2.0 * mu / x * j0 - j1)
    } else {
        Ok(bessel_miller(nu, x, 0).0)
    }
}

/// Reduced Bessel function J_nu(x) (x/2)^(-nu), finite at x = 0 with value
/// 1/Gamma(nu+1). Requires nu > -1.
pub fn bessel_j_reduced(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) || !nu.is_finite() {
        return domain(format!("bessel_j_reduced: order {nu} must exceed -1"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("bessel_j_reduced: argument {x} must be finite and >= 0"));
    }
    if x <= 4.0 || x * x <= 4.0 * (nu + 1.0) {
        let mh2 = -0.25 * x * x;
        let mut term = rgamma(nu + 1.0);
        let mut sum = term;
        let mut stop = StopRule::default();
        for k in 1..500 {
            let kf = k as f64;
            term *= mh2 / (kf * (kf + nu));
            sum += term;
            if stop.push(term.abs(), sum.abs(), SERIES_EPS) {
                break;
            }
        }
        return Ok(sum);
    }
    Ok(bessel_j(nu, x)? * (0.5 * x).powf(-nu))
}

fn bessel_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mh2 = -h * h;
    let mut term = (nu * h.ln() - ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    let mut stop = StopRule::default();
    for k in 1..500 {
        let kf = k as f64;
        term *= mh2 / (kf * (kf + nu));
        sum += term;
        if stop.push(term.abs(), sum.abs(), SERIES_EPS) {
            break;
        }
    }
    sum
}

/// Returns (J_nu, J_{nu+1}) when `extra == 1`, (J_nu, _) otherwise. Requires nu >= 0.
fn bessel_miller(nu: f64, x: f64, extra: usize) -> (f64, f64) {
    let n = nu.floor() as usize;
    let mu0 = nu - n as f64;
    let top = nu.max(x);
    let start = (top + (160.0 * top).sqrt()).ceil() as usize + 20 + n;
    let start = start + (start % 2);
    // d_i = Gamma(mu0 + i) / i! for the normalization sum.
    let half = start / 2 + 1;
    let mut d = vec![0.0; half + 1];
    if half >= 1 {
        d[1] = gamma(mu0 + 1.0);
        for i in 1..half {
            d[i + 1] = d[i] * (mu0 + i as f64) / (i as f64 + 1.0);
        }
    }
    let mut jp = 0.0; // J_{mu0 + k + 1}
    let mut jc = 1e-30; // J_{mu0 + k}
    let mut norm = 0.0;
    let mut target = 0.0;
    let mut target1 = 0.0;
    let mut k = start;
    loop {
        if k == n {
            target = jc;
        }
        if k == n + extra && extra > 0 {
            target1 = jc;
        }
        if k % 2 == 0 {
            if k == 0 {
                norm += gamma(mu0 + 1.0) * jc;
            } else {
                let i = k / 2;
                norm += (mu0 + k as f64) * d[i] * jc;
            }
        }
        if k == 0 {
            break;
        }
        let mu = mu0 + k as f64;
        let jm = 2.0 * mu / x * jc - jp;
        jp = jc;
        jc = jm;
        k -= 1;
        if jc.abs() > 1e200 {
            jc *= 1e-200;
            jp *= 1e-200;
            norm *= 1e-200;
            target *= 1e-200;
            target1 *= 1e-200;
        }
    }
    let scale = (0.5 * x).powf(mu0) / norm;
    (target * scale, target1 * scale)
}

/// Gegenbauer polynomial C_n^lambda(x) by three-term recurrence.
pub fn gegenbauer(n: usize, lambda: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut c0 = 1.0;
    let mut c1 = 2.0 * lambda * x;
    for k in 1..n {
        let kf = k as f64;
        let c2 = (2.0 * (kf + lambda) * x * c1 - (kf + 2.0 * lambda - 1.0) * c0) / (kf + 1.0);
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// ((lambda+j)/lambda) C_j^lambda(xi), with the Chebyshev limit at lambda = 0.
pub fn gegenbauer_weighted(j: usize, lambda: f64, xi: f64) -> Result<f64> {
    check_unit(xi)?;
    if lambda < 0.0 {
        return domain(format!("gegenbauer_weighted: lambda {lambda} < 0"));
    }
    if lambda == 0.0 {
        return Ok(if j == 0 {
            1.0
        } else {
            2.0 * (j as f64 * xi.acos()).cos()
        });
    }
    Ok((lambda + j as f64) / lambda * gegenbauer(j, lambda, xi))
}

/// Weighted Gegenbauer values for j = 0..=jmax in one recurrence pass.
pub fn gegenbauer_weighted_seq(jmax: usize, lambda: f64, xi: f64) -> Result<Vec<f64>> {
    check_unit(xi)?;
    let mut out = Vec::with_capacity(jmax + 1);
    if lambda == 0.0 {
        let q = xi.acos();
        out.push(1.0);
        for j in 1..=jmax {
            out.push(2.0 * (j as f64 * q).cos());
        }
        return Ok(out);
    }
    if lambda < 0.0 {
        return domain(format!("gegenbauer_weighted_seq: lambda {lambda} < 0"));
    }
    let mut c0 = 1.0;
    let mut c1 = 2.0 * lambda * xi;
    out.push(1.0);
    if jmax >= 1 {
        out.push((lambda + 1.0) / lambda * c1);
    }
    for k in 1..jmax {
        let kf = k as f64;
        let c2 = (2.0 * (kf + lambda) * xi * c1 - (kf + 2.0 * lambda - 1.0) * c0) / (kf + 1.0);
        c0 = c1;
        c1 = c2;
        out.push((lambda + kf + 1.0) / lambda * c1);
    }
    Ok(out)
}

fn check_unit(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) || x.is_nan() {
        return domain(format!("argument {x} outside [-1, 1]"));
    }
    Ok(())
}

/// Classical Jacobi polynomial P_n^{(a,b)}(x).
pub fn jacobi_p(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Jacobi polynomial orthonormal against the probability-normalized weight
/// proportional to (1-x)^a (1+x)^b, so that p_0 = 1.
pub fn jacobi_orthonormal(j: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    if a <= -1.0 || b <= -1.0 || !a.is_finite() || !b.is_finite() {
        return domain(format!("jacobi_orthonormal: parameters ({a}, {b}) must exceed -1"));
    }
    check_unit(x)?;
    if j == 0 {
        return Ok(1.0);
    }
    let n = j as f64;
    let ln_mass = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0);
    let ln_h = (a + b + 1.0) * std::f64::consts::LN_2 - (2.0 * n + a + b + 1.0).ln()
        + ln_gamma(n + a + 1.0)
        + ln_gamma(n + b + 1.0)
        - ln_gamma(n + a + b + 1.0)
        - ln_gamma(n + 1.0);
    Ok(jacobi_p(j, a, b, x) * (0.5 * (ln_mass - ln_h)).exp())
}

/// Parameters of E^delta_{eps,gamma}(b t^eps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLSpec {
    pub eps: f64,
    pub gamma: f64,
    pub delta: f64,
    pub b: Complex64,
}

impl MLSpec {
    pub fn new(eps: f64, gamma: f64, delta: f64, b: Complex64) -> Result<Self> {
        if !(eps > 0.0 && gamma > 0.0 && delta > 0.0) {
            return domain(format!(
                "MLSpec: eps, gamma, delta must be positive (got {eps}, {gamma}, {delta})"
            ));
        }
        if !(b.re.is_finite() && b.im.is_finite()) {
            return domain("MLSpec: non-finite scale");
        }
        Ok(Self {
            eps,
            gamma,
            delta,
            b,
        })
    }
}

/// E^delta_{eps,gamma}(b t^eps) by its defining series.
///
/// The truncation error is below 1e-11 relative to the sum of term moduli;
/// for arguments near the negative real axis that sum can exceed the value
/// itself by the cancellation factor.
pub fn mittag_leffler(spec: &MLSpec, t: f64) -> Result<Complex64> {
    if t < 0.0 || !t.is_finite() {
        return domain(format!("mittag_leffler: t = {t} must be >= 0"));
    }
    let z = if t == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        spec.b * t.powf(spec.eps)
    };
    ml_series(spec.eps, spec.gamma, spec.delta, z)
}

/// E^delta_{eps,gamma}(z) for |z| within the series envelope.
pub fn ml_series(eps: f64, gamma_: f64, delta: f64, z: Complex64) -> Result<Complex64> {
    let modulus = z.norm();
    if modulus > ML_ENVELOPE {
        return Err(Error::Envelope {
            modulus,
            limit: ML_ENVELOPE,
        });
    }
    let mut sum = Complex64::new(rgamma(gamma_), 0.0);
    if modulus == 0.0 {
        return Ok(sum);
    }
    // coefficient (delta)_n / n!, kept in log form to avoid overflow
    let mut ln_c = 0.0;
    let ln_z = modulus.ln();
    let arg = z.arg();
    let mut stop = StopRule::default();
    let mut abs_sum = sum.norm();
    for n in 1..MAX_ML_TERMS {
        let nf = n as f64;
        ln_c += ((delta + nf - 1.0) / nf).ln();
        let mag = (ln_c + nf * ln_z - ln_gamma(eps * nf + gamma_)).exp();
        let term = Complex64::from_polar(mag, nf * arg);
        sum += term;
        abs_sum += mag;
        if stop.push(mag, abs_sum, SERIES_EPS) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        terms: MAX_ML_TERMS,
    })
}

/// Humbert confluent series Phi2(c1, c2; c3; w, z), summed over anti-diagonals.
pub fn humbert_phi2(c1: f64, c2: f64, c3: f64, w: Complex64, z: Complex64) -> Result<Complex64> {
    for v in [w.norm(), z.norm()] {
        if v > PHI2_ENVELOPE {
            return Err(Error::Envelope {
                modulus: v,
                limit: PHI2_ENVELOPE,
            });
        }
    }
    if c3 <= 0.0 && c3 == c3.floor() {
        return domain(format!("humbert_phi2: c3 = {c3} is a non-positive integer"));
    }
    const NMAX: usize = 600;
    let mut a = Vec::with_capacity(NMAX);
    let mut bcoef = Vec::with_capacity(NMAX);
    let mut ta = Complex64::new(1.0, 0.0);
    let mut tb = Complex64::new(1.0, 0.0);
    a.push(ta);
    bcoef.push(tb);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut c3n = 1.0; // (c3)_N
    let mut stop = StopRule::default();
    let mut scale = 1.0f64;
    for n in 1..NMAX {
        let nf = n as f64;
        ta *= w * ((c1 + nf - 1.0) / nf);
        tb *= z * ((c2 + nf - 1.0) / nf);
        a.push(ta);
        bcoef.push(tb);
        c3n *= c3 + nf - 1.0;
        let mut diag = Complex64::new(0.0, 0.0);
        let mut diag_abs = 0.0;
        for k in 0..=n {
            let t = a[k] * bcoef[n - k];
            diag += t;
            diag_abs += t.norm();
        }
        diag /= c3n;
        diag_abs /= c3n.abs();
        sum += diag;
        scale = scale.max(sum.norm());
        if stop.push(diag_abs, scale, SERIES_EPS) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { terms: NMAX })
}

/// Closed form (1-z^2)/(1-2 xi z+z^2)^(lambda+1) of the weighted Gegenbauer
/// generating series.
pub fn poisson_gegenbauer_sum(lambda: f64, xi: f64, zc: Complex64) -> Result<Complex64> {
    if lambda < 0.0 {
        return domain(format!("poisson_gegenbauer_sum: lambda {lambda} < 0"));
    }
    check_unit(xi)?;
    if zc.norm() > 0.95 {
        return domain(format!("poisson_gegenbauer_sum: |z| = {} > 0.95", zc.norm()));
    }
    let one = Complex64::new(1.0, 0.0);
    let den = one - 2.0 * xi * zc + zc * zc;
    if den.norm() < 1e-8 {
        return Err(Error::Singular(format!(
            "Poisson-Gegenbauer denominator {} at z = {zc}",
            den.norm()
        )));
    }
    Ok((one - zc * zc) / den.powf(lambda + 1.0))
}

/// Which beta-type probability measure on [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// c_alpha (1+u)(1-u^2)^(alpha-1)
    Asymmetric,
    /// c_alpha (1-u^2)^(alpha-1)
    Symmetric,
}

/// Beta probability measure on [-1, 1] used by the dihedral kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaMeasure {
    pub alpha: f64,
    pub kind: MeasureKind,
}

impl BetaMeasure {
    pub fn new(alpha: f64, kind: MeasureKind) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return domain(format!("BetaMeasure: alpha = {alpha} must be positive"));
        }
        Ok(Self { alpha, kind })
    }

    pub fn asymmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, MeasureKind::Asymmetric)
    }

    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, MeasureKind::Symmetric)
    }

    /// Normalizing constant 1/B(1/2, alpha), shared by both kinds.
    pub fn normalizer(&self) -> f64 {
        1.0 / beta_fn(0.5, self.alpha)
    }

    pub fn density(&self, u: f64) -> f64 {
        if !(-1.0..=1.0).contains(&u) {
            return 0.0;
        }
        let base = self.normalizer() * (1.0 - u * u).powf(self.alpha - 1.0);
        match self.kind {
            MeasureKind::Asymmetric => base * (1.0 + u),
            MeasureKind::Symmetric => base,
        }
    }

    /// Jacobi exponents (at -1, at +1) of the density.
    pub fn jacobi_exponents(&self) -> (f64, f64) {
        match self.kind {
            MeasureKind::Asymmetric => (self.alpha, self.alpha - 1.0),
            MeasureKind::Symmetric => (self.alpha - 1.0, self.alpha - 1.0),
        }
    }

    /// Gauss-Jacobi rule whose weights sum to one.
    pub fn rule(&self, npts: usize) -> Result<QuadratureRule> {
        let (l, r) = self.jacobi_exponents();
        let mut rule = gauss_jacobi_rule(npts, l, r)?;
        let mass: f64 = rule.weights.iter().sum();
        for w in rule.weights.iter_mut() {
            *w /= mass;
        }
        Ok(rule)
    }
}
