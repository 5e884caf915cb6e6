//! Integration engines: Gauss-Jacobi rules, adaptive Gauss-Kronrod,
//! double-exponential quadrature, finite convolutions and truncated forward
//! Laplace transforms.
//!
//! Complex integrands are integrated component-wise on shared nodes; the
//! reported error is the larger of the two component estimates.

use crate::error::{domain, Error, Result};
use crate::specfun::{ln_gamma, BetaMeasure};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::collections::BinaryHeap;

/// A Gauss rule on [-1, 1] for the weight (1+x)^exp_left (1-x)^exp_right.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exp_left: f64,
    pub exp_right: f64,
    /// Highest polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of w_i f(x_i).
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}

/// Total mass of the Jacobi weight on [-1, 1].
pub fn jacobi_mass(exp_left: f64, exp_right: f64) -> f64 {
    let (a, b) = (exp_right, exp_left);
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp()
}

/// Golub-Welsch Gauss-Jacobi rule with `npts` nodes.
pub fn gauss_jacobi_rule(npts: usize, exp_left: f64, exp_right: f64) -> Result<QuadratureRule> {
    if !(2..=512).contains(&npts) && npts != 1 {
        return domain(format!("gauss_jacobi_rule: npts = {npts} outside [1, 512]"));
    }
    if !(exp_left > -1.0 && exp_right > -1.0) {
        return domain(format!(
            "gauss_jacobi_rule: exponents ({exp_left}, {exp_right}) must exceed -1"
        ));
    }
    // Standard notation: weight (1-x)^a (1+x)^b.
    let (a, b) = (exp_right, exp_left);
    let n = npts;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        let diag = if i == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let s = 2.0 * k + a + b;
            (b * b - a * a) / (s * (s + 2.0))
        };
        m[(i, i)] = diag;
        if i + 1 < n {
            let k = k + 1.0;
            let off = if i == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                let s = 2.0 * k + a + b;
                4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = off.sqrt();
            m[(i, i + 1)] = off;
            m[(i + 1, i)] = off;
        }
    }
    let mass = jacobi_mass(exp_left, exp_right);
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| (eig.eigenvalues[j], mass * eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        exp_left,
        exp_right,
        degree: 2 * n - 1,
    })
}

/// Value of a numerical integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

fn component_err(a: Complex64, b: Complex64) -> f64 {
    (a.re - b.re).abs().max((a.im - b.im).abs())
}

/// Integral against a beta probability measure, doubling the Gauss-Jacobi
/// node count until successive estimates agree to `tol`.
pub fn integrate_measure<F: FnMut(f64) -> Complex64>(
    mut f: F,
    measure: &BetaMeasure,
    tol: f64,
) -> Result<QuadResult> {
    let mut n = 16;
    let mut prev = measure.rule(n)?.integrate(&mut f);
    let mut evals = n;
    while n < 512 {
        n *= 2;
        let cur = measure.rule(n)?.integrate(&mut f);
        evals += n;
        let err = component_err(cur, prev);
        if err <= tol {
            return Ok(QuadResult {
                value: cur,
                error: err,
                evaluations: evals,
            });
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        estimate: f64::NAN,
        tolerance: tol,
    })
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += s * GK_WK[i];
        if i % 2 == 1 {
            g += s * GK_WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, component_err(k, g))
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
pub fn integrate_adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    const MAX_SEGMENTS: usize = 4000;
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    while err > tol {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature {
                estimate: err,
                tolerance: tol,
            });
        }
        let s = heap.pop().expect("segment heap is never empty");
        let m = 0.5 * (s.a + s.b);
        let (v1, e1) = gk15(&mut f, s.a, m);
        let (v2, e2) = gk15(&mut f, m, s.b);
        evals += 30;
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.error;
        heap.push(Segment { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, error: e2 });
        if !err.is_finite() {
            return Err(Error::Quadrature {
                estimate: err,
                tolerance: tol,
            });
        }
    }
    // Re-sum to shed accumulated update rounding.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum::<f64>();
    Ok(QuadResult {
        value,
        error,
        evaluations: evals,
    })
}

/// Double-exponential (tanh-sinh) quadrature on [a, b].
///
/// The integrand receives `(x, x - a, b - x)` with both distances computed
/// without cancellation, so algebraic endpoint singularities can be
/// evaluated accurately right up to the endpoints.
pub fn integrate_tanh_sinh<F: FnMut(f64, f64, f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult> {
    const T_MAX: f64 = 6.1;
    const MAX_LEVEL: u32 = 9;
    let len = b - a;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut eval = |t: f64| -> Complex64 {
        let u = half_pi * t.sinh();
        let dl = len / (1.0 + (-2.0 * u).exp());
        let dr = len / (1.0 + (2.0 * u).exp());
        if dl <= 0.0 || dr <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let ch = u.cosh();
        let w = 0.5 * len * half_pi * t.cosh() / (ch * ch);
        if w == 0.0 || !w.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let x = if dl < dr { a + dl } else { b - dr };
        f(x, dl, dr) * w
    };
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut evals = 2 * k - 1;
    let mut prev = sum * h;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
            evals += 2;
        }
        let cur = sum * h;
        let err = component_err(cur, prev);
        if err <= tol && level >= 3 {
            return Ok(QuadResult {
                value: cur,
                error: err,
                evaluations: evals,
            });
        }
        prev = cur;
    }
    let err = component_err(prev, sum * h);
    Err(Error::Quadrature {
        estimate: err,
        tolerance: tol,
    })
}

/// Endpoint behavior of convolution factors: `f_exp = c` declares f(s) ~ s^(c-1)
/// near s = 0. Values >= 1 mean no singular behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionHints {
    pub f_exp: f64,
    pub g_exp: f64,
}

impl Default for ConvolutionHints {
    fn default() -> Self {
        Self {
            f_exp: 1.0,
            g_exp: 1.0,
        }
    }
}

/// Integral of `f` on [0, len] (in the local variable s measured from the
/// singular endpoint), with f(s) ~ s^(c-1) removed by s = len * sigma^(1/c).
fn integrate_from_singular_end<F: FnMut(f64) -> Complex64>(
    mut f: F,
    len: f64,
    c: f64,
    tol: f64,
) -> Result<QuadResult> {
    if c >= 1.0 {
        return integrate_adaptive(f, 0.0, len, tol);
    }
    let p = 1.0 / c;
    integrate_adaptive(
        |sigma: f64| {
            if sigma <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let s = len * sigma.powf(p);
            f(s) * (len * p * sigma.powf(p - 1.0))
        },
        0.0,
        1.0,
        tol,
    )
}

/// Finite convolution: the integral over [0, t] of f(t - tau) g(tau).
pub fn convolve_on_interval<F, G>(
    mut f: F,
    mut g: G,
    t: f64,
    hints: ConvolutionHints,
    tol: f64,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
    G: FnMut(f64) -> Complex64,
{
    if t < 0.0 {
        return domain(format!("convolve_on_interval: t = {t} < 0"));
    }
    if t == 0.0 {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let half = 0.5 * t;
    // Left half: tau near 0, g singular; right half: t - tau near 0, f singular.
    let left = integrate_from_singular_end(|tau| f(t - tau) * g(tau), half, hints.g_exp, 0.5 * tol)?;
    let right = integrate_from_singular_end(|s| f(s) * g(t - s), half, hints.f_exp, 0.5 * tol)?;
    Ok(QuadResult {
        value: left.value + right.value,
        error: left.error + right.error,
        evaluations: left.evaluations + right.evaluations,
    })
}

/// Convolution of s^(cf-1) F(s) with s^(cg-1) G(s) on [0, t] using one
/// Gauss-Jacobi rule built for those exponents: `rule` must carry
/// exp_left = cg - 1 and exp_right = cf - 1. F and G are the smooth parts.
pub fn convolve_jacobi<F, G>(rule: &QuadratureRule, mut f: F, mut g: G, t: f64) -> Complex64
where
    F: FnMut(f64) -> Complex64,
    G: FnMut(f64) -> Complex64,
{
    let half = 0.5 * t;
    let scale = half.powf(rule.exp_left + rule.exp_right + 1.0);
    let s = rule.integrate(|x| {
        let tau = half * (1.0 + x);
        let rest = half * (1.0 - x);
        f(rest) * g(tau)
    });
    s * scale
}

/// Growth information for a truncated forward Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceOptions {
    /// Bound M in |f(t)| <= M exp(rate t).
    pub bound: f64,
    pub rate: f64,
    /// f(t) ~ t^(c-1) near t = 0.
    pub origin_exp: f64,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        Self {
            bound: 1.0,
            rate: 0.0,
            origin_exp: 1.0,
        }
    }
}

/// Integral over [0, T] of exp(-s t) f(t), with T chosen so that the
/// discarded tail is below tol/10.
pub fn numeric_laplace<F: FnMut(f64) -> Complex64>(
    mut f: F,
    s: Complex64,
    opts: LaplaceOptions,
    tol: f64,
) -> Result<QuadResult> {
    let gap = s.re - opts.rate;
    if !(gap > 0.0) {
        return domain(format!(
            "numeric_laplace: Re s = {} does not exceed growth rate {}",
            s.re, opts.rate
        ));
    }
    let tail_target = tol / 10.0;
    let t_end = ((opts.bound / (gap * tail_target)).ln() / gap).max(1.0);
    let pieces = t_end.ceil() as usize;
    let width = t_end / pieces as f64;
    let piece_tol = 0.9 * tol / pieces as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    for i in 0..pieces {
        let a = i as f64 * width;
        let r = if i == 0 {
            integrate_from_singular_end(|t| f(t) * (-s * t).exp(), width, opts.origin_exp, piece_tol)?
        } else {
            integrate_adaptive(|t| f(t) * (-s * t).exp(), a, a + width, piece_tol)?
        };
        total += r.value;
        err += r.error;
        evals += r.evaluations;
    }
    Ok(QuadResult {
        value: total,
        error: err + tail_target,
        evaluations: evals,
    })
}
