//! Rational Laplace-domain kernels: the polynomials P_n and Q_{n-1}, pole
//! bookkeeping, Brugia derivatives, partial fractions and their inverse
//! transforms, plus the power-series inverse of products of pole powers.

use crate::error::{domain, Error, Result};
use crate::specfun::{ln_gamma, StopRule};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Reduced geometry of a point pair (x, y) in R^m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomInvariants {
    /// |x||y|
    pub z: f64,
    /// <x,y>/z, conventionally 0 when z = 0
    pub xi: f64,
    /// arccos(xi) in [0, pi]
    pub q: f64,
    /// (m-2)/2
    pub lambda: f64,
    pub m: u32,
}

impl GeomInvariants {
    pub fn new(z: f64, xi: f64, m: u32) -> Result<Self> {
        if !(z >= 0.0) || !z.is_finite() {
            return domain(format!("geometry: z = {z} must be finite and >= 0"));
        }
        if !(-1.0..=1.0).contains(&xi) {
            return domain(format!("geometry: xi = {xi} outside [-1, 1]"));
        }
        if m < 2 {
            return domain(format!("geometry: dimension m = {m} < 2"));
        }
        let xi = if z == 0.0 { 0.0 } else { xi };
        Ok(Self {
            z,
            xi,
            q: xi.acos(),
            lambda: (m as f64 - 2.0) / 2.0,
            m,
        })
    }

    pub fn from_vectors(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return domain(format!(
                "geometry: vectors of different dimension ({} and {})",
                x.len(),
                y.len()
            ));
        }
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let z = nx * ny;
        let inner: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let xi = if z == 0.0 { 0.0 } else { (inner / z).clamp(-1.0, 1.0) };
        Self::new(z, xi, x.len() as u32)
    }

    /// <x,y>
    pub fn inner(&self) -> f64 {
        self.z * self.xi
    }

    pub fn with_dimension(&self, m: u32) -> Result<Self> {
        Self::new(self.z, self.xi, m)
    }
}

/// One pole (or zero) location with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub multiplicity: usize,
}

/// Pole locations with multiplicities; locations closer than the merge
/// tolerance are fused.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    pub poles: Vec<Pole>,
    pub merge_tolerance: f64,
}

impl PoleSet {
    pub fn empty(merge_tolerance: f64) -> Self {
        Self {
            poles: Vec::new(),
            merge_tolerance,
        }
    }

    /// Builds a set, merging locations within `merge_tolerance` of an already
    /// accepted location (multiplicities add, locations are averaged).
    pub fn from_points<T: IntoIterator<Item = (Complex64, usize)>>(points: T, merge_tolerance: f64) -> Self {
        let mut groups: Vec<(Complex64, usize, usize)> = Vec::new();
        for (loc, mult) in points {
            if mult == 0 {
                continue;
            }
            match groups
                .iter_mut()
                .find(|g| (g.0 / g.2 as f64 - loc).norm() <= merge_tolerance)
            {
                Some(g) => {
                    g.0 += loc;
                    g.1 += mult;
                    g.2 += 1;
                }
                None => groups.push((loc, mult, 1)),
            }
        }
        Self {
            poles: groups
                .into_iter()
                .map(|(sum, mult, count)| Pole {
                    location: sum / count as f64,
                    multiplicity: mult,
                })
                .collect(),
            merge_tolerance,
        }
    }

    pub fn degree(&self) -> usize {
        self.poles.iter().map(|p| p.multiplicity).sum()
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Every multiplicity multiplied by `factor`.
    pub fn powered(&self, factor: usize) -> Self {
        Self {
            poles: self
                .poles
                .iter()
                .map(|p| Pole {
                    location: p.location,
                    multiplicity: p.multiplicity * factor,
                })
                .collect(),
            merge_tolerance: self.merge_tolerance,
        }
    }

    /// Locations repeated by multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.poles
            .iter()
            .flat_map(|p| std::iter::repeat(p.location).take(p.multiplicity))
            .collect()
    }

    /// Monic polynomial with these roots, highest power first.
    pub fn monic_polynomial(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for r in self.expanded() {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] += ci;
                next[i + 1] -= ci * r;
            }
            c = next;
        }
        c
    }
}

/// n z^(1/n), the radius of the P_n pole circle.
pub fn pn_scale(n: u32, z: f64) -> f64 {
    n as f64 * z.powf(1.0 / n as f64)
}

fn pn_merge_tolerance(n: u32, z: f64) -> f64 {
    1e-8 * pn_scale(n, z) + 1e-14
}

/// The n poles -i n z^(1/n) cos((q + 2 pi l)/n), l = 0..n-1, merged.
pub fn pn_poles(n: u32, geom: &GeomInvariants) -> PoleSet {
    let w = pn_scale(n, geom.z);
    let nf = n as f64;
    PoleSet::from_points(
        (0..n).map(|l| {
            let c = ((geom.q + 2.0 * PI * l as f64) / nf).cos();
            (Complex64::new(0.0, -w * c), 1)
        }),
        pn_merge_tolerance(n, geom.z),
    )
}

/// The n-1 roots i n z^(1/n) cos(l pi/n), l = 1..n-1, of Q_{n-1}.
///
/// For even n this set is {i n z^(1/n) sin(l pi/n)} with l running over
/// -(n/2-1)..n/2-1; taking l = 0..n-1 with l != n/2 instead would repeat
/// roots for n >= 4.
pub fn qn1_roots(n: u32, z: f64) -> PoleSet {
    let w = pn_scale(n, z);
    let nf = n as f64;
    PoleSet::from_points(
        (1..n).map(|l| (Complex64::new(0.0, w * (l as f64 * PI / nf).cos()), 1)),
        pn_merge_tolerance(n, z),
    )
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monic coefficients of P_n (highest power first) from the binomial
/// expansion 2^n P_n = 2 sum_k C(n,2k) s^(n-2k) (s^2+w^2)^k - 2 xi (-i)^n w^n.
pub fn pn_coefficients(n: u32, geom: &GeomInvariants) -> Vec<Complex64> {
    let w = pn_scale(n, geom.z);
    let w2 = w * w;
    let nn = n as usize;
    // ascending powers first, reversed at the end
    let mut asc = vec![Complex64::new(0.0, 0.0); nn + 1];
    for k in 0..=(n / 2) {
        let ck = 2.0 * binomial(n, 2 * k);
        for i in 0..=k {
            let power = (n - 2 * k + 2 * i) as usize;
            let coef = ck * binomial(k, i) * w2.powi((k - i) as i32);
            asc[power] += coef;
        }
    }
    asc[0] -= 2.0 * geom.xi * (-I).powu(n) * w.powi(n as i32);
    let scale = 0.5f64.powi(n as i32);
    asc.iter().rev().map(|c| c * scale).collect()
}

/// Coefficients of Q_{n-1} = P_n' / n.
pub fn qn1_coefficients(n: u32, geom: &GeomInvariants) -> Vec<Complex64> {
    let d = poly_derivative(&pn_coefficients(n, geom));
    d.into_iter().map(|c| c / n as f64).collect()
}

/// Horner evaluation, highest power first.
pub fn poly_eval(coeffs: &[Complex64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

pub fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len().saturating_sub(1);
    coeffs
        .iter()
        .take(deg)
        .enumerate()
        .map(|(i, &c)| c * (deg - i) as f64)
        .collect()
}

/// prod (s - zero)^M / prod (s - pole)^N
pub fn rational_eval(zeros: &PoleSet, poles: &PoleSet, s: Complex64) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for z in &zeros.poles {
        v *= (s - z.location).powu(z.multiplicity as u32);
    }
    for p in &poles.poles {
        v /= (s - p.location).powu(p.multiplicity as u32);
    }
    v
}

/// Derivatives of log f_k at s, f_k = phi (s - p_k)^(N_k):
/// g^(r)(s) = (-1)^r r! [sum M_h/(s-zero_h)^(r+1) - sum' N_j/(s-p_j)^(r+1)].
fn log_derivatives(zeros: &PoleSet, poles: &PoleSet, k: usize, s: Complex64, upto: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(upto);
    let mut fact = 1.0;
    for r in 0..upto {
        if r > 0 {
            fact *= r as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for z in &zeros.poles {
            acc += z.multiplicity as f64 / (s - z.location).powu(r as u32 + 1);
        }
        for (j, p) in poles.poles.iter().enumerate() {
            if j != k {
                acc -= p.multiplicity as f64 / (s - p.location).powu(r as u32 + 1);
            }
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        out.push(acc * (sign * fact));
    }
    out
}

/// f_k^(order)(p_k) for f_k(s) = phi(s) (s - p_k)^(N_k), where phi has the
/// given zeros and poles, via the Leibniz form of Brugia's recursion.
pub fn brugia_derivative(zeros: &PoleSet, poles: &PoleSet, k: usize, order: usize) -> Result<Complex64> {
    let pk = poles
        .poles
        .get(k)
        .ok_or_else(|| Error::Domain(format!("brugia_derivative: no pole with index {k}")))?
        .location;
    for (j, p) in poles.poles.iter().enumerate() {
        if j != k && (p.location - pk).norm() <= poles.merge_tolerance {
            return Err(Error::DegeneratePole(format!(
                "poles {j} and {k} coincide within {}",
                poles.merge_tolerance
            )));
        }
    }
    for z in &zeros.poles {
        if (z.location - pk).norm() <= poles.merge_tolerance {
            return Err(Error::DegeneratePole(format!(
                "zero at {} cancels pole {k}",
                z.location
            )));
        }
    }
    let mut f0 = Complex64::new(1.0, 0.0);
    for z in &zeros.poles {
        f0 *= (pk - z.location).powu(z.multiplicity as u32);
    }
    for (j, p) in poles.poles.iter().enumerate() {
        if j != k {
            f0 /= (pk - p.location).powu(p.multiplicity as u32);
        }
    }
    if order == 0 {
        return Ok(f0);
    }
    let g = log_derivatives(zeros, poles, k, pk, order);
    let mut f = vec![f0];
    for i in 0..order {
        let mut next = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for j in 0..=i {
            next += f[j] * g[i - j] * binom;
            binom *= (i - j) as f64 / (j + 1) as f64;
        }
        f.push(next);
    }
    Ok(f[order])
}

/// One term coefficient / (s - pole)^order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfTerm {
    pub pole: Complex64,
    pub order: usize,
    pub coefficient: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartialFractionExpansion {
    pub terms: Vec<PfTerm>,
}

impl PartialFractionExpansion {
    /// Recomposed value sum coefficient/(s - pole)^order.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coefficient / (s - t.pole).powu(t.order as u32))
            .sum()
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for t in self.terms.iter_mut() {
            t.coefficient *= c;
        }
        self
    }
}

/// Heaviside expansion of prod (s - zero)^M / prod (s - pole)^N.
///
/// Zeros that coincide with poles (within the pole merge tolerance) are
/// cancelled first.
pub fn partial_fraction_expand(numerator_roots: &PoleSet, denominator: &PoleSet) -> Result<PartialFractionExpansion> {
    let tol = denominator.merge_tolerance.max(numerator_roots.merge_tolerance);
    let mut zeros = numerator_roots.clone();
    let mut poles = denominator.clone();
    for z in zeros.poles.iter_mut() {
        for p in poles.poles.iter_mut() {
            if p.multiplicity > 0 && z.multiplicity > 0 && (z.location - p.location).norm() <= tol {
                let c = z.multiplicity.min(p.multiplicity);
                z.multiplicity -= c;
                p.multiplicity -= c;
            }
        }
    }
    zeros.poles.retain(|z| z.multiplicity > 0);
    poles.poles.retain(|p| p.multiplicity > 0);
    if zeros.degree() >= poles.degree() {
        return Err(Error::Improper {
            numerator: zeros.degree(),
            denominator: poles.degree(),
        });
    }
    let mut terms = Vec::new();
    for (k, p) in poles.poles.iter().enumerate() {
        let nk = p.multiplicity;
        let top = nk - 1;
        let g = if top > 0 {
            log_derivatives(&zeros, &poles, k, p.location, top)
        } else {
            Vec::new()
        };
        let f0 = brugia_derivative(&zeros, &poles, k, 0)?;
        let mut f = vec![f0];
        for i in 0..top {
            let mut next = Complex64::new(0.0, 0.0);
            let mut binom = 1.0;
            for j in 0..=i {
                next += f[j] * g[i - j] * binom;
                binom *= (i - j) as f64 / (j + 1) as f64;
            }
            f.push(next);
        }
        let mut fact = 1.0;
        for d in 0..nk {
            if d > 0 {
                fact *= d as f64;
            }
            terms.push(PfTerm {
                pole: p.location,
                order: nk - d,
                coefficient: f[d] / fact,
            });
        }
    }
    Ok(PartialFractionExpansion { terms })
}

/// Time-domain value sum coefficient t^(order-1) e^(pole t) / (order-1)!.
pub fn inverse_laplace_rational(expansion: &PartialFractionExpansion, t: f64) -> Complex64 {
    expansion
        .terms
        .iter()
        .map(|term| {
            let k = term.order as i32 - 1;
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            term.coefficient * t.powi(k) / fact * (term.pole * t).exp()
        })
        .sum()
}

/// Inverse Laplace transform of prod_l (s - p_l)^(-c_l) with real c_l > 0,
/// as the convergent series sum_m a_m t^(N+m-1)/Gamma(N+m), N = sum c_l.
#[derive(Debug, Clone, PartialEq)]
pub struct PolePowerSeries {
    pub total_power: f64,
    pub coeffs: Vec<Complex64>,
}

impl PolePowerSeries {
    /// `t_max` bounds the times at which the series will be evaluated and
    /// fixes the truncation order.
    pub fn new(factors: &[(Complex64, f64)], t_max: f64) -> Result<Self> {
        let mut total = 0.0;
        let mut radius = 0.0;
        for &(p, c) in factors {
            if !(c > 0.0) {
                return domain(format!("pole power {c} must be positive"));
            }
            total += c;
            radius += p.norm() * c.max(1.0);
        }
        let rho = radius * t_max;
        let m = ((std::f64::consts::E * rho) as usize + 40).min(600);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
        coeffs[0] = Complex64::new(1.0, 0.0);
        let mut b = vec![Complex64::new(0.0, 0.0); m];
        for &(p, c) in factors {
            b[0] = Complex64::new(1.0, 0.0);
            for j in 1..m {
                b[j] = b[j - 1] * p * ((c + j as f64 - 1.0) / j as f64);
            }
            let mut next = vec![Complex64::new(0.0, 0.0); m];
            for (i, &ci) in coeffs.iter().enumerate() {
                if ci == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..(m - i) {
                    next[i + j] += ci * b[j];
                }
            }
            coeffs = next;
        }
        Ok(Self {
            total_power: total,
            coeffs,
        })
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if t < 0.0 {
            return domain(format!("inverse transform at t = {t} < 0"));
        }
        if t == 0.0 {
            return Ok(if self.total_power == 1.0 {
                self.coeffs[0]
            } else if self.total_power > 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(f64::INFINITY, 0.0)
            });
        }
        let lt = t.ln();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut stop = StopRule::default();
        for (m, &a) in self.coeffs.iter().enumerate() {
            let e = self.total_power + m as f64;
            let w = ((e - 1.0) * lt - ln_gamma(e)).exp();
            let term = a * w;
            sum += term;
            abs_sum += term.norm();
            if m > 2 && stop.push(term.norm(), abs_sum, 1e-17) {
                return Ok(sum);
            }
        }
        Err(Error::NonConvergence {
            terms: self.coeffs.len(),
        })
    }

    /// Value divided by t^(N-1), the smooth part near t = 0.
    pub fn eval_smooth(&self, t: f64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut stop = StopRule::default();
        let mut tp = 1.0;
        for (m, &a) in self.coeffs.iter().enumerate() {
            let e = self.total_power + m as f64;
            let term = a * (tp * (-ln_gamma(e)).exp());
            sum += term;
            abs_sum += term.norm();
            if m > 2 && stop.push(term.norm(), abs_sum, 1e-17) {
                return Ok(sum);
            }
            tp *= t;
        }
        Err(Error::NonConvergence {
            terms: self.coeffs.len(),
        })
    }
}

/// Inverse Laplace transform of prod (s - p_l)^(-c_l) at time t.
pub fn inverse_laplace_pole_powers(factors: &[(Complex64, f64)], t: f64) -> Result<Complex64> {
    PolePowerSeries::new(factors, t)?.eval(t)
}
