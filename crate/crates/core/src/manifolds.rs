//! Generic submanifolds `M = { y = h(x, w) }` of `C^n` given by graphing
//! functions `h: R^d x C^{n-d} -> R^d`, optionally with a collar variable
//! `t >= 0`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifoldError {
    #[error("invalid sector parameters: {0}")]
    BadSector(&'static str),
    #[error("polynomial term violates reality of h: {0}")]
    NotReal(&'static str),
    #[error("polynomial has a constant or linear term")]
    LowDegreeTerm,
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("collar direction must be a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("point is off the manifold (residual {0})")]
    OffManifold(f64),
    #[error("max_degree {max_degree} exceeds smoothness order {smoothness}")]
    DegreeTooHigh { max_degree: u32, smoothness: u32 },
    #[error("Taylor fit ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
}

/// A graphing function with first-order derivative oracles.
///
/// `x` has length [`codim`](Self::codim), `w` length [`cr_dim`](Self::cr_dim).
/// Matrices are row-major with the output component as row index.
pub trait GraphingFunction: fmt::Debug + Send + Sync {
    fn codim(&self) -> usize;
    fn cr_dim(&self) -> usize;
    fn eval(&self, x: &[f64], w: &[Complex64], t: f64, out: &mut [f64]);
    /// `out[j*d + l] = dh_j/dx_l`.
    fn d_x(&self, x: &[f64], w: &[Complex64], t: f64, out: &mut [f64]);
    /// `out[j*m + k] = dh_j/dw_k` (Wirtinger).
    fn d_w(&self, x: &[f64], w: &[Complex64], t: f64, out: &mut [Complex64]);
    fn smoothness_order(&self) -> u32;

    fn ambient_dim(&self) -> usize {
        self.codim() + self.cr_dim()
    }

    /// `dh_j/dw̄_k = conj(dh_j/dw_k)` since `h` is real.
    fn d_wbar(&self, x: &[f64], w: &[Complex64], t: f64, out: &mut [Complex64]) {
        self.d_w(x, w, t, out);
        for v in out.iter_mut() {
            *v = v.conj();
        }
    }

    fn d_t(&self, _x: &[f64], _w: &[Complex64], _t: f64, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn collar_direction(&self) -> Option<&[f64]> {
        None
    }

    fn eval_vec(&self, x: &[f64], w: &[Complex64], t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.codim()];
        self.eval(x, w, t, &mut out);
        out
    }
}

pub type SharedModel = Arc<dyn GraphingFunction>;

/// Degree-5 smoothstep `6t^5 - 15t^4 + 10t^3` clamped to `[0, 1]`.
pub fn smoothstep5(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

fn smoothstep5_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// `h(x, z1) = |z1|^k chi(arg z1)` (n = 2, d = 1): zero on the inner sector,
/// `-2 cos(k arg z1)` outside the outer sector, smoothstep bridge between.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorModel {
    k: u32,
    eps: f64,
    side: Side,
    inner: f64,
    outer: f64,
}

pub fn model_sector_hypersurface(k: u32, eps: f64, side: Side) -> Result<SectorModel, ManifoldError> {
    if k < 2 {
        return Err(ManifoldError::BadSector("k must be at least 2"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(ManifoldError::BadSector("eps must be positive"));
    }
    if k as f64 * eps >= 0.25 {
        return Err(ManifoldError::BadSector("k * eps must be below 1/4"));
    }
    let base = 1.0 / (2.0 * k as f64);
    let (inner, outer) = match side {
        Side::Plus => (PI * (base + eps / 2.0), PI * (base + eps)),
        Side::Minus => (PI * (base - eps / 2.0), PI * base),
    };
    Ok(SectorModel { k, eps, side, inner, outer })
}

impl SectorModel {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Half-angles `(inner, outer)` of the two sectors.
    pub fn half_angles(&self) -> (f64, f64) {
        (self.inner, self.outer)
    }

    /// Angular profile and its derivative in the signed angle.
    pub fn profile(&self, phi: f64) -> (f64, f64) {
        let a = phi.abs();
        if a <= self.inner {
            return (0.0, 0.0);
        }
        let kf = self.k as f64;
        let width = self.outer - self.inner;
        let s = (a - self.inner) / width;
        let c = -2.0 * libm::cos(kf * a);
        let val = smoothstep5(s) * c;
        let der = smoothstep5_prime(s) / width * c + smoothstep5(s) * 2.0 * kf * libm::sin(kf * a);
        (val, if phi < 0.0 { -der } else { der })
    }
}

impl GraphingFunction for SectorModel {
    fn codim(&self) -> usize {
        1
    }
    fn cr_dim(&self) -> usize {
        1
    }
    fn eval(&self, _x: &[f64], w: &[Complex64], _t: f64, out: &mut [f64]) {
        let rho = w[0].norm();
        out[0] = if rho == 0.0 { 0.0 } else { libm::pow(rho, self.k as f64) * self.profile(w[0].arg()).0 };
    }
    fn d_x(&self, _x: &[f64], _w: &[Complex64], _t: f64, out: &mut [f64]) {
        out[0] = 0.0;
    }
    fn d_w(&self, _x: &[f64], w: &[Complex64], _t: f64, out: &mut [Complex64]) {
        // d/dw = e^{-i phi}/2 (d/drho - (i/rho) d/dphi) on rho^k P(phi).
        let rho = w[0].norm();
        if rho == 0.0 {
            out[0] = Complex64::new(0.0, 0.0);
            return;
        }
        let phi = w[0].arg();
        let (p, dp) = self.profile(phi);
        let kf = self.k as f64;
        let radial = Complex64::new(kf * p, -dp) * libm::pow(rho, kf - 1.0);
        out[0] = 0.5 * Complex64::from_polar(1.0, -phi) * radial;
    }
    fn smoothness_order(&self) -> u32 {
        self.k + 2
    }
}

/// `c x^beta w^a w̄^b`, one complex coefficient per output component.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub coef: Vec<Complex64>,
}

impl Monomial {
    fn degree(&self) -> u32 {
        self.x.iter().chain(&self.a).chain(&self.b).sum()
    }
}

/// Real polynomial graphing function `h_j = sum c_j x^beta w^a w̄^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialModel {
    d: usize,
    m: usize,
    terms: Vec<Monomial>,
}

type Key = (Vec<u32>, Vec<u32>, Vec<u32>);

pub fn polynomial_model(d: usize, m: usize, terms: Vec<Monomial>) -> Result<PolynomialModel, ManifoldError> {
    if d == 0 || m == 0 {
        return Err(ManifoldError::Dimension("d and n-d must be positive"));
    }
    let mut merged: BTreeMap<Key, Vec<Complex64>> = BTreeMap::new();
    for t in terms {
        if t.x.len() != d || t.a.len() != m || t.b.len() != m || t.coef.len() != d {
            return Err(ManifoldError::Dimension("monomial exponent or coefficient length"));
        }
        if t.coef.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(ManifoldError::NotReal("non-finite coefficient"));
        }
        if t.coef.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        if t.degree() < 2 {
            return Err(ManifoldError::LowDegreeTerm);
        }
        let e = merged.entry((t.x, t.a, t.b)).or_insert_with(|| vec![Complex64::new(0.0, 0.0); d]);
        for (acc, c) in e.iter_mut().zip(&t.coef) {
            *acc += c;
        }
    }
    for ((x, a, b), c) in &merged {
        let partner = merged.get(&(x.clone(), b.clone(), a.clone()));
        let zero = vec![Complex64::new(0.0, 0.0); d];
        let p = partner.unwrap_or(&zero);
        for (cj, pj) in c.iter().zip(p) {
            let scale = cj.norm().max(pj.norm()).max(1.0);
            if (cj - pj.conj()).norm() > 1e-12 * scale {
                return Err(ManifoldError::NotReal("coefficient of w^a w̄^b must be the conjugate of that of w^b w̄^a"));
            }
        }
    }
    let terms = merged.into_iter().map(|((x, a, b), coef)| Monomial { x, a, b, coef }).collect();
    Ok(PolynomialModel { d, m, terms })
}

impl PolynomialModel {
    /// `h = sum c_{ab} w^a w̄^b` for `n = 2, d = 1` with real coefficients
    /// keyed by `(a, b)`.
    pub fn from_w_terms(coeffs: &[((u32, u32), f64)]) -> Result<Self, ManifoldError> {
        let terms = coeffs
            .iter()
            .map(|&((a, b), c)| Monomial { x: vec![0], a: vec![a], b: vec![b], coef: vec![Complex64::new(c, 0.0)] })
            .collect();
        polynomial_model(1, 1, terms)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    fn monomial_value(t: &Monomial, x: &[f64], w: &[Complex64]) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for (xi, &e) in x.iter().zip(&t.x) {
            v *= libm::pow(*xi, e as f64);
        }
        for ((wk, &a), &b) in w.iter().zip(&t.a).zip(&t.b) {
            v *= wk.powu(a) * wk.conj().powu(b);
        }
        v
    }
}

impl GraphingFunction for PolynomialModel {
    fn codim(&self) -> usize {
        self.d
    }
    fn cr_dim(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &[f64], w: &[Complex64], _t: f64, out: &mut [f64]) {
        out.fill(0.0);
        for t in &self.terms {
            let v = Self::monomial_value(t, x, w);
            for (o, c) in out.iter_mut().zip(&t.coef) {
                *o += (c * v).re;
            }
        }
    }
    fn d_x(&self, x: &[f64], w: &[Complex64], _t: f64, out: &mut [f64]) {
        let d = self.d;
        out.fill(0.0);
        for t in &self.terms {
            for l in 0..d {
                if t.x[l] == 0 {
                    continue;
                }
                let mut reduced = t.clone();
                reduced.x[l] -= 1;
                let v = Self::monomial_value(&reduced, x, w) * t.x[l] as f64;
                for j in 0..d {
                    out[j * d + l] += (t.coef[j] * v).re;
                }
            }
        }
    }
    fn d_w(&self, x: &[f64], w: &[Complex64], _t: f64, out: &mut [Complex64]) {
        let m = self.m;
        out.fill(Complex64::new(0.0, 0.0));
        for t in &self.terms {
            for k in 0..m {
                if t.a[k] == 0 {
                    continue;
                }
                let mut reduced = t.clone();
                reduced.a[k] -= 1;
                let v = Self::monomial_value(&reduced, x, w) * t.a[k] as f64;
                for j in 0..self.d {
                    out[j * m + k] += t.coef[j] * v;
                }
            }
        }
    }
    fn smoothness_order(&self) -> u32 {
        u32::MAX
    }
}

/// `h = 0` in codimension `d` with `n - d = m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlatModel {
    pub d: usize,
    pub m: usize,
}

impl GraphingFunction for FlatModel {
    fn codim(&self) -> usize {
        self.d
    }
    fn cr_dim(&self) -> usize {
        self.m
    }
    fn eval(&self, _x: &[f64], _w: &[Complex64], _t: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
    fn d_x(&self, _x: &[f64], _w: &[Complex64], _t: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
    fn d_w(&self, _x: &[f64], _w: &[Complex64], _t: f64, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
    }
    fn smoothness_order(&self) -> u32 {
        u32::MAX
    }
}

/// `h(x, w, t) = h(x, w) + t * direction`.
#[derive(Clone, Debug)]
pub struct CollarModel {
    base: SharedModel,
    direction: Vec<f64>,
}

pub fn extend_with_collar(base: SharedModel, direction: &[f64]) -> Result<CollarModel, ManifoldError> {
    if direction.len() != base.codim() {
        return Err(ManifoldError::Dimension("collar direction must have length d"));
    }
    let norm = libm::sqrt(direction.iter().map(|v| v * v).sum());
    if (norm - 1.0).abs() > 1e-12 {
        return Err(ManifoldError::NotUnit(norm));
    }
    Ok(CollarModel { base, direction: direction.to_vec() })
}

impl CollarModel {
    pub fn base(&self) -> &SharedModel {
        &self.base
    }
}

impl GraphingFunction for CollarModel {
    fn codim(&self) -> usize {
        self.base.codim()
    }
    fn cr_dim(&self) -> usize {
        self.base.cr_dim()
    }
    fn eval(&self, x: &[f64], w: &[Complex64], t: f64, out: &mut [f64]) {
        self.base.eval(x, w, 0.0, out);
        if t != 0.0 {
            for (o, v) in out.iter_mut().zip(&self.direction) {
                *o += t * v;
            }
        }
    }
    fn d_x(&self, x: &[f64], w: &[Complex64], _t: f64, out: &mut [f64]) {
        self.base.d_x(x, w, 0.0, out);
    }
    fn d_w(&self, x: &[f64], w: &[Complex64], _t: f64, out: &mut [Complex64]) {
        self.base.d_w(x, w, 0.0, out);
    }
    fn d_t(&self, _x: &[f64], _w: &[Complex64], _t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.direction);
    }
    fn smoothness_order(&self) -> u32 {
        self.base.smoothness_order()
    }
    fn collar_direction(&self) -> Option<&[f64]> {
        Some(&self.direction)
    }
}

/// A point `(z, w)` of `C^d x C^{n-d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

impl ManifoldPoint {
    /// The point of `M` above `(x, w)`: `y = h(x, w)`.
    pub fn on_graph(h: &dyn GraphingFunction, x: &[f64], w: &[Complex64]) -> Self {
        let y = h.eval_vec(x, w, 0.0);
        ManifoldPoint { z: x.iter().zip(&y).map(|(&a, &b)| Complex64::new(a, b)).collect(), w: w.to_vec() }
    }

    pub fn x(&self) -> Vec<f64> {
        self.z.iter().map(|z| z.re).collect()
    }

    pub fn y(&self) -> Vec<f64> {
        self.z.iter().map(|z| z.im).collect()
    }

    /// `max_j |Im z_j - h_j(Re z, w)|`.
    pub fn residual(&self, h: &dyn GraphingFunction) -> f64 {
        let hv = h.eval_vec(&self.x(), &self.w, 0.0);
        self.z.iter().zip(&hv).fold(0.0f64, |m, (z, v)| m.max((z.im - v).abs()))
    }
}

/// `d_z' r` for `r = y - h(x, w)`: entries `delta_jl / (2i) - (1/2) dh_j/dx_l`.
pub fn defining_jacobian(h: &dyn GraphingFunction, p: &ManifoldPoint) -> Result<Vec<Complex64>, ManifoldError> {
    let d = h.codim();
    if p.z.len() != d || p.w.len() != h.cr_dim() {
        return Err(ManifoldError::Dimension("point dimensions do not match the model"));
    }
    let res = p.residual(h);
    if res > 1e-9 {
        return Err(ManifoldError::OffManifold(res));
    }
    let mut dx = vec![0.0; d * d];
    h.d_x(&p.x(), &p.w, 0.0, &mut dx);
    let half_over_i = Complex64::new(0.0, -0.5);
    Ok((0..d * d)
        .map(|idx| {
            let diag = if idx / d == idx % d { half_over_i } else { Complex64::new(0.0, 0.0) };
            diag - 0.5 * dx[idx]
        })
        .collect())
}

/// Result of the Taylor-fit order estimate. `None` stands for infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderEstimate {
    pub k_hat: Option<u32>,
    pub leading_mixed_degree: Option<u32>,
    /// Size of the largest leading mixed coefficient (0 when none).
    pub coefficient_magnitude: f64,
    pub fit_residual: f64,
}

impl OrderEstimate {
    /// Whether `k_hat > 2`, the range in which the canonical expansion applies.
    pub fn is_canonical(&self) -> bool {
        self.k_hat.is_none_or(|k| k > 2)
    }
}

/// Stencil radius of the order estimator.
pub const ORDER_STENCIL_RADIUS: f64 = 1e-2;
/// Relative size above which a mixed coefficient counts.
pub const ORDER_THRESHOLD: f64 = 1e-8;

fn multi_indices(m: usize, deg: u32) -> Vec<Vec<u32>> {
    if m == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in multi_indices(m - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

struct Basis {
    a: Vec<u32>,
    b: Vec<u32>,
    degree: u32,
    mixed: bool,
    imag: bool,
}

fn taylor_basis(m: usize, max_degree: u32) -> Vec<Basis> {
    let mut out = Vec::new();
    for deg in 0..=max_degree {
        for da in 0..=deg {
            for a in multi_indices(m, da) {
                for b in multi_indices(m, deg - da) {
                    // One column per conjugate pair: keep (a, b) with a >= b.
                    if a < b {
                        continue;
                    }
                    let mixed = da > 0 && deg - da > 0;
                    out.push(Basis { a: a.clone(), b: b.clone(), degree: deg, mixed, imag: false });
                    if a != b {
                        out.push(Basis { a: a.clone(), b, degree: deg, mixed, imag: true });
                    }
                }
            }
        }
    }
    out
}

fn basis_value(basis: &Basis, w: &[Complex64]) -> f64 {
    let mut v = Complex64::new(1.0, 0.0);
    for ((wk, &a), &b) in w.iter().zip(&basis.a).zip(&basis.b) {
        v *= wk.powu(a) * wk.conj().powu(b);
    }
    if basis.imag {
        v.im
    } else {
        v.re
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on two uniforms in (0, 1].
    let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
    let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
}

/// Estimates the weighted vanishing order from a least-squares Taylor fit of
/// `h(0, .)` in `(w, w̄)` on a jittered stencil of radius `1e-2`.
pub fn weighted_vanishing_order(h: &dyn GraphingFunction, max_degree: u32, seed: u64) -> Result<OrderEstimate, ManifoldError> {
    if max_degree > h.smoothness_order() {
        return Err(ManifoldError::DegreeTooHigh { max_degree, smoothness: h.smoothness_order() });
    }
    let d = h.codim();
    let m = h.cr_dim();
    let basis = taylor_basis(m, max_degree);
    let r0 = ORDER_STENCIL_RADIUS;
    let rings = max_degree as usize + 2;
    let per_ring = 4 * (basis.len() / rings + 1) + 4 * (max_degree as usize + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<Complex64>> = Vec::new();
    for i in 1..=rings {
        let rho = r0 * i as f64 / rings as f64;
        let offset = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        for j in 0..per_ring {
            let w: Vec<Complex64> = if m == 1 {
                vec![Complex64::from_polar(rho, 2.0 * PI * (j as f64 + offset) / per_ring as f64)]
            } else {
                let raw: Vec<Complex64> = (0..m).map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng))).collect();
                let norm = libm::sqrt(raw.iter().map(|z| z.norm_sqr()).sum());
                raw.iter().map(|z| z * (rho / norm)).collect()
            };
            points.push(w);
        }
    }
    let rows = points.len();
    let cols = basis.len();
    if rows < 2 * cols {
        return Err(ManifoldError::IllConditioned(f64::INFINITY));
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| {
        basis_value(&basis[j], &points[i]) / libm::pow(r0, basis[j].degree as f64)
    });
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(ManifoldError::IllConditioned(smax / smin));
    }
    let zeros = vec![0.0; d];
    let mut leading: Option<u32> = None;
    let mut magnitude = 0.0;
    let mut residual = 0.0f64;
    for comp in 0..d {
        let rhs = DVector::from_fn(rows, |i, _| h.eval_vec(&zeros, &points[i], 0.0)[comp]);
        let sol = svd.solve(&rhs, 0.0).map_err(|_| ManifoldError::IllConditioned(smax / smin))?;
        let fitted = &a * &sol;
        let scale = rhs.amax().max(f64::MIN_POSITIVE);
        residual = residual.max((fitted - &rhs).amax() / scale);
        // Magnitude of the complex coefficient of w^a w̄^b, in units of the
        // value it contributes at the stencil radius.
        let mut pair: Vec<(u32, bool, f64)> = Vec::new();
        let mut idx = 0;
        while idx < cols {
            let mut mag = sol[idx] * sol[idx];
            let (deg, mixed) = (basis[idx].degree, basis[idx].mixed);
            let mut weight = 1.0;
            if idx + 1 < cols && basis[idx + 1].imag {
                mag += sol[idx + 1] * sol[idx + 1];
                idx += 1;
                // p Re(m) + q Im(m) = c m + conj(c m) with |c| = |p - iq| / 2.
                weight = 0.5;
            }
            pair.push((deg, mixed, weight * libm::sqrt(mag)));
            idx += 1;
        }
        let top = pair.iter().fold(0.0f64, |acc, p| acc.max(p.2));
        if top == 0.0 {
            continue;
        }
        let lead = pair.iter().filter(|p| p.1 && p.2 > ORDER_THRESHOLD * top).map(|p| p.0).min();
        if let Some(deg) = lead {
            let mag = pair.iter().filter(|p| p.1 && p.0 == deg).fold(0.0f64, |acc, p| acc.max(p.2));
            let mag = mag / libm::pow(r0, deg as f64);
            match leading {
                Some(cur) if cur < deg => {}
                Some(cur) if cur == deg => magnitude = f64::max(magnitude, mag),
                _ => {
                    leading = Some(deg);
                    magnitude = mag;
                }
            }
        }
    }
    Ok(OrderEstimate {
        k_hat: leading.map(|deg| deg + 1),
        leading_mixed_degree: leading,
        coefficient_magnitude: magnitude,
        fit_residual: residual,
    })
}

/// Wraps a model for sharing between discs.
pub fn shared<M: GraphingFunction + 'static>(m: M) -> SharedModel {
    Arc::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sector_values() {
        let h = model_sector_hypersurface(3, 0.05, Side::Plus).unwrap();
        assert_eq!(h.eval_vec(&[0.0], &[z(0.3, 0.0)], 0.0)[0], 0.0);
        let rho: f64 = 0.4;
        let v = h.eval_vec(&[0.0], &[Complex64::from_polar(rho, PI)], 0.0)[0];
        assert!((v - 2.0 * rho.powi(3)).abs() < 1e-15);
        let edge = PI * (1.0 / 6.0 + 0.025);
        assert_eq!(h.profile(edge).0, 0.0);
    }

    #[test]
    fn sector_rejects_bad_parameters() {
        assert!(model_sector_hypersurface(3, 0.1, Side::Plus).is_err());
        assert!(model_sector_hypersurface(1, 0.01, Side::Plus).is_err());
        assert!(model_sector_hypersurface(3, -0.01, Side::Minus).is_err());
    }

    #[test]
    fn sector_wirtinger_matches_finite_differences() {
        let h = model_sector_hypersurface(3, 0.05, Side::Plus).unwrap();
        for &w in &[Complex64::from_polar(0.3, 0.6), Complex64::from_polar(0.2, -0.62), Complex64::from_polar(0.1, 2.0)] {
            let mut dw = [z(0.0, 0.0)];
            h.d_w(&[0.0], &[w], 0.0, &mut dw);
            let e = 1e-7;
            let f = |v: Complex64| h.eval_vec(&[0.0], &[v], 0.0)[0];
            let du = (f(w + e) - f(w - e)) / (2.0 * e);
            let dv = (f(w + z(0.0, e)) - f(w - z(0.0, e))) / (2.0 * e);
            let expect = 0.5 * z(du, -dv);
            assert!((dw[0] - expect).norm() < 1e-7, "{:?} vs {:?}", dw[0], expect);
        }
    }

    #[test]
    fn polynomial_examples() {
        let lewy = PolynomialModel::from_w_terms(&[((1, 1), 1.0)]).unwrap();
        let w = z(0.3, -0.4);
        assert!((lewy.eval_vec(&[0.0], &[w], 0.0)[0] - 0.25).abs() < 1e-15);
        let cubic = PolynomialModel::from_w_terms(&[((2, 1), 0.5), ((1, 2), 0.5)]).unwrap();
        assert!((cubic.eval_vec(&[0.0], &[w], 0.0)[0] - 0.25 * 0.3).abs() < 1e-15);
        let flat = PolynomialModel::from_w_terms(&[]).unwrap();
        assert_eq!(flat.eval_vec(&[0.0], &[w], 0.0)[0], 0.0);
    }

    #[test]
    fn polynomial_rejects_non_real_and_linear() {
        assert!(matches!(PolynomialModel::from_w_terms(&[((2, 1), 1.0)]), Err(ManifoldError::NotReal(_))));
        assert!(matches!(PolynomialModel::from_w_terms(&[((1, 0), 1.0), ((0, 1), 1.0)]), Err(ManifoldError::LowDegreeTerm)));
    }

    #[test]
    fn order_estimates() {
        let lewy = PolynomialModel::from_w_terms(&[((1, 1), 1.0)]).unwrap();
        assert_eq!(weighted_vanishing_order(&lewy, 5, 7).unwrap().k_hat, Some(3));
        let harm = PolynomialModel::from_w_terms(&[((3, 0), 0.5), ((0, 3), 0.5)]).unwrap();
        assert_eq!(weighted_vanishing_order(&harm, 5, 7).unwrap().k_hat, None);
        let cubic = PolynomialModel::from_w_terms(&[((2, 1), 0.5), ((1, 2), 0.5)]).unwrap();
        let e = weighted_vanishing_order(&cubic, 5, 7).unwrap();
        assert_eq!(e.k_hat, Some(4));
        assert!((e.coefficient_magnitude - 0.5).abs() < 1e-8);
    }

    #[test]
    fn order_degree_guard() {
        let h = model_sector_hypersurface(3, 0.05, Side::Plus).unwrap();
        assert!(matches!(weighted_vanishing_order(&h, 6, 1), Err(ManifoldError::DegreeTooHigh { .. })));
    }

    #[test]
    fn collar_examples() {
        let flat: SharedModel = shared(FlatModel { d: 1, m: 1 });
        let c = extend_with_collar(flat, &[1.0]).unwrap();
        assert_eq!(c.eval_vec(&[0.0], &[z(0.1, 0.2)], 0.1), vec![0.1]);
        let mut dt = [0.0];
        c.d_t(&[0.3], &[z(0.0, 0.0)], 0.5, &mut dt);
        assert_eq!(dt, [1.0]);
        assert!(extend_with_collar(shared(FlatModel { d: 1, m: 1 }), &[0.5]).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let flat = FlatModel { d: 2, m: 1 };
        let p = ManifoldPoint::on_graph(&flat, &[0.1, 0.2], &[z(0.3, 0.0)]);
        let j = defining_jacobian(&flat, &p).unwrap();
        assert_eq!(j, vec![z(0.0, -0.5), z(0.0, 0.0), z(0.0, 0.0), z(0.0, -0.5)]);
        let mut off = p.clone();
        off.z[0].im += 1e-6;
        assert!(matches!(defining_jacobian(&flat, &off), Err(ManifoldError::OffManifold(_))));
    }
}
