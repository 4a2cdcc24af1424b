//! Grid surrogates for Hölder, weighted `F^{2,alpha}` and `C^{1,gamma}`
//! norms, plus a Hardy-Littlewood check for sampled interior functions.
//!
//! Hölder quotients are taken over dyadic separations `2^s` grid steps,
//! `s = 0 ..= log2(N/4)`.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::circle::{BoundaryFunction, CircleGrid, RealFunction};

/// Fixed constant in the Hardy-Littlewood check.
pub const HARDY_LITTLEWOOD_K: f64 = 10.0;

/// Smallest exponent reported by [`holder_exponent_fit`].
pub const MIN_EXPONENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpacesError {
    #[error("exponent {0} outside its admissible range")]
    BadExponent(f64),
    #[error("gradient hypothesis violated at r={radius}, theta={angle}: |grad f|={gradient} > {bound}")]
    HypothesisViolated { radius: f64, angle: f64, gradient: f64, bound: f64 },
    #[error("polar samples malformed: {0}")]
    BadSamples(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderEstimate {
    pub exponent: f64,
    pub seminorm: f64,
    /// Arc separations used, largest first, each half the previous.
    pub scales: Vec<f64>,
    pub fit_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FNormReport {
    pub c0: f64,
    pub weighted_d1: f64,
    pub weighted_d2: f64,
    pub total: f64,
}

fn dyadic_levels(grid: &CircleGrid) -> usize {
    (grid.len() / 4).trailing_zeros() as usize
}

/// `(separation in radians, max_j |f_{j+2^s} - f_j|)` for `s = 0..=log2(N/4)`.
pub fn dyadic_moduli(f: &RealFunction) -> Vec<(f64, f64)> {
    let n = f.len();
    let h = f.grid().spacing();
    let v = f.values();
    (0..=dyadic_levels(f.grid()))
        .map(|s| {
            let sep = 1usize << s;
            let w = (0..n).fold(0.0f64, |m, j| m.max((v[(j + sep) % n] - v[j]).abs()));
            (sep as f64 * h, w)
        })
        .collect()
}

fn seminorm_from(moduli: &[(f64, f64)], alpha: f64) -> f64 {
    moduli.iter().fold(0.0f64, |m, &(d, w)| m.max(w / libm::pow(d, alpha)))
}

fn scales_of(moduli: &[(f64, f64)]) -> Vec<f64> {
    moduli.iter().rev().map(|&(d, _)| d).collect()
}

pub fn holder_seminorm(f: &RealFunction, alpha: f64) -> Result<HolderEstimate, SpacesError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(SpacesError::BadExponent(alpha));
    }
    let moduli = dyadic_moduli(f);
    Ok(HolderEstimate {
        exponent: alpha,
        seminorm: seminorm_from(&moduli, alpha),
        scales: scales_of(&moduli),
        fit_residual: 0.0,
    })
}

/// Log-log least-squares fit of the dyadic modulus of continuity.
///
/// Only the finest half of the separations enters the fit: at coarse
/// separations the modulus of a locally `C^alpha` function saturates at the
/// size of its support and biases the slope down.
pub fn holder_exponent_fit(f: &RealFunction) -> HolderEstimate {
    let all = dyadic_moduli(f);
    let fine = &all[..all.len() / 2 + 1];
    let pts: Vec<(f64, f64)> = fine
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(d, w)| (libm::log(d), libm::log(w)))
        .collect();
    if pts.len() < 2 {
        return HolderEstimate { exponent: 1.0, seminorm: 0.0, scales: scales_of(fine), fit_residual: 0.0 };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0) * (p.1 - icpt - slope * p.0)).sum();
    let exponent = slope.clamp(MIN_EXPONENT, 1.0);
    HolderEstimate {
        exponent,
        seminorm: seminorm_from(fine, exponent),
        scales: scales_of(fine),
        fit_residual: libm::sqrt(rss / n),
    }
}

/// Centered first difference; index 0 included.
pub fn centered_derivative(f: &RealFunction) -> RealFunction {
    let n = f.len();
    let h = f.grid().spacing();
    let v = f.values();
    let d = (0..n).map(|j| (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2.0 * h)).collect();
    BoundaryFunction::from_vec_unchecked(f.grid(), d)
}

/// Centered second difference; index 0 included.
pub fn centered_second_derivative(f: &RealFunction) -> RealFunction {
    let n = f.len();
    let h = f.grid().spacing();
    let v = f.values();
    let d = (0..n).map(|j| (v[(j + 1) % n] - 2.0 * v[j] + v[(j + n - 1) % n]) / (h * h)).collect();
    BoundaryFunction::from_vec_unchecked(f.grid(), d)
}

fn weighted(f: &RealFunction, power: i32) -> RealFunction {
    let g = f.grid();
    let v = (0..f.len())
        .map(|j| if j == 0 { 0.0 } else { libm::pow(g.signed_angle(j).abs(), power as f64) * f.at(j) })
        .collect();
    BoundaryFunction::from_vec_unchecked(g, v)
}

/// Discrete `||sigma||_{C^0} + ||phi sigma'||_{C^alpha} + ||phi^2 sigma''||_{C^alpha}`,
/// `phi` the angle to the vertex in `[0, pi]` (continuous across the
/// antipode). Derivatives at the vertex are excluded (their
/// weighted values are set to 0, the weight's value there).
pub fn f2alpha_norm(sigma: &RealFunction, alpha: f64) -> Result<FNormReport, SpacesError> {
    let c0 = sigma.sup_norm();
    let d1 = weighted(&centered_derivative(sigma), 1);
    let d2 = weighted(&centered_second_derivative(sigma), 2);
    let weighted_d1 = holder_seminorm(&d1, alpha)?.seminorm + d1.sup_norm();
    let weighted_d2 = holder_seminorm(&d2, alpha)?.seminorm + d2.sup_norm();
    Ok(FNormReport { c0, weighted_d1, weighted_d2, total: c0 + weighted_d1 + weighted_d2 })
}

/// `max|f| + max|f'| + [f']_gamma`.
pub fn c1gamma_norm(f: &RealFunction, gamma: f64) -> Result<f64, SpacesError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SpacesError::BadExponent(gamma));
    }
    let d = centered_derivative(f);
    Ok(f.sup_norm() + d.sup_norm() + holder_seminorm(&d, gamma)?.seminorm)
}

/// Values and gradient norms of a real function on a polar grid
/// `r_i e^{i theta_j}`, `theta_j = 2 pi j / n_theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarSamples {
    radii: Vec<f64>,
    n_theta: usize,
    values: Vec<f64>,
    gradients: Vec<f64>,
}

impl PolarSamples {
    pub fn new(radii: Vec<f64>, n_theta: usize, values: Vec<f64>, gradients: Vec<f64>) -> Result<Self, SpacesError> {
        if radii.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
            return Err(SpacesError::BadSamples("radii must lie in [0, 1]"));
        }
        if n_theta == 0 || values.len() != radii.len() * n_theta || gradients.len() != values.len() {
            return Err(SpacesError::BadSamples("sample arrays do not match the grid"));
        }
        if values.iter().chain(&gradients).any(|v| !v.is_finite()) {
            return Err(SpacesError::BadSamples("non-finite sample"));
        }
        Ok(PolarSamples { radii, n_theta, values, gradients })
    }

    /// Samples `f(z) -> (value, |grad|)` on the grid.
    pub fn from_fn(radii: &[f64], n_theta: usize, f: impl Fn(Complex64) -> (f64, f64)) -> Result<Self, SpacesError> {
        let mut values = Vec::with_capacity(radii.len() * n_theta);
        let mut gradients = Vec::with_capacity(values.capacity());
        for &r in radii {
            for j in 0..n_theta {
                let (v, g) = f(Self::node(r, j, n_theta));
                values.push(v);
                gradients.push(g);
            }
        }
        Self::new(radii.to_vec(), n_theta, values, gradients)
    }

    fn node(r: f64, j: usize, n_theta: usize) -> Complex64 {
        Complex64::from_polar(r, core::f64::consts::TAU * j as f64 / n_theta as f64)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn points(&self) -> impl Iterator<Item = (Complex64, f64, f64)> + '_ {
        self.radii.iter().enumerate().flat_map(move |(i, &r)| {
            (0..self.n_theta).map(move |j| {
                let k = i * self.n_theta + j;
                (Self::node(r, j, self.n_theta), self.values[k], self.gradients[k])
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyLittlewoodReport {
    pub passes: bool,
    pub ratio: f64,
    /// Largest pair quotient `|f(p)-f(q)| / |p-q|^alpha`.
    pub quotient: f64,
    pub sup: f64,
}

/// Checks `[f]_alpha <= K (max|f| + C)` on the samples, after checking the
/// hypothesis `|grad f| <= C (1-r)^{alpha-1}` at every interior sample.
pub fn hardy_littlewood_check(samples: &PolarSamples, alpha: f64, c: f64) -> Result<HardyLittlewoodReport, SpacesError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(SpacesError::BadExponent(alpha));
    }
    for (p, _, g) in samples.points() {
        let delta = 1.0 - p.norm();
        if delta <= 0.0 {
            continue;
        }
        let bound = c * libm::pow(delta, alpha - 1.0);
        if g > bound * 1.01 {
            return Err(SpacesError::HypothesisViolated { radius: p.norm(), angle: p.arg(), gradient: g, bound });
        }
    }
    let pts: Vec<(Complex64, f64)> = samples.points().map(|(p, v, _)| (p, v)).collect();
    let mut quotient = 0.0f64;
    for (i, &(p, fp)) in pts.iter().enumerate() {
        for &(q, fq) in &pts[i + 1..] {
            let d2 = (p - q).norm_sqr();
            if d2 > 0.0 {
                quotient = quotient.max((fp - fq).abs() / libm::pow(d2, 0.5 * alpha));
            }
        }
    }
    let sup = pts.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let denom = sup + c;
    let ratio = if denom > 0.0 { quotient / denom } else if quotient == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(HardyLittlewoodReport { passes: ratio <= HARDY_LITTLEWOOD_K, ratio, quotient, sup })
}
