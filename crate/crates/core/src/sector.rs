//! Sector data `w(tau) = scale (1 - tau)^alpha w_o`, their smooth
//! approximants `w_nu(tau) = w(rho tau) - w(rho)`, `rho = 1 - 1/nu`, and the
//! convergence of the discs they bound.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::bishop::{solve_bishop, BishopError, RegularityTag, SolveOptions};
use crate::circle::{radial_derivative_at_one, BoundaryFunction, CircleGrid, ComplexFunction};
use crate::manifolds::SharedModel;
use crate::spaces::{c1gamma_norm, f2alpha_norm, SpacesError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SectorError {
    #[error("invalid sector: {0}")]
    BadSpec(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("base disc: {0}")]
    BaseSolve(BishopError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
}

/// Holomorphic CR data that can be evaluated on the closed disc.
pub trait HolomorphicDatum {
    fn cr_dim(&self) -> usize;
    fn eval(&self, z: Complex64) -> Vec<Complex64>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorSpec {
    alpha: f64,
    direction: Vec<Complex64>,
    scale: f64,
}

impl SectorSpec {
    /// `alpha` in `(0, 1]` (`alpha = 1` gives the linear datum), `|direction| = 1`,
    /// `0 < scale <= 0.2`.
    pub fn new(alpha: f64, direction: Vec<Complex64>, scale: f64) -> Result<Self, SectorError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(SectorError::BadSpec("alpha must lie in (0, 1]"));
        }
        if !(scale > 0.0 && scale <= 0.2) {
            return Err(SectorError::BadSpec("scale must lie in (0, 0.2]"));
        }
        let norm = libm::sqrt(direction.iter().map(|z| z.norm_sqr()).sum());
        if direction.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(SectorError::BadSpec("direction must be a unit vector"));
        }
        Ok(SectorSpec { alpha, direction, scale })
    }

    /// One CR dimension, direction 1.
    pub fn scalar(alpha: f64, scale: f64) -> Result<Self, SectorError> {
        Self::new(alpha, alloc::vec![Complex64::new(1.0, 0.0)], scale)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn direction(&self) -> &[Complex64] {
        &self.direction
    }

    // Principal branch; Re(1 - z) > 0 on the closed disc minus z = 1.
    fn radial_factor(&self, z: Complex64) -> Complex64 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        if one_minus.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        (one_minus.ln() * self.alpha).exp() * self.scale
    }
}

impl HolomorphicDatum for SectorSpec {
    fn cr_dim(&self) -> usize {
        self.direction.len()
    }
    fn eval(&self, z: Complex64) -> Vec<Complex64> {
        let f = self.radial_factor(z);
        self.direction.iter().map(|d| f * d).collect()
    }
}

/// `gamma = min(k alpha - 1, alpha, 0.95)` and whether the clamp changed
/// `k alpha - 1`.
pub fn clamp_gamma(k: u32, alpha: f64) -> (f64, bool) {
    let raw = k as f64 * alpha - 1.0;
    let g = raw.min(alpha).min(0.95);
    (g, g != raw)
}

fn sample_datum(datum: &dyn HolomorphicDatum, grid: &CircleGrid, f: impl Fn(Complex64) -> Complex64) -> Vec<ComplexFunction> {
    let n = grid.len();
    let vals: Vec<Vec<Complex64>> = (0..n).map(|j| datum.eval(f(grid.tau(j)))).collect();
    (0..datum.cr_dim())
        .map(|k| {
            let mut v: Vec<Complex64> = vals.iter().map(|row| row[k]).collect();
            v[0] = Complex64::new(0.0, 0.0);
            BoundaryFunction::from_vec_unchecked(grid, v)
        })
        .collect()
}

/// Exact samples of the sector datum; `w(1) = 0`.
pub fn sector_boundary(spec: &SectorSpec, grid: &CircleGrid) -> Vec<ComplexFunction> {
    sample_datum(spec, grid, |z| z)
}

/// `w_nu(tau) = w((1 - 1/nu) tau) - w(1 - 1/nu)`.
pub fn smooth_approximant(datum: &dyn HolomorphicDatum, grid: &CircleGrid, nu: f64) -> Result<Vec<ComplexFunction>, SectorError> {
    if !(nu > 1.0 && nu.is_finite()) {
        return Err(SectorError::Precondition("nu must exceed 1"));
    }
    let rho = 1.0 - 1.0 / nu;
    let at_rho = datum.eval(Complex64::new(rho, 0.0));
    let n = grid.len();
    let vals: Vec<Vec<Complex64>> = (0..n).map(|j| datum.eval(grid.tau(j) * rho)).collect();
    Ok((0..datum.cr_dim())
        .map(|k| {
            let mut v: Vec<Complex64> = vals.iter().map(|row| row[k] - at_rho[k]).collect();
            v[0] = Complex64::new(0.0, 0.0);
            BoundaryFunction::from_vec_unchecked(grid, v)
        })
        .collect())
}

/// `sum over components of ||Re(w - w_nu)||_{F^{2,a'}} + ||Im(w - w_nu)||_{F^{2,a'}}`.
pub fn approximation_error(w: &[ComplexFunction], w_nu: &[ComplexFunction], alpha_prime: f64) -> Result<f64, SectorError> {
    if w.len() != w_nu.len() {
        return Err(SectorError::Precondition("component counts differ"));
    }
    let mut total = 0.0;
    for (a, b) in w.iter().zip(w_nu) {
        let diff = a.sub(b);
        total += f2alpha_norm(&diff.re(), alpha_prime)?.total + f2alpha_norm(&diff.im(), alpha_prime)?.total;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub nu: f64,
    pub f_gap: f64,
    pub c1gamma_gap: f64,
    pub radial_gap: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Outward `dV/dr(1)` of the base disc, per component.
    pub base_radial: Vec<f64>,
    pub beta_prime: f64,
    pub gamma: f64,
}

impl ConvergenceTable {
    /// Whether all three gap columns are nonincreasing over the last half of
    /// the rows, and every row converged.
    pub fn tail_nonincreasing(&self) -> bool {
        let tail = &self.rows[self.rows.len() / 2..];
        tail.iter().all(|r| r.converged)
            && tail.windows(2).all(|p| {
                p[1].f_gap <= p[0].f_gap && p[1].c1gamma_gap <= p[0].c1gamma_gap && p[1].radial_gap <= p[0].radial_gap
            })
    }
}

/// Solves the base disc and one disc per `nu`, and measures the gaps in the
/// CR data (`F^{2,alpha'}`), in `V` (`C^{1,beta'}`, `beta' = k alpha' - 1`)
/// and in the normal radial derivative at the vertex.
pub fn convergence_study(
    spec: &SectorSpec,
    h: &SharedModel,
    k: u32,
    nu_list: &[f64],
    alpha_prime: f64,
    grid: &CircleGrid,
) -> Result<ConvergenceTable, SectorError> {
    if !(alpha_prime < spec.alpha) {
        return Err(SectorError::Precondition("alpha' must be below alpha"));
    }
    let beta_prime = k as f64 * alpha_prime - 1.0;
    if !(beta_prime > 0.0 && beta_prime < 1.0) {
        return Err(SectorError::Precondition("k alpha' - 1 must lie in (0, 1)"));
    }
    if h.cr_dim() != spec.cr_dim() {
        return Err(SectorError::Precondition("sector dimension does not match the model"));
    }
    let (gamma, _) = clamp_gamma(k, spec.alpha);
    let gamma = gamma.clamp(1e-3, 0.95);
    let d = h.codim();
    let x0 = alloc::vec![0.0; d];
    let w0 = alloc::vec![Complex64::new(0.0, 0.0); spec.cr_dim()];
    let opts = SolveOptions { regularity: RegularityTag::C1Gamma, ..SolveOptions::default() };
    let w = sector_boundary(spec, grid);
    let (base, _) = solve_bishop(h, &w, &x0, &w0, None, &opts).map_err(SectorError::BaseSolve)?;
    let base_radial: Vec<f64> = base
        .v()
        .iter()
        .map(|v| radial_derivative_at_one(v, gamma).map(|e| e.value).unwrap_or(f64::NAN))
        .collect();
    let smooth = SolveOptions { regularity: RegularityTag::Smooth, ..SolveOptions::default() };
    let mut rows = Vec::with_capacity(nu_list.len());
    for &nu in nu_list {
        let w_nu = smooth_approximant(spec, grid, nu)?;
        let f_gap = approximation_error(&w, &w_nu, alpha_prime)?;
        let row = match solve_bishop(h, &w_nu, &x0, &w0, None, &smooth) {
            Ok((disc, _)) => {
                let mut c1 = 0.0;
                let mut radial = 0.0f64;
                for c in 0..d {
                    c1 += c1gamma_norm(&base.v()[c].sub(&disc.v()[c]), beta_prime)?;
                    let r = radial_derivative_at_one(&disc.v()[c], gamma).map(|e| e.value).unwrap_or(f64::NAN);
                    let gap = (r - base_radial[c]).abs();
                    // f64::max drops NaN; a failed estimate must poison the row.
                    radial = if gap.is_nan() || radial.is_nan() { f64::NAN } else { radial.max(gap) };
                }
                ConvergenceRow { nu, f_gap, c1gamma_gap: c1, radial_gap: radial, converged: true }
            }
            Err(_) => ConvergenceRow { nu, f_gap, c1gamma_gap: f64::NAN, radial_gap: f64::NAN, converged: false },
        };
        rows.push(row);
    }
    Ok(ConvergenceTable { rows, base_radial, beta_prime, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn boundary_examples() {
        let g = CircleGrid::new(256).unwrap();
        let s = SectorSpec::scalar(0.4, 0.1).unwrap();
        let w = &sector_boundary(&s, &g)[0];
        assert_eq!(w.vertex_value(), Complex64::new(0.0, 0.0));
        for j in [1usize, 40, 128, 200] {
            let t = g.theta(j);
            let expect = 0.1 * libm::pow((2.0 * libm::sin(t / 2.0)).abs(), 0.4);
            assert!((w.at(j).norm() - expect).abs() < 1e-15);
        }
        let lin = &sector_boundary(&SectorSpec::scalar(1.0, 0.2).unwrap(), &g)[0];
        for j in 1..g.len() {
            assert!((lin.at(j) - 0.2 * (1.0 - g.tau(j))).norm() < 1e-15);
        }
    }

    #[test]
    fn branch_stays_principal() {
        let g = CircleGrid::new(512).unwrap();
        for j in 1..g.len() {
            let l = (Complex64::new(1.0, 0.0) - g.tau(j)).ln();
            assert!(l.im.abs() < PI / 2.0);
        }
    }

    #[test]
    fn approximant_vanishes_at_vertex() {
        let g = CircleGrid::new(256).unwrap();
        let s = SectorSpec::scalar(0.6, 0.1).unwrap();
        for nu in [2.0, 8.0, 100.0] {
            assert_eq!(smooth_approximant(&s, &g, nu).unwrap()[0].vertex_value(), Complex64::new(0.0, 0.0));
        }
        assert!(smooth_approximant(&s, &g, 1.0).is_err());
    }

    #[test]
    fn gamma_clamp() {
        assert_eq!(clamp_gamma(3, 0.4).1, false);
        assert!((clamp_gamma(3, 0.4).0 - 0.2).abs() < 1e-15);
        let (g, c) = clamp_gamma(3, 0.6);
        assert!(c && (g - 0.6).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(SectorSpec::scalar(0.0, 0.1).is_err());
        assert!(SectorSpec::scalar(0.5, 0.3).is_err());
        assert!(SectorSpec::new(0.5, alloc::vec![Complex64::new(0.5, 0.0)], 0.1).is_err());
    }
}
