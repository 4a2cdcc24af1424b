//! Bishop's equation `U = x_o - T1 h(U, w_o + w, t)` on the circle grid,
//! its certification, and the linear equation `G = T1(G d_x h) + I` whose
//! value at `tau = -1` transports normal directions.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::circle::{hilbert_t1, holomorphic_defect, BoundaryFunction, CircleError, CircleGrid, ComplexFunction, RealFunction};
use crate::linalg::gmres;
use crate::manifolds::{GraphingFunction, ManifoldPoint, SharedModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BishopError {
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("Bishop iteration did not converge (last residual {last:e})")]
    NonConvergence { last: f64, history: Vec<f64> },
    #[error("linear Bishop iteration did not converge (spectral radius estimate {spectral_radius})")]
    LinearNonConvergence { spectral_radius: f64, history: Vec<f64> },
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// Regularity class recorded on a disc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularityTag {
    F2Alpha,
    C1Gamma,
    Smooth,
}

/// A disc `A = (U + iV, W)` attached to `M` (or to the collar `M'`).
#[derive(Clone, Debug)]
pub struct AnalyticDisc {
    grid: CircleGrid,
    u: Vec<RealFunction>,
    v: Vec<RealFunction>,
    w: Vec<ComplexFunction>,
    base: ManifoldPoint,
    h: SharedModel,
    t: Option<RealFunction>,
    regularity: RegularityTag,
}

impl AnalyticDisc {
    /// Assembles a disc from stored components (for example a deserialized
    /// one). Only shapes are checked here; see [`AnalyticDisc::certificate`].
    pub fn from_parts(
        h: SharedModel,
        u: Vec<RealFunction>,
        v: Vec<RealFunction>,
        w: Vec<ComplexFunction>,
        base: ManifoldPoint,
        t: Option<RealFunction>,
        regularity: RegularityTag,
    ) -> Result<Self, BishopError> {
        let d = h.codim();
        let m = h.cr_dim();
        if u.len() != d || v.len() != d || w.len() != m || base.z.len() != d || base.w.len() != m {
            return Err(BishopError::Precondition("disc components do not match the model dimensions"));
        }
        let grid = u[0].grid().clone();
        let same = u.iter().chain(&v).all(|f| *f.grid() == grid)
            && w.iter().all(|f| *f.grid() == grid)
            && t.as_ref().is_none_or(|f| *f.grid() == grid);
        if !same {
            return Err(BishopError::Precondition("disc components live on different grids"));
        }
        Ok(AnalyticDisc { grid, u, v, w, base, h, t, regularity })
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }
    pub fn u(&self) -> &[RealFunction] {
        &self.u
    }
    pub fn v(&self) -> &[RealFunction] {
        &self.v
    }
    pub fn w(&self) -> &[ComplexFunction] {
        &self.w
    }
    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }
    pub fn model(&self) -> &SharedModel {
        &self.h
    }
    pub fn t_data(&self) -> Option<&RealFunction> {
        self.t.as_ref()
    }
    pub fn regularity(&self) -> RegularityTag {
        self.regularity
    }
    pub fn codim(&self) -> usize {
        self.u.len()
    }

    /// CR data without the base offset: `W - w_o`.
    pub fn cr_datum(&self) -> Vec<ComplexFunction> {
        self.w
            .iter()
            .zip(&self.base.w)
            .map(|(f, &w0)| f.map(|z| z - w0))
            .collect()
    }

    /// `z_c = U_c + i V_c`.
    pub fn z(&self) -> Vec<ComplexFunction> {
        self.u.iter().zip(&self.v).map(|(a, b)| a.with_imag(b)).collect()
    }

    /// `(x, w, t)` at grid point `j`.
    pub fn sample(&self, j: usize) -> (Vec<f64>, Vec<Complex64>, f64) {
        (
            self.u.iter().map(|f| f.at(j)).collect(),
            self.w.iter().map(|f| f.at(j)).collect(),
            self.t.as_ref().map_or(0.0, |f| f.at(j)),
        )
    }

    pub fn certificate(&self) -> DiscCertificate {
        let d = self.codim();
        let x0 = self.base.x();
        let y0 = self.base.y();
        let mut base_error = 0.0f64;
        for c in 0..d {
            base_error = base_error.max((self.u[c].vertex_value() - x0[c]).abs());
            base_error = base_error.max((self.v[c].vertex_value() - y0[c]).abs());
        }
        for (f, w0) in self.w.iter().zip(&self.base.w) {
            base_error = base_error.max((f.vertex_value() - w0).norm());
        }
        let mut attachment = 0.0f64;
        let mut out = vec![0.0; d];
        for j in 0..self.grid.len() {
            let (x, w, t) = self.sample(j);
            self.h.eval(&x, &w, t, &mut out);
            for c in 0..d {
                attachment = attachment.max((self.v[c].at(j) - out[c]).abs());
            }
        }
        let mut conjugacy = 0.0f64;
        for c in 0..d {
            let tu = hilbert_t1(&self.u[c]);
            let v1 = self.v[c].vertex_value();
            for j in 0..self.grid.len() {
                conjugacy = conjugacy.max((self.v[c].at(j) - v1 - tu.at(j)).abs());
            }
        }
        DiscCertificate {
            base_error,
            attachment,
            residual: bishop_residual(self),
            conjugacy,
            z_defect: self.z().iter().map(holomorphic_defect).fold(0.0, f64::max),
            w_defect: self.w.iter().map(holomorphic_defect).fold(0.0, f64::max),
        }
    }
}

/// Measured invariants of a disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscCertificate {
    /// `|A(1) - p|`.
    pub base_error: f64,
    /// `max_j |V_j - h(U_j, W_j, t_j)|`.
    pub attachment: f64,
    /// [`bishop_residual`].
    pub residual: f64,
    /// `max_j |V_j - V(1) - (T1 U)_j|`.
    pub conjugacy: f64,
    pub z_defect: f64,
    pub w_defect: f64,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_picard: usize,
    pub max_newton: usize,
    pub tol: f64,
    /// Initial `U` (defaults to `U = x_o`).
    pub initial: Option<Vec<RealFunction>>,
    pub regularity: RegularityTag,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_picard: 200, max_newton: 20, tol: 1e-12, initial: None, regularity: RegularityTag::F2Alpha }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub picard_iterations: usize,
    pub newton_iterations: usize,
    /// Sup-norm update per Picard step, then Newton residuals.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub final_residual: f64,
    /// Ratio of the last two Picard updates (0 if fewer than two).
    pub contraction: f64,
}

struct Problem<'a> {
    h: &'a dyn GraphingFunction,
    grid: &'a CircleGrid,
    x_o: &'a [f64],
    w: Vec<Vec<Complex64>>,
    t: Option<&'a [f64]>,
}

impl Problem<'_> {
    fn n(&self) -> usize {
        self.grid.len()
    }

    fn boundary_h(&self, u: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let d = u.len();
        let n = self.n();
        let mut out = vec![vec![0.0; n]; d];
        let mut x = vec![0.0; d];
        let mut w = vec![Complex64::new(0.0, 0.0); self.w.len()];
        let mut val = vec![0.0; d];
        for j in 0..n {
            for c in 0..d {
                x[c] = u[c][j];
            }
            for (k, wk) in self.w.iter().enumerate() {
                w[k] = wk[j];
            }
            let t = self.t.map_or(0.0, |t| t[j]);
            self.h.eval(&x, &w, t, &mut val);
            for c in 0..d {
                out[c][j] = val[c];
            }
        }
        out
    }

    // U -> x_o - T1 h(U, W, t)
    fn picard(&self, u: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.boundary_h(u)
            .into_iter()
            .zip(self.x_o)
            .map(|(hv, &x0)| {
                let t1 = hilbert_t1(&BoundaryFunction::from_vec_unchecked(self.grid, hv));
                t1.values().iter().map(|v| x0 - v).collect()
            })
            .collect()
    }
}

fn sup_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

fn flatten(u: &[Vec<f64>]) -> Vec<f64> {
    u.iter().flatten().copied().collect()
}

fn unflatten(v: &[f64], d: usize) -> Vec<Vec<f64>> {
    v.chunks(v.len() / d).map(|c| c.to_vec()).collect()
}

/// Solves Bishop's equation for the disc with CR component `w_o + w_cr`,
/// base `x_o` and optional collar data `t`.
pub fn solve_bishop(
    h: &SharedModel,
    w_cr: &[ComplexFunction],
    x_o: &[f64],
    w_o: &[Complex64],
    t_data: Option<&RealFunction>,
    opts: &SolveOptions,
) -> Result<(AnalyticDisc, SolveReport), BishopError> {
    let d = h.codim();
    let m = h.cr_dim();
    if w_cr.len() != m || w_o.len() != m || x_o.len() != d {
        return Err(BishopError::Precondition("data dimensions do not match the model"));
    }
    let grid = w_cr[0].grid().clone();
    if w_cr.iter().any(|f| *f.grid() != grid) {
        return Err(BishopError::Precondition("CR data on different grids"));
    }
    if w_cr.iter().any(|f| f.vertex_value().norm() > 1e-14) {
        return Err(BishopError::Precondition("CR datum must vanish at tau = 1"));
    }
    if let Some(t) = t_data {
        if *t.grid() != grid {
            return Err(BishopError::Precondition("collar data on a different grid"));
        }
        if t.values().iter().any(|&v| v < 0.0) {
            return Err(BishopError::Precondition("collar data must be nonnegative"));
        }
        let n = grid.len();
        if (0..=4).chain(n - 4..n).any(|j| t.at(j) != 0.0) {
            return Err(BishopError::Precondition("collar data must vanish near tau = 1"));
        }
        if h.collar_direction().is_none() && t.sup_norm() > 0.0 {
            return Err(BishopError::Precondition("collar data given for a model without collar"));
        }
    }
    let problem = Problem {
        h: h.as_ref(),
        grid: &grid,
        x_o,
        w: w_cr
            .iter()
            .zip(w_o)
            .map(|(f, &w0)| f.values().iter().map(|&z| z + w0).collect())
            .collect(),
        t: t_data.map(|f| f.values()),
    };
    let n = grid.len();
    let mut u: Vec<Vec<f64>> = match &opts.initial {
        Some(init) => {
            if init.len() != d || init.iter().any(|f| *f.grid() != grid) {
                return Err(BishopError::Precondition("initial guess has the wrong shape"));
            }
            init.iter().map(|f| f.values().to_vec()).collect()
        }
        None => x_o.iter().map(|&x| vec![x; n]).collect(),
    };
    let start = u.clone();

    let mut history = Vec::new();
    let mut converged = false;
    let mut picard_its = 0;
    for it in 1..=opts.max_picard {
        let next = problem.picard(&u);
        let upd = sup_diff(&next, &u);
        picard_its = it;
        history.push(upd);
        if !upd.is_finite() {
            u = start.clone();
            break;
        }
        u = next;
        if upd <= opts.tol {
            converged = true;
            break;
        }
        if it >= 4 {
            let q = upd / history[it - 2];
            let q_prev = history[it - 2] / history[it - 3];
            if q >= 1.0 && q_prev >= 1.0 {
                break;
            }
            if q > 0.0 && q < 1.0 {
                let needed = libm::log(opts.tol / upd) / libm::log(q);
                if it as f64 + needed > opts.max_picard as f64 && q > 0.9 {
                    break;
                }
            }
        }
    }
    let contraction = if history.len() >= 2 {
        history[history.len() - 1] / history[history.len() - 2]
    } else {
        0.0
    };

    let mut newton_its = 0;
    if !converged {
        let residual_of = |u: &[Vec<f64>]| sup_diff(&problem.picard(u), u);
        for _ in 0..opts.max_newton {
            newton_its += 1;
            let pu = problem.picard(&u);
            let f: Vec<f64> = flatten(&u).iter().zip(flatten(&pu)).map(|(a, b)| a - b).collect();
            let scale = 1e-7 * flatten(&u).iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let pu_flat = flatten(&pu);
            let u_flat = flatten(&u);
            let mut apply = |v: &[f64]| {
                let vn = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if vn == 0.0 {
                    return vec![0.0; v.len()];
                }
                let eps = scale / vn;
                let shifted: Vec<f64> = u_flat.iter().zip(v).map(|(a, b)| a + eps * b).collect();
                let ps = flatten(&problem.picard(&unflatten(&shifted, d)));
                v.iter().zip(ps.iter().zip(&pu_flat)).map(|(vi, (p1, p0))| vi - (p1 - p0) / eps).collect()
            };
            let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
            let step = gmres(&mut apply, &rhs, 40, 5, 1e-10);
            let cand: Vec<f64> = u_flat.iter().zip(&step).map(|(a, b)| a + b).collect();
            u = unflatten(&cand, d);
            let r = residual_of(&u);
            history.push(r);
            if !r.is_finite() {
                break;
            }
            if r <= opts.tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(BishopError::NonConvergence { last: history.last().copied().unwrap_or(f64::NAN), history });
    }

    let v = problem.boundary_h(&u);
    let final_residual = sup_diff(&problem.picard(&u), &u);
    let y0 = h.eval_vec(x_o, w_o, 0.0);
    let base = ManifoldPoint {
        z: x_o.iter().zip(&y0).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        w: w_o.to_vec(),
    };
    let to_fn = |c: Vec<f64>| RealFunction::from_vec_unchecked(&grid, c);
    let w_full = problem.w.iter().map(|c| ComplexFunction::from_vec_unchecked(&grid, c.clone())).collect();
    let disc = AnalyticDisc {
        grid: grid.clone(),
        u: u.into_iter().map(to_fn).collect(),
        v: v.into_iter().map(to_fn).collect(),
        w: w_full,
        base,
        h: h.clone(),
        t: t_data.cloned(),
        regularity: opts.regularity,
    };
    let report = SolveReport {
        iterations: picard_its + newton_its,
        picard_iterations: picard_its,
        newton_iterations: newton_its,
        residual_history: history,
        converged,
        final_residual,
        contraction,
    };
    Ok((disc, report))
}

/// `sup_j |U_j - (x_o - T1 h(U, W, t))_j|`.
pub fn bishop_residual(disc: &AnalyticDisc) -> f64 {
    let x0 = disc.base.x();
    let problem = Problem {
        h: disc.h.as_ref(),
        grid: &disc.grid,
        x_o: &x0,
        w: disc.w.iter().map(|f| f.values().to_vec()).collect(),
        t: disc.t.as_ref().map(|f| f.values()),
    };
    let u: Vec<Vec<f64>> = disc.u.iter().map(|f| f.values().to_vec()).collect();
    sup_diff(&problem.picard(&u), &u)
}

/// Real `d x d` matrix-valued function on the grid, entries row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFunction {
    d: usize,
    entries: Vec<RealFunction>,
}

impl MatrixFunction {
    pub fn identity(grid: &CircleGrid, d: usize) -> Self {
        let entries = (0..d * d)
            .map(|idx| RealFunction::constant(grid, if idx / d == idx % d { 1.0 } else { 0.0 }))
            .collect();
        MatrixFunction { d, entries }
    }

    pub fn from_entries(d: usize, entries: Vec<RealFunction>) -> Result<Self, BishopError> {
        if d == 0 || entries.len() != d * d {
            return Err(BishopError::Precondition("matrix function needs d*d entries"));
        }
        Ok(MatrixFunction { d, entries })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grid(&self) -> &CircleGrid {
        self.entries[0].grid()
    }

    pub fn entry(&self, i: usize, l: usize) -> &RealFunction {
        &self.entries[i * self.d + l]
    }

    /// Matrix at grid point `j`, row-major.
    pub fn at(&self, j: usize) -> Vec<f64> {
        self.entries.iter().map(|f| f.at(j)).collect()
    }

    /// `G(-1)`.
    pub fn antipode(&self) -> Vec<f64> {
        self.at(self.grid().antipode())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearReport {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub spectral_radius: f64,
    /// `max` over entries of `holomorphic_defect(G d'r(A))`.
    pub defect: f64,
}

fn x_jacobians(disc: &AnalyticDisc) -> Vec<Vec<f64>> {
    let d = disc.codim();
    (0..disc.grid.len())
        .map(|j| {
            let (x, w, t) = disc.sample(j);
            let mut out = vec![0.0; d * d];
            disc.h.d_x(&x, &w, t, &mut out);
            out
        })
        .collect()
}

fn mat_mul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for l in 0..d {
            out[i * d + l] = (0..d).map(|k| a[i * d + k] * b[k * d + l]).sum();
        }
    }
    out
}

/// Solves `G = T1(G d_x h(U, W, t)) + I` by fixed-point iteration.
pub fn solve_linear_bishop_g(disc: &AnalyticDisc) -> Result<(MatrixFunction, LinearReport), BishopError> {
    const MAX_ITERS: usize = 200;
    let d = disc.codim();
    let n = disc.grid.len();
    let hx = x_jacobians(disc);
    let mut g: Vec<Vec<f64>> = (0..n).map(|_| MatrixFunction::identity_flat(d)).collect();
    let mut history = Vec::new();
    let mut converged = false;
    for it in 0..MAX_ITERS {
        let prod: Vec<Vec<f64>> = g.iter().zip(&hx).map(|(gj, hj)| mat_mul(gj, hj, d)).collect();
        let mut next = vec![vec![0.0; d * d]; n];
        for idx in 0..d * d {
            let col: Vec<f64> = prod.iter().map(|p| p[idx]).collect();
            let t1 = hilbert_t1(&RealFunction::from_vec_unchecked(&disc.grid, col));
            let delta = if idx / d == idx % d { 1.0 } else { 0.0 };
            for (j, v) in t1.values().iter().enumerate() {
                next[j][idx] = v + delta;
            }
        }
        let upd = g
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max);
        g = next;
        history.push(upd);
        if upd <= 1e-12 {
            converged = true;
            break;
        }
        let diverging = it >= 10 && upd > history[it - 1] && history[it - 1] > history[it - 2];
        if !upd.is_finite() || diverging {
            break;
        }
    }
    let spectral_radius = match history.len() {
        0 | 1 => 0.0,
        k => history[k - 1] / history[k - 2],
    };
    if !converged {
        return Err(BishopError::LinearNonConvergence { spectral_radius, history });
    }
    let entries: Vec<RealFunction> = (0..d * d)
        .map(|idx| RealFunction::from_vec_unchecked(&disc.grid, g.iter().map(|m| m[idx]).collect()))
        .collect();
    // G d'r with d'r = I/(2i) - (1/2) d_x h.
    let mut defect = 0.0f64;
    for idx in 0..d * d {
        let (i, l) = (idx / d, idx % d);
        let vals: Vec<Complex64> = (0..n)
            .map(|j| {
                let gh: f64 = (0..d).map(|k| g[j][i * d + k] * hx[j][k * d + l]).sum();
                Complex64::new(-0.5 * gh, -0.5 * g[j][idx])
            })
            .collect();
        defect = defect.max(holomorphic_defect(&ComplexFunction::from_vec_unchecked(&disc.grid, vals)));
    }
    let report = LinearReport { iterations: history.len(), residual_history: history, spectral_radius, defect };
    Ok((MatrixFunction { d, entries }, report))
}

impl MatrixFunction {
    fn identity_flat(d: usize) -> Vec<f64> {
        (0..d * d).map(|idx| if idx / d == idx % d { 1.0 } else { 0.0 }).collect()
    }
}

/// `G(-1) v`.
pub fn transport(g: &MatrixFunction, v: &[f64]) -> Result<Vec<f64>, BishopError> {
    let d = g.dim();
    if v.len() != d {
        return Err(BishopError::Precondition("vector length does not match G"));
    }
    let m = g.antipode();
    Ok((0..d).map(|i| (0..d).map(|l| m[i * d + l] * v[l]).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{shared, FlatModel, PolynomialModel};

    fn grid(n: usize) -> CircleGrid {
        CircleGrid::new(n).unwrap()
    }

    #[test]
    fn flat_model_is_trivial() {
        let g = grid(256);
        let h = shared(FlatModel { d: 1, m: 1 });
        let w = ComplexFunction::from_angle(&g, |t| 0.1 * (Complex64::from_polar(1.0, t) - 1.0));
        let w = BoundaryFunction::new(&g, { let mut v = w.into_values(); v[0] = Complex64::new(0.0, 0.0); v }).unwrap();
        let (disc, rep) = solve_bishop(&h, &[w], &[0.3], &[Complex64::new(0.0, 0.0)], None, &SolveOptions::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(disc.u()[0].values().iter().all(|&x| x == 0.3));
        assert_eq!(bishop_residual(&disc), 0.0);
        let (gm, _) = solve_linear_bishop_g(&disc).unwrap();
        assert_eq!(gm, MatrixFunction::identity(&g, 1));
    }

    #[test]
    fn lewy_closed_form() {
        let g = grid(1024);
        let c = 0.7;
        let rho = 0.1;
        let h = shared(PolynomialModel::from_w_terms(&[((1, 1), c)]).unwrap());
        let mut vals: Vec<Complex64> = (0..g.len()).map(|j| rho * (g.tau(j) - 1.0)).collect();
        vals[0] = Complex64::new(0.0, 0.0);
        let w = ComplexFunction::new(&g, vals).unwrap();
        let (disc, _) = solve_bishop(&h, &[w], &[0.0], &[Complex64::new(0.0, 0.0)], None, &SolveOptions::default()).unwrap();
        for j in 0..g.len() {
            let expect = 2.0 * c * rho * rho * libm::sin(g.theta(j));
            assert!((disc.u()[0].at(j) - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_nonzero_vertex_datum() {
        let g = grid(256);
        let h = shared(FlatModel { d: 1, m: 1 });
        let w = ComplexFunction::from_angle(&g, |_| Complex64::new(0.1, 0.0));
        assert!(matches!(
            solve_bishop(&h, &[w], &[0.0], &[Complex64::new(0.0, 0.0)], None, &SolveOptions::default()),
            Err(BishopError::Precondition(_))
        ));
    }

    #[test]
    fn transport_identity() {
        let g = grid(256);
        let id = MatrixFunction::identity(&g, 2);
        assert_eq!(transport(&id, &[0.5, -2.0]).unwrap(), vec![0.5, -2.0]);
        assert!(transport(&id, &[1.0]).is_err());
    }
}
