//! Disc families `A^eta` attached to `M ∪ M'` through collar data
//! `t = eta chi`, normal radial derivatives at the vertex, the first-order
//! law for their `eta`-derivative, the barrier test, the swept manifold and
//! chain transport.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bishop::{solve_bishop, solve_linear_bishop_g, transport, AnalyticDisc, BishopError, MatrixFunction, RegularityTag, SolveOptions, SolveReport};
use crate::circle::{
    arc_distance, harmonic_extension, harmonic_extension_ring, radial_derivative_at_one, radial_derivative_estimate, CircleError,
    CircleGrid, ComplexFunction, RealFunction,
};
use crate::manifolds::{smoothstep5, SharedModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeformationError {
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("solve failed at eta = {eta}: {source}")]
    FamilyMember { eta: f64, source: BishopError },
    #[error("no deformation response (|slope| = {0:e})")]
    NoResponse(f64),
    #[error("sweep solve failed at sample {index}: {source}")]
    SweepSample { index: usize, source: BishopError },
    #[error(transparent)]
    Bishop(#[from] BishopError),
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// Smoothstep plateau bump: 1 within `width/2` of `center`, 0 beyond `width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpSpec {
    pub center: f64,
    pub width: f64,
}

impl BumpSpec {
    /// Bump centred at `tau = -1`.
    pub fn at_antipode(width: f64) -> Self {
        BumpSpec { center: PI, width }
    }
}

/// Minimal arc distance kept between the bump support and the vertex.
pub const VERTEX_CLEARANCE: f64 = 0.1;

pub fn bump_chi(spec: &BumpSpec, grid: &CircleGrid) -> Result<RealFunction, DeformationError> {
    let delta = spec.width;
    if !(delta > 0.0 && delta < PI / 2.0) {
        return Err(DeformationError::Precondition("bump width must lie in (0, pi/2)"));
    }
    if arc_distance(spec.center, 0.0) < delta + VERTEX_CLEARANCE {
        return Err(DeformationError::Precondition("bump support too close to the vertex"));
    }
    Ok(RealFunction::from_angle(grid, |t| {
        let dist = arc_distance(t, spec.center);
        smoothstep5((delta - dist) / (0.5 * delta))
    }))
}

#[derive(Clone, Debug)]
pub struct DeformationFamily {
    pub etas: Vec<f64>,
    pub discs: Vec<AnalyticDisc>,
    pub reports: Vec<SolveReport>,
    pub bump: BumpSpec,
    pub chi: RealFunction,
    pub collar_direction: Vec<f64>,
}

/// One Bishop solve per `eta` with `t = eta chi` and `(x_o, w_o) = (0, 0)`.
/// `etas[0]` must be 0.
pub fn deform_family(
    h_collar: &SharedModel,
    w_cr: &[ComplexFunction],
    bump: &BumpSpec,
    etas: &[f64],
    opts: &SolveOptions,
) -> Result<DeformationFamily, DeformationError> {
    let direction = h_collar
        .collar_direction()
        .ok_or(DeformationError::Precondition("model has no collar"))?
        .to_vec();
    if etas.first() != Some(&0.0) {
        return Err(DeformationError::Precondition("etas must start with 0"));
    }
    if etas.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
        return Err(DeformationError::Precondition("etas must be nonnegative"));
    }
    let grid = w_cr
        .first()
        .ok_or(DeformationError::Precondition("empty CR datum"))?
        .grid()
        .clone();
    let chi = bump_chi(bump, &grid)?;
    let x0 = vec![0.0; h_collar.codim()];
    let w0 = vec![Complex64::new(0.0, 0.0); h_collar.cr_dim()];
    let mut discs = Vec::with_capacity(etas.len());
    let mut reports = Vec::with_capacity(etas.len());
    for &eta in etas {
        let t = if eta == 0.0 { None } else { Some(chi.scale(eta)) };
        let (disc, rep) = solve_bishop(h_collar, w_cr, &x0, &w0, t.as_ref(), opts)
            .map_err(|source| DeformationError::FamilyMember { eta, source })?;
        discs.push(disc);
        reports.push(rep);
    }
    Ok(DeformationFamily { etas: etas.to_vec(), discs, reports, bump: *bump, chi, collar_direction: direction })
}

fn require_regular(disc: &AnalyticDisc) -> Result<(), DeformationError> {
    match disc.regularity() {
        RegularityTag::C1Gamma | RegularityTag::Smooth => Ok(()),
        RegularityTag::F2Alpha => Err(DeformationError::Precondition("disc is not tagged C1gamma or smooth")),
    }
}

/// Outward `dV/dr` at `tau = 1`, per component.
pub fn normal_radial_derivative(disc: &AnalyticDisc, gamma: f64) -> Result<Vec<f64>, DeformationError> {
    require_regular(disc)?;
    disc.v()
        .iter()
        .map(|v| Ok(radial_derivative_at_one(v, gamma)?.value))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eq103Report {
    /// Origin-constrained slope of the inward normal derivative of `V^eta - V^0`.
    pub slope: Vec<f64>,
    /// `G(-1) d_t h(A(-1))`.
    pub reference: Vec<f64>,
    /// `|slope/|slope| - reference/|reference||`.
    pub rel_error: f64,
    pub magnitude_ratio: f64,
    /// Largest relative deviation of a member from the fitted line.
    pub linearity: f64,
}

fn unit(v: &[f64]) -> (Vec<f64>, f64) {
    let n = libm::sqrt(v.iter().map(|x| x * x).sum());
    (v.iter().map(|x| x / n).collect(), n)
}

/// Compares the first-order response of the normal radial derivative with
/// the transported collar direction.
pub fn verify_eq103(family: &DeformationFamily, gamma: f64) -> Result<Eq103Report, DeformationError> {
    let nonzero: Vec<usize> = (0..family.etas.len()).filter(|&i| family.etas[i] > 0.0).collect();
    if nonzero.len() < 3 {
        return Err(DeformationError::Precondition("need at least three nonzero etas"));
    }
    let mut sorted: Vec<f64> = nonzero.iter().map(|&i| family.etas[i]).collect();
    sorted.sort_by(f64::total_cmp);
    let q = sorted[1] / sorted[0];
    if sorted.windows(2).any(|p| ((p[1] / p[0]) - q).abs() > 1e-9 * q || p[1] == p[0]) {
        return Err(DeformationError::Precondition("nonzero etas must be geometrically spaced"));
    }
    let base = &family.discs[0];
    for disc in &family.discs {
        require_regular(disc)?;
    }
    let d = base.codim();
    let mut responses = Vec::with_capacity(nonzero.len());
    for &i in &nonzero {
        let disc = &family.discs[i];
        let r: Result<Vec<f64>, DeformationError> = (0..d)
            .map(|c| Ok(radial_derivative_at_one(&disc.v()[c].sub(&base.v()[c]), gamma)?.inward()))
            .collect();
        responses.push((family.etas[i], r?));
    }
    let denom: f64 = responses.iter().map(|(e, _)| e * e).sum();
    let slope: Vec<f64> = (0..d).map(|c| responses.iter().map(|(e, y)| e * y[c]).sum::<f64>() / denom).collect();
    let (s_hat, s_norm) = unit(&slope);
    if !(s_norm >= 1e-12) {
        return Err(DeformationError::NoResponse(s_norm));
    }
    let linearity = responses
        .iter()
        .map(|(e, y)| {
            let dev: f64 = y.iter().zip(&slope).map(|(a, b)| (a - e * b) * (a - e * b)).sum();
            libm::sqrt(dev) / (e * s_norm)
        })
        .fold(0.0, f64::max);
    let (g, _) = solve_linear_bishop_g(base)?;
    let j = base.grid().antipode();
    let (x, w, t) = base.sample(j);
    let mut dt = vec![0.0; d];
    base.model().d_t(&x, &w, t, &mut dt);
    let reference = transport(&g, &dt)?;
    let (r_hat, r_norm) = unit(&reference);
    let rel_error = libm::sqrt(s_hat.iter().zip(&r_hat).map(|(a, b)| (a - b) * (a - b)).sum());
    Ok(Eq103Report { slope, reference, rel_error, magnitude_ratio: s_norm / r_norm, linearity })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierReport {
    pub boundary_min: f64,
    pub interior_min: f64,
    /// Inward radial derivative of `b` at `tau = 1`.
    pub vertex_block: f64,
}

/// Radii at which the barrier function is checked inside the disc.
pub const BARRIER_RADII: [f64; 3] = [0.5, 0.9, 0.99];

/// `b = V + 2 Re(W^k)` on the boundary, on interior rings, and its inward
/// derivative at the vertex (`n = 2`, `d = 1`).
pub fn pseudoconvex_barrier_check(disc: &AnalyticDisc, k: u32, gamma: f64) -> Result<BarrierReport, DeformationError> {
    if disc.codim() != 1 || disc.w().len() != 1 {
        return Err(DeformationError::Precondition("barrier check needs n = 2, d = 1"));
    }
    let vals: Vec<f64> = (0..disc.grid().len())
        .map(|j| disc.v()[0].at(j) + 2.0 * disc.w()[0].at(j).powu(k).re)
        .collect();
    let b = RealFunction::new(disc.grid(), vals)?;
    let mut interior_min = f64::INFINITY;
    for r in BARRIER_RADII {
        let ring = harmonic_extension_ring(&b, r)?;
        interior_min = interior_min.min(ring.values().iter().map(|z| z.re).fold(f64::INFINITY, f64::min));
    }
    // b is generally not C^1 at the vertex in the obstruction case (its
    // derivative blows up inward), so only the sign of the estimate is used.
    let vertex_block = radial_derivative_estimate(&b, gamma)?.inward();
    Ok(BarrierReport { boundary_min: b.min(), interior_min, vertex_block })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Half-width of the `(x0, w0)` box.
    pub delta: f64,
    /// Radial extent: `r` in `[1 - eps_r, 1]`.
    pub eps_r: f64,
    /// Samples per axis.
    pub samples: usize,
    /// Finite-difference step of the Jacobian.
    pub step: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { delta: 1e-2, eps_r: 0.05, samples: 3, step: 1e-4 }
    }
}

/// One sampled point of `Phi(x0, w0, r) = A_{(x0, w0)}(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub x0: Vec<f64>,
    pub w0: Vec<Complex64>,
    pub r: f64,
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// Row-major, `2n` rows, columns `x0, Re w0, Im w0, r`.
    pub jacobian: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub singular_values: Vec<f64>,
    pub jacobian_rank: usize,
    /// `s_r / max(s_{r+1}, 1e-9 s_1)` with `s_{r+1} = 0` at full column rank.
    pub gap_ratio: f64,
}

/// Relative threshold on singular values for the rank.
pub const RANK_THRESHOLD: f64 = 1e-6;

struct Sweeper<'a> {
    disc: &'a AnalyticDisc,
    datum: Vec<ComplexFunction>,
    x_ref: Vec<f64>,
    w_ref: Vec<Complex64>,
    opts: SolveOptions,
}

impl Sweeper<'_> {
    fn solve(&self, dx: &[f64], dw: &[Complex64]) -> Result<AnalyticDisc, BishopError> {
        let x: Vec<f64> = self.x_ref.iter().zip(dx).map(|(a, b)| a + b).collect();
        let w: Vec<Complex64> = self.w_ref.iter().zip(dw).map(|(a, b)| a + b).collect();
        solve_bishop(self.disc.model(), &self.datum, &x, &w, self.disc.t_data(), &self.opts).map(|r| r.0)
    }

    // (Re z, Im z, Re w, Im w) of the disc at radius r on the ray theta = 0.
    fn evaluate(disc: &AnalyticDisc, r: f64) -> Result<(Vec<Complex64>, Vec<Complex64>), CircleError> {
        if r >= 1.0 {
            let z = disc.z().iter().map(|f| f.vertex_value()).collect();
            let w = disc.w().iter().map(|f| f.vertex_value()).collect();
            return Ok((z, w));
        }
        let p = Complex64::new(r, 0.0);
        let mut z = Vec::new();
        for (u, v) in disc.u().iter().zip(disc.v()) {
            z.push(Complex64::new(harmonic_extension(u, p)?.re, harmonic_extension(v, p)?.re));
        }
        let w = disc.w().iter().map(|f| harmonic_extension(f, p)).collect::<Result<Vec<_>, _>>()?;
        Ok((z, w))
    }

    fn flatten(z: &[Complex64], w: &[Complex64]) -> Vec<f64> {
        z.iter().map(|v| v.re).chain(z.iter().map(|v| v.im)).chain(w.iter().map(|v| v.re)).chain(w.iter().map(|v| v.im)).collect()
    }
}

/// Samples the swept map and computes its Jacobian at `(0, 0, 1)` (the
/// disc's own base point, `r = 1`).
pub fn sweep_manifold(disc: &AnalyticDisc, opts: &SweepOptions) -> Result<SweepReport, DeformationError> {
    if opts.samples < 2 || !(opts.step > 0.0) || !(opts.eps_r > 0.0 && opts.eps_r < 1.0) {
        return Err(DeformationError::Precondition("invalid sweep options"));
    }
    let d = disc.codim();
    let m = disc.w().len();
    let sweeper = Sweeper {
        disc,
        datum: disc.cr_datum(),
        x_ref: disc.base().x(),
        w_ref: disc.base().w.clone(),
        opts: SolveOptions { regularity: disc.regularity(), ..SolveOptions::default() },
    };
    let params = d + 2 * m;
    let lin = |i: usize| -opts.delta + 2.0 * opts.delta * i as f64 / (opts.samples - 1) as f64;
    let total = opts.samples.pow(params as u32);
    let mut points = Vec::new();
    for index in 0..total {
        let mut rem = index;
        let mut p = Vec::with_capacity(params);
        for _ in 0..params {
            p.push(lin(rem % opts.samples));
            rem /= opts.samples;
        }
        let dx = p[..d].to_vec();
        let dw: Vec<Complex64> = (0..m).map(|k| Complex64::new(p[d + k], p[d + m + k])).collect();
        let sol = sweeper.solve(&dx, &dw).map_err(|source| DeformationError::SweepSample { index, source })?;
        for ri in 0..opts.samples {
            let r = 1.0 - opts.eps_r + opts.eps_r * ri as f64 / (opts.samples - 1) as f64;
            let (z, w) = Sweeper::evaluate(&sol, r)?;
            points.push(SweepPoint {
                x0: sweeper.x_ref.iter().zip(&dx).map(|(a, b)| a + b).collect(),
                w0: sweeper.w_ref.iter().zip(&dw).map(|(a, b)| a + b).collect(),
                r,
                z,
                w,
            });
        }
    }

    let rows = 2 * (d + m);
    let cols = params + 1;
    let mut jac = DMatrix::<f64>::zeros(rows, cols);
    let hstep = opts.step;
    for col in 0..params {
        let mut dx = vec![0.0; d];
        let mut dw = vec![Complex64::new(0.0, 0.0); m];
        let mut eval = |sign: f64| -> Result<Vec<f64>, DeformationError> {
            if col < d {
                dx[col] = sign * hstep;
            } else if col < d + m {
                dw[col - d] = Complex64::new(sign * hstep, 0.0);
            } else {
                dw[col - d - m] = Complex64::new(0.0, sign * hstep);
            }
            let sol = sweeper.solve(&dx, &dw).map_err(|source| DeformationError::SweepSample { index: usize::MAX, source })?;
            let (z, w) = Sweeper::evaluate(&sol, 1.0)?;
            Ok(Sweeper::flatten(&z, &w))
        };
        let plus = eval(1.0)?;
        let minus = eval(-1.0)?;
        for row in 0..rows {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * hstep);
        }
    }
    let (z1, w1) = Sweeper::evaluate(disc, 1.0)?;
    let (z0, w0) = Sweeper::evaluate(disc, 1.0 - hstep)?;
    let f1 = Sweeper::flatten(&z1, &w1);
    let f0 = Sweeper::flatten(&z0, &w0);
    for row in 0..rows {
        jac[(row, params)] = (f1[row] - f0[row]) / hstep;
    }
    let mut sv: Vec<f64> = jac.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let s1 = sv[0];
    let rank = sv.iter().filter(|&&s| s > RANK_THRESHOLD * s1).count();
    let gap_ratio = if rank == 0 {
        0.0
    } else {
        let next = sv.get(rank).copied().unwrap_or(0.0);
        sv[rank - 1] / next.max(1e-9 * s1)
    };
    Ok(SweepReport {
        points,
        jacobian: (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| jac[(r, c)]).collect(),
        rows,
        cols,
        singular_values: sv,
        jacobian_rank: rank,
        gap_ratio,
    })
}

/// `G_N(-1) ... G_1(-1) v`, applying `g_list[0]` first.
pub fn chain_transport(g_list: &[MatrixFunction], v: &[f64]) -> Result<Vec<f64>, DeformationError> {
    let mut out = v.to_vec();
    for g in g_list {
        if g.dim() != out.len() {
            return Err(DeformationError::Precondition("chain link dimension mismatch"));
        }
        out = transport(g, &out)?;
    }
    Ok(out)
}
