//! Discrete calculus on the unit circle: uniform grids with the vertex
//! `tau = 1` as sample 0, Fourier coefficients, the normalized conjugation
//! operator `T1`, Fourier-Poisson extension to the disc, and the radial
//! derivative at the vertex.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;
use num_complex::Complex64;

use crate::fft::FftPlan;

/// Smallest admissible grid.
pub const MIN_GRID_POINTS: usize = 256;

/// Relative disagreement between the two Richardson levels above which
/// [`radial_derivative_at_one`] reports the data as not `C^{1,gamma}`.
pub const RADIAL_CONSISTENCY_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircleError {
    #[error("grid size {0} is not a power of two >= 256")]
    BadGridSize(usize),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("grids differ ({0} vs {1} points)")]
    GridMismatch(usize, usize),
    #[error("point with modulus {0} is too close to the circle; use boundary values")]
    TooCloseToBoundary(f64),
    #[error("exponent gamma = {0} outside (0, 1)")]
    BadExponent(f64),
    #[error("radial derivative ill-conditioned: levels {fine} and {coarse} disagree")]
    IllConditioned { fine: f64, coarse: f64 },
}

/// Uniform grid `theta_j = 2 pi j / N` on the unit circle.
#[derive(Clone)]
pub struct CircleGrid {
    plan: Arc<FftPlan>,
}

impl fmt::Debug for CircleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CircleGrid({})", self.len())
    }
}

impl PartialEq for CircleGrid {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
    }
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self, CircleError> {
        if n < MIN_GRID_POINTS || !n.is_power_of_two() {
            return Err(CircleError::BadGridSize(n));
        }
        Ok(Self::unchecked(n))
    }

    // Coarse levels used internally (Richardson) may drop below the minimum.
    pub(crate) fn unchecked(n: usize) -> Self {
        CircleGrid { plan: Arc::new(FftPlan::new(n)) }
    }

    pub fn len(&self) -> usize {
        self.plan.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.len() as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.len() as f64
    }

    /// Angle of sample `j` in `(-pi, pi]`.
    pub fn signed_angle(&self, j: usize) -> f64 {
        let n = self.len();
        if j <= n / 2 {
            self.theta(j)
        } else {
            -TAU * (n - j) as f64 / n as f64
        }
    }

    pub fn tau(&self, j: usize) -> Complex64 {
        if j == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let t = self.theta(j);
        Complex64::new(libm::cos(t), libm::sin(t))
    }

    /// Index of `tau = -1`.
    pub fn antipode(&self) -> usize {
        self.len() / 2
    }

    pub(crate) fn plan(&self) -> &FftPlan {
        &self.plan
    }
}

/// Scalars that can live on a [`BoundaryFunction`].
pub trait Sample: Copy + fmt::Debug + Send + Sync + 'static {
    fn is_finite_sample(&self) -> bool;
    fn to_complex(self) -> Complex64;
}

impl Sample for f64 {
    fn is_finite_sample(&self) -> bool {
        self.is_finite()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Sample for Complex64 {
    fn is_finite_sample(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Samples of a scalar function at the grid points, index 0 being `tau = 1`.
/// Vector and matrix valued data are carried as lists of scalar functions.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFunction<T> {
    grid: CircleGrid,
    values: Vec<T>,
}

pub type RealFunction = BoundaryFunction<f64>;
pub type ComplexFunction = BoundaryFunction<Complex64>;

impl<T: Sample> BoundaryFunction<T> {
    pub fn new(grid: &CircleGrid, values: Vec<T>) -> Result<Self, CircleError> {
        if values.len() != grid.len() {
            return Err(CircleError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite_sample()) {
            return Err(CircleError::NonFinite { index });
        }
        Ok(BoundaryFunction { grid: grid.clone(), values })
    }

    /// Samples `f(theta_j)`. Panics if `f` produces a non-finite value.
    pub fn from_angle(grid: &CircleGrid, f: impl Fn(f64) -> T) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.theta(j))).collect();
        Self::new(grid, values).expect("non-finite sample")
    }

    pub(crate) fn from_vec_unchecked(grid: &CircleGrid, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        BoundaryFunction { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, j: usize) -> T {
        self.values[j]
    }

    /// Value at the vertex `tau = 1`.
    pub fn vertex_value(&self) -> T {
        self.values[0]
    }

    /// Value at `tau = -1`.
    pub fn antipode_value(&self) -> T {
        self.values[self.grid.antipode()]
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> BoundaryFunction<U> {
        BoundaryFunction::from_vec_unchecked(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn to_complex(&self) -> ComplexFunction {
        self.map(Sample::to_complex)
    }

    /// Every other sample: the same function on the grid of half the size.
    pub(crate) fn decimate(&self) -> Self {
        let coarse = CircleGrid::unchecked(self.len() / 2);
        let values = self.values.iter().step_by(2).copied().collect();
        BoundaryFunction { grid: coarse, values }
    }
}

impl RealFunction {
    pub fn constant(grid: &CircleGrid, c: f64) -> Self {
        Self::from_vec_unchecked(grid, alloc::vec![c; grid.len()])
    }

    pub fn zeros(grid: &CircleGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn zip_with(&self, other: &RealFunction, f: impl Fn(f64, f64) -> f64) -> RealFunction {
        assert_eq!(self.len(), other.len(), "grid mismatch");
        let v = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_vec_unchecked(&self.grid, v)
    }

    pub fn sub(&self, other: &RealFunction) -> RealFunction {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &RealFunction) -> RealFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> RealFunction {
        self.map(|v| c * v)
    }

    /// `self + i * im`
    pub fn with_imag(&self, im: &RealFunction) -> ComplexFunction {
        assert_eq!(self.len(), im.len(), "grid mismatch");
        let v = self.values.iter().zip(&im.values).map(|(&a, &b)| Complex64::new(a, b)).collect();
        BoundaryFunction::from_vec_unchecked(&self.grid, v)
    }
}

impl ComplexFunction {
    pub fn re(&self) -> RealFunction {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> RealFunction {
        self.map(|z| z.im)
    }

    pub fn sub(&self, other: &ComplexFunction) -> ComplexFunction {
        assert_eq!(self.len(), other.len(), "grid mismatch");
        let v = self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect();
        Self::from_vec_unchecked(&self.grid, v)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Coefficients `c_m`, `m = -N/2 .. N/2-1`, with `f(theta_j) = sum c_m e^{i m theta_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    // FFT order: slot m mod N.
    raw: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn min_mode(&self) -> i64 {
        -(self.len() as i64 / 2)
    }

    pub fn max_mode(&self) -> i64 {
        self.len() as i64 / 2 - 1
    }

    /// `c_m`; panics outside `-N/2 .. N/2-1`.
    pub fn coeff(&self, m: i64) -> Complex64 {
        assert!(m >= self.min_mode() && m <= self.max_mode(), "mode {m} out of range");
        self.raw[m.rem_euclid(self.len() as i64) as usize]
    }

    /// `(m, c_m)` pairs from `-N/2` upwards.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        (self.min_mode()..=self.max_mode()).map(move |m| (m, self.coeff(m)))
    }

    /// Inverse transform on `grid`.
    pub fn synthesize(&self, grid: &CircleGrid) -> Result<ComplexFunction, CircleError> {
        if grid.len() != self.len() {
            return Err(CircleError::GridMismatch(grid.len(), self.len()));
        }
        let mut data = self.raw.clone();
        grid.plan().backward(&mut data);
        Ok(BoundaryFunction::from_vec_unchecked(grid, data))
    }
}

fn raw_spectrum<T: Sample>(f: &BoundaryFunction<T>) -> Vec<Complex64> {
    let n = f.len();
    let mut data: Vec<Complex64> = f.values().iter().map(|v| v.to_complex()).collect();
    f.grid().plan().forward(&mut data);
    let s = 1.0 / n as f64;
    for c in data.iter_mut() {
        *c *= s;
    }
    data
}

pub fn fourier_coeffs<T: Sample>(f: &BoundaryFunction<T>) -> Spectrum {
    Spectrum { raw: raw_spectrum(f) }
}

/// Normalized conjugation `T1 f = T f - (T f)(1)`, where `T` multiplies
/// `c_m` by `-i sgn(m)` after zeroing the Nyquist mode. `T1(cos) = sin`.
pub fn hilbert_t1(f: &RealFunction) -> RealFunction {
    let n = f.len();
    let mut c = raw_spectrum(f);
    c[n / 2] = Complex64::new(0.0, 0.0);
    c[0] = Complex64::new(0.0, 0.0);
    for (m, v) in c.iter_mut().enumerate().skip(1) {
        // -i * sgn(m) * (a + ib)
        *v = if m < n / 2 { Complex64::new(v.im, -v.re) } else { Complex64::new(-v.im, v.re) };
    }
    f.grid().plan().backward(&mut c);
    let at_one = c[0].re;
    let values = c.iter().map(|z| z.re - at_one).collect();
    BoundaryFunction::from_vec_unchecked(f.grid(), values)
}

/// Fourier-Poisson extension `sum c_m r^{|m|} e^{i m theta}` at `point`.
/// The Nyquist mode is split evenly between `m = +-N/2` so real data stay real.
pub fn harmonic_extension<T: Sample>(f: &BoundaryFunction<T>, point: Complex64) -> Result<Complex64, CircleError> {
    let r = point.norm();
    if r > 1.0 - 1e-12 {
        return Err(CircleError::TooCloseToBoundary(r));
    }
    let n = f.len();
    let c = raw_spectrum(f);
    let half = n / 2;
    // Horner in z for m >= 0 and in conj(z) for m < 0.
    let z = point;
    let zb = point.conj();
    let nyq = c[half] * 0.5;
    let mut pos = nyq;
    for m in (0..half).rev() {
        pos = pos * z + c[m];
    }
    let mut neg = nyq;
    for m in (1..half).rev() {
        neg = neg * zb + c[n - m];
    }
    Ok(pos + neg * zb)
}

/// Extension evaluated on the whole ring `|z| = r` at the grid angles.
pub fn harmonic_extension_ring<T: Sample>(f: &BoundaryFunction<T>, r: f64) -> Result<ComplexFunction, CircleError> {
    if !(0.0..=1.0 - 1e-12).contains(&r) {
        return Err(CircleError::TooCloseToBoundary(r));
    }
    let n = f.len();
    let mut c = raw_spectrum(f);
    for (idx, v) in c.iter_mut().enumerate() {
        let m = if idx <= n / 2 { idx } else { n - idx };
        *v *= libm::pow(r, m as f64);
    }
    f.grid().plan().backward(&mut c);
    Ok(BoundaryFunction::from_vec_unchecked(f.grid(), c))
}

/// `(sum_{m<0} |c_m|^2)^{1/2} / max(1, ||f||_2)`; the Nyquist mode is not
/// counted as negative frequency.
pub fn holomorphic_defect(f: &ComplexFunction) -> f64 {
    let n = f.len();
    let c = raw_spectrum(f);
    let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let neg: f64 = c[n / 2 + 1..].iter().map(|z| z.norm_sqr()).sum();
    libm::sqrt(neg) / libm::sqrt(total).max(1.0)
}

/// Outward slope of the discrete Poisson extension at `tau = 1`,
/// `d/dr sum c_m r^{|m|}` at `r = 1`, Nyquist excluded.
pub fn spectral_radial_slope(f: &RealFunction) -> f64 {
    let c = raw_spectrum(f);
    let n = f.len();
    (1..n / 2).map(|m| 2.0 * m as f64 * c[m].re).sum()
}

/// Radial derivative at the vertex with its two Richardson levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialEstimate {
    /// Extrapolated outward derivative `d/dr` at `tau = 1`.
    pub value: f64,
    /// Same extrapolation one level coarser.
    pub coarse: f64,
    /// Unextrapolated slope on the full grid.
    pub slope: f64,
    pub gamma: f64,
}

impl RadialEstimate {
    pub fn inward(&self) -> f64 {
        -self.value
    }
}

/// Richardson estimate of `d/dr` at `tau = 1` without the consistency check.
///
/// For data whose extension is `C^{1,gamma}` the spectral slope on `N`
/// points has error `~ N^{-gamma}`; combining `N` and `N/2` removes that term.
pub fn radial_derivative_estimate(f: &RealFunction, gamma: f64) -> Result<RadialEstimate, CircleError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(CircleError::BadExponent(gamma));
    }
    let half = f.decimate();
    let d0 = spectral_radial_slope(f);
    let d1 = spectral_radial_slope(&half);
    let d2 = spectral_radial_slope(&half.decimate());
    let q = libm::pow(2.0, gamma);
    let value = (q * d0 - d1) / (q - 1.0);
    let coarse = (q * d1 - d2) / (q - 1.0);
    Ok(RadialEstimate { value, coarse, slope: d0, gamma })
}

/// Outward radial derivative `d/dr` of the extension of `f` at `tau = 1`.
///
/// Fails with [`CircleError::IllConditioned`] when the two Richardson levels
/// disagree, which is what happens for data that are not `C^{1,gamma}`.
pub fn radial_derivative_at_one(f: &RealFunction, gamma: f64) -> Result<RadialEstimate, CircleError> {
    let est = radial_derivative_estimate(f, gamma)?;
    let osc = f.max() - f.min();
    let scale = est.value.abs().max(1e-3 * osc);
    if (est.value - est.coarse).abs() > RADIAL_CONSISTENCY_TOL * scale {
        return Err(CircleError::IllConditioned { fine: est.value, coarse: est.coarse });
    }
    Ok(est)
}

/// Arc distance between two angles, in `[0, pi]`.
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = libm::fmod((a - b).abs(), TAU);
    if d > PI {
        TAU - d
    } else {
        d
    }
}
