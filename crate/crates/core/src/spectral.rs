//! Fourier representations, Fourier multipliers and norms.
//!
//! Convention: `û(ξ) = (2π)^{-d/2} ∫ e^{-ix·ξ} f(x) dx`.
//!
//! Cartesian grids use the FFT with frequencies `ξ = (π/L) k`, rescaled so the
//! discrete coefficients approximate the continuum transform. Radial grids
//! use a direct O(n²) quadrature against the radial kernel `j_d`; the same
//! quadrature (with frequency-side weights) is its own inverse.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::bessel::radial_kernel_sc;
use crate::error::{NlsError, Result};
use crate::field::{Basis, Field, SpectralField};
use crate::grid::{Geometry, Grid};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized d-dimensional FFT over a row-major cube of side `n`.
pub(crate) fn fft_nd(data: &mut [Complex64], n: usize, d: usize, inverse: bool) {
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // last axis is contiguous
    fft.process_with_scratch(data, &mut scratch);
    let total = data.len();
    let mut stride = n;
    // strided axes go through small tiles of columns so the copies stay in cache
    const TILE: usize = 16;
    let mut buf = vec![Complex64::new(0.0, 0.0); TILE * n];
    for _ in 1..d {
        let block = stride * n;
        for start in (0..total).step_by(block) {
            for i0 in (0..stride).step_by(TILE) {
                let w = TILE.min(stride - i0);
                for m in 0..n {
                    let row = start + m * stride + i0;
                    for c in 0..w {
                        buf[c * n + m] = data[row + c];
                    }
                }
                fft.process_with_scratch(&mut buf[..w * n], &mut scratch);
                for m in 0..n {
                    let row = start + m * stride + i0;
                    for c in 0..w {
                        data[row + c] = buf[c * n + m];
                    }
                }
            }
        }
        stride = block;
    }
}

/// Parity `(-1)^{Σ k_a}` of an FFT-ordered cartesian mode.
fn mode_parity(grid: &Grid, flat: usize) -> f64 {
    let idx = grid.unravel(flat);
    let s: usize = idx[..grid.dim()].iter().sum();
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sine/cosine of `π m / n` for `m = 0..2n`.
pub(crate) struct PhaseTable {
    sin: Vec<f64>,
    cos: Vec<f64>,
    n: usize,
}

impl PhaseTable {
    pub(crate) fn new(n: usize) -> Self {
        let (sin, cos) = (0..2 * n).map(|m| (PI * m as f64 / n as f64).sin_cos()).unzip();
        PhaseTable { sin, cos, n }
    }

    #[inline]
    pub(crate) fn get(&self, jk: usize) -> (f64, f64) {
        let m = jk % (2 * self.n);
        (self.sin[m], self.cos[m])
    }
}

/// `out_k = (2π)^{-d/2} Σ_j w_j f_j j_d(π j k / n)`; forward and inverse radial
/// transforms differ only in which side's weights are passed.
fn radial_transform(grid: &Grid, input: &[Complex64], weights: &[f64]) -> Vec<Complex64> {
    let d = grid.dim();
    let n = grid.n();
    let table = PhaseTable::new(n);
    let norm = (2.0 * PI).powf(-(d as f64) / 2.0);
    let wf: Vec<Complex64> = input.iter().zip(weights).map(|(z, w)| z * (w * norm)).collect();
    let active: Vec<usize> = (0..=n).filter(|&j| wf[j] != Complex64::new(0.0, 0.0)).collect();
    let step = PI / n as f64;
    (0..=n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &j in &active {
                let jk = j * k;
                let (s, c) = table.get(jk);
                acc += wf[j] * radial_kernel_sc(d, step * jk as f64, s, c);
            }
            acc
        })
        .collect()
}

fn mode_weights(grid: &Grid) -> Vec<f64> {
    (0..=grid.n()).map(|k| grid.mode_weight(k)).collect()
}

pub fn fourier_forward(f: &Field) -> SpectralField {
    let grid = f.grid;
    match grid.geometry() {
        Geometry::Cartesian => {
            let d = grid.dim();
            let mut modes = f.values.clone();
            fft_nd(&mut modes, grid.n(), d, false);
            let scale = (2.0 * PI).powf(-(d as f64) / 2.0) * grid.spacing().powi(d as i32);
            for (k, z) in modes.iter_mut().enumerate() {
                *z *= scale * mode_parity(&grid, k);
            }
            SpectralField { grid, modes, basis: Basis::CartesianFourier }
        }
        Geometry::Radial => SpectralField {
            grid,
            modes: radial_transform(&grid, &f.values, &grid.weights()),
            basis: Basis::RadialHankel,
        },
    }
}

pub fn fourier_inverse(spec: &SpectralField) -> Field {
    let grid = spec.grid;
    let values = match grid.geometry() {
        Geometry::Cartesian => {
            let d = grid.dim();
            let mut v: Vec<Complex64> = spec
                .modes
                .iter()
                .enumerate()
                .map(|(k, &z)| z * mode_parity(&grid, k))
                .collect();
            fft_nd(&mut v, grid.n(), d, true);
            let scale = (2.0 * PI).powf(-(d as f64) / 2.0) * grid.freq_spacing().powi(d as i32);
            v.iter_mut().for_each(|z| *z *= scale);
            v
        }
        Geometry::Radial => radial_transform(&grid, &spec.modes, &mode_weights(&grid)),
    };
    Field { grid, values, t: 0.0 }
}

/// Applies a radial Fourier multiplier `m(|ξ|)`.
///
/// On cartesian grids this is an FFT round trip with no continuum rescaling,
/// so it is exact up to round-off for unimodular symbols.
pub fn apply_multiplier(f: &Field, m: impl Fn(f64) -> Complex64) -> Field {
    let grid = f.grid;
    match grid.geometry() {
        Geometry::Cartesian => {
            let mut v = f.values.clone();
            fft_nd(&mut v, grid.n(), grid.dim(), false);
            let inv_n = 1.0 / grid.node_count() as f64;
            for (k, z) in v.iter_mut().enumerate() {
                *z *= m(grid.mode_abs_frequency(k)) * inv_n;
            }
            fft_nd(&mut v, grid.n(), grid.dim(), true);
            Field { grid, values: v, t: f.t }
        }
        Geometry::Radial => {
            let spec = fourier_forward(f);
            let spec = spec.map_modes(|k, z| z * m(grid.mode_abs_frequency(k)));
            fourier_inverse(&spec).with_time(f.t)
        }
    }
}

/// `|∇|^s` via the multiplier `|ξ|^s`; the zero mode is dropped for `s < 0`.
pub fn fractional_derivative(f: &Field, s: f64) -> Result<Field> {
    let d = f.grid.dim() as f64;
    if s <= -d / 2.0 {
        return Err(NlsError::InvalidParameter(format!("s = {s} must exceed -d/2 = {}", -d / 2.0)));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(apply_multiplier(f, |xi| {
        if xi == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(xi.powf(s), 0.0)
        }
    }))
}

fn smooth_step_g(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth transition: 0 for x ≤ 0, 1 for x ≥ 1.
pub fn smooth_step(x: f64) -> f64 {
    let a = smooth_step_g(x);
    let b = smooth_step_g(1.0 - x);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Littlewood–Paley bump: 1 on |ξ| ≤ 1, 0 on |ξ| ≥ 11/10.
pub fn lp_bump(xi: f64) -> f64 {
    if xi <= 1.0 {
        1.0
    } else if xi >= 1.1 {
        0.0
    } else {
        smooth_step((1.1 - xi) / 0.1)
    }
}

/// Annulus symbol ψ(ξ) = φ(ξ) − φ(2ξ).
pub fn lp_annulus(xi: f64) -> f64 {
    lp_bump(xi) - lp_bump(2.0 * xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// P_N
    At,
    /// P_{≤N}
    Leq,
    /// P_{>N}
    Gt,
}

pub fn lp_symbol(xi: f64, n: f64, band: Band) -> f64 {
    match band {
        Band::At => lp_annulus(xi / n),
        Band::Leq => lp_bump(xi / n),
        Band::Gt => 1.0 - lp_bump(xi / n),
    }
}

pub fn lp_project(f: &Field, n: f64, band: Band) -> Result<Field> {
    if !(n > 0.0) {
        return Err(NlsError::InvalidParameter(format!("frequency N = {n} must be positive")));
    }
    Ok(apply_multiplier(f, |xi| Complex64::new(lp_symbol(xi, n, band), 0.0)))
}

/// Free Schrödinger evolution `e^{itΔ}`, multiplier `e^{-it|ξ|²}`.
pub fn free_propagate(f: &Field, t: f64) -> Field {
    if t == 0.0 {
        return f.clone();
    }
    apply_multiplier(f, |xi| Complex64::from_polar(1.0, -t * xi * xi)).with_time(f.t + t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// L^p for 1 ≤ p < ∞
    Lp(f64),
    LInf,
    /// homogeneous Sobolev Ḣ^s
    Hdot(f64),
}

pub fn norm(f: &Field, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::LInf => Ok(f.max_abs()),
        NormKind::Lp(p) => {
            if !(p >= 1.0) {
                return Err(NlsError::InvalidParameter(format!("L^p needs p >= 1, got {p}")));
            }
            if p.is_infinite() {
                return Ok(f.max_abs());
            }
            Ok(f.integrate(|_, z| z.norm().powf(p)).powf(1.0 / p))
        }
        NormKind::Hdot(s) => {
            let d = f.grid.dim() as f64;
            if s <= -d / 2.0 {
                return Err(NlsError::InvalidParameter(format!("s = {s} must exceed -d/2")));
            }
            if f.grid.geometry() == Geometry::Cartesian {
                // Parseval on the spectral side avoids a second transform
                let spec = fourier_forward(f);
                let v = spec.integrate(|xi, z| if xi == 0.0 { 0.0 } else { xi.powf(2.0 * s) * z.norm_sqr() });
                Ok(v.sqrt())
            } else {
                let g = fractional_derivative(f, s)?;
                norm(&g, NormKind::Lp(2.0))
            }
        }
    }
}

/// Spectral gradient of a cartesian field (one component per axis).
/// The Nyquist mode is dropped so real fields have real derivatives.
pub fn gradient(f: &Field) -> Result<Vec<Field>> {
    let grid = f.grid;
    if grid.geometry() != Geometry::Cartesian {
        return Err(NlsError::UnsupportedGeometry("spectral gradient needs a cartesian grid".into()));
    }
    let n = grid.n();
    let mut hat = f.values.clone();
    fft_nd(&mut hat, n, grid.dim(), false);
    let inv_n = 1.0 / grid.node_count() as f64;
    (0..grid.dim())
        .map(|axis| {
            let mut v: Vec<Complex64> = hat
                .iter()
                .enumerate()
                .map(|(k, &z)| {
                    let m = grid.unravel(k)[axis];
                    if m == n / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        z * Complex64::new(0.0, grid.axis_freq(m) * inv_n)
                    }
                })
                .collect();
            fft_nd(&mut v, n, grid.dim(), true);
            Ok(Field { grid, values: v, t: f.t })
        })
        .collect()
}

/// Spectral Laplacian of a cartesian field.
pub fn laplacian(f: &Field) -> Field {
    apply_multiplier(f, |xi| Complex64::new(-xi * xi, 0.0))
}

/// Evaluates the radial transform at arbitrary frequencies `rho`.
/// Used where the full O(n²) transform is unnecessary.
pub fn radial_transform_at(f: &Field, rho: &[f64]) -> Vec<Complex64> {
    let grid = f.grid;
    let d = grid.dim();
    let norm = (2.0 * PI).powf(-(d as f64) / 2.0);
    let wf: Vec<(f64, Complex64)> = (0..=grid.n())
        .filter(|&j| f.values[j] != Complex64::new(0.0, 0.0))
        .map(|j| (grid.radius(j), f.values[j] * (grid.weight(j) * norm)))
        .collect();
    rho.iter()
        .map(|&p| {
            wf.iter()
                .map(|&(r, z)| {
                    let arg = p * r;
                    let (s, c) = arg.sin_cos();
                    z * radial_kernel_sc(d, arg, s, c)
                })
                .sum()
        })
        .collect()
}

/// Free evolution `e^{itΔ}` of one field at many times.
///
/// The transform of the data is computed once. Radial grids also cache the
/// kernel matrix (up to [`FreeFlow::MAX_CACHED`] points), so every later time
/// costs one matrix–vector product.
#[derive(Debug, Clone)]
pub struct FreeFlow {
    grid: Grid,
    /// raw FFT coefficients (cartesian) or radial transform
    modes: Vec<Complex64>,
    kernel: Option<Vec<f64>>,
    abs_freq: Vec<f64>,
    t0: f64,
}

impl FreeFlow {
    pub const MAX_CACHED: usize = 4096;

    pub fn new(f: &Field) -> Self {
        let grid = f.grid;
        match grid.geometry() {
            Geometry::Cartesian => {
                let mut modes = f.values.clone();
                fft_nd(&mut modes, grid.n(), grid.dim(), false);
                let abs_freq = (0..grid.node_count()).map(|k| grid.mode_abs_frequency(k)).collect();
                FreeFlow { grid, modes, kernel: None, abs_freq, t0: f.t }
            }
            Geometry::Radial => {
                let modes = fourier_forward(f).modes;
                let n = grid.n();
                let kernel = (n <= Self::MAX_CACHED).then(|| {
                    let d = grid.dim();
                    let table = PhaseTable::new(n);
                    let step = PI / n as f64;
                    let mut k = vec![0.0; (n + 1) * (n + 1)];
                    for j in 0..=n {
                        for m in j..=n {
                            let (s, c) = table.get(j * m);
                            let v = radial_kernel_sc(d, step * (j * m) as f64, s, c);
                            k[j * (n + 1) + m] = v;
                            k[m * (n + 1) + j] = v;
                        }
                    }
                    k
                });
                let abs_freq = (0..=n).map(|k| grid.mode_abs_frequency(k)).collect();
                FreeFlow { grid, modes, kernel, abs_freq, t0: f.t }
            }
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// `m(|ξ|) e^{itΔ} f`, stamped with time `f.t + t`.
    pub fn evolve(&self, t: f64, m: impl Fn(f64) -> f64) -> Field {
        let g = self.grid;
        let symbol = |k: usize| {
            let xi = self.abs_freq[k];
            Complex64::from_polar(m(xi), -t * xi * xi)
        };
        let values = match (&self.kernel, g.geometry()) {
            (_, Geometry::Cartesian) => {
                let inv_n = 1.0 / g.node_count() as f64;
                let mut v: Vec<Complex64> = self.modes.iter().enumerate().map(|(k, z)| z * symbol(k) * inv_n).collect();
                fft_nd(&mut v, g.n(), g.dim(), true);
                v
            }
            (Some(kernel), Geometry::Radial) => {
                let n = g.n();
                let norm = (2.0 * PI).powf(-(g.dim() as f64) / 2.0);
                let wf: Vec<Complex64> =
                    (0..=n).map(|k| self.modes[k] * symbol(k) * (g.mode_weight(k) * norm)).collect();
                (0..=n)
                    .map(|j| {
                        let row = &kernel[j * (n + 1)..(j + 1) * (n + 1)];
                        let (mut re, mut im) = (0.0, 0.0);
                        for (w, z) in row.iter().zip(&wf) {
                            re += w * z.re;
                            im += w * z.im;
                        }
                        Complex64::new(re, im)
                    })
                    .collect()
            }
            (None, Geometry::Radial) => {
                let spec = SpectralField {
                    grid: g,
                    modes: (0..=g.n()).map(|k| self.modes[k] * symbol(k)).collect(),
                    basis: Basis::RadialHankel,
                };
                fourier_inverse(&spec).values
            }
        };
        Field { grid: g, values, t: self.t0 + t }
    }

    /// `|∇e^{itΔ}f|²` on the nodes of a cartesian grid (Nyquist modes dropped,
    /// as in [`gradient`]).
    pub fn kinetic_density_at(&self, t: f64) -> Result<Vec<f64>> {
        let g = self.grid;
        if g.is_radial() {
            return Err(NlsError::UnsupportedGeometry("kinetic density needs a cartesian grid".into()));
        }
        let n = g.n();
        let inv_n = 1.0 / g.node_count() as f64;
        let evolved: Vec<Complex64> = self
            .modes
            .iter()
            .zip(&self.abs_freq)
            .map(|(z, xi)| z * Complex64::from_polar(inv_n, -t * xi * xi))
            .collect();
        let mut density = vec![0.0; g.node_count()];
        for axis in 0..g.dim() {
            let mut v: Vec<Complex64> = evolved
                .iter()
                .enumerate()
                .map(|(k, &z)| {
                    let m = g.unravel(k)[axis];
                    if m == n / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        z * Complex64::new(0.0, g.axis_freq(m))
                    }
                })
                .collect();
            fft_nd(&mut v, n, g.dim(), true);
            for (acc, z) in density.iter_mut().zip(&v) {
                *acc += z.norm_sqr();
            }
        }
        Ok(density)
    }

    /// Value of `m(|ξ|) e^{itΔ} f` at the origin of a radial grid, in O(n).
    pub fn origin_value(&self, t: f64, m: impl Fn(f64) -> f64) -> Result<Complex64> {
        let g = self.grid;
        if !g.is_radial() {
            return Err(NlsError::UnsupportedGeometry("origin values are a radial shortcut".into()));
        }
        let norm = (2.0 * PI).powf(-(g.dim() as f64) / 2.0);
        Ok((0..=g.n())
            .map(|k| {
                let xi = g.mode_abs_frequency(k);
                self.modes[k] * Complex64::from_polar(m(xi) * g.mode_weight(k) * norm, -t * xi * xi)
            })
            .sum())
    }
}
