use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::grid::Grid;

/// Complex samples of u(t, ·) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(NlsError::GridMismatch(format!(
                "{} samples for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Field { grid, values, t: 0.0 })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field { grid, values: vec![Complex64::new(0.0, 0.0); grid.node_count()], t: 0.0 }
    }

    /// Samples a function of the node position.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.node_count()).map(|i| f(grid.position(i))).collect();
        Field { grid, values, t: 0.0 }
    }

    /// Samples a real function of |x|.
    pub fn from_radial_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values =
            (0..grid.node_count()).map(|i| Complex64::new(f(grid.node_radius(i)), 0.0)).collect();
        Field { grid, values, t: 0.0 }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&z| f(z)).collect(), t: self.t }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            t: self.t,
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            t: self.t,
        })
    }

    /// Pointwise product with a real weight depending on the node index.
    pub fn mul_real(&self, w: impl Fn(usize) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().enumerate().map(|(i, &z)| z * w(i)).collect(),
            t: self.t,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Quadrature of a pointwise density.
    pub fn integrate(&self, density: impl Fn(usize, Complex64) -> f64) -> f64 {
        match self.grid.geometry() {
            crate::grid::Geometry::Cartesian => {
                let w = self.grid.weight(0);
                w * self.values.iter().enumerate().map(|(i, &z)| density(i, z)).sum::<f64>()
            }
            crate::grid::Geometry::Radial => self
                .values
                .iter()
                .enumerate()
                .map(|(i, &z)| self.grid.weight(i) * density(i, z))
                .sum(),
        }
    }

    /// Quadrature with the finite-volume weights of [`Grid::volume_weights`].
    pub fn integrate_volume(&self, density: impl Fn(usize, Complex64) -> f64) -> f64 {
        match self.grid.geometry() {
            crate::grid::Geometry::Cartesian => self.integrate(density),
            crate::grid::Geometry::Radial => self
                .grid
                .volume_weights()
                .iter()
                .zip(&self.values)
                .enumerate()
                .map(|(i, (w, &z))| w * density(i, z))
                .sum(),
        }
    }
}

/// Basis tag for spectral coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    CartesianFourier,
    RadialHankel,
}

/// Fourier coefficients û(ξ) under the continuum convention
/// `û(ξ) = (2π)^{-d/2} ∫ e^{-ix·ξ} f(x) dx`.
///
/// Cartesian modes are stored in FFT order; radial modes at ρ_k = k π / r_max.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub modes: Vec<Complex64>,
    pub basis: Basis,
}

impl SpectralField {
    pub fn map_modes(&self, m: impl Fn(usize, Complex64) -> Complex64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            modes: self.modes.iter().enumerate().map(|(k, &z)| m(k, z)).collect(),
            basis: self.basis,
        }
    }

    /// Spectral quadrature of a density in (|ξ|, û).
    pub fn integrate(&self, density: impl Fn(f64, Complex64) -> f64) -> f64 {
        self.modes
            .iter()
            .enumerate()
            .map(|(k, &z)| self.grid.mode_weight(k) * density(self.grid.mode_abs_frequency(k), z))
            .sum()
    }
}
