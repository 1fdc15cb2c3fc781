//! Spatial discretizations.
//!
//! Two geometries are supported. A cartesian grid is a periodic box
//! `[-L, L)^d` with `n` nodes per axis (d ≤ 3). A radial grid samples a
//! radially symmetric function on `r_j = j Δr`, `j = 0..=n`, `Δr = r_max / n`,
//! for any dimension 3 ≤ d ≤ 8; the last node carries the homogeneous
//! Dirichlet condition used by the evolution.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{NlsError, Result};

pub const MAX_DIM: usize = 8;
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Cartesian,
    Radial,
}

impl Geometry {
    pub fn code(self) -> u8 {
        match self {
            Geometry::Cartesian => 0,
            Geometry::Radial => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Geometry::Cartesian),
            1 => Some(Geometry::Radial),
            _ => None,
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Geometry::Cartesian => write!(f, "cartesian"),
            Geometry::Radial => write!(f, "radial"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    geometry: Geometry,
    dim: usize,
    n: usize,
    extent: f64,
    spacing: f64,
}

/// Area of the unit sphere in R^d.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Γ(d/2) for a positive integer d.
pub fn gamma_half(d: usize) -> f64 {
    if d % 2 == 0 {
        (1..d / 2).map(|k| k as f64).product()
    } else {
        // Γ(k + 1/2) = (2k-1)!! / 2^k √π
        let k = (d - 1) / 2;
        let mut g = PI.sqrt();
        for i in 0..k {
            g *= i as f64 + 0.5;
        }
        g
    }
}

impl Grid {
    /// Builds a grid. `extent` is the half-width `L` (cartesian) or `r_max` (radial).
    pub fn new(geometry: Geometry, dim: usize, n: usize, extent: f64) -> Result<Self> {
        if dim < 3 || dim > MAX_DIM {
            return Err(NlsError::InvalidGrid(format!(
                "dimension {dim} outside supported range 3..={MAX_DIM}"
            )));
        }
        if geometry == Geometry::Cartesian && dim > 3 {
            return Err(NlsError::UnsupportedGeometry(format!(
                "cartesian grids are limited to d <= 3 (got d = {dim})"
            )));
        }
        if n < MIN_POINTS {
            return Err(NlsError::InvalidGrid(format!("n = {n} below minimum {MIN_POINTS}")));
        }
        if geometry == Geometry::Cartesian && !n.is_power_of_two() {
            return Err(NlsError::InvalidGrid(format!("cartesian n = {n} is not a power of two")));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(NlsError::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        let spacing = match geometry {
            Geometry::Cartesian => 2.0 * extent / n as f64,
            Geometry::Radial => extent / n as f64,
        };
        Ok(Grid { geometry, dim, n, extent, spacing })
    }

    pub fn cartesian(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        Self::new(Geometry::Cartesian, dim, n, half_width)
    }

    pub fn radial(dim: usize, n: usize, r_max: f64) -> Result<Self> {
        Self::new(Geometry::Radial, dim, n, r_max)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn extent(&self) -> f64 {
        self.extent
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn is_radial(&self) -> bool {
        self.geometry == Geometry::Radial
    }

    pub fn node_count(&self) -> usize {
        match self.geometry {
            Geometry::Cartesian => self.n.pow(self.dim as u32),
            Geometry::Radial => self.n + 1,
        }
    }

    /// Cartesian coordinate of node index `i` along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing
    }

    /// Radius of radial node `j`.
    pub fn radius(&self, j: usize) -> f64 {
        j as f64 * self.spacing
    }

    /// Multi-index of a flat cartesian node index (last axis fastest).
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    /// Position of node `flat`; radial grids report `(r, 0, 0)`.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        match self.geometry {
            Geometry::Radial => [self.radius(flat), 0.0, 0.0],
            Geometry::Cartesian => {
                let idx = self.unravel(flat);
                let mut x = [0.0; 3];
                for a in 0..self.dim {
                    x[a] = self.axis_coord(idx[a]);
                }
                x
            }
        }
    }

    /// Euclidean norm of the node position.
    pub fn node_radius(&self, flat: usize) -> f64 {
        let x = self.position(flat);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Quadrature weight of node `flat`.
    pub fn weight(&self, flat: usize) -> f64 {
        match self.geometry {
            Geometry::Cartesian => self.spacing.powi(self.dim as i32),
            Geometry::Radial => {
                let r = self.radius(flat);
                let end = if flat == 0 || flat == self.n { 0.5 } else { 1.0 };
                end * sphere_area(self.dim) * r.powi(self.dim as i32 - 1) * self.spacing
            }
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match self.geometry {
            Geometry::Cartesian => vec![self.weight(0); self.node_count()],
            Geometry::Radial => {
                let sigma = sphere_area(self.dim);
                (0..=self.n)
                    .map(|j| {
                        let end = if j == 0 || j == self.n { 0.5 } else { 1.0 };
                        end * sigma * self.radius(j).powi(self.dim as i32 - 1) * self.spacing
                    })
                    .collect()
            }
        }
    }

    /// Finite-volume weights: Δx^d (cartesian) or `σ (r_{j+½}^d - r_{j-½}^d)/d`
    /// (radial, half-cell at the origin). These are the weights in which the
    /// radial evolution conserves mass exactly.
    pub fn volume_weights(&self) -> Vec<f64> {
        match self.geometry {
            Geometry::Cartesian => self.weights(),
            Geometry::Radial => {
                let sigma = sphere_area(self.dim);
                let d = self.dim as i32;
                let h = self.spacing;
                (0..=self.n)
                    .map(|j| {
                        let hi = (j as f64 + 0.5) * h;
                        let lo = (j as f64 - 0.5).max(0.0) * h;
                        sigma * (hi.powi(d) - lo.powi(d)) / d as f64
                    })
                    .collect()
            }
        }
    }

    /// Frequency spacing of the spectral lattice (π/L or π/r_max).
    pub fn freq_spacing(&self) -> f64 {
        PI / self.extent
    }

    /// Largest represented |ξ| along an axis (cartesian) or largest ρ (radial).
    pub fn max_frequency(&self) -> f64 {
        PI / self.spacing
    }

    /// Signed frequency of FFT index `m` along one cartesian axis.
    pub fn axis_freq(&self, m: usize) -> f64 {
        let k = if m < self.n / 2 { m as i64 } else { m as i64 - self.n as i64 };
        k as f64 * self.freq_spacing()
    }

    /// Frequency vector of spectral mode `flat` (radial grids report `(ρ, 0, 0)`).
    pub fn mode_frequency(&self, flat: usize) -> [f64; 3] {
        match self.geometry {
            Geometry::Radial => [flat as f64 * self.freq_spacing(), 0.0, 0.0],
            Geometry::Cartesian => {
                let idx = self.unravel(flat);
                let mut xi = [0.0; 3];
                for a in 0..self.dim {
                    xi[a] = self.axis_freq(idx[a]);
                }
                xi
            }
        }
    }

    pub fn mode_abs_frequency(&self, flat: usize) -> f64 {
        let xi = self.mode_frequency(flat);
        (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
    }

    /// Spectral quadrature weight of mode `flat` under the continuum convention.
    pub fn mode_weight(&self, flat: usize) -> f64 {
        let dk = self.freq_spacing();
        match self.geometry {
            Geometry::Cartesian => dk.powi(self.dim as i32),
            Geometry::Radial => {
                let rho = flat as f64 * dk;
                let end = if flat == 0 || flat == self.n { 0.5 } else { 1.0 };
                end * sphere_area(self.dim) * rho.powi(self.dim as i32 - 1) * dk
            }
        }
    }

    /// Returns true when `other` is the same discretization.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.geometry == other.geometry
            && self.dim == other.dim
            && self.n == other.n
            && self.extent == other.extent
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(NlsError::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
