//! Finite-volume operators on radial grids.
//!
//! The Laplacian `∂_rr + (d-1)/r ∂_r` is discretized in flux form
//!
//! ```text
//! (Lu)_j = [a_{j+½}(u_{j+1}-u_j) - a_{j-½}(u_j-u_{j-1})] / (h V_j),  a = r^{d-1}
//! V_j = (r_{j+½}^d - r_{j-½}^d) / d,  V_0 = (h/2)^d / d
//! ```
//!
//! i.e. a finite-volume balance over shells; it is exact on quadratics. The
//! origin row reduces to `2d (u_1 - u_0) / h²`, the reflection stencil for
//! `d·u''(0)` under `u'(0) = 0`. The operator is symmetric in the `V_j`
//! inner product, so Crank–Nicolson conserves `Σ V_j |u_j|²` exactly.
//! The last node carries a homogeneous Dirichlet condition.

use num_complex::Complex64;

use crate::grid::{sphere_area, Grid};

/// Face coefficients `a_{j+½} = r_{j+½}^{d-1}` for `j = 0..n`.
fn face_coefficients(grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    let p = grid.dim() as i32 - 1;
    (0..grid.n()).map(|j| ((j as f64 + 0.5) * h).powi(p)).collect()
}

/// Shell volumes (without the sphere area factor).
pub fn control_volumes(grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    let d = grid.dim();
    (0..=grid.n())
        .map(|j| {
            let hi = (j as f64 + 0.5) * h;
            let lo = (j as f64 - 0.5).max(0.0) * h;
            (hi.powi(d as i32) - lo.powi(d as i32)) / d as f64
        })
        .collect()
}

/// Applies the discrete Laplacian to interior rows `0..n`; the last entry
/// (Dirichlet node) is returned as zero. Values at the last node are read,
/// so non-vanishing boundary data still enters the neighbouring row.
pub fn laplacian<T>(grid: &Grid, u: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = grid.n();
    let h = grid.spacing();
    let d = grid.dim();
    let a = face_coefficients(grid);
    let vol = control_volumes(grid);
    let mut out = vec![T::default(); n + 1];
    out[0] = (u[1] - u[0]) * (2.0 * d as f64 / (h * h));
    for j in 1..n {
        let flux_hi = (u[j + 1] - u[j]) * a[j];
        let flux_lo = (u[j] - u[j - 1]) * a[j - 1];
        out[j] = (flux_hi - flux_lo) * (1.0 / (vol[j] * h));
    }
    out
}

/// Discrete kinetic energy `σ Σ a_{j+½} |u_{j+1} - u_j|² / h`, equal to
/// `-σ ⟨u, V L u⟩` for data vanishing at the outer node.
pub fn kinetic(grid: &Grid, u: &[Complex64]) -> f64 {
    let h = grid.spacing();
    let a = face_coefficients(grid);
    let s: f64 = (0..grid.n()).map(|j| a[j] * (u[j + 1] - u[j]).norm_sqr()).sum();
    sphere_area(grid.dim()) * s / h
}

/// Centered radial derivative; one-sided at the outer node, zero at the origin.
pub fn derivative(grid: &Grid, u: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let h = grid.spacing();
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for j in 1..n {
        out[j] = (u[j + 1] - u[j - 1]) / (2.0 * h);
    }
    out[n] = (u[n] - u[n - 1]) / h;
    out
}

/// Crank–Nicolson propagator for `u_t = i L u` with step `dt`.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    volumes: Vec<f64>,
    faces: Vec<f64>,
    inv_h: f64,
}

impl CrankNicolson {
    pub fn new(grid: &Grid) -> Self {
        CrankNicolson {
            volumes: control_volumes(grid),
            faces: face_coefficients(grid),
            inv_h: 1.0 / grid.spacing(),
        }
    }

    /// Advances `u` in place by `dt` (any sign). The last node is set to zero.
    pub fn step(&self, u: &mut [Complex64], dt: f64) {
        let m = self.faces.len(); // unknowns 0..m
        let tau = Complex64::new(0.0, 0.5 * dt);
        // symmetric S: off-diagonal c_j = a_{j+½}/h, diagonal -(c_{j-1} + c_j)
        let c: Vec<f64> = self.faces.iter().map(|a| a * self.inv_h).collect();
        let diag_s = |j: usize| -(c[j] + if j > 0 { c[j - 1] } else { 0.0 });
        let mut rhs = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            let mut su = u[j] * diag_s(j);
            if j > 0 {
                su += u[j - 1] * c[j - 1];
            }
            if j + 1 < m {
                su += u[j + 1] * c[j];
            }
            rhs[j] = u[j] * self.volumes[j] + tau * su;
        }
        // (V - τ S) x = rhs, Thomas algorithm
        let mut cp = vec![Complex64::new(0.0, 0.0); m];
        let mut dp = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            let b = Complex64::new(self.volumes[j], 0.0) - tau * diag_s(j);
            let lower = if j > 0 { -tau * c[j - 1] } else { Complex64::new(0.0, 0.0) };
            let upper = if j + 1 < m { -tau * c[j] } else { Complex64::new(0.0, 0.0) };
            let denom = if j > 0 { b - lower * cp[j - 1] } else { b };
            cp[j] = upper / denom;
            dp[j] = if j > 0 { (rhs[j] - lower * dp[j - 1]) / denom } else { rhs[j] / denom };
        }
        u[m - 1] = dp[m - 1];
        for j in (0..m - 1).rev() {
            u[j] = dp[j] - cp[j] * u[j + 1];
        }
        u[m] = Complex64::new(0.0, 0.0);
    }

    /// The discretely conserved mass `σ Σ V_j |u_j|²`.
    pub fn mass(&self, grid: &Grid, u: &[Complex64]) -> f64 {
        sphere_area(grid.dim()) * self.volumes.iter().zip(u).map(|(v, z)| v * z.norm_sqr()).sum::<f64>()
    }
}
