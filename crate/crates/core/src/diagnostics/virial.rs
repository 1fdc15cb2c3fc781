//! Virial quantities `V = ∫|x|²|u|²` and the truncated `V_R = ∫ψ|u|²`,
//! `ψ(x) = R² φ(|x|²/R²)`.
//!
//! φ(ρ) = ρ on [0,1], 2 on [3,∞), and with s = (ρ-1)/2 on [1,3]
//! φ = 1 + 2s - 2s³ + s⁴, the quintic Hermite interpolant matching value,
//! slope and curvature at both ends (its s⁵ coefficient vanishes).
//! Then φ'' = -3s(1-s) ≤ 0, so φ is C² and concave.

use num_complex::Complex64;
use serde::Serialize;

use super::functionals::{kinetic, potential};
use crate::error::Result;
use crate::field::Field;
use crate::grid::{sphere_area, Geometry};
use crate::ground_state::critical_exponent;
use crate::{radial, spectral};

pub fn cutoff_phi(rho: f64) -> f64 {
    if rho <= 1.0 {
        rho
    } else if rho >= 3.0 {
        2.0
    } else {
        let s = (rho - 1.0) / 2.0;
        1.0 + 2.0 * s - 2.0 * s.powi(3) + s.powi(4)
    }
}

pub fn cutoff_phi_d1(rho: f64) -> f64 {
    if rho <= 1.0 {
        1.0
    } else if rho >= 3.0 {
        0.0
    } else {
        let s = (rho - 1.0) / 2.0;
        (1.0 - s).powi(2) * (1.0 + 2.0 * s)
    }
}

pub fn cutoff_phi_d2(rho: f64) -> f64 {
    if rho <= 1.0 || rho >= 3.0 {
        0.0
    } else {
        let s = (rho - 1.0) / 2.0;
        -3.0 * s * (1.0 - s)
    }
}

/// `ω = 1 - φ'(ρ) - 2ρ φ''(ρ)` at `ρ = r²/R²`.
pub fn omega_weight(r: f64, big_r: f64) -> f64 {
    let rho = r * r / (big_r * big_r);
    1.0 - cutoff_phi_d1(rho) - 2.0 * rho * cutoff_phi_d2(rho)
}

/// Δψ = 2d φ' + 4ρ φ''.
fn laplacian_psi(d: usize, rho: f64) -> f64 {
    2.0 * d as f64 * cutoff_phi_d1(rho) + 4.0 * rho * cutoff_phi_d2(rho)
}

pub fn virial(f: &Field) -> f64 {
    let g = f.grid;
    f.integrate_volume(|i, z| g.node_radius(i).powi(2) * z.norm_sqr())
}

/// `∂_tt V = 8‖∇u‖² + 8μ ∫|u|^{2*}`.
pub fn virial_second_derivative(f: &Field, mu: f64) -> f64 {
    8.0 * kinetic(f) + 8.0 * mu * potential(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirialTriple {
    pub v: f64,
    pub dv: f64,
    pub ddv: f64,
}

/// `(V_R, ∂_t V_R, ∂_tt V_R)` evaluated from a single field:
///
/// ```text
/// ∂_t V_R  = 4 Im ∫ φ'(ρ) ū x·∇u
/// ∂_tt V_R = 4 Re ∫ ψ_ij u_i ū_j + μ (4/d) ∫ Δψ |u|^{2*} - ∫ Δψ Δ(|u|²)
/// ```
///
/// The last term is `∫ΔΔψ|u|²` after two integrations by parts, which only
/// needs φ ∈ C².
pub fn truncated_virial(f: &Field, big_r: f64, mu: f64) -> Result<VirialTriple> {
    let g = f.grid;
    let d = g.dim();
    let pstar = critical_exponent(d);
    let r2 = big_r * big_r;
    let v = f.integrate_volume(|i, z| r2 * cutoff_phi(g.node_radius(i).powi(2) / r2) * z.norm_sqr());
    let dens: Vec<f64> = f.values.iter().map(|z| z.norm_sqr()).collect();
    match g.geometry() {
        Geometry::Radial => {
            let h = g.spacing();
            let sigma = sphere_area(d);
            let mut dv = 0.0;
            let mut grad_term = 0.0;
            for j in 0..g.n() {
                let rf = (j as f64 + 0.5) * h;
                let rho = rf * rf / r2;
                let wf = sigma * rf.powi(d as i32 - 1) * h;
                let du = (f.values[j + 1] - f.values[j]) / h;
                let ubar = (f.values[j + 1] + f.values[j]).conj() * 0.5;
                dv += wf * cutoff_phi_d1(rho) * (ubar * du * rf).im;
                grad_term += wf * (4.0 * rho * cutoff_phi_d2(rho) + 2.0 * cutoff_phi_d1(rho)) * du.norm_sqr();
            }
            let lap = radial::laplacian(&g, &dens);
            let vol = g.volume_weights();
            let mut pot_term = 0.0;
            let mut bi_term = 0.0;
            for j in 0..g.n() {
                let lpsi = laplacian_psi(d, g.radius(j).powi(2) / r2);
                pot_term += vol[j] * lpsi * dens[j].powf(pstar / 2.0);
                bi_term += vol[j] * lpsi * lap[j];
            }
            Ok(VirialTriple {
                v,
                dv: 4.0 * dv,
                ddv: 4.0 * grad_term + mu * 4.0 / d as f64 * pot_term - bi_term,
            })
        }
        Geometry::Cartesian => {
            let grad = spectral::gradient(f)?;
            let dens_field = Field::new(g, dens.iter().map(|&v| Complex64::new(v, 0.0)).collect())?;
            let lap = spectral::laplacian(&dens_field);
            let w = g.weight(0);
            let mut dv = 0.0;
            let mut dd = 0.0;
            for i in 0..g.node_count() {
                let x = g.position(i);
                let rho = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / r2;
                let mut xdu = Complex64::new(0.0, 0.0);
                let mut grad2 = 0.0;
                for a in 0..d {
                    xdu += grad[a].values[i] * x[a];
                    grad2 += grad[a].values[i].norm_sqr();
                }
                let u = f.values[i];
                dv += cutoff_phi_d1(rho) * (u.conj() * xdu).im;
                let hess = 4.0 * cutoff_phi_d2(rho) * xdu.norm_sqr() / r2 + 2.0 * cutoff_phi_d1(rho) * grad2;
                let lpsi = laplacian_psi(d, rho);
                dd += 4.0 * hess + mu * 4.0 / d as f64 * lpsi * dens[i].powf(pstar / 2.0) - lpsi * lap.values[i].re;
            }
            Ok(VirialTriple { v, dv: 4.0 * w * dv, ddv: w * dd })
        }
    }
}
