//! The ground state `W(x) = (1 + |x|²/(d(d-2)))^{-(d-2)/2}` and its constants.
//!
//! `‖∇W‖₂² = ‖W‖_{2*}^{2*} = C_d^{-d}` and `E(W) = C_d^{-d}/d`, with
//! `2* = 2d/(d-2)`. The constants are never hard-coded: they are obtained by
//! grid quadrature plus an analytic correction for the algebraic far field.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{NlsError, Result};
use crate::field::Field;
use crate::grid::{sphere_area, Geometry, Grid, MAX_DIM};
use crate::radial;

/// Relative accuracy demanded of the far-field correction.
pub const TAIL_TOLERANCE: f64 = 1e-8;

fn scale_a(d: usize) -> f64 {
    (d * (d - 2)) as f64
}

/// Critical potential exponent 2d/(d-2).
pub fn critical_exponent(d: usize) -> f64 {
    2.0 * d as f64 / (d as f64 - 2.0)
}

pub fn w_profile(d: usize, r: f64) -> f64 {
    (1.0 + r * r / scale_a(d)).powf(-(d as f64 - 2.0) / 2.0)
}

/// dW/dr.
pub fn w_derivative(d: usize, r: f64) -> f64 {
    let a = scale_a(d);
    -(d as f64 - 2.0) * r / a * (1.0 + r * r / a).powf(-(d as f64) / 2.0)
}

/// Generalized binomial coefficient C(-d, k).
fn binom_neg(d: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * -((d + i) as f64) / (i + 1) as f64)
}

/// `σ ∫_R^∞ |W'|² r^{d-1} dr` and `σ ∫_R^∞ W^{2*} r^{d-1} dr` by expanding
/// `(1 + r²/a)^{-d}` in powers of `a/r²`. Returns the two tails and the
/// relative size of the first neglected term.
pub fn far_field_tails(d: usize, r: f64) -> (f64, f64, f64) {
    let a = scale_a(d);
    let x = a / (r * r);
    let sigma = sphere_area(d);
    let m2 = ((d - 2) * (d - 2)) as f64;
    let mut grad = 0.0;
    let mut pot = 0.0;
    let mut last = f64::INFINITY;
    if x >= 1.0 {
        return (f64::NAN, f64::NAN, f64::INFINITY);
    }
    let ad = a.powi(d as i32);
    for k in 0..400 {
        let c = binom_neg(d, k) * x.powi(k as i32) * ad;
        let g = m2 / (a * a) * c * r.powf(2.0 - d as f64) / (d as f64 - 2.0 + 2.0 * k as f64);
        let p = c * r.powf(-(d as f64)) / (d as f64 + 2.0 * k as f64);
        grad += g;
        pot += p;
        last = (g / grad).abs().max((p / pot).abs());
        if last < 1e-17 {
            break;
        }
    }
    (sigma * grad, sigma * pot, last)
}

/// Scalar constants of the ground state in dimension d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundConstants {
    pub d: usize,
    /// ‖∇W‖₂² = C_d^{-d}
    pub grad_norm_sq: f64,
    /// ‖W‖_{2*}^{2*}
    pub pot_norm: f64,
    /// E(W)
    pub energy: f64,
    /// C_d
    pub sharp_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// y ≤ C_d^{-d}
    Below,
    /// y ≥ C_d^{-d}
    Above,
}

impl GroundConstants {
    /// `f(y) = y/2 - (d-2)/(2d) C_d^{2d/(d-2)} y^{d/(d-2)}`.
    pub fn coercivity_f(&self, y: f64) -> f64 {
        let d = self.d as f64;
        let c_pow = self.sharp_constant.powf(2.0 * d / (d - 2.0));
        0.5 * y - (d - 2.0) / (2.0 * d) * c_pow * y.powf(d / (d - 2.0))
    }

    /// Maximum of f, attained at `y = ‖∇W‖₂²`.
    pub fn f_max(&self) -> f64 {
        self.coercivity_f(self.grad_norm_sq)
    }

    /// Preimage of `e` under f on the chosen monotone branch, by bisection.
    pub fn invert_f(&self, e: f64, branch: Branch) -> Result<f64> {
        let fmax = self.f_max();
        if !(e >= 0.0 && e <= fmax) {
            return Err(NlsError::OutOfRange { value: e, lo: 0.0, hi: fmax });
        }
        let k = self.grad_norm_sq;
        let d = self.d as f64;
        // f vanishes again at y₀ = K (d/(d-2))^{(d-2)/2}
        let y0 = k * (d / (d - 2.0)).powf((d - 2.0) / 2.0);
        let (mut lo, mut hi) = match branch {
            Branch::Below => (0.0, k),
            Branch::Above => (k, y0 * (1.0 + 1e-12)),
        };
        let increasing = branch == Branch::Below;
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let below_target = self.coercivity_f(mid) < e;
            if below_target == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Margins with `f⁻¹((1-δ₀)E(W)) = (1-δ₁)‖∇W‖₂²` (below) and
    /// `(1+δ₂)‖∇W‖₂²` (above).
    pub fn delta_margins(&self, delta0: f64) -> Result<(f64, f64)> {
        if !(delta0 > 0.0 && delta0 <= 1.0) {
            return Err(NlsError::OutOfRange { value: delta0, lo: 0.0, hi: 1.0 });
        }
        if delta0 == 1.0 {
            // zero energy: the lower branch collapses to y = 0, the upper one to y₀
            let d = self.d as f64;
            return Ok((1.0, (d / (d - 2.0)).powf((d - 2.0) / 2.0) - 1.0));
        }
        let e = ((1.0 - delta0) * self.f_max()).clamp(0.0, self.f_max());
        let y1 = self.invert_f(e, Branch::Below)?;
        let y2 = self.invert_f(e, Branch::Above)?;
        Ok((1.0 - y1 / self.grad_norm_sq, y2 / self.grad_norm_sq - 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateData {
    pub d: usize,
    pub w: Field,
    pub grad_norm_sq: f64,
    pub energy: f64,
    pub sharp_constant: f64,
    pub pot_norm: f64,
    /// Portions of ‖∇W‖₂² and ‖W‖_{2*}^{2*} outside the grid (added analytically).
    pub grad_tail: f64,
    pub pot_tail: f64,
}

impl GroundStateData {
    pub fn constants(&self) -> GroundConstants {
        GroundConstants {
            d: self.d,
            grad_norm_sq: self.grad_norm_sq,
            pot_norm: self.pot_norm,
            energy: self.energy,
            sharp_constant: self.sharp_constant,
        }
    }
}

/// Samples W on `grid` and computes its constants.
///
/// Radial grids integrate the closed-form `|W'|²` and `W^{2*}` with the grid
/// quadrature and add the far field beyond `r_max` from its convergent
/// expansion; `TailTooLarge` is raised when that expansion cannot reach
/// [`TAIL_TOLERANCE`]. Cartesian boxes have no such correction, so they are
/// accepted only when the gradient mass outside the inscribed ball is already
/// below the tolerance.
pub fn ground_state(d: usize, grid: &Grid) -> Result<GroundStateData> {
    if grid.dim() != d {
        return Err(NlsError::GridMismatch(format!("grid dimension {} for d = {d}", grid.dim())));
    }
    let pstar = critical_exponent(d);
    let w = Field::from_radial_fn(*grid, |r| w_profile(d, r));
    let (grad_grid, pot_grid, grad_tail, pot_tail) = match grid.geometry() {
        Geometry::Radial => {
            let weights = grid.weights();
            let mut g = 0.0;
            let mut p = 0.0;
            for (j, wj) in weights.iter().enumerate() {
                let r = grid.radius(j);
                g += wj * w_derivative(d, r).powi(2);
                p += wj * w_profile(d, r).powf(pstar);
            }
            let (gt, pt, rel) = far_field_tails(d, grid.extent());
            if !(rel < TAIL_TOLERANCE) {
                return Err(NlsError::TailTooLarge { tail: rel, limit: TAIL_TOLERANCE });
            }
            (g, p, gt, pt)
        }
        Geometry::Cartesian => {
            let (gt, _, _) = far_field_tails(d, grid.extent());
            let rel = gt / (gt + 1.0);
            if !(gt.is_finite() && rel < TAIL_TOLERANCE) {
                return Err(NlsError::TailTooLarge { tail: if gt.is_finite() { rel } else { 1.0 }, limit: TAIL_TOLERANCE });
            }
            let grad = crate::spectral::norm(&w, crate::spectral::NormKind::Hdot(1.0))?.powi(2);
            let pot = w.integrate(|_, z| z.norm().powf(pstar));
            (grad, pot, 0.0, 0.0)
        }
    };
    let grad_norm_sq = grad_grid + grad_tail;
    let pot_norm = pot_grid + pot_tail;
    let energy = 0.5 * grad_norm_sq - (d as f64 - 2.0) / (2.0 * d as f64) * pot_norm;
    Ok(GroundStateData {
        d,
        w,
        grad_norm_sq,
        energy,
        sharp_constant: grad_norm_sq.powf(-1.0 / d as f64),
        pot_norm,
        grad_tail,
        pot_tail,
    })
}

/// Grid on which [`reference_constants`] are evaluated.
pub fn reference_grid(d: usize) -> Grid {
    Grid::radial(d, 1 << 16, 400.0).expect("reference grid")
}

/// Constants for dimension d from a fine reference quadrature (cached).
pub fn reference_constants(d: usize) -> Result<GroundConstants> {
    static CACHE: OnceLock<Vec<Option<GroundConstants>>> = OnceLock::new();
    if !(3..=MAX_DIM).contains(&d) {
        return Err(NlsError::InvalidParameter(format!("dimension {d} outside 3..={MAX_DIM}")));
    }
    let table = CACHE.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|d| if d < 3 { None } else { ground_state(d, &reference_grid(d)).ok().map(|g| g.constants()) })
            .collect()
    });
    table[d].ok_or_else(|| NlsError::InvalidParameter(format!("no reference constants for d = {d}")))
}

pub fn coercivity_f(y: f64, d: usize) -> Result<f64> {
    Ok(reference_constants(d)?.coercivity_f(y))
}

pub fn invert_f(e: f64, branch: Branch, d: usize) -> Result<f64> {
    reference_constants(d)?.invert_f(e, branch)
}

pub fn delta_margins(delta0: f64, d: usize) -> Result<(f64, f64)> {
    reference_constants(d)?.delta_margins(delta0)
}

/// `‖ΔW + W^{(d+2)/(d-2)}‖₂ / ‖W^{(d+2)/(d-2)}‖₂` with the finite-volume Laplacian,
/// evaluated on the nodes strictly inside the grid.
pub fn elliptic_residual(g: &GroundStateData) -> f64 {
    let grid = g.w.grid;
    let d = g.d as f64;
    let p = (d + 2.0) / (d - 2.0);
    let nl: Vec<Complex64> = g.w.values.iter().map(|z| Complex64::new(z.re.powf(p), 0.0)).collect();
    let lap = match grid.geometry() {
        Geometry::Radial => radial::laplacian(&grid, &g.w.values),
        Geometry::Cartesian => crate::spectral::laplacian(&g.w).values,
    };
    let interior = |i: usize| !(grid.is_radial() && i == grid.n());
    let weights = grid.weights();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..grid.node_count() {
        if interior(i) {
            num += weights[i] * (lap[i] + nl[i]).norm_sqr();
            den += weights[i] * nl[i].norm_sqr();
        }
    }
    (num / den).sqrt()
}
