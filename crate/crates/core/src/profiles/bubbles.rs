//! Inverse-Strichartz bubble search and greedy bubble decomposition.
//!
//! The decomposition is a single-field heuristic: repeatedly locate the
//! dyadic scale, time and place where `|e^{itΔ} P_M u| M^{-(d-2)/2}` peaks,
//! cut the high-frequency part of the linear evolution out with a smooth
//! window of radius `c/M`, and subtract it.

use num_complex::Complex64;
use serde::Serialize;

use crate::diagnostics::{concentration, kinetic, kinetic_density, spacetime_density};
use crate::error::{NlsError, Result};
use crate::evolution::{apply_symmetry, SymmetryElement};
use crate::field::Field;
use crate::grid::Geometry;
use crate::spectral::{apply_multiplier, lp_annulus, lp_bump, smooth_step, FreeFlow};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bubble {
    /// dyadic frequency M
    pub scale: f64,
    pub t0: f64,
    pub x0: [f64; 3],
    /// peak of `|e^{it₀Δ} P_M φ| M^{-(d-2)/2}`
    pub amplitude: f64,
    /// kinetic energy of `e^{it₀Δ}φ` in the ball of radius `c/M` around x₀
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanParams {
    /// ball radius in units of 1/M
    pub ball_factor: f64,
    /// time samples on each side of the anchor time
    pub max_time_samples: usize,
    /// samples per doubling of |t| in the space-time quadrature
    pub per_octave: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams { ball_factor: 2.0, max_time_samples: 16, per_octave: 4 }
    }
}

fn check_interval(interval: (f64, f64)) -> Result<()> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(NlsError::InvalidParameter(format!("time interval [{a}, {b}] is not ordered")));
    }
    Ok(())
}

/// Sample times in `[a, b]`: the point closest to 0 plus geometric offsets
/// from it, finest near the anchor where dispersion is fastest.
fn quadrature_times(a: f64, b: f64, tau_min: f64, per_octave: usize) -> Vec<f64> {
    let anchor = 0f64.clamp(a, b);
    let mut ts = vec![anchor];
    let growth = 2f64.powf(1.0 / per_octave as f64);
    for (end, sign) in [(b, 1.0), (a, -1.0)] {
        let span = (end - anchor).abs();
        let mut tau = tau_min;
        while tau < span {
            ts.push(anchor + sign * tau);
            tau *= growth;
        }
        if span > 0.0 {
            ts.push(end);
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup();
    ts
}

/// `∫_I ∫ |e^{itΔ}φ|^{2(d+2)/(d-2)} dx dt` by trapezoid on a geometric time grid.
pub fn linear_scattering_size(flow: &FreeFlow, interval: (f64, f64), per_octave: usize) -> Result<f64> {
    check_interval(interval)?;
    let g = flow.grid();
    let tau_min = 0.05 / g.max_frequency().powi(2);
    let ts = quadrature_times(interval.0, interval.1, tau_min, per_octave.max(1));
    let dens: Vec<f64> = ts.iter().map(|&t| spacetime_density(&flow.evolve(t, |_| 1.0))).collect();
    Ok(ts.windows(2).zip(dens.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum())
}

/// Kinetic energy of `f` inside the ball `|x - x₀| ≤ r` (x₀ = 0 on radial grids).
pub fn ball_kinetic(f: &Field, x0: [f64; 3], r: f64) -> Result<f64> {
    let g = f.grid;
    match g.geometry() {
        Geometry::Radial => concentration(f, r),
        Geometry::Cartesian => {
            let e = kinetic_density(f)?;
            let w = g.weight(0);
            Ok((0..g.node_count())
                .filter(|&i| {
                    let x = g.position(i);
                    (0..3).map(|a| (x[a] - x0[a]).powi(2)).sum::<f64>() <= r * r
                })
                .map(|i| e[i] * w)
                .sum())
        }
    }
}

fn dyadic_scales(flow: &FreeFlow, interval: (f64, f64)) -> Vec<f64> {
    let g = flow.grid();
    let len = interval.1 - interval.0;
    let mut lo = g.freq_spacing();
    if len > 0.0 {
        lo = lo.max(len.powf(-0.5));
    }
    let k_lo = lo.log2().ceil() as i32;
    let k_hi = g.max_frequency().log2().floor() as i32;
    (k_lo..=k_hi).map(|k| 2f64.powi(k)).collect()
}

fn scan_times(m: f64, interval: (f64, f64), cap: usize) -> Vec<f64> {
    let (a, b) = interval;
    let anchor = 0f64.clamp(a, b);
    let step = 0.25 / (m * m);
    let cap = cap as i64;
    (-cap..=cap).map(|k| anchor + k as f64 * step).filter(|&t| t >= a && t <= b).collect()
}

/// Locates the dominant concentration of `e^{itΔ}φ` over `interval`.
///
/// Errors with `NoConcentration` when the space-time size over the interval
/// is below `eta`. Ties go to the smallest M, then the earliest time, then
/// the first node in row-major order.
pub fn inverse_strichartz(phi: &Field, interval: (f64, f64), eta: f64) -> Result<Bubble> {
    let flow = FreeFlow::new(phi);
    inverse_strichartz_with(&flow, interval, eta, &ScanParams::default())
}

pub fn inverse_strichartz_with(flow: &FreeFlow, interval: (f64, f64), eta: f64, params: &ScanParams) -> Result<Bubble> {
    check_interval(interval)?;
    if !(eta > 0.0) {
        return Err(NlsError::InvalidParameter(format!("threshold η = {eta} must be positive")));
    }
    let size = linear_scattering_size(flow, interval, params.per_octave)?;
    if !(size >= eta) {
        return Err(NlsError::NoConcentration { size, eta });
    }
    let g = flow.grid();
    let d = g.dim() as f64;
    let mut best: Option<(f64, f64, f64, [f64; 3])> = None;
    for m in dyadic_scales(flow, interval) {
        let weight = m.powf(-(d - 2.0) / 2.0);
        let band = |xi: f64| lp_annulus(xi / m);
        for t in scan_times(m, interval, params.max_time_samples) {
            let (peak, x0) = if g.is_radial() {
                (flow.origin_value(t, band)?.norm() * weight, [0.0; 3])
            } else {
                let v = flow.evolve(t, band);
                let (mut i_best, mut a_best) = (0, -1.0);
                for (i, z) in v.values.iter().enumerate() {
                    if z.norm() > a_best {
                        a_best = z.norm();
                        i_best = i;
                    }
                }
                (a_best * weight, g.position(i_best))
            };
            if best.map_or(true, |b| peak > b.0) {
                best = Some((peak, m, t, x0));
            }
        }
    }
    let (amplitude, scale, t0, x0) = best.ok_or(NlsError::NoConcentration { size, eta })?;
    let at_t0 = flow.evolve(t0, |_| 1.0);
    let score = ball_kinetic(&at_t0, x0, params.ball_factor / scale)?;
    if !(score > 0.0) {
        return Err(NlsError::NoConcentration { size, eta });
    }
    Ok(Bubble { scale, t0, x0, amplitude, score })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecomposeParams {
    /// time interval of the linear evolution; None means `[-L², L²]` for extent L
    pub interval: Option<(f64, f64)>,
    /// extraction window radius in units of 1/M
    pub window: f64,
    /// frequencies below `M / highpass` stay in the remainder
    pub highpass: f64,
    pub scan: ScanParams,
}

impl Default for DecomposeParams {
    fn default() -> Self {
        DecomposeParams { interval: None, window: 16.0, highpass: 16.0, scan: ScanParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub bubble: Bubble,
    /// `g_j`: maps the unit-scale profile back to the bubble's place and scale
    pub symmetry: SymmetryElement,
    pub time_shift: f64,
    /// unit-scale profile `g_j^{-1}` applied to the extracted piece at time t₀
    #[serde(skip)]
    pub field: Field,
    pub kinetic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BelowThreshold,
    MaxProfiles,
    NoConcentration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub profiles: Vec<Profile>,
    #[serde(skip)]
    pub remainder: Field,
    pub kinetic_total: f64,
    pub kinetic_remainder: f64,
    /// `|‖∇u‖² - Σ‖∇φ_j‖² - ‖∇w‖²|`
    pub defect: f64,
    /// defect over ‖∇u‖² (0 for u = 0)
    pub relative_defect: f64,
    /// linear space-time size of the remainder before each extraction and at the end
    pub remainder_sizes: Vec<f64>,
    /// `λ_i/λ_j + λ_j/λ_i + |x_i - x_j|²/(λ_i λ_j) + |t_i - t_j|/(λ_i λ_j)` with λ = 1/M
    pub orthogonality: Vec<(usize, usize, f64)>,
    pub stop: StopReason,
}

fn window(f: &Field, x0: [f64; 3], radius: f64) -> Field {
    let g = f.grid;
    f.mul_real(|i| {
        let x = g.position(i);
        let r = (0..3).map(|a| (x[a] - x0[a]).powi(2)).sum::<f64>().sqrt();
        // 1 inside `radius`, 0 beyond `2 radius`
        smooth_step(2.0 - r / radius)
    })
}

/// Greedy decomposition `u = Σ_j g_j e^{it_jΔ} φ_j + w`.
///
/// Stops when the remainder's linear space-time size drops below `eps_stop`,
/// after `j_max` profiles, or when no concentration is found.
pub fn bubble_decompose(u: &Field, eps_stop: f64, j_max: usize) -> Result<Decomposition> {
    bubble_decompose_with(u, eps_stop, j_max, &DecomposeParams::default())
}

pub fn bubble_decompose_with(u: &Field, eps_stop: f64, j_max: usize, params: &DecomposeParams) -> Result<Decomposition> {
    if !(eps_stop > 0.0) {
        return Err(NlsError::InvalidParameter(format!("ε_stop = {eps_stop} must be positive")));
    }
    if j_max == 0 {
        return Err(NlsError::InvalidParameter("at least one profile must be allowed".into()));
    }
    let g = u.grid;
    let interval = params.interval.unwrap_or((-g.extent().powi(2), g.extent().powi(2)));
    let mut rem = u.clone();
    let mut profiles = Vec::new();
    let mut sizes = Vec::new();
    let stop = loop {
        let flow = FreeFlow::new(&rem);
        let size = if rem.is_zero() { 0.0 } else { linear_scattering_size(&flow, interval, params.scan.per_octave)? };
        sizes.push(size);
        if size < eps_stop {
            break StopReason::BelowThreshold;
        }
        if profiles.len() == j_max {
            break StopReason::MaxProfiles;
        }
        let bubble = match inverse_strichartz_with(&flow, interval, eps_stop, &params.scan) {
            Ok(b) => b,
            Err(NlsError::NoConcentration { .. }) => break StopReason::NoConcentration,
            Err(e) => return Err(e),
        };
        let m = bubble.scale;
        let cut = m / params.highpass;
        let high = flow.evolve(bubble.t0, |xi| 1.0 - lp_bump(xi / cut));
        let piece_t0 = window(&high, bubble.x0, params.window / m);
        let piece = if bubble.t0 == 0.0 {
            piece_t0.clone()
        } else {
            let t0 = bubble.t0;
            apply_multiplier(&piece_t0, |xi| Complex64::from_polar(1.0, t0 * xi * xi)).with_time(u.t)
        };
        let kin = kinetic(&piece);
        if !(kin > 0.0) {
            break StopReason::NoConcentration;
        }
        rem = rem.sub(&piece.with_time(rem.t))?;
        let inv = SymmetryElement::new(0.0, [-m * bubble.x0[0], -m * bubble.x0[1], -m * bubble.x0[2]], m)?;
        let field = apply_symmetry(&piece_t0, &inv, &g)?;
        let symmetry = SymmetryElement::new(0.0, bubble.x0, 1.0 / m)?;
        profiles.push(Profile { bubble, symmetry, time_shift: bubble.t0, field, kinetic: kin });
    };
    let kinetic_total = kinetic(u);
    let kinetic_remainder = kinetic(&rem);
    let sum: f64 = profiles.iter().map(|p| p.kinetic).sum();
    let defect = (kinetic_total - sum - kinetic_remainder).abs();
    let relative_defect = if kinetic_total > 0.0 { defect / kinetic_total } else { 0.0 };
    let mut orthogonality = Vec::new();
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            let (a, b) = (&profiles[i].bubble, &profiles[j].bubble);
            let (li, lj) = (1.0 / a.scale, 1.0 / b.scale);
            let dx2: f64 = (0..3).map(|k| (a.x0[k] - b.x0[k]).powi(2)).sum();
            let v = li / lj + lj / li + dx2 / (li * lj) + (a.t0 - b.t0).abs() / (li * lj);
            orthogonality.push((i, j, v));
        }
    }
    Ok(Decomposition {
        profiles,
        remainder: rem,
        kinetic_total,
        kinetic_remainder,
        defect,
        relative_defect,
        remainder_sizes: sizes,
        orthogonality,
        stop,
    })
}
