//! Ratio checks `LHS / RHS` for harmonic-analysis inequalities whose
//! constants are implicit. A check passes when every ratio in its sweep is
//! finite and below a cap; the caps in [`InequalityCaps::default`] are
//! regression values measured on the documented sweeps, not sharp constants.
//!
//! | check     | ratio |
//! |-----------|-------|
//! | bernstein | `‖P_N f‖_q / (N^{d(1/2-1/q)} ‖P_N f‖₂)` |
//! | dispersive| `‖e^{itΔ}f‖_∞ |t|^{d/2} / ‖f‖₁` |
//! | keraani   | `‖∇e^{itΔ}φ‖³_{L²([-T,T]×B_R)} / (T^{2/(d+2)} R^{(3d+2)/(2(d+2))} ‖e^{itΔ}φ‖_{L^{2(d+2)/(d-2)}} ‖∇φ‖₂²)` |
//! | bilinear  | `‖e^{itΔ}φ_N e^{itΔ}φ_M‖_{L²} / (M^{(d-4)/2} N^{-1} ‖∇φ_M‖₂ ‖∇φ_N‖₂)` |
//! | weighted  | `sup r^{d-1} ω^{1/2} |f|² / (‖f‖₂ ‖ω^{1/2}∇f‖₂)` |

use serde::Serialize;

use super::functionals::kinetic;
use super::virial::omega_weight;
use crate::error::Result;
use crate::field::Field;
use crate::grid::{sphere_area, Geometry};
use crate::profiles::linear_scattering_size;
use crate::spectral::{lp_annulus, lp_project, norm, Band, FreeFlow, NormKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCaps {
    pub bernstein: f64,
    pub dispersive: f64,
    pub keraani: f64,
    pub bilinear: f64,
    pub weighted: f64,
}

impl Default for InequalityCaps {
    fn default() -> Self {
        InequalityCaps { bernstein: 1.0, dispersive: 0.05, keraani: 5.0, bilinear: 1.0, weighted: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityParams {
    pub times: Vec<f64>,
    pub keraani_times: Vec<f64>,
    pub keraani_radii: Vec<f64>,
    /// time step of the L²_t quadratures
    pub time_step: f64,
    /// half-length of the window for the bilinear L²_t norm
    pub bilinear_window: f64,
    pub virial_radii: Vec<f64>,
    pub caps: InequalityCaps,
}

impl Default for InequalityParams {
    fn default() -> Self {
        InequalityParams {
            times: vec![0.25, 0.5, 1.0, 2.0],
            keraani_times: vec![1.0, 2.0, 4.0],
            keraani_radii: vec![1.0, 2.0, 4.0],
            time_step: 0.02,
            bilinear_window: 1.0,
            virial_radii: vec![1.0, 2.0, 4.0],
            caps: InequalityCaps::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub name: String,
    /// the sweep point, human readable
    pub point: String,
    pub ratio: f64,
    pub cap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub checks: Vec<RatioCheck>,
    pub pass: bool,
}

impl InequalityReport {
    pub fn max_ratio(&self, name: &str) -> f64 {
        self.checks.iter().filter(|c| c.name == name).map(|c| c.ratio).fold(0.0, f64::max)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn push(out: &mut Vec<RatioCheck>, name: &str, point: String, r: f64, cap: f64) {
    out.push(RatioCheck { name: name.into(), point, ratio: r, cap, pass: r.is_finite() && r <= cap });
}

/// Dyadic N whose band carries a non-negligible share of `‖∇f‖₂²`.
fn active_bands(f: &Field) -> Result<Vec<(f64, Field)>> {
    let total = kinetic(f);
    let mut out = Vec::new();
    for n in super::lp::dyadic_range(f) {
        let piece = lp_project(f, n, Band::At)?;
        if total > 0.0 && kinetic(&piece) > 1e-6 * total {
            out.push((n, piece));
        }
    }
    Ok(out)
}

pub fn bernstein_ratios(f: &Field, cap: f64, out: &mut Vec<RatioCheck>) -> Result<()> {
    let d = f.grid.dim() as f64;
    for (n, piece) in active_bands(f)? {
        let l2 = norm(&piece, NormKind::Lp(2.0))?;
        for q in [4.0, f64::INFINITY] {
            let lq = norm(&piece, if q.is_infinite() { NormKind::LInf } else { NormKind::Lp(q) })?;
            let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
            let r = ratio(lq, n.powf(d * (0.5 - inv_q)) * l2);
            push(out, "bernstein", format!("N={n} q={q}"), r, cap);
        }
    }
    Ok(())
}

pub fn dispersive_ratios(f: &Field, times: &[f64], cap: f64, out: &mut Vec<RatioCheck>) -> Result<()> {
    let d = f.grid.dim() as f64;
    let l1 = norm(f, NormKind::Lp(1.0))?;
    let flow = FreeFlow::new(f);
    for &t in times {
        let sup = flow.evolve(t, |_| 1.0).max_abs();
        push(out, "dispersive", format!("t={t}"), ratio(sup * t.abs().powf(d / 2.0), l1), cap);
    }
    Ok(())
}

fn sample_times(t_max: f64, dt: f64) -> Vec<f64> {
    let k = (t_max / dt).ceil() as i64;
    (-k..=k).map(|i| i as f64 * t_max / k as f64).collect()
}

fn trapezoid(ts: &[f64], vs: &[f64]) -> f64 {
    ts.windows(2).zip(vs.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}

pub fn keraani_ratios(phi: &Field, params: &InequalityParams, out: &mut Vec<RatioCheck>) -> Result<()> {
    let g = phi.grid;
    let d = g.dim() as f64;
    let cap = params.caps.keraani;
    let t_max = params.keraani_times.iter().cloned().fold(0.0, f64::max);
    let flow = FreeFlow::new(phi);
    let ts = sample_times(t_max, params.time_step);
    let radius: Vec<f64> = (0..g.node_count()).map(|i| g.node_radius(i)).collect();
    // ∫_{B_R} |∇e^{itΔ}φ|² at every sample time, per radius
    let mut local = vec![vec![0.0; ts.len()]; params.keraani_radii.len()];
    for (k, &t) in ts.iter().enumerate() {
        let e = flow.kinetic_density_at(t)?;
        for (ri, &r) in params.keraani_radii.iter().enumerate() {
            local[ri][k] = e.iter().zip(&radius).filter(|(_, &x)| x <= r).map(|(v, _)| v * g.weight(0)).sum();
        }
    }
    let size = linear_scattering_size(&flow, (-t_max, t_max), 4)?;
    let exponent = 2.0 * (d + 2.0) / (d - 2.0);
    let st_norm = size.powf(1.0 / exponent);
    let grad2 = kinetic(phi);
    for &t in &params.keraani_times {
        let (sub_t, idx): (Vec<f64>, Vec<usize>) =
            ts.iter().enumerate().filter(|(_, &s)| s.abs() <= t + 1e-12).map(|(i, &s)| (s, i)).unzip();
        for (ri, &r) in params.keraani_radii.iter().enumerate() {
            let vals: Vec<f64> = idx.iter().map(|&i| local[ri][i]).collect();
            let lhs = trapezoid(&sub_t, &vals).powf(1.5);
            let rhs = t.powf(2.0 / (d + 2.0)) * r.powf((3.0 * d + 2.0) / (2.0 * (d + 2.0))) * st_norm * grad2;
            push(out, "keraani", format!("T={t} R={r}"), ratio(lhs, rhs), cap);
        }
    }
    Ok(())
}

/// Bilinear ratios for the band pairs `(M, N)` of `phi`, sharing one band
/// evolution per sample time.
pub fn bilinear_pair_ratios(phi: &Field, pairs: &[(f64, f64)], window: f64, dt: f64) -> Result<Vec<f64>> {
    let d = phi.grid.dim() as f64;
    let flow = FreeFlow::new(phi);
    let mut bands: Vec<f64> = pairs.iter().flat_map(|&(m, n)| [m, n]).collect();
    bands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bands.dedup();
    let index = |b: f64| bands.iter().position(|&x| x == b).unwrap();
    let ts = sample_times(window, dt);
    let mut vals = vec![vec![0.0; ts.len()]; pairs.len()];
    for (k, &t) in ts.iter().enumerate() {
        let evolved: Vec<Field> = bands.iter().map(|&b| flow.evolve(t, |xi| lp_annulus(xi / b))).collect();
        for (p, &(m, n)) in pairs.iter().enumerate() {
            let (a, b) = (&evolved[index(m)], &evolved[index(n)]);
            vals[p][k] = a.integrate_volume(|i, z| (z * b.values[i]).norm_sqr());
        }
    }
    let grads: Vec<f64> = bands.iter().map(|&b| kinetic(&flow.evolve(0.0, |xi| lp_annulus(xi / b))).sqrt()).collect();
    Ok(pairs
        .iter()
        .zip(&vals)
        .map(|(&(m, n), v)| {
            let lhs = trapezoid(&ts, v).sqrt();
            ratio(lhs, m.powf((d - 4.0) / 2.0) / n * grads[index(m)] * grads[index(n)])
        })
        .collect())
}

pub fn bilinear_ratios(phi: &Field, params: &InequalityParams, out: &mut Vec<RatioCheck>) -> Result<()> {
    let bands: Vec<f64> = active_bands(phi)?.into_iter().map(|(n, _)| n).collect();
    let mut pairs = Vec::new();
    for (i, &m) in bands.iter().enumerate() {
        for &n in &bands[i + 1..] {
            if n >= 4.0 * m {
                pairs.push((m, n));
            }
        }
    }
    let ratios = bilinear_pair_ratios(phi, &pairs, params.bilinear_window, params.time_step)?;
    for ((m, n), r) in pairs.into_iter().zip(ratios) {
        push(out, "bilinear", format!("M={m} N={n}"), r, params.caps.bilinear);
    }
    Ok(())
}

/// Radial fields only; ω vanishes on `|x| ≤ R`.
pub fn weighted_sobolev_ratio(f: &Field, big_r: f64) -> f64 {
    let g = f.grid;
    let d = g.dim();
    let h = g.spacing();
    let sigma = sphere_area(d);
    let lhs = (0..=g.n())
        .map(|j| {
            let r = g.radius(j);
            r.powi(d as i32 - 1) * omega_weight(r, big_r).max(0.0).sqrt() * f.values[j].norm_sqr()
        })
        .fold(0.0, f64::max);
    let l2 = super::functionals::mass(f).sqrt();
    let grad: f64 = (0..g.n())
        .map(|j| {
            let rf = (j as f64 + 0.5) * h;
            sigma * rf.powi(d as i32 - 1) * omega_weight(rf, big_r) * (f.values[j + 1] - f.values[j]).norm_sqr() / h
        })
        .sum();
    ratio(lhs, l2 * grad.sqrt())
}

/// Every applicable check for `phi`: Bernstein and dispersive always,
/// Keraani and bilinear on cartesian grids, weighted Sobolev on radial ones.
pub fn inequality_checks(phi: &Field, params: &InequalityParams) -> Result<InequalityReport> {
    let mut checks = Vec::new();
    let caps = &params.caps;
    bernstein_ratios(phi, caps.bernstein, &mut checks)?;
    dispersive_ratios(phi, &params.times, caps.dispersive, &mut checks)?;
    match phi.grid.geometry() {
        Geometry::Cartesian => {
            keraani_ratios(phi, params, &mut checks)?;
            bilinear_ratios(phi, params, &mut checks)?;
        }
        Geometry::Radial => {
            for &r in &params.virial_radii {
                push(&mut checks, "weighted", format!("R={r}"), weighted_sobolev_ratio(phi, r), caps.weighted);
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(InequalityReport { checks, pass })
}
