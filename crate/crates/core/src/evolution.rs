//! Strang-split time stepping of `i u_t + Δu = μ |u|^{4/(d-2)} u`.
//!
//! Half nonlinear step, full linear step, half nonlinear step. The nonlinear
//! flow keeps |u| fixed pointwise, so it is the exact phase rotation
//! `u ↦ u exp(-i μ τ |u|^{4/(d-2)})`. The linear flow is the exact Fourier
//! multiplier on cartesian grids and Crank–Nicolson on radial grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, RecordRow, RunStatus, TrajectoryRecord, FLAG_DIVERGED, FLAG_THRESHOLD};
use crate::error::{NlsError, Result};
use crate::field::Field;
use crate::grid::{Geometry, Grid};
use crate::ground_state::reference_constants;
use crate::radial::CrankNicolson;
use crate::spectral::fft_nd;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub field: Field,
    pub t: f64,
    pub dt_last: f64,
    pub step_count: u64,
    pub diverged: bool,
}

impl State {
    pub fn new(field: Field) -> Self {
        let t = field.t;
        State { field, t, dt_last: 0.0, step_count: 0, diverged: false }
    }
}

/// Reusable stepping workspace for one grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    mu: f64,
    nonlinear: bool,
    cn: Option<CrankNicolson>,
    freq_sq: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: Grid, mu: f64) -> Self {
        let cn = grid.is_radial().then(|| CrankNicolson::new(&grid));
        let freq_sq = if grid.is_radial() {
            Vec::new()
        } else {
            (0..grid.node_count()).map(|k| grid.mode_abs_frequency(k).powi(2)).collect()
        };
        Stepper { grid, mu, nonlinear: true, cn, freq_sq }
    }

    /// A stepper for the free equation (nonlinear substeps disabled).
    pub fn linear(grid: Grid) -> Self {
        Stepper { nonlinear: false, ..Stepper::new(grid, 0.0) }
    }

    fn rotate(&self, u: &mut [Complex64], tau: f64) {
        if !self.nonlinear || self.mu == 0.0 {
            return;
        }
        let p = 2.0 / (self.grid.dim() as f64 - 2.0); // |u|^{4/(d-2)} = (|u|²)^p
        for z in u.iter_mut() {
            let phase = -self.mu * tau * z.norm_sqr().powf(p);
            *z *= Complex64::from_polar(1.0, phase);
        }
    }

    fn propagate(&self, u: &mut Vec<Complex64>, dt: f64) {
        match &self.cn {
            Some(cn) => cn.step(u, dt),
            None => {
                let g = &self.grid;
                fft_nd(u, g.n(), g.dim(), false);
                let inv_n = 1.0 / g.node_count() as f64;
                for (z, &k2) in u.iter_mut().zip(&self.freq_sq) {
                    *z *= Complex64::from_polar(inv_n, -dt * k2);
                }
                fft_nd(u, g.n(), g.dim(), true);
            }
        }
    }

    /// One Strang step of size `dt` (either sign).
    pub fn step_values(&self, u: &mut Vec<Complex64>, dt: f64) {
        self.rotate(u, 0.5 * dt);
        self.propagate(u, dt);
        self.rotate(u, 0.5 * dt);
    }

    pub fn step(&self, s: &State, dt: f64) -> Result<State> {
        if s.diverged {
            return Err(NlsError::InvalidParameter("cannot step a diverged state".into()));
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err(NlsError::InvalidParameter(format!("time step {dt} must be finite and non-zero")));
        }
        s.field.grid.ensure_same(&self.grid)?;
        let mut values = s.field.values.clone();
        self.step_values(&mut values, dt);
        let t = s.t + dt;
        let field = Field { grid: self.grid, values, t };
        let diverged = !field.is_finite();
        Ok(State { field, t, dt_last: dt, step_count: s.step_count + 1, diverged })
    }
}

/// A single Strang step; `μ = -1` focusing, `+1` defocusing.
pub fn step(s: &State, dt: f64, mu: f64) -> Result<State> {
    Stepper::new(s.field.grid, mu).step(s, dt)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    pub t_max: f64,
    pub dt0: f64,
    /// nonlinear phase per step, radians
    pub c_adapt: f64,
    /// gradient threshold ‖∇u‖₂ ≥ G_max stops the run; None means 10‖∇W‖₂
    pub g_max: Option<f64>,
    pub dt_min: f64,
    /// record diagnostics every `stride` steps
    pub stride: usize,
    pub concentration_radii: Vec<f64>,
    pub virial_radius: f64,
    /// radius of the truncated position
    pub center_radius: f64,
    /// quantile level of the frequency scale; None skips it
    pub frequency_eta: Option<f64>,
    /// keep every k-th recorded field in the record
    pub snapshot_stride: Option<usize>,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            t_max: 1.0,
            dt0: 1e-3,
            c_adapt: 0.1,
            g_max: None,
            dt_min: 1e-12,
            stride: 10,
            concentration_radii: vec![1.0],
            virial_radius: 10.0,
            center_radius: 10.0,
            frequency_eta: Some(0.1),
            snapshot_stride: None,
        }
    }
}

impl Controls {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_max", self.t_max),
            ("dt0", self.dt0),
            ("c_adapt", self.c_adapt),
            ("dt_min", self.dt_min),
            ("virial_radius", self.virial_radius),
            ("center_radius", self.center_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(NlsError::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if self.stride == 0 {
            return Err(NlsError::InvalidParameter("stride must be at least 1".into()));
        }
        if let Some(g) = self.g_max {
            if !(g > 0.0) {
                return Err(NlsError::InvalidParameter(format!("g_max = {g} must be positive")));
            }
        }
        if self.concentration_radii.iter().any(|&r| !(r > 0.0)) {
            return Err(NlsError::InvalidParameter("concentration radii must be positive".into()));
        }
        Ok(())
    }

    pub fn resolved_g_max(&self, d: usize) -> Result<f64> {
        match self.g_max {
            Some(g) => Ok(g),
            None => Ok(10.0 * reference_constants(d)?.grad_norm_sq.sqrt()),
        }
    }
}

/// Diagnostics of one field; `scattering` is the running cumulative S.
pub fn diagnostics_row(f: &Field, mu: f64, controls: &Controls, scattering: f64, dt: f64, flags: u32) -> RecordRow {
    let kinetic = diagnostics::kinetic(f);
    let potential = diagnostics::potential(f);
    let d = f.grid.dim() as f64;
    let vt = diagnostics::truncated_virial(f, controls.virial_radius, mu).unwrap_or(diagnostics::VirialTriple {
        v: f64::NAN,
        dv: f64::NAN,
        ddv: f64::NAN,
    });
    let n_est = match controls.frequency_eta {
        Some(eta) if !f.is_zero() && f.is_finite() => diagnostics::frequency_scale(f, eta).unwrap_or(f64::NAN),
        _ => f64::NAN,
    };
    let center = if f.is_zero() {
        [0.0; 3]
    } else {
        diagnostics::spatial_center(f, controls.center_radius).unwrap_or([f64::NAN; 3])
    };
    let concentration = diagnostics::concentration_many(f, &controls.concentration_radii)
        .unwrap_or_else(|_| vec![f64::NAN; controls.concentration_radii.len()]);
    RecordRow {
        t: f.t,
        mass: diagnostics::mass(f),
        energy: 0.5 * kinetic + mu * (d - 2.0) / (2.0 * d) * potential,
        kinetic,
        potential,
        momentum: diagnostics::momentum(f),
        scattering,
        virial: diagnostics::virial(f),
        virial_r: vt.v,
        dvirial_r: vt.dv,
        ddvirial_r: vt.ddv,
        ddvirial: 8.0 * kinetic + 8.0 * mu * potential,
        n_est,
        center,
        concentration,
        spacetime_density: diagnostics::spacetime_density(f),
        linf: f.max_abs(),
        dt,
        flags,
    }
}

/// Integrates from `u0` until `t_max`, divergence, or `‖∇u‖₂ ≥ G_max`.
///
/// The step is `dt = min(dt₀, c_adapt / ‖u‖_∞^{4/(d-2)})`, clipped to land on
/// `t_max`. A step below `dt_min` or a non-finite field marks the run
/// diverged. Diagnostics are recorded at the start, every `stride` steps,
/// and at the final time.
pub fn evolve(u0: &Field, mu: f64, controls: &Controls) -> Result<TrajectoryRecord> {
    controls.validate()?;
    let grid = u0.grid;
    let d = grid.dim();
    let g_max = controls.resolved_g_max(d)?;
    let stepper = Stepper::new(grid, mu);
    let t0 = u0.t;
    let t_end = t0 + controls.t_max;
    let exponent = 2.0 / (d as f64 - 2.0);

    let mut values = u0.values.clone();
    if grid.is_radial() {
        values[grid.n()] = Complex64::new(0.0, 0.0);
    }
    let mut field = Field { grid, values, t: t0 };
    let mut s_cum = 0.0;
    let mut dens_prev = diagnostics::spacetime_density(&field);
    let mut rows = vec![diagnostics_row(&field, mu, controls, 0.0, 0.0, 0)];
    let mut snapshots = Vec::new();
    let keep = |count: usize| controls.snapshot_stride.map_or(false, |k| k > 0 && count % k == 0);
    if keep(0) {
        snapshots.push(field.clone());
    }
    let mut status = RunStatus::Completed;
    let mut steps: u64 = 0;
    let mut dt = 0.0;

    while field.t < t_end - 1e-14 * t_end.abs().max(1.0) {
        let linf2 = field.values.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let nl_rate = linf2.powf(exponent);
        dt = if nl_rate > 0.0 { controls.dt0.min(controls.c_adapt / nl_rate) } else { controls.dt0 };
        dt = dt.min(t_end - field.t);
        let clipped = dt < controls.dt0 && (t_end - field.t) <= dt * (1.0 + 1e-12);
        if dt < controls.dt_min && !clipped {
            status = RunStatus::Diverged;
            break;
        }
        stepper.step_values(&mut field.values, dt);
        field.t += dt;
        steps += 1;
        if !field.is_finite() {
            status = RunStatus::Diverged;
            break;
        }
        let dens = diagnostics::spacetime_density(&field);
        s_cum += 0.5 * dt * (dens + dens_prev);
        dens_prev = dens;
        let grad = diagnostics::kinetic(&field).sqrt();
        if grad >= g_max {
            status = RunStatus::ThresholdReached;
            break;
        }
        if steps % controls.stride as u64 == 0 {
            rows.push(diagnostics_row(&field, mu, controls, s_cum, dt, 0));
            if keep(rows.len() - 1) {
                snapshots.push(field.clone());
            }
        }
    }
    let flags = match status {
        RunStatus::Completed => 0,
        RunStatus::ThresholdReached => FLAG_THRESHOLD,
        RunStatus::Diverged => FLAG_DIVERGED,
    };
    let already = rows.last().map_or(false, |r| r.t == field.t) && flags == 0;
    if !already {
        if field.is_finite() {
            rows.push(diagnostics_row(&field, mu, controls, s_cum, dt, flags));
            if controls.snapshot_stride.is_some() && snapshots.last().map_or(true, |s: &Field| s.t != field.t) {
                snapshots.push(field.clone());
            }
        } else if let Some(last) = rows.last_mut() {
            last.flags |= flags;
        }
    }
    Ok(TrajectoryRecord {
        dim: d,
        geometry: grid.geometry(),
        mu,
        dt0: controls.dt0,
        concentration_radii: controls.concentration_radii.clone(),
        virial_radius: controls.virial_radius,
        rows,
        snapshots,
        status,
        final_field: field,
        step_count: steps,
    })
}

/// `g_{θ,x₀,λ}`: `[g f](x) = λ^{-(d-2)/2} e^{iθ} f((x - x₀)/λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryElement {
    pub theta: f64,
    pub x0: [f64; 3],
    pub lambda: f64,
}

impl SymmetryElement {
    pub fn identity() -> Self {
        SymmetryElement { theta: 0.0, x0: [0.0; 3], lambda: 1.0 }
    }

    pub fn new(theta: f64, x0: [f64; 3], lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(NlsError::InvalidParameter(format!("scale λ = {lambda} must be positive")));
        }
        Ok(SymmetryElement { theta: theta.rem_euclid(2.0 * PI), x0, lambda })
    }

    pub fn scaling(lambda: f64) -> Result<Self> {
        Self::new(0.0, [0.0; 3], lambda)
    }
}

/// Periodic band-limited interpolation matrix from `src` axis samples to the
/// points `ys` (rows for points outside the source box are zero).
fn trig_interp_matrix(src: &Grid, ys: &[f64]) -> Vec<Vec<f64>> {
    let n = src.n();
    let l = src.extent();
    ys.iter()
        .map(|&y| {
            if y < -l || y >= l {
                return vec![0.0; n];
            }
            (0..n)
                .map(|j| {
                    let s = y - src.axis_coord(j);
                    // (1/n) Σ_m e^{iξ_m s} with the Nyquist term split symmetrically
                    let mut acc = 0.0;
                    for m in 0..n {
                        let xi = src.axis_freq(m);
                        // the Nyquist term is taken as its real (cosine) part
                        acc += (xi * s).cos();
                    }
                    acc / n as f64
                })
                .collect()
        })
        .collect()
}

/// Applies a 1-D real matrix along `axis` of a row-major tensor.
fn apply_along_axis(data: &[Complex64], shape: [usize; 3], axis: usize, mat: &[Vec<f64>]) -> (Vec<Complex64>, [usize; 3]) {
    let n_in = shape[axis];
    let n_out = mat.len();
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * n_out * inner];
    for o in 0..outer {
        for (t, row) in mat.iter().enumerate() {
            let dst = &mut out[(o * n_out + t) * inner..(o * n_out + t + 1) * inner];
            for (j, &w) in row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let src = &data[(o * n_in + j) * inner..(o * n_in + j + 1) * inner];
                for (a, b) in dst.iter_mut().zip(src) {
                    *a += b * w;
                }
            }
        }
    }
    let mut new_shape = shape;
    new_shape[axis] = n_out;
    (out, new_shape)
}

/// Cubic Lagrange interpolation of radial samples at `y`, even about the
/// origin and zero beyond the last node.
fn radial_cubic(grid: &Grid, u: &[Complex64], y: f64) -> Complex64 {
    let h = grid.spacing();
    let n = grid.n();
    if y > grid.extent() {
        return Complex64::new(0.0, 0.0);
    }
    let s = y / h;
    let j = (s.floor() as i64).min(n as i64 - 1);
    let at = |k: i64| -> Complex64 {
        let k = k.unsigned_abs() as usize;
        if k > n {
            Complex64::new(0.0, 0.0)
        } else {
            u[k]
        }
    };
    let x = s - j as f64;
    let w = [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ];
    at(j - 1) * w[0] + at(j) * w[1] + at(j + 1) * w[2] + at(j + 2) * w[3]
}

/// Resamples `g f` onto `target`.
pub fn apply_symmetry(f: &Field, g: &SymmetryElement, target: &Grid) -> Result<Field> {
    let src = f.grid;
    let d = src.dim();
    if target.dim() != d || target.geometry() != src.geometry() {
        return Err(NlsError::GridMismatch(format!("{src:?} vs {target:?}")));
    }
    if !(g.lambda > 0.0) {
        return Err(NlsError::InvalidParameter(format!("scale λ = {} must be positive", g.lambda)));
    }
    let factor = Complex64::from_polar(g.lambda.powf(-(d as f64 - 2.0) / 2.0), g.theta);
    match src.geometry() {
        Geometry::Radial => {
            if g.x0.iter().any(|&v| v != 0.0) {
                return Err(NlsError::UnsupportedTranslation);
            }
            let values = (0..=target.n())
                .map(|j| factor * radial_cubic(&src, &f.values, target.radius(j) / g.lambda))
                .collect();
            Ok(Field { grid: *target, values, t: f.t })
        }
        Geometry::Cartesian => {
            let identity = g.lambda == 1.0 && g.x0 == [0.0; 3] && target.same_as(&src);
            if identity {
                return Ok(f.scale(factor));
            }
            let mut data = f.values.clone();
            let mut shape = [1usize; 3];
            for a in 0..d {
                shape[a] = src.n();
            }
            for a in 0..d {
                let ys: Vec<f64> = (0..target.n()).map(|i| (target.axis_coord(i) - g.x0[a]) / g.lambda).collect();
                let mat = trig_interp_matrix(&src, &ys);
                let (next, s) = apply_along_axis(&data, shape, a, &mat);
                data = next;
                shape = s;
            }
            data.iter_mut().for_each(|z| *z *= factor);
            Ok(Field { grid: *target, values: data, t: f.t })
        }
    }
}

/// Galilei boost at t = 0: multiplication by `e^{i x·ξ₀}`.
pub fn galilei_boost(f: &Field, xi0: &[f64]) -> Result<Field> {
    let g = f.grid;
    if g.geometry() != Geometry::Cartesian {
        return Err(NlsError::UnsupportedGeometry("a Galilei boost breaks radial symmetry".into()));
    }
    if xi0.len() != g.dim() {
        return Err(NlsError::InvalidParameter(format!("boost has {} components for d = {}", xi0.len(), g.dim())));
    }
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let x = g.position(i);
            let phase: f64 = (0..g.dim()).map(|a| x[a] * xi0[a]).sum();
            z * Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(Field { grid: g, values, t: f.t })
}
