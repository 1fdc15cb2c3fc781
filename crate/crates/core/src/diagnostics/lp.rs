use serde::Serialize;

use super::record::TrajectoryRecord;
use crate::error::{NlsError, Result};
use crate::field::Field;
use crate::spectral::{lp_project, norm, Band, NormKind};

/// Dyadic N = 2^k covering the frequencies the grid can represent.
pub fn dyadic_range(f: &Field) -> Vec<f64> {
    let g = f.grid;
    let lo = (g.freq_spacing() / 2.0).log2().floor() as i32;
    let hi = (g.max_frequency() * 3f64.sqrt()).log2().ceil() as i32;
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpTable {
    pub frequencies: Vec<f64>,
    pub exponents: Vec<f64>,
    /// `values[i][j] = ‖P_{N_i} f‖_{p_j}`
    pub values: Vec<Vec<f64>>,
}

/// `‖P_N f‖_p` for dyadic N (all of [`dyadic_range`] when `frequencies` is None).
pub fn dyadic_lp_table(f: &Field, exponents: &[f64], frequencies: Option<&[f64]>) -> Result<LpTable> {
    let ns: Vec<f64> = match frequencies {
        Some(ns) => ns.to_vec(),
        None => dyadic_range(f),
    };
    let values = ns
        .iter()
        .map(|&n| {
            let piece = lp_project(f, n, Band::At)?;
            exponents
                .iter()
                .map(|&p| norm(&piece, if p.is_infinite() { NormKind::LInf } else { NormKind::Lp(p) }))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LpTable { frequencies: ns, exponents: exponents.to_vec(), values })
}

/// Schrödinger admissibility `2/q + d/r = d/2`, `q, r ≥ 2`.
pub fn admissible(q: f64, r: f64, d: usize) -> bool {
    if !(q >= 2.0 && r >= 2.0) {
        return false;
    }
    let lhs = if q.is_infinite() { 0.0 } else { 2.0 / q } + d as f64 / r;
    (lhs - d as f64 / 2.0).abs() < 1e-12
}

/// `‖u‖_{L_t^q L_x^r}` over time-stamped frames, trapezoid in time.
pub fn strichartz_norm_frames(frames: &[Field], q: f64, r: f64) -> Result<f64> {
    let d = frames.first().map(|f| f.grid.dim()).unwrap_or(3);
    if !admissible(q, r, d) {
        return Err(NlsError::NotAdmissible { q, r, d });
    }
    if frames.is_empty() {
        return Ok(0.0);
    }
    let space: Vec<f64> = frames.iter().map(|f| norm(f, NormKind::Lp(r))).collect::<Result<_>>()?;
    if q.is_infinite() {
        return Ok(space.iter().cloned().fold(0.0, f64::max));
    }
    let mut acc = 0.0;
    for i in 1..frames.len() {
        let dt = frames[i].t - frames[i - 1].t;
        acc += 0.5 * dt * (space[i].powf(q) + space[i - 1].powf(q));
    }
    Ok(acc.powf(1.0 / q))
}

/// Mixed norm over the snapshots kept in a trajectory record.
pub fn strichartz_norm(record: &TrajectoryRecord, q: f64, r: f64) -> Result<f64> {
    if !admissible(q, r, record.dim) {
        return Err(NlsError::NotAdmissible { q, r, d: record.dim });
    }
    strichartz_norm_frames(&record.snapshots, q, r)
}
