use std::fmt::Write as _;

use serde::Serialize;

use crate::field::Field;
use crate::grid::Geometry;

pub const FLAG_DIVERGED: u32 = 1;
pub const FLAG_THRESHOLD: u32 = 2;

/// One recorded time of an evolution run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    /// ‖∇u‖₂²
    pub kinetic: f64,
    /// ∫|u|^{2d/(d-2)}
    pub potential: f64,
    pub momentum: [f64; 3],
    /// cumulative scattering size, accumulated every step
    pub scattering: f64,
    pub virial: f64,
    pub virial_r: f64,
    pub dvirial_r: f64,
    pub ddvirial_r: f64,
    /// untruncated ∂_tt V
    pub ddvirial: f64,
    /// NaN when not computed
    pub n_est: f64,
    pub center: [f64; 3],
    pub concentration: Vec<f64>,
    /// ∫|u|^{2(d+2)/(d-2)}
    pub spacetime_density: f64,
    pub linf: f64,
    pub dt: f64,
    pub flags: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    ThresholdReached,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub dim: usize,
    pub geometry: Geometry,
    pub mu: f64,
    pub dt0: f64,
    pub concentration_radii: Vec<f64>,
    pub virial_radius: f64,
    pub rows: Vec<RecordRow>,
    /// fields kept every `snapshot_stride` records (empty unless requested)
    pub snapshots: Vec<Field>,
    pub status: RunStatus,
    pub final_field: Field,
    pub step_count: u64,
}

impl TrajectoryRecord {
    pub fn last(&self) -> Option<&RecordRow> {
        self.rows.last()
    }

    pub fn max_kinetic(&self) -> f64 {
        self.rows.iter().map(|r| r.kinetic).fold(0.0, f64::max)
    }

    pub fn header(&self) -> String {
        let mut cols: Vec<String> = [
            "t", "mass", "energy", "kinetic", "potential", "P_x", "P_y", "P_z", "S", "V", "V_R", "dV_R", "ddV_R",
            "ddV", "N_est", "x_c", "y_c", "z_c",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        cols.extend(self.concentration_radii.iter().map(|r| format!("conc_R{r}")));
        cols.extend(["spacetime_density", "linf", "dt", "flags"].iter().map(|s| s.to_string()));
        cols.join(",")
    }

    /// CSV with a header row; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.rows {
            let mut vals = vec![
                r.t,
                r.mass,
                r.energy,
                r.kinetic,
                r.potential,
                r.momentum[0],
                r.momentum[1],
                r.momentum[2],
                r.scattering,
                r.virial,
                r.virial_r,
                r.dvirial_r,
                r.ddvirial_r,
                r.ddvirial,
                r.n_est,
                r.center[0],
                r.center[1],
                r.center[2],
            ];
            vals.extend(&r.concentration);
            vals.extend([r.spacetime_density, r.linf, r.dt]);
            let line: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{},{}", line.join(","), r.flags);
        }
        out
    }
}

/// Trapezoid in time of the recorded spatial integrals of `|u|^{2(d+2)/(d-2)}`.
pub fn scattering_size(record: &TrajectoryRecord) -> f64 {
    record
        .rows
        .windows(2)
        .map(|w| 0.5 * (w[1].t - w[0].t) * (w[1].spacetime_density + w[0].spacetime_density))
        .sum()
}
