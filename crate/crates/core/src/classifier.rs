//! Scatter/blowup classification of initial data by simulation, checked
//! against the threshold predicates on the data.

use serde::Serialize;

use crate::diagnostics::{self, RunStatus, TrajectoryRecord};
use crate::error::{NlsError, Result};
use crate::evolution::{evolve, Controls};
use crate::field::Field;
use crate::ground_state::{critical_exponent, reference_constants};

/// Relative margin turning the strict inequalities of the predicates into
/// numerically robust ones. It must exceed the share of ‖∇W‖₂² and E(W)
/// lost beyond the box edge (about 0.4% at r_max = 60 in d = 5).
pub const STRICT_MARGIN: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    GlobalScattering,
    FiniteTimeBlowup,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predicate {
    pub holds: bool,
    /// margin from the coercivity inversion; NaN when the energy is not below E(W)
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predicates {
    pub trapping: Predicate,
    pub blowup: Predicate,
    pub kinetic_below_w: bool,
    pub kinetic: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evidence {
    pub final_gradient: f64,
    pub max_gradient: f64,
    pub scattering: f64,
    /// S gained over the final window divided by the cumulative S
    pub plateau_ratio: f64,
    /// `‖u(t_end)‖_{2*} / max_t ‖u(t)‖_{2*}`
    pub potential_decay: f64,
    /// dt₀ over the last step size
    pub dt_contraction: f64,
    /// from linear extrapolation of `‖∇u‖₂^{-1}` to zero; NaN unless growing
    pub blowup_time: f64,
    pub t_end: f64,
    /// all recorded ∂_tt V < 0
    pub virial_negative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyParams {
    pub plateau_window: f64,
    pub plateau_tol: f64,
    pub decay_tol: f64,
    pub dt_collapse: f64,
    /// slack on the trapped kinetic bound, relative to ‖∇W‖₂²
    pub trap_tol: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams { plateau_window: 0.2, plateau_tol: 0.01, decay_tol: 0.1, dt_collapse: 1e3, trap_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub evidence: Evidence,
    pub predicates: Predicates,
    /// `max_t ‖∇u(t)‖₂² - (1-δ₁)‖∇W‖₂²`, relative to ‖∇W‖₂²; present when trapping held
    pub trapping_violation: Option<f64>,
    pub status: RunStatus,
}

/// `‖∇u₀‖₂ ≤ ‖∇W‖₂` and `E(u₀) < E(W)`, with δ₁ from δ₀ = 1 - E(u₀)/E(W).
pub fn trapping_predicate(u0: &Field, mu: f64) -> Result<Predicate> {
    let c = reference_constants(u0.grid.dim())?;
    let k = diagnostics::kinetic(u0);
    let e = diagnostics::energy(u0, mu);
    let kinetic_ok = k <= c.grad_norm_sq * (1.0 - STRICT_MARGIN);
    let energy_ok = e < c.energy * (1.0 - STRICT_MARGIN);
    if !energy_ok || e < 0.0 {
        return Ok(Predicate { holds: false, delta: f64::NAN });
    }
    let (d1, _) = c.delta_margins(1.0 - e / c.energy)?;
    Ok(Predicate { holds: kinetic_ok, delta: d1 })
}

/// Fraction of `∫ρ` coming from the outer quarter of the grid.
fn outer_fraction(u0: &Field, density: impl Fn(f64, f64) -> f64) -> f64 {
    let g = u0.grid;
    let cut = 0.75 * g.extent();
    let total = u0.integrate_volume(|i, z| density(g.node_radius(i), z.norm_sqr()));
    let outer = u0.integrate_volume(|i, z| {
        let r = g.node_radius(i);
        if r > cut {
            density(r, z.norm_sqr())
        } else {
            0.0
        }
    });
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

/// `E(u₀) < E(W)`, `‖∇u₀‖₂ ≥ ‖∇W‖₂`, and finite variance (cartesian) or
/// radial symmetry with finite mass, both judged by how much of the integral
/// sits in the outer quarter of the box.
pub fn blowup_predicate(u0: &Field, mu: f64) -> Result<Predicate> {
    let c = reference_constants(u0.grid.dim())?;
    let k = diagnostics::kinetic(u0);
    let e = diagnostics::energy(u0, mu);
    let kinetic_ok = k >= c.grad_norm_sq * (1.0 + STRICT_MARGIN);
    let energy_ok = e < c.energy * (1.0 - STRICT_MARGIN);
    let decay_ok = if u0.grid.is_radial() {
        outer_fraction(u0, |_, a| a) < 0.5
    } else {
        outer_fraction(u0, |r, a| r * r * a) < 0.5
    };
    let delta = if energy_ok && e > 0.0 {
        c.delta_margins(1.0 - e / c.energy)?.1
    } else if energy_ok {
        // negative energy: the whole upper branch is admissible
        c.delta_margins(1.0)?.1
    } else {
        f64::NAN
    };
    Ok(Predicate { holds: mu < 0.0 && kinetic_ok && energy_ok && decay_ok, delta })
}

pub fn predicates(u0: &Field, mu: f64) -> Result<Predicates> {
    let c = reference_constants(u0.grid.dim())?;
    let kinetic = diagnostics::kinetic(u0);
    Ok(Predicates {
        trapping: trapping_predicate(u0, mu)?,
        blowup: blowup_predicate(u0, mu)?,
        kinetic_below_w: kinetic < c.grad_norm_sq,
        kinetic,
        energy: diagnostics::energy(u0, mu),
    })
}

fn scattering_at(rec: &TrajectoryRecord, t: f64) -> f64 {
    let rows = &rec.rows;
    let i = rows.partition_point(|r| r.t <= t);
    if i == 0 {
        return rows[0].scattering;
    }
    if i == rows.len() {
        return rows[i - 1].scattering;
    }
    let (a, b) = (&rows[i - 1], &rows[i]);
    a.scattering + (b.scattering - a.scattering) * (t - a.t) / (b.t - a.t)
}

/// Evidence gathered from a finished run.
pub fn evidence(rec: &TrajectoryRecord, params: &ClassifyParams) -> Evidence {
    let last = rec.last().expect("records hold the initial row");
    let t0 = rec.rows[0].t;
    let s = last.scattering;
    let window_start = last.t - params.plateau_window * (last.t - t0);
    let plateau_ratio = if s > 0.0 { (s - scattering_at(rec, window_start)) / s } else { 0.0 };
    let exponent = critical_exponent(rec.dim);
    let norm = |p: f64| p.max(0.0).powf(1.0 / exponent);
    let pmax = rec.rows.iter().map(|r| norm(r.potential)).fold(0.0, f64::max);
    let potential_decay = if pmax > 0.0 { norm(last.potential) / pmax } else { 0.0 };
    let dt_last = if last.dt > 0.0 { last.dt } else { rec.dt0 };
    let n = rec.rows.len();
    let blowup_time = if n >= 2 {
        let (a, b) = (&rec.rows[n - 2], &rec.rows[n - 1]);
        let (la, lb) = (a.kinetic.powf(-0.5), b.kinetic.powf(-0.5));
        if la > lb && b.t > a.t {
            b.t + lb * (b.t - a.t) / (la - lb)
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    };
    Evidence {
        final_gradient: last.kinetic.sqrt(),
        max_gradient: rec.max_kinetic().sqrt(),
        scattering: s,
        plateau_ratio,
        potential_decay,
        dt_contraction: rec.dt0 / dt_last,
        blowup_time,
        t_end: last.t,
        virial_negative: rec.rows.iter().all(|r| r.ddvirial < 0.0),
    }
}

pub fn decide(rec: &TrajectoryRecord, ev: &Evidence, params: &ClassifyParams) -> Outcome {
    match rec.status {
        RunStatus::ThresholdReached if ev.dt_contraction >= params.dt_collapse => Outcome::FiniteTimeBlowup,
        RunStatus::Completed if ev.plateau_ratio < params.plateau_tol && ev.potential_decay < params.decay_tol => {
            Outcome::GlobalScattering
        }
        _ => Outcome::Undecided,
    }
}

/// Runs `u0` forward and adjudicates scattering versus blowup.
pub fn classify(u0: &Field, mu: f64, controls: &Controls) -> Result<Verdict> {
    classify_with(u0, mu, controls, &ClassifyParams::default()).map(|(v, _)| v)
}

/// [`classify`] with explicit thresholds, also returning the trajectory.
pub fn classify_with(
    u0: &Field,
    mu: f64,
    controls: &Controls,
    params: &ClassifyParams,
) -> Result<(Verdict, TrajectoryRecord)> {
    let preds = predicates(u0, mu)?;
    let rec = evolve(u0, mu, controls)?;
    let ev = evidence(&rec, params);
    let outcome = decide(&rec, &ev, params);
    let trapping_violation = if preds.trapping.holds {
        let kw = reference_constants(rec.dim)?.grad_norm_sq;
        let bound = (1.0 - preds.trapping.delta) * kw;
        Some(rec.rows.iter().map(|r| (r.kinetic - bound) / kw).fold(f64::NEG_INFINITY, f64::max))
    } else {
        None
    };
    let verdict = Verdict { outcome, evidence: ev, predicates: preds, trapping_violation, status: rec.status };
    Ok((verdict, rec))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// largest amplitude seen to scatter and smallest seen to blow up
    pub c_scatter: Option<f64>,
    pub c_blowup: Option<f64>,
    pub evaluations: Vec<(f64, Outcome)>,
    /// the bracket narrowed below the requested width
    pub converged: bool,
}

/// Bisects `c ∈ [c_lo, c_hi]` on `u₀ = c f₀` for the scatter/blowup transition.
///
/// Stops early if the endpoints do not bracket, or an Undecided run leaves
/// the side of the midpoint ambiguous.
pub fn sweep(f0: &Field, c_lo: f64, c_hi: f64, width: f64, mu: f64, controls: &Controls) -> Result<SweepResult> {
    if !(c_lo < c_hi && width > 0.0) {
        return Err(NlsError::InvalidParameter(format!("bad sweep bracket [{c_lo}, {c_hi}] / width {width}")));
    }
    let run = |c: f64| -> Result<Outcome> {
        Ok(classify(&f0.map(|z| z * c), mu, controls)?.outcome)
    };
    let mut evaluations = Vec::new();
    let lo_out = run(c_lo)?;
    evaluations.push((c_lo, lo_out));
    let hi_out = run(c_hi)?;
    evaluations.push((c_hi, hi_out));
    let (mut lo, mut hi) = (c_lo, c_hi);
    let bracketed = lo_out == Outcome::GlobalScattering && hi_out == Outcome::FiniteTimeBlowup;
    let mut converged = false;
    if bracketed {
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            let out = run(mid)?;
            evaluations.push((mid, out));
            match out {
                Outcome::GlobalScattering => lo = mid,
                Outcome::FiniteTimeBlowup => hi = mid,
                Outcome::Undecided => break,
            }
        }
        converged = hi - lo <= width;
    }
    let c_scatter = evaluations
        .iter()
        .filter(|e| e.1 == Outcome::GlobalScattering)
        .map(|e| e.0)
        .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.max(c))));
    let c_blowup = evaluations
        .iter()
        .filter(|e| e.1 == Outcome::FiniteTimeBlowup)
        .map(|e| e.0)
        .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.min(c))));
    Ok(SweepResult { c_scatter, c_blowup, evaluations, converged })
}
