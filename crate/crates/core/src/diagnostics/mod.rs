//! Scalar functionals of a field and of a trajectory.

mod functionals;
mod lp;
mod record;
mod trace;
mod virial;

pub mod inequalities;

pub use functionals::*;
pub use lp::{admissible, dyadic_lp_table, dyadic_range, strichartz_norm, strichartz_norm_frames, LpTable};
pub use record::{scattering_size, RecordRow, RunStatus, TrajectoryRecord, FLAG_DIVERGED, FLAG_THRESHOLD};
pub use trace::{oscillation, spreading, NTrace};
pub use virial::{
    cutoff_phi, cutoff_phi_d1, cutoff_phi_d2, omega_weight, truncated_virial, virial, virial_second_derivative,
    VirialTriple,
};
