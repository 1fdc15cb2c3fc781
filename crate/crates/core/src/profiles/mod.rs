//! Concentration-compactness tools on single fields.

mod bubbles;
mod gronwall;

pub use bubbles::{
    ball_kinetic, bubble_decompose, bubble_decompose_with, inverse_strichartz, inverse_strichartz_with,
    linear_scattering_size, Bubble, DecomposeParams, Decomposition, Profile, ScanParams, StopReason,
};
pub use gronwall::{gronwall_bound, gronwall_brute, gronwall_rate, GronwallBound};
