//! Numerical laboratory for the focusing energy-critical nonlinear
//! Schrödinger equation `i u_t + Δu = μ |u|^{4/(d-2)} u`.

pub mod bessel;
pub mod classifier;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod io;
pub mod ground_state;
pub mod profiles;
pub mod radial;
pub mod spectral;

pub use error::{NlsError, Result};
pub use field::{Basis, Field, SpectralField};
pub use grid::{Geometry, Grid};
