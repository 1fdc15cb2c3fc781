//! Initial data from a [`RunConfig`](super::RunConfig).

use std::path::Path;

use num_complex::Complex64;

use super::config::{GridSpec, InitialData, InitialSpec};
use super::{read_checkpoint, IoError};
use crate::error::NlsError;
use crate::ground_state::w_profile;
use crate::spectral::smooth_step;
use crate::{Field, Geometry, Grid};

/// Radial data are tapered to zero over the outer quarter `[3/4 r_max, r_max]`
/// so that the Dirichlet node does not cut a slowly decaying tail abruptly.
pub fn edge_window(r: f64, r_max: f64) -> f64 {
    let s = (r / r_max - 0.75) / 0.25;
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        smooth_step(1.0 - s)
    }
}

pub fn build_grid(spec: &GridSpec) -> Result<Grid, NlsError> {
    Grid::new(spec.geometry, spec.dim, spec.n, spec.extent)
}

fn dist2(x: [f64; 3], c: [f64; 3]) -> f64 {
    (0..3).map(|k| (x[k] - c[k]).powi(2)).sum()
}

fn require_centered(grid: &Grid, c: &[f64; 3]) -> Result<(), NlsError> {
    if grid.is_radial() && c.iter().any(|&x| x != 0.0) {
        return Err(NlsError::UnsupportedTranslation);
    }
    Ok(())
}

/// `Σ_j a_j λ_j^{-(d-2)/2} W((x - x_j)/λ_j)`.
pub fn sum_of_bubbles(grid: Grid, scales: &[f64], amplitudes: &[f64], centers: &[[f64; 3]]) -> Result<Field, NlsError> {
    let d = grid.dim();
    for c in centers {
        require_centered(&grid, c)?;
    }
    let expo = (d as f64 - 2.0) / 2.0;
    Ok(Field::from_fn(grid, |x| {
        let v: f64 = scales
            .iter()
            .zip(amplitudes)
            .zip(centers)
            .map(|((&l, &a), &c)| a * l.powf(-expo) * w_profile(d, dist2(x, c).sqrt() / l))
            .sum();
        Complex64::new(v, 0.0)
    }))
}

/// Builds `u_0`. `grid` may be omitted only for checkpoints; when both are
/// present the checkpoint grid must agree with it.
pub fn build_initial(grid: Option<&GridSpec>, spec: &InitialSpec, base: &Path) -> Result<Field, IoError> {
    let grid = grid.map(build_grid).transpose()?;
    let need = || grid.ok_or_else(|| NlsError::InvalidGrid("initial data needs a grid".into()));
    let mut field = match &spec.data {
        InitialData::Gaussian { amplitude, width, center } => {
            let g = need()?;
            require_centered(&g, center)?;
            Field::from_fn(g, |x| Complex64::new(amplitude * (-dist2(x, *center) / (width * width)).exp(), 0.0))
        }
        InitialData::GaussianBoosted { amplitude, width, center, xi } => {
            let g = need()?;
            if g.geometry() != Geometry::Cartesian {
                return Err(NlsError::UnsupportedGeometry("a boost breaks radial symmetry".into()).into());
            }
            Field::from_fn(g, |x| {
                let phase: f64 = (0..3).map(|k| x[k] * xi[k]).sum();
                Complex64::from_polar(amplitude * (-dist2(x, *center) / (width * width)).exp(), phase)
            })
        }
        InitialData::GroundState => sum_of_bubbles(need()?, &[1.0], &[1.0], &[[0.0; 3]])?,
        InitialData::ScaledGroundState { c } => sum_of_bubbles(need()?, &[1.0], &[*c], &[[0.0; 3]])?,
        InitialData::SumOfBubbles { scales, amplitudes, centers } => sum_of_bubbles(need()?, scales, amplitudes, centers)?,
        InitialData::Checkpoint { path } => {
            let ck = read_checkpoint(&base.join(path))?;
            if let Some(g) = grid {
                g.ensure_same(&ck.field.grid)?;
            }
            return Ok(ck.field);
        }
    };
    if spec.edge_window && field.grid.is_radial() {
        let g = field.grid;
        let r_max = g.extent();
        field = field.mul_real(|j| edge_window(g.radius(j), r_max));
    }
    Ok(field)
}
