use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::field::Field;
use crate::grid::Geometry;
use crate::ground_state::critical_exponent;
use crate::radial;
use crate::spectral::{self, fft_nd, radial_transform_at, smooth_step};

/// Exponent 2(d+2)/(d-2) of the scattering size.
pub fn spacetime_exponent(d: usize) -> f64 {
    2.0 * (d as f64 + 2.0) / (d as f64 - 2.0)
}

/// Raw DFT of a cartesian field with the Parseval factor `Δx^d / N` that
/// turns `Σ_k |F_k|² w` into `∫|f|²`.
fn raw_spectrum(f: &Field) -> (Vec<Complex64>, f64) {
    let g = f.grid;
    let mut v = f.values.clone();
    fft_nd(&mut v, g.n(), g.dim(), false);
    (v, g.weight(0) / g.node_count() as f64)
}

pub fn mass(f: &Field) -> f64 {
    f.integrate_volume(|_, z| z.norm_sqr())
}

/// ‖∇f‖₂²: spectral on cartesian grids, the staggered difference form on radial grids.
pub fn kinetic(f: &Field) -> f64 {
    match f.grid.geometry() {
        Geometry::Cartesian => {
            let (spec, w) = raw_spectrum(f);
            w * spec
                .iter()
                .enumerate()
                .map(|(k, z)| f.grid.mode_abs_frequency(k).powi(2) * z.norm_sqr())
                .sum::<f64>()
        }
        Geometry::Radial => radial::kinetic(&f.grid, &f.values),
    }
}

/// ∫|f|^{2d/(d-2)}.
pub fn potential(f: &Field) -> f64 {
    let p = critical_exponent(f.grid.dim());
    f.integrate_volume(|_, z| z.norm().powf(p))
}

/// ∫|f|^{2(d+2)/(d-2)}, the spatial integrand of the scattering size.
pub fn spacetime_density(f: &Field) -> f64 {
    let p = spacetime_exponent(f.grid.dim());
    f.integrate_volume(|_, z| z.norm().powf(p))
}

/// `E = ½‖∇u‖² + μ (d-2)/(2d) ∫|u|^{2*}`; μ = -1 is focusing.
pub fn energy(f: &Field, mu: f64) -> f64 {
    let d = f.grid.dim() as f64;
    0.5 * kinetic(f) + mu * (d - 2.0) / (2.0 * d) * potential(f)
}

/// `P = 2 Im ∫ ū ∇u`; radial fields carry no momentum.
pub fn momentum(f: &Field) -> [f64; 3] {
    let mut p = [0.0; 3];
    if f.grid.geometry() == Geometry::Radial {
        return p;
    }
    let g = f.grid;
    let (spec, w) = raw_spectrum(f);
    for (k, z) in spec.iter().enumerate() {
        let idx = g.unravel(k);
        let m2 = z.norm_sqr();
        for a in 0..g.dim() {
            if idx[a] != g.n() / 2 {
                p[a] += 2.0 * w * g.axis_freq(idx[a]) * m2;
            }
        }
    }
    p
}

/// Frequency scale: geometric mean of the η- and (1-η)-quantiles in |ξ| of
/// the measure `|ξ|² |û(ξ)|² dξ`.
pub fn frequency_scale(f: &Field, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(NlsError::OutOfRange { value: eta, lo: 0.0, hi: 0.5 });
    }
    if f.is_zero() {
        return Err(NlsError::ZeroField);
    }
    // (|ξ|, mass) pairs sorted by |ξ|
    let mut pts: Vec<(f64, f64)> = match f.grid.geometry() {
        Geometry::Cartesian => {
            let (spec, _) = raw_spectrum(f);
            spec.iter()
                .enumerate()
                .map(|(k, z)| {
                    let xi = f.grid.mode_abs_frequency(k);
                    (xi, xi * xi * z.norm_sqr())
                })
                .filter(|p| p.1 > 0.0)
                .collect()
        }
        Geometry::Radial => {
            let (rho, dens) = radial_gradient_spectrum(f, 512);
            // trapezoid in ln ρ: weight ρ·Δ(ln ρ) folded into cell masses
            let dl = (rho[1] / rho[0]).ln();
            rho.iter()
                .zip(&dens)
                .enumerate()
                .map(|(i, (&r, &m))| {
                    let end = if i == 0 || i + 1 == rho.len() { 0.5 } else { 1.0 };
                    (r, end * m * r * dl)
                })
                .collect()
        }
    };
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = pts.iter().map(|p| p.1).sum();
    if !(total > 0.0) {
        return Err(NlsError::ZeroField);
    }
    let quantile = |q: f64| -> f64 {
        let target = q * total;
        let mut acc = 0.0;
        let mut prev_xi = pts[0].0;
        let mut prev_acc = 0.0;
        for &(xi, m) in &pts {
            acc += m;
            if acc >= target {
                if acc == prev_acc || xi == prev_xi {
                    return xi;
                }
                // geometric interpolation between neighbouring |ξ| levels
                let s = (target - prev_acc) / (acc - prev_acc);
                return if prev_xi > 0.0 { prev_xi * (xi / prev_xi).powf(s) } else { xi };
            }
            prev_xi = xi;
            prev_acc = acc;
        }
        pts.last().unwrap().0
    };
    let lo = quantile(eta);
    let hi = quantile(1.0 - eta);
    Ok((lo * hi).sqrt())
}

/// Samples `σ ρ^{d+1} |û(ρ)|²` on `m` log-spaced frequencies spanning the grid's band.
pub fn radial_gradient_spectrum(f: &Field, m: usize) -> (Vec<f64>, Vec<f64>) {
    let g = f.grid;
    let lo = g.freq_spacing() / 4.0;
    let hi = g.max_frequency();
    let ratio = (hi / lo).ln() / (m - 1) as f64;
    let rho: Vec<f64> = (0..m).map(|i| lo * (ratio * i as f64).exp()).collect();
    let hat = radial_transform_at(f, &rho);
    let sigma = crate::grid::sphere_area(g.dim());
    let dens = rho
        .iter()
        .zip(&hat)
        .map(|(&r, z)| sigma * r.powi(g.dim() as i32 + 1) * z.norm_sqr())
        .collect();
    (rho, dens)
}

/// Cutoff used by the truncated position: 1 on r ≤ 1, 0 on r ≥ 2.
pub fn position_cutoff(r: f64) -> f64 {
    smooth_step(2.0 - r)
}

/// `X_R / ∫ φ(|x|/R)|u|²` with `X_R = ∫ x φ(|x|/R) |u|²`; zero on radial grids.
pub fn spatial_center(f: &Field, r: f64) -> Result<[f64; 3]> {
    let mut c = [0.0; 3];
    if f.grid.geometry() == Geometry::Radial {
        return Ok(c);
    }
    if f.is_zero() {
        return Err(NlsError::ZeroField);
    }
    let g = f.grid;
    let mut m = 0.0;
    for (i, z) in f.values.iter().enumerate() {
        let x = g.position(i);
        let w = position_cutoff(g.node_radius(i) / r) * z.norm_sqr();
        m += w;
        for a in 0..3 {
            c[a] += x[a] * w;
        }
    }
    if m == 0.0 {
        return Err(NlsError::ZeroField);
    }
    Ok(c.map(|v| v / m))
}

/// Kinetic energy density `|∇u|²` on cartesian nodes.
pub fn kinetic_density(f: &Field) -> Result<Vec<f64>> {
    let grad = spectral::gradient(f)?;
    let mut e = vec![0.0; f.len()];
    for comp in &grad {
        for (acc, z) in e.iter_mut().zip(&comp.values) {
            *acc += z.norm_sqr();
        }
    }
    Ok(e)
}

/// `sup_{x₀} ∫_{|x-x₀| ≤ R} |∇u|²` over grid-centred balls (x₀ = 0 on radial grids).
pub fn concentration(f: &Field, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(NlsError::InvalidParameter(format!("radius {r} must be positive")));
    }
    Ok(concentration_many(f, &[r])?[0])
}

/// [`concentration`] for several radii sharing one gradient evaluation.
pub fn concentration_many(f: &Field, radii: &[f64]) -> Result<Vec<f64>> {
    let g = f.grid;
    match g.geometry() {
        Geometry::Radial => {
            let h = g.spacing();
            let sigma = crate::grid::sphere_area(g.dim());
            // staggered kinetic cells, attributed to their outer face radius
            let mut cum = Vec::with_capacity(g.n());
            let mut acc = 0.0;
            for j in 0..g.n() {
                let face = (j as f64 + 0.5) * h;
                acc += sigma * face.powi(g.dim() as i32 - 1) * (f.values[j + 1] - f.values[j]).norm_sqr() / h;
                cum.push(acc);
            }
            Ok(radii
                .iter()
                .map(|&r| {
                    let cells = ((r / h) - 0.5).floor() + 1.0;
                    if cells <= 0.0 {
                        0.0
                    } else {
                        cum[(cells as usize).min(g.n()) - 1]
                    }
                })
                .collect())
        }
        Geometry::Cartesian => {
            let e = kinetic_density(f)?;
            let n = g.n();
            let d = g.dim();
            let mut e_hat: Vec<Complex64> = e.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft_nd(&mut e_hat, n, d, false);
            let total: f64 = e.iter().sum::<f64>() * g.weight(0);
            radii
                .iter()
                .map(|&r| {
                    let dx = g.spacing();
                    // periodic ball indicator centred at index 0
                    let mut ball: Vec<Complex64> = (0..g.node_count())
                        .map(|k| {
                            let idx = g.unravel(k);
                            let mut s = 0.0;
                            for a in 0..d {
                                let m = if idx[a] <= n / 2 { idx[a] } else { n - idx[a] };
                                s += (m as f64 * dx).powi(2);
                            }
                            Complex64::new(if s.sqrt() <= r { 1.0 } else { 0.0 }, 0.0)
                        })
                        .collect();
                    fft_nd(&mut ball, n, d, false);
                    // correlation with a symmetric kernel equals convolution
                    let mut conv: Vec<Complex64> = e_hat.iter().zip(&ball).map(|(a, b)| a * b).collect();
                    fft_nd(&mut conv, n, d, true);
                    let scale = g.weight(0) / g.node_count() as f64;
                    let best = conv.iter().map(|z| z.re * scale).fold(0.0, f64::max);
                    Ok(best.min(total))
                })
                .collect()
        }
    }
}
