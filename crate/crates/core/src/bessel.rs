//! The d-dimensional radial Fourier kernel
//! `j_d(z) = Γ(d/2) (2/z)^{d/2-1} J_{d/2-1}(z)`, normalized so `j_d(0) = 1`.
//!
//! For radial f, `f̂(ρ) = (2π)^{-d/2} σ_{d-1} ∫ f(r) j_d(ρ r) r^{d-1} dr`.
//! Callers pass `sin z` and `cos z` so that table lookups can be reused
//! across a whole transform.

use crate::grid::gamma_half;

const SERIES_LIMIT_EVEN: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 30.0;

pub fn radial_kernel(d: usize, z: f64) -> f64 {
    radial_kernel_sc(d, z, z.sin(), z.cos())
}

pub fn radial_kernel_sc(d: usize, z: f64, sin_z: f64, cos_z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if d % 2 == 1 {
        let l = (d - 3) / 2;
        if z < 2.0 + 2.0 * l as f64 {
            series(d, z)
        } else {
            odd_closed_form(l, z, sin_z, cos_z)
        }
    } else if z < SERIES_LIMIT_EVEN {
        series(d, z)
    } else {
        let nu = d / 2 - 1;
        let jnu = if z < ASYMPTOTIC_LIMIT { bessel_j_miller(nu, z) } else { hankel_asymptotic(nu, z, sin_z, cos_z) };
        gamma_half(d) * (2.0 / z).powi(nu as i32) * jnu
    }
}

/// Power series Σ (-z²/4)^k / (k! (d/2)_k).
fn series(d: usize, z: f64) -> f64 {
    let half = d as f64 / 2.0;
    let x = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..200 {
        term *= x / ((k as f64 + 1.0) * (half + k as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Odd d = 2l + 3: j_d(z) = (2l+1)!! j_l(z) / z^l with spherical Bessel j_l.
fn odd_closed_form(l: usize, z: f64, sin_z: f64, cos_z: f64) -> f64 {
    let mut jm = sin_z / z;
    if l == 0 {
        return jm;
    }
    let mut j = sin_z / (z * z) - cos_z / z;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / z * j - jm;
        jm = j;
        j = next;
    }
    let dfact: f64 = (1..=l).map(|k| (2 * k + 1) as f64).product();
    dfact * j / z.powi(l as i32)
}

/// J_ν(z) for integer ν by Miller's downward recurrence.
fn bessel_j_miller(nu: usize, z: f64) -> f64 {
    let start = {
        let m = (z.max(nu as f64) + 30.0 + (40.0 * z.max(nu as f64)).sqrt()) as usize;
        m + (m % 2)
    };
    let mut jp = 0.0;
    let mut j = 1e-30;
    let mut sum = 0.0;
    let mut out = 0.0;
    for k in (1..=start).rev() {
        let jm = 2.0 * k as f64 / z * j - jp;
        jp = j;
        j = jm;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            sum *= 1e-250;
            out *= 1e-250;
        }
        // j now holds J_{k-1}
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            sum += 2.0 * j;
        }
        if k - 1 == nu {
            out = j;
        }
    }
    sum += j;
    out / sum
}

/// Hankel's asymptotic expansion of J_ν(z) for large z.
fn hankel_asymptotic(nu: usize, z: f64, sin_z: f64, cos_z: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1usize;
    loop {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        if k % 2 == 1 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += sign * term;
        } else {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * term;
        }
        if term.abs() < 1e-17 || k > 60 {
            break;
        }
        k += 1;
    }
    // χ = z - νπ/2 - π/4
    let (sa, ca) = phase_shift(nu);
    let cos_chi = cos_z * ca + sin_z * sa;
    let sin_chi = sin_z * ca - cos_z * sa;
    (2.0 / (std::f64::consts::PI * z)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// (sin α, cos α) for α = νπ/2 + π/4.
fn phase_shift(nu: usize) -> (f64, f64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match nu % 4 {
        0 => (h, h),
        1 => (h, -h),
        2 => (-h, -h),
        _ => (-h, h),
    }
}
