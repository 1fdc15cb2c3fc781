//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's quadrature or ground-state code:
//! W' comes from a complex-step derivative, integrals from Romberg
//! extrapolation plus a term-by-term far-field series.
#![allow(dead_code)]

use num_complex::Complex64;

pub fn ln_gamma_half_integer(two_x: usize) -> f64 {
    // Γ(x) for x = two_x / 2 by recursion from Γ(1) = 1, Γ(1/2) = √π
    let mut x = if two_x % 2 == 0 { 1.0 } else { 0.5 };
    let mut acc = if two_x % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    while 2.0 * x < two_x as f64 - 0.5 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Surface area of the unit sphere in ℝ^d.
pub fn sphere(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / ln_gamma_half_integer(d).exp()
}

fn w_complex(d: usize, r: Complex64) -> Complex64 {
    let a = (d * (d - 2)) as f64;
    (Complex64::new(1.0, 0.0) + r * r / a).powf(-(d as f64 - 2.0) / 2.0)
}

pub fn w(d: usize, r: f64) -> f64 {
    w_complex(d, Complex64::new(r, 0.0)).re
}

/// W'(r) by the complex-step rule `Im W(r + ih) / h`.
pub fn w_prime(d: usize, r: f64) -> f64 {
    let h = 1e-30;
    w_complex(d, Complex64::new(r, h)).im / h
}

/// Romberg integration of `f` over `[a, b]` to relative tolerance `tol`.
pub fn romberg(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut rows: Vec<Vec<f64>> = vec![vec![0.5 * (b - a) * (f(a) + f(b))]];
    for k in 1..28 {
        let n = 1usize << (k - 1);
        let h = (b - a) / (2 * n) as f64;
        let mid: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * rows[k - 1][0] + h * mid];
        for j in 1..=k.min(8) {
            let p = 4f64.powi(j as i32);
            let v = (p * row[j - 1] - rows[k - 1][j - 1]) / (p - 1.0);
            row.push(v);
        }
        let best = *row.last().unwrap();
        let prev = *rows[k - 1].last().unwrap();
        rows.push(row);
        if k > 4 && (best - prev).abs() <= tol * best.abs() {
            return best;
        }
    }
    *rows.last().unwrap().last().unwrap()
}

/// `∫_0^∞ f` split into unit panels up to `r_cut`, then a tail series.
fn half_line(f: &dyn Fn(f64) -> f64, r_cut: f64, tail: f64) -> f64 {
    let mut s = 0.0;
    let mut a = 0.0;
    while a < r_cut {
        let b = (a + 1.0).min(r_cut);
        s += romberg(f, a, b, 1e-13);
        a = b;
    }
    s + tail
}

fn binom_neg(n: f64, k: usize) -> f64 {
    // binom(-n, k)
    (0..k).fold(1.0, |acc, j| acc * (-n - j as f64) / (j as f64 + 1.0))
}

/// `(‖∇W‖₂², ‖W‖_{2*}^{2*})` in dimension `d`.
pub fn w_norms(d: usize) -> (f64, f64) {
    let df = d as f64;
    let a = df * (df - 2.0);
    let r_cut = 20.0 * a.sqrt();
    // |W'|² r^{d-1} = (d-2)² a^{d-2} Σ_k C(-d,k) a^k r^{1-d-2k} for r² > a
    let grad_tail: f64 = (0..60)
        .map(|k| {
            let p = df + 2.0 * k as f64 - 2.0;
            (df - 2.0).powi(2) * a.powf(df - 2.0) * binom_neg(df, k) * a.powi(k as i32) * r_cut.powf(-p) / p
        })
        .sum();
    // W^{2*} r^{d-1} = a^d Σ_k C(-d,k) a^k r^{-1-d-2k}
    let pot_tail: f64 = (0..60)
        .map(|k| {
            let p = df + 2.0 * k as f64;
            a.powf(df) * binom_neg(df, k) * a.powi(k as i32) * r_cut.powf(-p) / p
        })
        .sum();
    let pstar = 2.0 * df / (df - 2.0);
    let grad = half_line(&|r| w_prime(d, r).powi(2) * r.powi(d as i32 - 1), r_cut, grad_tail);
    let pot = half_line(&|r| w(d, r).powf(pstar) * r.powi(d as i32 - 1), r_cut, pot_tail);
    (sphere(d) * grad, sphere(d) * pot)
}

/// Margins (δ₁, δ₂) in scaled form: with s = y/‖∇W‖₂², f(y)/E(W) = (d s − (d−2) s^{d/(d−2)})/2.
pub fn margins(d: usize, delta0: f64) -> (f64, f64) {
    let df = d as f64;
    let g = |s: f64| 0.5 * (df * s - (df - 2.0) * s.powf(df / (df - 2.0)));
    let target = 1.0 - delta0;
    let solve = |mut lo: f64, mut hi: f64, increasing: bool| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) < target) == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let s_max = (df / (df - 2.0)).powf((df - 2.0) / 2.0);
    (1.0 - solve(0.0, 1.0, true), solve(1.0, s_max, false) - 1.0)
}
