//! Discrete Gronwall inequality with acausal coupling,
//! `x_k ≤ b_k + η Σ_l 2^{-γ|k-l|} x_l`.
//!
//! On ℤ the equality system has symbol `1 - η a(θ)` with
//! `a(θ) = (1-q²)/(1 - 2q cos θ + q²)`, `q = 2^{-γ}`, and its inverse is
//! `1 + c Σ_m r^{|m|} e^{imθ}` where r ∈ (0,1) solves `z² - Bz + 1 = 0`,
//! `B = 2^{-γ} + 2^{γ} - η2^{γ} + η2^{-γ}`, and `c = (1 - r q)(r/q - 1)/(1 - r²)`.
//! Hence `x_k ≤ b_k + c Σ_l r^{|k-l|} b_l`, two-sided in l.

use serde::Serialize;

use crate::error::{NlsError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallBound {
    pub r: f64,
    /// `c` above
    pub prefactor: f64,
    /// `b_k + c Σ_l r^{|k-l|} b_l`
    pub bound: Vec<f64>,
    /// the one-sided sum `(1 + c) Σ_{l ≤ k} r^{k-l} b_l`; dominates only when
    /// b is supported at the start of the sequence
    pub causal: Vec<f64>,
}

fn validate(gamma: f64, eta: f64, b: &[f64]) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(NlsError::InvalidParameter(format!("γ = {gamma} must be positive")));
    }
    let hi = 0.5 * (1.0 - 2f64.powf(-gamma));
    if !(eta > 0.0 && eta < hi) {
        return Err(NlsError::OutOfRange { value: eta, lo: 0.0, hi });
    }
    if b.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(NlsError::InvalidParameter("b must be finite and non-negative".into()));
    }
    Ok(())
}

/// Root in (0,1) of `z² - Bz + 1 = 0`.
pub fn gronwall_rate(gamma: f64, eta: f64) -> Result<f64> {
    validate(gamma, eta, &[])?;
    let (up, down) = (2f64.powf(gamma), 2f64.powf(-gamma));
    let big_b = down + up - eta * up + eta * down;
    // the smaller root, written without cancellation
    Ok(2.0 / (big_b + (big_b * big_b - 4.0).sqrt()))
}

pub fn gronwall_bound(gamma: f64, eta: f64, b: &[f64]) -> Result<GronwallBound> {
    validate(gamma, eta, b)?;
    let r = gronwall_rate(gamma, eta)?;
    let q = 2f64.powf(-gamma);
    let c = (1.0 - r * q) * (r / q - 1.0) / (1.0 - r * r);
    let k = b.len();
    let bound = (0..k)
        .map(|i| b[i] + c * (0..k).map(|l| r.powi((i as i32 - l as i32).abs()) * b[l]).sum::<f64>())
        .collect();
    let causal = (0..k).map(|i| (1.0 + c) * (0..=i).map(|l| r.powi((i - l) as i32) * b[l]).sum::<f64>()).collect();
    Ok(GronwallBound { r, prefactor: c, bound, causal })
}

/// Solves the truncated equality system `x = b + η A x`, `A_{kl} = 2^{-γ|k-l|}`.
pub fn gronwall_brute(gamma: f64, eta: f64, b: &[f64]) -> Result<Vec<f64>> {
    validate(gamma, eta, b)?;
    let k = b.len();
    let q = 2f64.powf(-gamma);
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|l| if i == l { 1.0 - eta } else { -eta * q.powi((i as i32 - l as i32).abs()) }).collect())
        .collect();
    let mut x = b.to_vec();
    // strictly diagonally dominant, so elimination without pivoting is stable
    for col in 0..k {
        let p = a[col][col];
        for row in col + 1..k {
            let f = a[row][col] / p;
            if f != 0.0 {
                for j in col..k {
                    a[row][j] -= f * a[col][j];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|j| a[row][j] * x[j]).sum();
        x[row] = (x[row] - s) / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_forcing() {
        let b = vec![0.0; 64];
        assert!(gronwall_brute(1.0, 0.1, &b).unwrap().iter().all(|&v| v == 0.0));
        assert!(gronwall_bound(1.0, 0.1, &b).unwrap().bound.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_invalid_eta() {
        assert!(gronwall_bound(1.0, 0.25, &[1.0]).is_err());
        assert!(gronwall_bound(1.0, 0.0, &[1.0]).is_err());
        assert!(gronwall_brute(-1.0, 0.1, &[1.0]).is_err());
    }

    #[test]
    fn rate_tends_to_coupling_decay() {
        let r = gronwall_rate(1.0, 1e-6).unwrap();
        assert!(r > 0.5 && r - 0.5 < 1e-4);
    }

    #[test]
    fn impulse_response() {
        let mut b = vec![0.0; 64];
        b[0] = 1.0;
        let x = gronwall_brute(1.0, 0.1, &b).unwrap();
        let bound = gronwall_bound(1.0, 0.1, &b).unwrap();
        for k in 0..64 {
            assert!(x[k] <= bound.bound[k] && x[k] <= bound.causal[k]);
            assert!(x[k] >= b[k]);
        }
        // geometric tail away from the truncation edge
        for k in 20..30 {
            assert!((x[k] / x[k + 1] * bound.r - 1.0).abs() < 0.01);
        }
    }
}
