//! Statistics of a sampled frequency-scale trace N(t).

use serde::{Deserialize, Serialize};

use crate::error::{NlsError, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl NTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(NlsError::InvalidParameter("trace times and values differ in length".into()));
        }
        if values.iter().any(|&v| !(v > 0.0)) {
            return Err(NlsError::InvalidParameter("trace values must be positive".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NlsError::InvalidParameter("trace times must increase strictly".into()));
        }
        Ok(NTrace { times, values })
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation of N at `t` (clamped to the sampled domain).
    pub fn at(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return self.values[0];
        }
        if i == self.times.len() {
            return *self.values.last().unwrap();
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let s = (t - t0) / (t1 - t0);
        self.values[i - 1] * (1.0 - s) + self.values[i] * s
    }

    /// Same trace with N multiplied by a constant.
    pub fn scaled(&self, c: f64) -> NTrace {
        NTrace { times: self.times.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// `osc(T) = inf_{t₀} sup{N(t) : |t-t₀| ≤ T N(t₀)^{-2}} / inf{…}` over samples.
pub fn oscillation(trace: &NTrace, big_t: f64) -> Result<f64> {
    if trace.is_empty() {
        return Err(NlsError::EmptyTrace);
    }
    let mut best = f64::INFINITY;
    for (i, (&t0, &n0)) in trace.times.iter().zip(&trace.values).enumerate() {
        let half = big_t / (n0 * n0);
        let (mut hi, mut lo) = (n0, n0);
        // the window is contiguous around i
        for j in (0..i).rev() {
            if t0 - trace.times[j] > half {
                break;
            }
            hi = hi.max(trace.values[j]);
            lo = lo.min(trace.values[j]);
        }
        for j in i + 1..trace.times.len() {
            if trace.times[j] - t0 > half {
                break;
            }
            hi = hi.max(trace.values[j]);
            lo = lo.min(trace.values[j]);
        }
        best = best.min(hi / lo);
    }
    Ok(best)
}

/// `a(t₀) = N(t₀)/sup_{t ≤ t₀} N(t) + N(t₀)/sup_{t ≥ t₀} N(t)`.
pub fn spreading(trace: &NTrace, t0: f64) -> Result<f64> {
    if trace.is_empty() {
        return Err(NlsError::EmptyTrace);
    }
    let n0 = trace.at(t0);
    let mut past = n0;
    let mut future = n0;
    for (&t, &n) in trace.times.iter().zip(&trace.values) {
        if t <= t0 {
            past = past.max(n);
        }
        if t >= t0 {
            future = future.max(n);
        }
    }
    Ok(n0 / past + n0 / future)
}
