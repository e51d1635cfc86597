//! Closed-form cost model and measured speedup/efficiency.
//!
//! All logarithms are base 2.

use serde::Serialize;

use crate::error::{OhhcError, Result};
use crate::topology::OhhcConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModelParams {
    pub n: u64,
    pub p: u64,
    pub g: u64,
    pub d_h: u32,
    /// Average chunk size `n / P`.
    pub t: u64,
    /// Longest path in links, `2·d_h + 3`.
    pub l: u64,
}

impl CostModelParams {
    /// Parameters for sorting `n` elements on the whole network (`P = N`).
    pub fn new(config: &OhhcConfig, n: u64) -> Self {
        let p = config.node_count() as u64;
        Self {
            n,
            p,
            g: config.group_count() as u64,
            d_h: config.dimension(),
            t: n / p,
            l: path_links(config.dimension()),
        }
    }
}

pub fn path_links(d_h: u32) -> u64 {
    2 * d_h as u64 + 3
}

/// `12·G·d_h − 2`
pub fn comm_steps_model(g: u64, d_h: u32) -> u64 {
    12 * g * d_h as u64 - 2
}

/// `(n/P)·log(n/P)`, zero once `n/P <= 1`.
pub fn parallel_time_model(n: u64, p: u64) -> f64 {
    let t = n as f64 / p as f64;
    if t <= 1.0 {
        0.0
    } else {
        t * t.log2()
    }
}

fn check_model(n: u64, p: u64) -> Result<(f64, f64)> {
    if p == 0 || p >= n {
        return Err(OhhcError::UndefinedModel { n, p });
    }
    Ok(((n as f64).log2(), (p as f64).log2()))
}

/// `P·log n / (log n − log P)`, computed as `P·E` so the two agree bit for bit.
pub fn speedup_model(n: u64, p: u64) -> Result<f64> {
    Ok(p as f64 * efficiency_model(n, p)?)
}

/// `log n / (log n − log P)`
pub fn efficiency_model(n: u64, p: u64) -> Result<f64> {
    let (log_n, log_p) = check_model(n, p)?;
    Ok(log_n / (log_n - log_p))
}

/// Store-and-forward delay `t·(2·d_h + 3)`, or `n·(2·d_h + 3)` in the worst
/// case where one chunk holds almost everything.
pub fn message_delay_model(t: u64, d_h: u32, worst_case: bool, n: u64) -> u64 {
    let size = if worst_case { n } else { t };
    size * path_links(d_h)
}

pub fn measured_speedup(baseline_cost: f64, parallel_cost: f64) -> Result<f64> {
    if parallel_cost <= 0.0 {
        return Err(OhhcError::ZeroParallelCost);
    }
    Ok(baseline_cost / parallel_cost)
}

pub fn measured_efficiency(speedup: f64, p: u64) -> f64 {
    speedup / p as f64
}
