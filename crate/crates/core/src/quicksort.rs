//! Instrumented Quick Sort.
//!
//! Hoare two-pointer partitioning around the middle element. Counters:
//!
//! - `recursion_calls`: every (sub)range the sort is invoked on, base cases
//!   included.
//! - `comparisons`: element-versus-pivot comparisons made by the scans.
//! - `iterations`: pointer advances of the two scans.
//! - `swaps`: element exchanges.

use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{OhhcError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortMetrics {
    pub recursion_calls: u64,
    pub iterations: u64,
    pub swaps: u64,
    pub comparisons: u64,
}

impl SortMetrics {
    /// Hardware-independent cost: comparisons plus swaps.
    pub fn cost_units(&self) -> u64 {
        self.comparisons + self.swaps
    }
}

impl Add for SortMetrics {
    type Output = SortMetrics;

    fn add(mut self, rhs: SortMetrics) -> SortMetrics {
        self += rhs;
        self
    }
}

impl AddAssign for SortMetrics {
    fn add_assign(&mut self, rhs: SortMetrics) {
        self.recursion_calls += rhs.recursion_calls;
        self.iterations += rhs.iterations;
        self.swaps += rhs.swaps;
        self.comparisons += rhs.comparisons;
    }
}

impl Sum for SortMetrics {
    fn sum<I: Iterator<Item = SortMetrics>>(iter: I) -> SortMetrics {
        iter.fold(SortMetrics::default(), Add::add)
    }
}

impl<'a> Sum<&'a SortMetrics> for SortMetrics {
    fn sum<I: Iterator<Item = &'a SortMetrics>>(iter: I) -> SortMetrics {
        iter.copied().sum()
    }
}

/// Sorts `values` in place and returns the work counters.
pub fn quicksort(values: &mut [i64]) -> SortMetrics {
    let mut m = SortMetrics::default();
    // Explicit stack of inclusive ranges; each popped range is one call.
    let mut pending: Vec<(usize, usize)> = Vec::new();
    if !values.is_empty() {
        pending.push((0, values.len() - 1));
    } else {
        return m;
    }
    while let Some((lo, hi)) = pending.pop() {
        m.recursion_calls += 1;
        if lo >= hi {
            continue;
        }
        let split = partition(values, lo, hi, &mut m);
        // push the larger half first so the stack stays O(log n)
        if split - lo > hi - split - 1 {
            pending.push((lo, split));
            pending.push((split + 1, hi));
        } else {
            pending.push((split + 1, hi));
            pending.push((lo, split));
        }
    }
    m
}

/// Hoare partition of `values[lo..=hi]`; returns `j` such that every element
/// of `lo..=j` is `<=` every element of `j+1..=hi`, with `lo <= j < hi`.
fn partition(values: &mut [i64], lo: usize, hi: usize, m: &mut SortMetrics) -> usize {
    let pivot = values[lo + (hi - lo) / 2];
    let mut i = lo;
    let mut j = hi;
    loop {
        m.comparisons += 1;
        while values[i] < pivot {
            i += 1;
            m.iterations += 1;
            m.comparisons += 1;
        }
        m.comparisons += 1;
        while values[j] > pivot {
            j -= 1;
            m.iterations += 1;
            m.comparisons += 1;
        }
        if i >= j {
            return j;
        }
        values.swap(i, j);
        m.swaps += 1;
        i += 1;
        j -= 1;
        m.iterations += 2;
    }
}

/// Sorts a copy of `values`.
pub fn sorted_with_metrics(values: &[i64]) -> (Vec<i64>, SortMetrics) {
    let mut out = values.to_vec();
    let m = quicksort(&mut out);
    (out, m)
}

/// The whole-array sequential run every parallel run is compared against.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub sorted: Vec<i64>,
    pub metrics: SortMetrics,
    pub cost_units: u64,
    pub wall_clock: Option<Duration>,
}

pub fn sequential_baseline(master: &[i64]) -> Result<Baseline> {
    run_baseline(master, false)
}

/// Same as [`sequential_baseline`], also timing the sort when `measure` is set.
pub fn run_baseline(master: &[i64], measure: bool) -> Result<Baseline> {
    if master.is_empty() {
        return Err(OhhcError::EmptyInput);
    }
    let mut sorted = master.to_vec();
    let start = measure.then(Instant::now);
    let metrics = quicksort(&mut sorted);
    let wall_clock = start.map(|s| s.elapsed());
    Ok(Baseline {
        sorted,
        cost_units: metrics.cost_units(),
        metrics,
        wall_clock,
    })
}
