//! Input generation and value-range bucketing.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{OhhcError, Result};

/// Default value range for generated arrays: non-negative 32-bit integers.
pub const DEFAULT_VALUE_RANGE: (i64, i64) = (0, i32::MAX as i64);

/// Default number of clustered bands in a [`Distribution::Local`] array.
pub const DEFAULT_LOCAL_SEGMENTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Random,
    Sorted,
    #[serde(rename = "reversed")]
    ReversedSorted,
    Local,
}

impl Distribution {
    pub const ALL: [Distribution; 4] = [
        Distribution::Random,
        Distribution::Sorted,
        Distribution::ReversedSorted,
        Distribution::Local,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Distribution::Random => "random",
            Distribution::Sorted => "sorted",
            Distribution::ReversedSorted => "reversed",
            Distribution::Local => "local",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Distribution::Random),
            "sorted" => Ok(Distribution::Sorted),
            "reversed" | "reversed-sorted" | "reversedsorted" => Ok(Distribution::ReversedSorted),
            "local" => Ok(Distribution::Local),
            other => Err(format!(
                "unknown distribution `{other}` (expected random|sorted|reversed|local)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: Distribution,
    pub element_count: usize,
    pub seed: u64,
    /// Inclusive `[lo, hi]`.
    pub value_range: (i64, i64),
    /// Band count for [`Distribution::Local`]; ignored otherwise.
    pub local_segments: usize,
}

impl DistributionSpec {
    pub fn new(kind: Distribution, element_count: usize, seed: u64) -> Self {
        Self {
            kind,
            element_count,
            seed,
            value_range: DEFAULT_VALUE_RANGE,
            local_segments: DEFAULT_LOCAL_SEGMENTS,
        }
    }

    pub fn with_range(mut self, lo: i64, hi: i64) -> Self {
        self.value_range = (lo, hi);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.value_range;
        if lo > hi {
            return Err(OhhcError::InvalidSpec(format!(
                "value range [{lo}, {hi}] is empty"
            )));
        }
        if self.element_count == 0 {
            return Err(OhhcError::InvalidSpec("element_count must be > 0".into()));
        }
        if self.kind == Distribution::Local && self.local_segments == 0 {
            return Err(OhhcError::InvalidSpec("local_segments must be > 0".into()));
        }
        Ok(())
    }
}

/// Deterministically generates the array described by `spec`.
///
/// `Local` splits the array into `local_segments` equal runs; run `s` draws
/// uniformly from the `s`-th of `local_segments` equal sub-bands of the value
/// range, so values are clustered by position and bands ascend.
pub fn generate(spec: &DistributionSpec) -> Result<Vec<i64>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.value_range;
    let n = spec.element_count;
    let uniform = |rng: &mut ChaCha8Rng, n: usize| -> Vec<i64> {
        (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
    };

    let values = match spec.kind {
        Distribution::Random => uniform(&mut rng, n),
        Distribution::Sorted => {
            let mut v = uniform(&mut rng, n);
            v.sort_unstable();
            v
        }
        Distribution::ReversedSorted => {
            let mut v = uniform(&mut rng, n);
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        }
        Distribution::Local => {
            let segments = spec.local_segments.min(n) as i128;
            let width = hi as i128 - lo as i128 + 1;
            let mut v = Vec::with_capacity(n);
            for s in 0..segments {
                let start = (s * n as i128 / segments) as usize;
                let end = ((s + 1) * n as i128 / segments) as usize;
                let band_lo = lo as i128 + s * width / segments;
                let band_hi = (lo as i128 + (s + 1) * width / segments - 1).max(band_lo);
                let (band_lo, band_hi) = (band_lo as i64, band_hi as i64);
                v.extend((start..end).map(|_| rng.gen_range(band_lo..=band_hi)));
            }
            v
        }
    };
    Ok(values)
}

/// The bucket width `(max − min) / N`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdivider {
    pub span: u128,
    pub buckets: u64,
}

impl Subdivider {
    pub fn as_f64(&self) -> f64 {
        self.span as f64 / self.buckets as f64
    }

    /// `floor((v − min) / subdivider)` clamped to `[0, N − 1]`. A zero span
    /// sends every value to bucket 0.
    pub fn bucket_of(&self, value: i64, min: i64) -> usize {
        if self.span == 0 {
            return 0;
        }
        let offset = (value as i128 - min as i128).max(0) as u128;
        let idx = offset * self.buckets as u128 / self.span;
        idx.min(self.buckets as u128 - 1) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketSet {
    pub buckets: Vec<Vec<i64>>,
    pub subdivider: Subdivider,
    pub min_value: i64,
    pub max_value: i64,
}

impl BucketSet {
    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }
}

/// Splits `master` into `processor_count` value-ordered buckets. Elements keep
/// their relative input order inside each bucket.
pub fn split(master: &[i64], processor_count: usize) -> Result<BucketSet> {
    if master.is_empty() {
        return Err(OhhcError::EmptyInput);
    }
    if processor_count == 0 {
        return Err(OhhcError::OutOfRange {
            what: "processor count",
            index: 0,
            limit: 0,
        });
    }
    let min_value = *master.iter().min().expect("non-empty");
    let max_value = *master.iter().max().expect("non-empty");
    let subdivider = Subdivider {
        span: (max_value as i128 - min_value as i128) as u128,
        buckets: processor_count as u64,
    };

    let mut counts = vec![0usize; processor_count];
    for &v in master {
        counts[subdivider.bucket_of(v, min_value)] += 1;
    }
    let mut buckets: Vec<Vec<i64>> = counts.into_iter().map(Vec::with_capacity).collect();
    for &v in master {
        buckets[subdivider.bucket_of(v, min_value)].push(v);
    }

    Ok(BucketSet {
        buckets,
        subdivider,
        min_value,
        max_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn split_example() {
        let set = split(&[1, 5, 9, 3], 2).unwrap();
        assert_eq!(set.subdivider.as_f64(), 4.0);
        assert_eq!(set.buckets, vec![vec![1, 3], vec![5, 9]]);
    }

    #[test]
    fn split_single_bucket() {
        let master = vec![4, -2, 9, 9, 0];
        let set = split(&master, 1).unwrap();
        assert_eq!(set.buckets, vec![master]);
    }

    #[test]
    fn split_degenerate_range() {
        let set = split(&[7, 7, 7], 3).unwrap();
        assert_eq!(set.buckets, vec![vec![7, 7, 7], vec![], vec![]]);
    }

    #[test]
    fn split_rejects_empty() {
        assert!(matches!(split(&[], 4), Err(OhhcError::EmptyInput)));
    }

    #[test]
    fn split_handles_extreme_values() {
        let set = split(&[i64::MIN, 0, i64::MAX], 4).unwrap();
        assert_eq!(set.buckets[0], vec![i64::MIN]);
        assert_eq!(set.buckets[2], vec![0]);
        assert_eq!(set.buckets[3], vec![i64::MAX]);
    }

    #[test]
    fn sorted_and_reversed() {
        let s = generate(&DistributionSpec::new(Distribution::Sorted, 5, 3).with_range(1, 100))
            .unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.windows(2).all(|w| w[0] <= w[1]));
        let r = generate(&DistributionSpec::new(Distribution::ReversedSorted, 5, 3).with_range(1, 100))
            .unwrap();
        let mut back = r.clone();
        back.reverse();
        assert_eq!(back, s);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = DistributionSpec::new(Distribution::Random, 1_000_000, 99);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = DistributionSpec { seed: 100, ..spec };
        assert_ne!(generate(&other).unwrap()[..16], generate(&spec).unwrap()[..16]);
    }

    #[test]
    fn local_bands_ascend() {
        let mut spec = DistributionSpec::new(Distribution::Local, 1000, 5).with_range(0, 9999);
        spec.local_segments = 10;
        let v = generate(&spec).unwrap();
        for (s, run) in v.chunks(100).enumerate() {
            let s = s as i64;
            assert!(run.iter().all(|&x| (s * 1000..(s + 1) * 1000).contains(&x)));
        }
    }

    #[test]
    fn local_with_tiny_range() {
        let spec = DistributionSpec::new(Distribution::Local, 500, 1).with_range(3, 5);
        let v = generate(&spec).unwrap();
        assert!(v.iter().all(|&x| (3..=5).contains(&x)));
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&DistributionSpec::new(Distribution::Random, 0, 1)).is_err());
        assert!(generate(&DistributionSpec::new(Distribution::Random, 3, 1).with_range(5, 4)).is_err());
    }

    proptest! {
        #[test]
        fn buckets_are_an_ordered_permutation(
            master in proptest::collection::vec(-1000i64..1000, 1..400),
            n in 1usize..50,
        ) {
            let set = split(&master, n).unwrap();
            prop_assert_eq!(set.len(), n);
            let mut flat: Vec<i64> = set.buckets.concat();
            let mut orig = master.clone();
            flat.sort_unstable();
            orig.sort_unstable();
            prop_assert_eq!(flat, orig);

            let mut prev_max: Option<i64> = None;
            for b in set.buckets.iter().filter(|b| !b.is_empty()) {
                let lo = *b.iter().min().unwrap();
                if let Some(p) = prev_max {
                    prop_assert!(p <= lo);
                }
                prev_max = Some(*b.iter().max().unwrap());
            }
            prop_assert_eq!(split(&master, n).unwrap(), set);
        }
    }
}
