//! Jumbled indexes over plain binary strings.
//!
//! For every window length the set of achievable ones counts is an integer
//! interval, so storing its two endpoints per length answers any query
//! `(length, ones)` in constant time.

mod window;

pub use window::{convolve, convolve_direct, split_edge_extrema, split_window_extrema, Extremum, SplitString};
pub(crate) use window::{max_conv_packed, max_conv_values};

use crate::bitseq::{BitSeq, ChunkTable, StepArray};
use crate::error::{Error, Result};

/// Per pattern size `i`, the minimum and maximum ones count over all patterns of that size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinMaxIndex {
    n: usize,
    min: StepArray,
    max: StepArray,
}

impl MinMaxIndex {
    /// Wraps two arrays over `0..=n`, checking the index invariants.
    pub fn new(min: StepArray, max: StepArray) -> Result<Self> {
        let n = max.end();
        if min.start() != 0 || max.start() != 0 || min.end() != n {
            return Err(Error::Shape(format!(
                "min/max arrays must both span 0..={n}, got {}..={} and {}..={}",
                min.start(),
                min.end(),
                max.start(),
                max.end()
            )));
        }
        if min.base() != 0 || max.base() != 0 {
            return Err(Error::Validation("size-0 pattern must have zero ones".into()));
        }
        if min.last() != max.last() {
            return Err(Error::Validation("full-size extrema disagree".into()));
        }
        for i in 0..=n {
            let (lo, hi) = (min.get(i).unwrap(), max.get(i).unwrap());
            if lo > hi || hi as usize > i {
                return Err(Error::Validation(format!("bad extrema ({lo}, {hi}) at size {i}")));
            }
        }
        Ok(MinMaxIndex { n, min, max })
    }

    /// Builds from explicit per-size values for sizes `0..=n`.
    pub fn from_values(min: &[u32], max: &[u32]) -> Result<Self> {
        MinMaxIndex::new(StepArray::from_values(0, min)?, StepArray::from_values(0, max)?)
    }

    pub(crate) fn from_values_unchecked(min: &[u32], max: &[u32]) -> Self {
        let min = StepArray::from_values(0, min).expect("min form is unit-step");
        let max = StepArray::from_values(0, max).expect("max form is unit-step");
        MinMaxIndex { n: max.end(), min, max }
    }

    /// Largest pattern size covered.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn min_array(&self) -> &StepArray {
        &self.min
    }

    pub fn max_array(&self) -> &StepArray {
        &self.max
    }

    pub fn min_at(&self, i: usize) -> Option<u32> {
        self.min.get(i)
    }

    pub fn max_at(&self, i: usize) -> Option<u32> {
        self.max.get(i)
    }

    /// Whether some pattern of size `i` has exactly `j` ones.
    #[inline]
    pub fn query(&self, i: usize, j: usize) -> bool {
        match (self.min.get(i), self.max.get(i)) {
            (Some(lo), Some(hi)) => lo as usize <= j && j <= hi as usize,
            _ => false,
        }
    }

    /// Bytes of the serialized body: both increment strings and their bases.
    pub fn payload_bytes(&self) -> usize {
        self.min.payload_bytes() + self.max.payload_bytes()
    }

    /// Heap bytes of both rank directories.
    pub fn directory_bytes(&self) -> usize {
        self.min.rank_index().directory_bytes() + self.max.rank_index().directory_bytes()
    }
}

fn check_window(s: &BitSeq, i: usize) -> Result<()> {
    if i == 0 || i > s.len() {
        return Err(Error::Range {
            index: i,
            lo: 1,
            hi: s.len(),
        });
    }
    Ok(())
}

fn slide(text: &[u8], len: usize) -> (u32, u32) {
    let mut ones: u32 = text[..len].iter().map(|&b| b as u32).sum();
    let (mut lo, mut hi) = (ones, ones);
    for (&inc, &out) in text[len..].iter().zip(text) {
        ones = ones + inc as u32 - out as u32;
        lo = lo.min(ones);
        hi = hi.max(ones);
    }
    (lo, hi)
}

fn unpack(s: &BitSeq) -> Vec<u8> {
    s.iter().map(u8::from).collect()
}

/// Min and max ones over all length-`i` windows, by one sliding pass.
pub fn window_minmax_naive(s: &BitSeq, i: usize) -> Result<(u32, u32)> {
    check_window(s, i)?;
    Ok(slide(&unpack(s), i))
}

/// Quadratic builder: one sliding pass per window length.
pub fn build_minmax_naive(s: &BitSeq) -> Result<MinMaxIndex> {
    if s.is_empty() {
        return Err(Error::Input("cannot index an empty string".into()));
    }
    let n = s.len();
    let text = unpack(s);
    let mut min = vec![0u32; n + 1];
    let mut max = vec![0u32; n + 1];
    for len in 1..=n {
        let (lo, hi) = slide(&text, len);
        min[len] = lo;
        max[len] = hi;
    }
    Ok(MinMaxIndex::from_values_unchecked(&min, &max))
}

/// Max ones per window length `0..=n` via the self-convolution of the
/// string's suffix and prefix counts: a window `[n - x, y)` has
/// `suffix(x) + prefix(y) - total` ones and length `x + y - n`.
fn packed_max(s: &BitSeq, table: &ChunkTable) -> Vec<u32> {
    let n = s.len();
    let total = s.count_ones() as i32;
    let r = max_conv_packed(&s.reversed(), s, n, table);
    r.into_iter().map(|v| (v - total) as u32).collect()
}

/// Table-driven builder; produces the same index as [`build_minmax_naive`].
pub fn build_minmax_packed(s: &BitSeq, table: &ChunkTable) -> Result<MinMaxIndex> {
    if s.is_empty() {
        return Err(Error::Input("cannot index an empty string".into()));
    }
    let max = packed_max(s, table);
    let zeros = packed_max(&s.complement(), table);
    let min: Vec<u32> = zeros.iter().enumerate().map(|(len, &z)| len as u32 - z).collect();
    Ok(MinMaxIndex::from_values_unchecked(&min, &max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn bits(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    #[test]
    fn window_examples() {
        assert_eq!(window_minmax_naive(&bits("0000"), 2).unwrap(), (0, 0));
        assert_eq!(window_minmax_naive(&bits("1011"), 2).unwrap(), (1, 2));
        assert_eq!(window_minmax_naive(&bits("1011"), 3).unwrap(), (2, 2));
        assert!(window_minmax_naive(&bits("1011"), 0).is_err());
        assert!(window_minmax_naive(&bits("1011"), 5).is_err());
    }

    #[test]
    fn naive_index_example() {
        let idx = build_minmax_naive(&bits("1011")).unwrap();
        assert_eq!(idx.min_array().decode(), vec![0, 0, 1, 2, 3]);
        assert_eq!(idx.max_array().decode(), vec![0, 1, 2, 2, 3]);
        let one = build_minmax_naive(&bits("1")).unwrap();
        assert_eq!(one.min_array().decode(), vec![0, 1]);
        assert_eq!(one.max_array().decode(), vec![0, 1]);
        assert!(matches!(build_minmax_naive(&BitSeq::new()), Err(Error::Input(_))));
    }

    #[test]
    fn query_examples() {
        let idx = build_minmax_naive(&bits("1011")).unwrap();
        assert!(idx.query(2, 1));
        assert!(!idx.query(2, 3));
        assert!(!idx.query(3, 1));
        assert!(idx.query(0, 0));
        assert!(!idx.query(5, 1));
    }

    #[test]
    fn packed_all_ones() {
        let t = ChunkTable::default();
        let idx = build_minmax_packed(&BitSeq::ones(100), &t).unwrap();
        for i in 0..=100 {
            assert_eq!((idx.min_at(i), idx.max_at(i)), (Some(i as u32), Some(i as u32)));
        }
    }

    #[test]
    fn packed_alternating_64() {
        let s: BitSeq = (0..64).map(|i| i % 2 == 1).collect();
        let t = ChunkTable::default();
        assert_eq!(build_minmax_packed(&s, &t).unwrap(), build_minmax_naive(&s).unwrap());
    }

    #[test]
    fn packed_matches_naive_exhaustive_12() {
        let t = ChunkTable::default();
        for len in 1..=12 {
            for m in 0u32..1 << len {
                let s: BitSeq = (0..len).map(|b| (m >> b) & 1 == 1).collect();
                assert_eq!(build_minmax_packed(&s, &t).unwrap(), build_minmax_naive(&s).unwrap());
            }
        }
    }

    #[test]
    fn packed_matches_naive_random_widths() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for s in [1, 4, 8, 13] {
            let t = ChunkTable::new(s).unwrap();
            for _ in 0..20 {
                let len = rng.gen_range(1..600);
                let p = rng.gen_range(0.05..0.95);
                let text: BitSeq = (0..len).map(|_| rng.gen_bool(p)).collect();
                assert_eq!(build_minmax_packed(&text, &t).unwrap(), build_minmax_naive(&text).unwrap());
            }
        }
    }

    #[test]
    fn index_rejects_bad_arrays() {
        assert!(MinMaxIndex::from_values(&[0, 1], &[0, 0]).is_err());
        assert!(MinMaxIndex::from_values(&[0, 0], &[0, 1]).is_err());
        assert!(MinMaxIndex::from_values(&[0, 0, 1], &[0, 1]).is_err());
        assert!(MinMaxIndex::from_values(&[0, 0, 1], &[0, 1, 1]).is_ok());
    }
}
