//! Packed bit sequences, a two-level rank directory, unit-step arrays and
//! the chunk lookup tables used by the packed window algorithms.
//!
//! A [`StepArray`] stores a monotone array whose consecutive entries differ
//! by 0 or 1 as a base value plus one increment bit per index, so an array
//! over `n + 1` indices costs `n` bits plus the rank directory.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A fixed-length sequence of bits packed into 64-bit words, LSB first.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSeq {
    words: Vec<u64>,
    len: usize,
}

impl BitSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        BitSeq {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = BitSeq {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        s.clear_tail();
        s
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitSeq {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    /// Builds a sequence from raw words; bits at positions `>= len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(64) {
            return Err(Error::Shape(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        words.truncate(len.div_ceil(64));
        let mut s = BitSeq { words, len };
        s.clear_tail();
        Ok(s)
    }

    /// Builds a sequence from bytes, bit `i` taken from `bytes[i / 8] >> (i % 8)`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Shape(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= u64::from(b) << (8 * (i % 8));
        }
        BitSeq::from_words(words, len)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len.div_ceil(8));
        for i in 0..self.len.div_ceil(8) {
            out.push((self.words[i / 8] >> (8 * (i % 8))) as u8);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << r) - 1;
            }
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `bits` (`width <= 64`).
    pub fn push_bits(&mut self, bits: u64, width: usize) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        let bits = if width == 64 {
            bits
        } else {
            bits & ((1u64 << width) - 1)
        };
        let off = self.len % 64;
        if off == 0 {
            self.words.push(bits);
        } else {
            *self.words.last_mut().unwrap() |= bits << off;
            if off + width > 64 {
                self.words.push(bits >> (64 - off));
            }
        }
        self.len += width;
    }

    pub fn extend_from(&mut self, other: &BitSeq) {
        let full = other.len / 64;
        for &w in &other.words[..full] {
            self.push_bits(w, 64);
        }
        let rest = other.len % 64;
        if rest > 0 {
            self.push_bits(other.words[full], rest);
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        if bit {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Returns bits `pos..pos + width` with bit `pos` in the LSB (`width <= 57`).
    /// Positions past the end read as 0.
    #[inline]
    pub fn get_bits(&self, pos: usize, width: usize) -> u64 {
        debug_assert!(width <= 57);
        let w = pos / 64;
        let off = pos % 64;
        let lo = match self.words.get(w) {
            Some(&x) => x >> off,
            None => return 0,
        };
        let v = if off + width > 64 {
            lo | self.words.get(w + 1).map_or(0, |&x| x << (64 - off))
        } else {
            lo
        };
        v & ((1u64 << width) - 1)
    }

    /// Running ones counts `[0, pop(..1), .., pop(..len)]`.
    pub fn prefix_counts(&self) -> Vec<i32> {
        let mut out = Vec::with_capacity(self.len + 1);
        out.push(0);
        let mut acc = 0i32;
        for (k, &w) in self.words.iter().enumerate() {
            let bits = (self.len - k * 64).min(64);
            for b in 0..bits {
                acc += ((w >> b) & 1) as i32;
                out.push(acc);
            }
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| (self.words[i / 64] >> (i % 64)) & 1 == 1)
    }

    pub fn reversed(&self) -> BitSeq {
        let mut out = BitSeq::zeros(self.len);
        for (i, b) in self.iter().enumerate() {
            if b {
                out.words[(self.len - 1 - i) / 64] |= 1 << ((self.len - 1 - i) % 64);
            }
        }
        out
    }

    pub fn complement(&self) -> BitSeq {
        let mut out = BitSeq {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.clear_tail();
        out
    }

    /// Bits `from..to` as a new sequence.
    pub fn slice(&self, from: usize, to: usize) -> BitSeq {
        assert!(from <= to && to <= self.len);
        let mut out = BitSeq::with_capacity(to - from);
        let mut p = from;
        while p < to {
            let w = (to - p).min(57);
            out.push_bits(self.get_bits(p, w), w);
            p += w;
        }
        out
    }
}

impl FromIterator<bool> for BitSeq {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut s = BitSeq::new();
        for b in iter {
            s.push(b);
        }
        s
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    /// Parses a string of `0`/`1` characters; ASCII whitespace is skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitSeq::new();
        for (col, c) in s.chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                c if c.is_ascii_whitespace() => {}
                other => {
                    return Err(Error::Input(format!(
                        "unexpected character {other:?} at column {}",
                        col + 1
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSeq({self})")
    }
}

/// Bits covered by one directory entry.
const RANK_BLOCK: usize = 256;
const WORDS_PER_BLOCK: usize = RANK_BLOCK / 64;

/// Constant-time rank over a [`BitSeq`].
///
/// One absolute 32-bit count per 256-bit block; a query reads one directory
/// entry and popcounts at most four words.
#[derive(Clone, PartialEq, Eq)]
pub struct RankIndex {
    bits: BitSeq,
    blocks: Vec<u32>,
}

impl RankIndex {
    pub fn new(bits: BitSeq) -> Self {
        let mut blocks = Vec::with_capacity(bits.len / RANK_BLOCK + 1);
        let mut acc = 0u32;
        for chunk in bits.words.chunks(WORDS_PER_BLOCK) {
            blocks.push(acc);
            acc += chunk.iter().map(|w| w.count_ones()).sum::<u32>();
        }
        blocks.push(acc);
        RankIndex { bits, blocks }
    }

    pub fn bits(&self) -> &BitSeq {
        &self.bits
    }

    pub fn into_bits(self) -> BitSeq {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len
    }

    pub fn is_empty(&self) -> bool {
        self.bits.len == 0
    }

    /// Number of ones in positions `[0, p)`.
    pub fn rank(&self, p: usize) -> Result<usize> {
        if p > self.bits.len {
            return Err(Error::Range {
                index: p,
                lo: 0,
                hi: self.bits.len,
            });
        }
        Ok(self.rank_unchecked(p))
    }

    #[inline]
    pub fn rank_unchecked(&self, p: usize) -> usize {
        let block = p / RANK_BLOCK;
        let mut r = self.blocks[block] as usize;
        let first = block * WORDS_PER_BLOCK;
        let word = p / 64;
        for w in &self.bits.words[first..word] {
            r += w.count_ones() as usize;
        }
        let off = p % 64;
        if off != 0 {
            r += (self.bits.words[word] & ((1u64 << off) - 1)).count_ones() as usize;
        }
        r
    }

    /// Heap bytes spent on the directory alone.
    pub fn directory_bytes(&self) -> usize {
        self.blocks.len() * std::mem::size_of::<u32>()
    }
}

impl fmt::Debug for RankIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RankIndex").field("bits", &self.bits).finish()
    }
}

/// A monotone nondecreasing array with unit steps over the index range
/// `start..=end`.
///
/// `value(start) = base` and `value(i) - value(i - 1) = steps[i - start - 1]`.
/// Indices outside the range are undefined (callers treat them as absent).
#[derive(Clone, PartialEq, Eq)]
pub struct StepArray {
    start: usize,
    base: u32,
    steps: RankIndex,
}

impl StepArray {
    pub fn from_parts(start: usize, base: u32, steps: BitSeq) -> Self {
        StepArray {
            start,
            base,
            steps: RankIndex::new(steps),
        }
    }

    /// Encodes `values[k]` as the value at index `start + k`.
    pub fn from_values(start: usize, values: &[u32]) -> Result<Self> {
        let (&first, _) = values
            .split_first()
            .ok_or_else(|| Error::Input("a step array needs at least one value".into()))?;
        let mut steps = BitSeq::with_capacity(values.len() - 1);
        for (k, w) in values.windows(2).enumerate() {
            match w[1].checked_sub(w[0]) {
                Some(0) => steps.push(false),
                Some(1) => steps.push(true),
                _ => {
                    return Err(Error::Validation(format!(
                        "values {} -> {} at index {} are not a unit step",
                        w[0],
                        w[1],
                        start + k + 1
                    )))
                }
            }
        }
        Ok(StepArray::from_parts(start, first, steps))
    }

    /// Same as [`StepArray::from_values`] for signed values, which must be nonnegative.
    pub fn from_signed(start: usize, values: &[i64]) -> Result<Self> {
        let vals: Vec<u32> = values
            .iter()
            .map(|&v| {
                u32::try_from(v).map_err(|_| Error::Validation(format!("value {v} is not a count")))
            })
            .collect::<Result<_>>()?;
        StepArray::from_values(start, &vals)
    }

    /// Encodes `values[k] + add` at index `start + k`, packing increments a word at a time.
    pub(crate) fn from_run(start: usize, values: &[i32], add: i64) -> Result<Self> {
        let (&first, _) = values
            .split_first()
            .ok_or_else(|| Error::Input("a step array needs at least one value".into()))?;
        let base = u32::try_from(first as i64 + add)
            .map_err(|_| Error::Validation(format!("value {} is not a count", first as i64 + add)))?;
        let len = values.len() - 1;
        let mut words = vec![0u64; len.div_ceil(64)];
        let mut bad = false;
        for (k, w) in values.windows(2).enumerate() {
            let d = w[1].wrapping_sub(w[0]);
            bad |= d as u32 > 1;
            words[k / 64] |= ((d & 1) as u64) << (k % 64);
        }
        if bad {
            return Err(Error::Validation("values are not a unit-step sequence".into()));
        }
        Ok(StepArray::from_parts(start, base, BitSeq::from_words(words, len)?))
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.start + self.steps.len()
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn steps(&self) -> &BitSeq {
        self.steps.bits()
    }

    pub fn rank_index(&self) -> &RankIndex {
        &self.steps
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= self.start && i <= self.end()
    }

    pub fn value(&self, i: usize) -> Result<u32> {
        self.get(i).ok_or(Error::Range {
            index: i,
            lo: self.start,
            hi: self.end(),
        })
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<u32> {
        if self.contains(i) {
            Some(self.base + self.steps.rank_unchecked(i - self.start) as u32)
        } else {
            None
        }
    }

    pub fn last(&self) -> u32 {
        self.base + self.steps.blocks.last().copied().unwrap_or(0)
    }

    /// All values `start..=end` in order.
    pub fn decode(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut v = self.base;
        out.push(v);
        for b in self.steps.bits().iter() {
            v += b as u32;
            out.push(v);
        }
        out
    }

    /// `c + self(i - offset)`, defined on `start + offset..=end + offset`.
    pub fn shift_add(&self, offset: usize, c: u32) -> StepArray {
        StepArray {
            start: self.start + offset,
            base: self.base + c,
            steps: self.steps.clone(),
        }
    }

    /// The same values restricted to `from..=end`.
    pub fn restrict_from(&self, from: usize) -> Result<StepArray> {
        let base = self.value(from)?;
        let bits = self.steps().slice(from - self.start, self.steps.len());
        Ok(StepArray::from_parts(from, base, bits))
    }

    fn merge_with(&self, other: &StepArray, extend: bool, pick: fn(u32, u32) -> u32) -> Result<Self> {
        if self.start != other.start || (!extend && self.end() != other.end()) {
            return Err(Error::Shape(format!(
                "domains {}..={} and {}..={} differ",
                self.start,
                self.end(),
                other.start,
                other.end()
            )));
        }
        let end = self.end().max(other.end());
        let (la, lb) = (self.last(), other.last());
        let vals: Vec<u32> = (self.start..=end)
            .map(|i| pick(self.get(i).unwrap_or(la), other.get(i).unwrap_or(lb)))
            .collect();
        StepArray::from_values(self.start, &vals)
    }

    /// Entry-wise maximum. Domains must match; with `extend` the shorter
    /// array is continued with its last value.
    pub fn pointwise_max(&self, other: &StepArray, extend: bool) -> Result<Self> {
        self.merge_with(other, extend, u32::max)
    }

    /// Entry-wise minimum, same domain rules as [`StepArray::pointwise_max`].
    pub fn pointwise_min(&self, other: &StepArray, extend: bool) -> Result<Self> {
        self.merge_with(other, extend, u32::min)
    }

    /// Bytes this array occupies when serialized: increment bits plus one base word.
    pub fn payload_bytes(&self) -> usize {
        self.steps.len().div_ceil(8) + std::mem::size_of::<u32>()
    }
}

impl fmt::Debug for StepArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepArray[{}..={}]{:?}", self.start, self.end(), self.decode())
    }
}

/// Key bits allowed for the block table.
const BLOCK_KEY_BITS: usize = 15;
const MAX_ROWS: usize = 6;

/// Lookup tables over chunk bit patterns.
///
/// `chunk_bits` (s) lanes of window lengths are advanced together, and
/// `rows` (h) consecutive split offsets are folded into one block lookup.
/// The block table takes `h - 1` bits from the left operand and
/// `h + s - 2` bits from the right operand; the row count is the largest
/// value keeping the key within 15 bits.
#[derive(Clone)]
pub struct ChunkTable {
    chunk_bits: usize,
    rows: usize,
    popcount: Vec<u8>,
    extension: Vec<u8>,
    block: Vec<u8>,
}

impl ChunkTable {
    pub const DEFAULT_CHUNK_BITS: usize = 8;

    pub fn new(chunk_bits: usize) -> Result<Self> {
        if !(1..=16).contains(&chunk_bits) {
            return Err(Error::Config(format!(
                "chunk width must be in 1..=16, got {chunk_bits}"
            )));
        }
        let s = chunk_bits;
        let rows = ((BLOCK_KEY_BITS + 3 - s) / 2).clamp(1, MAX_ROWS);

        let popcount = (0..1u32 << s).map(|p| p.count_ones() as u8).collect();

        // prefix popcounts lane k = ones among the first k bits of an (s - 1)-bit pattern
        let mut extension = Vec::with_capacity(s << (s - 1));
        for p in 0..1u32 << (s - 1) {
            for k in 0..s {
                extension.push((p & low_mask(k)).count_ones() as u8);
            }
        }

        let lbits = rows - 1;
        let rbits = rows + s - 2;
        let mut block = vec![0u8; s << (lbits + rbits)];
        for key in 0..1u32 << (lbits + rbits) {
            let l = key & low_mask(lbits);
            let r = key >> lbits;
            let lane = &mut block[key as usize * s..(key as usize + 1) * s];
            for (k, out) in lane.iter_mut().enumerate() {
                *out = (0..rows)
                    .map(|t| (l & low_mask(t)).count_ones() + (r & low_mask(rows - 1 - t + k)).count_ones())
                    .max()
                    .unwrap() as u8;
            }
        }

        Ok(ChunkTable {
            chunk_bits,
            rows,
            popcount,
            extension,
            block,
        })
    }

    pub fn chunk_bits(&self) -> usize {
        self.chunk_bits
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Width of the left operand in a block key.
    pub fn left_bits(&self) -> usize {
        self.rows - 1
    }

    /// Width of the right operand in a block key.
    pub fn right_bits(&self) -> usize {
        self.rows + self.chunk_bits - 2
    }

    pub fn popcount(&self, pattern: u32) -> u8 {
        self.popcount[pattern as usize]
    }

    /// Prefix popcounts `[pop_0, .., pop_{s-1}]` of an `(s - 1)`-bit pattern.
    pub fn extension(&self, pattern: u32) -> &[u8] {
        let s = self.chunk_bits;
        &self.extension[pattern as usize * s..(pattern as usize + 1) * s]
    }

    /// Lane `k` holds `max_t pop_t(left) + pop_{h - 1 - t + k}(right)` over `t < h`.
    #[inline]
    pub fn block(&self, left: u64, right: u64) -> &[u8] {
        let key = (left | (right << (self.rows - 1))) as usize;
        let s = self.chunk_bits;
        &self.block[key * s..(key + 1) * s]
    }

    pub(crate) fn block_table(&self) -> &[u8] {
        &self.block
    }

    /// Total bytes held by all tables.
    pub fn table_bytes(&self) -> usize {
        self.popcount.len() + self.extension.len() + self.block.len()
    }
}

impl Default for ChunkTable {
    fn default() -> Self {
        ChunkTable::new(Self::DEFAULT_CHUNK_BITS).expect("default chunk width is valid")
    }
}

impl fmt::Debug for ChunkTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChunkTable")
            .field("chunk_bits", &self.chunk_bits)
            .field("rows", &self.rows)
            .finish()
    }
}

#[inline]
fn low_mask(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}
