//! Extremal window counts pinned to a split position.
//!
//! Every merge in the tree and grammar builders reduces to a
//! (max, +) or (min, +) convolution of two unit-step arrays:
//!
//! ```text
//! R[i] = max { P[x] + Q[y] : x + y = i }
//! ```
//!
//! With `P` read as the ones in the last `x` bits left of a split and `Q`
//! as the ones in the first `y` bits right of it, `R` is exactly the best
//! ones count over windows that touch the split. The packed routine walks
//! the `(x, i)` grid in blocks of `rows` consecutive `x` by `chunk_bits`
//! consecutive `i` and resolves each block with one [`ChunkTable::block`]
//! lookup, so its cost is about `|P| * |Q| / (rows * chunk_bits)` plus a
//! linear pass. Minimum mode runs the same machinery on complemented
//! increments.

use crate::bitseq::{BitSeq, ChunkTable, StepArray};
use crate::error::{Error, Result};

/// Which extremum a window routine computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extremum {
    Max,
    Min,
}

/// A split string `left ∘ mid ∘ right`; the split position is `left.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitString {
    pub left: BitSeq,
    pub mid: bool,
    pub right: BitSeq,
}

impl SplitString {
    pub fn new(left: BitSeq, mid: bool, right: BitSeq) -> Self {
        SplitString { left, mid, right }
    }

    pub fn len(&self) -> usize {
        self.left.len() + 1 + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn split_position(&self) -> usize {
        self.left.len()
    }
}

/// Below this shorter-side length the direct double loop is used; the
/// block walk cannot amortise its setup there.
const DIRECT_CUTOFF: usize = 12;

fn prefix_counts(bits: &BitSeq) -> Vec<i32> {
    bits.prefix_counts()
}

/// `R[i] = max_{x+y=i} pop(a[..x]) + pop(b[..y])` for `i` in `from..=|a|+|b|`,
/// returned as values for `from..`, by the direct double loop.
pub(crate) fn max_conv_direct(a: &BitSeq, b: &BitSeq, from: usize) -> Vec<i32> {
    let pa = prefix_counts(a);
    let pb = prefix_counts(b);
    let total = a.len() + b.len();
    let mut out = vec![i32::MIN; total + 1 - from.min(total + 1)];
    direct_rows(&pa, &pb, from, &mut out);
    out
}

multiversion! {
    fn direct_rows(pa: &[i32], pb: &[i32], from: usize, out: &mut [i32]) {
        for (x, &px) in pa.iter().enumerate() {
            let ylo = from.saturating_sub(x);
            if ylo >= pb.len() {
                continue;
            }
            for (o, &qy) in out[x + ylo - from..].iter_mut().zip(&pb[ylo..]) {
                *o = (*o).max(px + qy);
            }
        }
    }
}

/// Packed counterpart of [`max_conv_direct`].
pub(crate) fn max_conv_packed(a: &BitSeq, b: &BitSeq, from: usize, table: &ChunkTable) -> Vec<i32> {
    // keep the row side short
    if a.len() > b.len() {
        return max_conv_packed(b, a, from, table);
    }
    let (na, nb) = (a.len(), b.len());
    let total = na + nb;
    if from > total {
        return Vec::new();
    }
    let s = table.chunk_bits();
    let h = table.rows();
    let lw = table.left_bits();
    let rw = table.right_bits();

    // Left keys and prefix counts per row block; x offsets are always
    // multiples of h.
    let pa = prefix_counts(a);
    let row_blocks = na / h + 1;
    let mut lkey = Vec::with_capacity(row_blocks);
    let mut lbase = Vec::with_capacity(row_blocks);
    for r in 0..row_blocks {
        lkey.push(a.get_bits(r * h, lw) as u32);
        lbase.push(pa[r * h]);
    }
    // right operand padded below with ones and above with zeros; see the
    // module tests for why padded cells never beat a real cell
    let pad = h + s;
    let mut padded = BitSeq::ones(pad);
    padded.extend_from(b);
    padded.extend_from(&BitSeq::zeros(pad));
    let span = nb + 2 * pad;
    // inside the ones padding the count goes negative, past the end it stays flat
    let mut rbase = prefix_counts(&padded);
    rbase.truncate(span);
    rbase.iter_mut().for_each(|c| *c -= pad as i32);
    let mask = (1u64 << rw) - 1;
    let words = padded.words();
    let mut rkey = Vec::with_capacity(span + 64);
    for (k, &cur) in words.iter().enumerate() {
        let pair = cur as u128 | (words.get(k + 1).copied().unwrap_or(0) as u128) << 64;
        rkey.extend((0..64).map(|off| (((pair >> off) as u64 & mask) as u32) << lw));
    }
    rkey.truncate(span);
    let walk = Walk {
        table,
        lkey: &lkey,
        lbase: &lbase,
        rkey: &rkey,
        rbase: &rbase,
        h,
        pad,
        na,
        nb,
    };
    let mut out = vec![i32::MIN; total + 1 - from];
    match s {
        8 => walk8(&walk, from, total, &mut out),
        4 => walk4(&walk, from, total, &mut out),
        _ => walk.run_dyn(from, total, &mut out),
    }
    out
}

multiversion! {
    fn walk8(w: &Walk, from: usize, total: usize, out: &mut [i32]) {
        w.run::<8>(from, total, out)
    }
}

multiversion! {
    fn walk4(w: &Walk, from: usize, total: usize, out: &mut [i32]) {
        w.run::<4>(from, total, out)
    }
}

struct Walk<'a> {
    table: &'a ChunkTable,
    lkey: &'a [u32],
    lbase: &'a [i32],
    rkey: &'a [u32],
    rbase: &'a [i32],
    h: usize,
    pad: usize,
    na: usize,
    nb: usize,
}

impl Walk<'_> {
    /// Row blocks meeting lane block `i0..i0 + s`, and the padded right
    /// position paired with the first of them.
    #[inline]
    fn rows(&self, i0: usize, s: usize) -> (usize, usize, usize) {
        let h = self.h;
        let lo = i0 as isize - (h as isize - 1) - self.nb as isize;
        let r_first = if lo <= 0 { 0 } else { lo as usize / h };
        let r_last = self.na.min(i0 + s - 1) / h;
        let p_first = i0 + self.pad + 1 - h - r_first * h;
        (r_first, r_last, p_first)
    }

    #[inline(always)]
    fn run<const S: usize>(&self, from: usize, total: usize, out: &mut [i32]) {
        assert_eq!(S, self.table.chunk_bits(), "lane count must match the table");
        let block = self.table.block_table();
        let h = self.h;
        for ib in from / S..=total / S {
            let i0 = ib * S;
            let (r_first, r_last, p) = self.rows(i0, S);
            let rows = r_last + 1 - r_first;
            let p_last = p + h - rows * h;
            let mut lanes = [i32::MIN; S];
            let left = self.lkey[r_first..=r_last].iter().zip(&self.lbase[r_first..=r_last]);
            let right = self.rkey[p_last..=p].iter().rev().step_by(h).zip(self.rbase[p_last..=p].iter().rev().step_by(h));
            for ((&lk, &lb), (&rk, &rb)) in left.zip(right) {
                let key = (lk | rk) as usize;
                let base = lb + rb;
                debug_assert!(key * S + S <= block.len());
                // SAFETY: both key halves are masked to the table's key width,
                // so `key` indexes an entry of `block`.
                let e: &[u8; S] = unsafe { &*(block.as_ptr().add(key * S) as *const [u8; S]) };
                for k in 0..S {
                    lanes[k] = lanes[k].max(base + e[k] as i32);
                }
            }
            for (k, &v) in lanes.iter().enumerate() {
                let i = i0 + k;
                if i >= from && i <= total {
                    out[i - from] = v;
                }
            }
        }
    }

    fn run_dyn(&self, from: usize, total: usize, out: &mut [i32]) {
        let s = self.table.chunk_bits();
        let block = self.table.block_table();
        let mut lanes = vec![i32::MIN; s];
        for ib in from / s..=total / s {
            let i0 = ib * s;
            let (r_first, r_last, mut p) = self.rows(i0, s);
            lanes.iter_mut().for_each(|l| *l = i32::MIN);
            for r in r_first..=r_last {
                let key = (self.lkey[r] | self.rkey[p]) as usize;
                let base = self.lbase[r] + self.rbase[p];
                for (l, &e) in lanes.iter_mut().zip(&block[key * s..key * s + s]) {
                    *l = (*l).max(base + e as i32);
                }
                p = p.wrapping_sub(self.h);
            }
            for (k, &v) in lanes.iter().enumerate() {
                let i = i0 + k;
                if i >= from && i <= total {
                    out[i - from] = v;
                }
            }
        }
    }
}

fn max_conv(a: &BitSeq, b: &BitSeq, from: usize, table: &ChunkTable) -> Vec<i32> {
    if a.len().min(b.len()) < DIRECT_CUTOFF {
        max_conv_direct(a, b, from)
    } else {
        max_conv_packed(a, b, from, table)
    }
}

/// Values of the max-convolution of `p` and `q`, starting at `p.start() + q.start()`.
pub(crate) fn max_conv_values(p: &StepArray, q: &StepArray, table: &ChunkTable) -> Vec<i32> {
    let base = (p.base() + q.base()) as i32;
    let mut v = max_conv(p.steps(), q.steps(), 0, table);
    v.iter_mut().for_each(|x| *x += base);
    v
}

/// Extremal `(+)`-convolution of two step arrays:
/// `R[i] = ext { p(x) + q(y) : x + y = i }` over `p.start + q.start ..= p.end + q.end`.
pub fn convolve(p: &StepArray, q: &StepArray, mode: Extremum, table: &ChunkTable) -> StepArray {
    let start = p.start() + q.start();
    let base = p.base() as i64 + q.base() as i64;
    let vals = match mode {
        Extremum::Max => max_conv(p.steps(), q.steps(), 0, table),
        Extremum::Min => {
            // p(x) = base + x' - pbar(x') with x' = x - start and pbar on complemented steps
            let pc = p.steps().complement();
            let qc = q.steps().complement();
            let mut v = max_conv(&pc, &qc, 0, table);
            for (k, x) in v.iter_mut().enumerate() {
                *x = k as i32 - *x;
            }
            v
        }
    };
    StepArray::from_run(start, &vals, base).expect("convolution of unit-step arrays is unit-step")
}

/// Reference convolution by explicit enumeration of index pairs.
pub fn convolve_direct(p: &StepArray, q: &StepArray, mode: Extremum) -> StepArray {
    let pv = p.decode();
    let qv = q.decode();
    let mut out: Vec<Option<u32>> = vec![None; pv.len() + qv.len() - 1];
    for (x, &a) in pv.iter().enumerate() {
        for (y, &b) in qv.iter().enumerate() {
            let slot = &mut out[x + y];
            let v = a + b;
            *slot = Some(match (*slot, mode) {
                (None, _) => v,
                (Some(c), Extremum::Max) => c.max(v),
                (Some(c), Extremum::Min) => c.min(v),
            });
        }
    }
    let vals: Vec<u32> = out.into_iter().map(Option::unwrap).collect();
    StepArray::from_values(p.start() + q.start(), &vals).expect("unit-step")
}

/// Ones in the last `x` bits of `bits`, for `x` in `0..=len`.
fn suffix_array(bits: &BitSeq) -> StepArray {
    StepArray::from_parts(0, 0, bits.reversed())
}

fn prefix_array(bits: &BitSeq) -> StepArray {
    StepArray::from_parts(0, 0, bits.clone())
}

/// Extremal ones count over all windows of `sv` that contain the split
/// position, indexed by window length `1..=|sv|`.
pub fn split_window_extrema(sv: &SplitString, table: &ChunkTable, mode: Extremum) -> StepArray {
    let conv = convolve(&suffix_array(&sv.left), &prefix_array(&sv.right), mode, table);
    conv.shift_add(1, sv.mid as u32)
}

/// Extremal ones count over windows of `x ∘ y` that contain both the last
/// position of `x` and the first position of `y`, indexed by length
/// `2..=|x|+|y|`.
pub fn split_edge_extrema(x: &BitSeq, y: &BitSeq, table: &ChunkTable, mode: Extremum) -> Result<StepArray> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Input("both sides of an edge window must be nonempty".into()));
    }
    let left = suffix_array(x).restrict_from(1)?;
    let right = prefix_array(y).restrict_from(1)?;
    Ok(convolve(&left, &right, mode, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn bits(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    /// Brute force over all windows `[p, p + len)` of `text` covering `must`.
    fn brute(text: &[bool], must: &[usize], len: usize, mode: Extremum) -> Option<u32> {
        let mut best = None;
        for p in 0..=text.len().saturating_sub(len) {
            if p + len > text.len() || !must.iter().all(|&m| m >= p && m < p + len) {
                continue;
            }
            let ones = text[p..p + len].iter().filter(|&&b| b).count() as u32;
            best = Some(match (best, mode) {
                (None, _) => ones,
                (Some(b), Extremum::Max) => ones.max(b),
                (Some(b), Extremum::Min) => ones.min(b),
            });
        }
        best
    }

    #[test]
    fn split_window_example() {
        let t = ChunkTable::default();
        let sv = SplitString::new(bits("1"), false, bits("1"));
        let r = split_window_extrema(&sv, &t, Extremum::Max);
        assert_eq!((r.start(), r.end()), (1, 3));
        assert_eq!((1..=3).map(|i| r.get(i).unwrap()).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn split_window_empty_left_is_prefix_extrema() {
        let t = ChunkTable::default();
        let right = bits("0110100111");
        for mode in [Extremum::Max, Extremum::Min] {
            for mid in [false, true] {
                let r = split_window_extrema(&SplitString::new(BitSeq::new(), mid, right.clone()), &t, mode);
                let mut acc = mid as u32;
                assert_eq!(r.get(1), Some(acc));
                for (k, b) in right.iter().enumerate() {
                    acc += b as u32;
                    assert_eq!(r.get(k + 2), Some(acc));
                }
            }
        }
    }

    #[test]
    fn split_edge_examples() {
        let t = ChunkTable::default();
        let r = split_edge_extrema(&bits("1"), &bits("1"), &t, Extremum::Max).unwrap();
        assert_eq!((r.start(), r.get(2)), (2, Some(2)));
        let r = split_edge_extrema(&bits("10"), &bits("01"), &t, Extremum::Max).unwrap();
        assert_eq!((2..=4).map(|i| r.get(i).unwrap()).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(split_edge_extrema(&BitSeq::new(), &bits("1"), &t, Extremum::Max).is_err());
    }

    #[test]
    fn split_windows_match_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let t = ChunkTable::default();
        for _ in 0..2000 {
            let la = rng.gen_range(0..=8);
            let lb = rng.gen_range(0..=8);
            let left: Vec<bool> = (0..la).map(|_| rng.gen_bool(0.5)).collect();
            let right: Vec<bool> = (0..lb).map(|_| rng.gen_bool(0.5)).collect();
            let mid = rng.gen_bool(0.5);
            let sv = SplitString::new(left.iter().copied().collect(), mid, right.iter().copied().collect());
            let mut text = left.clone();
            text.push(mid);
            text.extend(&right);
            for mode in [Extremum::Max, Extremum::Min] {
                let r = split_window_extrema(&sv, &t, mode);
                for len in 1..=text.len() {
                    assert_eq!(r.get(len), brute(&text, &[la], len, mode), "{text:?} len {len}");
                }
                if la > 0 && lb > 0 {
                    let e = split_edge_extrema(&sv.left, &sv.right, &t, mode).unwrap();
                    let mut xy = left.clone();
                    xy.extend(&right);
                    for len in 2..=xy.len() {
                        assert_eq!(e.get(len), brute(&xy, &[la - 1, la], len, mode));
                    }
                }
            }
        }
    }

    /// Packed and direct convolutions agree for every chunk width, including
    /// long operands where the padded block cells are exercised.
    #[test]
    fn packed_matches_direct() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let tables: Vec<ChunkTable> = [1, 2, 3, 5, 8, 11, 16].iter().map(|&s| ChunkTable::new(s).unwrap()).collect();
        for round in 0..300 {
            let la = rng.gen_range(0..120);
            let lb = rng.gen_range(0..120);
            let density = rng.gen_range(0.0..1.0);
            let a: BitSeq = (0..la).map(|_| rng.gen_bool(density)).collect();
            let b: BitSeq = (0..lb).map(|_| rng.gen_bool(density)).collect();
            let from = if round % 3 == 0 { rng.gen_range(0..=la + lb) } else { 0 };
            let direct = max_conv_direct(&a, &b, from);
            for t in &tables {
                assert_eq!(max_conv_packed(&a, &b, from, t), direct, "s={} la={la} lb={lb}", t.chunk_bits());
            }
        }
    }

    #[test]
    fn convolve_matches_direct_with_offsets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let t = ChunkTable::default();
        for _ in 0..300 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let len = rng.gen_range(0..60);
                let start = rng.gen_range(0..5);
                let base = rng.gen_range(0..4);
                StepArray::from_parts(start, base, (0..len).map(|_| rng.gen_bool(0.4)).collect())
            };
            let p = mk(&mut rng);
            let q = mk(&mut rng);
            for mode in [Extremum::Max, Extremum::Min] {
                assert_eq!(convolve(&p, &q, mode, &t), convolve_direct(&p, &q, mode));
            }
        }
    }
}
