//! Per-node arrays of the best pattern anchored at a node.
//!
//! For a node `v` let `E_v[k]` be the extremal ones count over patterns of
//! size `k` inside `T_v` that contain `v`, with `E_v[0] = 0` standing for
//! "`v` not used". A real node combines its children as
//! `E_v = [0] ++ (col(v) + E_u * E_w)` where `*` is the extremal
//! (+)-convolution; a dummy is `E_u * E_w` unchanged. Only real nodes are
//! reported: a pattern topped by a dummy is not connected in the input tree.

use super::{binarize, BinTree, ColoredTree};
use crate::string_index::MinMaxIndex;

struct Arrays {
    max: Vec<i32>,
    min: Vec<i32>,
}

const UNIT: [i32; 1] = [0];

multiversion! {
    /// Extremal convolution of two anchored arrays, truncated to `limit + 1` entries.
    fn combine(a: &Arrays, b: &Arrays, limit: usize) -> Arrays {
        let len = (a.max.len() + b.max.len() - 1).min(limit + 1);
        let mut max = vec![i32::MIN; len];
        let mut min = vec![i32::MAX; len];
        for (x, (&ax, &an)) in a.max.iter().zip(&a.min).enumerate().take(len) {
            let top = (len - x).min(b.max.len());
            let (mx, mn) = (&mut max[x..x + top], &mut min[x..x + top]);
            for (m, &bx) in mx.iter_mut().zip(&b.max[..top]) {
                *m = (*m).max(ax + bx);
            }
            for (m, &bn) in mn.iter_mut().zip(&b.min[..top]) {
                *m = (*m).min(an + bn);
            }
        }
        Arrays { max, min }
    }
}

/// Runs the bottom-up recurrence with arrays truncated to `limit`, calling
/// `visit(v, arrays)` for every real node.
fn sweep(bt: &BinTree, limit: usize, mut visit: impl FnMut(&Arrays)) {
    let unit = Arrays {
        max: UNIT.to_vec(),
        min: UNIT.to_vec(),
    };
    let mut slots: Vec<Option<Arrays>> = (0..bt.len()).map(|_| None).collect();
    for v in (0..bt.len()).rev() {
        let a = bt.left(v).and_then(|u| slots[u].take());
        let b = bt.right(v).and_then(|u| slots[u].take());
        let merged = match (a, b) {
            (Some(a), Some(b)) => combine(&a, &b, limit),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => Arrays {
                max: unit.max.clone(),
                min: unit.min.clone(),
            },
        };
        let out = if bt.is_dummy(v) {
            merged
        } else {
            let c = bt.color(v) as i32;
            let take = merged.max.len().min(limit);
            let mut max = Vec::with_capacity(take + 1);
            let mut min = Vec::with_capacity(take + 1);
            max.push(0);
            min.push(0);
            max.extend(merged.max[..take].iter().map(|&m| m + c));
            min.extend(merged.min[..take].iter().map(|&m| m + c));
            let arr = Arrays { max, min };
            visit(&arr);
            arr
        };
        slots[v] = Some(out);
    }
}

/// Quadratic builder: extrema over all patterns, taken over every real node's anchored arrays.
pub fn build_anchored_arrays(bt: &BinTree) -> MinMaxIndex {
    let n = bt.real_count();
    let mut max = vec![0i32; n + 1];
    let mut min = vec![i32::MAX; n + 1];
    min[0] = 0;
    sweep(bt, n, |arr| {
        for k in 1..arr.max.len() {
            max[k] = max[k].max(arr.max[k]);
            min[k] = min[k].min(arr.min[k]);
        }
    });
    let max: Vec<u32> = max.into_iter().map(|v| v as u32).collect();
    let min: Vec<u32> = min.into_iter().map(|v| v as u32).collect();
    MinMaxIndex::from_values_unchecked(&min, &max)
}

/// Decides whether `(i, j)` appears in `t` with arrays capped at length `i`,
/// in `O(n * i)` time.
pub fn match_bounded(t: &ColoredTree, i: usize, j: usize) -> bool {
    if i == 0 {
        return j == 0;
    }
    if i > t.len() || j > i {
        return false;
    }
    let bt = binarize(t);
    let (mut hi, mut lo) = (i32::MIN, i32::MAX);
    sweep(&bt, i, |arr| {
        if let (Some(&x), Some(&m)) = (arr.max.get(i), arr.min.get(i)) {
            hi = hi.max(x);
            lo = lo.min(m);
        }
    });
    lo as i64 <= j as i64 && j as i64 <= hi as i64
}
