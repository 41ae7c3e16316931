//! Brute-force reference answers.
//!
//! Nothing here calls into the builders; only [`BitSeq`] and the tree and
//! graph containers are shared, so the oracles can check the builders.

use std::collections::{BTreeMap, BTreeSet};

use crate::bitseq::BitSeq;
use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::string_index::MinMaxIndex;
use crate::tree::ColoredTree;

/// Largest tree [`tree_enum_oracle`] accepts.
pub const TREE_CAP: usize = 18;
/// Largest graph [`graph_enum_oracle`] accepts.
pub const GRAPH_CAP: usize = 14;

/// A finite set of achievable `(a, b)` pairs. For strings and trees the pair
/// is `(size, ones)`; for graphs it is `(white, black)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuerySet(BTreeSet<(usize, usize)>);

impl QuerySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        self.0.insert((a, b))
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.0.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairs in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied()
    }

    pub fn extend_from(&mut self, other: &QuerySet) {
        self.0.extend(other.iter());
    }

    /// Every `(size, ones)` pair an index admits, sizes `1..=n`.
    pub fn from_index(idx: &MinMaxIndex) -> QuerySet {
        let mut out = QuerySet::new();
        for i in 1..=idx.n() {
            let (lo, hi) = (idx.min_at(i).expect("in range"), idx.max_at(i).expect("in range"));
            for j in lo..=hi {
                out.insert(i, j as usize);
            }
        }
        out
    }
}

impl FromIterator<(usize, usize)> for QuerySet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        QuerySet(iter.into_iter().collect())
    }
}

fn bits_of(s: &BitSeq) -> Vec<u32> {
    s.iter().map(u32::from).collect()
}

/// Min and max ones per window length, by sliding a window of every length.
pub fn string_oracle(s: &BitSeq) -> Result<MinMaxIndex> {
    if s.is_empty() {
        return Err(Error::Input("cannot index an empty string".into()));
    }
    let b = bits_of(s);
    let n = b.len();
    let mut min = vec![0u32; n + 1];
    let mut max = vec![0u32; n + 1];
    for len in 1..=n {
        let mut c: u32 = b[..len].iter().sum();
        let (mut lo, mut hi) = (c, c);
        for p in len..n {
            c = c + b[p] - b[p - len];
            lo = lo.min(c);
            hi = hi.max(c);
        }
        min[len] = lo;
        max[len] = hi;
    }
    MinMaxIndex::from_values(&min, &max)
}

/// Same answers as [`string_oracle`], recounting every window from scratch.
pub fn string_oracle_recount(s: &BitSeq) -> Result<MinMaxIndex> {
    if s.is_empty() {
        return Err(Error::Input("cannot index an empty string".into()));
    }
    let n = s.len();
    let mut min = vec![u32::MAX; n + 1];
    let mut max = vec![0u32; n + 1];
    min[0] = 0;
    for start in 0..n {
        for end in start + 1..=n {
            let ones = (start..end).filter(|&p| s.get(p)).count() as u32;
            let len = end - start;
            min[len] = min[len].min(ones);
            max[len] = max[len].max(ones);
        }
    }
    MinMaxIndex::from_values(&min, &max)
}

/// Node masks of all connected node sets, grouped by `(size, black)`.
/// Each set is grown from its topmost node by choosing, for every child,
/// either nothing or a connected set topped by that child.
pub fn tree_occurrences(t: &ColoredTree) -> Result<BTreeMap<(usize, usize), Vec<u32>>> {
    let n = t.len();
    if n > TREE_CAP {
        return Err(Error::CapExceeded { size: n, cap: TREE_CAP });
    }
    let mut order = vec![t.root()];
    let mut k = 0;
    while k < order.len() {
        order.extend_from_slice(t.children(order[k]));
        k += 1;
    }
    let mut topped: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &v in order.iter().rev() {
        let mut sets = vec![1u32 << v];
        for &c in t.children(v) {
            let mut next = Vec::with_capacity(sets.len() * (topped[c].len() + 1));
            for &s in &sets {
                next.push(s);
                next.extend(topped[c].iter().map(|&x| s | x));
            }
            sets = next;
        }
        topped[v] = sets;
    }
    let black: u32 = (0..n).filter(|&v| t.color(v) == 1).map(|v| 1u32 << v).sum();
    let mut out: BTreeMap<(usize, usize), Vec<u32>> = BTreeMap::new();
    for sets in topped {
        for s in sets {
            let key = (s.count_ones() as usize, (s & black).count_ones() as usize);
            out.entry(key).or_default().push(s);
        }
    }
    Ok(out)
}

/// `(size, black)` pairs over all connected node sets of `t` (`n <= 18`).
pub fn tree_enum_oracle(t: &ColoredTree) -> Result<QuerySet> {
    Ok(tree_occurrences(t)?.into_keys().collect())
}

/// `(white, black)` pairs over all nonempty connected vertex sets of `g` (`n <= 14`).
pub fn graph_enum_oracle(g: &ColoredGraph) -> Result<QuerySet> {
    let n = g.len();
    if n > GRAPH_CAP {
        return Err(Error::CapExceeded { size: n, cap: GRAPH_CAP });
    }
    let nb: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&u| 1u32 << u).sum())
        .collect();
    let black: u32 = (0..n).filter(|&v| g.color(v) == 1).map(|v| 1u32 << v).sum();
    let mut out = QuerySet::new();
    for s in 1u32..1 << n {
        let mut reach = s & s.wrapping_neg();
        loop {
            let mut grow = reach;
            let mut r = reach;
            while r != 0 {
                let v = r.trailing_zeros() as usize;
                r &= r - 1;
                grow |= nb[v] & s;
            }
            if grow == reach {
                break;
            }
            reach = grow;
        }
        if reach == s {
            let b = (s & black).count_ones() as usize;
            out.insert(s.count_ones() as usize - b, b);
        }
    }
    Ok(out)
}
