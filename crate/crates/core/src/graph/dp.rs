//! Dynamic program over a nice tree decomposition.
//!
//! For a node with bag `X` and processed subgraph `G_X`, a table entry is a
//! labelling of `X`: label 0 marks vertices left out, and two included
//! vertices share a label iff they are connected inside the chosen vertex
//! set of `G_X`. Every component of the chosen set must meet `X`. The entry
//! holds all `(white, black)` counts of chosen sets with that labelling.

use std::collections::HashMap;

use super::decomp::{min_fill_decomposition, to_nice, NiceKind, NiceTreeDecomp, TreeDecomp};
use super::ColoredGraph;
use crate::error::{Error, Result};
use crate::oracle::QuerySet;

/// Labels of the bag vertices in bag order: 0 = excluded, classes numbered
/// `1..` by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u8>);

impl Partition {
    /// Relabels classes by first occurrence, keeping 0 fixed.
    pub fn canonical(labels: &[u8]) -> Partition {
        let mut map = [0u8; 256];
        let mut next = 0u8;
        let out = labels
            .iter()
            .map(|&l| {
                if l == 0 {
                    return 0;
                }
                if map[l as usize] == 0 {
                    next += 1;
                    map[l as usize] = next;
                }
                map[l as usize]
            })
            .collect();
        Partition(out)
    }

    pub fn labels(&self) -> &[u8] {
        &self.0
    }

    /// Number of included classes.
    pub fn classes(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0) as usize
    }
}

/// Set of `(white, black)` pairs with both coordinates at most `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSet {
    stride: usize,
    words: Vec<u64>,
}

impl CountSet {
    pub fn empty(bound: usize) -> Self {
        let stride = bound + 1;
        CountSet {
            stride,
            words: vec![0; (stride * stride).div_ceil(64)],
        }
    }

    fn slot(&self, white: usize, black: usize) -> usize {
        assert!(white < self.stride && black < self.stride, "count ({white}, {black}) out of bound");
        white * self.stride + black
    }

    pub fn insert(&mut self, white: usize, black: usize) {
        let k = self.slot(white, black);
        self.words[k / 64] |= 1 << (k % 64);
    }

    pub fn contains(&self, white: usize, black: usize) -> bool {
        white < self.stride && black < self.stride && {
            let k = self.slot(white, black);
            self.words[k / 64] >> (k % 64) & 1 == 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let stride = self.stride;
        self.words.iter().enumerate().flat_map(move |(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                let s = k * 64 + b;
                Some((s / stride, s % stride))
            })
        })
    }

    pub fn union_with(&mut self, other: &CountSet) {
        for (a, &b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Every count shifted by `(dw, db)`; shifted counts must stay in bound.
    pub fn shifted(&self, dw: usize, db: usize) -> CountSet {
        let mut out = CountSet::empty(self.stride - 1);
        out.or_shifted(self, dw * self.stride + db);
        out
    }

    /// `self |= other << by` on the flat slot numbering.
    fn or_shifted(&mut self, other: &CountSet, by: usize) {
        let (wq, bq) = (by / 64, by % 64);
        for (k, &w) in other.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            if let Some(dst) = self.words.get_mut(k + wq) {
                *dst |= w << bq;
            }
            if bq > 0 {
                if let Some(dst) = self.words.get_mut(k + wq + 1) {
                    *dst |= w >> (64 - bq);
                }
            }
        }
    }

    /// `{a + b - (sw, sb)}` over `a` in `self`, `b` in `other`.
    fn sumset_minus(&self, other: &CountSet, sw: usize, sb: usize) -> CountSet {
        let mut out = CountSet::empty(self.stride - 1);
        for (w, b) in self.iter() {
            out.or_shifted(other, (w - sw) * self.stride + (b - sb));
        }
        out
    }
}

/// Table of one nice node: its sorted bag and counts per partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagTable {
    bag: Vec<usize>,
    bound: usize,
    entries: HashMap<Partition, CountSet>,
}

impl BagTable {
    pub fn bag(&self) -> &[usize] {
        &self.bag
    }

    pub fn entries(&self) -> &HashMap<Partition, CountSet> {
        &self.entries
    }

    pub fn get(&self, p: &Partition) -> Option<&CountSet> {
        self.entries.get(p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn add(&mut self, p: Partition, counts: CountSet) {
        match self.entries.get_mut(&p) {
            Some(c) => c.union_with(&counts),
            None => {
                self.entries.insert(p, counts);
            }
        }
    }

    /// Counts of entries with exactly one class; those sets are connected.
    pub fn connected_counts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries
            .iter()
            .filter(|(p, _)| p.classes() == 1)
            .flat_map(|(_, c)| c.iter())
    }
}

fn color_step(g: &ColoredGraph, v: usize) -> (usize, usize) {
    if g.color(v) == 1 {
        (0, 1)
    } else {
        (1, 0)
    }
}

/// Leaf bag `{v}`: `v` left out with counts `(0, 0)`, or taken alone.
pub fn dp_leaf(g: &ColoredGraph, v: usize) -> BagTable {
    let bound = g.len();
    let mut t = BagTable {
        bag: vec![v],
        bound,
        entries: HashMap::new(),
    };
    let mut out = CountSet::empty(bound);
    out.insert(0, 0);
    let (w, b) = color_step(g, v);
    let mut inside = CountSet::empty(bound);
    inside.insert(w, b);
    t.add(Partition(vec![0]), out);
    t.add(Partition(vec![1]), inside);
    t
}

/// Drops `v` from the bag. A class that held only `v` is closed for good,
/// which is only consistent when nothing else is included.
pub fn dp_forget(child: &BagTable, v: usize) -> Result<BagTable> {
    let at = child
        .bag
        .binary_search(&v)
        .map_err(|_| Error::Shape(format!("vertex {v} is not in the bag")))?;
    let mut bag = child.bag.clone();
    bag.remove(at);
    let mut t = BagTable {
        bag,
        bound: child.bound,
        entries: HashMap::new(),
    };
    for (p, counts) in &child.entries {
        let l = p.0[at];
        if l != 0 && p.0.iter().filter(|&&x| x == l).count() == 1 {
            // closed component; reported by connected_counts on the child
            continue;
        }
        let mut labels = p.0.clone();
        labels.remove(at);
        t.add(Partition::canonical(&labels), counts.clone());
    }
    Ok(t)
}

/// Adds `v` to the bag, either left out or joined with every class that
/// holds one of its neighbors (a new class if none does).
pub fn dp_introduce(child: &BagTable, g: &ColoredGraph, v: usize) -> Result<BagTable> {
    let at = match child.bag.binary_search(&v) {
        Ok(_) => return Err(Error::Shape(format!("vertex {v} is already in the bag"))),
        Err(at) => at,
    };
    let mut bag = child.bag.clone();
    bag.insert(at, v);
    let adjacent: Vec<bool> = child.bag.iter().map(|&u| g.has_edge(u, v)).collect();
    let (w, b) = color_step(g, v);
    let mut t = BagTable {
        bag,
        bound: child.bound,
        entries: HashMap::new(),
    };
    for (p, counts) in &child.entries {
        let mut out = p.0.clone();
        out.insert(at, 0);
        t.add(Partition(out), counts.clone());

        let touched: Vec<u8> = p.0.iter().zip(&adjacent).filter(|&(&l, &a)| a && l != 0).map(|(&l, _)| l).collect();
        let fresh = u8::try_from(p.classes() + 1).map_err(|_| Error::Config("bag too wide".into()))?;
        let mut labels: Vec<u8> = p.0.iter().map(|&l| if touched.contains(&l) { fresh } else { l }).collect();
        labels.insert(at, fresh);
        t.add(Partition::canonical(&labels), counts.shifted(w, b));
    }
    Ok(t)
}

/// Combines two tables over the same bag. Only entries with the same
/// excluded set meet; classes merge when linked on either side, and the
/// shared included vertices are counted once.
pub fn dp_join(left: &BagTable, right: &BagTable, g: &ColoredGraph) -> Result<BagTable> {
    if left.bag != right.bag {
        return Err(Error::Shape("join of tables over different bags".into()));
    }
    let k = left.bag.len();
    let mut by_mask: HashMap<Vec<bool>, Vec<(&Partition, &CountSet)>> = HashMap::new();
    for (p, c) in &right.entries {
        by_mask.entry(p.0.iter().map(|&l| l != 0).collect()).or_default().push((p, c));
    }
    let mut t = BagTable {
        bag: left.bag.clone(),
        bound: left.bound,
        entries: HashMap::new(),
    };
    let mut parent: Vec<usize> = Vec::with_capacity(k);
    for (p, lc) in &left.entries {
        let mask: Vec<bool> = p.0.iter().map(|&l| l != 0).collect();
        let Some(partners) = by_mask.get(&mask) else {
            continue;
        };
        let (mut sw, mut sb) = (0, 0);
        for (&v, &inc) in left.bag.iter().zip(&mask) {
            if inc {
                let (w, b) = color_step(g, v);
                sw += w;
                sb += b;
            }
        }
        for &(q, rc) in partners {
            parent.clear();
            parent.extend(0..k);
            fn find(parent: &mut [usize], mut x: usize) -> usize {
                while parent[x] != x {
                    parent[x] = parent[parent[x]];
                    x = parent[x];
                }
                x
            }
            for side in [&p.0, &q.0] {
                let mut first = [usize::MAX; 256];
                for (pos, &l) in side.iter().enumerate() {
                    if l == 0 {
                        continue;
                    }
                    match first[l as usize] {
                        usize::MAX => first[l as usize] = pos,
                        f => {
                            let (a, b) = (find(&mut parent, f), find(&mut parent, pos));
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
            let labels: Vec<u8> = (0..k)
                .map(|pos| if mask[pos] { find(&mut parent, pos) as u8 + 1 } else { 0 })
                .collect();
            t.add(Partition::canonical(&labels), lc.sumset_minus(rc, sw, sb));
        }
    }
    Ok(t)
}

/// Runs the table recurrence over `nice`, returning every connected count
/// seen at any node.
pub fn run_dp(g: &ColoredGraph, nice: &NiceTreeDecomp) -> Result<QuerySet> {
    let nodes = nice.nodes();
    let mut tables: Vec<Option<BagTable>> = vec![None; nodes.len()];
    let mut out = QuerySet::new();
    let take = |tables: &mut Vec<Option<BagTable>>, c: usize| tables[c].take().expect("children are built first");
    for (k, node) in nodes.iter().enumerate() {
        let table = match node.kind {
            NiceKind::Leaf(v) => dp_leaf(g, v),
            NiceKind::Introduce(v) => dp_introduce(&take(&mut tables, node.children[0]), g, v)?,
            NiceKind::Forget(v) => dp_forget(&take(&mut tables, node.children[0]), v)?,
            NiceKind::Join => {
                let l = take(&mut tables, node.children[0]);
                let r = take(&mut tables, node.children[1]);
                dp_join(&l, &r, g)?
            }
        };
        for (w, b) in table.connected_counts() {
            out.insert(w, b);
        }
        tables[k] = Some(table);
    }
    Ok(out)
}

/// All `(white, black)` pairs of connected vertex sets, using `td`.
pub fn all_queries_with(g: &ColoredGraph, td: &TreeDecomp) -> Result<QuerySet> {
    td.validate(g)?;
    if g.is_empty() {
        return Ok(QuerySet::new());
    }
    let nice = to_nice(td)?;
    if nice.width() >= 255 {
        return Err(Error::Config(format!("decomposition width {} is too large", nice.width())));
    }
    run_dp(g, &nice)
}

/// All `(white, black)` pairs of connected vertex sets, one min-fill
/// decomposition per connected component.
pub fn all_queries(g: &ColoredGraph) -> Result<QuerySet> {
    let mut out = QuerySet::new();
    for comp in g.components() {
        let sub = g.induced(&comp)?;
        out.extend_from(&all_queries_with(&sub, &min_fill_decomposition(&sub))?);
    }
    Ok(out)
}
