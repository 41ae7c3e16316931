//! Micro-macro index construction.
//!
//! The binarized tree is cut into connected clusters of at most `cap`
//! nodes. Inside a cluster only two nodes may touch other clusters: its
//! top `t` (adjacent to the parent cluster, possibly also to child
//! clusters) and an optional bottom `b` (adjacent to child clusters only).
//! Each cluster is first solved in isolation with small explicit arrays;
//! the subtrees hanging below it enter through a few (max,+) convolutions
//! of step arrays, which is where the packed routine pays off.
//!
//! Per cluster, with `X` the combined anchored array of the clusters below
//! `b` and `Y` the one below `t`:
//!
//! ```text
//! pre_t  = in-cluster children part of t
//! pre_tb = same, restricted to patterns that reach b
//! A_C    = lift_t((max(pre_t, pre_tb * X)) * Y)
//! ```
//!
//! Patterns whose top lies strictly inside the cluster are either fully
//! in-cluster or reach `b`; the latter are `A_b * X` where `A_b` is the
//! in-cluster best through `b` over real tops on the `b`-to-`t` path.

use super::BinTree;
use crate::bitseq::{ChunkTable, StepArray};
use crate::error::{Error, Result};
use crate::string_index::{max_conv_values, MinMaxIndex};

/// `max(4, floor(log2 n))`.
pub fn default_cap(n: usize) -> usize {
    let lg = usize::BITS - 1 - n.max(1).leading_zeros();
    (lg as usize).max(4)
}

/// One micro tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// Binarized node ids, top first, parents before children.
    pub nodes: Vec<usize>,
    pub top: usize,
    pub bottom: Option<usize>,
    pub parent: Option<usize>,
    /// Clusters whose top is a child of `top`.
    pub top_children: Vec<usize>,
    /// Clusters whose top is a child of `bottom`.
    pub bottom_children: Vec<usize>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A partition of a binarized tree into clusters, listed children first.
#[derive(Clone, Debug)]
pub struct MicroMacro {
    cap: usize,
    clusters: Vec<Cluster>,
    cluster_of: Vec<usize>,
}

impl MicroMacro {
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.cluster_of[v]
    }

    pub fn root_cluster(&self) -> usize {
        self.clusters.len() - 1
    }

    /// Checks the partition, connectivity, size and boundary invariants against `bt`.
    pub fn validate(&self, bt: &BinTree) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        let mut seen = vec![false; bt.len()];
        for (id, c) in self.clusters.iter().enumerate() {
            if c.is_empty() || c.len() > self.cap {
                return bad(format!("cluster {id} has {} nodes, cap {}", c.len(), self.cap));
            }
            if c.nodes[0] != c.top {
                return bad(format!("cluster {id} does not list its top first"));
            }
            for &v in &c.nodes {
                if std::mem::replace(&mut seen[v], true) {
                    return bad(format!("node {v} is in two clusters"));
                }
                if self.cluster_of[v] != id {
                    return bad(format!("node {v} has a stale cluster id"));
                }
                let inside_parent = bt.parent(v).is_some_and(|p| self.cluster_of[p] == id);
                if (v == c.top) == inside_parent {
                    return bad(format!("cluster {id} is not rooted at its top"));
                }
            }
            let mut boundary: Vec<usize> = c
                .nodes
                .iter()
                .copied()
                .filter(|&v| v != c.top && bt.children(v).any(|u| self.cluster_of[u] != id))
                .collect();
            if boundary.len() > 1 {
                return bad(format!("cluster {id} has {} bottom boundary nodes", boundary.len()));
            }
            if boundary.pop() != c.bottom {
                return bad(format!("cluster {id} records a wrong bottom"));
            }
            let expect_parent = bt.parent(c.top).map(|p| self.cluster_of[p]);
            if expect_parent != c.parent {
                return bad(format!("cluster {id} records a wrong parent"));
            }
            if c.parent.is_some_and(|p| p <= id) {
                return bad(format!("cluster {id} is listed after its parent"));
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return bad(format!("node {v} is in no cluster"));
        }
        Ok(())
    }
}

/// Greedy bottom-up clustering: a node absorbs both child clusters when
/// the result fits and keeps at most one bottom boundary; otherwise it
/// absorbs the better single child (fewest boundaries, then largest) and
/// closes the rest.
pub fn micro_macro_decompose(bt: &BinTree, cap: usize) -> Result<MicroMacro> {
    if cap == 0 {
        return Err(Error::Config("cluster cap must be at least 1".into()));
    }
    let n = bt.len();
    let mut size = vec![1usize; n];
    let mut ext = vec![0usize; n];
    let mut merged = vec![false; n];
    let mut closed_tops = Vec::new();
    for v in (0..n).rev() {
        let kids: Vec<usize> = bt.children(v).collect();
        let total: usize = 1 + kids.iter().map(|&c| size[c]).sum::<usize>();
        let total_ext: usize = kids.iter().map(|&c| ext[c]).sum();
        let mut take = |c: usize, size: &mut [usize], ext: &mut [usize]| {
            merged[c] = true;
            size[v] += size[c];
            ext[v] += ext[c];
        };
        if total <= cap && total_ext <= 1 {
            for &c in &kids {
                take(c, &mut size, &mut ext);
            }
            continue;
        }
        let best = kids
            .iter()
            .copied()
            .filter(|&c| size[c] < cap && ext[c] <= 1)
            .max_by_key(|&c| (ext[c] == 0, size[c]));
        if let Some(c) = best {
            take(c, &mut size, &mut ext);
        }
        for &c in &kids {
            if !merged[c] {
                closed_tops.push(c);
            }
        }
        ext[v] += 1;
    }
    closed_tops.push(bt.root());

    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters = Vec::with_capacity(closed_tops.len());
    for (id, &top) in closed_tops.iter().enumerate() {
        let mut nodes = Vec::new();
        let mut stack = vec![top];
        while let Some(v) = stack.pop() {
            nodes.push(v);
            cluster_of[v] = id;
            stack.extend(bt.children(v).filter(|&u| merged[u]));
        }
        nodes.sort_unstable();
        clusters.push(Cluster {
            nodes,
            top,
            bottom: None,
            parent: None,
            top_children: Vec::new(),
            bottom_children: Vec::new(),
        });
    }
    for id in 0..clusters.len() {
        let top = clusters[id].top;
        clusters[id].parent = bt.parent(top).map(|p| cluster_of[p]);
        let mut bottom = None;
        let mut top_children = Vec::new();
        let mut bottom_children = Vec::new();
        for &v in &clusters[id].nodes {
            for u in bt.children(v).filter(|&u| !merged[u]) {
                if v == top {
                    top_children.push(cluster_of[u]);
                } else {
                    if bottom.is_some_and(|b| b != v) {
                        return Err(Error::Validation(format!("cluster {id} got two bottom nodes")));
                    }
                    bottom = Some(v);
                    bottom_children.push(cluster_of[u]);
                }
            }
        }
        let c = &mut clusters[id];
        c.bottom = bottom;
        c.top_children = top_children;
        c.bottom_children = bottom_children;
    }
    Ok(MicroMacro {
        cap,
        clusters,
        cluster_of,
    })
}

/// Counters describing the work done by [`build_index_micro_macro`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub clusters: usize,
    pub max_cluster: usize,
    pub with_bottom: usize,
    /// Convolutions with both sides long enough for the packed routine.
    pub packed_merges: usize,
    pub direct_merges: usize,
    /// Sum of `|P| * |Q|` over packed merges.
    pub packed_cells: u64,
    /// Largest number of convolutions charged to one cluster.
    pub max_merges_per_cluster: usize,
}

const NEG: i32 = i32::MIN / 4;
const PACKED_MIN: usize = 12;

fn small_conv(a: &[i32], b: &[i32], out: &mut Vec<i32>) {
    out.clear();
    out.resize(a.len() + b.len() - 1, NEG);
    for (x, &p) in a.iter().enumerate() {
        if p <= NEG {
            continue;
        }
        for (o, &q) in out[x..].iter_mut().zip(b) {
            if q > NEG {
                *o = (*o).max(p + q);
            }
        }
    }
}

/// Finite suffix of `a` as a step array, or `None` if every entry is absent.
fn to_step(a: &[i32]) -> Option<StepArray> {
    let first = a.iter().position(|&x| x > NEG)?;
    Some(StepArray::from_run(first, &a[first..], 0).expect("anchored array is unit-step"))
}

/// `global[k] = max(global[k], vals[k - start])` for `k >= 1`.
fn fold_into(global: &mut [i32], start: usize, vals: &[i32]) {
    let from = start.max(1);
    for (g, &v) in global[from..].iter_mut().zip(&vals[from - start..]) {
        *g = (*g).max(v);
    }
}

struct Work<'a> {
    table: &'a ChunkTable,
    stats: MergeStats,
    merges_here: usize,
}

impl Work<'_> {
    /// Values of `p * q` from `p.start() + q.start()` on.
    fn conv_values(&mut self, p: &StepArray, q: &StepArray) -> (usize, Vec<i32>) {
        let (lp, lq) = (p.end() - p.start() + 1, q.end() - q.start() + 1);
        if lp.min(lq) >= PACKED_MIN {
            self.stats.packed_merges += 1;
            self.stats.packed_cells += (lp * lq) as u64;
        } else {
            self.stats.direct_merges += 1;
        }
        self.merges_here += 1;
        (p.start() + q.start(), max_conv_values(p, q, self.table))
    }

    fn conv(&mut self, p: &StepArray, q: &StepArray) -> StepArray {
        let (start, vals) = self.conv_values(p, q);
        StepArray::from_run(start, &vals, 0).expect("convolution of unit-step arrays is unit-step")
    }

    fn conv_all(&mut self, arrays: Vec<StepArray>) -> Option<StepArray> {
        let mut it = arrays.into_iter();
        let first = it.next()?;
        Some(it.fold(first, |acc, a| self.conv(&acc, &a)))
    }
}

/// In-cluster arrays live in one arena, addressed by `(offset, len)`.
#[derive(Default)]
struct Arena {
    data: Vec<i32>,
    e0: Vec<(usize, usize)>,
    e1: Vec<(usize, usize)>,
    tmp: Vec<i32>,
    tmp2: Vec<i32>,
}

impl Arena {
    fn get(&self, slot: (usize, usize)) -> &[i32] {
        &self.data[slot.0..slot.0 + slot.1]
    }

    /// Stores `lift(src)`: `[empty] ++ (col + src)` for real nodes, `src` for dummies.
    fn push_lifted(&mut self, from_tmp2: bool, real: Option<i32>, empty: i32) -> (usize, usize) {
        let off = self.data.len();
        let src = if from_tmp2 { &self.tmp2 } else { &self.tmp };
        match real {
            Some(c) => {
                self.data.push(empty);
                self.data.extend(src.iter().map(|&x| if x > NEG { x + c } else { NEG }));
            }
            None => self.data.extend_from_slice(src),
        }
        (off, self.data.len() - off)
    }
}

/// Max ones per pattern size for the colors of `bt`.
fn max_profile(bt: &BinTree, mm: &MicroMacro, work: &mut Work) -> Result<Vec<i32>> {
    let n = bt.real_count();
    let mut global = vec![NEG; n + 1];
    global[0] = 0;
    let mut full: Vec<Option<StepArray>> = vec![None; mm.clusters.len()];
    let mut local = vec![usize::MAX; bt.len()];
    let mut ar = Arena::default();
    let mut on_path = Vec::new();
    let mut through_b: Vec<i32> = Vec::new();
    for (id, c) in mm.clusters.iter().enumerate() {
        work.merges_here = 0;
        for (k, &v) in c.nodes.iter().enumerate() {
            local[v] = k;
        }
        on_path.clear();
        on_path.resize(c.len(), false);
        if let Some(b) = c.bottom {
            let mut x = b;
            while x != c.top {
                on_path[local[x]] = true;
                x = bt.parent(x).expect("bottom lies below top");
            }
        }
        ar.data.clear();
        ar.e0.clear();
        ar.e0.resize(c.len(), (0, 0));
        ar.e1.clear();
        ar.e1.resize(c.len(), (0, 0));
        through_b.clear();
        let (mut pre_t, mut pre_tb) = (Vec::new(), None::<Vec<i32>>);
        for k in (0..c.len()).rev() {
            let v = c.nodes[k];
            let mut kids = [usize::MAX; 2];
            let mut nk = 0;
            for u in bt.children(v) {
                if mm.cluster_of[u] == id {
                    kids[nk] = local[u];
                    nk += 1;
                }
            }
            let kids = &kids[..nk];
            // children part without the node itself
            match *kids {
                [] => {
                    ar.tmp.clear();
                    ar.tmp.push(0);
                }
                [u] => {
                    let s = ar.e0[u];
                    ar.tmp.clear();
                    ar.tmp.extend_from_slice(&ar.data[s.0..s.0 + s.1]);
                }
                [u, w] => {
                    let mut out = std::mem::take(&mut ar.tmp);
                    small_conv(ar.get(ar.e0[u]), ar.get(ar.e0[w]), &mut out);
                    ar.tmp = out;
                }
                _ => unreachable!("binary tree"),
            }
            let path_kid = kids.iter().copied().find(|&u| on_path[u]);
            let has_pre1 = Some(v) == c.bottom || path_kid.is_some();
            if let Some(p) = path_kid {
                let mut out = std::mem::take(&mut ar.tmp2);
                match kids.iter().copied().find(|&u| u != p) {
                    Some(o) => small_conv(ar.get(ar.e1[p]), ar.get(ar.e0[o]), &mut out),
                    None => {
                        out.clear();
                        out.extend_from_slice(ar.get(ar.e1[p]));
                    }
                }
                ar.tmp2 = out;
            } else if has_pre1 {
                ar.tmp2.clear();
                ar.tmp2.extend_from_slice(&ar.tmp);
            }
            if v == c.top {
                pre_t = ar.tmp.clone();
                pre_tb = has_pre1.then(|| ar.tmp2.clone());
                continue;
            }
            let real = (!bt.is_dummy(v)).then(|| bt.color(v) as i32);
            ar.e0[k] = ar.push_lifted(false, real, 0);
            if real.is_some() {
                let e = ar.e0[k];
                for (g, &x) in global[1..].iter_mut().zip(&ar.data[e.0 + 1..e.0 + e.1]) {
                    *g = (*g).max(x);
                }
            }
            if has_pre1 {
                ar.e1[k] = ar.push_lifted(true, real, NEG);
                if real.is_some() {
                    let e = ar.get(ar.e1[k]);
                    if through_b.len() < e.len() {
                        through_b.resize(e.len(), NEG);
                    }
                    for (t, &x) in through_b.iter_mut().zip(e) {
                        *t = (*t).max(x);
                    }
                }
            }
        }
        let mut take = |ids: &[usize]| -> Vec<StepArray> {
            ids.iter()
                .map(|&d| full[d].take().expect("child cluster is built before its parent"))
                .collect()
        };
        let x_arr = take(&c.bottom_children);
        let y_arr = take(&c.top_children);
        let x = work.conv_all(x_arr);
        let y = work.conv_all(y_arr);

        // values of the children part of t, from size 0
        let mut pre = pre_t;
        if let (Some(x), Some(tb)) = (&x, pre_tb.as_deref().and_then(to_step)) {
            let (rs, reach) = work.conv_values(&tb, x);
            pre.resize(pre.len().max(rs + reach.len()), NEG);
            for (m, &r) in pre[rs..].iter_mut().zip(&reach) {
                *m = (*m).max(r);
            }
        }
        if let Some(y) = &y {
            let p = StepArray::from_run(0, &pre, 0).expect("combined array is unit-step");
            pre = work.conv_values(&p, y).1;
        }
        let a_c = if bt.is_dummy(c.top) {
            StepArray::from_run(0, &pre, 0).expect("anchored array is unit-step")
        } else {
            let col = bt.color(c.top) as i32;
            let mut lifted = Vec::with_capacity(pre.len() + 1);
            lifted.push(0);
            lifted.extend(pre.iter().map(|&v| v + col));
            fold_into(&mut global, 0, &lifted);
            StepArray::from_run(0, &lifted, 0).expect("anchored array is unit-step")
        };
        if let (Some(x), Some(b_arr)) = (&x, to_step(&through_b)) {
            let (rs, reach) = work.conv_values(&b_arr, x);
            fold_into(&mut global, rs, &reach);
        }
        full[id] = Some(a_c);
        work.stats.max_merges_per_cluster = work.stats.max_merges_per_cluster.max(work.merges_here);
    }
    if let Some(k) = global.iter().position(|&g| g < 0) {
        return Err(Error::Validation(format!("no pattern of size {k} was assembled")));
    }
    Ok(global)
}

/// Micro-macro builder; answers every query exactly as [`super::build_anchored_arrays`].
pub fn build_index_micro_macro(bt: &BinTree, cap: usize, table: &ChunkTable) -> Result<(MinMaxIndex, MergeStats)> {
    let mm = micro_macro_decompose(bt, cap)?;
    let mut work = Work {
        table,
        stats: MergeStats {
            clusters: mm.clusters.len(),
            max_cluster: mm.clusters.iter().map(Cluster::len).max().unwrap_or(0),
            with_bottom: mm.clusters.iter().filter(|c| c.bottom.is_some()).count(),
            ..MergeStats::default()
        },
        merges_here: 0,
    };
    let ones = max_profile(bt, &mm, &mut work)?;
    let zeros = max_profile(&bt.complemented(), &mm, &mut work)?;
    let max: Vec<u32> = ones.iter().map(|&v| v as u32).collect();
    let min: Vec<u32> = zeros.iter().enumerate().map(|(k, &z)| (k as i32 - z) as u32).collect();
    let idx = MinMaxIndex::new(StepArray::from_values(0, &min)?, StepArray::from_values(0, &max)?)?;
    Ok((idx, work.stats))
}
