//! Centroid decomposition with one index per component, used to find a
//! node lying on some occurrence of a pattern.

use super::{ColoredTree, TreeBuilder};
use crate::bitseq::ChunkTable;
use crate::error::{Error, Result};
use crate::string_index::MinMaxIndex;

/// One component of the decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentroidNode {
    /// Centroid, as a node id of the indexed tree.
    pub centroid: usize,
    /// Nodes in the component.
    pub size: usize,
    /// Index over all patterns inside the component.
    pub index: MinMaxIndex,
    /// Positions of the child components in [`CentroidIndex::nodes`].
    pub children: Vec<usize>,
}

/// Components stored in preorder; entry 0 is the whole tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentroidIndex {
    nodes: Vec<CentroidNode>,
}

/// Result of a locator walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocateTrace {
    pub anchor: Option<usize>,
    /// Components inspected, the root included.
    pub steps: usize,
    /// Components on the path from the root to the anchor's component.
    pub levels: usize,
}

impl CentroidIndex {
    /// Rebuilds from preorder records `(centroid, size, index, child count)`.
    pub fn from_preorder(records: Vec<(usize, usize, MinMaxIndex, usize)>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Shape("a centroid index needs at least one component".into()));
        }
        let mut nodes: Vec<CentroidNode> = Vec::with_capacity(records.len());
        // (record, children still expected)
        let mut open: Vec<(usize, usize)> = Vec::new();
        for (pos, (centroid, size, index, kids)) in records.into_iter().enumerate() {
            if index.n() != size {
                return Err(Error::Validation(format!("component {pos} has size {size} but index over {}", index.n())));
            }
            match open.last_mut() {
                Some((parent, left)) => {
                    let parent = *parent;
                    *left -= 1;
                    if *left == 0 {
                        open.pop();
                    }
                    nodes[parent].children.push(pos);
                }
                None if pos > 0 => return Err(Error::Shape("records form more than one tree".into())),
                None => {}
            }
            nodes.push(CentroidNode {
                centroid,
                size,
                index,
                children: Vec::with_capacity(kids),
            });
            if kids > 0 {
                open.push((pos, kids));
            }
        }
        if !open.is_empty() {
            return Err(Error::Shape("records end before all child components".into()));
        }
        let idx = CentroidIndex { nodes };
        let total = idx.nodes.len();
        if total != idx.nodes[0].size {
            return Err(Error::Validation(format!(
                "{total} centroids for a tree of {} nodes",
                idx.nodes[0].size
            )));
        }
        Ok(idx)
    }

    pub fn nodes(&self) -> &[CentroidNode] {
        &self.nodes
    }

    pub fn root(&self) -> &CentroidNode {
        &self.nodes[0]
    }

    /// Number of indexed tree nodes.
    pub fn n(&self) -> usize {
        self.nodes[0].size
    }

    /// Whole-tree query.
    pub fn query(&self, i: usize, j: usize) -> bool {
        self.nodes[0].index.query(i, j)
    }

    /// Levels in the decomposition (1 for a single node).
    pub fn depth(&self) -> usize {
        let mut depth = vec![1usize; self.nodes.len()];
        for p in 0..self.nodes.len() {
            for &c in &self.nodes[p].children {
                depth[c] = depth[p] + 1;
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Walks down while some child component still contains `(i, j)`.
    pub fn locate(&self, i: usize, j: usize) -> LocateTrace {
        let mut cur = 0;
        let mut steps = 1;
        let mut levels = 1;
        if !self.nodes[0].index.query(i, j) {
            return LocateTrace {
                anchor: None,
                steps,
                levels,
            };
        }
        loop {
            let next = self.nodes[cur].children.iter().copied().find(|&c| {
                steps += 1;
                self.nodes[c].index.query(i, j)
            });
            match next {
                Some(c) => {
                    cur = c;
                    levels += 1;
                }
                None => {
                    return LocateTrace {
                        anchor: Some(self.nodes[cur].centroid),
                        steps,
                        levels,
                    }
                }
            }
        }
    }

    /// Stored increment bits over all components.
    pub fn payload_bytes(&self) -> usize {
        self.nodes.iter().map(|c| c.index.payload_bytes()).sum()
    }
}

fn centroid_in(adj: &[Vec<usize>], alive: &[bool], mark: &mut [u32], stamp: u32, start: usize) -> (usize, usize) {
    // BFS order gives parents before children; subtree sizes come from the reverse.
    let mut order = vec![start];
    let mut parent = vec![usize::MAX];
    mark[start] = stamp;
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        for &u in &adj[v] {
            if alive[u] && mark[u] != stamp {
                mark[u] = stamp;
                order.push(u);
                parent.push(k);
            }
        }
        k += 1;
    }
    let total = order.len();
    let mut sub = vec![1usize; total];
    let mut heavy = vec![0usize; total];
    for k in (1..total).rev() {
        let p = parent[k];
        sub[p] += sub[k];
        heavy[p] = heavy[p].max(sub[k]);
    }
    let best = (0..total)
        .min_by_key(|&k| heavy[k].max(total - sub[k]))
        .expect("component is nonempty");
    (order[best], total)
}

/// A node of the connected component `component` of `t` whose removal
/// leaves pieces of at most half the component's size.
pub fn find_centroid(t: &ColoredTree, component: &[usize]) -> Result<usize> {
    if component.is_empty() {
        return Err(Error::Input("empty component".into()));
    }
    let adj = t.neighbors();
    let mut alive = vec![false; t.len()];
    for &v in component {
        if v >= t.len() {
            return Err(Error::Range {
                index: v,
                lo: 0,
                hi: t.len() - 1,
            });
        }
        alive[v] = true;
    }
    let mut mark = vec![0u32; t.len()];
    let (c, reached) = centroid_in(&adj, &alive, &mut mark, 1, component[0]);
    if reached != component.len() {
        return Err(Error::Input("component is not connected".into()));
    }
    Ok(c)
}

/// Recursively indexes every centroid component of `t`.
pub fn build_centroid_index(t: &ColoredTree, builder: TreeBuilder, table: &ChunkTable) -> Result<CentroidIndex> {
    let n = t.len();
    let adj = t.neighbors();
    let mut alive = vec![true; n];
    let mut mark = vec![0u32; n];
    let mut stamp = 0u32;
    let mut nodes: Vec<CentroidNode> = Vec::new();
    // (any node of the component, parent record)
    let mut stack: Vec<(usize, Option<usize>)> = vec![(t.root(), None)];
    while let Some((start, parent)) = stack.pop() {
        stamp += 1;
        let (c, _) = centroid_in(&adj, &alive, &mut mark, stamp, start);
        stamp += 1;
        let members = collect(&adj, &alive, &mut mark, stamp, c);
        let (local, _) = t.induced(&members)?;
        let index = builder.build(&local, table)?;
        let pos = nodes.len();
        if let Some(p) = parent {
            nodes[p].children.push(pos);
        }
        nodes.push(CentroidNode {
            centroid: c,
            size: members.len(),
            index,
            children: Vec::new(),
        });
        alive[c] = false;
        for &u in adj[c].iter().rev() {
            if alive[u] {
                stack.push((u, Some(pos)));
            }
        }
    }
    // Rewrite into preorder so that children follow their parent directly.
    Ok(CentroidIndex { nodes: preorder(nodes) })
}

fn collect(adj: &[Vec<usize>], alive: &[bool], mark: &mut [u32], stamp: u32, start: usize) -> Vec<usize> {
    let mut out = vec![start];
    mark[start] = stamp;
    let mut k = 0;
    while k < out.len() {
        for &u in &adj[out[k]] {
            if alive[u] && mark[u] != stamp {
                mark[u] = stamp;
                out.push(u);
            }
        }
        k += 1;
    }
    out
}

fn preorder(nodes: Vec<CentroidNode>) -> Vec<CentroidNode> {
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(nodes[v].children.iter().rev());
    }
    let mut new_id = vec![0usize; nodes.len()];
    for (k, &v) in order.iter().enumerate() {
        new_id[v] = k;
    }
    let mut slots: Vec<Option<CentroidNode>> = nodes.into_iter().map(Some).collect();
    order
        .iter()
        .map(|&v| {
            let mut c = slots[v].take().expect("each record is placed once");
            for ch in &mut c.children {
                *ch = new_id[*ch];
            }
            c
        })
        .collect()
}

/// Anchor node for `(i, j)`, or `None` if the pattern does not appear.
pub fn locate_anchor(ci: &CentroidIndex, i: usize, j: usize) -> Option<usize> {
    ci.locate(i, j).anchor
}
