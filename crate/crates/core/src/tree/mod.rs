//! Jumbled indexes over node-colored trees.
//!
//! A pattern is a connected subgraph; its size is the node count and its
//! ones count the number of black nodes. As with strings, the achievable
//! ones counts for a fixed size form an interval, so a [`MinMaxIndex`]
//! answers every query.

mod anchored;
mod binarize;
mod centroid;
mod micro_macro;

pub use anchored::{build_anchored_arrays, match_bounded};
pub use binarize::{binarize, BinTree};
pub use centroid::{build_centroid_index, find_centroid, locate_anchor, CentroidIndex, CentroidNode, LocateTrace};
pub use micro_macro::{build_index_micro_macro, default_cap, micro_macro_decompose, Cluster, MergeStats, MicroMacro};

use crate::bitseq::{BitSeq, ChunkTable};
use crate::error::{Error, Result};
use crate::string_index::MinMaxIndex;

/// A rooted tree with one bit of color per node (1 = black).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredTree {
    parent: Vec<Option<usize>>,
    color: Vec<u8>,
    root: usize,
    children: Vec<Vec<usize>>,
}

impl ColoredTree {
    /// Checks that `parent` describes a single rooted tree and that colors are bits.
    pub fn new(parent: Vec<Option<usize>>, color: Vec<u8>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::Input("a tree needs at least one node".into()));
        }
        if color.len() != n {
            return Err(Error::Input(format!("{} colors for {n} nodes", color.len())));
        }
        if let Some(v) = color.iter().position(|&c| c > 1) {
            return Err(Error::Input(format!("node {v} has color {}, expected 0 or 1", color[v])));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::Input(format!("expected exactly one root, found {}", roots.len())));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::Input(format!("node {v} has parent {p} outside 0..{n}")));
                }
                children[p].push(v);
            }
        }
        let root = roots[0];
        let mut seen = 1usize;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            seen += children[v].len();
            stack.extend_from_slice(&children[v]);
        }
        if seen != n {
            return Err(Error::Input("parent links contain a cycle".into()));
        }
        Ok(ColoredTree {
            parent,
            color,
            root,
            children,
        })
    }

    /// Path `s[0] - s[1] - ... ` rooted at position 0.
    pub fn path(s: &BitSeq) -> Result<Self> {
        let parent = (0..s.len()).map(|v| v.checked_sub(1)).collect();
        ColoredTree::new(parent, s.iter().map(u8::from).collect())
    }

    /// Builds a tree from undirected edges, rooted at `root`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], color: Vec<u8>, root: usize) -> Result<Self> {
        if n == 0 || root >= n {
            return Err(Error::Input(format!("root {root} outside 0..{n}")));
        }
        if edges.len() + 1 != n {
            return Err(Error::Input(format!("a tree on {n} nodes has {} edges, got {}", n - 1, edges.len())));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Input(format!("bad edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    stack.push(u);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Input("edges do not connect all nodes".into()));
        }
        ColoredTree::new(parent, color)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn color(&self, v: usize) -> u8 {
        self.color[v]
    }

    pub fn colors(&self) -> &[u8] {
        &self.color
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn black_count(&self) -> usize {
        self.color.iter().filter(|&&c| c == 1).count()
    }

    /// Undirected adjacency lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = self.children.clone();
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                adj[v].push(p);
            }
        }
        adj
    }

    /// Undirected edge list, each edge as `(parent, child)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter_map(|v| self.parent[v].map(|p| (p, v))).collect()
    }

    /// The same tree rooted at `root`.
    pub fn rerooted(&self, root: usize) -> Result<Self> {
        ColoredTree::from_edges(self.len(), &self.edges(), self.color.clone(), root)
    }

    /// Nodes in an order where every parent precedes its children.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        out
    }

    /// Parses `n`, then `n` lines of `parent color` with parent `-1` for the root.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, first) = lines.next().ok_or_else(|| Error::parse(1, "missing node count"))?;
        let n: usize = first.parse().map_err(|_| Error::parse(ln, "node count must be a nonnegative integer"))?;
        let mut parent = Vec::with_capacity(n);
        let mut color = Vec::with_capacity(n);
        for v in 0..n {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(ln + v + 1, format!("expected {n} node lines, got {v}")))?;
            let mut it = line.split_whitespace();
            let p: i64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(ln, "bad parent id"))?;
            let c: u8 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(ln, "bad color"))?;
            if it.next().is_some() {
                return Err(Error::parse(ln, "trailing tokens"));
            }
            parent.push(match p {
                -1 => None,
                p if p >= 0 => Some(p as usize),
                _ => return Err(Error::parse(ln, format!("parent {p} is negative"))),
            });
            color.push(c);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "more node lines than the declared count"));
        }
        ColoredTree::new(parent, color)
    }

    /// Inverse of [`ColoredTree::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.len());
        for v in 0..self.len() {
            let p = self.parent[v].map_or(-1, |p| p as i64);
            out.push_str(&format!("{p} {}\n", self.color[v]));
        }
        out
    }

    /// The subtree-induced tree on `nodes`, which must be connected; returns
    /// it with the local-to-global id map (entry `k` is the global id of local node `k`).
    pub fn induced(&self, nodes: &[usize]) -> Result<(ColoredTree, Vec<usize>)> {
        let mut local = std::collections::HashMap::with_capacity(nodes.len());
        for (k, &v) in nodes.iter().enumerate() {
            local.insert(v, k);
        }
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        for &v in nodes {
            if let Some(p) = self.parent[v] {
                if let Some(&lp) = local.get(&p) {
                    edges.push((lp, local[&v]));
                }
            }
        }
        let color = nodes.iter().map(|&v| self.color[v]).collect();
        let t = ColoredTree::from_edges(nodes.len(), &edges, color, 0)?;
        Ok((t, nodes.to_vec()))
    }
}

/// Which builder produces a tree's [`MinMaxIndex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeBuilder {
    Quadratic,
    /// Micro-macro builder; `None` picks [`default_cap`].
    MicroMacro(Option<usize>),
}

impl TreeBuilder {
    pub fn build(&self, t: &ColoredTree, table: &ChunkTable) -> Result<MinMaxIndex> {
        let bt = binarize(t);
        match *self {
            TreeBuilder::Quadratic => Ok(build_anchored_arrays(&bt)),
            TreeBuilder::MicroMacro(cap) => {
                let cap = cap.unwrap_or_else(|| default_cap(t.len()));
                build_index_micro_macro(&bt, cap, table).map(|(idx, _)| idx)
            }
        }
    }
}
