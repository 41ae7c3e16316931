//! Jumbled queries on vertex-colored graphs of small treewidth.
//!
//! Here a query `(i, j)` asks for a connected vertex set with `i` white and
//! `j` black vertices. [`all_queries`] lists every such pair by dynamic
//! programming over a nice tree decomposition.

mod decomp;
mod dp;

pub use decomp::{min_fill_decomposition, min_fill_order, to_nice, NiceKind, NiceNode, NiceTreeDecomp, TreeDecomp};
pub use dp::{
    all_queries, all_queries_with, dp_forget, dp_introduce, dp_join, dp_leaf, run_dp, BagTable, CountSet, Partition,
};

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Simple undirected graph with one color bit per vertex (1 = black).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    colors: Vec<u8>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl ColoredGraph {
    /// Edges are stored as given; self-loops and repeated edges are rejected.
    pub fn new(colors: Vec<u8>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = colors.len();
        if let Some(v) = colors.iter().position(|&c| c > 1) {
            return Err(Error::Input(format!("vertex {v} has color {}, expected 0 or 1", colors[v])));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u}, {v}) leaves 0..{n}")));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Input(format!("edge ({u}, {v}) appears twice")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(ColoredGraph { colors, edges, adj })
    }

    /// Reads `n m`, a line of `n` colors, then `m` lines `u v` (0-based).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
        let nums = |ln: usize, l: &str| -> Result<Vec<usize>> {
            l.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::parse(ln, format!("bad number {t:?}"))))
                .collect()
        };
        let (n, m) = match nums(ln, head)?.as_slice() {
            &[n, m] => (n, m),
            _ => return Err(Error::parse(ln, "header must be `n m`")),
        };
        let colors: Vec<u8> = if n == 0 {
            Vec::new()
        } else {
            let (ln, l) = lines.next().ok_or_else(|| Error::parse(ln + 1, "missing color line"))?;
            let c = nums(ln, l)?;
            if c.len() != n {
                return Err(Error::parse(ln, format!("expected {n} colors, got {}", c.len())));
            }
            c.into_iter()
                .map(|x| u8::try_from(x).ok().filter(|&x| x <= 1).ok_or_else(|| Error::parse(ln, "colors must be 0 or 1")))
                .collect::<Result<_>>()?
        };
        let mut edges = Vec::with_capacity(m);
        for k in 0..m {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::parse(ln, format!("expected {m} edges, got {k}")))?;
            match nums(ln, l)?.as_slice() {
                &[u, v] => edges.push((u, v)),
                _ => return Err(Error::parse(ln, "edge line must be `u v`")),
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "more edge lines than declared"));
        }
        ColoredGraph::new(colors, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.edges.len());
        let colors: Vec<String> = self.colors.iter().map(u8::to_string).collect();
        out.push_str(&colors.join(" "));
        out.push('\n');
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color(&self, v: usize) -> u8 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Vertex sets of the connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut k = 0;
            while k < members.len() {
                let v = members[k];
                k += 1;
                for &u in &self.adj[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Subgraph induced by `vertices`, relabelled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<ColoredGraph> {
        let mut local = vec![usize::MAX; self.len()];
        for (k, &v) in vertices.iter().enumerate() {
            if v >= self.len() || local[v] != usize::MAX {
                return Err(Error::Input(format!("vertex {v} is out of range or repeated")));
            }
            local[v] = k;
        }
        let colors = vertices.iter().map(|&v| self.colors[v]).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        ColoredGraph::new(colors, edges)
    }
}
