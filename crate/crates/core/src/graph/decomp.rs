//! Tree decompositions: validation, a min-fill heuristic, the PACE text
//! format and conversion to nice form.

use std::collections::BTreeSet;

use super::ColoredGraph;
use crate::error::{Error, Result};

/// Bags of vertices connected by tree edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomp {
    n: usize,
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomp {
    /// Bags are sorted and deduplicated; nothing else is checked until [`TreeDecomp::validate`].
    pub fn new(n: usize, bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomp { n, bags, edges }
    }

    /// Vertex count of the decomposed graph.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Largest bag size minus one (`0` for no bags).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Bag adjacency, checking that the edges form a tree over the bags.
    fn tree_adjacency(&self) -> Result<Vec<Vec<usize>>> {
        let k = self.bags.len();
        if k == 0 {
            return Err(Error::Validation("decomposition has no bags".into()));
        }
        if self.edges.len() != k - 1 {
            return Err(Error::Validation(format!("{} tree edges for {k} bags", self.edges.len())));
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in &self.edges {
            if a >= k || b >= k || a == b {
                return Err(Error::Validation(format!("bad tree edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        if count != k {
            return Err(Error::Validation("bag tree is not connected".into()));
        }
        Ok(adj)
    }

    /// Checks the tree shape, vertex and edge coverage, and that the bags
    /// holding any vertex form a connected subtree.
    pub fn validate(&self, g: &ColoredGraph) -> Result<()> {
        if self.n != g.len() {
            return Err(Error::Validation(format!("decomposition is for {} vertices, graph has {}", self.n, g.len())));
        }
        let adj = self.tree_adjacency()?;
        let mut holders = vec![Vec::new(); self.n];
        for (b, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= self.n {
                    return Err(Error::Validation(format!("bag {b} holds vertex {v} outside 0..{}", self.n)));
                }
                holders[v].push(b);
            }
        }
        for (v, hs) in holders.iter().enumerate() {
            if hs.is_empty() {
                return Err(Error::Validation(format!("vertex {v} is in no bag")));
            }
            // connectivity of the bags holding v
            let mut seen = BTreeSet::from([hs[0]]);
            let mut stack = vec![hs[0]];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if self.bags[y].binary_search(&v).is_ok() && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != hs.len() {
                return Err(Error::Validation(format!("bags holding vertex {v} are not connected")));
            }
        }
        for &(u, v) in g.edges() {
            let covered = holders[u].iter().any(|&b| self.bags[b].binary_search(&v).is_ok());
            if !covered {
                return Err(Error::Validation(format!("edge ({u}, {v}) is in no bag")));
            }
        }
        Ok(())
    }

    /// Reads the PACE `.td` format. Bag ids and vertex ids in the file are 1-based.
    pub fn parse_pace(text: &str) -> Result<Self> {
        let mut header = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut edges = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let ln = k + 1;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.is_empty() || t[0] == "c" {
                continue;
            }
            let num = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::parse(ln, format!("bad number {s:?}"))) };
            let one_based = |s: &str, what: &str| -> Result<usize> {
                match num(s)? {
                    0 => Err(Error::parse(ln, format!("{what} ids start at 1"))),
                    x => Ok(x - 1),
                }
            };
            match t[0] {
                "s" => {
                    if header.is_some() {
                        return Err(Error::parse(ln, "second solution line"));
                    }
                    if t.len() != 5 || t[1] != "td" {
                        return Err(Error::parse(ln, "expected `s td <bags> <width+1> <n>`"));
                    }
                    let (count, wplus, n) = (num(t[2])?, num(t[3])?, num(t[4])?);
                    bags = vec![None; count];
                    header = Some((wplus, n, ln));
                }
                "b" => {
                    if header.is_none() {
                        return Err(Error::parse(ln, "bag before the solution line"));
                    }
                    if t.len() < 2 {
                        return Err(Error::parse(ln, "bag line needs an id"));
                    }
                    let id = one_based(t[1], "bag")?;
                    let slot = bags
                        .get_mut(id)
                        .ok_or_else(|| Error::parse(ln, format!("bag {} beyond the declared count", id + 1)))?;
                    if slot.is_some() {
                        return Err(Error::parse(ln, format!("bag {} listed twice", id + 1)));
                    }
                    *slot = Some(t[2..].iter().map(|s| one_based(s, "vertex")).collect::<Result<_>>()?);
                }
                _ => {
                    if header.is_none() {
                        return Err(Error::parse(ln, "tree edge before the solution line"));
                    }
                    if t.len() != 2 {
                        return Err(Error::parse(ln, "tree edge must be `<bag> <bag>`"));
                    }
                    edges.push((one_based(t[0], "bag")?, one_based(t[1], "bag")?));
                }
            }
        }
        let (wplus, n, hl) = header.ok_or_else(|| Error::parse(1, "missing solution line"))?;
        let bags: Vec<Vec<usize>> = bags
            .into_iter()
            .enumerate()
            .map(|(b, x)| x.ok_or_else(|| Error::parse(hl, format!("bag {} is never listed", b + 1))))
            .collect::<Result<_>>()?;
        let td = TreeDecomp::new(n, bags, edges);
        if td.bags.iter().map(Vec::len).max().unwrap_or(0) != wplus {
            return Err(Error::parse(hl, format!("declared bag size {wplus} differs from the largest bag")));
        }
        Ok(td)
    }

    pub fn to_pace(&self) -> String {
        let wplus = self.bags.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = format!("s td {} {} {}\n", self.bags.len(), wplus, self.n);
        for (b, bag) in self.bags.iter().enumerate() {
            out.push_str(&format!("b {}", b + 1));
            for v in bag {
                out.push_str(&format!(" {}", v + 1));
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        out
    }
}

/// Greedy elimination order: repeatedly remove the vertex whose
/// neighborhood needs the fewest fill edges (ties: smaller degree, then id).
pub fn min_fill_order(g: &ColoredGraph) -> Vec<usize> {
    let n = g.len();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let fill = |v: usize| -> usize {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut missing = 0;
            for (k, &a) in nb.iter().enumerate() {
                missing += nb[k + 1..].iter().filter(|&&b| !adj[a].contains(&b)).count();
            }
            missing
        };
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill(v), adj[v].len(), v))
            .expect("a live vertex remains");
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[v].clear();
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Decomposition from the min-fill elimination order: one bag per vertex
/// holding it and its later neighbors, hung below the bag of the first of
/// those neighbors to be eliminated.
pub fn min_fill_decomposition(g: &ColoredGraph) -> TreeDecomp {
    let n = g.len();
    if n == 0 {
        return TreeDecomp::new(0, vec![Vec::new()], Vec::new());
    }
    let order = min_fill_order(g);
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n - 1);
    for (k, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] > k).collect();
        for &a in &later {
            for &b in &later {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        let mut bag = later.clone();
        bag.push(v);
        bags.push(bag);
        // bag ids follow the elimination order
        if k + 1 < n {
            let parent = later.iter().map(|&u| pos[u]).min().unwrap_or(k + 1);
            edges.push((k, parent));
        }
    }
    TreeDecomp::new(n, bags, edges)
}

/// Role of a nice decomposition node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf(usize),
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted bag.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Rooted decomposition where every node is a leaf with one vertex, an
/// introduce or forget of one vertex, or a join of two equal bags.
/// Children always have smaller ids than their parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomp {
    nodes: Vec<NiceNode>,
    root: usize,
}

impl NiceTreeDecomp {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks the per-kind bag constraints at every node.
    pub fn audit(&self) -> Result<()> {
        let bad = |k: usize, m: &str| Err(Error::Validation(format!("nice node {k}: {m}")));
        for (k, x) in self.nodes.iter().enumerate() {
            if x.children.iter().any(|&c| c >= k) {
                return bad(k, "child listed after its parent");
            }
            let child = |i: usize| &self.nodes[x.children[i]].bag;
            match (x.kind, x.children.len()) {
                (NiceKind::Leaf(v), 0) => {
                    if x.bag != [v] {
                        return bad(k, "leaf bag must be its single vertex");
                    }
                }
                (NiceKind::Introduce(v), 1) => {
                    let mut want = child(0).clone();
                    if want.binary_search(&v).is_ok() {
                        return bad(k, "introduced vertex already in the child");
                    }
                    want.push(v);
                    want.sort_unstable();
                    if want != x.bag {
                        return bad(k, "introduce bag is not child plus vertex");
                    }
                }
                (NiceKind::Forget(v), 1) => {
                    let mut want = x.bag.clone();
                    if want.binary_search(&v).is_ok() {
                        return bad(k, "forgotten vertex still in the bag");
                    }
                    want.push(v);
                    want.sort_unstable();
                    if &want != child(0) {
                        return bad(k, "forget bag is not child minus vertex");
                    }
                }
                (NiceKind::Join, 2) => {
                    if child(0) != &x.bag || child(1) != &x.bag {
                        return bad(k, "join children differ from the join bag");
                    }
                }
                _ => return bad(k, "wrong number of children for its kind"),
            }
        }
        Ok(())
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Chain from node `from` (or nothing) to a node with bag `target`.
    fn morph(&mut self, from: Option<usize>, target: &[usize]) -> Option<usize> {
        let mut cur = from;
        let mut bag: Vec<usize> = cur.map(|c| self.nodes[c].bag.clone()).unwrap_or_default();
        let drop: Vec<usize> = bag.iter().copied().filter(|v| target.binary_search(v).is_err()).collect();
        for v in drop {
            bag.retain(|&x| x != v);
            cur = Some(self.push(NiceKind::Forget(v), bag.clone(), cur.into_iter().collect()));
        }
        for &v in target {
            if bag.binary_search(&v).is_ok() {
                continue;
            }
            match cur {
                None => {
                    bag = vec![v];
                    cur = Some(self.push(NiceKind::Leaf(v), bag.clone(), Vec::new()));
                }
                Some(c) => {
                    let at = bag.binary_search(&v).unwrap_err();
                    bag.insert(at, v);
                    cur = Some(self.push(NiceKind::Introduce(v), bag.clone(), vec![c]));
                }
            }
        }
        cur
    }
}

/// Nice form of `td`, rooted at bag 0. Bag structure is checked; coverage
/// against a graph is [`TreeDecomp::validate`]'s job.
pub fn to_nice(td: &TreeDecomp) -> Result<NiceTreeDecomp> {
    let adj = td.tree_adjacency()?;
    let k = td.bags.len();
    // bags in DFS preorder from 0 with parents
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut b = NiceBuilder { nodes: Vec::new() };
    let mut built: Vec<Option<usize>> = vec![None; k];
    for &x in order.iter().rev() {
        let target = &td.bags[x];
        let mut parts: Vec<usize> = Vec::new();
        for &y in &adj[x] {
            if y != 0 && parent[y] == x {
                if let Some(node) = b.morph(built[y], target) {
                    parts.push(node);
                }
            }
        }
        let mut node = parts.pop();
        while let Some(p) = parts.pop() {
            let q = node.expect("join partner");
            node = Some(b.push(NiceKind::Join, target.clone(), vec![p, q]));
        }
        if node.is_none() {
            node = b.morph(None, target);
        }
        built[x] = node;
    }
    let root = built[0].ok_or_else(|| Error::Validation("decomposition has only empty bags".into()))?;
    Ok(NiceTreeDecomp { nodes: b.nodes, root })
}
