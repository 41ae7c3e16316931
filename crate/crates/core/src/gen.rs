//! Seeded generators for strings, trees, grammars and graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitseq::BitSeq;
use crate::grammar::{Rule, Slp};
use crate::graph::ColoredGraph;
use crate::tree::ColoredTree;

/// The generator used across tests, examples and benchmarks.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bits drawn independently with probability `p` of a one.
pub fn random_bits(rng: &mut impl Rng, n: usize, p: f64) -> BitSeq {
    (0..n).map(|_| rng.gen_bool(p)).collect()
}

fn colors(rng: &mut impl Rng, n: usize, p: f64) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.gen_bool(p))).collect()
}

/// Tree shapes offered by [`random_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeShape {
    /// Each node attaches to a uniform earlier node.
    Recursive,
    /// Shape of a binary search tree built from a random permutation.
    Bst,
    Path,
    Star,
    /// A path with one leaf hanging from each path node.
    Caterpillar,
    /// Complete binary tree in heap order.
    CompleteBinary,
    /// Each node attaches to one of the `window` most recent nodes.
    Windowed(usize),
}

impl std::str::FromStr for TreeShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "recursive" => TreeShape::Recursive,
            "bst" => TreeShape::Bst,
            "path" => TreeShape::Path,
            "star" => TreeShape::Star,
            "caterpillar" => TreeShape::Caterpillar,
            "complete" => TreeShape::CompleteBinary,
            _ => match s.strip_prefix("window") {
                Some(w) => TreeShape::Windowed(w.parse().map_err(|_| format!("bad window in {s:?}"))?),
                None => return Err(format!("unknown tree shape {s:?}")),
            },
        })
    }
}

fn bst_parents(rng: &mut impl Rng, n: usize) -> Vec<Option<usize>> {
    let mut parent = vec![None; n];
    let mut next = 1;
    // (node, size of its subtree)
    let mut stack = vec![(0usize, n)];
    while let Some((v, size)) = stack.pop() {
        let left = rng.gen_range(0..size);
        for sub in [left, size - 1 - left] {
            if sub > 0 {
                let u = next;
                next += 1;
                parent[u] = Some(v);
                stack.push((u, sub));
            }
        }
    }
    parent
}

/// A random tree of `n >= 1` nodes with black probability `p`.
pub fn random_tree(rng: &mut impl Rng, n: usize, shape: TreeShape, p: f64) -> ColoredTree {
    assert!(n >= 1, "a tree needs at least one node");
    let parent: Vec<Option<usize>> = match shape {
        TreeShape::Recursive => (0..n).map(|v| (v > 0).then(|| rng.gen_range(0..v))).collect(),
        TreeShape::Windowed(w) => (0..n)
            .map(|v| (v > 0).then(|| rng.gen_range(v.saturating_sub(w.max(1))..v)))
            .collect(),
        TreeShape::Bst => bst_parents(rng, n),
        TreeShape::Path => (0..n).map(|v| v.checked_sub(1)).collect(),
        TreeShape::Star => (0..n).map(|v| (v > 0).then_some(0)).collect(),
        TreeShape::Caterpillar => (0..n)
            .map(|v| match v {
                0 => None,
                v if v % 2 == 1 => Some(v - 1),
                v => Some(v - 2),
            })
            .collect(),
        TreeShape::CompleteBinary => (0..n).map(|v| (v > 0).then(|| (v - 1) / 2)).collect(),
    };
    let mut t = ColoredTree::new(parent, colors(rng, n, p)).expect("generated parents form a tree");
    if shape == TreeShape::Recursive {
        // Shuffle ids so that node 0 is not always the root.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let parent = (0..n)
            .map(|v| t.parent(perm[v]).map(|p| perm.iter().position(|&x| x == p).expect("permutation")))
            .collect();
        let color = (0..n).map(|v| t.color(perm[v])).collect();
        t = ColoredTree::new(parent, color).expect("relabelled tree");
    }
    t
}

/// Random grammar with `g >= 2` rules whose every expansion has at most `max_len` bits.
pub fn random_slp(rng: &mut impl Rng, g: usize, max_len: usize) -> Slp {
    assert!(g >= 2 && max_len >= 2, "need both terminals and room for a pair");
    let mut rules = vec![Rule::Terminal(false), Rule::Terminal(true)];
    let mut lens = vec![1usize, 1];
    rules.shuffle(rng);
    while rules.len() < g {
        // lean on recent rules so the start symbol grows long
        let hi = rules.len();
        let a = rng.gen_range(hi.saturating_sub(4)..hi);
        let b = rng.gen_range(0..hi);
        let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        if lens[a] + lens[b] <= max_len {
            rules.push(Rule::Pair(a, b));
            lens.push(lens[a] + lens[b]);
        } else if rng.gen_bool(0.1) {
            rules.push(Rule::Pair(a.min(1), b.min(1)));
            lens.push(2);
        }
    }
    Slp::new(rules).expect("rules only refer backwards")
}

/// Appends rules deriving `bits` and returns the id of the last one.
fn literal(rules: &mut Vec<Rule>, bits: &BitSeq) -> usize {
    let mut acc = None;
    for b in bits.iter() {
        rules.push(Rule::Terminal(b));
        let t = rules.len() - 1;
        acc = Some(match acc {
            None => t,
            Some(a) => {
                rules.push(Rule::Pair(a, t));
                rules.len() - 1
            }
        });
    }
    acc.expect("literal must be nonempty")
}

/// Appends rules deriving `count >= 1` copies of rule `r`.
fn power(rules: &mut Vec<Rule>, r: usize, count: usize) -> usize {
    let mut acc = None;
    let mut sq = r;
    let mut c = count;
    loop {
        if c & 1 == 1 {
            acc = Some(match acc {
                None => sq,
                Some(a) => {
                    rules.push(Rule::Pair(a, sq));
                    rules.len() - 1
                }
            });
        }
        c >>= 1;
        if c == 0 {
            break;
        }
        rules.push(Rule::Pair(sq, sq));
        sq = rules.len() - 1;
    }
    acc.expect("count is at least one")
}

/// `pattern` repeated `2^depth` times.
pub fn doubling_slp(pattern: &BitSeq, depth: usize) -> Slp {
    let mut rules = Vec::new();
    let mut r = literal(&mut rules, pattern);
    for _ in 0..depth {
        rules.push(Rule::Pair(r, r));
        r = rules.len() - 1;
    }
    Slp::new(rules).expect("rules only refer backwards")
}

/// Fibonacci word `f_k` with `f_0 = 0`, `f_1 = 01` and `f_k = f_{k-1} f_{k-2}`.
pub fn fibonacci_slp(k: usize) -> Slp {
    let mut rules = vec![Rule::Terminal(false), Rule::Terminal(true), Rule::Pair(0, 1)];
    let (mut prev, mut cur) = (0, 2);
    for _ in 1..k {
        rules.push(Rule::Pair(cur, prev));
        (prev, cur) = (cur, rules.len() - 1);
    }
    if k == 0 {
        rules.truncate(1);
    }
    Slp::new(rules).expect("rules only refer backwards")
}

/// Concatenated runs `bit^len` (every `len >= 1`).
pub fn runs_slp(runs: &[(bool, usize)]) -> Slp {
    assert!(!runs.is_empty(), "need at least one run");
    let mut rules = vec![Rule::Terminal(false), Rule::Terminal(true)];
    let mut acc: Option<usize> = None;
    for &(bit, len) in runs {
        let r = power(&mut rules, bit as usize, len);
        acc = Some(match acc {
            None => r,
            Some(a) => {
                rules.push(Rule::Pair(a, r));
                rules.len() - 1
            }
        });
    }
    let start = acc.expect("nonempty");
    if start != rules.len() - 1 {
        // the start must be the last rule; a single short run ends on a terminal
        let t = rules[start];
        rules.push(t);
    }
    Slp::new(rules).expect("rules only refer backwards")
}

/// Erdős–Rényi graph: each pair is an edge with probability `density`.
pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64, p: f64) -> ColoredGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    ColoredGraph::new(colors(rng, n, p), edges).expect("simple graph")
}

/// Random `k`-tree on `n` vertices with each edge kept with probability `keep`.
pub fn random_partial_ktree(rng: &mut impl Rng, n: usize, k: usize, keep: f64, p: f64) -> ColoredGraph {
    let mut edges = Vec::new();
    let base = n.min(k + 1);
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for a in 0..base {
        for b in a + 1..base {
            edges.push((a, b));
        }
    }
    if base == k + 1 {
        for skip in 0..base {
            cliques.push((0..base).filter(|&x| x != skip).collect());
        }
    }
    for v in base..n {
        let c = cliques[rng.gen_range(0..cliques.len())].clone();
        for &u in &c {
            edges.push((u, v));
        }
        for skip in 0..c.len() {
            let mut next: Vec<usize> = c.iter().copied().filter(|&x| x != c[skip]).collect();
            next.push(v);
            cliques.push(next);
        }
    }
    edges.retain(|_| rng.gen_bool(keep));
    edges.shuffle(rng);
    ColoredGraph::new(colors(rng, n, p), edges).expect("simple graph")
}
