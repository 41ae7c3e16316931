//! List every (white, black) count of a connected vertex set in a graph.

use jumbled::gen;
use jumbled::graph::{all_queries, all_queries_with, min_fill_decomposition, ColoredGraph, TreeDecomp};

fn main() -> jumbled::Result<()> {
    // A 6-cycle with colors alternating in pairs, plus a chord 0-3.
    let g = ColoredGraph::parse("6 7\n1 1 0 0 1 1\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3\n")?;
    let td = min_fill_decomposition(&g);
    println!("min-fill decomposition: {} bags, width {}", td.bags().len(), td.width());
    let q = all_queries(&g)?;
    let pairs: Vec<String> = q.iter().map(|(w, b)| format!("({w},{b})")).collect();
    println!("achievable (white, black): {}", pairs.join(" "));

    // A decomposition read from PACE text gives the same answers.
    let pace = "s td 2 4 6\nb 1 1 2 3 4\nb 2 1 4 5 6\n1 2\n";
    let alt = TreeDecomp::parse_pace(pace)?;
    alt.validate(&g)?;
    assert_eq!(all_queries_with(&g, &alt)?, q);
    println!("a hand-written width-3 decomposition agrees");

    let big = gen::random_partial_ktree(&mut gen::rng(5), 60, 3, 0.8, 0.5);
    let q = all_queries(&big)?;
    println!("random partial 3-tree on 60 vertices: {} achievable pairs", q.len());
    Ok(())
}
