//! Find a node that lies on some occurrence of a pattern.

use jumbled::tree::{build_centroid_index, locate_anchor, ColoredTree, TreeBuilder};
use jumbled::ChunkTable;

fn main() -> jumbled::Result<()> {
    // A path 0 - 1 - ... - 9 colored 0011101000.
    let colors = "0011101000";
    let mut text = format!("{}\n", colors.len());
    for (v, c) in colors.chars().enumerate() {
        let parent = if v == 0 { -1 } else { v as i64 - 1 };
        text.push_str(&format!("{parent} {c}\n"));
    }
    let t = ColoredTree::parse(&text)?;
    let ci = build_centroid_index(&t, TreeBuilder::Quadratic, &ChunkTable::default())?;
    println!("centroid decomposition of depth {} over {} nodes", ci.depth(), ci.n());
    for (i, j) in [(3, 3), (4, 0), (2, 1), (5, 5)] {
        let trace = ci.locate(i, j);
        match locate_anchor(&ci, i, j) {
            Some(v) => println!("({i}, {j}) passes through node {v} ({} components inspected)", trace.steps),
            None => println!("({i}, {j}) does not appear"),
        }
    }
    Ok(())
}
