//! Answer one small query without building a full index.

use jumbled::gen::{self, TreeShape};
use jumbled::tree::{match_bounded, TreeBuilder};
use jumbled::ChunkTable;

fn main() -> jumbled::Result<()> {
    let t = gen::random_tree(&mut gen::rng(3), 2000, TreeShape::Recursive, 0.2);
    let idx = TreeBuilder::Quadratic.build(&t, &ChunkTable::default())?;
    for (i, j) in [(5, 0), (5, 3), (8, 6), (8, 8)] {
        let hit = match_bounded(&t, i, j);
        assert_eq!(hit, idx.query(i, j));
        println!("({i}, {j}) in a 2000-node tree: {hit}");
    }
    Ok(())
}
