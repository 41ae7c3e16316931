//! Index a node-colored tree with both builders.

use jumbled::gen::{self, TreeShape};
use jumbled::tree::{ColoredTree, TreeBuilder};
use jumbled::ChunkTable;

fn main() -> jumbled::Result<()> {
    // 0 is the root; colors: 1 = black
    //        0(b)
    //       /    \
    //     1(w)   2(b)
    //     / \      \
    //  3(b) 4(w)   5(b)
    let t = ColoredTree::parse("6\n-1 1\n0 0\n0 1\n1 1\n1 0\n2 1\n")?;
    let table = ChunkTable::default();
    let idx = TreeBuilder::MicroMacro(None).build(&t, &table)?;
    for i in 1..=t.len() {
        println!("connected sets of {i} nodes have {}..={} black nodes", idx.min_at(i).unwrap(), idx.max_at(i).unwrap());
    }
    println!("(3, 3) appears: {}", idx.query(3, 3));
    println!("(3, 0) appears: {}", idx.query(3, 0));

    let big = gen::random_tree(&mut gen::rng(11), 3000, TreeShape::Bst, 0.5);
    let a = TreeBuilder::Quadratic.build(&big, &table)?;
    let b = TreeBuilder::MicroMacro(Some(8)).build(&big, &table)?;
    assert_eq!(a, b);
    println!("quadratic and micro-macro builders agree on a 3000-node tree");
    Ok(())
}
