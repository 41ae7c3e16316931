//! Save an index to a file and load it back.

use jumbled::gen::{self, TreeShape};
use jumbled::tree::{build_centroid_index, TreeBuilder};
use jumbled::{ChunkTable, IndexBody, IndexFile, IndexKind};

fn main() -> jumbled::Result<()> {
    let t = gen::random_tree(&mut gen::rng(2), 12, TreeShape::Recursive, 0.5);
    let ci = build_centroid_index(&t, TreeBuilder::MicroMacro(None), &ChunkTable::default())?;
    let file = IndexFile::new(IndexKind::Tree, t.len(), IndexBody::Centroid(ci))?;

    let path = std::env::temp_dir().join(format!("jumbled-example-{}.jpmx", std::process::id()));
    file.save(&path)?;
    let text = std::fs::read_to_string(&path)?;
    print!("{text}");
    let back = IndexFile::load(&path)?;
    std::fs::remove_file(&path)?;

    assert_eq!(back, file);
    println!("reloaded: (4, 2) appears {}, anchored at {:?}", back.query(4, 2), back.locate(4, 2)?);
    Ok(())
}
