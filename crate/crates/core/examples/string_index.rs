//! Index a binary string and answer jumbled queries in constant time.

use jumbled::gen;
use jumbled::string_index::{build_minmax_naive, build_minmax_packed};
use jumbled::{BitSeq, ChunkTable};

fn main() -> jumbled::Result<()> {
    let s: BitSeq = "1101001110".parse()?;
    let table = ChunkTable::default();
    let idx = build_minmax_packed(&s, &table)?;

    println!("text {s}");
    for i in 1..=s.len() {
        println!("  windows of length {i:>2} hold {}..={} ones", idx.min_at(i).unwrap(), idx.max_at(i).unwrap());
    }
    for (i, j) in [(4, 2), (4, 4), (6, 5), (3, 0)] {
        println!("  ({i}, {j}) appears: {}", idx.query(i, j));
    }

    // The packed and naive builders agree on larger inputs too.
    let big = gen::random_bits(&mut gen::rng(7), 5000, 0.3);
    assert_eq!(build_minmax_packed(&big, &table)?, build_minmax_naive(&big)?);
    println!("packed and naive builders agree on a random string of 5000 bits");
    Ok(())
}
