//! Index a grammar-compressed string without expanding it.

use jumbled::gen;
use jumbled::grammar::{block_decompose, build_global_index, choose_block_length, Slp};
use jumbled::string_index::build_minmax_packed;
use jumbled::{BitSeq, ChunkTable};

fn main() -> jumbled::Result<()> {
    let table = ChunkTable::default();

    // 3 rules: "1", "0", then "10".
    let slp = Slp::parse("3\nT 1\nT 0\nN 1 2\n")?;
    println!("a {}-rule grammar expands to {}", slp.rule_count(), slp.expand());

    // Fibonacci words compress exponentially.
    let fib = gen::fibonacci_slp(18);
    let n = fib.len();
    let block = choose_block_length(n, fib.rule_count());
    let bd = block_decompose(&fib, block)?;
    println!(
        "Fibonacci word: {} rules, {n} bits, block length {block}, {} distinct blocks",
        fib.rule_count(),
        bd.basic().len()
    );
    let idx = build_global_index(&fib, None, &table)?;
    assert_eq!(idx, build_minmax_packed(&fib.expand(), &table)?);
    for i in [5, 21, 100] {
        println!("  windows of length {i} hold {}..={} ones", idx.min_at(i).unwrap(), idx.max_at(i).unwrap());
    }

    let doubled = gen::doubling_slp(&"0110".parse::<BitSeq>()?, 10);
    let idx = build_global_index(&doubled, Some(16), &table)?;
    println!("(0110)^1024 has {} bits; (8, 4) appears: {}", doubled.len(), idx.query(8, 4));
    Ok(())
}
