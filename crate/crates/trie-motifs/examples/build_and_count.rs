//! Trie construction and fringe counting, compared against the mean law.
//!
//! A trie on n random strings routes each string by its successive symbols;
//! a motif T occurs on the fringe wherever the full subtree at a node
//! equals T. This example builds tries of growing size from seeded symbol
//! streams, counts cherry occurrences directly on the built shape, and
//! shows the counts settling onto the asymptotic line E[X_n] ~ M n.

use trie_motifs::analytics::mean_coefficient;
use trie_motifs::shape::{build_trie, count_fringe_occurrences, Shape, DEFAULT_PREFIX_BUDGET};
use trie_motifs::source::SourceModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceModel::new(vec![0.3, 0.7])?;
    let cherry = Shape::decode("(LL)", 2)?;
    let m = mean_coefficient(&source, &cherry)?;
    println!("cherry mean coefficient under (0.3, 0.7): M = {m:.9}");
    println!();
    println!(
        "{:>8} {:>10} {:>12} {:>10}",
        "n", "count", "predicted", "ratio"
    );

    for (run, &n) in [100u64, 1_000, 10_000, 100_000].iter().enumerate() {
        let mut streams: Vec<_> = (0..n)
            .map(|i| source.stream(7, (run as u64) << 32 | i))
            .collect();
        let trie = build_trie(&mut streams, DEFAULT_PREFIX_BUDGET)?;
        let count = count_fringe_occurrences(&trie.shape, &cherry)?;
        let predicted = m * n as f64;
        println!(
            "{n:>8} {count:>10} {predicted:>12.1} {:>10.4}",
            count as f64 / predicted
        );
    }

    println!("\nthe trie shape of 6 strings, as canonical text:");
    let mut streams: Vec<_> = (0..6).map(|i| source.stream(1, i)).collect();
    let small = build_trie(&mut streams, DEFAULT_PREFIX_BUDGET)?;
    println!("  {}", small.shape.encode());
    println!("  distinguishing prefixes consumed per string:");
    for (i, prefix) in small.prefixes.iter().enumerate() {
        let digits: String = prefix.iter().map(|s| char::from(b'0' + s)).collect();
        println!("    string {i}: {digits}");
    }
    Ok(())
}
