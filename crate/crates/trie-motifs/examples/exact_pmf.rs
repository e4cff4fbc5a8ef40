//! The exact small-n distribution of a motif count, checked by simulation.
//!
//! For small n the distribution of the fringe count X_n follows an exact
//! recurrence: condition on how the n strings split over the root's
//! subtrees, recurse into each subtree, and take the boundary case
//! P(trie on tau strings = T) = Q(T)/(1 - sum_j p_j^tau) for proper splits.
//! This example prints the exact law of the cherry count in a trie of 10
//! unbiased binary strings next to empirical frequencies from 40000
//! simulated tries.

use trie_motifs::montecarlo::{exact_distribution, simulate, Population};
use trie_motifs::motif::MotifCollection;
use trie_motifs::shape::Shape;
use trie_motifs::source::SourceModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceModel::new(vec![0.5, 0.5])?;
    let cherry = MotifCollection::new(vec![(Shape::decode("(LL)", 2)?, 1.0)])?;
    let n = 10;
    let replicates = 40_000;

    let pmf = exact_distribution(&source, &cherry, n)?;
    let summary = simulate(&source, &cherry, Population::Fixed(n), replicates, 5)?;

    let mut frequency = vec![0u32; 16];
    for counts in &summary.counts {
        frequency[counts[0] as usize] += 1;
    }

    println!("cherry count in a trie of {n} unbiased binary strings:");
    println!(
        "{:>6} {:>12} {:>12} {:>8}",
        "count", "exact", "empirical", "z"
    );
    for (value, prob) in pmf.support().iter().zip(pmf.probs()) {
        let hits = frequency[*value as usize];
        let empirical = f64::from(hits) / replicates as f64;
        // Binomial standard error of the empirical cell frequency.
        let se = (prob * (1.0 - prob) / replicates as f64).sqrt();
        println!(
            "{value:>6} {prob:>12.6} {empirical:>12.6} {:>8.2}",
            (empirical - prob) / se
        );
    }
    println!(
        "\nexact mean {:.6}, exact variance {:.6} (empirical {:.6}, {:.6})",
        pmf.mean(),
        pmf.variance(),
        summary.combo_mean,
        summary.combo_var
    );
    Ok(())
}
