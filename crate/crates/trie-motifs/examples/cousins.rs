//! Enumerating the tau-cousins: all root-branching shapes a motif competes
//! with on the fringe.
//!
//! A tau-cousin is any root-branching trie shape with exactly tau leaves.
//! The shape functionals Q(T) of the cousins sum to 1 - sum_j p_j^tau (the
//! defect is the probability that all tau strings share their first
//! symbol, which makes the root unary). For tau = 2 there is exactly one
//! binary cousin (the cherry); for tau >= 3 the family is infinite and the
//! mass is approached through height-capped partial sums.

use trie_motifs::motif::{cousin_mass_partial_sum, enumerate_cousins, shape_functional};
use trie_motifs::source::SourceModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceModel::new(vec![0.4, 0.6])?;
    let tau = 3;

    println!("binary 3-cousins under (0.4, 0.6), by height:");
    println!(
        "{:>4} {:<22} {:>12} {:>12}",
        "#", "shape", "Q(T)", "partial sum"
    );
    let mut partial = 0.0;
    for (i, shape) in enumerate_cousins(tau, source.m(), Some(4)).enumerate() {
        let q = shape_functional(&source, &shape)?;
        partial += q;
        if i < 12 {
            println!(
                "{:>4} {:<22} {:>12.6e} {:>12.8}",
                i,
                shape.encode(),
                q,
                partial
            );
        }
    }
    println!("(heights above 4 truncated)");

    let limit = 1.0 - source.power_sum(tau as f64);
    println!("\nmass limit 1 - sum p_j^{tau} = {limit:.10}");
    println!("{:>8} {:>14} {:>12}", "height", "partial sum", "tail bound");
    for height in [2, 4, 8, 16, 32] {
        let mass = cousin_mass_partial_sum(&source, tau, height);
        println!(
            "{height:>8} {:>14.10} {:>12.3e}",
            mass.partial_sum, mass.tail_bound
        );
    }
    Ok(())
}
