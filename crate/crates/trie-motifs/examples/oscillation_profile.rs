//! The oscillating correction to the mean under a periodic source.
//!
//! When every symbol probability is an integer power of one base r, the
//! Mellin transform behind E[X_n] has poles at -1 + 2 pi i k / ln(1/r),
//! and the mean picks up a bounded fluctuation: E[X_n]/n = M + xi(n) + o(1)
//! where xi is a Fourier series in log_{1/r} n with complex-Gamma
//! coefficients. This example evaluates xi over one period for the
//! unbiased binary source, prints its amplitude bound, and checks the
//! series against the residual of the exact mean at large n.

use trie_motifs::analytics::{
    exact_mean, mean_coefficient, OscillationSeries, DEFAULT_K_MAX, DEFAULT_MAX_LEVELS,
};
use trie_motifs::shape::Shape;
use trie_motifs::source::SourceModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceModel::new(vec![0.5, 0.5])?;
    let motif = Shape::decode("(((LL)E)L)", 2)?;
    let series = OscillationSeries::mean_series(&source, &motif, DEFAULT_K_MAX)?;

    println!(
        "three-leaf motif {} under the unbiased binary source",
        motif.encode()
    );
    println!("pole spacing theta = {:.9}", series.pole_spacing());
    println!("series scale Q/(tau! h) = {:.9e}", series.scale());
    println!(
        "amplitude bound sup|xi| <= {:.9e}",
        series.amplitude_bound()
    );
    println!();

    println!("xi over one period in log2 n (n from 2^20 to 2^21):");
    let base = (1u64 << 20) as f64;
    for i in 0..=8 {
        let x = base * 2f64.powf(i as f64 / 8.0);
        let xi = series.eval(x);
        let bar_len = (40.0 * (xi / series.amplitude_bound() + 1.0) / 2.0) as usize;
        println!(
            "  log2 n = {:6.3}  xi = {xi:+.6e}  {}",
            x.log2(),
            "*".repeat(bar_len)
        );
    }

    println!("\nresidual of the exact mean against the series:");
    let m = mean_coefficient(&source, &motif)?;
    for &n in &[1u64 << 16, 1 << 18, 1 << 20] {
        let exact = exact_mean(&source, &motif, n, 1e-13, DEFAULT_MAX_LEVELS)?;
        let residual = exact.value / n as f64 - m;
        let xi = series.eval(n as f64);
        println!(
            "  n = 2^{:>2}: E[X]/n - M = {residual:+.6e}, xi(n) = {xi:+.6e}",
            n.ilog2()
        );
    }
    Ok(())
}
