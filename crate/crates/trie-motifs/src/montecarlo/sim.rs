//! Trie-building simulation over seeded replicates.
//!
//! Each replicate i owns a block of random streams derived from the run
//! seed: string j of replicate i reads stream id `(i << 32) | j`, and the
//! Poisson population draw (when used) reads `(i << 32) | 0xffff_ffff`.
//! Every stream is an independently keyed counter-mode generator, so
//! replicates can run on any thread layout and still reproduce bitwise.

use super::stats::{normality_diagnostics, Diagnostics};
use super::SimError;
use crate::motif::MotifCollection;
use crate::shape::{build_trie, count_fringe_occurrences, DEFAULT_PREFIX_BUDGET};
use crate::source::SourceModel;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

/// Number of strings per replicate: fixed, or Poisson with the given rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Population {
    Fixed(u64),
    Poisson(f64),
}

/// Samples below this count leave the normality diagnostics empty.
pub const MIN_DIAGNOSTIC_SAMPLES: usize = 8;

/// Per-replicate counts and their empirical summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub population: Population,
    pub replicates: usize,
    /// Canonical motif texts, aligned with per-motif columns.
    pub motifs: Vec<String>,
    pub weights: Vec<f64>,
    /// Strings actually built per replicate (varies under Poisson).
    pub string_counts: Vec<u64>,
    /// replicates x motifs occurrence matrix.
    pub counts: Vec<Vec<u64>>,
    /// Weighted combination per replicate.
    pub combo: Vec<f64>,
    pub empirical_mean: Vec<f64>,
    /// Unbiased per-motif variances.
    pub empirical_var: Vec<f64>,
    /// Unbiased covariance matrix of the count columns.
    pub empirical_cov: Vec<Vec<f64>>,
    pub combo_mean: f64,
    pub combo_var: f64,
    /// (Y - mean) / sd against the empirical moments; None when the sample
    /// is degenerate or has fewer than two replicates.
    pub standardized: Option<Vec<f64>>,
    /// Present once there are at least [`MIN_DIAGNOSTIC_SAMPLES`]
    /// nondegenerate replicates.
    pub diagnostics: Option<Diagnostics>,
}

impl SimulationSummary {
    /// Standardizes the combo against externally supplied moments (such as
    /// analytic mean and variance) instead of the empirical ones.
    pub fn standardized_against(&self, mean: f64, std_dev: f64) -> Vec<f64> {
        self.combo.iter().map(|y| (y - mean) / std_dev).collect()
    }
}

/// Runs `replicates` independent trie constructions and counts fringe
/// occurrences of every motif in the collection.
///
/// Deterministic in (source, collection, population, replicates, seed).
///
/// Panics if a Poisson population has a nonpositive or nonfinite rate.
pub fn simulate(
    source: &SourceModel,
    collection: &MotifCollection,
    population: Population,
    replicates: usize,
    seed: u64,
) -> Result<SimulationSummary, SimError> {
    simulate_with_budget(
        source,
        collection,
        population,
        replicates,
        seed,
        DEFAULT_PREFIX_BUDGET,
    )
}

/// [`simulate`] with an explicit per-string prefix budget.
pub fn simulate_with_budget(
    source: &SourceModel,
    collection: &MotifCollection,
    population: Population,
    replicates: usize,
    seed: u64,
    prefix_budget: usize,
) -> Result<SimulationSummary, SimError> {
    let shapes: Vec<_> = collection.shapes().cloned().collect();
    let poisson = match population {
        Population::Poisson(z) => {
            Some(Poisson::new(z).expect("Poisson rate must be positive and finite"))
        }
        Population::Fixed(_) => None,
    };

    let rows: Vec<(u64, Vec<u64>)> = (0..replicates)
        .into_par_iter()
        .map(|i| -> Result<(u64, Vec<u64>), SimError> {
            let block = (i as u64) << 32;
            let n = match population {
                Population::Fixed(n) => n,
                Population::Poisson(_) => {
                    let mut rng = ChaCha12Rng::seed_from_u64(seed);
                    rng.set_stream(block | 0xffff_ffff);
                    poisson.as_ref().unwrap().sample(&mut rng) as u64
                }
            };
            if n == 0 {
                return Ok((0, vec![0; shapes.len()]));
            }
            let mut streams: Vec<_> = (0..n).map(|j| source.stream(seed, block | j)).collect();
            let trie = build_trie(&mut streams, prefix_budget).map_err(|e| SimError::Build {
                replicate: i,
                source: e,
            })?;
            let mut counts = Vec::with_capacity(shapes.len());
            for shape in &shapes {
                let c =
                    count_fringe_occurrences(&trie.shape, shape).map_err(|e| SimError::Build {
                        replicate: i,
                        source: e,
                    })?;
                counts.push(c);
            }
            Ok((n, counts))
        })
        .collect::<Result<_, _>>()?;

    let (string_counts, counts): (Vec<u64>, Vec<Vec<u64>>) = rows.into_iter().unzip();
    summarize(
        population,
        collection.shapes().map(|s| s.encode()).collect(),
        collection.weights().collect(),
        string_counts,
        counts,
    )
}

/// Assembles the summary statistics from raw per-replicate counts.
pub(crate) fn summarize(
    population: Population,
    motifs: Vec<String>,
    weights: Vec<f64>,
    string_counts: Vec<u64>,
    counts: Vec<Vec<u64>>,
) -> Result<SimulationSummary, SimError> {
    let r = counts.len();
    if r == 0 {
        return Err(SimError::TooFewSamples { got: 0 });
    }
    let k = motifs.len();
    let combo: Vec<f64> = counts
        .iter()
        .map(|row| row.iter().zip(&weights).map(|(c, w)| *c as f64 * w).sum())
        .collect();

    let empirical_mean: Vec<f64> = (0..k)
        .map(|nu| counts.iter().map(|row| row[nu] as f64).sum::<f64>() / r as f64)
        .collect();
    let mut empirical_cov = vec![vec![0.0; k]; k];
    if r >= 2 {
        for row in &counts {
            for a in 0..k {
                let da = row[a] as f64 - empirical_mean[a];
                for b in a..k {
                    empirical_cov[a][b] += da * (row[b] as f64 - empirical_mean[b]);
                }
            }
        }
        for a in 0..k {
            for b in a..k {
                empirical_cov[a][b] /= (r - 1) as f64;
                empirical_cov[b][a] = empirical_cov[a][b];
            }
        }
    }
    let empirical_var: Vec<f64> = (0..k).map(|nu| empirical_cov[nu][nu]).collect();

    let combo_mean = combo.iter().sum::<f64>() / r as f64;
    let combo_var = if r >= 2 {
        combo
            .iter()
            .map(|y| (y - combo_mean) * (y - combo_mean))
            .sum::<f64>()
            / (r - 1) as f64
    } else {
        0.0
    };

    let standardized = if r >= 2 && combo_var > 0.0 {
        let sd = combo_var.sqrt();
        Some(
            combo
                .iter()
                .map(|y| (y - combo_mean) / sd)
                .collect::<Vec<f64>>(),
        )
    } else {
        None
    };
    let diagnostics = match &standardized {
        Some(samples) if r >= MIN_DIAGNOSTIC_SAMPLES => Some(normality_diagnostics(samples)?),
        _ => None,
    };

    Ok(SimulationSummary {
        population,
        replicates: r,
        motifs,
        weights,
        string_counts,
        counts,
        combo,
        empirical_mean,
        empirical_var,
        empirical_cov,
        combo_mean,
        combo_var,
        standardized,
        diagnostics,
    })
}
