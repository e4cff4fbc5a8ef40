//! Fringe motif statistics for random m-ary tries.
//!
//! A trie routes strings by successive symbols: all strings sharing first
//! symbol j go into subtree j, external nodes hold one string each. This
//! crate counts *fringe occurrences* of fixed subtree shapes (motifs) in
//! tries built over random strings from a memoryless source, and provides
//! both sides of the moment story:
//!
//! * exact word-sum means and an exact small-n distribution oracle,
//! * the asymptotic linear coefficients of the mean, variance, and
//!   covariance of occurrence counts (with oscillation metadata for
//!   periodic sources and truncation-error certificates), and
//! * a seeded, reproducible simulation harness with normality diagnostics
//!   for validating the central limit behavior of weighted occurrence
//!   counts.
//!
//! # Modules
//!
//! * [`source`] - memoryless probability sources, entropy, periodicity
//!   classification, deterministic symbol streams.
//! * [`shape`] - canonical trie shapes, word tuples, trie construction,
//!   fringe counting, the `(LL)`-style text codec.
//! * [`motif`] - shape functionals Q(T), nonoverlap validation, weighted
//!   collections, cousin enumeration and mass.
//! * [`analytics`] - exact and asymptotic moment formulas, oscillation
//!   series, the numeric poissonized variance oracle.
//! * [`montecarlo`] - simulation, empirical moments, normality diagnostics,
//!   the exact distribution recurrence.
//! * [`cli`] - the command-line front end (`analyze`, `simulate`,
//!   `compare`, `cousins`, `validate`, `oracle`).
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example analyze_dna            # moment table for two 4-ary motifs
//! cargo run --example build_and_count        # trie construction and fringe counting
//! cargo run --example oscillation_profile    # periodic-source oscillation series
//! cargo run --example cousins                # tau-cousin enumeration and mass
//! cargo run --example exact_pmf              # small-n exact distribution vs simulation
//! cargo run --example poissonized_variance   # variance coefficient vs numeric oracle
//! cargo run --example clt_simulation         # KS/skewness/kurtosis at growing n
//! ```

pub mod analytics;
pub mod cli;
pub mod montecarlo;
pub mod motif;
mod numeric;
pub mod shape;
pub mod source;
