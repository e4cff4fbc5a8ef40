//! Simulation harness and small-n exact distribution oracle.
//!
//! Three independent ways to see the same occurrence counts meet here:
//!
//! * [`simulate`]: build real tries from seeded streams (fixed-n or
//!   Poisson populations), count motif occurrences per replicate, and
//!   summarize empirical moments plus normality diagnostics;
//! * [`exact_distribution`]: the exact law of the weighted count for small
//!   n from the root-split recurrence, with degenerate all-in-one-child
//!   splits resolved algebraically;
//! * [`compare`]: z-score tables matching empirical moments against the
//!   analytic linear coefficients.
//!
//! Replicates are embarrassingly parallel; every replicate derives its own
//! deterministic random streams from (seed, replicate, string) so results
//! are bitwise reproducible regardless of thread scheduling.

pub mod compare;
pub mod exact;
pub mod sim;
pub mod stats;

pub use compare::{compare, ComparisonRow, ComparisonTable};
pub use exact::{exact_distribution, exact_distribution_with_limit, ExactPmf};
pub use sim::{simulate, Population, SimulationSummary};
pub use stats::{excess_kurtosis, ks_statistic, normality_diagnostics, skewness, Diagnostics};

use crate::motif::MotifError;
use crate::shape::ShapeError;
use std::fmt;

/// Default cap on n for the exact distribution recurrence.
pub const DEFAULT_N_MAX: u64 = 12;
/// Default cap on the alphabet size for the exact distribution recurrence.
pub const DEFAULT_M_MAX: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// The exact recurrence needs one common motif size.
    MixedMotifSizes { sizes: Vec<u32> },
    /// n or m beyond the recurrence guards.
    StateSpaceExceeded {
        n: u64,
        n_limit: u64,
        m: usize,
        m_limit: usize,
    },
    /// Sample standard deviation is zero; diagnostics undefined.
    DegenerateSample,
    /// Not enough samples for the requested statistic.
    TooFewSamples { got: usize },
    /// Analytic report and simulation summary describe different inputs.
    ShapeMismatch { detail: String },
    /// Trie construction failed inside a replicate.
    Build {
        replicate: usize,
        source: ShapeError,
    },
    /// Invalid motif input.
    Motif(MotifError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::MixedMotifSizes { sizes } => {
                write!(f, "exact distribution needs one common motif size, got {sizes:?}")
            }
            SimError::StateSpaceExceeded { n, n_limit, m, m_limit } => write!(
                f,
                "exact distribution limited to n <= {n_limit} and m <= {m_limit}, got n = {n}, m = {m}"
            ),
            SimError::DegenerateSample => write!(f, "sample variance is zero"),
            SimError::TooFewSamples { got } => {
                write!(f, "statistic undefined for {got} samples")
            }
            SimError::ShapeMismatch { detail } => write!(f, "mismatched inputs: {detail}"),
            SimError::Build { replicate, source } => {
                write!(f, "replicate {replicate}: {source}")
            }
            SimError::Motif(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SimError::Build { source, .. } => Some(source),
            SimError::Motif(e) => Some(e),
            _ => None,
        }
    }
}

impl From<MotifError> for SimError {
    fn from(e: MotifError) -> Self {
        SimError::Motif(e)
    }
}
