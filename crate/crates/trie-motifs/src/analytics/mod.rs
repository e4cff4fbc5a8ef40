//! Exact and asymptotic moment engine.
//!
//! Two independent routes to the same second-order quantities live here, and
//! the test suite insists they agree:
//!
//! * closed-form linear coefficients (mean, variance, covariance of fringe
//!   occurrence counts grow linearly in n; the coefficients involve the
//!   shape functional, the entropy, and one alternating series), and
//! * numeric word-sum oracles (the exact fixed-n mean, the poissonized mean
//!   B1(z), and the poissonized variance v(z) = v1 - v2 - 2 v3) that
//!   converge to the same coefficients as n or z grows.
//!
//! Periodic sources additively perturb every coefficient by tiny bounded
//! oscillations; the explicit residue series is implemented for the mean
//! (module [`oscillation`]) and reported as metadata for the second-order
//! quantities, where no closed form is available.

pub mod coefficients;
pub mod gamma;
pub mod oscillation;
pub mod vsum;
pub mod wordsum;

pub use coefficients::{
    analyze, covariance_coefficient, covariance_coefficient_with_certificate,
    linear_combo_variance_coefficient, mean_coefficient, variance_coefficient,
    variance_coefficient_with_certificate, AnalyzeOptions, SeriesCertificate,
};
pub use gamma::complex_log_gamma;
pub use oscillation::{oscillation_xi, oscillation_xi_default, OscillationSeries};
pub use vsum::{
    coefficient_estimate, coefficient_estimate_default, exact_poissonized_variance,
    CoefficientEstimate, PoissonizedVariance,
};
pub use wordsum::{
    exact_mean, exact_mean_closed_form, exact_mean_default, poissonized_mean_b1,
    poissonized_mean_derivative, ExactMean, TailedValue,
};

use crate::motif::MotifError;
use serde::Serialize;
use std::fmt;

/// Default absolute tolerance for word-sum tails.
pub const DEFAULT_WORD_TOL: f64 = 1e-12;
/// Default magnitude threshold ending the alternating j-series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;
/// Level cap for word sums; hitting it raises `ToleranceUnreachable`.
pub const DEFAULT_MAX_LEVELS: u32 = 100_000;
/// Default number of oscillation harmonics; |Gamma| decay makes anything
/// beyond a handful numerically invisible.
pub const DEFAULT_K_MAX: u32 = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticsError {
    /// Word-sum level cap hit before the tail certificate met the tolerance.
    ToleranceUnreachable {
        requested: f64,
        achieved: f64,
        levels: u32,
    },
    /// log Gamma evaluated at a pole.
    PoleAtNonpositiveInteger { re: f64 },
    /// Oscillation series requested for a source with no commensurable base.
    NotCommensurable,
    /// Invalid motif input (size, arity, overlap).
    Motif(MotifError),
}

impl fmt::Display for AnalyticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticsError::ToleranceUnreachable {
                requested,
                achieved,
                levels,
            } => write!(
                f,
                "tail bound {achieved:e} still above tolerance {requested:e} after {levels} levels"
            ),
            AnalyticsError::PoleAtNonpositiveInteger { re } => {
                write!(f, "log Gamma pole at nonpositive integer {re}")
            }
            AnalyticsError::NotCommensurable => {
                write!(
                    f,
                    "source has no commensurable base; oscillation series undefined"
                )
            }
            AnalyticsError::Motif(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AnalyticsError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            AnalyticsError::Motif(e) => Some(e),
            _ => None,
        }
    }
}

impl From<MotifError> for AnalyticsError {
    fn from(e: MotifError) -> Self {
        AnalyticsError::Motif(e)
    }
}

/// Oscillation metadata for one reported quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode")]
pub enum OscMode {
    /// Aperiodic source: the fluctuating term is identically zero.
    None,
    /// Periodic source: poles spaced `pole_spacing` = 2*pi/ln(1/r) apart.
    /// `amplitude_bound` is populated where the residue series is explicit
    /// (the mean); the second-order oscillations have no closed form and
    /// carry no bound.
    Series {
        pole_spacing: f64,
        amplitude_bound: Option<f64>,
    },
}

/// Per-quantity oscillation metadata of a [`MomentReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationInfo {
    pub mean: Vec<OscMode>,
    pub variance: Vec<OscMode>,
    /// One entry per unordered motif pair, same order as `cov_coeffs`.
    pub covariance: Vec<OscMode>,
    pub combo_variance: OscMode,
}

/// Truncation-error certificates accumulated while assembling a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationInfo {
    /// Geometric word-sum tail (zero when no word sums were needed).
    pub word_tail_bound: f64,
    /// Largest first-omitted-term magnitude across the alternating series.
    pub series_tail_bound: f64,
    /// Largest j index consumed by any alternating series.
    pub j_terms_used: u32,
}

/// Covariance coefficient for one unordered motif pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCoeff {
    pub first: usize,
    pub second: usize,
    pub coeff: f64,
}

/// The analytic linear coefficients for a motif collection: E, V and Cov of
/// the occurrence counts all grow like coeff * n, and V[Y] of the weighted
/// combination like `combo_var_coeff` * n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    /// Canonical motif texts, aligned with all per-motif vectors.
    pub motifs: Vec<String>,
    pub weights: Vec<f64>,
    /// Source entropy h, the normalizer in every leading coefficient.
    pub entropy: f64,
    pub shape_functionals: Vec<f64>,
    pub mean_coeffs: Vec<f64>,
    pub var_coeffs: Vec<f64>,
    pub cov_coeffs: Vec<PairCoeff>,
    /// Coefficient of n in E[Y]: sum of weighted mean coefficients.
    pub combo_mean_coeff: f64,
    pub combo_var_coeff: f64,
    pub oscillation: OscillationInfo,
    pub truncation: TruncationInfo,
}
