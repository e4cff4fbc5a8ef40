//! z-score comparison of empirical moments against analytic coefficients.
//!
//! Every analytic coefficient predicts a moment that grows linearly with
//! the population scale n (or Poisson rate z). The comparison standardizes
//! each empirical moment by its own sampling error:
//!
//! * means: standard error sd / sqrt(R);
//! * variances: Var(s^2) = (m4 - m2^2 (R-3)/(R-1)) / R with population
//!   central moments m2, m4;
//! * covariances: Var(c) ~ (m22 - c^2) / R with the mixed moment
//!   m22 = mean of (x - xbar)^2 (y - ybar)^2.
//!
//! Rows with |z| > 4 are flagged. The asymptotic coefficients carry O(1/n)
//! bias at finite n, so flags at small n indicate regime, not bugs.

use super::sim::SimulationSummary;
use super::{Population, SimError};
use crate::analytics::MomentReport;
use serde::Serialize;

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub empirical: f64,
    pub analytic: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub flagged: bool,
}

/// The full comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    /// Population scale the coefficients were multiplied by.
    pub scale: f64,
    pub replicates: usize,
    pub rows: Vec<ComparisonRow>,
    pub any_flagged: bool,
}

const FLAG_THRESHOLD: f64 = 4.0;

fn row(quantity: String, empirical: f64, analytic: f64, std_error: f64) -> ComparisonRow {
    // A zero standard error with zero discrepancy is a clean pass; with a
    // discrepancy it must flag without producing a non-finite value.
    let z_score = if std_error > 0.0 {
        ((empirical - analytic) / std_error).clamp(-1e300, 1e300)
    } else if empirical == analytic {
        0.0
    } else {
        1e300 * (empirical - analytic).signum()
    };
    ComparisonRow {
        quantity,
        empirical,
        analytic,
        std_error,
        flagged: z_score.abs() > FLAG_THRESHOLD,
        z_score,
    }
}

/// Central moments of one column: (m2, m4), population normalization.
fn column_moments(values: impl Iterator<Item = f64> + Clone, r: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / r as f64;
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    (m2 / r as f64, m4 / r as f64)
}

fn variance_std_error(m2: f64, m4: f64, r: usize) -> f64 {
    let rf = r as f64;
    ((m4 - m2 * m2 * (rf - 3.0) / (rf - 1.0)) / rf)
        .max(0.0)
        .sqrt()
}

/// Compares a simulation run against the analytic report that describes
/// the same source and collection.
pub fn compare(
    analytic: &MomentReport,
    empirical: &SimulationSummary,
) -> Result<ComparisonTable, SimError> {
    if analytic.motifs != empirical.motifs {
        return Err(SimError::ShapeMismatch {
            detail: format!(
                "analytic motifs {:?} vs simulated {:?}",
                analytic.motifs, empirical.motifs
            ),
        });
    }
    if analytic.weights != empirical.weights {
        return Err(SimError::ShapeMismatch {
            detail: format!(
                "analytic weights {:?} vs simulated {:?}",
                analytic.weights, empirical.weights
            ),
        });
    }
    let r = empirical.replicates;
    if r < 2 {
        return Err(SimError::TooFewSamples { got: r });
    }
    let scale = match empirical.population {
        Population::Fixed(n) => n as f64,
        Population::Poisson(z) => z,
    };

    let mut rows = Vec::new();
    for (nu, text) in empirical.motifs.iter().enumerate() {
        let column = empirical.counts.iter().map(move |row| row[nu] as f64);
        let (m2, m4) = column_moments(column, r);
        rows.push(row(
            format!("mean[{text}]"),
            empirical.empirical_mean[nu],
            analytic.mean_coeffs[nu] * scale,
            (empirical.empirical_var[nu] / r as f64).sqrt(),
        ));
        rows.push(row(
            format!("var[{text}]"),
            empirical.empirical_var[nu],
            analytic.var_coeffs[nu] * scale,
            variance_std_error(m2, m4, r),
        ));
    }
    for pair in &analytic.cov_coeffs {
        let (a, b) = (pair.first, pair.second);
        let mean_a = empirical.empirical_mean[a];
        let mean_b = empirical.empirical_mean[b];
        let (mut m11, mut m22) = (0.0, 0.0);
        for count_row in &empirical.counts {
            let da = count_row[a] as f64 - mean_a;
            let db = count_row[b] as f64 - mean_b;
            m11 += da * db;
            m22 += da * da * db * db;
        }
        m11 /= r as f64;
        m22 /= r as f64;
        let se = ((m22 - m11 * m11) / r as f64).max(0.0).sqrt();
        rows.push(row(
            format!("cov[{}, {}]", empirical.motifs[a], empirical.motifs[b]),
            empirical.empirical_cov[a][b],
            pair.coeff * scale,
            se,
        ));
    }
    let (combo_m2, combo_m4) = column_moments(empirical.combo.iter().copied(), r);
    rows.push(row(
        "combo_mean".to_string(),
        empirical.combo_mean,
        analytic.combo_mean_coeff * scale,
        (empirical.combo_var / r as f64).sqrt(),
    ));
    rows.push(row(
        "combo_var".to_string(),
        empirical.combo_var,
        analytic.combo_var_coeff * scale,
        variance_std_error(combo_m2, combo_m4, r),
    ));

    let any_flagged = rows.iter().any(|r| r.flagged);
    Ok(ComparisonTable {
        scale,
        replicates: r,
        rows,
        any_flagged,
    })
}
