//! Closed-form linear coefficients of the occurrence-count moments.
//!
//! All first and second moments of fringe occurrence counts grow linearly
//! in the number of strings n. With Q the shape functional, tau the motif
//! size, h the source entropy and `S(x) = sum_j p_j^x`, the coefficients
//! are, per motif:
//!
//! ```text
//! mean:      M = Q / (tau (tau - 1) h)
//! variance:  V = M - (2 Q^2 / (tau!^2 h)) * B(tau, tau) - M^2
//! ```
//!
//! and per nonoverlapping pair:
//!
//! ```text
//! covariance: C = -(2 Q Q~ / (tau! tau~! h)) * B(tau, tau~) - M M~
//! ```
//!
//! sharing one bracket
//!
//! ```text
//! B(a, b) = 2^-(a + b) (a + b - 2)!
//!         + sum_{j >= 0} (-1)^j (Sb(a + j) + Sb(b + j)) / 2 * (a + b + j - 2)! / j!
//! ```
//!
//! where `Sb(x) = S(x) / (1 - S(x))`. On the diagonal the first bracket
//! term reduces to the usual central binomial form,
//! `2^-2tau (2tau - 2)! = 2^-2tau binom(2tau, tau) tau!^2 / (2tau (2tau-1))`,
//! so variance and covariance genuinely share the implementation.
//!
//! The j-series alternates; its terms grow polynomially before the
//! geometric decay of Sb takes over, so summation stops only once terms
//! are both small and shrinking, and the first omitted term is reported
//! as the tail certificate.
//!
//! For a weighted collection `Y = sum_nu alpha_nu X_nu` the variance
//! coefficient is the quadratic form `sum alpha^2 V + 2 sum alpha alpha C`
//! over the per-motif values.

use super::oscillation::OscillationSeries;
use super::{
    AnalyticsError, MomentReport, OscMode, OscillationInfo, PairCoeff, TruncationInfo,
    DEFAULT_K_MAX, DEFAULT_SERIES_TOL,
};
use crate::motif::{check_nonoverlapping, shape_functional, MotifCollection, MotifError};
use crate::numeric::{ln_factorial, KahanSum};
use crate::shape::Shape;
use crate::source::{Periodicity, SourceModel};

/// Truncation certificate of one alternating j-series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCertificate {
    /// Magnitude of the first omitted term, scaled to the final coefficient.
    pub tail_bound: f64,
    pub j_terms: u32,
}

/// Options for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    /// Relative stop threshold for the alternating j-series.
    pub series_tol: f64,
    /// Harmonic cap for oscillation amplitude bounds.
    pub k_max: u32,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            series_tol: DEFAULT_SERIES_TOL,
            k_max: DEFAULT_K_MAX,
        }
    }
}

const J_CAP: u32 = 1_000;

fn require_size(motif: &Shape) -> Result<u64, AnalyticsError> {
    let size = motif.size();
    if size < 2 {
        return Err(MotifError::MotifTooSmall { index: 0, size }.into());
    }
    Ok(size as u64)
}

fn s_bar(source: &SourceModel, x: f64) -> f64 {
    let s = source.power_sum(x);
    s / (1.0 - s)
}

/// One signed j-series term: (-1)^j (Sb(a+j) + Sb(b+j))/2 * (a+b+j-2)!/j!.
fn j_term(source: &SourceModel, tau_a: u64, tau_b: u64, j: u32) -> f64 {
    let mean_s_bar =
        0.5 * (s_bar(source, (tau_a + j as u64) as f64) + s_bar(source, (tau_b + j as u64) as f64));
    if mean_s_bar == 0.0 {
        return 0.0;
    }
    let mut ln_ratio = 0.0;
    for i in 1..=(tau_a + tau_b - 2) {
        ln_ratio += ((j as u64 + i) as f64).ln();
    }
    let magnitude = mean_s_bar * ln_ratio.exp();
    if j % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

/// The shared bracket B(a, b) with its truncation certificate (tail bound
/// still in bracket units).
fn bracket_residue(
    source: &SourceModel,
    tau_a: u64,
    tau_b: u64,
    tol: f64,
) -> Result<(f64, SeriesCertificate), AnalyticsError> {
    let c = tau_a + tau_b - 2;
    let leading = (-((tau_a + tau_b) as f64) * std::f64::consts::LN_2 + ln_factorial(c)).exp();
    let mut acc = KahanSum::new();
    let mut prev_abs = f64::INFINITY;
    for j in 0..J_CAP {
        let term = j_term(source, tau_a, tau_b, j);
        acc.add(term);
        let abs = term.abs();
        let small_enough = abs <= tol * acc.value().abs().max(1.0);
        if j >= 4 && small_enough && abs <= prev_abs {
            let omitted = j_term(source, tau_a, tau_b, j + 1).abs();
            return Ok((
                leading + acc.value(),
                SeriesCertificate {
                    tail_bound: omitted,
                    j_terms: j + 1,
                },
            ));
        }
        prev_abs = abs;
    }
    Err(AnalyticsError::ToleranceUnreachable {
        requested: tol,
        achieved: prev_abs,
        levels: J_CAP,
    })
}

/// Covariance core -(2 Q_a Q_b / (tau_a! tau_b! h)) B(a, b) - M_a M_b.
///
/// Equals the covariance coefficient for distinct motifs; the variance
/// coefficient adds the mean coefficient on top of the diagonal case.
fn cov_core(
    source: &SourceModel,
    q_a: f64,
    tau_a: u64,
    q_b: f64,
    tau_b: u64,
    tol: f64,
) -> Result<(f64, SeriesCertificate), AnalyticsError> {
    let h = source.entropy();
    let (bracket, cert) = bracket_residue(source, tau_a, tau_b, tol)?;
    let prefactor = 2.0 * q_a * q_b * (-ln_factorial(tau_a) - ln_factorial(tau_b)).exp() / h;
    let m_a = mean_from(q_a, tau_a, h);
    let m_b = mean_from(q_b, tau_b, h);
    Ok((
        -prefactor * bracket - m_a * m_b,
        SeriesCertificate {
            tail_bound: prefactor * cert.tail_bound,
            j_terms: cert.j_terms,
        },
    ))
}

fn mean_from(q: f64, tau: u64, h: f64) -> f64 {
    q / ((tau * (tau - 1)) as f64 * h)
}

/// Coefficient of n in E[X_n].
pub fn mean_coefficient(source: &SourceModel, motif: &Shape) -> Result<f64, AnalyticsError> {
    let tau = require_size(motif)?;
    let q = shape_functional(source, motif)?;
    Ok(mean_from(q, tau, source.entropy()))
}

/// Coefficient of n in V[X_n], with certificate.
pub fn variance_coefficient_with_certificate(
    source: &SourceModel,
    motif: &Shape,
    series_tol: f64,
) -> Result<(f64, SeriesCertificate), AnalyticsError> {
    let tau = require_size(motif)?;
    let q = shape_functional(source, motif)?;
    let (core, cert) = cov_core(source, q, tau, q, tau, series_tol)?;
    Ok((mean_from(q, tau, source.entropy()) + core, cert))
}

/// Coefficient of n in V[X_n].
pub fn variance_coefficient(
    source: &SourceModel,
    motif: &Shape,
    series_tol: f64,
) -> Result<f64, AnalyticsError> {
    variance_coefficient_with_certificate(source, motif, series_tol).map(|(v, _)| v)
}

/// Coefficient of n in Cov[X_n, X~_n] for a nonoverlapping pair, with
/// certificate.
pub fn covariance_coefficient_with_certificate(
    source: &SourceModel,
    first: &Shape,
    second: &Shape,
    series_tol: f64,
) -> Result<(f64, SeriesCertificate), AnalyticsError> {
    let tau_a = require_size(first)?;
    let tau_b = require_size(second)?;
    check_nonoverlapping(&[first, second])?;
    let q_a = shape_functional(source, first)?;
    let q_b = shape_functional(source, second)?;
    cov_core(source, q_a, tau_a, q_b, tau_b, series_tol)
}

/// Coefficient of n in Cov[X_n, X~_n] for a nonoverlapping pair.
pub fn covariance_coefficient(
    source: &SourceModel,
    first: &Shape,
    second: &Shape,
    series_tol: f64,
) -> Result<f64, AnalyticsError> {
    covariance_coefficient_with_certificate(source, first, second, series_tol).map(|(v, _)| v)
}

/// Coefficient of n in V[Y_n] for the weighted collection
/// `Y = sum_nu alpha_nu X_nu`: the quadratic form of the per-motif
/// variance and covariance coefficients.
pub fn linear_combo_variance_coefficient(
    source: &SourceModel,
    collection: &MotifCollection,
    series_tol: f64,
) -> Result<f64, AnalyticsError> {
    let h = source.entropy();
    let entries = collection.entries();
    let mut data = Vec::with_capacity(entries.len());
    for (shape, alpha) in entries {
        let tau = require_size(shape)?;
        data.push((shape_functional(source, shape)?, tau, *alpha));
    }
    let mut total = KahanSum::new();
    for (i, &(q_a, tau_a, alpha_a)) in data.iter().enumerate() {
        total.add(alpha_a * alpha_a * mean_from(q_a, tau_a, h));
        for (k, &(q_b, tau_b, alpha_b)) in data.iter().enumerate().skip(i) {
            let (core, _) = cov_core(source, q_a, tau_a, q_b, tau_b, series_tol)?;
            // Off-diagonal pairs appear twice in the double sum.
            let weight = if k == i { 1.0 } else { 2.0 };
            total.add(weight * alpha_a * alpha_b * core);
        }
    }
    Ok(total.value())
}

/// Assembles the full analytic report for a collection.
pub fn analyze(
    source: &SourceModel,
    collection: &MotifCollection,
    options: AnalyzeOptions,
) -> Result<MomentReport, AnalyticsError> {
    let entries = collection.entries();
    let h = source.entropy();
    let mut motifs = Vec::with_capacity(entries.len());
    let mut weights = Vec::with_capacity(entries.len());
    let mut shape_functionals = Vec::with_capacity(entries.len());
    let mut mean_coeffs = Vec::with_capacity(entries.len());
    let mut var_coeffs = Vec::with_capacity(entries.len());
    let mut taus = Vec::with_capacity(entries.len());
    let mut series_tail: f64 = 0.0;
    let mut j_terms: u32 = 0;
    for (shape, alpha) in entries {
        let tau = require_size(shape)?;
        let q = shape_functional(source, shape)?;
        motifs.push(shape.encode());
        weights.push(*alpha);
        shape_functionals.push(q);
        mean_coeffs.push(mean_from(q, tau, h));
        let (core, cert) = cov_core(source, q, tau, q, tau, options.series_tol)?;
        var_coeffs.push(mean_from(q, tau, h) + core);
        series_tail = series_tail.max(cert.tail_bound);
        j_terms = j_terms.max(cert.j_terms);
        taus.push(tau);
    }
    let mut cov_coeffs = Vec::new();
    for i in 0..entries.len() {
        for k in (i + 1)..entries.len() {
            let (core, cert) = cov_core(
                source,
                shape_functionals[i],
                taus[i],
                shape_functionals[k],
                taus[k],
                options.series_tol,
            )?;
            series_tail = series_tail.max(cert.tail_bound);
            j_terms = j_terms.max(cert.j_terms);
            cov_coeffs.push(PairCoeff {
                first: i,
                second: k,
                coeff: core,
            });
        }
    }
    let combo_mean_coeff: f64 = weights.iter().zip(&mean_coeffs).map(|(a, m)| a * m).sum();
    let mut combo_var = KahanSum::new();
    for (a, v) in weights.iter().zip(&var_coeffs) {
        combo_var.add(a * a * v);
    }
    for pair in &cov_coeffs {
        combo_var.add(2.0 * weights[pair.first] * weights[pair.second] * pair.coeff);
    }

    let oscillation = match source.periodicity() {
        Periodicity::Aperiodic => OscillationInfo {
            mean: vec![OscMode::None; entries.len()],
            variance: vec![OscMode::None; entries.len()],
            covariance: vec![OscMode::None; cov_coeffs.len()],
            combo_variance: OscMode::None,
        },
        Periodicity::Periodic { .. } => {
            let mut mean_modes = Vec::with_capacity(entries.len());
            let mut pole_spacing = 0.0;
            for (shape, _) in entries {
                let series = OscillationSeries::mean_series(source, shape, options.k_max)?;
                pole_spacing = series.pole_spacing();
                mean_modes.push(OscMode::Series {
                    pole_spacing,
                    amplitude_bound: Some(series.amplitude_bound()),
                });
            }
            let unbounded = OscMode::Series {
                pole_spacing,
                amplitude_bound: None,
            };
            OscillationInfo {
                mean: mean_modes,
                variance: vec![unbounded.clone(); entries.len()],
                covariance: vec![unbounded.clone(); cov_coeffs.len()],
                combo_variance: unbounded,
            }
        }
    };

    Ok(MomentReport {
        motifs,
        weights,
        entropy: h,
        shape_functionals,
        mean_coeffs,
        var_coeffs,
        cov_coeffs,
        combo_mean_coeff,
        combo_var_coeff: combo_var.value(),
        oscillation,
        truncation: TruncationInfo {
            word_tail_bound: 0.0,
            series_tail_bound: series_tail,
            j_terms_used: j_terms,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::fixtures;

    const TOL: f64 = DEFAULT_SERIES_TOL;

    fn dna() -> SourceModel {
        SourceModel::new(vec![0.15, 0.35, 0.35, 0.15]).unwrap()
    }

    // Frozen against a 40-digit arbitrary-precision evaluation of the same
    // formulas.
    #[test]
    fn dna_pair_table() {
        let source = dna();
        let left = fixtures::dna_left_motif();
        let right = fixtures::dna_right_motif();
        let cases = [
            (
                mean_coefficient(&source, &left).unwrap(),
                6.114_545_467_047_153_2e-6,
            ),
            (
                mean_coefficient(&source, &right).unwrap(),
                5.178_491_593_079_440_8e-4,
            ),
            (
                variance_coefficient(&source, &left, TOL).unwrap(),
                6.114_360_165_890_124_7e-6,
            ),
            (
                variance_coefficient(&source, &right, TOL).unwrap(),
                5.165_200_633_882_218_8e-4,
            ),
            (
                covariance_coefficient(&source, &left, &right, TOL).unwrap(),
                -1.569_340_663_228_838_3e-8,
            ),
        ];
        for (got, want) in cases {
            assert!(
                (got - want).abs() <= 5e-12 * want.abs(),
                "coefficient {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn unbiased_binary_cherry() {
        let source = SourceModel::new(vec![0.5, 0.5]).unwrap();
        let cherry = fixtures::cherry();
        let mean = mean_coefficient(&source, &cherry).unwrap();
        let var = variance_coefficient(&source, &cherry, TOL).unwrap();
        assert!((mean - 0.360_673_760_222_240_85).abs() < 1e-14);
        assert!((var - 0.036_783_911_208_296_4).abs() < 1e-13);
    }

    #[test]
    fn unbiased_binary_three_leaf() {
        let source = SourceModel::new(vec![0.5, 0.5]).unwrap();
        let motif = Shape::decode("(L((LL)E))", 2).unwrap();
        let mean = mean_coefficient(&source, &motif).unwrap();
        let var = variance_coefficient(&source, &motif, TOL).unwrap();
        assert!((mean - 0.011_271_055_006_945).abs() < 1e-14);
        assert!((var - 0.010_798_598_606_644_5).abs() < 1e-13);
    }

    #[test]
    fn ternary_star() {
        let source = SourceModel::new(vec![0.2, 0.3, 0.5]).unwrap();
        let motif = Shape::decode("(LLL)", 3).unwrap();
        assert!((shape_functional(&source, &motif).unwrap() - 0.18).abs() < 1e-15);
        let mean = mean_coefficient(&source, &motif).unwrap();
        let var = variance_coefficient(&source, &motif, TOL).unwrap();
        assert!((mean - 0.029_136_028_924_515_52).abs() < 1e-14);
        assert!((var - 0.025_917_842_598_282_583).abs() < 1e-13);
    }

    #[test]
    fn combo_equals_quadratic_form() {
        let source = dna();
        let left = fixtures::dna_left_motif();
        let right = fixtures::dna_right_motif();
        for (a1, a2) in [(1.0, 1.0), (2.0, -1.0), (0.3, 0.7)] {
            let collection =
                MotifCollection::new(vec![(left.clone(), a1), (right.clone(), a2)]).unwrap();
            let combo = linear_combo_variance_coefficient(&source, &collection, TOL).unwrap();
            let v1 = variance_coefficient(&source, &left, TOL).unwrap();
            let v2 = variance_coefficient(&source, &right, TOL).unwrap();
            let c = covariance_coefficient(&source, &left, &right, TOL).unwrap();
            let direct = a1 * a1 * v1 + a2 * a2 * v2 + 2.0 * a1 * a2 * c;
            assert!(
                (combo - direct).abs() <= 1e-10 * direct.abs().max(1e-10),
                "combo {combo:e} vs direct {direct:e}"
            );
        }
    }

    #[test]
    fn covariance_rejects_overlapping_pairs() {
        let source = SourceModel::new(vec![0.5, 0.5]).unwrap();
        let cherry = fixtures::cherry();
        let taller = Shape::decode("((LL)L)", 2).unwrap();
        let err = covariance_coefficient(&source, &cherry, &taller, TOL).unwrap_err();
        assert!(matches!(
            err,
            AnalyticsError::Motif(MotifError::OverlappingMotifs { .. })
        ));
    }

    #[test]
    fn single_leaf_motifs_are_rejected() {
        let source = SourceModel::new(vec![0.5, 0.5]).unwrap();
        let err = mean_coefficient(&source, &Shape::external()).unwrap_err();
        assert!(matches!(
            err,
            AnalyticsError::Motif(MotifError::MotifTooSmall { size: 1, .. })
        ));
    }

    #[test]
    fn report_assembles_all_quantities() {
        let source = dna();
        let collection = MotifCollection::new(vec![
            (fixtures::dna_left_motif(), 1.0),
            (fixtures::dna_right_motif(), 1.0),
        ])
        .unwrap();
        let report = analyze(&source, &collection, AnalyzeOptions::default()).unwrap();
        assert_eq!(report.motifs.len(), 2);
        assert_eq!(report.cov_coeffs.len(), 1);
        assert_eq!(report.cov_coeffs[0].first, 0);
        assert_eq!(report.cov_coeffs[0].second, 1);
        let expect_combo =
            report.var_coeffs[0] + report.var_coeffs[1] + 2.0 * report.cov_coeffs[0].coeff;
        assert!((report.combo_var_coeff - expect_combo).abs() < 1e-18);
        let expect_mean = report.mean_coeffs[0] + report.mean_coeffs[1];
        assert!((report.combo_mean_coeff - expect_mean).abs() < 1e-18);
        // DNA probabilities are not commensurable.
        assert!(report.oscillation.mean.iter().all(|m| *m == OscMode::None));
        assert_eq!(report.oscillation.combo_variance, OscMode::None);
        assert!(report.truncation.series_tail_bound < 1e-12);
        assert!(report.truncation.j_terms_used > 4);
    }

    #[test]
    fn report_flags_periodic_sources() {
        let source = SourceModel::new(vec![0.25, 0.25, 0.5]).unwrap();
        let collection =
            MotifCollection::new(vec![(Shape::decode("(LLL)", 3).unwrap(), 1.0)]).unwrap();
        let report = analyze(&source, &collection, AnalyzeOptions::default()).unwrap();
        match &report.oscillation.mean[0] {
            OscMode::Series {
                pole_spacing,
                amplitude_bound,
            } => {
                assert!(
                    (pole_spacing - 2.0 * std::f64::consts::PI / std::f64::consts::LN_2).abs()
                        < 1e-12
                );
                let bound = amplitude_bound.expect("mean amplitude bound");
                assert!(bound > 0.0);
                // The bound dominates sampled oscillation values.
                let series = OscillationSeries::mean_series(
                    &source,
                    collection.shapes().next().unwrap(),
                    16,
                )
                .unwrap();
                for i in 0..50 {
                    let x = 1e4 * (1.0 + i as f64 / 50.0);
                    assert!(series.eval(x).abs() <= bound);
                }
            }
            other => panic!("expected periodic mode, got {other:?}"),
        }
        match &report.oscillation.combo_variance {
            OscMode::Series {
                amplitude_bound, ..
            } => assert!(amplitude_bound.is_none()),
            other => panic!("expected periodic mode, got {other:?}"),
        }
    }
}
