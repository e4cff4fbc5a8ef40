//! Poissonized variance oracle.
//!
//! With a Poisson(z) number of strings, the occurrence counts admit exact
//! word-sum expressions for second moments. For the weighted collection
//! `Y = sum_nu alpha_nu X_nu` the variance splits as
//!
//! ```text
//! v(z) = v1 - v2 - 2 v3
//! v1   = sum_nu alpha_nu^2 (Q_nu / tau_nu!) W(tau_nu, 1)
//! v2   = sum_{kappa,nu} pref * W(tau_kappa + tau_nu, 2)
//! v3   = sum_{kappa,nu} pref * sum_{j>=0} (-1)^j / j! * Sb(tau_nu + j)
//!                       * W(tau_kappa + tau_nu + j, 1)
//! ```
//!
//! where `pref = alpha_kappa alpha_nu Q_kappa Q_nu / (tau_kappa! tau_nu!)`,
//! `W(a, lam) = sum_w mult(w) (z P(w))^a e^(-lam z P(w))` ranges over all
//! prefixes aggregated by composition, and `Sb(x) = S(x) / (1 - S(x))`
//! collapses the inner sum over strict descendants of w.
//!
//! The j-series terms carry ratios `(a + j - 1)! / j!` between the word
//! sums, polynomial in j, so after the geometric `Sb` decay kicks in they
//! shrink like `pmax^j`. Each term is evaluated as one pass over the word
//! atlas with `1/j!` and `Sb` folded into the per-word exponent; splitting
//! them out would overflow the bare word sum long before the product does.
//!
//! Depoissonization: the fixed-n variance coefficient is the z -> infinity
//! limit of `v(z)/z - (dE/dz)^2`, which [`coefficient_estimate`] evaluates
//! at finite z as an independent check on the closed forms.

use super::wordsum::poissonized_mean_derivative;
use super::{AnalyticsError, DEFAULT_MAX_LEVELS, DEFAULT_SERIES_TOL, DEFAULT_WORD_TOL};
use crate::motif::{shape_functional, MotifCollection};
use crate::numeric::{for_each_composition, ln_factorial, ln_multinomial, KahanSum};
use crate::source::SourceModel;

/// v(z) with its truncation certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonizedVariance {
    pub value: f64,
    /// Bound on the contribution of word levels beyond the cutoff.
    pub word_tail_bound: f64,
    /// Bound on the effect of j-series truncation on the value: first
    /// omitted term per pair, times the weight the pair carries in v(z).
    pub series_tail_bound: f64,
    pub levels_used: u32,
    pub j_terms_used: u32,
}

/// Finite-z estimate of the variance coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientEstimate {
    /// v(z)/z - (dE/dz)^2.
    pub estimate: f64,
    pub poissonized: PoissonizedVariance,
    /// dE/dz of the weighted combination.
    pub mean_derivative: f64,
    pub mean_derivative_tail: f64,
}

const J_CAP: u32 = 1_000;

/// All prefixes up to a level cap, aggregated by composition.
struct Atlas {
    /// (ln P(w), ln multiplicity) per composition.
    entries: Vec<(f64, f64)>,
}

impl Atlas {
    fn build(source: &SourceModel, levels: u32) -> Self {
        let ln_probs: Vec<f64> = source.probs().iter().map(|p| p.ln()).collect();
        let mut entries = Vec::new();
        for level in 0..=levels {
            for_each_composition(level, ln_probs.len(), |counts| {
                let mut ln_p = 0.0;
                for (count, lp) in counts.iter().zip(&ln_probs) {
                    ln_p += *count as f64 * lp;
                }
                entries.push((ln_p, ln_multinomial(level, counts)));
            });
        }
        Atlas { entries }
    }

    /// `sum_w mult (zP)^a e^(-lam zP + shift)` with the shift applied in
    /// log space per word.
    fn word_sum(&self, z: f64, a: f64, lam: f64, shift: f64) -> f64 {
        let ln_z = z.ln();
        let mut sum = KahanSum::new();
        for &(ln_p, ln_mult) in &self.entries {
            sum.add((ln_mult + a * (ln_p + ln_z) - lam * z * ln_p.exp() + shift).exp());
        }
        sum.value()
    }
}

struct MotifData {
    alpha: f64,
    q: f64,
    tau: u64,
}

/// Word-tail bound for the full v(z) when truncating after `levels` levels.
///
/// Valid once `z * pmax^(levels+1) <= 1`; returns infinity below that, which
/// simply forces more levels.
fn word_tail(source: &SourceModel, data: &[MotifData], z: f64, levels: u32) -> f64 {
    let pmax = source.max_prob();
    if z * pmax.powi(levels as i32 + 1) > 1.0 {
        return f64::INFINITY;
    }
    let geometric = |a: f64| -> f64 {
        let s = source.power_sum(a);
        (a * z.ln() + (levels as f64 + 1.0) * s.ln() - (1.0 - s).ln()).exp()
    };
    let s_bar = |a: f64| -> f64 {
        let s = source.power_sum(a);
        s / (1.0 - s)
    };
    let mut bound = 0.0;
    for d in data {
        bound += d.alpha * d.alpha * d.q * (-ln_factorial(d.tau)).exp() * geometric(d.tau as f64);
    }
    for dk in data {
        for dn in data {
            let pref = (dk.alpha * dn.alpha * dk.q * dn.q).abs()
                * (-ln_factorial(dk.tau) - ln_factorial(dn.tau)).exp();
            let a = (dk.tau + dn.tau) as f64;
            // v2 term, then the v3 j-series summed against the
            // (z pmax^(L+1))^j / j! envelope, at most e once that base
            // drops below one; the leading 2 matches the -2 v3 in v(z).
            bound += pref * geometric(a);
            bound += 2.0 * pref * std::f64::consts::E * s_bar(dn.tau as f64) * geometric(a);
        }
    }
    bound
}

/// Exact poissonized variance of the weighted occurrence count at rate z.
pub fn exact_poissonized_variance(
    source: &SourceModel,
    collection: &MotifCollection,
    z: f64,
    word_tol: f64,
    series_tol: f64,
    max_levels: u32,
) -> Result<PoissonizedVariance, AnalyticsError> {
    let mut data = Vec::new();
    for (shape, alpha) in collection.entries() {
        data.push(MotifData {
            alpha: *alpha,
            q: shape_functional(source, shape)?,
            tau: shape.size() as u64,
        });
    }

    let mut levels = (z.max(1.0).ln() / (1.0 / source.max_prob()).ln()).ceil() as u32 + 1;
    while word_tail(source, &data, z, levels) > word_tol {
        levels += 1;
        if levels > max_levels {
            return Err(AnalyticsError::ToleranceUnreachable {
                requested: word_tol,
                achieved: word_tail(source, &data, z, max_levels),
                levels: max_levels,
            });
        }
    }
    let atlas = Atlas::build(source, levels);

    let mut v1 = KahanSum::new();
    for d in &data {
        let pref = d.alpha * d.alpha * d.q * (-ln_factorial(d.tau)).exp();
        v1.add(pref * atlas.word_sum(z, d.tau as f64, 1.0, 0.0));
    }

    let mut v2 = KahanSum::new();
    let mut v3 = KahanSum::new();
    let mut series_tail = 0.0;
    let mut j_terms_used = 0;
    for dk in &data {
        for dn in &data {
            let pref = dk.alpha
                * dn.alpha
                * dk.q
                * dn.q
                * (-ln_factorial(dk.tau) - ln_factorial(dn.tau)).exp();
            let a = (dk.tau + dn.tau) as f64;
            v2.add(pref * atlas.word_sum(z, a, 2.0, 0.0));

            // The j-series for this pair; 1/j! and Sb are folded into the
            // word-sum exponent.
            let term_at = |j: u32| -> f64 {
                let s = source.power_sum((dn.tau + j as u64) as f64);
                if s == 0.0 {
                    return 0.0;
                }
                let shift = -ln_factorial(j as u64) + s.ln() - (1.0 - s).ln();
                let magnitude = atlas.word_sum(z, a + j as f64, 1.0, shift);
                if j % 2 == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            };
            let mut acc = KahanSum::new();
            let mut prev_abs = f64::INFINITY;
            let mut done = false;
            for j in 0..J_CAP {
                let term = term_at(j);
                acc.add(term);
                let abs = term.abs();
                if j >= 4 && abs <= prev_abs && abs <= series_tol * acc.value().abs().max(1.0) {
                    // v(z) carries -2 v3, so the omitted series remainder
                    // moves the value by at most twice its own size.
                    series_tail += 2.0 * pref.abs() * term_at(j + 1).abs();
                    j_terms_used = j_terms_used.max(j + 1);
                    done = true;
                    break;
                }
                prev_abs = abs;
            }
            if !done {
                return Err(AnalyticsError::ToleranceUnreachable {
                    requested: series_tol,
                    achieved: prev_abs,
                    levels: J_CAP,
                });
            }
            v3.add(pref * acc.value());
        }
    }

    Ok(PoissonizedVariance {
        value: v1.value() - v2.value() - 2.0 * v3.value(),
        word_tail_bound: word_tail(source, &data, z, levels),
        series_tail_bound: series_tail,
        levels_used: levels + 1,
        j_terms_used,
    })
}

/// Finite-z depoissonized estimate `v(z)/z - (dE/dz)^2` of the combo
/// variance coefficient.
pub fn coefficient_estimate(
    source: &SourceModel,
    collection: &MotifCollection,
    z: f64,
    word_tol: f64,
    series_tol: f64,
    max_levels: u32,
) -> Result<CoefficientEstimate, AnalyticsError> {
    let poissonized =
        exact_poissonized_variance(source, collection, z, word_tol, series_tol, max_levels)?;
    let mut derivative = KahanSum::new();
    let mut derivative_tail = 0.0;
    for (shape, alpha) in collection.entries() {
        let d = poissonized_mean_derivative(source, shape, z, word_tol, max_levels)?;
        derivative.add(alpha * d.value);
        derivative_tail += alpha.abs() * d.tail_bound;
    }
    let de = derivative.value();
    Ok(CoefficientEstimate {
        estimate: poissonized.value / z - de * de,
        poissonized,
        mean_derivative: de,
        mean_derivative_tail: derivative_tail,
    })
}

/// Convenience wrapper with the module default tolerances.
pub fn coefficient_estimate_default(
    source: &SourceModel,
    collection: &MotifCollection,
    z: f64,
) -> Result<CoefficientEstimate, AnalyticsError> {
    coefficient_estimate(
        source,
        collection,
        z,
        DEFAULT_WORD_TOL,
        DEFAULT_SERIES_TOL,
        DEFAULT_MAX_LEVELS,
    )
}
