//! Numeric word-sum oracles for the occurrence-count mean.
//!
//! Every formula here sums over all prefixes w (the candidate fringe
//! positions), grouped by level. At level l the words are aggregated by
//! their symbol-count composition (c_1, ..., c_m): each composition stands
//! for multinomial(l; c) words sharing the probability P = prod p_j^{c_j},
//! so a level costs O(l^{m-1}) terms instead of m^l.
//!
//! Implemented quantities, with Q the shape functional and tau the motif
//! size:
//!
//! * exact fixed-n mean
//!   `E[X_n] = C(n, tau) Q sum_w P(w)^tau (1 - P(w))^(n - tau)`,
//!   with the geometric tail certificate
//!   `tail <= C(n, tau) Q S(tau)^(L+1) / (1 - S(tau))`
//!   where `S(x) = sum_j p_j^x`;
//! * the same mean in closed form by expanding the binomial,
//!   `E[X_n] = C(n, tau) Q sum_i (-1)^i C(n - tau, i) / (1 - S(tau + i))`,
//!   exact but alternating, so only trusted for small n;
//! * poissonized mean `(Q / tau!) B1(z)` with
//!   `B1(z) = sum_w (P(w) z)^tau e^(-P(w) z)`, and its z-derivative.
//!
//! The first two routes share no code and serve as each other's oracle.

use super::{AnalyticsError, DEFAULT_MAX_LEVELS, DEFAULT_WORD_TOL};
use crate::motif::{shape_functional, MotifError};
use crate::numeric::{for_each_composition, ln_binomial, ln_factorial, ln_multinomial, KahanSum};
use crate::shape::Shape;
use crate::source::SourceModel;

/// A word-sum result with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailedValue {
    pub value: f64,
    /// Upper bound on the discarded levels' contribution.
    pub tail_bound: f64,
    pub levels_used: u32,
}

/// Exact fixed-n mean with its certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMean {
    pub value: f64,
    pub tail_bound: f64,
    pub levels_used: u32,
    /// True when n < tau, where the count is deterministically zero.
    pub too_few_strings: bool,
}

fn require_size(motif: &Shape) -> Result<u64, AnalyticsError> {
    let size = motif.size();
    if size < 2 {
        return Err(MotifError::MotifTooSmall { index: 0, size }.into());
    }
    Ok(size as u64)
}

/// Sums `f(ln_mult, ln_p)` over all words of one level, aggregated by
/// composition.
fn level_sum<F: Fn(f64, f64) -> f64>(ln_probs: &[f64], level: u32, f: &F) -> f64 {
    let mut sum = KahanSum::new();
    for_each_composition(level, ln_probs.len(), |counts| {
        let mut ln_p = 0.0;
        for (count, lp) in counts.iter().zip(ln_probs) {
            ln_p += *count as f64 * lp;
        }
        sum.add(f(ln_multinomial(level, counts), ln_p));
    });
    sum.value()
}

/// Runs the level loop until `tail_of(level + 1) <= tol` or the cap hits.
fn levelled_sum<F, T>(
    ln_probs: &[f64],
    term: &F,
    tail_of: &T,
    tol: f64,
    max_levels: u32,
) -> Result<TailedValue, AnalyticsError>
where
    F: Fn(f64, f64) -> f64,
    T: Fn(u32) -> f64,
{
    let mut total = KahanSum::new();
    for level in 0..max_levels {
        total.add(level_sum(ln_probs, level, term));
        let tail = tail_of(level + 1);
        if tail <= tol {
            return Ok(TailedValue {
                value: total.value(),
                tail_bound: tail,
                levels_used: level + 1,
            });
        }
    }
    Err(AnalyticsError::ToleranceUnreachable {
        requested: tol,
        achieved: tail_of(max_levels),
        levels: max_levels,
    })
}

/// E[X_{n,T}] by direct word summation.
pub fn exact_mean(
    source: &SourceModel,
    motif: &Shape,
    n: u64,
    tol: f64,
    max_levels: u32,
) -> Result<ExactMean, AnalyticsError> {
    let tau = require_size(motif)?;
    let q = shape_functional(source, motif)?;
    if n < tau {
        return Ok(ExactMean {
            value: 0.0,
            tail_bound: 0.0,
            levels_used: 0,
            too_few_strings: true,
        });
    }
    let ln_outer = ln_binomial(n, tau) + q.ln();
    let s_tau = source.power_sum(tau as f64);
    let tau_f = tau as f64;
    let n_minus_tau = (n - tau) as f64;
    let term = move |ln_mult: f64, ln_p: f64| {
        // (1 - P)^(n - tau): ln_1p(-P) is -inf for the empty prefix
        // (P = 1), where the exponent n - tau = 0 must win.
        let tail_factor = if n == tau {
            0.0
        } else {
            n_minus_tau * (-ln_p.exp()).ln_1p()
        };
        (ln_mult + tau_f * ln_p + tail_factor).exp()
    };
    let tail_of =
        move |levels: u32| (ln_outer + (levels as f64) * s_tau.ln() - (1.0 - s_tau).ln()).exp();
    let ln_probs: Vec<f64> = source.probs().iter().map(|p| p.ln()).collect();
    let inner = levelled_sum(&ln_probs, &term, &tail_of, tol, max_levels)?;
    Ok(ExactMean {
        value: ln_outer.exp() * inner.value,
        tail_bound: inner.tail_bound,
        levels_used: inner.levels_used,
        too_few_strings: false,
    })
}

/// E[X_{n,T}] in closed form via the binomial expansion of (1 - P)^(n - tau).
///
/// Exact and fast, but the alternating binomial sum loses digits once n is
/// large; intended as an independent small-n oracle for [`exact_mean`].
pub fn exact_mean_closed_form(
    source: &SourceModel,
    motif: &Shape,
    n: u64,
) -> Result<f64, AnalyticsError> {
    let tau = require_size(motif)?;
    let q = shape_functional(source, motif)?;
    if n < tau {
        return Ok(0.0);
    }
    let mut sum = KahanSum::new();
    for i in 0..=(n - tau) {
        let ln_term = ln_binomial(n - tau, i) - (1.0 - source.power_sum((tau + i) as f64)).ln();
        let signed = if i % 2 == 0 {
            ln_term.exp()
        } else {
            -ln_term.exp()
        };
        sum.add(signed);
    }
    Ok((ln_binomial(n, tau) + q.ln()).exp() * sum.value())
}

/// Poissonized mean `(Q / tau!) sum_w (P(w) z)^tau e^(-P(w) z)`.
pub fn poissonized_mean_b1(
    source: &SourceModel,
    motif: &Shape,
    z: f64,
    tol: f64,
    max_levels: u32,
) -> Result<TailedValue, AnalyticsError> {
    let tau = require_size(motif)?;
    let q = shape_functional(source, motif)?;
    let ln_outer = q.ln() - ln_factorial(tau);
    let tau_f = tau as f64;
    let ln_z = z.ln();
    let s_tau = source.power_sum(tau_f);
    let term =
        move |ln_mult: f64, ln_p: f64| (ln_mult + tau_f * (ln_p + ln_z) - ln_p.exp() * z).exp();
    // e^(-Pz) <= 1, so the level-l words contribute at most (z^tau) S(tau)^l.
    let tail_of = move |levels: u32| {
        (ln_outer + tau_f * ln_z + (levels as f64) * s_tau.ln() - (1.0 - s_tau).ln()).exp()
    };
    let ln_probs: Vec<f64> = source.probs().iter().map(|p| p.ln()).collect();
    let inner = levelled_sum(&ln_probs, &term, &tail_of, tol, max_levels)?;
    Ok(TailedValue {
        value: ln_outer.exp() * inner.value,
        tail_bound: inner.tail_bound,
        levels_used: inner.levels_used,
    })
}

/// z-derivative of the poissonized mean.
///
/// Per word, `d/dz (Pz)^tau e^(-Pz) = P^tau z^(tau-1) e^(-Pz) (tau - Pz)`.
pub fn poissonized_mean_derivative(
    source: &SourceModel,
    motif: &Shape,
    z: f64,
    tol: f64,
    max_levels: u32,
) -> Result<TailedValue, AnalyticsError> {
    let tau = require_size(motif)?;
    let q = shape_functional(source, motif)?;
    let ln_outer = q.ln() - ln_factorial(tau);
    let tau_f = tau as f64;
    let ln_z = z.ln();
    let s_tau = source.power_sum(tau_f);
    let s_tau1 = source.power_sum(tau_f + 1.0);
    let term = move |ln_mult: f64, ln_p: f64| {
        let zp = ln_p.exp() * z;
        let x = (ln_mult + (tau_f - 1.0) * (ln_p + ln_z) + ln_p - zp).exp();
        x * (tau_f - zp)
    };
    // |tau - Pz| <= tau + Pz splits the level bound into an S(tau) and an
    // S(tau + 1) geometric tail.
    let tail_of = move |levels: u32| {
        let l = levels as f64;
        let a = tau_f * (s_tau.ln() * l - (1.0 - s_tau).ln()).exp();
        let b = z * (s_tau1.ln() * l - (1.0 - s_tau1).ln()).exp();
        (ln_outer + (tau_f - 1.0) * ln_z).exp() * (a + b)
    };
    let ln_probs: Vec<f64> = source.probs().iter().map(|p| p.ln()).collect();
    let inner = levelled_sum(&ln_probs, &term, &tail_of, tol, max_levels)?;
    Ok(TailedValue {
        value: ln_outer.exp() * inner.value,
        tail_bound: inner.tail_bound,
        levels_used: inner.levels_used,
    })
}

/// Convenience wrappers with the module default tolerances.
pub fn exact_mean_default(
    source: &SourceModel,
    motif: &Shape,
    n: u64,
) -> Result<ExactMean, AnalyticsError> {
    exact_mean(source, motif, n, DEFAULT_WORD_TOL, DEFAULT_MAX_LEVELS)
}
