//! Periodic fluctuation of the mean around its linear growth.
//!
//! When every symbol probability is a power of one base, `p_j = r^(lambda_j)`
//! with integer exponents of gcd 1, the Mellin transform behind the mean has
//! simple poles at `s = -1 + i k theta` for every integer k, where
//! `theta = 2 pi / ln(1/r)`. Collecting the k != 0 residues yields the
//! zero-mean fluctuation of E[X]/n around the mean coefficient:
//!
//! ```text
//! xi(x) = (Q / (tau! h)) * sum_{k != 0} Gamma(tau - 1 + i k theta)
//!                          * exp(-i k theta ln x),
//! ```
//!
//! a Fourier series in ln x with period ln(1/r). Conjugate symmetry pairs
//! the +k and -k terms into `2 Re(c_k e^(-i k theta ln x))`.
//!
//! The harmonic amplitudes `|Gamma(tau - 1 + i k theta)|` die like
//! `e^(-pi k theta / 2)`, so a handful of terms reaches machine precision.
//! Successive amplitude ratios are decreasing in k (for tau >= 2 the
//! polynomial factor `(k theta)^(tau - 3/2)` grows ever slower relative to
//! the exponential), which turns the last observed ratio into a geometric
//! bound on the discarded tail.

use super::gamma::complex_log_gamma;
use super::{AnalyticsError, DEFAULT_K_MAX};
use crate::motif::shape_functional;
use crate::numeric::ln_factorial;
use crate::shape::Shape;
use crate::source::{Periodicity, SourceModel};
use num_complex::Complex64;

/// The residue series of the mean fluctuation for one motif.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationSeries {
    base: f64,
    pole_spacing: f64,
    scale: f64,
    /// Gamma(tau - 1 + i k theta) for k = 1, 2, ...
    coefficients: Vec<Complex64>,
}

impl OscillationSeries {
    /// Builds the series for the mean of `motif` under a periodic source.
    ///
    /// Fails with `NotCommensurable` for aperiodic sources. `k_max` caps the
    /// number of harmonics; coefficients below 1e-300 are dropped early.
    pub fn mean_series(
        source: &SourceModel,
        motif: &Shape,
        k_max: u32,
    ) -> Result<Self, AnalyticsError> {
        let base = match source.periodicity() {
            Periodicity::Aperiodic => return Err(AnalyticsError::NotCommensurable),
            Periodicity::Periodic { base, .. } => *base,
        };
        let q = shape_functional(source, motif)?;
        let tau = motif.size() as f64;
        let scale = q / (ln_factorial(motif.size() as u64).exp() * source.entropy());
        let pole_spacing = 2.0 * std::f64::consts::PI / (1.0 / base).ln();
        let mut coefficients = Vec::new();
        for k in 1..=k_max.max(2) {
            let s = Complex64::new(tau - 1.0, k as f64 * pole_spacing);
            let c = complex_log_gamma(s)?.exp();
            if c.norm() < 1e-300 {
                break;
            }
            coefficients.push(c);
        }
        Ok(OscillationSeries {
            base,
            pole_spacing,
            scale,
            coefficients,
        })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Pole spacing theta = 2 pi / ln(1/r) on the imaginary axis.
    pub fn pole_spacing(&self) -> f64 {
        self.pole_spacing
    }

    /// Q / (tau! h), the common prefactor.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// xi(x): the fluctuation of E[X]/x around the mean coefficient.
    pub fn eval(&self, x: f64) -> f64 {
        let ln_x = x.ln();
        let mut sum = 0.0;
        for (i, c) in self.coefficients.iter().enumerate() {
            let k = (i + 1) as f64;
            let phase = Complex64::new(0.0, -k * self.pole_spacing * ln_x).exp();
            sum += 2.0 * (c * phase).re;
        }
        self.scale * sum
    }

    /// Upper bound on sup |xi|: twice the summed harmonic amplitudes plus a
    /// geometric cap on the truncated tail.
    pub fn amplitude_bound(&self) -> f64 {
        let amps: Vec<f64> = self.coefficients.iter().map(|c| c.norm()).collect();
        let total: f64 = amps.iter().sum();
        let tail = match amps.len() {
            0 => 0.0,
            1 => amps[0],
            n => {
                let ratio = amps[n - 1] / amps[n - 2];
                if amps[n - 1] == 0.0 || ratio >= 1.0 {
                    amps[n - 1]
                } else {
                    amps[n - 1] * ratio / (1.0 - ratio)
                }
            }
        };
        self.scale * 2.0 * (total + tail)
    }
}

/// xi(x) of the mean, zero for aperiodic sources.
pub fn oscillation_xi(
    source: &SourceModel,
    motif: &Shape,
    x: f64,
    k_max: u32,
) -> Result<f64, AnalyticsError> {
    match source.periodicity() {
        Periodicity::Aperiodic => Ok(0.0),
        Periodicity::Periodic { .. } => {
            Ok(OscillationSeries::mean_series(source, motif, k_max)?.eval(x))
        }
    }
}

/// Convenience wrapper with the default harmonic cap.
pub fn oscillation_xi_default(
    source: &SourceModel,
    motif: &Shape,
    x: f64,
) -> Result<f64, AnalyticsError> {
    oscillation_xi(source, motif, x, DEFAULT_K_MAX)
}
