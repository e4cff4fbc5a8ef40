//! Normality diagnostics for standardized samples.
//!
//! The distributional claim under test says standardized occurrence counts
//! approach N(0, 1). These helpers quantify the distance: the Kolmogorov
//! sup-norm statistic against the standard normal CDF plus the classical
//! moment diagnostics (sample skewness and excess kurtosis), which are a
//! sharper lens on tail and asymmetry defects than the KS number alone.

use super::SimError;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Moment and distance diagnostics of one standardized sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub ks_stat: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Kolmogorov sup-norm distance between the empirical CDF of `samples` and
/// the standard normal CDF, evaluated on both sides of every jump.
///
/// Returns NaN for an empty slice.
pub fn ks_statistic(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let cdf = normal.cdf(*x);
        let above = (i as f64 + 1.0) / n - cdf;
        let below = cdf - i as f64 / n;
        sup = sup.max(above).max(below);
    }
    sup
}

fn central_moments(samples: &[f64]) -> Result<(f64, f64, f64), SimError> {
    if samples.is_empty() {
        return Err(SimError::TooFewSamples { got: 0 });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in samples {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    Ok((m2 / n, m3 / n, m4 / n))
}

/// Sample skewness m3 / m2^(3/2).
pub fn skewness(samples: &[f64]) -> Result<f64, SimError> {
    let (m2, m3, _) = central_moments(samples)?;
    if m2 == 0.0 {
        return Err(SimError::DegenerateSample);
    }
    Ok(m3 / m2.powf(1.5))
}

/// Sample excess kurtosis m4 / m2^2 - 3.
pub fn excess_kurtosis(samples: &[f64]) -> Result<f64, SimError> {
    let (m2, _, m4) = central_moments(samples)?;
    if m2 == 0.0 {
        return Err(SimError::DegenerateSample);
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// All three diagnostics in one pass.
pub fn normality_diagnostics(samples: &[f64]) -> Result<Diagnostics, SimError> {
    let (m2, m3, m4) = central_moments(samples)?;
    if m2 == 0.0 {
        return Err(SimError::DegenerateSample);
    }
    Ok(Diagnostics {
        ks_stat: ks_statistic(samples),
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::distr::Distribution;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn symmetric_sample_has_zero_skewness() {
        assert_eq!(skewness(&[-1.0, 0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn single_point_at_zero_has_ks_half() {
        assert!((ks_statistic(&[0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_sample_returns_nan_ks_and_errors_elsewhere() {
        assert!(ks_statistic(&[]).is_nan());
        assert_eq!(
            skewness(&[]).unwrap_err(),
            SimError::TooFewSamples { got: 0 }
        );
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let samples = vec![2.5; 20];
        assert_eq!(
            normality_diagnostics(&samples).unwrap_err(),
            SimError::DegenerateSample
        );
    }

    #[test]
    fn true_normal_draws_pass_the_kolmogorov_bound() {
        // 1.95 / sqrt(R) is the asymptotic 0.001-level critical value.
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        let r = 100_000;
        let samples: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut rng)).collect();
        let d = normality_diagnostics(&samples).unwrap();
        assert!(d.ks_stat < 1.95 / (r as f64).sqrt(), "ks = {}", d.ks_stat);
        assert!(d.skewness.abs() < 0.05);
        assert!(d.excess_kurtosis.abs() < 0.1);
    }

    #[test]
    fn ks_detects_a_shifted_sample() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..10_000).map(|_| 0.3 + rng_sample(&mut rng)).collect();
        // A 0.3 shift moves the CDF by about Phi(0.3) - 1/2 = 0.118.
        let ks = ks_statistic(&samples);
        assert!(ks > 0.09, "ks = {ks}");
    }

    fn rng_sample(rng: &mut ChaCha12Rng) -> f64 {
        StandardNormal.sample(rng)
    }
}
