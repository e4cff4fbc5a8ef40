//! Memoryless m-ary probability sources and seeded symbol streams.
//!
//! A source is a fixed probability vector (p_1, ..., p_m); strings are
//! sequences of i.i.d. symbols drawn from it. Two derived quantities drive
//! everything downstream:
//!
//! * the entropy h = -sum_j p_j ln p_j, which normalizes every leading
//!   moment coefficient, and
//! * the periodicity classification: when every p_j is an integer power of a
//!   common base r (equivalently, all log-ratios ln p_j / ln p_k are
//!   rational), the asymptotics pick up oscillating terms with poles spaced
//!   2*pi/ln(1/r) apart on the vertical line; otherwise the oscillation is
//!   absent.
//!
//! Rationality of log-ratios is undecidable in floating point, so the
//! classifier bounds denominators (`max_denominator`, default 64) and treats
//! anything beyond as aperiodic; oscillation amplitudes for larger
//! denominators are numerically negligible anyway.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::fmt;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 64;
pub const DEFAULT_PERIODICITY_TOL: f64 = 1e-12;

/// Tolerance on |sum(probs) - 1| accepted by [`SourceModel::new`].
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Tolerance on |r^lambda_j - p_j| for a Periodic classification to stand.
pub const PERIODIC_RECON_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Periodicity {
    Aperiodic,
    /// All probabilities are integer powers of `base`: p_j = base^exponents[j],
    /// with gcd(exponents) = 1.
    Periodic {
        base: f64,
        exponents: Vec<u64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceError {
    AlphabetTooSmall { len: usize },
    AlphabetTooLarge { len: usize },
    NonPositiveProbability { index: usize, value: f64 },
    ProbabilitiesDoNotSumToOne { sum: f64 },
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceError::AlphabetTooSmall { len } => {
                write!(f, "alphabet needs at least 2 symbols, got {len}")
            }
            SourceError::AlphabetTooLarge { len } => {
                write!(f, "alphabet size {len} exceeds the supported 255 symbols")
            }
            SourceError::NonPositiveProbability { index, value } => {
                write!(f, "probability {value} at index {index} is not in (0,1)")
            }
            SourceError::ProbabilitiesDoNotSumToOne { sum } => {
                write!(
                    f,
                    "probabilities sum to {sum}, expected 1 within {PROB_SUM_TOL:e}"
                )
            }
        }
    }
}

impl std::error::Error for SourceError {}

/// An m-symbol memoryless source with cached entropy and periodicity.
#[derive(Debug, Clone)]
pub struct SourceModel {
    probs: Vec<f64>,
    cdf: Vec<f64>,
    entropy: f64,
    periodicity: Periodicity,
}

impl SourceModel {
    /// Validates the probability vector and classifies it with the default
    /// periodicity parameters.
    pub fn new(probs: Vec<f64>) -> Result<Self, SourceError> {
        Self::with_periodicity_params(probs, DEFAULT_MAX_DENOMINATOR, DEFAULT_PERIODICITY_TOL)
    }

    pub fn with_periodicity_params(
        probs: Vec<f64>,
        max_denominator: u64,
        tol: f64,
    ) -> Result<Self, SourceError> {
        if probs.len() < 2 {
            return Err(SourceError::AlphabetTooSmall { len: probs.len() });
        }
        if probs.len() > 255 {
            return Err(SourceError::AlphabetTooLarge { len: probs.len() });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) || !value.is_finite() {
                return Err(SourceError::NonPositiveProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(SourceError::ProbabilitiesDoNotSumToOne { sum });
        }
        let entropy = -probs.iter().map(|p| p * p.ln()).sum::<f64>();
        let periodicity = classify_periodicity(&probs, max_denominator, tol);
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cdf.push(acc);
        }
        *cdf.last_mut().unwrap() = 1.0;
        Ok(Self {
            probs,
            cdf,
            entropy,
            periodicity,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Alphabet size m.
    pub fn m(&self) -> usize {
        self.probs.len()
    }

    /// Entropy in nats: -sum p_j ln p_j.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn periodicity(&self) -> &Periodicity {
        &self.periodicity
    }

    /// S(x) = sum_j p_j^x. The per-level word mass sum_{|w|=l} P^x(w) equals
    /// S(x)^l, which is what certifies every geometric tail bound.
    pub fn power_sum(&self, x: f64) -> f64 {
        self.probs.iter().map(|p| p.powf(x)).sum()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }

    /// P(w) = product of symbol probabilities along the word.
    pub fn word_probability(&self, word: &[u8]) -> f64 {
        word.iter().map(|&s| self.probs[s as usize]).product()
    }

    pub fn ln_word_probability(&self, word: &[u8]) -> f64 {
        word.iter().map(|&s| self.probs[s as usize].ln()).sum()
    }

    /// Opens the deterministic symbol stream identified by (seed, stream_id).
    pub fn stream(&self, seed: u64, stream_id: u64) -> SymbolStream {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        SymbolStream {
            rng,
            cdf: self.cdf.clone(),
            seed,
            stream_id,
            position: 0,
        }
    }
}

/// Detects the commensurable form p_j = r^{lambda_j}.
///
/// Each log-ratio ln p_j / ln p_0 is run through continued-fraction
/// convergents; if every ratio admits a rational approximation a/b with
/// b <= max_denominator and error <= tol * max(1, ratio), the candidate
/// exponents are assembled over a common denominator, reduced by their gcd,
/// and accepted only if r^{lambda_j} reproduces every p_j within 1e-10.
pub fn classify_periodicity(probs: &[f64], max_denominator: u64, tol: f64) -> Periodicity {
    let ln0 = probs[0].ln();
    // ratio_j = ln p_j / ln p_0, positive since both logs are negative.
    let mut numerators = Vec::with_capacity(probs.len());
    let mut denominators = Vec::with_capacity(probs.len());
    for &p in probs {
        let ratio = p.ln() / ln0;
        match rational_approximation(ratio, max_denominator, tol * ratio.max(1.0)) {
            Some((a, b)) if a > 0 => {
                numerators.push(a);
                denominators.push(b);
            }
            _ => return Periodicity::Aperiodic,
        }
    }
    let mut common = 1u64;
    for &b in &denominators {
        common = match lcm(common, b) {
            Some(l) => l,
            None => return Periodicity::Aperiodic,
        };
    }
    let mut exponents: Vec<u64> = numerators
        .iter()
        .zip(&denominators)
        .map(|(&a, &b)| a * (common / b))
        .collect();
    let g = exponents.iter().fold(0u64, |acc, &e| gcd(acc, e));
    if g == 0 {
        return Periodicity::Aperiodic;
    }
    for e in &mut exponents {
        *e /= g;
    }
    // base r from the first probability: ln r = ln p_0 / lambda_0.
    let base = (ln0 / exponents[0] as f64).exp();
    for (&p, &e) in probs.iter().zip(&exponents) {
        if (base.powf(e as f64) - p).abs() > PERIODIC_RECON_TOL {
            return Periodicity::Aperiodic;
        }
    }
    Periodicity::Periodic { base, exponents }
}

/// Best continued-fraction convergent a/b of x with b <= max_denominator,
/// accepted only if |x - a/b| <= tol.
fn rational_approximation(x: f64, max_denominator: u64, tol: f64) -> Option<(u64, u64)> {
    if !x.is_finite() || x <= 0.0 {
        return None;
    }
    let (mut h_prev, mut h) = (1u64, x.floor() as u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some((h, k));
        }
        if frac.abs() < f64::EPSILON {
            break;
        }
        let next = 1.0 / frac;
        let a = next.floor();
        frac = next - a;
        let a = a as u64;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_denominator {
            break;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    if (x - h as f64 / k as f64).abs() <= tol {
        Some((h, k))
    } else {
        None
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// A deterministic infinite symbol sequence: identical (seed, stream_id)
/// always replay the identical sequence, and distinct stream_ids under one
/// seed are independent for all practical purposes (ChaCha12 streams).
///
/// Streams are single-owner; parallel simulation derives one stream per
/// (replicate, string) pair instead of sharing.
pub struct SymbolStream {
    rng: ChaCha12Rng,
    cdf: Vec<f64>,
    seed: u64,
    stream_id: u64,
    position: u64,
}

impl SymbolStream {
    /// Draws the next symbol by inverse-CDF lookup on a uniform variate.
    pub fn next_symbol(&mut self) -> u8 {
        let u: f64 = self.rng.random();
        self.position += 1;
        let mut s = 0usize;
        while s + 1 < self.cdf.len() && u >= self.cdf[s] {
            s += 1;
        }
        s as u8
    }

    pub fn m(&self) -> usize {
        self.cdf.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Index of the next symbol to be drawn.
    pub fn position(&self) -> u64 {
        self.position
    }
}

impl fmt::Debug for SymbolStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolStream")
            .field("seed", &self.seed)
            .field("stream_id", &self.stream_id)
            .field("position", &self.position)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dna() -> SourceModel {
        SourceModel::new(vec![0.15, 0.35, 0.35, 0.15]).unwrap()
    }

    #[test]
    fn uniform_binary_entropy_is_ln2() {
        let s = SourceModel::new(vec![0.5, 0.5]).unwrap();
        assert!((s.entropy() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn uniform_entropy_is_ln_m() {
        for m in 2..=6usize {
            let s = SourceModel::new(vec![1.0 / m as f64; m]).unwrap();
            assert!((s.entropy() - (m as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn dna_entropy_matches_reference() {
        // high-precision value 1.30401148261484... for (0.15,0.35,0.35,0.15)
        assert!((dna().entropy() - 1.304011483).abs() < 1e-8);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert_eq!(
            SourceModel::new(vec![0.5, 0.6]).unwrap_err(),
            SourceError::ProbabilitiesDoNotSumToOne { sum: 1.1 }
        );
        assert!(matches!(
            SourceModel::new(vec![1.0]).unwrap_err(),
            SourceError::AlphabetTooSmall { len: 1 }
        ));
        assert!(matches!(
            SourceModel::new(vec![0.0, 1.0]).unwrap_err(),
            SourceError::NonPositiveProbability { index: 0, .. }
        ));
    }

    #[test]
    fn unbiased_binary_is_periodic_base_half() {
        match SourceModel::new(vec![0.5, 0.5]).unwrap().periodicity() {
            Periodicity::Periodic { base, exponents } => {
                assert!((base - 0.5).abs() < 1e-12);
                assert_eq!(exponents, &vec![1, 1]);
            }
            other => panic!("expected periodic, got {other:?}"),
        }
    }

    #[test]
    fn quarter_quarter_half_is_periodic() {
        match SourceModel::new(vec![0.25, 0.25, 0.5])
            .unwrap()
            .periodicity()
        {
            Periodicity::Periodic { base, exponents } => {
                assert!((base - 0.5).abs() < 1e-12);
                assert_eq!(exponents, &vec![2, 2, 1]);
            }
            other => panic!("expected periodic, got {other:?}"),
        }
    }

    #[test]
    fn dna_source_is_aperiodic() {
        assert_eq!(dna().periodicity(), &Periodicity::Aperiodic);
    }

    #[test]
    fn periodic_classification_reconstructs_probs() {
        for probs in [
            vec![0.5, 0.25, 0.25],
            vec![0.125, 0.125, 0.25, 0.5],
            vec![0.5, 0.5],
        ] {
            let s = SourceModel::new(probs.clone()).unwrap();
            if let Periodicity::Periodic { base, exponents } = s.periodicity() {
                let mut g = 0u64;
                for (&p, &e) in probs.iter().zip(exponents) {
                    assert!((base.powf(e as f64) - p).abs() < 1e-10);
                    g = gcd(g, e);
                }
                assert_eq!(g, 1, "exponents must be coprime");
            } else {
                panic!("{probs:?} should classify as periodic");
            }
        }
    }

    #[test]
    fn periodicity_is_permutation_equivariant() {
        let probs = vec![0.125, 0.25, 0.125, 0.5];
        let base_case = classify_periodicity(&probs, 64, 1e-12);
        let permuted = classify_periodicity(&[0.5, 0.125, 0.25, 0.125], 64, 1e-12);
        match (base_case, permuted) {
            (
                Periodicity::Periodic { exponents: e1, .. },
                Periodicity::Periodic { exponents: e2, .. },
            ) => {
                assert_eq!(e1, vec![3, 2, 3, 1]);
                assert_eq!(e2, vec![1, 3, 2, 3]);
            }
            other => panic!("expected periodic pair, got {other:?}"),
        }
    }

    #[test]
    fn streams_replay_identically() {
        let s = dna();
        let mut a = s.stream(42, 7);
        let mut b = s.stream(42, 7);
        let seq_a: Vec<u8> = (0..1000).map(|_| a.next_symbol()).collect();
        let seq_b: Vec<u8> = (0..1000).map(|_| b.next_symbol()).collect();
        assert_eq!(seq_a, seq_b);
        assert_eq!(a.position(), 1000);
    }

    #[test]
    fn near_degenerate_source_draws_symbol_zero() {
        let s = SourceModel::new(vec![1.0 - 1e-9, 1e-9]).unwrap();
        let mut st = s.stream(1, 0);
        let ones = (0..1000).filter(|_| st.next_symbol() == 1).count();
        assert_eq!(ones, 0);
    }

    #[test]
    fn chi_square_of_million_draws_is_sane() {
        let s = dna();
        let mut st = s.stream(2024, 0);
        let n = 1_000_000usize;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            counts[st.next_symbol() as usize] += 1;
        }
        let mut chi2 = 0.0;
        for (c, p) in counts.iter().zip(s.probs()) {
            let expect = p * n as f64;
            chi2 += (*c as f64 - expect).powi(2) / expect;
        }
        // 0.999 quantile of chi-square with 3 degrees of freedom.
        assert!(chi2 < 16.266, "chi2 = {chi2}");
    }

    #[test]
    fn distinct_stream_ids_look_independent() {
        let s = dna();
        let mut a = s.stream(5, 1);
        let mut b = s.stream(5, 2);
        let n = 100_000usize;
        let xs: Vec<f64> = (0..n).map(|_| a.next_symbol() as f64).collect();
        let ys: Vec<f64> = (0..n).map(|_| b.next_symbol() as f64).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let mut num = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            num += (x - mx) * (y - my);
            vx += (x - mx).powi(2);
            vy += (y - my).powi(2);
        }
        let corr = num / (vx.sqrt() * vy.sqrt());
        assert!(corr.abs() < 0.01, "corr = {corr}");
    }
}
