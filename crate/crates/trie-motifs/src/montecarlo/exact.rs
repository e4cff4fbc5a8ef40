//! Exact small-n law of the weighted occurrence count.
//!
//! Conditioned on the root split (n_1, ..., n_m) of n strings, subtrees are
//! independent tries on n_j strings, so the occurrence-vector law F_n obeys
//! a convolution recurrence over splits with multinomial weights. Two
//! boundary facts close it:
//!
//! * n < tau: no occurrences, F_n = delta_0;
//! * n = tau: the whole trie is the only candidate occurrence. Peeling its
//!   non-branching root chain shows P(vector = e_nu) = Q_nu / (1 - S(tau)):
//!   a chain through symbols pi costs P(pi)^tau, and summing the geometric
//!   chain mass reproduces exactly the 1/(1 - S(tau)) factor against the
//!   shape functional of the motif. Nonoverlap of the collection rules out
//!   two motifs occurring in the same tau-string trie.
//!
//! The all-strings-into-one-child split reproduces F_n itself (a chain
//! adds no occurrences for n > tau), so it is resolved algebraically:
//! F_n (1 - S(n)) = sum over proper splits.
//!
//! State space: occurrence vectors with sum_nu tau k_nu <= n, tiny for the
//! guarded n <= 12, but the multiplicative split enumeration is why the
//! guard exists.

use super::{SimError, DEFAULT_M_MAX, DEFAULT_N_MAX};
use crate::motif::{shape_functional, MotifCollection};
use crate::numeric::ln_multinomial;
use crate::source::SourceModel;
use serde::Serialize;
use std::collections::BTreeMap;

type CountVec = Vec<u16>;
type VectorPmf = BTreeMap<CountVec, f64>;

/// Exact distribution of `Y = sum_nu alpha_nu X_nu` at fixed n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactPmf {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl ExactPmf {
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(y, p)| y * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(y, p)| (y - mean) * (y - mean) * p)
            .sum()
    }
}

fn convolve(a: &VectorPmf, b: &VectorPmf) -> VectorPmf {
    let mut out = VectorPmf::new();
    for (ka, pa) in a {
        for (kb, pb) in b {
            let key: CountVec = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            *out.entry(key).or_insert(0.0) += pa * pb;
        }
    }
    out
}

/// Exact distribution with the default state-space guards.
pub fn exact_distribution(
    source: &SourceModel,
    collection: &MotifCollection,
    n: u64,
) -> Result<ExactPmf, SimError> {
    exact_distribution_with_limit(source, collection, n, DEFAULT_N_MAX, DEFAULT_M_MAX)
}

/// Exact distribution of the weighted occurrence count on n strings.
pub fn exact_distribution_with_limit(
    source: &SourceModel,
    collection: &MotifCollection,
    n: u64,
    n_max: u64,
    m_max: usize,
) -> Result<ExactPmf, SimError> {
    let m = source.m();
    if n > n_max || m > m_max {
        return Err(SimError::StateSpaceExceeded {
            n,
            n_limit: n_max,
            m,
            m_limit: m_max,
        });
    }
    let tau = collection
        .common_size()
        .ok_or_else(|| SimError::MixedMotifSizes {
            sizes: collection.shapes().map(|s| s.size()).collect(),
        })? as u64;
    let mut qs = Vec::new();
    for shape in collection.shapes() {
        qs.push(shape_functional(source, shape)?);
    }
    let width = qs.len();
    let zero: CountVec = vec![0; width];
    let ln_probs: Vec<f64> = source.probs().iter().map(|p| p.ln()).collect();

    let mut dists: Vec<VectorPmf> = Vec::with_capacity(n as usize + 1);
    for size in 0..=n {
        let pmf = if size < tau {
            let mut p = VectorPmf::new();
            p.insert(zero.clone(), 1.0);
            p
        } else if size == tau {
            let denom = 1.0 - source.power_sum(tau as f64);
            let mut p = VectorPmf::new();
            let mut rest = 1.0;
            for (nu, q) in qs.iter().enumerate() {
                let prob = q / denom;
                let mut key = zero.clone();
                key[nu] = 1;
                p.insert(key, prob);
                rest -= prob;
            }
            if rest > 0.0 {
                p.insert(zero.clone(), rest);
            }
            p
        } else {
            let mut acc = VectorPmf::new();
            for_each_proper_split(size as u32, m, |split| {
                let mut ln_weight = ln_multinomial(size as u32, split);
                for (count, lp) in split.iter().zip(&ln_probs) {
                    ln_weight += *count as f64 * lp;
                }
                let weight = ln_weight.exp();
                let mut conv = VectorPmf::new();
                conv.insert(zero.clone(), 1.0);
                for &count in split {
                    if count as u64 >= tau {
                        conv = convolve(&conv, &dists[count as usize]);
                    }
                }
                for (key, p) in conv {
                    *acc.entry(key).or_insert(0.0) += weight * p;
                }
            });
            let denom = 1.0 - source.power_sum(size as f64);
            for p in acc.values_mut() {
                *p /= denom;
            }
            acc
        };
        dists.push(pmf);
    }

    let weights: Vec<f64> = collection.weights().collect();
    let mut pairs: Vec<(f64, f64)> = dists[n as usize]
        .iter()
        .map(|(key, p)| {
            let y: f64 = key.iter().zip(&weights).map(|(k, w)| *k as f64 * w).sum();
            (y, *p)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut support = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    for (y, p) in pairs {
        if support
            .last()
            .is_some_and(|last: &f64| last.to_bits() == y.to_bits())
        {
            *probs.last_mut().unwrap() += p;
        } else {
            support.push(y);
            probs.push(p);
        }
    }
    Ok(ExactPmf { support, probs })
}

/// Visits every composition of `total` into `parts` except the all-in-one
/// degenerate ones.
fn for_each_proper_split<F: FnMut(&[u32])>(total: u32, parts: usize, mut f: F) {
    crate::numeric::for_each_composition(total, parts, |split| {
        if split.iter().all(|&c| c < total) {
            f(split);
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::exact_mean_default;
    use crate::shape::{fixtures, Shape};

    fn binary() -> SourceModel {
        SourceModel::new(vec![0.5, 0.5]).unwrap()
    }

    fn cherry_only() -> MotifCollection {
        MotifCollection::singleton(fixtures::cherry()).unwrap()
    }

    #[test]
    fn forced_cherry_at_two_strings() {
        let pmf = exact_distribution(&binary(), &cherry_only(), 2).unwrap();
        assert_eq!(pmf.support(), &[1.0]);
        assert!((pmf.probs()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cherry_at_four_strings_splits_four_sevenths() {
        let pmf = exact_distribution(&binary(), &cherry_only(), 4).unwrap();
        assert_eq!(pmf.support(), &[1.0, 2.0]);
        assert!((pmf.probs()[0] - 4.0 / 7.0).abs() < 1e-14);
        assert!((pmf.probs()[1] - 3.0 / 7.0).abs() < 1e-14);
        assert!((pmf.mean() - 10.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn mass_one_and_mean_matches_word_sum() {
        let cases: Vec<(Vec<f64>, Shape)> = vec![
            (vec![0.5, 0.5], fixtures::cherry()),
            (vec![0.3, 0.7], Shape::decode("((LL)L)", 2).unwrap()),
            (vec![0.2, 0.3, 0.5], Shape::decode("(L(LEL)E)", 3).unwrap()),
            (vec![0.15, 0.35, 0.35, 0.15], fixtures::dna_left_motif()),
        ];
        for (probs, motif) in cases {
            let source = SourceModel::new(probs).unwrap();
            let collection = MotifCollection::singleton(motif.clone()).unwrap();
            for n in 2..=9u64 {
                let pmf = exact_distribution(&source, &collection, n).unwrap();
                assert!(
                    (pmf.total_mass() - 1.0).abs() < 1e-12,
                    "mass {} at n = {n}",
                    pmf.total_mass()
                );
                assert!(pmf.probs().iter().all(|p| *p >= 0.0));
                assert!(pmf.variance() >= 0.0);
                let direct = exact_mean_default(&source, &motif, n).unwrap();
                assert!(
                    (pmf.mean() - direct.value).abs() <= 1e-10,
                    "pmf mean {} vs word sum {} at n = {n} for {}",
                    pmf.mean(),
                    direct.value,
                    motif.encode()
                );
            }
        }
    }

    #[test]
    fn weighted_pair_is_bilinear_in_the_weights() {
        let source = binary();
        let left = Shape::decode("((LL)L)", 2).unwrap();
        let right = Shape::decode("(L(LL))", 2).unwrap();
        let n = 7;
        let mixed = MotifCollection::new(vec![(left.clone(), 2.0), (right.clone(), -1.0)]).unwrap();
        let pmf = exact_distribution(&source, &mixed, n).unwrap();
        assert!((pmf.total_mass() - 1.0).abs() < 1e-12);
        let mean_left = exact_mean_default(&source, &left, n).unwrap().value;
        let mean_right = exact_mean_default(&source, &right, n).unwrap().value;
        let want = 2.0 * mean_left - mean_right;
        assert!((pmf.mean() - want).abs() < 1e-10);
    }

    #[test]
    fn symmetric_motifs_get_equal_boundary_mass() {
        let source = binary();
        let pair = MotifCollection::new(vec![
            (Shape::decode("((LL)L)", 2).unwrap(), 1.0),
            (Shape::decode("(L(LL))", 2).unwrap(), -1.0),
        ])
        .unwrap();
        // At n = tau = 3 the law is P(Y = 1) = P(Y = -1) = Q/(1 - S(3)).
        let pmf = exact_distribution(&source, &pair, 3).unwrap();
        let q = 6.0 * 0.125 * 0.25;
        let want = q / (1.0 - 0.25);
        assert_eq!(pmf.support(), &[-1.0, 0.0, 1.0]);
        assert!((pmf.probs()[0] - want).abs() < 1e-14);
        assert!((pmf.probs()[2] - want).abs() < 1e-14);
    }

    #[test]
    fn guards_reject_oversized_inputs() {
        let err = exact_distribution(&binary(), &cherry_only(), 13).unwrap_err();
        assert!(matches!(
            err,
            SimError::StateSpaceExceeded {
                n: 13,
                n_limit: 12,
                ..
            }
        ));

        let five = SourceModel::new(vec![0.2; 5]).unwrap();
        let star5 = MotifCollection::singleton(Shape::decode("(LLLLL)", 5).unwrap()).unwrap();
        let err = exact_distribution(&five, &star5, 4).unwrap_err();
        assert!(matches!(
            err,
            SimError::StateSpaceExceeded {
                m: 5,
                m_limit: 4,
                ..
            }
        ));
    }

    #[test]
    fn mixed_sizes_are_rejected() {
        // Binary shapes of different sizes always overlap (every shape ends
        // in a cherry), so a ternary pair is the smallest honest example.
        let source = SourceModel::new(vec![0.2, 0.3, 0.5]).unwrap();
        let mixed = MotifCollection::new(vec![
            (Shape::decode("(LLE)", 3).unwrap(), 1.0),
            (Shape::decode("(LLL)", 3).unwrap(), 1.0),
        ])
        .unwrap();
        let err = exact_distribution(&source, &mixed, 6).unwrap_err();
        assert_eq!(err, SimError::MixedMotifSizes { sizes: vec![2, 3] });
    }
}
