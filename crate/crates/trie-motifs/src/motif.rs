//! Motif-level semantics: the shape functional Q(T), nonoverlap validation,
//! weighted collections, and tau-cousin enumeration with mass accounting.
//!
//! Q(T) is the probability that a trie built on tau = size(T) random strings
//! equals T; it factors as tau! times the product of the word probabilities
//! of the canonical leaf tuple. Two motifs are *nonoverlapping* when neither
//! equals the full subtree at any node of the other; a motif trivially
//! overlaps itself, so duplicate motifs in a collection are rejected.
//!
//! A *tau-cousin* is a root-branching shape with exactly tau leaves. The
//! family is finite for tau = 2 (one shape per unordered slot pair) and
//! countably infinite otherwise; summed over all cousins the shape
//! functionals add up to 1 - sum_j p_j^tau, which is what
//! [`cousin_mass_partial_sum`] approaches as the height cap grows.

use crate::numeric::{for_each_composition, ln_multinomial};
use crate::shape::{Shape, ShapeKind};
use crate::source::SourceModel;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum MotifError {
    MotifTooSmall { index: usize, size: u32 },
    ArityMismatch { expected: usize, found: usize },
    OverlappingMotifs { pairs: Vec<(usize, usize)> },
    AllWeightsZero,
    NonFiniteWeight { index: usize },
    EmptyCollection,
}

impl fmt::Display for MotifError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MotifError::MotifTooSmall { index, size } => {
                write!(
                    f,
                    "motif {index} has size {size}; collections require size >= 2"
                )
            }
            MotifError::ArityMismatch { expected, found } => {
                write!(
                    f,
                    "motif arity {found} does not match alphabet size {expected}"
                )
            }
            MotifError::OverlappingMotifs { pairs } => {
                write!(f, "overlapping motif pairs: {pairs:?}")
            }
            MotifError::AllWeightsZero => write!(f, "all collection weights are zero"),
            MotifError::NonFiniteWeight { index } => {
                write!(f, "weight of motif {index} is not finite")
            }
            MotifError::EmptyCollection => write!(f, "collection holds no motifs"),
        }
    }
}

impl std::error::Error for MotifError {}

/// Q(T) = tau! * prod_j P(W_j) over the canonical leaf words of the motif.
///
/// Computed in log space: the word products underflow for deep motifs long
/// before the result does.
pub fn shape_functional(source: &SourceModel, motif: &Shape) -> Result<f64, MotifError> {
    if let Some(arity) = motif.arity() {
        if arity != source.m() {
            return Err(MotifError::ArityMismatch {
                expected: source.m(),
                found: arity,
            });
        }
    }
    let words = motif.words();
    let mut ln_q = crate::numeric::ln_factorial(words.len() as u64);
    for word in words.words() {
        ln_q += source.ln_word_probability(word);
    }
    Ok(ln_q.exp())
}

/// True iff `needle` equals the full subtree rooted at some node of
/// `haystack` (the root included).
pub fn occurs_as_subtree(needle: &Shape, haystack: &Shape) -> bool {
    if haystack.size() < needle.size() {
        return false;
    }
    if haystack == needle {
        return true;
    }
    match haystack.kind() {
        ShapeKind::External => false,
        ShapeKind::Internal(children) => children
            .iter()
            .flatten()
            .any(|child| occurs_as_subtree(needle, child)),
    }
}

/// All unordered index pairs (i < j) that overlap, plus (i, i) is never
/// reported: a shape trivially occurs in itself, so *distinctness* is what
/// the diagonal rule enforces and duplicate shapes show up as violating
/// pairs here too.
pub fn nonoverlap_violations(shapes: &[&Shape]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..shapes.len() {
        for j in (i + 1)..shapes.len() {
            if occurs_as_subtree(shapes[i], shapes[j]) || occurs_as_subtree(shapes[j], shapes[i]) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Validates pairwise nonoverlap (duplicates included) for a set of motifs.
pub fn check_nonoverlapping(shapes: &[&Shape]) -> Result<(), MotifError> {
    for (index, shape) in shapes.iter().enumerate() {
        if shape.size() < 2 {
            return Err(MotifError::MotifTooSmall {
                index,
                size: shape.size(),
            });
        }
    }
    let pairs = nonoverlap_violations(shapes);
    if pairs.is_empty() {
        Ok(())
    } else {
        Err(MotifError::OverlappingMotifs { pairs })
    }
}

/// A weighted collection {(T_nu, alpha_nu)} of pairwise nonoverlapping
/// motifs, the unit the variance/CLT machinery works on.
#[derive(Debug, Clone, PartialEq)]
pub struct MotifCollection {
    entries: Vec<(Shape, f64)>,
    common_size: Option<u32>,
}

impl MotifCollection {
    pub fn new(entries: Vec<(Shape, f64)>) -> Result<Self, MotifError> {
        if entries.is_empty() {
            return Err(MotifError::EmptyCollection);
        }
        for (index, (_, weight)) in entries.iter().enumerate() {
            if !weight.is_finite() {
                return Err(MotifError::NonFiniteWeight { index });
            }
        }
        if entries.iter().all(|(_, w)| *w == 0.0) {
            return Err(MotifError::AllWeightsZero);
        }
        let arity = entries[0].0.arity();
        for (shape, _) in &entries {
            if shape.arity() != arity {
                return Err(MotifError::ArityMismatch {
                    expected: arity.unwrap_or(0),
                    found: shape.arity().unwrap_or(0),
                });
            }
        }
        let shapes: Vec<&Shape> = entries.iter().map(|(s, _)| s).collect();
        check_nonoverlapping(&shapes)?;
        let first = entries[0].0.size();
        let common_size = entries
            .iter()
            .all(|(s, _)| s.size() == first)
            .then_some(first);
        Ok(Self {
            entries,
            common_size,
        })
    }

    /// Single motif with unit weight.
    pub fn singleton(shape: Shape) -> Result<Self, MotifError> {
        Self::new(vec![(shape, 1.0)])
    }

    pub fn entries(&self) -> &[(Shape, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn shapes(&self) -> impl Iterator<Item = &Shape> {
        self.entries.iter().map(|(s, _)| s)
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(_, w)| *w)
    }

    /// Present iff every motif has the same leaf count.
    pub fn common_size(&self) -> Option<u32> {
        self.common_size
    }

    /// Arity of the motifs (alphabet size they were written for).
    pub fn arity(&self) -> usize {
        self.entries[0].0.arity().unwrap_or(0)
    }
}

/// Enumerates every root-branching shape with exactly `tau` leaves over an
/// m-symbol alphabet, ordered by (height, canonical text), each exactly
/// once. The stream is finite for tau = 2 and infinite otherwise;
/// `max_height` bounds it (use `take(..)` for a count bound).
pub fn enumerate_cousins(tau: u32, m: usize, max_height: Option<u32>) -> CousinIter {
    assert!(tau >= 2, "cousins are defined for tau >= 2");
    assert!(m >= 2, "alphabet needs at least two symbols");
    CousinIter {
        tau,
        m,
        max_height,
        height: 0,
        pending: Vec::new(),
        memo: HashMap::new(),
    }
}

pub struct CousinIter {
    tau: u32,
    m: usize,
    max_height: Option<u32>,
    height: u32,
    /// Shapes of the current height, reversed so `pop` yields text order.
    pending: Vec<Shape>,
    memo: HashMap<(u32, u32), Vec<Shape>>,
}

impl Iterator for CousinIter {
    type Item = Shape;

    fn next(&mut self) -> Option<Shape> {
        loop {
            if let Some(shape) = self.pending.pop() {
                return Some(shape);
            }
            // 2-cousins all have height 1: two occupied slots, both leaves.
            if self.tau == 2 && self.height >= 1 {
                return None;
            }
            self.height += 1;
            if let Some(cap) = self.max_height {
                if self.height > cap {
                    return None;
                }
            }
            let mut batch: Vec<Shape> = shapes_with(self.tau, self.height, self.m, &mut self.memo)
                .iter()
                .filter(|s| s.is_root_branching())
                .cloned()
                .collect();
            batch.sort_by_key(|s| s.encode());
            batch.reverse();
            self.pending = batch;
        }
    }
}

/// All shapes with exactly `leaves` leaves and exact height `height`
/// (root-branching or not), memoized.
fn shapes_with(
    leaves: u32,
    height: u32,
    m: usize,
    memo: &mut HashMap<(u32, u32), Vec<Shape>>,
) -> Vec<Shape> {
    if let Some(hit) = memo.get(&(leaves, height)) {
        return hit.clone();
    }
    let result = if leaves == 1 {
        if height == 0 {
            vec![Shape::external()]
        } else {
            Vec::new()
        }
    } else if height == 0 {
        Vec::new()
    } else {
        // Children occupy m ordered slots; at least one child must attain
        // height - 1 for the parent to have exact height.
        let mut out = Vec::new();
        let mut slots: Vec<Option<Shape>> = vec![None; m];
        assign_slot(leaves, height, m, 0, false, &mut slots, memo, &mut out);
        out
    };
    memo.insert((leaves, height), result.clone());
    result
}

#[allow(clippy::too_many_arguments)]
fn assign_slot(
    leaves_left: u32,
    height: u32,
    m: usize,
    slot: usize,
    tall_seen: bool,
    slots: &mut Vec<Option<Shape>>,
    memo: &mut HashMap<(u32, u32), Vec<Shape>>,
    out: &mut Vec<Shape>,
) {
    if slot == m {
        if leaves_left == 0 && tall_seen {
            out.push(Shape::internal(slots.clone()).expect("valid by construction"));
        }
        return;
    }
    // Leave the slot empty.
    slots[slot] = None;
    assign_slot(
        leaves_left,
        height,
        m,
        slot + 1,
        tall_seen,
        slots,
        memo,
        out,
    );
    // Fill it with a child of k leaves and height h <= height - 1.
    for k in 1..=leaves_left {
        for h in 0..height {
            for child in shapes_with(k, h, m, memo) {
                slots[slot] = Some(child);
                assign_slot(
                    leaves_left - k,
                    height,
                    m,
                    slot + 1,
                    tall_seen || h == height - 1,
                    slots,
                    memo,
                    out,
                );
            }
        }
    }
    slots[slot] = None;
}

/// Partial cousin mass with a certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CousinMass {
    /// sum of Q(T) over all cousins of height <= the requested cap.
    pub partial_sum: f64,
    /// Certified bound on the missing mass above the cap.
    pub tail_bound: f64,
    /// The limit 1 - sum_j p_j^tau the partial sums increase towards.
    pub limit: f64,
}

/// Sums Q(T) over all tau-cousins of height at most `height` without
/// enumerating them: the sum equals P(trie on tau strings root-branches and
/// has height <= H), computed by the height-bounded split recursion
/// G(k, g) = P(height of a k-string trie <= g). Shape enumeration would cost
/// exponentially in H (already 2^(H-1) binary 3-cousins per height).
pub fn cousin_mass_partial_sum(source: &SourceModel, tau: u32, height: u32) -> CousinMass {
    let m = source.m();
    let probs = source.probs();
    let limit = 1.0 - source.power_sum(tau as f64);
    // g_table[k] = G(k, g) for the current g, built upward from g = 0.
    let mut current: Vec<f64> = (0..=tau).map(|k| if k >= 2 { 0.0 } else { 1.0 }).collect();
    if height == 0 {
        let tail = tail_bound(source, tau, 0, limit);
        return CousinMass {
            partial_sum: 0.0,
            tail_bound: tail,
            limit,
        };
    }
    let mut previous = current.clone();
    for _g in 1..=height {
        std::mem::swap(&mut previous, &mut current);
        for k in 0..=tau {
            if k < 2 {
                current[k as usize] = 1.0;
                continue;
            }
            let mut total = 0.0;
            for_each_composition(k, m, |parts| {
                let mut ln_w = ln_multinomial(k, parts);
                let mut prod_g = 1.0;
                for (j, &kj) in parts.iter().enumerate() {
                    ln_w += kj as f64 * probs[j].ln();
                    prod_g *= previous[kj as usize];
                }
                total += ln_w.exp() * prod_g;
            });
            current[k as usize] = total;
        }
    }
    // P(root branches and height <= H) = G(tau, H) - P(degenerate root with
    // height <= H) = G(tau, H) - sum_j p_j^tau G(tau, H - 1).
    let degenerate: f64 = source.power_sum(tau as f64) * previous[tau as usize];
    let partial = (current[tau as usize] - degenerate).max(0.0);
    let tail = tail_bound(source, tau, height, limit - partial);
    CousinMass {
        partial_sum: partial,
        tail_bound: tail,
        limit,
    }
}

/// Geometric tail certificate: height > H forces some string pair to share
/// an H-symbol prefix, and P(a fixed pair agrees on H symbols) = S(2)^H.
fn tail_bound(source: &SourceModel, tau: u32, height: u32, residual: f64) -> f64 {
    let pairs = (tau as f64) * (tau as f64 - 1.0) / 2.0;
    let union = pairs * source.power_sum(2.0).powi(height as i32);
    union.min(residual.max(0.0)).min(1.0)
}
