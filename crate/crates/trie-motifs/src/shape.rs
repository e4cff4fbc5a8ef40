//! The trie core: canonical m-ary shapes, the word-tuple correspondence,
//! construction from lazy symbol streams, and exact fringe motif counting.
//!
//! A trie shape is label-sensitive: an internal node has m ordered child
//! slots, each either empty or a subtree, and two subtrees with the same leaf
//! count but different slot positions are different shapes (the occurrence
//! probability depends on the path symbols). A shape with n >= 2 leaves
//! corresponds uniquely to an unordered tuple of n words with the *trie
//! property*: no word prefixes another, and every word minus its last symbol
//! is a prefix of some other word.
//!
//! The canonical text form is
//!
//! ```text
//! shape := "L" | "(" child^m ")"      child := "E" | shape
//! ```
//!
//! so the binary cherry is `(LL)` and a left-leaning three-leaf shape is
//! `(((LL)E)L)`. Whitespace is ignored.

use crate::source::SymbolStream;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeError {
    EmptyWordTuple,
    NoStreams,
    MixedStreamAlphabets {
        first: usize,
        other: usize,
    },
    ChildArityMismatch {
        expected: usize,
        found: usize,
    },
    SymbolOutOfRange {
        word: usize,
        position: usize,
        symbol: u8,
        m: usize,
    },
    /// Either `first` is a prefix of `second`, or (when the indices are
    /// equal) the word's parent prefix dangles with no sibling.
    TriePropertyViolated {
        first: usize,
        second: usize,
    },
    ArityMismatch {
        offset: usize,
        expected: usize,
        found: usize,
    },
    ParseError {
        offset: usize,
        message: String,
    },
    /// An internal node whose subtree carries fewer than two leaves cannot
    /// occur in any trie.
    InternalNodeTooFewLeaves,
    MotifTooSmall {
        size: u32,
    },
    PrefixBudgetExceeded {
        stream: usize,
        budget: usize,
    },
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeError::EmptyWordTuple => write!(f, "word tuple is empty"),
            ShapeError::NoStreams => write!(f, "trie construction needs at least one stream"),
            ShapeError::MixedStreamAlphabets { first, other } => {
                write!(f, "streams disagree on alphabet size ({first} vs {other})")
            }
            ShapeError::ChildArityMismatch { expected, found } => {
                write!(f, "child node has arity {found}, parent has {expected} slots")
            }
            ShapeError::SymbolOutOfRange { word, position, symbol, m } => write!(
                f,
                "word {word} has symbol {symbol} at position {position}, out of range for m={m}"
            ),
            ShapeError::TriePropertyViolated { first, second } if first == second => write!(
                f,
                "trie property violated: word {first} minus its last symbol is a prefix of no other word"
            ),
            ShapeError::TriePropertyViolated { first, second } => {
                write!(f, "trie property violated: word {first} is a prefix of word {second}")
            }
            ShapeError::ArityMismatch { offset, expected, found } => write!(
                f,
                "arity mismatch at byte {offset}: internal node lists {found} children, alphabet has {expected}"
            ),
            ShapeError::ParseError { offset, message } => {
                write!(f, "parse error at byte {offset}: {message}")
            }
            ShapeError::InternalNodeTooFewLeaves => {
                write!(f, "internal node with fewer than two leaf descendants")
            }
            ShapeError::MotifTooSmall { size } => {
                write!(f, "motif has size {size}; motifs of size <= 1 overlap everything")
            }
            ShapeError::PrefixBudgetExceeded { stream, budget } => write!(
                f,
                "stream {stream} exceeded the prefix budget of {budget} symbols without separating"
            ),
        }
    }
}

impl std::error::Error for ShapeError {}

/// A canonical m-ary trie shape. Doubles as a motif and as a built trie.
///
/// `size` (leaf count) and `height` (longest root-to-leaf path, in edges) are
/// cached at construction; the derived equality checks them first, so
/// structural comparison fast-rejects almost everywhere during fringe
/// counting.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    size: u32,
    height: u32,
    kind: ShapeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    External,
    Internal(Vec<Option<Shape>>),
}

impl Shape {
    /// The single external node: a trie on one string.
    pub fn external() -> Self {
        Shape {
            size: 1,
            height: 0,
            kind: ShapeKind::External,
        }
    }

    /// Builds an internal node from m child slots. Rejects nodes whose
    /// subtree would carry fewer than two leaves and children of differing
    /// arity.
    pub fn internal(children: Vec<Option<Shape>>) -> Result<Self, ShapeError> {
        let m = children.len();
        if m < 2 {
            return Err(ShapeError::ArityMismatch {
                offset: 0,
                expected: 2,
                found: m,
            });
        }
        let mut size = 0u32;
        let mut height = 0u32;
        for child in children.iter().flatten() {
            if let Some(arity) = child.arity() {
                if arity != m {
                    return Err(ShapeError::ChildArityMismatch {
                        expected: m,
                        found: arity,
                    });
                }
            }
            size += child.size;
            height = height.max(child.height + 1);
        }
        if size < 2 {
            return Err(ShapeError::InternalNodeTooFewLeaves);
        }
        Ok(Shape {
            size,
            height,
            kind: ShapeKind::Internal(children),
        })
    }

    /// Leaf (external-node) count.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Longest root-to-external path length in edges; 0 for a single leaf.
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    /// Child-slot count of the root, `None` for an external node.
    pub fn arity(&self) -> Option<usize> {
        match &self.kind {
            ShapeKind::External => None,
            ShapeKind::Internal(children) => Some(children.len()),
        }
    }

    pub fn is_external(&self) -> bool {
        matches!(self.kind, ShapeKind::External)
    }

    /// True when the root is internal with at least two occupied slots.
    pub fn is_root_branching(&self) -> bool {
        match &self.kind {
            ShapeKind::External => false,
            ShapeKind::Internal(children) => children.iter().filter(|c| c.is_some()).count() >= 2,
        }
    }

    /// Canonical text form (see module docs for the grammar).
    pub fn encode(&self) -> String {
        let mut out = String::new();
        self.encode_into(&mut out);
        out
    }

    fn encode_into(&self, out: &mut String) {
        match &self.kind {
            ShapeKind::External => out.push('L'),
            ShapeKind::Internal(children) => {
                out.push('(');
                for child in children {
                    match child {
                        None => out.push('E'),
                        Some(shape) => shape.encode_into(out),
                    }
                }
                out.push(')');
            }
        }
    }

    /// Parses the canonical text form for alphabet size m.
    pub fn decode(text: &str, m: usize) -> Result<Self, ShapeError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let shape = parse_shape(bytes, &mut pos, m)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(ShapeError::ParseError {
                offset: pos,
                message: "trailing input after shape".into(),
            });
        }
        Ok(shape)
    }

    /// The canonical word tuple: leftmost-first depth-first leaf paths.
    pub fn words(&self) -> WordTuple {
        let mut words = Vec::with_capacity(self.size as usize);
        let mut path = Vec::new();
        collect_words(self, &mut path, &mut words);
        WordTuple { words }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn collect_words(shape: &Shape, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    match &shape.kind {
        ShapeKind::External => out.push(path.clone()),
        ShapeKind::Internal(children) => {
            for (j, child) in children.iter().enumerate() {
                if let Some(c) = child {
                    path.push(j as u8);
                    collect_words(c, path, out);
                    path.pop();
                }
            }
        }
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_shape(bytes: &[u8], pos: &mut usize, m: usize) -> Result<Shape, ShapeError> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'L') => {
            *pos += 1;
            Ok(Shape::external())
        }
        Some(b'(') => {
            let open = *pos;
            *pos += 1;
            let mut children = Vec::with_capacity(m);
            loop {
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b')') => {
                        *pos += 1;
                        break;
                    }
                    Some(b'E') => {
                        *pos += 1;
                        children.push(None);
                    }
                    Some(b'L') | Some(b'(') => {
                        children.push(Some(parse_shape(bytes, pos, m)?));
                    }
                    Some(&c) => {
                        return Err(ShapeError::ParseError {
                            offset: *pos,
                            message: format!("unexpected byte {:?}", c as char),
                        })
                    }
                    None => {
                        return Err(ShapeError::ParseError {
                            offset: *pos,
                            message: "unclosed internal node".into(),
                        })
                    }
                }
            }
            if children.len() != m {
                return Err(ShapeError::ArityMismatch {
                    offset: open,
                    expected: m,
                    found: children.len(),
                });
            }
            Shape::internal(children)
        }
        Some(&c) => Err(ShapeError::ParseError {
            offset: *pos,
            message: format!("expected 'L' or '(', found {:?}", c as char),
        }),
        None => Err(ShapeError::ParseError {
            offset: *pos,
            message: "empty input".into(),
        }),
    }
}

/// An ordered tuple of finite words with the trie property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordTuple {
    words: Vec<Vec<u8>>,
}

impl WordTuple {
    /// Validates the trie property: no word prefixes another, and every
    /// nonempty word's parent prefix is shared with some other word. A
    /// single-word tuple must hold the empty word.
    pub fn new(words: Vec<Vec<u8>>) -> Result<Self, ShapeError> {
        if words.is_empty() {
            return Err(ShapeError::EmptyWordTuple);
        }
        if words.len() == 1 {
            if !words[0].is_empty() {
                return Err(ShapeError::TriePropertyViolated {
                    first: 0,
                    second: 0,
                });
            }
            return Ok(WordTuple { words });
        }
        // Sort indices lexicographically; prefix pairs become adjacent.
        let mut order: Vec<usize> = (0..words.len()).collect();
        order.sort_by(|&a, &b| words[a].cmp(&words[b]));
        for w in order.windows(2) {
            let (i, j) = (w[0], w[1]);
            if words[j].starts_with(&words[i]) {
                return Err(ShapeError::TriePropertyViolated {
                    first: i,
                    second: j,
                });
            }
        }
        // Parent-prefix condition: the word at sorted position t shares its
        // parent prefix with a neighbor iff it shares it with anything.
        for (t, &i) in order.iter().enumerate() {
            let word = &words[i];
            if word.is_empty() {
                // An empty word among n >= 2 would prefix everything; the
                // prefix scan above already rejected it.
                unreachable!("empty word survived prefix validation");
            }
            let parent = &word[..word.len() - 1];
            let shares =
                |other: Option<&usize>| other.is_some_and(|&k| words[k].starts_with(parent));
            if !shares(t.checked_sub(1).and_then(|p| order.get(p))) && !shares(order.get(t + 1)) {
                return Err(ShapeError::TriePropertyViolated {
                    first: i,
                    second: i,
                });
            }
        }
        Ok(WordTuple { words })
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Builds the unique trie whose external nodes realize the given words.
/// Symbols must lie in 0..m.
pub fn shape_from_words(tuple: &WordTuple, m: usize) -> Result<Shape, ShapeError> {
    for (wi, word) in tuple.words.iter().enumerate() {
        for (pi, &s) in word.iter().enumerate() {
            if s as usize >= m {
                return Err(ShapeError::SymbolOutOfRange {
                    word: wi,
                    position: pi,
                    symbol: s,
                    m,
                });
            }
        }
    }
    let refs: Vec<&[u8]> = tuple.words.iter().map(|w| w.as_slice()).collect();
    build_from_words(&refs, 0, m)
}

fn build_from_words(words: &[&[u8]], depth: usize, m: usize) -> Result<Shape, ShapeError> {
    if words.len() == 1 && words[0].len() == depth {
        return Ok(Shape::external());
    }
    let mut buckets: Vec<Vec<&[u8]>> = vec![Vec::new(); m];
    for &w in words {
        if w.len() <= depth {
            // A word exhausted while sharing its prefix with others.
            return Err(ShapeError::TriePropertyViolated {
                first: 0,
                second: 0,
            });
        }
        buckets[w[depth] as usize].push(w);
    }
    let mut children = Vec::with_capacity(m);
    for bucket in &buckets {
        if bucket.is_empty() {
            children.push(None);
        } else {
            children.push(Some(build_from_words(bucket, depth + 1, m)?));
        }
    }
    Shape::internal(children)
}

/// Inverse of [`shape_from_words`]: the canonical (leftmost-first) word tuple.
pub fn words_from_shape(shape: &Shape) -> WordTuple {
    shape.words()
}

/// Result of building a trie on live streams: the shape plus the realized
/// distinguishing prefixes, in stream order. `prefixes[j].len()` is exactly
/// L_j, the shortest prefix separating string j from all others.
#[derive(Debug, Clone)]
pub struct BuiltTrie {
    pub shape: Shape,
    pub prefixes: Vec<Vec<u8>>,
}

pub const DEFAULT_PREFIX_BUDGET: usize = 10_000;

/// Builds the trie of n strings, consuming from each stream only the symbols
/// needed to separate it. `budget` caps the consumed prefix length per
/// string; hitting it signals an astronomically improbable collision or a
/// broken generator.
pub fn build_trie(streams: &mut [SymbolStream], budget: usize) -> Result<BuiltTrie, ShapeError> {
    if streams.is_empty() {
        return Err(ShapeError::NoStreams);
    }
    let m = streams[0].m();
    for s in streams.iter().skip(1) {
        if s.m() != m {
            return Err(ShapeError::MixedStreamAlphabets {
                first: m,
                other: s.m(),
            });
        }
    }
    let mut prefixes: Vec<Vec<u8>> = vec![Vec::new(); streams.len()];
    let indices: Vec<usize> = (0..streams.len()).collect();
    let shape = build_from_streams(streams, &mut prefixes, &indices, 0, m, budget)?;
    Ok(BuiltTrie { shape, prefixes })
}

fn build_from_streams(
    streams: &mut [SymbolStream],
    prefixes: &mut [Vec<u8>],
    group: &[usize],
    depth: usize,
    m: usize,
    budget: usize,
) -> Result<Shape, ShapeError> {
    if group.len() == 1 {
        return Ok(Shape::external());
    }
    if depth >= budget {
        return Err(ShapeError::PrefixBudgetExceeded {
            stream: group[0],
            budget,
        });
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &i in group {
        debug_assert_eq!(prefixes[i].len(), depth);
        let symbol = streams[i].next_symbol();
        prefixes[i].push(symbol);
        buckets[symbol as usize].push(i);
    }
    let mut children = Vec::with_capacity(m);
    for bucket in &buckets {
        if bucket.is_empty() {
            children.push(None);
        } else {
            children.push(Some(build_from_streams(
                streams,
                prefixes,
                bucket,
                depth + 1,
                m,
                budget,
            )?));
        }
    }
    Shape::internal(children)
}

/// Counts the nodes of `trie` whose entire rooted subtree equals `motif`
/// (structural equality, empty slots included). Occurrences rooted at any
/// node count, the root included.
pub fn count_fringe_occurrences(trie: &Shape, motif: &Shape) -> Result<u64, ShapeError> {
    if motif.size() < 2 {
        return Err(ShapeError::MotifTooSmall { size: motif.size() });
    }
    Ok(count_occurrences(trie, motif))
}

fn count_occurrences(node: &Shape, motif: &Shape) -> u64 {
    if node.size < motif.size {
        return 0;
    }
    let mut count = u64::from(node == motif);
    if let ShapeKind::Internal(children) = &node.kind {
        for child in children.iter().flatten() {
            count += count_occurrences(child, motif);
        }
    }
    count
}
