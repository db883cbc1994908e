//! Binary sequences and the combinatorics of deleting symbols from them.
//!
//! Positions in the public API are 1-indexed: position 1 is the leftmost
//! symbol. Internally strings are stored as a `Vec<u8>` of 0/1 values.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite binary string.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<u8>);

impl BitString {
    /// Builds a string from 0/1 symbols, rejecting anything else.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::arg(format!("symbol {b} is not binary")));
        }
        Ok(BitString(bits))
    }

    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![0; len])
    }

    pub fn ones(len: usize) -> Self {
        BitString(vec![1; len])
    }

    /// The `len`-bit big-endian expansion of `value` (position 1 is the most
    /// significant bit). Bits of `value` above `len` are ignored.
    pub fn from_value(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_value supports at most 64 bits");
        BitString((0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect())
    }

    /// Big-endian integer value. Only meaningful for strings of at most 64 bits.
    pub fn value(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub(crate) fn from_vec_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitString(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    /// Symbol at 1-indexed position `pos`.
    pub fn get(&self, pos: usize) -> Option<u8> {
        pos.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    /// Substring covering 1-indexed positions `from..=to`.
    pub fn substring(&self, from: usize, to: usize) -> BitString {
        if from > to || from == 0 {
            return BitString::empty();
        }
        BitString(self.0[from - 1..to].to_vec())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Copy with the single symbol at 1-indexed `pos` removed.
    pub fn delete1(&self, pos: usize) -> Result<BitString> {
        if pos == 0 || pos > self.len() {
            return Err(Error::arg(format!(
                "deletion position {pos} outside 1..={}",
                self.len()
            )));
        }
        let mut v = self.0.clone();
        v.remove(pos - 1);
        Ok(BitString(v))
    }

    /// Copy with `bit` inserted so that it ends up at 1-indexed position `pos`.
    pub fn insert(&self, pos: usize, bit: u8) -> Result<BitString> {
        if pos == 0 || pos > self.len() + 1 || bit > 1 {
            return Err(Error::arg(format!("cannot insert {bit} at position {pos}")));
        }
        let mut v = self.0.clone();
        v.insert(pos - 1, bit);
        Ok(BitString(v))
    }

    /// True when `self` can be obtained from `other` by deleting symbols.
    pub fn is_subsequence_of(&self, other: &BitString) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|b| it.any(|c| c == b))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" {
            return Ok(BitString::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::arg(format!("'{other}' is not a binary digit"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<u8>> for BitString {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        BitString::new(bits)
    }
}

/// A pair of 1-indexed deletion positions with `i1 < i2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeletionPair {
    pub i1: usize,
    pub i2: usize,
}

impl DeletionPair {
    pub fn new(i1: usize, i2: usize) -> Result<Self> {
        if i1 == 0 || i1 >= i2 {
            return Err(Error::arg(format!(
                "deletion pair ({i1},{i2}) must satisfy 1 <= i1 < i2"
            )));
        }
        Ok(DeletionPair { i1, i2 })
    }

    /// Every pair valid for a string of length `len`, in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = DeletionPair> {
        (1..=len).flat_map(move |i1| (i1 + 1..=len).map(move |i2| DeletionPair { i1, i2 }))
    }
}

/// `D(i1, i2, x)`: `x` with the symbols at positions `i1` and `i2` removed.
pub fn delete2(x: &BitString, d: DeletionPair) -> Result<BitString> {
    if d.i1 == 0 || d.i1 >= d.i2 || d.i2 > x.len() {
        return Err(Error::arg(format!(
            "deletion pair ({},{}) invalid for a string of length {}",
            d.i1,
            d.i2,
            x.len()
        )));
    }
    let bits = x
        .as_slice()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i + 1 != d.i1 && i + 1 != d.i2)
        .map(|(_, &b)| b)
        .collect();
    Ok(BitString(bits))
}

// Deleting any symbol of a run gives the same result, so only run starts matter.
fn single_deletions(x: &[u8]) -> impl Iterator<Item = Vec<u8>> + '_ {
    (0..x.len())
        .filter(move |&i| i == 0 || x[i] != x[i - 1])
        .map(move |i| {
            let mut v = Vec::with_capacity(x.len() - 1);
            v.extend_from_slice(&x[..i]);
            v.extend_from_slice(&x[i + 1..]);
            v
        })
}

// Inserting b directly before an existing b duplicates inserting it after, so
// only positions followed by the other symbol (or the end) are used.
fn single_insertions(y: &[u8]) -> impl Iterator<Item = Vec<u8>> + '_ {
    (0..=y.len()).flat_map(move |i| {
        [0u8, 1u8].into_iter().filter_map(move |b| {
            if i < y.len() && y[i] == b {
                return None;
            }
            let mut v = Vec::with_capacity(y.len() + 1);
            v.extend_from_slice(&y[..i]);
            v.push(b);
            v.extend_from_slice(&y[i..]);
            Some(v)
        })
    })
}

/// All distinct results of deleting exactly `t` symbols from `x`.
pub fn deletion_ball(x: &BitString, t: usize) -> Result<BTreeSet<BitString>> {
    if t > x.len() {
        return Err(Error::arg(format!(
            "cannot delete {t} symbols from a string of length {}",
            x.len()
        )));
    }
    let mut layer: BTreeSet<Vec<u8>> = BTreeSet::from([x.0.clone()]);
    for _ in 0..t {
        layer = layer.iter().flat_map(|v| single_deletions(v)).collect();
    }
    Ok(layer.into_iter().map(BitString).collect())
}

/// `D2(x)`: all distinct results of two deletions.
pub fn deletion_ball2(x: &BitString) -> Result<BTreeSet<BitString>> {
    if x.len() < 2 {
        return Err(Error::arg("deletion_ball2 needs a string of length >= 2"));
    }
    deletion_ball(x, 2)
}

/// All strings `z` with `|z| = |y| + t` from which `y` arises by `t` deletions.
pub fn insertion_ball(y: &BitString, t: usize) -> Result<BTreeSet<BitString>> {
    if t > 2 {
        return Err(Error::arg(format!("insertion count {t} exceeds 2")));
    }
    let mut layer: BTreeSet<Vec<u8>> = BTreeSet::from([y.0.clone()]);
    for _ in 0..t {
        layer = layer.iter().flat_map(|v| single_insertions(v)).collect();
    }
    Ok(layer.into_iter().map(BitString).collect())
}

/// A fixed substring used to cut strings into segments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marker(BitString);

impl Marker {
    pub fn new(pattern: BitString) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::arg("marker must be non-empty"));
        }
        Ok(Marker(pattern))
    }

    /// Parses a marker from '0'/'1' text, panicking on malformed literals.
    pub fn lit(pattern: &str) -> Self {
        Marker::new(pattern.parse().expect("marker literal")).expect("marker literal")
    }

    pub fn pattern(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Marker({})", self.0)
    }
}

impl FromStr for Marker {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Marker::new(s.parse()?)
    }
}

/// 1-indexed start positions of all (possibly overlapping) occurrences of `w`.
pub fn occurrences(x: &BitString, w: &Marker) -> Vec<usize> {
    let pat = w.pattern().as_slice();
    x.as_slice()
        .windows(pat.len())
        .enumerate()
        .filter(|(_, win)| *win == pat)
        .map(|(i, _)| i + 1)
        .collect()
}

pub fn count_occurrences(x: &BitString, w: &Marker) -> usize {
    let pat = w.pattern().as_slice();
    x.as_slice().windows(pat.len()).filter(|win| *win == pat).count()
}

/// `(N0, N1)`: the number of zeros and ones.
pub fn count_symbols(x: &BitString) -> (usize, usize) {
    let ones = x.count_ones();
    (x.len() - ones, ones)
}

/// Placement of one segment inside the segmented string (0-indexed, half open).
///
/// `overlapped` marks a gap between two overlapping occurrences, which has
/// no position of its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentSpan {
    pub start: usize,
    pub end: usize,
    pub overlapped: bool,
}

/// The occurrences of a marker and the `k + 1` strings around them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub marker: Marker,
    /// 1-indexed occurrence starts, ascending.
    pub starts: Vec<usize>,
    pub segments: Vec<BitString>,
    pub spans: Vec<SegmentSpan>,
    pub max_gap: usize,
}

impl Segmentation {
    /// Number of positions covered by at least one occurrence.
    pub fn covered_len(&self) -> usize {
        let m = self.marker.len();
        let mut covered = 0;
        let mut reach = 0; // one past the last covered 0-indexed position
        for &p in &self.starts {
            let (a, b) = (p - 1, p - 1 + m);
            covered += b - a.max(reach).min(b);
            reach = reach.max(b);
        }
        covered
    }
}

/// Splits `x` at the occurrences of `w`. With no occurrence the whole string
/// is the single segment.
pub fn segment_by_marker(x: &BitString, w: &Marker) -> Segmentation {
    let starts = occurrences(x, w);
    let m = w.len();
    let bits = x.as_slice();
    let mut spans = Vec::with_capacity(starts.len() + 1);
    let mut from = 0usize;
    for &p in &starts {
        let to = p - 1;
        spans.push(SegmentSpan {
            start: from,
            end: to.max(from),
            overlapped: to < from,
        });
        from = to + m;
    }
    spans.push(SegmentSpan {
        start: from,
        end: bits.len().max(from),
        overlapped: false,
    });
    let segments: Vec<BitString> = spans
        .iter()
        .map(|s| BitString(bits[s.start..s.end].to_vec()))
        .collect();
    let max_gap = segments.iter().map(BitString::len).max().unwrap_or(0);
    Segmentation {
        marker: w.clone(),
        starts,
        segments,
        spans,
        max_gap,
    }
}

/// `L(x, w)`: the longest segment, prefix and suffix included.
pub fn max_gap(x: &BitString, w: &Marker) -> usize {
    segment_by_marker(x, w).max_gap
}

/// Run-length summary of a string.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunProfile {
    /// Longest run of either symbol.
    pub tau: usize,
    /// Lengths of the runs of ones, left to right.
    pub tau1: Vec<usize>,
    /// `tau1` restricted to entries of at least 2.
    pub tau_ge2: Vec<usize>,
}

pub fn run_profile(x: &BitString) -> RunProfile {
    let mut profile = RunProfile::default();
    let bits = x.as_slice();
    let mut i = 0;
    while i < bits.len() {
        let mut j = i;
        while j < bits.len() && bits[j] == bits[i] {
            j += 1;
        }
        let len = j - i;
        profile.tau = profile.tau.max(len);
        if bits[i] == 1 {
            profile.tau1.push(len);
            if len >= 2 {
                profile.tau_ge2.push(len);
            }
        }
        i = j;
    }
    profile
}

/// Sum of the 1st, 3rd, 5th, ... one-run lengths, reduced mod `s + 1`.
pub fn balance_sum(x: &BitString, s: usize) -> usize {
    let tau1 = run_profile(x).tau1;
    tau1.iter().step_by(2).sum::<usize>() % (s + 1)
}

/// How a marker's occurrences fare under a deletion pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preservation {
    Preserved,
    Destroyed,
    Created,
    Both,
}

/// Every 1-indexed deletion tuple that turns `x` into `y` (`|x| - |y|` in {1, 2}).
pub fn realizing_deletions(x: &BitString, y: &BitString) -> Result<Vec<Vec<usize>>> {
    match x.len().checked_sub(y.len()) {
        Some(1) => Ok((1..=x.len())
            .filter(|&i| skip_matches(x.as_slice(), y.as_slice(), &[i]))
            .map(|i| vec![i])
            .collect()),
        Some(2) => Ok(DeletionPair::all(x.len())
            .filter(|d| skip_matches(x.as_slice(), y.as_slice(), &[d.i1, d.i2]))
            .map(|d| vec![d.i1, d.i2])
            .collect()),
        _ => Err(Error::arg(format!(
            "length difference {} - {} is not 1 or 2",
            x.len(),
            y.len()
        ))),
    }
}

fn skip_matches(x: &[u8], y: &[u8], skip: &[usize]) -> bool {
    x.iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(&(i + 1)))
        .map(|(_, b)| b)
        .eq(y.iter())
}

/// Classifies `w` between `x` and a received `y` with one or two deletions.
///
/// An occurrence of `w` in `x` is destroyed when every deletion tuple that
/// realizes `y` removes one of its symbols. An occurrence in `y` is created
/// when every realizing tuple makes it straddle a deletion point. The marker
/// is preserved when neither happens; the quantifier runs per occurrence,
/// so different occurrences may be explained by different tuples.
pub fn is_preserved(x: &BitString, y: &BitString, w: &Marker) -> Result<Preservation> {
    let tuples = realizing_deletions(x, y)?;
    if tuples.is_empty() {
        return Err(Error::arg(format!("{y} is not obtainable from {x} by deletions")));
    }
    let m = w.len();
    let destroyed = occurrences(x, w)
        .into_iter()
        .any(|p| tuples.iter().all(|t| t.iter().any(|&i| p <= i && i < p + m)));
    let created = occurrences(y, w)
        .into_iter()
        .any(|p| tuples.iter().all(|t| straddles_junction(p, m, t, y.len())));
    Ok(match (destroyed, created) {
        (false, false) => Preservation::Preserved,
        (true, false) => Preservation::Destroyed,
        (false, true) => Preservation::Created,
        (true, true) => Preservation::Both,
    })
}

// Deleting x position i (after `c` earlier deletions) joins y positions
// i-1-c and i-c.
fn straddles_junction(start: usize, m: usize, tuple: &[usize], ylen: usize) -> bool {
    tuple.iter().enumerate().any(|(c, &i)| {
        let Some(left) = i.checked_sub(1 + c) else {
            return false;
        };
        let right = i - c;
        left >= 1 && right <= ylen && start <= left && start + m - 1 >= right
    })
}
