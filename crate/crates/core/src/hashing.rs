//! Segment hashes: the injective index map, the two-deletion-recoverable
//! coloring hash, and the run-length hash used for the `11011` segments.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::bitseq::{
    insertion_ball, run_profile, segment_by_marker, BitString, Marker, Segmentation,
};
use crate::error::{Error, Result};
use crate::gf::primes;

/// Position of a string in the canonical order (shorter first, then
/// lexicographic). Equal to `f_index(v) - 1`.
pub fn canonical_index(v: &BitString) -> u64 {
    (1u64 << v.len()) - 1 + v.value()
}

/// Injective map from strings of length at most `s` into `1..=2^(s+1) - 1`.
///
/// The empty string maps to 1 and a length-`l` string to `2^l` plus its
/// big-endian value.
pub fn f_index(v: &BitString, s: usize) -> Result<u64> {
    if v.len() > s {
        return Err(Error::arg(format!(
            "string of length {} exceeds index bound {s}",
            v.len()
        )));
    }
    if s >= 63 {
        return Err(Error::arg("index bound must be below 63"));
    }
    Ok(canonical_index(v) + 1)
}

/// Anything that maps a segment to a symbol.
pub trait SegmentHash {
    /// Longest segment the hash accepts.
    fn max_len(&self) -> usize;
    fn hash_segment(&self, seg: &BitString) -> Result<u64>;
}

/// [`f_index`] as a [`SegmentHash`].
#[derive(Debug, Clone, Copy)]
pub struct IndexHash {
    pub s: usize,
}

impl SegmentHash for IndexHash {
    fn max_len(&self) -> usize {
        self.s
    }

    fn hash_segment(&self, seg: &BitString) -> Result<u64> {
        f_index(seg, self.s)
    }
}

const CACHE_MAGIC: &[u8; 4] = b"TDHF";
const CACHE_VERSION: u32 = 1;

/// A proper coloring of the confusability graph on all strings of length at
/// most `s`: two strings get distinct colors whenever some string can be
/// reached from both by at most two deletions each.
///
/// Given any `y` obtained from `x` by `t <= 2` deletions, the color of `x`
/// singles it out among the `t`-fold supersequences of `y`.
#[derive(Clone, PartialEq, Eq)]
pub struct HashFamily {
    s: usize,
    colors: u32,
    table: Vec<u32>,
}

impl std::fmt::Debug for HashFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HashFamily")
            .field("s", &self.s)
            .field("colors", &self.colors)
            .finish()
    }
}

/// Largest `s` accepted by [`HashFamily::build`].
pub const MAX_FAMILY_S: usize = 20;

// (len, value) packed string helpers used by the builder.
#[inline]
fn unpack_index(idx: u64) -> (u32, u64) {
    let len = 63 - (idx + 1).leading_zeros();
    (len, idx + 1 - (1u64 << len))
}

#[inline]
fn pack_index(len: u32, v: u64) -> u64 {
    (1u64 << len) - 1 + v
}

#[inline]
fn delete_bit(len: u32, v: u64, p: u32) -> u64 {
    // p counts from the most significant end
    let tail = len - p - 1;
    let high = v >> (tail + 1);
    let low = v & ((1u64 << tail) - 1);
    (high << tail) | low
}

/// Canonical indices of every string reachable from `idx` by 0, 1 or 2 deletions.
fn descendants(idx: u64, out: &mut Vec<u32>) {
    out.clear();
    let (len, v) = unpack_index(idx);
    out.push(idx as u32);
    for p in 0..len {
        let v1 = delete_bit(len, v, p);
        out.push(pack_index(len - 1, v1) as u32);
        for p2 in 0..len - 1 {
            out.push(pack_index(len - 2, delete_bit(len - 1, v1, p2)) as u32);
        }
    }
    out.sort_unstable();
    out.dedup();
}

impl HashFamily {
    /// Greedy coloring in canonical order: each string takes the smallest
    /// color not used by an earlier string it is confusable with.
    pub fn build(s: usize) -> Result<Self> {
        if s > MAX_FAMILY_S {
            return Err(Error::arg(format!(
                "hash family bound {s} exceeds the supported maximum {MAX_FAMILY_S}"
            )));
        }
        let total = (1usize << (s + 1)) - 1;
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); total];
        let mut table = vec![0u32; total];
        let mut stamp = vec![u32::MAX; 1];
        let mut desc = Vec::new();
        let mut colors = 0u32;
        for idx in 0..total {
            descendants(idx as u64, &mut desc);
            let mark = idx as u32;
            for &z in &desc {
                for &v in &buckets[z as usize] {
                    stamp[table[v as usize] as usize] = mark;
                }
            }
            let color = (0..stamp.len()).find(|&c| stamp[c] != mark).unwrap_or(stamp.len());
            if color == stamp.len() {
                stamp.push(u32::MAX);
            }
            table[idx] = color as u32;
            colors = colors.max(color as u32 + 1);
            for &z in &desc {
                buckets[z as usize].push(idx as u32);
            }
        }
        Ok(HashFamily { s, colors, table })
    }

    /// Loads the family for `s` from `cache_dir`, building and storing it on a miss.
    pub fn load_or_build(s: usize, cache_dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = cache_dir else {
            return Self::build(s);
        };
        let path = dir.join(Self::cache_file_name(s));
        if let Ok(family) = Self::read_from(&path) {
            if family.s == s {
                return Ok(family);
            }
        }
        let family = Self::build(s)?;
        fs::create_dir_all(dir)?;
        // write to a temporary name first so concurrent readers never see a torn file
        let tmp = dir.join(format!("{}.{}.tmp", Self::cache_file_name(s), std::process::id()));
        family.write_to(&tmp)?;
        fs::rename(&tmp, &path)?;
        Ok(family)
    }

    pub fn cache_file_name(s: usize) -> String {
        format!("hash-family-s{s}-v{CACHE_VERSION}.bin")
    }

    /// Cache key recorded in parameter files.
    pub fn cache_key(&self) -> String {
        Self::cache_file_name(self.s)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + 4 * self.table.len());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.s as u32).to_le_bytes());
        buf.extend_from_slice(&self.colors.to_le_bytes());
        for &c in &self.table {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        fs::File::create(path)?.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let mut buf = Vec::new();
        fs::File::open(path)?.read_to_end(&mut buf)?;
        let bad = |what: &str| Error::Io(format!("{}: {what}", path.display()));
        if buf.len() < 16 || &buf[..4] != CACHE_MAGIC {
            return Err(bad("not a hash family file"));
        }
        let word = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().unwrap());
        if word(4) != CACHE_VERSION {
            return Err(bad("unsupported version"));
        }
        let s = word(8) as usize;
        let colors = word(12);
        if s > MAX_FAMILY_S {
            return Err(bad("bound out of range"));
        }
        let total = (1usize << (s + 1)) - 1;
        if buf.len() != 16 + 4 * total {
            return Err(bad("truncated table"));
        }
        let table: Vec<u32> = (0..total).map(|i| word(16 + 4 * i)).collect();
        if table.iter().any(|&c| c >= colors) {
            return Err(bad("color out of range"));
        }
        Ok(HashFamily { s, colors, table })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Size of the image.
    pub fn colors(&self) -> u32 {
        self.colors
    }

    /// Color of `v`, or `None` when `v` is longer than `s`.
    pub fn color(&self, v: &BitString) -> Option<u32> {
        (v.len() <= self.s).then(|| self.table[canonical_index(v) as usize])
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Checks that every set of strings sharing a common descendant is
    /// rainbow-colored.
    pub fn validate(&self) -> Result<()> {
        let total = self.table.len();
        let mut seen: Vec<Vec<u32>> = vec![Vec::new(); total];
        let mut desc = Vec::new();
        for idx in 0..total {
            descendants(idx as u64, &mut desc);
            for &z in &desc {
                seen[z as usize].push(self.table[idx]);
            }
        }
        for (z, mut cols) in seen.into_iter().enumerate() {
            let before = cols.len();
            cols.sort_unstable();
            cols.dedup();
            if cols.len() != before {
                let (len, v) = unpack_index(z as u64);
                return Err(Error::InvariantViolation(format!(
                    "two confusable strings above {} share a color",
                    BitString::from_value(v, len as usize)
                )));
            }
        }
        Ok(())
    }
}

impl SegmentHash for HashFamily {
    fn max_len(&self) -> usize {
        self.s
    }

    fn hash_segment(&self, seg: &BitString) -> Result<u64> {
        self.color(seg)
            .map(u64::from)
            .ok_or_else(|| Error::arg(format!("segment of length {} exceeds {}", seg.len(), self.s)))
    }
}

/// Recovers the string of color `color` that yields `y_seg` after `t`
/// deletions.
///
/// No candidate means the caller mis-identified the segment; two candidates
/// mean the family itself is broken.
pub fn invert_segment(
    y_seg: &BitString,
    t: usize,
    color: u32,
    family: &HashFamily,
) -> Result<BitString> {
    if y_seg.len() + t > family.s() {
        return Err(Error::decode(format!(
            "segment of length {} plus {t} insertions exceeds {}",
            y_seg.len(),
            family.s()
        )));
    }
    let mut found: Option<BitString> = None;
    for z in insertion_ball(y_seg, t)? {
        if family.color(&z) == Some(color) {
            if let Some(prev) = &found {
                return Err(Error::InvariantViolation(format!(
                    "{prev} and {z} share color {color} over {y_seg}"
                )));
            }
            found = Some(z);
        }
    }
    found.ok_or_else(|| {
        Error::decode(format!("no {t}-insertion of {y_seg} has color {color}"))
    })
}

/// Run-length hash: the zero-padded vector of one-run lengths >= 2 multiplied
/// by the check rows `(1, ..., 1)` and `(1, 2, ..., s)` over `F_Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunHash {
    s: usize,
    modulus: u64,
}

impl RunHash {
    /// Uses the smallest prime `Q >= s + 2`.
    pub fn new(s: usize) -> Result<Self> {
        let q = primes::next_prime_at_least(s as u64 + 2)
            .ok_or_else(|| Error::arg("run hash modulus overflows"))?;
        Self::with_modulus(s, q)
    }

    pub fn with_modulus(s: usize, modulus: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::arg("run hash needs s >= 1"));
        }
        if !primes::is_prime(modulus) || modulus < s as u64 + 2 {
            return Err(Error::arg(format!(
                "run hash modulus {modulus} must be a prime >= s + 2 = {}",
                s + 2
            )));
        }
        Ok(RunHash { s, modulus })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// `Q`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The padded run-length vector of `v`.
    pub fn run_vector(&self, v: &BitString) -> Result<Vec<u64>> {
        if v.len() > self.s + 1 {
            return Err(Error::arg(format!(
                "string of length {} exceeds run hash bound {}",
                v.len(),
                self.s
            )));
        }
        let runs = run_profile(v).tau_ge2;
        if runs.len() > self.s {
            return Err(Error::arg("too many runs for the run hash"));
        }
        if let Some(&r) = runs.iter().find(|&&r| r as u64 >= self.modulus) {
            return Err(Error::arg(format!(
                "run of length {r} cannot be embedded mod {}",
                self.modulus
            )));
        }
        let mut out = vec![0u64; self.s];
        for (slot, r) in out.iter_mut().zip(runs) {
            *slot = r as u64;
        }
        Ok(out)
    }

    /// Applies the two check rows to an already padded vector.
    pub fn apply_vector(&self, vector: &[u64]) -> (u64, u64) {
        let q = self.modulus;
        vector.iter().enumerate().fold((0, 0), |(a, b), (j, &e)| {
            let e = e % q;
            ((a + e) % q, (b + (j as u64 + 1) % q * e) % q)
        })
    }

    pub fn apply(&self, v: &BitString) -> Result<(u64, u64)> {
        Ok(self.apply_vector(&self.run_vector(v)?))
    }

    /// Packs an output pair into one integer `a * Q + b`.
    pub fn pack(&self, pair: (u64, u64)) -> u64 {
        pair.0 * self.modulus + pair.1
    }

    pub fn unpack(&self, packed: u64) -> (u64, u64) {
        (packed / self.modulus, packed % self.modulus)
    }

    /// Number of distinct packed outputs, `Q^2`.
    pub fn image_size(&self) -> u64 {
        self.modulus * self.modulus
    }

    /// Given `observed - original` for two vectors differing in one entry,
    /// returns that entry's 1-indexed position and the change
    /// `observed[j] - original[j]` mod `Q`.
    pub fn locate_substitution(&self, observed: (u64, u64), original: (u64, u64)) -> Option<(usize, u64)> {
        let q = self.modulus;
        let d0 = (observed.0 + q - original.0) % q;
        let d1 = (observed.1 + q - original.1) % q;
        if d0 == 0 {
            return None;
        }
        let j = d1 * primes::mod_inverse(d0, q)? % q;
        (1..=self.s as u64).contains(&j).then_some((j as usize, d0))
    }
}

impl SegmentHash for RunHash {
    fn max_len(&self) -> usize {
        self.s
    }

    fn hash_segment(&self, seg: &BitString) -> Result<u64> {
        if seg.len() > self.s {
            return Err(Error::arg(format!(
                "segment of length {} exceeds {}",
                seg.len(),
                self.s
            )));
        }
        Ok(self.pack(self.apply(seg)?))
    }
}

/// The hash of each segment of a marker segmentation, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashSeq {
    pub marker: Marker,
    pub symbols: Vec<u64>,
}

impl HashSeq {
    pub fn hamming_distance(&self, other: &HashSeq) -> usize {
        let n = self.symbols.len().max(other.symbols.len());
        (0..n)
            .filter(|&i| self.symbols.get(i).unwrap_or(&0) != other.symbols.get(i).unwrap_or(&0))
            .count()
    }
}

/// Hashes every segment of `x` cut at `w`.
pub fn hash_sequence(x: &BitString, w: &Marker, hash: &dyn SegmentHash) -> Result<HashSeq> {
    hash_segmentation(&segment_by_marker(x, w), hash)
}

/// Hashes the segments of an existing segmentation.
pub fn hash_segmentation(seg: &Segmentation, hash: &dyn SegmentHash) -> Result<HashSeq> {
    let w = &seg.marker;
    let symbols = seg
        .segments
        .iter()
        .enumerate()
        .map(|(index, s)| {
            if s.len() > hash.max_len() {
                return Err(Error::SegmentTooLong {
                    marker: w.to_string(),
                    index,
                    len: s.len(),
                    bound: hash.max_len(),
                });
            }
            hash.hash_segment(s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HashSeq {
        marker: w.clone(),
        symbols,
    })
}

/// Default cache directory for hash families: `$TWODEL_CACHE_DIR` if set.
pub fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os("TWODEL_CACHE_DIR").map(PathBuf::from)
}
