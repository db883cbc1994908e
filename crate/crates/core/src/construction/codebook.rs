use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::code::{CodeSpace, ConstraintTargets, TwoDeletionCode};
use super::params::CodeParams;
use crate::bitseq::{deletion_ball2, BitString};
use crate::error::{Error, Result};

/// Largest length for which exhaustive enumeration is attempted.
pub const MAX_ENUM_N: usize = 22;

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUM_N {
        return Err(Error::arg(format!(
            "exhaustive enumeration is limited to n <= {MAX_ENUM_N}; sample with constraint-prob instead"
        )));
    }
    Ok(())
}

fn all_strings(n: usize) -> impl ParallelIterator<Item = BitString> {
    (0..1u64 << n).into_par_iter().map(move |v| BitString::from_value(v, n))
}

/// All codewords in lexicographic order.
pub fn enumerate_codebook(code: &TwoDeletionCode) -> Result<Vec<BitString>> {
    let n = code.n();
    check_enumerable(n)?;
    let mut out: Vec<BitString> = all_strings(n).filter(|x| code.is_member(x)).collect();
    out.sort();
    Ok(out)
}

/// Size of the constrained set the codebooks partition.
pub fn constrained_set_size(space: &CodeSpace) -> Result<u64> {
    let n = space.params().n;
    check_enumerable(n)?;
    Ok(all_strings(n).filter(|x| space.in_constrained_set(x)).count() as u64)
}

/// Sizes of every nonempty codebook, keyed by targets.
pub fn codebook_sizes(space: &CodeSpace) -> Result<HashMap<ConstraintTargets, u64>> {
    let n = space.params().n;
    check_enumerable(n)?;
    Ok(all_strings(n)
        .filter_map(|x| space.profile(&x).ok())
        .fold(HashMap::new, |mut acc: HashMap<ConstraintTargets, u64>, t| {
            *acc.entry(t).or_default() += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        }))
}

/// Result of choosing the largest codebook.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub targets: ConstraintTargets,
    pub size: u64,
    /// `|C_T|` (construction 1) or `|C_T2|` (construction 2).
    pub constrained: u64,
    /// `log2` of the averaging guarantee `|C_T| / (number of target tuples)`.
    pub log2_guarantee: f64,
}

impl Selection {
    pub fn meets_guarantee(&self) -> bool {
        (self.size as f64).log2() >= self.log2_guarantee
    }
}

/// The targets with the largest codebook; ties go to the smallest targets.
pub fn select_targets(space: &CodeSpace) -> Result<Selection> {
    let sizes = codebook_sizes(space)?;
    let constrained: u64 = sizes.values().sum();
    let (targets, size) = sizes
        .into_iter()
        .max_by(|(ta, a), (tb, b)| a.cmp(b).then_with(|| tb.cmp(ta)))
        .ok_or_else(|| Error::ConstraintViolation("the constrained set is empty".into()))?;
    Ok(Selection {
        targets,
        size,
        constrained,
        log2_guarantee: (constrained as f64).log2() - space.params().log2_target_space(),
    })
}

/// First line of a codebook file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookHeader {
    #[serde(flatten)]
    pub params: CodeParams,
    #[serde(flatten)]
    pub targets: ConstraintTargets,
    pub hash_family: String,
}

impl CodebookHeader {
    pub fn new(code: &TwoDeletionCode) -> Self {
        CodebookHeader {
            params: code.params().clone(),
            targets: code.targets().clone(),
            hash_family: code.space().family().cache_key(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("header serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::arg(format!("bad codebook header: {e}")))
    }

    /// Rebuilds the code the header describes, refusing a hash family or
    /// parameter set that does not match.
    pub fn open(&self, cache_dir: Option<&Path>) -> Result<TwoDeletionCode> {
        let p = &self.params;
        let space = CodeSpace::for_length(p.n, p.s, p.construction, cache_dir)?;
        if space.family().cache_key() != self.hash_family {
            return Err(Error::arg(format!(
                "header names hash family {}, built {}",
                self.hash_family,
                space.family().cache_key()
            )));
        }
        if space.params() != p {
            return Err(Error::arg("header parameters do not match the derived parameters"));
        }
        space.with_targets(self.targets.clone())
    }
}

/// A received word the decoder got wrong.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub x: BitString,
    pub y: BitString,
    /// What came back instead of `x`.
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub codewords: u64,
    /// Distinct received words checked, summed over codewords.
    pub received: u64,
    pub counterexample: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Decodes every two-deletion received word of every codeword; with
/// `oracle` the brute-force decoder must agree too. Reports the first
/// failure in codeword order.
pub fn verify_codewords(code: &TwoDeletionCode, words: &[BitString], oracle: bool) -> Result<VerifyReport> {
    let received = AtomicU64::new(0);
    let counterexample = words.par_iter().find_map_first(|x| {
        let ball = match deletion_ball2(x) {
            Ok(b) => b,
            Err(e) => return Some(Counterexample { x: x.clone(), y: x.clone(), result: e.to_string() }),
        };
        received.fetch_add(ball.len() as u64, Ordering::Relaxed);
        ball.into_iter().find_map(|y| {
            let result = match code.decode(&y) {
                Ok(o) if &o.recovered == x => None,
                Ok(o) => Some(format!("decoded to {} via {}", o.recovered, o.branch)),
                Err(e) => Some(e.to_string()),
            };
            let result = result.or_else(|| {
                if !oracle {
                    return None;
                }
                match code.oracle_decode(&y) {
                    Ok(z) if &z == x => None,
                    Ok(z) => Some(format!("oracle found {z}")),
                    Err(e) => Some(format!("oracle: {e}")),
                }
            })?;
            Some(Counterexample { x: x.clone(), y, result })
        })
    });
    Ok(VerifyReport {
        codewords: words.len() as u64,
        received: received.into_inner(),
        counterexample,
    })
}

pub fn write_codebook(mut out: impl Write, header: &CodebookHeader, words: &[BitString]) -> Result<()> {
    writeln!(out, "{}", header.to_json())?;
    for w in words {
        writeln!(out, "{w}")?;
    }
    Ok(())
}

pub fn read_codebook(input: impl BufRead) -> Result<(CodebookHeader, Vec<BitString>)> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::arg("codebook file is empty"))??;
    let header = CodebookHeader::from_json(&first)?;
    let mut words = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() {
            words.push(t.parse()?);
        }
    }
    Ok((header, words))
}
