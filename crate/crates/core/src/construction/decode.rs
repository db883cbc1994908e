use std::fmt;

use serde::{Serialize, Serializer};

use super::code::{MarkerId, TwoDeletionCode};
use super::params::Construction;
use crate::bitseq::{
    balance_sum, count_occurrences, count_symbols, insertion_ball, occurrences, run_profile,
    segment_by_marker, BitString, Marker,
};
use crate::error::{Error, Result};
use crate::hashing::{hash_segmentation, invert_segment};

/// The case analysis path a decode took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Ones2Via0000,
    Ones2Via1111,
    Ones2Via110011,
    Zeros2Via1111,
    Zeros2Via0000,
    Zeros2Via11011,
    Zeros2Via110011,
    Zeros2Tau,
    MixedVia110011,
    MixedVia1111,
    MixedVia0000,
    MixedCreatedVia1111,
    MixedCreatedVia0000,
    MixedCreatedVia11011,
    MixedCreatedVia110011,
    MixedCreatedTau,
    MixedMajority,
    MixedUnchangedVia0000,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        use Branch::*;
        match self {
            Ones2Via0000 => "ones2/0000",
            Ones2Via1111 => "ones2/1111",
            Ones2Via110011 => "ones2/110011",
            Zeros2Via1111 => "zeros2/1111",
            Zeros2Via0000 => "zeros2/0000",
            Zeros2Via11011 => "zeros2/11011",
            Zeros2Via110011 => "zeros2/110011",
            Zeros2Tau => "zeros2/tau+1111",
            MixedVia110011 => "mixed/110011",
            MixedVia1111 => "mixed/1111",
            MixedVia0000 => "mixed/0000",
            MixedCreatedVia1111 => "mixed-created/1111",
            MixedCreatedVia0000 => "mixed-created/0000",
            MixedCreatedVia11011 => "mixed-created/11011",
            MixedCreatedVia110011 => "mixed-created/110011",
            MixedCreatedTau => "mixed-created/tau+1111",
            MixedMajority => "mixed/majority",
            MixedUnchangedVia0000 => "mixed-unchanged/0000",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub recovered: BitString,
    pub branch: Branch,
}

/// Reading of a marker counter when one 0 and one 1 were deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shift {
    Unchanged,
    Destroyed,
    Created,
}

fn classify(delta: u8) -> Result<Shift> {
    match delta {
        0 => Ok(Shift::Unchanged),
        1 => Ok(Shift::Destroyed),
        4..=6 => Ok(Shift::Created),
        _ => Err(Error::Classification(format!(
            "counter moved by residue {delta}, impossible for one 0 and one 1"
        ))),
    }
}

/// All ways to insert `rest` symbols so that each lands inside or next to
/// an occurrence of `w`. With `rest == 0` this is just `y`.
fn insert_in_windows(y: &BitString, w: &Marker, rest: usize) -> Vec<BitString> {
    let mut layer = vec![y.clone()];
    for _ in 0..rest {
        let mut next = Vec::new();
        for z in &layer {
            let mut positions: Vec<usize> = occurrences(z, w)
                .into_iter()
                .flat_map(|p| p..=p + w.len())
                .collect();
            positions.sort_unstable();
            positions.dedup();
            for pos in positions {
                for bit in 0..=1 {
                    next.push(z.insert(pos, bit).expect("position inside the string"));
                }
            }
        }
        next.sort();
        next.dedup();
        layer = next;
    }
    layer
}

impl TwoDeletionCode {
    /// `(c_w - N_w(y)) mod 7`.
    fn delta(&self, y: &BitString, w: MarkerId) -> u8 {
        let have = count_occurrences(y, &w.marker()) % 7;
        ((self.targets.c[w.counter()] as usize + 7 - have) % 7) as u8
    }

    /// Recovers `x` from `y` missing `missing` symbols, assuming marker `w`
    /// kept its occurrences: correct the segment hashes, then re-grow each
    /// changed segment to the corrected color.
    ///
    /// A deletion inside the overlap of two adjacent occurrences leaves every
    /// segment intact, so symbols the corrected segments do not account for
    /// are re-inserted inside marker windows. Allocations that put more
    /// symbols into segments are tried first; every candidate must pass the
    /// membership post-check and the survivor must be unique.
    pub fn repair_via_marker(&self, y: &BitString, w: MarkerId, missing: usize) -> Result<BitString> {
        if !(1..=2).contains(&missing) || y.len() + missing != self.n() {
            return Err(Error::arg("repair needs one or two missing symbols"));
        }
        if w == MarkerId::M11011 && self.params().construction == Construction::Two {
            return Err(Error::arg("the 11011 segments carry the run hash in construction 2"));
        }
        let marker = w.marker();
        let seg = segment_by_marker(y, &marker);
        let hs = hash_segmentation(&seg, self.space.segment_hash(w))?;
        let corr = self.code_for(w).correct_up_to_2(&hs.symbols)?;
        let fixes = corr.fixes;
        if let Some(f) = fixes.iter().find(|f| f.position >= seg.segments.len()) {
            return Err(Error::decode(format!("correction lands on padding position {}", f.position)));
        }
        if fixes.len() > missing {
            return Err(Error::decode(format!(
                "{} corrected segments cannot account for {missing} missing symbols",
                fixes.len()
            )));
        }

        // symbols per corrected segment, most absorbed first
        let splits: Vec<Vec<usize>> = match (fixes.len(), missing) {
            (0, _) => vec![vec![]],
            (1, 1) => vec![vec![1]],
            (1, _) => vec![vec![2], vec![1]],
            _ => vec![vec![1, 1]],
        };
        let mut last_err = None;
        for split in splits {
            let mut bits = y.as_slice().to_vec();
            let mut grown_ok = true;
            // splice right to left so earlier spans stay valid
            for (fix, &t) in fixes.iter().zip(&split).rev() {
                let span = seg.spans[fix.position];
                if span.overlapped {
                    last_err = Some(Error::decode("corrected segment sits between overlapping markers"));
                    grown_ok = false;
                    break;
                }
                match invert_segment(&seg.segments[fix.position], t, fix.corrected as u32, self.space.family()) {
                    Ok(grown) => {
                        bits.splice(span.start..span.end, grown.into_vec());
                    }
                    Err(e) if e.is_branch_failure() => {
                        last_err = Some(e);
                        grown_ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !grown_ok {
                continue;
            }
            let partial = BitString::from_vec_unchecked(bits);
            let rest = missing - split.iter().sum::<usize>();
            let mut found: Vec<BitString> = Vec::new();
            for x in insert_in_windows(&partial, &marker, rest) {
                match self.post_check(y, &x) {
                    Ok(()) if !found.contains(&x) => found.push(x),
                    Ok(()) => {}
                    Err(e) => last_err = Some(e),
                }
            }
            match found.len() {
                0 => {}
                1 => return Ok(found.pop().unwrap()),
                _ => return Err(Error::decode("several codewords explain the corrected hashes")),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::decode("no candidate explains the corrected hashes")))
    }

    fn post_check(&self, y: &BitString, x: &BitString) -> Result<()> {
        if x.len() != self.n() || !y.is_subsequence_of(x) {
            return Err(Error::decode(format!("{x} does not explain {y}")));
        }
        self.check_member(x)
            .map_err(|v| Error::decode(format!("candidate {x} is not a codeword ({v})")))
    }

    /// Re-inserts the zero whose deletion merged two one-runs, using the
    /// single corrupted run-hash symbol of the `11011` segmentation.
    ///
    /// Returns the candidates of length `|y| + 1`. With `use_balance` the
    /// orientation of the split is fixed by the balance target; otherwise
    /// both orientations are returned.
    pub fn tau_recovery_path(&self, y: &BitString, use_balance: bool) -> Result<Vec<BitString>> {
        let (Some(rh), Some(b)) = (self.space.run_hash(), self.targets.b) else {
            return Err(Error::arg("run-length recovery needs construction 2"));
        };
        let w = MarkerId::M11011;
        let seg = segment_by_marker(y, &w.marker());
        let hs = hash_segmentation(&seg, rh)?;
        let corr = self.code_for(w).correct_up_to_1(&hs.symbols)?;
        let [fix] = corr.fixes[..] else {
            return Err(Error::decode("run hash shows no substitution"));
        };
        if fix.position >= seg.segments.len() {
            return Err(Error::decode("run hash correction lands on padding"));
        }
        let (j, delta) = rh
            .locate_substitution(rh.unpack(fix.received), rh.unpack(fix.corrected))
            .ok_or_else(|| Error::decode("run hash difference is not a single substitution"))?;

        let segment = &seg.segments[fix.position];
        let runs = run_profile(segment).tau_ge2;
        let Some(&len) = runs.get(j - 1) else {
            return Err(Error::decode(format!("segment has no {j}-th long run")));
        };
        let q = rh.modulus();
        let original = (len as u64 + q - delta) % q;
        let merged = (original >= 2 && len as u64 == original + 1) || (original == 0 && len == 2);
        if !merged {
            return Err(Error::decode(format!(
                "run of length {len} is not a merge of a run of length {original}"
            )));
        }

        // 0-indexed start of the j-th long run inside y
        let bits = segment.as_slice();
        let mut start = None;
        let (mut i, mut seen) = (0, 0);
        while i < bits.len() {
            let mut e = i;
            while e < bits.len() && bits[e] == bits[i] {
                e += 1;
            }
            if bits[i] == 1 && e - i >= 2 {
                seen += 1;
                if seen == j {
                    start = Some(seg.spans[fix.position].start + i);
                    break;
                }
            }
            i = e;
        }
        let start = start.expect("run located above");
        // 1-indexed insertion points giving (1, len-1) and (len-1, 1)
        let mut positions = vec![start + 2, start + len];
        positions.dedup();
        let mut out = Vec::new();
        for pos in positions {
            let z = y.insert(pos, 0)?;
            if !use_balance || balance_sum(&z, self.params().s) == b {
                out.push(z);
            }
        }
        if out.is_empty() {
            return Err(Error::decode("neither split of the merged run matches the balance"));
        }
        Ok(out)
    }

    // tau recovery followed by a single-deletion 1111 repair
    fn tau_then_finish(&self, y: &BitString, use_balance: bool) -> Result<BitString> {
        let mut found: Vec<BitString> = Vec::new();
        let mut last_err = None;
        for partial in self.tau_recovery_path(y, use_balance)? {
            match self.repair_via_marker(&partial, MarkerId::Ones4, 1) {
                Ok(x) if !found.contains(&x) => found.push(x),
                Ok(_) => {}
                Err(e) if e.is_branch_failure() => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        match found.len() {
            1 => Ok(found.pop().unwrap()),
            0 => Err(last_err.unwrap_or_else(|| Error::decode("no finishing repair succeeded"))),
            _ => Err(Error::decode("both splits of the merged run yield codewords")),
        }
    }

    fn majority(&self, y: &BitString) -> Result<BitString> {
        let mut results = Vec::new();
        for w in [MarkerId::Zeros4, MarkerId::Ones4, MarkerId::M110011] {
            match self.repair_via_marker(y, w, 2) {
                Ok(x) => results.push(x),
                Err(e) if e.is_branch_failure() => {}
                Err(e) => return Err(e),
            }
        }
        results
            .iter()
            .find(|x| results.iter().filter(|z| z == x).count() >= 2)
            .cloned()
            .ok_or_else(|| Error::decode("no two of the three repairs agree"))
    }

    /// Structured decoder: reads the deletion type off the counters and
    /// repairs through a marker known to be intact.
    pub fn decode(&self, y: &BitString) -> Result<DecodeOutcome> {
        let n = self.n();
        if y.len() + 2 != n {
            return Err(Error::arg(format!(
                "received word has length {}, expected {}",
                y.len(),
                n - 2
            )));
        }
        let c = &self.targets.c;
        let (n0, n1) = count_symbols(y);
        let d0 = (c[0] as usize + 7 - n0 % 7) % 7;
        let d1 = (c[1] as usize + 7 - n1 % 7) % 7;
        let dz = self.delta(y, MarkerId::Zeros4);
        let do_ = self.delta(y, MarkerId::Ones4);
        let dm6 = self.delta(y, MarkerId::M110011);
        let dm5 = self.delta(y, MarkerId::M11011);
        let two = self.params().construction == Construction::Two;

        use Branch::*;
        let via = |w: MarkerId, branch: Branch| -> Result<DecodeOutcome> {
            self.repair_via_marker(y, w, 2).map(|x| DecodeOutcome { recovered: x, branch })
        };
        let tau = |branch: Branch, use_balance: bool| -> Result<DecodeOutcome> {
            self.tau_then_finish(y, use_balance)
                .map(|x| DecodeOutcome { recovered: x, branch })
        };

        let outcome = match (d0, d1) {
            (0, 2) => {
                if dz == 0 {
                    via(MarkerId::Zeros4, Ones2Via0000)
                } else if do_ == 0 {
                    via(MarkerId::Ones4, Ones2Via1111)
                } else {
                    via(MarkerId::M110011, Ones2Via110011)
                }
            }
            (2, 0) => {
                if do_ == 0 {
                    via(MarkerId::Ones4, Zeros2Via1111)
                } else if dz == 0 {
                    via(MarkerId::Zeros4, Zeros2Via0000)
                } else if two {
                    if dm6 != 0 {
                        tau(Zeros2Tau, true)
                    } else {
                        via(MarkerId::M110011, Zeros2Via110011)
                    }
                } else if dm5 == 0 {
                    via(MarkerId::M11011, Zeros2Via11011)
                } else {
                    via(MarkerId::M110011, Zeros2Via110011)
                }
            }
            (1, 1) => {
                use Shift::*;
                match (classify(dz)?, classify(do_)?) {
                    (Destroyed, Destroyed) => via(MarkerId::M110011, MixedVia110011),
                    (Destroyed, Unchanged) => via(MarkerId::Ones4, MixedVia1111),
                    (Unchanged, Destroyed) => via(MarkerId::Zeros4, MixedVia0000),
                    (Created, Unchanged) => via(MarkerId::Ones4, MixedCreatedVia1111),
                    (Unchanged, Created) => via(MarkerId::Zeros4, MixedCreatedVia0000),
                    (Created, Created) => {
                        if two {
                            if dm6 != 0 {
                                // the missing one shifts the run parity, so b cannot orient the split
                                tau(MixedCreatedTau, false)
                            } else {
                                via(MarkerId::M110011, MixedCreatedVia110011)
                            }
                        } else if dm5 == 0 {
                            via(MarkerId::M11011, MixedCreatedVia11011)
                        } else {
                            via(MarkerId::M110011, MixedCreatedVia110011)
                        }
                    }
                    (Unchanged, Unchanged) => {
                        if dm6 == 0 {
                            self.majority(y).map(|x| DecodeOutcome {
                                recovered: x,
                                branch: MixedMajority,
                            })
                        } else {
                            via(MarkerId::Zeros4, MixedUnchangedVia0000)
                        }
                    }
                    (a, b) => Err(Error::Classification(format!(
                        "0000 {a:?} with 1111 {b:?} cannot follow from one 0 and one 1"
                    ))),
                }
            }
            _ => Err(Error::Classification(format!(
                "counters report {d0} zeros and {d1} ones deleted"
            ))),
        };
        outcome.map_err(|e| match e {
            Error::DecodeFailure(m) => Error::DecodeFailure(format!("{y}: {m}")),
            other => other,
        })
    }

    /// Ground truth: the unique codeword among all two-symbol supersequences of `y`.
    pub fn oracle_decode(&self, y: &BitString) -> Result<BitString> {
        if y.len() + 2 != self.n() {
            return Err(Error::arg("received word has the wrong length"));
        }
        let mut found: Option<BitString> = None;
        for x in insertion_ball(y, 2)? {
            if self.is_member(&x) {
                if let Some(first) = found {
                    return Err(Error::NotCorrecting { first, second: x });
                }
                found = Some(x);
            }
        }
        found.ok_or_else(|| Error::decode(format!("no codeword lies above {y}")))
    }
}
