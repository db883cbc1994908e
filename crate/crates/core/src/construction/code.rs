use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::params::{CodeParams, Construction};
use crate::bitseq::{
    balance_sum, count_symbols, run_profile, segment_by_marker, BitString, Marker, Segmentation,
};
use crate::error::{Error, Result};
use crate::gf::{ComponentCode, Elem, Field};
use crate::hashing::{hash_segmentation, HashFamily, RunHash, SegmentHash};

/// The four markers, in counter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MarkerId {
    Zeros4,
    Ones4,
    M110011,
    M11011,
}

impl MarkerId {
    pub const ALL: [MarkerId; 4] = [MarkerId::Zeros4, MarkerId::Ones4, MarkerId::M110011, MarkerId::M11011];

    pub fn as_str(self) -> &'static str {
        match self {
            MarkerId::Zeros4 => "0000",
            MarkerId::Ones4 => "1111",
            MarkerId::M110011 => "110011",
            MarkerId::M11011 => "11011",
        }
    }

    pub fn marker(self) -> Marker {
        Marker::lit(self.as_str())
    }

    /// Index of this marker's occurrence counter in [`ConstraintTargets::c`].
    pub fn counter(self) -> usize {
        2 + self as usize
    }
}

impl fmt::Display for MarkerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Counter names in the order used by [`ConstraintTargets::c`].
pub const COUNTER_NAMES: [&str; 6] = ["N0", "N1", "N0000", "N1111", "N110011", "N11011"];

/// The residues and syndromes selecting one codebook.
///
/// Ordering is lexicographic in field order and is used to break ties when
/// choosing among equally large codebooks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstraintTargets {
    /// `N0, N1, N0000, N1111, N110011, N11011` mod 7.
    pub c: [u8; 6],
    pub a_0000: Vec<Elem>,
    pub a_1111: Vec<Elem>,
    pub a_110011: Vec<Elem>,
    /// Over `F_q1` for construction 1, over `F_q2` for construction 2.
    pub a_11011: Vec<Elem>,
    /// Balance residue mod `s + 1` (construction 2 only).
    pub b: Option<usize>,
}

impl ConstraintTargets {
    pub fn syndrome(&self, w: MarkerId) -> &[Elem] {
        match w {
            MarkerId::Zeros4 => &self.a_0000,
            MarkerId::Ones4 => &self.a_1111,
            MarkerId::M110011 => &self.a_110011,
            MarkerId::M11011 => &self.a_11011,
        }
    }
}

/// The first membership clause a string fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: String,
    pub detail: String,
}

impl Violation {
    fn new(clause: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation {
            clause: clause.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.clause, self.detail)
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::ConstraintViolation(v.to_string())
    }
}

fn gap_clauses(
    segs: &[Segmentation],
    x: &BitString,
    s: usize,
    construction: Construction,
) -> std::result::Result<(), Violation> {
    for (w, seg) in MarkerId::ALL.iter().zip(segs) {
        if seg.max_gap > s {
            return Err(Violation::new(
                format!("gap:{w}"),
                format!("longest segment has length {} > {s}", seg.max_gap),
            ));
        }
    }
    if construction == Construction::Two {
        let tau = run_profile(x).tau;
        if tau > s {
            return Err(Violation::new("tau", format!("longest run has length {tau} > {s}")));
        }
    }
    Ok(())
}

/// Membership in the constrained set `C_T` (construction 1) or `C_T2`
/// (construction 2): every marker recurs within `s` symbols, and for
/// construction 2 no run is longer than `s`.
pub fn check_constraints(x: &BitString, s: usize, construction: Construction) -> std::result::Result<(), Violation> {
    let segs: Vec<_> = MarkerId::ALL.iter().map(|w| segment_by_marker(x, &w.marker())).collect();
    gap_clauses(&segs, x, s, construction)
}

/// Everything needed to evaluate constraint profiles for fixed parameters.
#[derive(Debug, Clone)]
pub struct CodeSpace {
    params: CodeParams,
    family: Arc<HashFamily>,
    run_hash: Option<RunHash>,
    d5: ComponentCode,
    d3: Option<ComponentCode>,
}

impl CodeSpace {
    pub fn new(params: CodeParams, family: Arc<HashFamily>) -> Result<Self> {
        let expect = CodeParams::derive(params.n, params.s, params.construction, &family)?;
        if expect != params {
            return Err(Error::arg(
                "parameters are inconsistent with the hash family they name",
            ));
        }
        let f1 = Arc::new(Field::new(params.q1, params.m1())?);
        let d5 = ComponentCode::distance5(f1, params.n)?;
        let (run_hash, d3) = match params.construction {
            Construction::One => (None, None),
            Construction::Two => {
                let rh = RunHash::with_modulus(params.s, params.big_q.unwrap())?;
                let f2 = Arc::new(Field::new(params.q2.unwrap(), params.n2.unwrap())?);
                (Some(rh), Some(ComponentCode::distance3(f2, params.n)?))
            }
        };
        Ok(CodeSpace {
            params,
            family,
            run_hash,
            d5,
            d3,
        })
    }

    /// Builds (or loads) the hash family and derives parameters in one step.
    pub fn for_length(n: usize, s: usize, construction: Construction, cache_dir: Option<&std::path::Path>) -> Result<Self> {
        let family = Arc::new(HashFamily::load_or_build(s, cache_dir)?);
        let params = CodeParams::derive(n, s, construction, &family)?;
        Self::new(params, family)
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn family(&self) -> &Arc<HashFamily> {
        &self.family
    }

    pub fn run_hash(&self) -> Option<&RunHash> {
        self.run_hash.as_ref()
    }

    /// Distance-5 code with zero target.
    pub fn distance5(&self) -> &ComponentCode {
        &self.d5
    }

    /// Distance-3 code with zero target (construction 2).
    pub fn distance3(&self) -> Option<&ComponentCode> {
        self.d3.as_ref()
    }

    pub(crate) fn segment_hash(&self, w: MarkerId) -> &dyn SegmentHash {
        match (w, &self.run_hash) {
            (MarkerId::M11011, Some(rh)) => rh,
            _ => self.family.as_ref(),
        }
    }

    pub(crate) fn base_code(&self, w: MarkerId) -> &ComponentCode {
        match (w, &self.d3) {
            (MarkerId::M11011, Some(d3)) => d3,
            _ => &self.d5,
        }
    }

    fn check_gaps(&self, segs: &[Segmentation], x: &BitString) -> std::result::Result<(), Violation> {
        gap_clauses(segs, x, self.params.s, self.params.construction)
    }

    /// True when `x` satisfies the gap (and, for construction 2, run) bounds.
    pub fn in_constrained_set(&self, x: &BitString) -> bool {
        x.len() == self.params.n && check_constraints(x, self.params.s, self.params.construction).is_ok()
    }

    /// The targets `x` satisfies, or the bound it violates.
    pub fn profile(&self, x: &BitString) -> std::result::Result<ConstraintTargets, Violation> {
        if x.len() != self.params.n {
            return Err(Violation::new(
                "length",
                format!("expected {} symbols, got {}", self.params.n, x.len()),
            ));
        }
        let segs: Vec<_> = MarkerId::ALL.iter().map(|w| segment_by_marker(x, &w.marker())).collect();
        self.check_gaps(&segs, x)?;

        let (n0, n1) = count_symbols(x);
        let mut c = [0u8; 6];
        c[0] = (n0 % 7) as u8;
        c[1] = (n1 % 7) as u8;
        for (w, seg) in MarkerId::ALL.iter().zip(&segs) {
            c[w.counter()] = (seg.starts.len() % 7) as u8;
        }
        let mut syn = MarkerId::ALL.iter().zip(&segs).map(|(&w, seg)| {
            let hs = hash_segmentation(seg, self.segment_hash(w))
                .map_err(|e| Violation::new(format!("gap:{w}"), e.to_string()))?;
            self.base_code(w)
                .syndromes(&hs.symbols)
                .map_err(|e| Violation::new(format!("syndrome:{w}"), e.to_string()))
        });
        let (a_0000, a_1111, a_110011, a_11011) = (
            syn.next().unwrap()?,
            syn.next().unwrap()?,
            syn.next().unwrap()?,
            syn.next().unwrap()?,
        );
        let b = (self.params.construction == Construction::Two).then(|| balance_sum(x, self.params.s));
        Ok(ConstraintTargets {
            c,
            a_0000,
            a_1111,
            a_110011,
            a_11011,
            b,
        })
    }

    /// Checks that `t` has the right shape for these parameters.
    pub fn validate_targets(&self, t: &ConstraintTargets) -> Result<()> {
        if t.c.iter().any(|&v| v >= 7) {
            return Err(Error::arg("counter targets must lie in 0..7"));
        }
        for w in MarkerId::ALL {
            let code = self.base_code(w);
            let a = t.syndrome(w);
            if a.len() != code.target().len() || a.iter().any(|&v| !code.field().contains(v)) {
                return Err(Error::arg(format!("syndrome target for {w} has the wrong shape")));
            }
        }
        match (self.params.construction, t.b) {
            (Construction::One, None) => Ok(()),
            (Construction::Two, Some(b)) if b <= self.params.s => Ok(()),
            _ => Err(Error::arg("balance target does not match the construction")),
        }
    }

    pub fn with_targets(&self, targets: ConstraintTargets) -> Result<TwoDeletionCode> {
        self.validate_targets(&targets)?;
        let codes = MarkerId::ALL
            .iter()
            .map(|&w| self.base_code(w).with_target(targets.syndrome(w).to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TwoDeletionCode {
            space: self.clone(),
            targets,
            codes,
        })
    }
}

/// A code fixed by parameters and targets: membership, decoding, oracle.
#[derive(Debug, Clone)]
pub struct TwoDeletionCode {
    pub(crate) space: CodeSpace,
    pub(crate) targets: ConstraintTargets,
    // per-marker component codes carrying the syndrome targets
    pub(crate) codes: Vec<ComponentCode>,
}

impl TwoDeletionCode {
    pub fn space(&self) -> &CodeSpace {
        &self.space
    }

    pub fn params(&self) -> &CodeParams {
        &self.space.params
    }

    pub fn targets(&self) -> &ConstraintTargets {
        &self.targets
    }

    pub fn n(&self) -> usize {
        self.space.params.n
    }

    pub(crate) fn code_for(&self, w: MarkerId) -> &ComponentCode {
        &self.codes[w as usize]
    }

    /// `Ok` when `x` is a codeword, else the first failing clause.
    pub fn check_member(&self, x: &BitString) -> std::result::Result<(), Violation> {
        let p = self.space.profile(x)?;
        let t = &self.targets;
        for i in 0..6 {
            if p.c[i] != t.c[i] {
                return Err(Violation::new(
                    format!("count:{}", COUNTER_NAMES[i]),
                    format!("residue {} != target {}", p.c[i], t.c[i]),
                ));
            }
        }
        for w in MarkerId::ALL {
            if p.syndrome(w) != t.syndrome(w) {
                return Err(Violation::new(format!("syndrome:{w}"), "hash syndromes differ"));
            }
        }
        if p.b != t.b {
            return Err(Violation::new(
                "balance",
                format!("{:?} != target {:?}", p.b, t.b),
            ));
        }
        Ok(())
    }

    pub fn is_member(&self, x: &BitString) -> bool {
        self.check_member(x).is_ok()
    }
}
