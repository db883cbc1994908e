//! The two code constructions: parameters, membership, codebooks and decoders.

mod code;
mod codebook;
mod decode;
mod params;

pub use code::{
    check_constraints, CodeSpace, ConstraintTargets, MarkerId, TwoDeletionCode, Violation, COUNTER_NAMES,
};
pub use codebook::{
    codebook_sizes, constrained_set_size, enumerate_codebook, read_codebook, select_targets,
    verify_codewords, write_codebook, CodebookHeader, Counterexample, Selection, VerifyReport,
    MAX_ENUM_N,
};
pub use decode::{Branch, DecodeOutcome};
pub use params::{CodeParams, Construction, MIN_S};
