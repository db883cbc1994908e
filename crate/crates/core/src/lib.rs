pub mod analysis;
pub mod bitseq;
pub mod cli;
pub mod construction;
pub mod error;
pub mod gf;
pub mod hashing;

pub use bitseq::{BitString, Marker};
pub use construction::{CodeParams, CodeSpace, Construction, ConstraintTargets, TwoDeletionCode};
pub use error::{Error, Result};
