//! Partial-MDS array codes over binary polynomial rings.

pub mod error;
pub mod matrix;
pub mod poly;
mod residue;
pub mod ring;

pub use error::{AlgebraError, CodecError, MatrixError, ParamsError, ReliabilityError, VerifyError};
pub use matrix::RingMatrix;
pub use poly::BinPoly;
pub use ring::{ModulusKind, Ring, RingElement};
pub mod codec;
pub mod construction;
pub mod format;
pub mod reliability;
pub mod tables;
pub mod verifier;

pub use codec::{ArrayCodeword, CodeInstance, DecodeStrategy, ParityLayout};
pub use construction::{CodeParams, ErasurePattern, Position, Variant};
pub use verifier::{check_fast, oracle_is_correcting, oracle_is_pmds, ErasureProfile, PmdsVerdict};
