//! Verifier/lifter pairs for coarse invariants preserved by filtered colimits.
//!
//! Every verifier takes the bounded input family it quantifies over
//! explicitly (a chain level of a space, or any colimit-bounded family) and
//! returns a [`Verification`](crate::report::Verification) with one clause per
//! condition. Lifters turn a witness for one piece into a witness for the
//! colimit, following the construction that proves the invariant is
//! preserved, and refuse inputs whose piece witness does not verify.

pub mod amenability;
pub mod apc;
pub mod asdim;
pub mod exactness;
pub mod metrizability;
pub mod pinch;
pub mod property_a;

use thiserror::Error;

use crate::colimit::{strip, FilteredSystem};
use crate::families::{Family, FamilyError};
use crate::report::Verification;
use crate::structure::Bound;

pub use amenability::{
    amenability_lift, amenability_verify, horizon_decomposition, AmenabilityWitness, Decomposition,
};
pub use apc::{apc_probe, apc_verify, ApcEntry, ApcOutcome, ApcProbeReport, ApcTarget, ApcWitness};
pub use asdim::{
    asdim_lift, asdim_restrict, asdim_search, asdim_verify, AsdimSearch, AsdimWitness, SearchError,
    SearchMode,
};
pub use exactness::{exactness_lift, exactness_verify, PartitionOfUnity};
pub use metrizability::{
    metrizability_generator_check, metrizability_merge, GeneratorReport, MergeError, MergeReport,
};
pub use pinch::{
    pinch_lift, pinch_pair_cases, pinch_verify, PairCase, PinchWitness, DEFAULT_TOLERANCE,
};
pub use property_a::{property_a_lift, property_a_verify, Marked, PropertyAFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("piece index {0} out of range")]
    NoSuchPiece(usize),
    #[error("the input family has a non-singleton member outside piece {0}")]
    InputNotInPiece(usize),
    #[error("the piece witness must carry a level certificate of the piece")]
    NotAPieceBound,
    #[error("the piece witness does not verify:\n{0}")]
    PieceRejected(Verification),
    #[error("the colimit witness does not verify:\n{0}")]
    ColimitRejected(Verification),
    #[error("restricted family is not bounded in piece {0} within this truncation")]
    RestrictionUnbounded(usize),
    #[error("witness shape: {0}")]
    Shape(&'static str),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `u*` of a colimit input family, re-indexed into piece `s`.
pub fn piece_input(sys: &FilteredSystem, s: usize, u: &Family) -> Result<Family, LiftError> {
    if s >= sys.pieces().len() {
        return Err(LiftError::NoSuchPiece(s));
    }
    if u.universe() != sys.ambient().len() {
        return Err(FamilyError::UniverseMismatch {
            left: u.universe(),
            right: sys.ambient().len(),
        }
        .into());
    }
    let piece = sys.piece(s);
    if !u.thick_members().all(|m| m.is_subset(piece.carrier())) {
        return Err(LiftError::InputNotInPiece(s));
    }
    Ok(piece
        .inclusion()
        .restrict_family(&strip(u, piece.carrier())))
}

/// A piece's level certificate read as a colimit certificate.
pub fn lift_bound(s: usize, bound: &Bound) -> Result<Bound, LiftError> {
    match *bound {
        Bound::Level(level) => Ok(Bound::Piece { piece: s, level }),
        Bound::Piece { .. } => Err(LiftError::NotAPieceBound),
    }
}

pub(crate) fn require(v: Verification, piece: bool) -> Result<(), LiftError> {
    match (v.is_verified(), piece) {
        (true, _) => Ok(()),
        (false, true) => Err(LiftError::PieceRejected(v)),
        (false, false) => Err(LiftError::ColimitRejected(v)),
    }
}
