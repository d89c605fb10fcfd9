//! Finite-truncation coarse geometry.
//!
//! A large scale structure is represented by a finite point set together with
//! a finite refinement chain of covers ([`scaled_space::ScaledSpace`]). Pieces
//! of that kind glue into an asymptotic filtered colimit
//! ([`colimit::FilteredSystem`]), and [`invariants`] carries verifier/lifter
//! pairs for the coarse invariants that survive the gluing.
//!
//! Every answer is relative to the truncation: a family that is not bounded
//! by any level of a finite chain is "undecided", never "unbounded".
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod colimit;
pub mod corpus;
pub mod families;
pub mod invariants;
pub mod maps;
pub mod rational;
pub mod report;
pub mod scaled_space;
pub mod structure;

pub use colimit::{ColimitBoundedness, FilteredSystem, PieceSpec};
pub use families::{Family, Inclusion, PointSet, Subset};
pub use rational::{Distance, Rational};
pub use report::{Clause, Verification};
pub use scaled_space::{Level, Scale, ScaledSpace};
pub use structure::{Bound, LargeScale};
