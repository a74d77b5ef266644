//! Combinatorial invariants of generic real meromorphic functions.
//!
//! A function of degree `d` is encoded either by the monodromy of its
//! orbifold covering of the disk ([`monodromy::MonodromyRep`]) or by its
//! park ([`park::Park`]). The crate validates both encodings, extracts parks
//! from monodromies, decides isomorphism of parks, enumerates small cases
//! and evaluates the associated Hurwitz numbers exactly.

pub mod equivalence;
pub mod error;
pub mod extraction;
pub mod hurwitz;
mod iso;
pub mod monodromy;
pub mod park;
pub mod permgroup;

pub use error::{Error, Result};
pub use iso::ParkMap;
