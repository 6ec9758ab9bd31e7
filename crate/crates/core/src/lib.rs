//! Toeplitz analysis of two-sided symbolic sequences.
//!
//! Points of the full shift over a finite alphabet are represented by
//! [`SequenceRule`]s: total, deterministic rules evaluating a sequence at any
//! integer index. On top of that the crate computes periodic skeletons and
//! essential periods ([`period`]), builds a Toeplitz sequence in the orbit
//! closure of a point with enough periodic structure ([`builder`]), and maps
//! the orbit closure onto the associated odometer ([`odometer`], [`factor`]).
//!
//! Everything that concerns an infinite object is checked on a finite window.
//! Results carry the radius they were witnessed at; for rules whose skeletons
//! are known in closed form (constant, periodic, Toeplitz fill) the exact
//! skeleton is also available through [`period::exact_skeleton`].

pub mod builder;
pub mod factor;
pub mod format;
pub mod odometer;
pub mod period;
pub mod sequence;
pub mod skeleton;
mod substitution;

pub use builder::{EtaConstruction, GrowthChain};
pub use odometer::{Odometer, OdometerElement, RegularSequence};
pub use period::{PeriodicStructure, StructureEntry};
pub use sequence::{Alphabet, SequenceRule, Stage, SymbolId, Window};
pub use skeleton::{MpValue, SkeletonMap};
