//! Factorization invariants of Puiseux monoids.
//!
//! Finitely generated monoids are handled exactly: atoms, factorizations,
//! sets of lengths, elasticities, unions of sets of lengths and (bounded)
//! delta sets. Infinitely generated atomic monoids are approached through
//! increasing chains of finitely generated prefix monoids, see
//! [`approximation`] and the built-in streams in [`families`].

pub mod approximation;
pub mod cli;
pub mod error;
pub mod families;
pub mod invariants;
pub mod monoid;
pub mod oracle;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use monoid::{normalize, Factorization, LengthSet, Limits, Normalized, ReducedMonoid};
pub use rational::{ExtRat, Rat};
