//! Exact arithmetic for m-adic Heisenberg groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`tower`]: valuations along chains of subgroups of `Z`, radius profiles
//!   and the ultrametrics they induce.
//! * [`madic`]: the m-adic completion of `Z` at a fixed absolute precision.
//! * [`hmodule`]: free modules over the completion and integer bilinear forms.
//! * [`heisenberg`]: the twisted group law, dilations, the `H_j`/`G_j` chain
//!   families and finite-quotient normality certificates.
//! * [`haar`]: the invariant integral of cylinder functions as an exact
//!   average over coset representatives.
//! * [`fractions`]: rings, modules and Heisenberg groups of fractions over
//!   `Z` and `Z/kZ`.
//!
//! Exhaustive enumerations run on rayon when the `parallel` feature is on
//! (the default); see [`exec::Exec`].

pub mod exec;
pub mod fractions;
pub mod haar;
pub mod heisenberg;
pub mod hmodule;
pub mod madic;
pub mod ratio;
pub mod selftest;
pub mod tower;

pub use exec::Exec;
pub use fractions::{BaseRing, FracHPoint, FracVec, Fraction, FractionRing, IntHPoint, MultSet};
pub use haar::{CosetReps, CylinderFunction, Side};
pub use heisenberg::{ChainFamily, HPoint, HeisenbergContext, Membership};
pub use hmodule::{BilinearForm, ModuleVec};
pub use madic::{MadicInt, ValuationResult};
pub use tower::{ChainSpec, RadiusProfile, UltraDistance, Valuation};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
