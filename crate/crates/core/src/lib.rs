//! Critically finite rational maps on the Riemann sphere: critical orbits,
//! periodic points, basins, external rays and curve lifting.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basins;
pub mod catalog;
pub mod cli;
pub mod lifting;
pub mod numerics;
pub mod orbits;
pub mod polyline;
pub mod ratmap;
pub mod rays;
pub mod report;
pub mod verify;

pub use numerics::{ComplexValue, Polynomial, SpherePoint};
pub use ratmap::{CriticalPoint, MapError, RationalMap};
