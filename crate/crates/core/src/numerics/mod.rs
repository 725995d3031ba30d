//! Complex arithmetic on the Riemann sphere, dense polynomials and a
//! simultaneous-iteration root finder.
//!
//! Everything here is double precision. Tolerances are explicit arguments;
//! the defaults used elsewhere in the crate live in [`ROOT_TOL`] and
//! [`CHORDAL_TOL`].

mod moebius;
mod poly;
mod roots;
mod sphere;

pub use moebius::{moebius_conjugate, MoebiusTransform};
pub use poly::{homogeneous_compose, poly_compose, Polynomial};
pub use roots::{aberth_refine, cluster_roots, cluster_roots_by, poly_roots, poly_roots_with, root_approximations, Root, RootError, RootOptions};
pub use sphere::{chordal, Chart, SpherePoint};

/// The complex scalar used throughout the crate.
pub type ComplexValue = num_complex::Complex64;

/// Default root-finder tolerance.
pub const ROOT_TOL: f64 = 1e-10;

/// Default chordal distance below which two sphere points are equal.
pub const CHORDAL_TOL: f64 = 1e-8;

/// Shorthand constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}
