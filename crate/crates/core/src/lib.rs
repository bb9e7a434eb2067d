//! Upper bounds on the rate of `(b, k)`-hash codes.
//!
//! The crate evaluates the symmetric polynomial Ψ_j, bounds its maxima over
//! structured parts of the probability simplex, combines those maxima into a
//! bound on a quadratic form, and turns that into a rate bound. Classical
//! bounds and independent checks (sampling, brute force, code search) live
//! alongside.

pub mod classical;
pub mod combiner;
pub mod error;
pub mod partition;
pub mod presets;
pub mod psi;
pub mod rounding;
pub mod verify;

pub use error::{Error, Result};
