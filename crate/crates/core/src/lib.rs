//! Exact 2-adic arithmetic dynamics for the cubic family
//! `f_t(z) = -(3/2) t (-2z^3 + 3z^2) + 1`.
//!
//! Layers, bottom-up: [`dyadic`] numbers, [`poly`] polynomials, [`geometry`]
//! of closed 2-adic disks, [`dynamics`] of orbits, and the [`atlas`] of
//! theorem-level verifiers and classification trees.

pub mod atlas;
pub mod dyadic;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod poly;

pub use dyadic::{q, Padic2, Rational2, ValExponent};
pub use error::{Error, Result};
