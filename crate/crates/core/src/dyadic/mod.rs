//! Exact rationals with 2-adic valuation, and truncated 2-adic balls.

mod padic;
mod rational;
mod val;

pub use padic::{Padic2, DEFAULT_PRECISION};
pub use rational::{q, Rational2};
pub use val::ValExponent;

pub(crate) use rational::v2_int;

/// `v2(x)`; `+inf` for zero.
pub fn val2(x: &Rational2) -> ValExponent {
    x.val()
}

/// `x ≡ y (mod 2^r)`.
pub fn congruent(x: &Rational2, y: &Rational2, r: i64) -> bool {
    x.congruent(y, r)
}

/// Truncate an exact rational to a 2-adic ball of relative precision `n` bits.
pub fn trunc(x: &Rational2, n: u32) -> Padic2 {
    Padic2::from_rational(x, n)
}
