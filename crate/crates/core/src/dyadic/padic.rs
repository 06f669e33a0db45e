use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::rational::{pow2_int, v2_int};
use super::{Rational2, ValExponent};
use crate::error::{Error, Result};

/// Default relative precision, in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// A truncated 2-adic number: the ball `2^val * (unit + 2^prec Z_2)` with
/// `unit` odd, or a value only known to lie in `2^abs Z_2`.
///
/// Every operation returns a ball that contains the exact result of the same
/// operation applied to any referents of the inputs.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Padic2 {
    Unit {
        val: i64,
        #[serde(with = "bigint_str")]
        unit: BigInt,
        prec: u32,
    },
    /// Indistinguishable from zero: known to be `0 mod 2^abs`. `abs = inf` is exact zero.
    Zero { abs: ValExponent },
}

mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

fn reduce(x: &BigInt, bits: u32) -> BigInt {
    x.mod_floor(&pow2_int(bits as u64))
}

impl Padic2 {
    pub fn exact_zero() -> Self {
        Padic2::Zero {
            abs: ValExponent::Infinity,
        }
    }

    /// The ball containing `x` at relative precision `prec` bits.
    pub fn from_rational(x: &Rational2, prec: u32) -> Self {
        assert!(prec > 0, "precision must be positive");
        let ValExponent::Finite(val) = x.val() else {
            return Padic2::exact_zero();
        };
        // x / 2^val = a/b with a, b odd
        let a: BigInt = if val > 0 {
            x.numer() >> (val as usize)
        } else {
            x.numer().clone()
        };
        let b: BigInt = if val < 0 {
            x.denom() >> ((-val) as usize)
        } else {
            x.denom().clone()
        };
        let modulus = pow2_int(prec as u64);
        let inv = b.modinv(&modulus).expect("odd denominator");
        let unit = (a * inv).mod_floor(&modulus);
        Padic2::Unit { val, unit, prec }
    }

    /// Build from an integer residue known modulo `2^abs_prec`.
    pub fn from_residue(n: &BigInt, abs_prec: i64) -> Self {
        let scaled = Rational2::from_int(n.clone());
        Self::from_rational_abs(&scaled, abs_prec)
    }

    /// The ball containing `x` known modulo `2^abs_prec` (absolute precision).
    pub fn from_rational_abs(x: &Rational2, abs_prec: i64) -> Self {
        match x.val() {
            ValExponent::Finite(v) if v < abs_prec => Self::from_rational(x, (abs_prec - v) as u32),
            _ => Padic2::Zero {
                abs: ValExponent::Finite(abs_prec),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Padic2::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(
            self,
            Padic2::Zero {
                abs: ValExponent::Infinity
            }
        )
    }

    /// Certified valuation, when the value is known to be nonzero.
    pub fn val(&self) -> Option<i64> {
        match self {
            Padic2::Unit { val, .. } => Some(*val),
            Padic2::Zero { .. } => None,
        }
    }

    /// Lower bound on the valuation (exact for nonzero balls).
    pub fn val_lower_bound(&self) -> ValExponent {
        match self {
            Padic2::Unit { val, .. } => ValExponent::Finite(*val),
            Padic2::Zero { abs } => *abs,
        }
    }

    /// Relative precision in bits; 0 for zero-to-precision values.
    pub fn prec(&self) -> u32 {
        match self {
            Padic2::Unit { prec, .. } => *prec,
            Padic2::Zero { .. } => 0,
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match self {
            Padic2::Unit { unit, .. } => Some(unit),
            Padic2::Zero { .. } => None,
        }
    }

    /// The value is known modulo `2^abs_prec()`.
    pub fn abs_prec(&self) -> ValExponent {
        match self {
            Padic2::Unit { val, prec, .. } => ValExponent::Finite(val + *prec as i64),
            Padic2::Zero { abs } => *abs,
        }
    }

    /// A rational in the ball: `2^val * unit`, or 0.
    pub fn representative(&self) -> Rational2 {
        match self {
            Padic2::Unit { val, unit, .. } => Rational2::from_int(unit.clone()).shl2(*val),
            Padic2::Zero { .. } => Rational2::zero(),
        }
    }

    pub fn contains(&self, x: &Rational2) -> bool {
        match self.abs_prec() {
            ValExponent::Infinity => x.is_zero(),
            ValExponent::Finite(a) => (x - &self.representative()).val().at_least(a),
        }
    }

    /// Drop to relative precision `prec` (no-op when already coarser).
    pub fn reduce(&self, prec: u32) -> Padic2 {
        match self {
            Padic2::Unit { val, unit, prec: p } if prec < *p => Padic2::Unit {
                val: *val,
                unit: reduce(unit, prec),
                prec,
            },
            other => other.clone(),
        }
    }

    pub fn neg(&self) -> Padic2 {
        match self {
            Padic2::Unit { val, unit, prec } => Padic2::Unit {
                val: *val,
                unit: reduce(&-unit, *prec),
                prec: *prec,
            },
            z => z.clone(),
        }
    }

    pub fn add(&self, other: &Padic2) -> Padic2 {
        let (va, ua, vb, ub) = match (self, other) {
            (Padic2::Zero { abs: a }, Padic2::Zero { abs: b }) => {
                return Padic2::Zero { abs: (*a).min(*b) };
            }
            (Padic2::Zero { abs }, u @ Padic2::Unit { .. })
            | (u @ Padic2::Unit { .. }, Padic2::Zero { abs }) => {
                return match *abs {
                    ValExponent::Infinity => u.clone(),
                    ValExponent::Finite(a) => u.with_abs_cap(a),
                };
            }
            (
                Padic2::Unit {
                    val: va, unit: ua, ..
                },
                Padic2::Unit {
                    val: vb, unit: ub, ..
                },
            ) => (*va, ua, *vb, ub),
        };
        let abs = self
            .abs_prec()
            .min(other.abs_prec())
            .finite()
            .expect("unit balls have finite precision");
        let vmin = va.min(vb);
        let sum: BigInt = (ua << ((va - vmin) as usize)) + (ub << ((vb - vmin) as usize));
        let bits = (abs - vmin) as u32;
        let sum = reduce(&sum, bits);
        Self::normalize(sum, vmin, abs)
    }

    pub fn sub(&self, other: &Padic2) -> Padic2 {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Padic2) -> Padic2 {
        match (self, other) {
            (Padic2::Zero { abs: a }, Padic2::Zero { abs: b }) => Padic2::Zero { abs: *a + *b },
            (Padic2::Zero { abs }, Padic2::Unit { val, .. })
            | (Padic2::Unit { val, .. }, Padic2::Zero { abs }) => Padic2::Zero { abs: *abs + *val },
            (
                Padic2::Unit {
                    val: va,
                    unit: ua,
                    prec: pa,
                },
                Padic2::Unit {
                    val: vb,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let prec = (*pa).min(*pb);
                Padic2::Unit {
                    val: va + vb,
                    unit: reduce(&(ua * ub), prec),
                    prec,
                }
            }
        }
    }

    pub fn div(&self, other: &Padic2) -> Result<Padic2> {
        let Padic2::Unit {
            val: vb,
            unit: ub,
            prec: pb,
        } = other
        else {
            return Err(Error::DivisionByZero);
        };
        match self {
            Padic2::Zero { abs } => Ok(Padic2::Zero { abs: *abs + (-vb) }),
            Padic2::Unit { val, unit, prec } => {
                let prec = (*prec).min(*pb);
                let modulus = pow2_int(prec as u64);
                let inv = ub.modinv(&modulus).expect("units are odd");
                Ok(Padic2::Unit {
                    val: val - vb,
                    unit: (unit * inv).mod_floor(&modulus),
                    prec,
                })
            }
        }
    }

    /// Multiply by an exact rational (no precision lost beyond the operand's).
    pub fn mul_exact(&self, c: &Rational2) -> Padic2 {
        if c.is_zero() {
            return Padic2::exact_zero();
        }
        let p = self.prec().max(1);
        self.mul(&Padic2::from_rational(c, p.max(DEFAULT_PRECISION)))
    }

    /// Add an exact rational.
    pub fn add_exact(&self, c: &Rational2) -> Padic2 {
        if c.is_zero() {
            return self.clone();
        }
        match self.abs_prec() {
            ValExponent::Infinity => Padic2::from_rational(c, DEFAULT_PRECISION),
            ValExponent::Finite(a) => self.add(&Padic2::from_rational_abs(c, a)),
        }
    }

    fn with_abs_cap(&self, abs: i64) -> Padic2 {
        match self {
            Padic2::Unit { val, .. } if *val >= abs => Padic2::Zero {
                abs: ValExponent::Finite(abs),
            },
            Padic2::Unit { val, prec, .. } if val + (*prec as i64) > abs => {
                self.reduce((abs - val) as u32)
            }
            other => other.clone(),
        }
    }

    fn normalize(sum: BigInt, vmin: i64, abs: i64) -> Padic2 {
        match v2_int(&sum) {
            ValExponent::Infinity => Padic2::Zero {
                abs: ValExponent::Finite(abs),
            },
            ValExponent::Finite(tz) => {
                let val = vmin + tz;
                let prec = (abs - val) as u32;
                Padic2::Unit {
                    val,
                    unit: reduce(&(sum >> (tz as usize)), prec),
                    prec,
                }
            }
        }
    }

    /// Is the whole ball inside `D̄(center, 2^-rexp)`?
    pub fn inside_disk(&self, center: &Rational2, rexp: i64) -> bool {
        self.abs_prec().at_least(rexp) && self.representative().congruent(center, rexp)
    }

    /// Exact rational with a given number of bits, as `BigRational` (for display).
    pub fn to_ratio(&self) -> BigRational {
        self.representative().ratio().clone()
    }

    pub fn one(prec: u32) -> Padic2 {
        Padic2::Unit {
            val: 0,
            unit: BigInt::one(),
            prec,
        }
    }
}

impl fmt::Display for Padic2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Padic2::Unit { val, prec, .. } => {
                write!(f, "{} + O(2^{})", self.representative(), val + *prec as i64)
            }
            Padic2::Zero {
                abs: ValExponent::Infinity,
            } => f.write_str("0"),
            Padic2::Zero { abs } => write!(f, "O(2^{abs})"),
        }
    }
}

impl fmt::Debug for Padic2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Default for Padic2 {
    fn default() -> Self {
        Padic2::exact_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::q;

    #[test]
    fn trunc_one_third() {
        let x = Padic2::from_rational(&q(1, 3), 4);
        assert_eq!(x.val(), Some(0));
        assert_eq!(x.unit(), Some(&BigInt::from(11)));
        assert!(x.contains(&q(1, 3)));
    }

    #[test]
    fn cancellation_loses_precision() {
        let a = Padic2::from_rational(&Rational2::from(1 + 1024), 12);
        let b = Padic2::from_rational(&Rational2::one(), 12);
        let d = a.sub(&b);
        assert_eq!(d.val(), Some(10));
        assert_eq!(d.prec(), 2);
        let z = b.sub(&b);
        assert_eq!(
            z,
            Padic2::Zero {
                abs: ValExponent::Finite(12)
            }
        );
    }

    #[test]
    fn product_keeps_relative_precision() {
        let p =
            Padic2::from_rational(&Rational2::from(6), 5).mul(&Padic2::from_rational(&q(1, 2), 5));
        assert_eq!(p.val(), Some(0));
        assert_eq!(p.unit(), Some(&BigInt::from(3)));
        assert_eq!(p.prec(), 5);
    }

    #[test]
    fn zero_handling() {
        let z = Padic2::exact_zero();
        let x = Padic2::from_rational(&q(5, 4), 8);
        assert_eq!(z.add(&x), x);
        assert!(z.mul(&x).is_exact_zero());
        assert!(x.div(&z).is_err());
        let fuzzy = Padic2::Zero {
            abs: ValExponent::Finite(3),
        };
        assert_eq!(
            fuzzy.mul(&x),
            Padic2::Zero {
                abs: ValExponent::Finite(1)
            }
        );
        // x known to 2^6 absolute, fuzzy zero to 2^3: sum known to 2^3
        assert_eq!(x.add(&fuzzy).abs_prec(), ValExponent::Finite(3));
    }

    #[test]
    fn reduce_and_contain() {
        let x = Padic2::from_rational(&q(23, 1), 8);
        let y = x.reduce(4);
        assert_eq!(y.unit(), Some(&BigInt::from(7)));
        assert!(y.contains(&Rational2::from(7)));
        assert!(y.inside_disk(&Rational2::from(7), 4));
        assert!(!y.inside_disk(&Rational2::from(7), 5));
    }
}
