use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ValExponent;
use crate::error::{Error, Result};

/// An exact rational number with its 2-adic valuation cached.
///
/// The numerator/denominator pair is kept in lowest terms with a positive
/// denominator (by `BigRational`), and `val` always equals
/// `v2(numerator) - v2(denominator)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational2 {
    value: BigRational,
    val: ValExponent,
}

pub(crate) fn v2_int(n: &BigInt) -> ValExponent {
    match n.trailing_zeros() {
        Some(tz) => ValExponent::Finite(tz as i64),
        None => ValExponent::Infinity,
    }
}

fn v2_ratio(r: &BigRational) -> ValExponent {
    match v2_int(r.numer()) {
        ValExponent::Finite(a) => {
            let b = r.denom().trailing_zeros().unwrap_or(0) as i64;
            ValExponent::Finite(a - b)
        }
        ValExponent::Infinity => ValExponent::Infinity,
    }
}

/// `2^e` as a big integer, `e >= 0`.
pub(crate) fn pow2_int(e: u64) -> BigInt {
    BigInt::one() << e
}

impl Rational2 {
    pub fn from_ratio(value: BigRational) -> Self {
        let val = v2_ratio(&value);
        Rational2 { value, val }
    }

    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let d = denom.into();
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_ratio(BigRational::new(numer.into(), d)))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::from_ratio(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `2^e` for any integer `e`.
    pub fn pow2(e: i64) -> Self {
        let p = pow2_int(e.unsigned_abs());
        if e >= 0 {
            Self::from_int(p)
        } else {
            Self::from_ratio(BigRational::new(BigInt::one(), p))
        }
    }

    pub fn ratio(&self) -> &BigRational {
        &self.value
    }

    pub fn numer(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.value.denom()
    }

    /// The 2-adic valuation; `|x| = 2^(-val)`.
    pub fn val(&self) -> ValExponent {
        self.val
    }

    /// `log2 |x|`, or `None` for zero.
    pub fn abs_log2(&self) -> Option<i64> {
        -self.val
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.value.is_integer()
    }

    /// Bits in numerator plus denominator; the height used to cap exact orbits.
    pub fn height_bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational2 {
            value: self.value.recip(),
            val: ValExponent::Finite(-self.val.finite().unwrap_or(0)),
        })
    }

    pub fn checked_div(&self, rhs: &Rational2) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Rational2::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiply by `2^e` without touching the odd part.
    pub fn shl2(&self, e: i64) -> Self {
        self * &Rational2::pow2(e)
    }

    /// `x ≡ y (mod 2^r)`, i.e. `v2(x - y) >= r`; membership of `x` in `D̄(y, 2^-r)`.
    pub fn congruent(&self, other: &Rational2, r: i64) -> bool {
        (self - other).val().at_least(r)
    }

    /// Canonical representative of `x mod 2^r`.
    ///
    /// With `m = v2(denominator)`, the representative is `2^-m * R` where
    /// `R` is the residue of `x * 2^m` in `[0, 2^(r+m))` (and `0` when
    /// `r + m <= 0`). Congruent inputs give identical outputs.
    pub fn residue(&self, r: i64) -> Rational2 {
        if self.val.at_least(r) {
            return Rational2::zero();
        }
        let m = self.denom().trailing_zeros().unwrap_or(0) as i64;
        let bits = r + m;
        debug_assert!(bits > 0);
        let modulus = pow2_int(bits as u64);
        let odd_den: BigInt = self.denom() >> (m as usize);
        let inv = odd_den
            .modinv(&modulus)
            .expect("odd denominators are invertible mod 2^k");
        let scaled = (self.numer() * inv).mod_floor(&modulus);
        Rational2::from_ratio(BigRational::new(scaled, pow2_int(m as u64)))
    }

    /// Truncate `x` to an integer-like dyadic with the same residue mod `2^r`.
    /// Same as [`Rational2::residue`]; named for call sites that shrink heights.
    pub fn truncate_mod(&self, r: i64) -> Rational2 {
        self.residue(r)
    }

    pub fn signum(&self) -> i32 {
        match self.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
}

impl Default for Rational2 {
    fn default() -> Self {
        Rational2::zero()
    }
}

impl From<i64> for Rational2 {
    fn from(n: i64) -> Self {
        Rational2::from_int(n)
    }
}

impl From<BigInt> for Rational2 {
    fn from(n: BigInt) -> Self {
        Rational2::from_int(n)
    }
}

impl PartialOrd for Rational2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational2 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b Rational2> for &'a Rational2 {
            type Output = Rational2;
            fn $method(self, rhs: &'b Rational2) -> Rational2 {
                let f: fn(&Rational2, &Rational2) -> Rational2 = $body;
                f(self, rhs)
            }
        }
        impl $tr<Rational2> for Rational2 {
            type Output = Rational2;
            fn $method(self, rhs: Rational2) -> Rational2 {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $tr<&'b Rational2> for Rational2 {
            type Output = Rational2;
            fn $method(self, rhs: &'b Rational2) -> Rational2 {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Rational2> for &'a Rational2 {
            type Output = Rational2;
            fn $method(self, rhs: Rational2) -> Rational2 {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let value = &a.value + &b.value;
    // Unequal valuations: the ultrametric inequality is an equality.
    let val = if a.val != b.val {
        a.val.min(b.val)
    } else {
        v2_ratio(&value)
    };
    Rational2 { value, val }
});

forward_binop!(Sub, sub, |a, b| a + &(-b));

forward_binop!(Mul, mul, |a, b| Rational2 {
    value: &a.value * &b.value,
    val: a.val + b.val,
});

impl Neg for &Rational2 {
    type Output = Rational2;
    fn neg(self) -> Rational2 {
        Rational2 {
            value: -&self.value,
            val: self.val,
        }
    }
}

impl Neg for Rational2 {
    type Output = Rational2;
    fn neg(self) -> Rational2 {
        -&self
    }
}

impl fmt::Display for Rational2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (v={})", self.val)
    }
}

impl FromStr for Rational2 {
    type Err = Error;

    /// Accepts `p`, `p/q`, with an optional sign on `p`; also `2^e` and `-2^e`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed rational literal {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((base, exp)) = s.split_once('^') {
            let (neg, base) = match base.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, base),
            };
            if base != "2" {
                return Err(bad());
            }
            let e: i64 = exp.parse().map_err(|_| bad())?;
            let p = Rational2::pow2(e);
            return Ok(if neg { -p } else { p });
        }
        let parse_int = |t: &str| -> Result<BigInt> {
            let t = t.strip_prefix('+').unwrap_or(t);
            if t.is_empty()
                || !t
                    .trim_start_matches('-')
                    .chars()
                    .all(|c| c.is_ascii_digit())
            {
                return Err(bad());
            }
            t.parse::<BigInt>().map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(Rational2::from_int(parse_int(s)?)),
            Some((p, q)) => {
                let q = parse_int(q)?;
                if q.is_negative() {
                    return Err(bad());
                }
                Rational2::new(parse_int(p)?, q)
            }
        }
    }
}

impl Serialize for Rational2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and tables: `q(19, 2)` is 19/2.
pub fn q(n: i64, d: i64) -> Rational2 {
    Rational2::new(n, d).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(q(-1, 2).val(), ValExponent::Finite(-1));
        assert_eq!(Rational2::zero().val(), ValExponent::Infinity);
        assert_eq!(q(-93, 8).val(), ValExponent::Finite(-3));
        assert_eq!(q(-93, 8).abs_log2(), Some(3));
        assert_eq!(Rational2::from(272).val(), ValExponent::Finite(4));
        assert_eq!(q(12, 40).val(), ValExponent::Finite(-1));
    }

    #[test]
    fn field_ops() {
        let s = q(-1, 2) + Rational2::one();
        assert_eq!(s, q(1, 2));
        assert_eq!(s.val(), ValExponent::Finite(-1));
        let p = q(3, 2) * (Rational2::one() - Rational2::from(3));
        assert_eq!(p, Rational2::from(-3));
        assert_eq!(p.abs_log2(), Some(0));
        assert_eq!(
            Rational2::one().checked_div(&Rational2::zero()),
            Err(Error::DivisionByZero)
        );
        assert_eq!(q(3, 4).checked_div(&q(3, 8)).unwrap(), Rational2::from(2));
        // equal valuations: cancellation computed, not assumed
        assert_eq!((q(1, 2) + q(1, 2)).val(), ValExponent::Finite(0));
        assert_eq!((q(1, 2) - q(1, 2)).val(), ValExponent::Infinity);
    }

    #[test]
    fn congruences() {
        assert!(q(19, 2).congruent(&q(51, 2), 4));
        assert!(q(83, 2).congruent(&q(19, 2), 4));
        assert!(!q(1, 2).congruent(&q(3, 2), 1));
        assert!(q(1, 2).congruent(&q(3, 2), 0));
    }

    #[test]
    fn residues_are_canonical() {
        assert_eq!(q(51, 2).residue(4), q(19, 2));
        assert_eq!(q(83, 2).residue(4), q(19, 2));
        assert_eq!(q(1, 3).residue(4), Rational2::from(11));
        assert_eq!(Rational2::from(-1).residue(3), Rational2::from(7));
        assert_eq!(q(1, 2).residue(-1), Rational2::zero());
        assert_eq!(Rational2::from(5).residue(0), Rational2::zero());
    }

    #[test]
    fn parsing() {
        assert_eq!("19/2".parse::<Rational2>().unwrap(), q(19, 2));
        assert_eq!("-961/2".parse::<Rational2>().unwrap(), q(-961, 2));
        assert_eq!("+4".parse::<Rational2>().unwrap(), Rational2::from(4));
        assert_eq!("2^-3".parse::<Rational2>().unwrap(), q(1, 8));
        assert_eq!("6/4".parse::<Rational2>().unwrap(), q(3, 2));
        for bad in ["", "1/0", "a/2", "1/-2", "1//2", "3^2", "--1"] {
            assert!(bad.parse::<Rational2>().is_err(), "{bad}");
        }
        assert_eq!(q(-7, 2).to_string(), "-7/2");
        assert_eq!(Rational2::from(3).to_string(), "3");
    }
}
