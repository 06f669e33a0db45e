use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A 2-adic valuation: an integer, or `+∞` for zero.
///
/// Ordered with every finite value below `Infinity`, so `min` over a set of
/// valuations behaves like the ultrametric bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValExponent {
    Finite(i64),
    Infinity,
}

impl ValExponent {
    pub fn finite(self) -> Option<i64> {
        match self {
            ValExponent::Finite(v) => Some(v),
            ValExponent::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ValExponent::Infinity
    }

    /// `self >= r`, i.e. a value of this valuation is `0 mod 2^r`.
    pub fn at_least(self, r: i64) -> bool {
        self >= ValExponent::Finite(r)
    }
}

impl From<i64> for ValExponent {
    fn from(v: i64) -> Self {
        ValExponent::Finite(v)
    }
}

impl Add for ValExponent {
    type Output = ValExponent;

    fn add(self, rhs: ValExponent) -> ValExponent {
        match (self, rhs) {
            (ValExponent::Finite(a), ValExponent::Finite(b)) => ValExponent::Finite(a + b),
            _ => ValExponent::Infinity,
        }
    }
}

impl Add<i64> for ValExponent {
    type Output = ValExponent;

    fn add(self, rhs: i64) -> ValExponent {
        self + ValExponent::Finite(rhs)
    }
}

impl Neg for ValExponent {
    type Output = Option<i64>;

    /// The exponent of the absolute value, `log2 |x| = -v(x)`; `None` for zero.
    fn neg(self) -> Option<i64> {
        self.finite().map(|v| -v)
    }
}

impl fmt::Display for ValExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValExponent::Finite(v) => write!(f, "{v}"),
            ValExponent::Infinity => f.write_str("inf"),
        }
    }
}

// JSON: an integer, or the string "inf".
impl Serialize for ValExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ValExponent::Finite(v) => s.serialize_i64(*v),
            ValExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ValExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(ValExponent::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(ValExponent::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad valuation {s:?}"))),
        }
    }
}
