//! Dense univariate polynomials over [`Rational2`], the cubic family, and the
//! critical-orbit parameter polynomials `g_n(s) = f_{s+1}^n(0)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{Padic2, Rational2, ValExponent};
use crate::error::{Error, Result};

/// `coeffs[i]` is the coefficient of `x^i`; trailing zeros are stripped, so
/// the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Rational2>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational2>) -> Self {
        while coeffs.last().is_some_and(Rational2::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational2::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational2) -> Self {
        Poly::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// `a + b x`.
    pub fn linear(a: Rational2, b: Rational2) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational2] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational2 {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Horner evaluation, exact.
    pub fn eval(&self, x: &Rational2) -> Rational2 {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational2::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Horner evaluation on a 2-adic ball; coefficients enter at `prec` bits.
    pub fn eval_padic(&self, x: &Padic2, prec: u32) -> Padic2 {
        self.coeffs
            .iter()
            .rev()
            .fold(Padic2::exact_zero(), |acc, c| {
                let term = if c.is_zero() {
                    Padic2::exact_zero()
                } else {
                    Padic2::from_rational(c, prec)
                };
                acc.mul(x).add(&term)
            })
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rational2::from(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational2) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `q(x) = p(a + x)`, by repeated synthetic division by `(x - a)`.
    pub fn taylor_shift(&self, a: &Rational2) -> Poly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        if a.is_zero() || n < 2 {
            return self.clone();
        }
        for k in 0..n - 1 {
            for i in (k..n - 1).rev() {
                let t = &c[i + 1] * a;
                c[i] = &c[i] + &t;
            }
        }
        Poly::new(c)
    }

    /// `p(q(x))` by Horner's rule on polynomials.
    pub fn compose(&self, q: &Poly) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            &(&acc * q) + &Poly::constant(c.clone())
        })
    }

    /// Euclidean division, `self = quot * d + rem` with `deg rem < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = d.coeffs[dd].recip()?;
        let mut rem = self.coeffs.clone();
        let Some(n) = self.degree().filter(|&n| n >= dd) else {
            return Ok((Poly::zero(), self.clone()));
        };
        let mut quot = vec![Rational2::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&c * dc);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// `(i, v2(coeff_i))` for every nonzero coefficient, increasing `i`.
    pub fn gauss_valuations(&self) -> Vec<(usize, ValExponent)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.val()))
            .collect()
    }

    /// Minimum coefficient valuation (the Gauss valuation); `inf` for zero.
    pub fn gauss_val(&self) -> ValExponent {
        self.coeffs
            .iter()
            .map(Rational2::val)
            .min()
            .unwrap_or(ValExponent::Infinity)
    }

    /// Integer coefficients of `D * self` with `D` the lcm of denominators.
    pub(crate) fn clear_denominators(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (ints, den)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(Rational2::one()), |acc, _| &acc * self)
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.signum() < 0;
            let mag = if neg { -c } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let unit = mag == Rational2::one();
            match i {
                0 => out.push_str(&mag.to_string()),
                _ => {
                    if !unit {
                        if mag.is_integer() {
                            out.push_str(&mag.to_string());
                        } else {
                            out.push_str(&format!("({mag})"));
                        }
                    }
                    out.push_str(var);
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("z"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{self}]")
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;

    /// Convolution over a common denominator, so the inner loop is integer-only.
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let (a, da) = self.clear_denominators();
        let (b, db) = rhs.clear_denominators();
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        let den = da * db;
        Poly::new(
            out.into_iter()
                .map(|c| Rational2::from_ratio(BigRational::new(c, den.clone())))
                .collect(),
        )
    }
}

macro_rules! owned_poly_ops {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly { (&self).$m(&rhs) }
        }
    )*};
}
owned_poly_ops!(Add::add, Sub::sub, Mul::mul);

/// A member `f_t(z) = 3t z^3 - (9/2) t z^2 + 1` of the cubic family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub t: Rational2,
    pub poly: Poly,
}

impl FamilyMember {
    pub fn new(t: Rational2) -> Self {
        let poly = &Poly::constant(Rational2::one()) + &t_part().scale(&t);
        FamilyMember { t, poly }
    }

    pub fn eval(&self, z: &Rational2) -> Rational2 {
        self.poly.eval(z)
    }

    pub fn derivative(&self) -> Poly {
        self.poly.derivative()
    }

    /// `f_t` on a 2-adic ball.
    pub fn eval_padic(&self, z: &Padic2, prec: u32) -> Padic2 {
        // 1 + t z^2 (3z - 9/2), kept factored to avoid needless cancellation
        let z2 = z.mul(z);
        let lin = z.mul_exact(&Rational2::from(3)).add_exact(&crate::q(-9, 2));
        z2.mul(&lin)
            .mul_exact(&self.t)
            .add_exact(&Rational2::one())
            .reduce(prec.max(1))
    }

    /// The `n`-th iterate of `z`, exactly.
    pub fn iterate(&self, z: &Rational2, n: usize) -> Rational2 {
        (0..n).fold(z.clone(), |acc, _| self.eval(&acc))
    }
}

/// The `t`-linear part: `f_t(z) = 1 + t * (3z^3 - (9/2) z^2)`.
pub fn t_part() -> Poly {
    Poly::new(vec![
        Rational2::zero(),
        Rational2::zero(),
        crate::q(-9, 2),
        Rational2::from(3),
    ])
}

/// `-2z^3 + 3z^2`, so that `f_t(z) = 1 - (3/2) t q(z)`.
pub fn critical_cubic() -> Poly {
    Poly::from_ints(&[0, 0, 3, -2])
}

/// `g_n(s) = f_{s+1}^n(0)` via `g_1 = 1`, `g_{m+1} = 1 - (3/2)(s+1)(3g_m^2 - 2g_m^3)`.
pub fn build_gn(n: usize) -> Result<Poly> {
    if n == 0 {
        return Err(Error::Domain("g_n is defined for n >= 1".into()));
    }
    let one = Poly::constant(Rational2::one());
    let s_plus_1 = Poly::from_ints(&[1, 1]);
    let outer = s_plus_1.scale(&crate::q(-3, 2));
    let cubic = critical_cubic();
    let mut g = one.clone();
    for _ in 1..n {
        // cubic.compose(g) expands g^2, g^3 once each
        let inner = cubic.compose(&g);
        g = &(&outer * &inner) + &one;
    }
    Ok(g)
}
