use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::cycle::{hensel_root, multiplier, Multiplier};
use crate::dyadic::{Padic2, Rational2, ValExponent};
use crate::error::{Error, Result};
use crate::geometry::{newton_polygon, Disk, NewtonPolygon};
use crate::poly::{build_gn, FamilyMember, Poly};

/// A parameter `t_n` whose critical point `0` has exact period `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcfParameter {
    pub n: usize,
    /// `t_n` to the requested relative precision.
    pub t: Padic2,
    /// A rational within `2^-t_abs_prec` of `t_n`.
    pub t_approx: Rational2,
    pub t_abs_prec: ValExponent,
    /// `v2(t_n - 1)`.
    pub s_val: i64,
    pub polygon: NewtonPolygon,
    /// `f^m(0) ≡ 0 mod 2^verified_bits` holds for `m = n` and fails for `0 < m < n`.
    pub verified_bits: i64,
    /// `v2(f^m(0))` for `m = 0..=n`, as certified by ball arithmetic.
    pub orbit_valuations: Vec<ValExponent>,
    pub multiplier: Multiplier,
}

/// `1 + t z^2 (3z - 9/2)` with both `t` and `z` given as balls.
pub fn family_eval_ball(t: &Padic2, z: &Padic2, prec: u32) -> Padic2 {
    let lin = z.mul_exact(&Rational2::from(3)).add_exact(&crate::q(-9, 2));
    z.mul(z)
        .mul(&lin)
        .mul(t)
        .add_exact(&Rational2::one())
        .reduce(prec.max(1))
}

/// Find `t_n = 1 + s_n` with `g_n(s_n) = 0` and `|s_n| = 2^(4-2n)`.
///
/// The Newton polygon of `g_n` must start with the segment from `(0, -1)` to
/// `(1, 3 - 2n)`. Substituting `s = 2^(2n-4) w` makes the root a unit `w`,
/// which is lifted from `w ≡ 1 mod 2`.
pub fn pcf_parameter(n: usize, precision: u32) -> Result<PcfParameter> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "PCF parameters are defined for n >= 2, got {n}"
        )));
    }
    if precision < 16 {
        return Err(Error::Domain("precision must be at least 16 bits".into()));
    }
    let g = build_gn(n)?;
    let polygon = newton_polygon(&g)?;
    let expected_slope = 4 - 2 * n as i64;
    let ok = polygon.vertices.first() == Some(&(0, -1))
        && polygon
            .segments
            .first()
            .is_some_and(|s| s.length() == 1 && s.slope == Ratio::from_integer(expected_slope));
    if !ok {
        return Err(Error::Structural(format!(
            "Newton polygon of g_{n} does not start with a segment of slope {expected_slope} and length 1: {}",
            serde_json::to_string(&polygon).unwrap_or_default()
        )));
    }
    let s_val = -expected_slope;
    let scale = Rational2::pow2(s_val);
    let rescaled = g.compose(&Poly::linear(Rational2::zero(), scale.clone()));
    let w_target = precision as i64 + 8;
    let root = hensel_root(&rescaled, &Disk::new(Rational2::one(), 1), w_target)?;
    let s = &root.approx * &scale;
    let t_approx = &s + &Rational2::one();
    let t_abs_prec = root.abs_prec + s_val;
    let t_ball = match t_abs_prec {
        ValExponent::Infinity => Padic2::from_rational(&t_approx, precision + 64),
        ValExponent::Finite(a) => Padic2::from_rational_abs(&t_approx, a),
    };

    // critical orbit in ball arithmetic, so the bound covers the true t_n
    let work = precision + 64;
    let mut orbit = vec![Padic2::exact_zero()];
    for _ in 0..n {
        let next = family_eval_ball(&t_ball, orbit.last().expect("nonempty"), work);
        orbit.push(next);
    }
    let verified_bits = match &orbit[n] {
        Padic2::Zero {
            abs: ValExponent::Finite(a),
        } => *a,
        Padic2::Zero {
            abs: ValExponent::Infinity,
        } => i64::MAX,
        other => {
            return Err(Error::Verification {
                step: n,
                detail: format!("f^{n}(0) = {other} is not 0 to working precision"),
            })
        }
    };
    for (m, z) in orbit.iter().enumerate().take(n).skip(1) {
        if !z.val().is_some_and(|v| v < verified_bits) {
            return Err(Error::Verification {
                step: m,
                detail: format!("f^{m}(0) = {z} already returns to 0"),
            });
        }
    }
    let orbit_valuations = orbit.iter().map(Padic2::val_lower_bound).collect();
    let f = FamilyMember::new(t_approx.clone());
    let mult = multiplier(&f, &orbit[..n], work)?;
    Ok(PcfParameter {
        n,
        t: t_ball.reduce(precision),
        t_approx,
        t_abs_prec,
        s_val,
        polygon,
        verified_bits,
        orbit_valuations,
        multiplier: mult,
    })
}
