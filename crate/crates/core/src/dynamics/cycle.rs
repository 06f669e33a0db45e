use serde::{Deserialize, Serialize};

use crate::dyadic::{Padic2, Rational2, ValExponent};
use crate::error::{Error, Result};
use crate::geometry::Disk;
use crate::poly::{FamilyMember, Poly};

/// A root of a polynomial, certified by Taylor dominance at the seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HenselRoot {
    /// An approximation `x` with `v2(x - root) = abs_prec`; exact when `abs_prec` is `inf`.
    pub approx: Rational2,
    pub abs_prec: ValExponent,
    /// `v2(g(x0) / g'(x0))` at the seed center: the root is unique in that disk.
    pub seed_radius_exp: i64,
    /// `v2(g'(x0))`, which equals `v2(g'(x))` on the whole disk.
    pub derivative_val: i64,
    pub iterations: usize,
}

impl HenselRoot {
    pub fn is_exact(&self) -> bool {
        self.abs_prec.is_infinite()
    }

    pub fn ball(&self, rel_prec: u32) -> Padic2 {
        match self.abs_prec {
            ValExponent::Infinity => Padic2::from_rational(&self.approx, rel_prec),
            ValExponent::Finite(a) => Padic2::from_rational_abs(&self.approx, a),
        }
    }
}

/// Newton's method for a root of `g` in `seed`, to absolute precision `target_abs`.
///
/// With `c_k` the Taylor coefficients at the seed center `x0` and
/// `ρ = |c_0 / c_1|`, the seed is accepted when `|c_k| ρ^(k-1) < |c_1|` for
/// all `k >= 2` and `ρ` is at most the seed radius. Then `g` has exactly one
/// root `α` in `D̄(x0, ρ)`, `|g'| = |c_1|` there, and `|x - α| = |g(x) / g'(x)|`
/// for every `x` in that disk, so each iterate carries its own error bound.
pub fn hensel_root(g: &Poly, seed: &Disk, target_abs: i64) -> Result<HenselRoot> {
    let x0 = seed.center.clone();
    let c = g.taylor_shift(&x0);
    let c1 = c.coeff(1);
    let Some(v1) = c1.val().finite() else {
        return Err(Error::NoConvergence(format!(
            "g'({x0}) = 0: not a simple root"
        )));
    };
    let ValExponent::Finite(v0) = c.coeff(0).val() else {
        return Ok(HenselRoot {
            approx: x0,
            abs_prec: ValExponent::Infinity,
            seed_radius_exp: i64::MAX,
            derivative_val: v1,
            iterations: 0,
        });
    };
    let rho = v0 - v1;
    if rho < seed.rexp {
        return Err(Error::NoConvergence(format!(
            "|g/g'| = 2^{} at {x0} exceeds the seed radius 2^{}: no root certified in {seed}",
            -rho, -seed.rexp
        )));
    }
    for (k, ck) in c.coeffs().iter().enumerate().skip(2) {
        if !(ck.val() + (k as i64 - 1) * rho > ValExponent::Finite(v1)) {
            return Err(Error::NoConvergence(format!(
                "Taylor coefficient {k} at {x0} is not dominated by the linear term"
            )));
        }
    }
    let dg = g.derivative();
    let keep = target_abs.max(rho) + 2;
    let mut x = x0;
    let mut err = rho;
    let mut iterations = 0;
    while err < target_abs {
        if iterations > 256 {
            return Err(Error::NoConvergence("Newton iteration stalled".into()));
        }
        iterations += 1;
        let delta = g.eval(&x).checked_div(&dg.eval(&x))?;
        let next = &x - &delta;
        // exact roots only show up at small height; large iterates would make
        // this evaluation dominate the lift
        let small = next.numer().bits() + next.denom().bits() <= 512;
        if small && g.eval(&next).is_zero() {
            return Ok(HenselRoot {
                approx: next,
                abs_prec: ValExponent::Infinity,
                seed_radius_exp: rho,
                derivative_val: v1,
                iterations,
            });
        }
        x = next.residue(keep);
        let gx = g.eval(&x);
        let ValExponent::Finite(vg) = gx.val() else {
            return Ok(HenselRoot {
                approx: x,
                abs_prec: ValExponent::Infinity,
                seed_radius_exp: rho,
                derivative_val: v1,
                iterations,
            });
        };
        let new_err = vg - v1;
        if new_err <= err && new_err < target_abs {
            return Err(Error::NoConvergence("Newton step made no progress".into()));
        }
        err = new_err;
    }
    Ok(HenselRoot {
        approx: x,
        abs_prec: ValExponent::Finite(err),
        seed_radius_exp: rho,
        derivative_val: v1,
        iterations,
    })
}

fn proper_divisors(n: usize) -> Vec<usize> {
    (1..n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `f^p(z) - z`, divided by `f^d(z) - z` for each proper divisor `d` of `p`
/// whenever that division is exact.
pub fn period_polynomial(f: &FamilyMember, period: usize) -> Result<Poly> {
    if period == 0 {
        return Err(Error::Domain("period must be positive".into()));
    }
    if period > 5 {
        return Err(Error::Domain(format!(
            "period {period} is too large (at most 5)"
        )));
    }
    let mut iterates = vec![Poly::x()];
    for _ in 0..period {
        let next = f.poly.compose(iterates.last().expect("nonempty"));
        iterates.push(next);
    }
    let x = Poly::x();
    let mut g = &iterates[period] - &x;
    for d in proper_divisors(period).into_iter().rev() {
        let h = &iterates[d] - &x;
        if h.is_constant() {
            continue;
        }
        let (quot, rem) = g.div_rem(&h)?;
        if rem.is_zero() {
            g = quot;
        }
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nature {
    Attracting,
    Neutral,
    Repelling,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplier {
    pub value: Padic2,
    /// `v2(λ)`; `inf` when `λ = 0`.
    pub val: ValExponent,
    /// `|λ| = 2^-val`.
    pub abs: Rational2,
    pub nature: Nature,
}

fn balls_meet(a: &Padic2, b: &Padic2) -> bool {
    let prec = a.abs_prec().min(b.abs_prec());
    match prec {
        ValExponent::Infinity => a == b,
        ValExponent::Finite(p) => a.representative().congruent(&b.representative(), p),
    }
}

/// `f'` on a ball, factored as `9 t z (z - 1)`.
fn derivative_ball(f: &FamilyMember, z: &Padic2, prec: u32) -> Padic2 {
    let zm1 = z.add_exact(&Rational2::from(-1));
    z.mul(&zm1)
        .mul_exact(&(&f.t * &Rational2::from(9)))
        .reduce(prec.max(1))
}

/// `λ = ∏ f'(z_i)` around a cycle, with `|λ|` and the cycle's nature.
pub fn multiplier(f: &FamilyMember, points: &[Padic2], prec: u32) -> Result<Multiplier> {
    if points.is_empty() {
        return Err(Error::Domain("empty cycle".into()));
    }
    for (i, z) in points.iter().enumerate() {
        let next = &points[(i + 1) % points.len()];
        if !balls_meet(&f.eval_padic(z, prec), next) {
            return Err(Error::Domain(format!(
                "points do not form a cycle: f(z_{i}) is not z_{} at working precision",
                (i + 1) % points.len()
            )));
        }
    }
    let value = points
        .iter()
        .map(|z| derivative_ball(f, z, prec))
        .fold(Padic2::one(prec), |acc, d| acc.mul(&d));
    let val = match (&value, value.val()) {
        (_, Some(v)) => ValExponent::Finite(v),
        (Padic2::Zero { abs }, None) if abs.at_least(1) => *abs,
        _ => return Err(Error::ZeroToPrecision),
    };
    let (abs, nature) = match val {
        ValExponent::Infinity => (Rational2::zero(), Nature::Attracting),
        ValExponent::Finite(v) if value.is_zero() => (Rational2::pow2(-v), Nature::Attracting),
        ValExponent::Finite(v) => (
            Rational2::pow2(-v),
            match v.cmp(&0) {
                std::cmp::Ordering::Greater => Nature::Attracting,
                std::cmp::Ordering::Equal => Nature::Neutral,
                std::cmp::Ordering::Less => Nature::Repelling,
            },
        ),
    };
    Ok(Multiplier {
        value,
        val,
        abs,
        nature,
    })
}

/// A periodic cycle found by Hensel lifting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub t: Rational2,
    pub period: usize,
    pub seed: Disk,
    /// `z_0` is the lifted root; `z_{i+1} = f(z_i)`.
    pub points: Vec<Padic2>,
    /// The cycle in exact rationals, when the root is rational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_points: Option<Vec<Rational2>>,
    pub multiplier: Padic2,
    pub multiplier_val: ValExponent,
    pub multiplier_abs: Rational2,
    pub nature: Nature,
    pub hensel: HenselRoot,
}

/// Lift the period-`period` point of `f` in `seed` and describe its cycle.
pub fn find_cycle_hensel(
    f: &FamilyMember,
    period: usize,
    seed: &Disk,
    precision: u32,
) -> Result<CycleRecord> {
    let g = period_polynomial(f, period)?;
    if g.is_constant() {
        return Err(Error::NoConvergence(format!(
            "no points of period {period}"
        )));
    }
    let work = precision + 32;
    let mut target = seed.rexp.max(0) + precision as i64;
    let mut root = hensel_root(&g, seed, target)?;
    if let Some(v) = root.approx.val().finite() {
        if !root.is_exact() && v + precision as i64 > target {
            target = v + precision as i64;
            root = hensel_root(&g, seed, target)?;
        }
    }
    let (points, exact_points) = if root.is_exact() {
        let mut pts = vec![root.approx.clone()];
        for _ in 1..period {
            pts.push(f.eval(pts.last().expect("nonempty")));
        }
        if let Some(d) = (1..period).find(|&d| f.iterate(&pts[0], d) == pts[0]) {
            return Err(Error::WrongPeriod {
                expected: period,
                found: d,
            });
        }
        let balls = pts.iter().map(|p| Padic2::from_rational(p, work)).collect();
        (balls, Some(pts))
    } else {
        let mut balls = vec![root.ball(work)];
        for _ in 1..period {
            let next = f.eval_padic(balls.last().expect("nonempty"), work);
            balls.push(next);
        }
        let mut back = balls[0].clone();
        for d in 1..period {
            back = f.eval_padic(&back, work);
            if period.is_multiple_of(d) && balls_meet(&back, &balls[0]) {
                return Err(Error::WrongPeriod {
                    expected: period,
                    found: d,
                });
            }
        }
        (balls, None)
    };
    let m = multiplier(f, &points, work)?;
    Ok(CycleRecord {
        t: f.t.clone(),
        period,
        seed: seed.clone(),
        points: points.iter().map(|p| p.reduce(precision)).collect(),
        exact_points,
        multiplier: m.value.reduce(precision),
        multiplier_val: m.val,
        multiplier_abs: m.abs,
        nature: m.nature,
        hensel: root,
    })
}
