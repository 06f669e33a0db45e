//! Independent oracles shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dydy::geometry::{disk_image, newton_polygon, z2_congruence_check, Disk};
use dydy::poly::Poly;
use dydy::{Padic2, Rational2, ValExponent};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;
use rand::Rng;

/// `v2` by repeated halving of numerator and denominator.
pub fn naive_val(x: &Rational2) -> Option<i64> {
    fn tz(n: &BigInt) -> i64 {
        let two = BigInt::from(2);
        let mut n = n.abs();
        let mut k = 0;
        while n.is_even() {
            n /= &two;
            k += 1;
        }
        k
    }
    if x.is_zero() {
        return None;
    }
    Some(tz(x.numer()) - tz(x.denom()))
}

fn as_val(v: Option<i64>) -> ValExponent {
    v.map_or(ValExponent::Infinity, ValExponent::Finite)
}

/// `num * 2^e / (2 odd + 1)`.
pub fn rational(num: i64, e: i32, odd: i64) -> Rational2 {
    let den = 2 * odd.abs() + 1;
    &Rational2::new(num, den).unwrap() * &Rational2::pow2(e as i64)
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational2 {
    let num = rng.gen_range(-1_000_000i64..=1_000_000);
    rational(num, rng.gen_range(-12..=12), rng.gen_range(0..500))
}

/// `2^e` times a unit of `Z_2`.
pub fn random_unit_multiple<R: Rng>(rng: &mut R, e: i64) -> Rational2 {
    let num = 2 * rng.gen_range(-5_000i64..5_000) + 1;
    let den = 2 * rng.gen_range(0i64..300) + 1;
    &Rational2::new(num, den).unwrap() * &Rational2::pow2(e)
}

/// A random element of `Z_2` (an integer or a fraction with odd denominator).
pub fn random_z2<R: Rng>(rng: &mut R) -> Rational2 {
    let num = rng.gen_range(-100_000i64..=100_000);
    let den = 2 * rng.gen_range(0i64..200) + 1;
    Rational2::new(num, den).unwrap()
}

pub fn check_ultrametric(x: &Rational2, y: &Rational2) -> Result<(), String> {
    let (vx, vy) = (naive_val(x), naive_val(y));
    if x.val() != as_val(vx) || y.val() != as_val(vy) {
        return Err(format!("valuation mismatch on {x} or {y}"));
    }
    let vp = naive_val(&(x * y));
    let expect = match (vx, vy) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    if vp != expect {
        return Err(format!("|xy| != |x||y| for {x}, {y}"));
    }
    let vs = naive_val(&(x + y));
    match (vx, vy) {
        (Some(a), Some(b)) => {
            let lo = a.min(b);
            if vs.is_some_and(|s| s < lo) {
                return Err(format!("|x+y| > max for {x}, {y}"));
            }
            if a != b && vs != Some(lo) {
                return Err(format!(
                    "|x+y| != max(|x|,|y|) with |x| != |y| for {x}, {y}"
                ));
            }
        }
        (None, _) if vs != vy => return Err("x = 0 but v(x+y) != v(y)".into()),
        (_, None) if vs != vx => return Err("y = 0 but v(x+y) != v(x)".into()),
        _ => {}
    }
    Ok(())
}

/// Every truncated operation returns a ball holding the exact result.
pub fn check_padic_containment(x: &Rational2, y: &Rational2, prec: u32) -> Result<(), String> {
    let (bx, by) = (
        Padic2::from_rational(x, prec),
        Padic2::from_rational(y, prec),
    );
    let cases = [
        ("add", bx.add(&by), x + y),
        ("sub", bx.sub(&by), x - y),
        ("mul", bx.mul(&by), x * y),
        ("neg", bx.neg(), -x),
        ("mul_exact", bx.mul_exact(y), x * y),
        ("add_exact", bx.add_exact(y), x + y),
    ];
    for (name, ball, exact) in cases {
        if !ball.contains(&exact) {
            return Err(format!(
                "{name}: {ball} misses {exact} (x = {x}, y = {y}, prec {prec})"
            ));
        }
    }
    if !y.is_zero() {
        if let Ok(ball) = bx.div(&by) {
            let exact = x.checked_div(y).unwrap();
            if !ball.contains(&exact) {
                return Err(format!("div: {ball} misses {exact}"));
            }
        }
    }
    Ok(())
}

pub fn check_congruence(x: &Rational2, y: &Rational2, r: i64) -> Result<(), String> {
    let a = x.congruent(y, r);
    let b = naive_val(&(x - y)).is_none_or(|v| v >= r);
    let c = x.residue(r) == y.residue(r);
    if a == b && b == c {
        Ok(())
    } else {
        Err(format!(
            "congruent/val/residue disagree on {x}, {y} mod 2^{r}: {a} {b} {c}"
        ))
    }
}

/// Exhaustive oracle: `h = sum (nums[i] / 2^exps[i]) z^i` maps `Z_2` into
/// `2^r Z_2` iff `2^m h(k) ≡ 0 mod 2^(r+m)` for every `k mod 2^(r+6)`.
pub fn exhaustive_congruence(nums: &[i64], exps: &[u32], r: i64) -> bool {
    let m = exps.iter().copied().max().unwrap_or(0) as i64;
    let target = r + m;
    if target <= 0 {
        return true;
    }
    assert!(target < 120);
    let mask: u128 = (1u128 << target) - 1;
    let cs: Vec<u128> = nums
        .iter()
        .zip(exps)
        .map(|(&a, &e)| ((a as i128) << (m - e as i64)) as u128)
        .collect();
    let span = 1u128 << (r.max(0) + 6);
    (0..span).all(|k| {
        let mut acc: u128 = 0;
        for c in cs.iter().rev() {
            acc = acc.wrapping_mul(k).wrapping_add(*c);
        }
        acc & mask == 0
    })
}

pub fn mahler_poly(nums: &[i64], exps: &[u32]) -> Poly {
    Poly::new(
        nums.iter()
            .zip(exps)
            .map(|(&a, &e)| &Rational2::from(a) * &Rational2::pow2(-(e as i64)))
            .collect(),
    )
}

pub fn check_mahler(nums: &[i64], exps: &[u32], r: i64) -> Result<(), String> {
    let h = mahler_poly(nums, exps);
    let check = z2_congruence_check(&h, r);
    let oracle = exhaustive_congruence(nums, exps, r);
    if check.holds != oracle {
        return Err(format!(
            "h = {}, r = {r}: mahler {} vs exhaustive {oracle}",
            h.display_in("z"),
            check.holds
        ));
    }
    if let Some(k) = &check.witness {
        let v = h.eval(&Rational2::from(k.clone())).val();
        if v.at_least(r) {
            return Err(format!(
                "witness {k} does not violate the congruence for {}",
                h.display_in("z")
            ));
        }
    }
    Ok(())
}

pub fn check_disk_image(p: &Poly, d: &Disk, ks: &[Rational2]) -> Result<(), String> {
    let Ok(img) = disk_image(p, d) else {
        return if p.is_constant() {
            Ok(())
        } else {
            Err(format!("no image for {} on {d}", p.display_in("z")))
        };
    };
    for k in ks {
        let z = d.point(k);
        let w = p.eval(&z);
        if !img.disk.contains(&w) {
            return Err(format!(
                "p = {}, D = {d}: p({z}) = {w} outside {}",
                p.display_in("z"),
                img.disk
            ));
        }
    }
    Ok(())
}

pub fn from_roots(lead: &Rational2, roots: &[Rational2]) -> Poly {
    roots.iter().fold(Poly::constant(lead.clone()), |acc, r| {
        let lin = Poly::linear(-r, Rational2::one());
        mul(&acc, &lin)
    })
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let (ca, cb) = (a.coeffs(), b.coeffs());
    if ca.is_empty() || cb.is_empty() {
        return Poly::zero();
    }
    let mut out = vec![Rational2::zero(); ca.len() + cb.len() - 1];
    for (i, x) in ca.iter().enumerate() {
        for (j, y) in cb.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    Poly::new(out)
}

fn multiset<I: IntoIterator<Item = (Ratio<i64>, usize)>>(items: I) -> BTreeMap<Ratio<i64>, usize> {
    let mut m = BTreeMap::new();
    for (k, c) in items {
        if c > 0 {
            *m.entry(k).or_insert(0) += c;
        }
    }
    m
}

pub fn polygon_root_valuations(p: &Poly) -> Result<BTreeMap<Ratio<i64>, usize>, String> {
    let poly = newton_polygon(p).map_err(|e| e.to_string())?;
    Ok(multiset(poly.root_valuations()))
}

/// Roots `2^e * odd`: the polygon must report exactly the exponents `e`.
pub fn check_newton(lead: &Rational2, roots: &[Rational2]) -> Result<(), String> {
    let p = from_roots(lead, roots);
    let got = polygon_root_valuations(&p)?;
    let want = multiset(
        roots
            .iter()
            .map(|r| (Ratio::from_integer(naive_val(r).unwrap()), 1)),
    );
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "roots {roots:?}: polygon gives {got:?}, expected {want:?}"
        ))
    }
}

pub fn check_newton_product(p: &Poly, q: &Poly) -> Result<(), String> {
    let (a, b) = (polygon_root_valuations(p)?, polygon_root_valuations(q)?);
    let got = polygon_root_valuations(&mul(p, q))?;
    let want = multiset(a.into_iter().chain(b));
    if got == want {
        Ok(())
    } else {
        Err(format!("product polygon {got:?} is not the merge {want:?}"))
    }
}

/// `|f_t(z) + 1/2| = 4 |z + 1/2|` by exact evaluation.
pub fn check_lemma_31(t: &Rational2, z: &Rational2) -> Result<(), String> {
    let half = dydy::q(1, 2);
    let k = -naive_val(&(z + &half)).unwrap();
    let f = dydy::poly::FamilyMember::new(t.clone());
    let w = &f.eval(z) + &half;
    match naive_val(&w) {
        Some(v) if -v == k + 2 => Ok(()),
        other => Err(format!(
            "t = {t}, z = {z}: |z+1/2| = 2^{k}, |f(z)+1/2| = 2^{:?}",
            other.map(|v| -v)
        )),
    }
}

/// Iterate `z` under `f` for `steps` steps with `Padic2` at `prec` bits,
/// continuing each step from the exact center of the previous ball. Every
/// step then applies `f` to a genuine point of a trap disk, without the
/// precision loss of iterating one ball through a repelling cycle.
pub fn trap_orbit_stays(
    f: &dydy::poly::FamilyMember,
    trap: &dydy::dynamics::TrapCertificate,
    z: &Rational2,
    steps: usize,
    prec: u32,
) -> Result<(), String> {
    let mut w = z.clone();
    if trap.disk_containing(&w).is_none() {
        return Err(format!("start {w} is not in the trap"));
    }
    for step in 0..steps {
        let ball = f.eval_padic(&Padic2::from_rational(&w, prec), prec);
        if trap.disk_containing_ball(&ball).is_none() {
            return Err(format!("f({w}) = {ball} left the trap at step {step}"));
        }
        w = ball.representative();
    }
    Ok(())
}
