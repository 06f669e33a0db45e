use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::Disk;
use crate::dyadic::{v2_int, Rational2, ValExponent};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Outcome of testing `h(k) ≡ 0 mod 2^r` for every `k ∈ Z_2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCheck {
    pub r: i64,
    pub holds: bool,
    /// `(j, v2(Δ^j h(0)))` for `j = 0..=deg h`.
    pub differences: Vec<(usize, ValExponent)>,
    pub failing_index: Option<usize>,
    /// An integer `k` with `v2(h(k)) < r` when the check fails.
    #[serde(
        with = "opt_bigint_str",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub witness: Option<BigInt>,
}

mod opt_bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match n {
            Some(n) => s.serialize_str(&n.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// `v2(Δ^j h(0))` for `j = 0..=deg h`.
///
/// `h` is evaluated at `0..=deg` with denominators cleared, so only integer
/// arithmetic runs here. The valuations of the forward differences are the
/// valuations of the Mahler coefficients of `h`.
pub fn forward_difference_valuations(h: &Poly) -> Vec<(usize, ValExponent)> {
    let (ints, den) = h.clear_denominators();
    let shift = v2_int(&den).finite().expect("denominator is nonzero");
    let d = h.degree().unwrap_or(0);
    let mut vals: Vec<BigInt> = (0..=d as u64)
        .map(|k| {
            let k = BigInt::from(k);
            ints.iter()
                .rev()
                .fold(BigInt::zero(), |acc, c| acc * &k + c)
        })
        .collect();
    for j in 1..=d {
        for i in (j..=d).rev() {
            vals[i] = &vals[i] - &vals[i - 1];
        }
    }
    vals.iter()
        .enumerate()
        .map(|(j, x)| (j, v2_int(x) + (-shift)))
        .collect()
}

/// `min_{k ∈ Z_2} v2(h(k))`, exactly.
pub fn min_val_on_z2(h: &Poly) -> ValExponent {
    forward_difference_valuations(h)
        .into_iter()
        .map(|(_, v)| v)
        .min()
        .unwrap_or(ValExponent::Infinity)
}

/// Decide whether `h(k) ≡ 0 mod 2^r` for all `k ∈ Z_2`.
///
/// This holds iff every forward difference `Δ^j h(0)` has valuation at
/// least `r`. When it fails at the first index `j`, `h(j)` is itself off,
/// since `h(j) = Σ_{i<=j} C(j,i) Δ^i h(0)` and only the last term is short.
pub fn z2_congruence_check(h: &Poly, r: i64) -> CongruenceCheck {
    let differences = forward_difference_valuations(h);
    let failing_index = differences
        .iter()
        .find(|(_, v)| !v.at_least(r))
        .map(|(j, _)| *j);
    CongruenceCheck {
        r,
        holds: failing_index.is_none(),
        differences,
        failing_index,
        witness: failing_index.map(BigInt::from),
    }
}

/// `k ↦ p(a + 2^r k) - b`, the pullback of `p` to the parameter `k ∈ Z_2` of `src`.
pub fn pullback(p: &Poly, src: &Disk, b: &Rational2) -> Poly {
    let lin = Poly::linear(src.center.clone(), Rational2::pow2(src.rexp));
    &p.compose(&lin) - &Poly::constant(b.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    ResidueDiskMap,
    FamilyDiskMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Rejected,
}

/// A `Q_2` point of the source (and, for families, a parameter) that lands outside the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Rational2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<Rational2>,
    pub image: Rational2,
}

/// Proof (or refutation) that `f(src ∩ Q_2) ⊆ tgt`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskMapCertificate {
    pub kind: CertificateKind,
    pub source_disk: Disk,
    pub target_disk: Disk,
    pub difference_valuations: Vec<(usize, ValExponent)>,
    /// The single parameter `t` the map was certified for, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<Rational2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter_disk: Option<Disk>,
    /// Forward differences of the parameter-linear part, for families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter_difference_valuations: Option<Vec<(usize, ValExponent)>>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl DiskMapCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    /// Re-derive the verdict for a single map from the stored data.
    pub fn replay(&self, f: &Poly) -> bool {
        let fresh = residue_disk_map(f, &self.source_disk, &self.target_disk);
        fresh.verdict == self.verdict && fresh.difference_valuations == self.difference_valuations
    }
}

/// Certify `f(src ∩ Q_2) ⊆ tgt` with the forward-difference test on the pullback.
pub fn residue_disk_map(f: &Poly, src: &Disk, tgt: &Disk) -> DiskMapCertificate {
    let h = pullback(f, src, &tgt.center);
    let check = z2_congruence_check(&h, tgt.rexp);
    let witness = check.witness.as_ref().map(|k| {
        let point = src.point(&Rational2::from(k.clone()));
        let image = f.eval(&point);
        Witness {
            point,
            parameter: None,
            image,
        }
    });
    DiskMapCertificate {
        kind: CertificateKind::ResidueDiskMap,
        source_disk: src.clone(),
        target_disk: tgt.clone(),
        difference_valuations: check.differences,
        parameter: None,
        parameter_disk: None,
        parameter_difference_valuations: None,
        verdict: if check.holds {
            Verdict::Certified
        } else {
            Verdict::Rejected
        },
        witness,
    }
}

/// The smallest disk containing `f(src ∩ Q_2)`. Smaller than the `C_2`
/// image in general, and exact: no smaller disk contains the `Q_2` image.
pub fn q2_image(f: &Poly, src: &Disk) -> Result<Disk> {
    let center = f.eval(&src.center);
    let h = pullback(f, src, &center);
    match min_val_on_z2(&h) {
        ValExponent::Finite(r) => Ok(Disk::new(center, r)),
        ValExponent::Infinity => Err(Error::DegenerateImage),
    }
}
