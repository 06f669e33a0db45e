use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::{Rational2, ValExponent};
use crate::error::{Error, Result};
use crate::geometry::{
    disk_sup_norm, min_val_on_z2, pullback, q2_image, residue_disk_map, z2_congruence_check,
    CertificateKind, Disk, DiskImage, DiskMapCertificate, ImageScope, Verdict, Witness,
};
use crate::poly::{critical_cubic, t_part, FamilyMember, Poly};

/// The parameters a statement is made for: one `t`, or every `t` in a disk.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamScope {
    Point { t: Rational2 },
    Disk { disk: Disk },
}

impl ParamScope {
    pub fn point(t: Rational2) -> Self {
        ParamScope::Point { t }
    }

    pub fn disk(disk: Disk) -> Self {
        ParamScope::Disk { disk }
    }

    pub fn center(&self) -> &Rational2 {
        match self {
            ParamScope::Point { t } => t,
            ParamScope::Disk { disk } => &disk.center,
        }
    }

    pub fn member(&self) -> FamilyMember {
        FamilyMember::new(self.center().clone())
    }

    pub fn contains_t(&self, t: &Rational2) -> bool {
        match self {
            ParamScope::Point { t: s } => s == t,
            ParamScope::Disk { disk } => disk.contains(t),
        }
    }

    /// Every parameter of `other` lies in `self`.
    pub fn contains_scope(&self, other: &ParamScope) -> bool {
        match (self, other) {
            (_, ParamScope::Point { t }) => self.contains_t(t),
            (ParamScope::Disk { disk: a }, ParamScope::Disk { disk: b }) => a.contains_disk(b),
            (ParamScope::Point { .. }, ParamScope::Disk { .. }) => false,
        }
    }

    /// `v2(t)`, when it is the same for every parameter in scope.
    pub fn t_val(&self) -> Option<ValExponent> {
        match self {
            ParamScope::Point { t } => Some(t.val()),
            ParamScope::Disk { disk } => disk.constant_val().map(ValExponent::Finite),
        }
    }
}

impl fmt::Display for ParamScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamScope::Point { t } => write!(f, "t = {t}"),
            ParamScope::Disk { disk } => write!(f, "t in {disk}"),
        }
    }
}

/// Certify `f_t(src ∩ Q_2) ⊆ tgt` for every `t` in scope (over `Q_2`).
///
/// Since `f_t = f_{t0} + (t - t0) q` with `q = 3z^3 - (9/2)z^2`, and
/// `t - t0 = 2^ρ u` with `u ∈ Z_2` arbitrary, the claim holds iff both
/// `k ↦ f_{t0}(a + 2^r k) - b` and `k ↦ 2^ρ q(a + 2^r k)` send `Z_2` into `2^R Z_2`.
pub fn family_disk_map(scope: &ParamScope, src: &Disk, tgt: &Disk) -> DiskMapCertificate {
    let param = match scope {
        ParamScope::Point { t } => {
            let mut cert = residue_disk_map(&FamilyMember::new(t.clone()).poly, src, tgt);
            cert.parameter = Some(t.clone());
            if let Some(w) = cert.witness.as_mut() {
                w.parameter = Some(t.clone());
            }
            return cert;
        }
        ParamScope::Disk { disk } => disk,
    };
    let f0 = FamilyMember::new(param.center.clone());
    let h0 = pullback(&f0.poly, src, &tgt.center);
    let h1 = param_part(src, param.rexp);
    let c0 = z2_congruence_check(&h0, tgt.rexp);
    let c1 = z2_congruence_check(&h1, tgt.rexp);
    let witness = if let Some(k) = &c0.witness {
        let point = src.point(&Rational2::from(k.clone()));
        let image = f0.eval(&point);
        Some(Witness {
            point,
            parameter: Some(param.center.clone()),
            image,
        })
    } else if let Some(k) = &c1.witness {
        let point = src.point(&Rational2::from(k.clone()));
        let t = param.point(&Rational2::one());
        let image = FamilyMember::new(t.clone()).eval(&point);
        Some(Witness {
            point,
            parameter: Some(t),
            image,
        })
    } else {
        None
    };
    DiskMapCertificate {
        kind: CertificateKind::FamilyDiskMap,
        source_disk: src.clone(),
        target_disk: tgt.clone(),
        difference_valuations: c0.differences,
        parameter: None,
        parameter_disk: Some(param.clone()),
        parameter_difference_valuations: Some(c1.differences),
        verdict: if witness.is_none() {
            Verdict::Certified
        } else {
            Verdict::Rejected
        },
        witness,
    }
}

/// `k ↦ 2^ρ q(a + 2^r k)`.
fn param_part(src: &Disk, rho: i64) -> Poly {
    pullback(&t_part(), src, &Rational2::zero()).scale(&Rational2::pow2(rho))
}

/// Recompute a disk-map certificate from its own fields.
pub fn replay_disk_map(cert: &DiskMapCertificate) -> bool {
    let scope = match (&cert.parameter_disk, &cert.parameter) {
        (Some(d), _) => ParamScope::disk(d.clone()),
        (None, Some(t)) => ParamScope::point(t.clone()),
        (None, None) => return false,
    };
    let fresh = family_disk_map(&scope, &cert.source_disk, &cert.target_disk);
    fresh.verdict == cert.verdict
        && fresh.difference_valuations == cert.difference_valuations
        && fresh.parameter_difference_valuations == cert.parameter_difference_valuations
}

/// The smallest disk containing `f_t(z)` for all `Q_2` points `t` in scope and `z` in `src`.
pub fn family_q2_image(scope: &ParamScope, src: &Disk) -> Result<Disk> {
    match scope {
        ParamScope::Point { t } => q2_image(&FamilyMember::new(t.clone()).poly, src),
        ParamScope::Disk { disk } => {
            let f0 = FamilyMember::new(disk.center.clone());
            let center = f0.eval(&src.center);
            let r0 = min_val_on_z2(&pullback(&f0.poly, src, &center));
            let r1 = min_val_on_z2(&param_part(src, disk.rexp));
            match r0.min(r1) {
                ValExponent::Finite(r) => Ok(Disk::new(center, r)),
                ValExponent::Infinity => Err(Error::DegenerateImage),
            }
        }
    }
}

/// A disk containing `f_t(z)` for all `C_2` points `t` in scope and `z` in `src`.
///
/// Exact for a single parameter; for a parameter disk the radius is the
/// larger of the Taylor radius at `t0` and `|3/2| 2^-ρ sup_src |-2z^3 + 3z^2|`.
pub fn family_c2_image(scope: &ParamScope, src: &Disk) -> Result<DiskImage> {
    let f0 = scope.member();
    let center = f0.eval(&src.center);
    let moving = &f0.poly - &Poly::constant(center.clone());
    let mut r = disk_sup_norm(&moving, src);
    let mut scope_kind = ImageScope::ExactOverC2;
    if let ParamScope::Disk { disk } = scope {
        let spread = disk_sup_norm(&critical_cubic(), src) + (disk.rexp - 1);
        r = r.min(spread);
        scope_kind = ImageScope::SupersetOverC2;
    }
    match r {
        ValExponent::Finite(r) => Ok(DiskImage {
            disk: Disk::new(center, r).canonical(),
            scope: scope_kind,
        }),
        ValExponent::Infinity => Err(Error::DegenerateImage),
    }
}

/// Every `z` with `v2(z) = vz` escapes to infinity under every `f_t` with `v2(t) = vt`.
///
/// With `v(z) = -e`, `e >= 2`: `v(3z - 9/2) = -e`, so `v(t z^2 (3z - 9/2)) = vt - 3e`,
/// which beats the constant and gives `v(f(z)) < v(z)` exactly when `vt < 2e`.
/// The new exponent `3e - vt` is larger than `e`, so the condition persists.
pub fn escape_certified(vt: ValExponent, vz: i64) -> bool {
    match vt {
        ValExponent::Finite(a) => vz <= -2 && a + 2 * vz < 0,
        ValExponent::Infinity => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn d(s: &str) -> Disk {
        s.parse().unwrap()
    }

    #[test]
    fn family_maps_around_the_two_cycle() {
        let scope = ParamScope::disk(d("1:5"));
        for (a, b) in [
            ("27/2:4", "2:2"),
            ("2:2", "3:2"),
            ("3:2", "19/2:4"),
            ("19/2:4", "3:2"),
        ] {
            let cert = family_disk_map(&scope, &d(a), &d(b));
            assert!(cert.is_certified(), "{a} -> {b}");
            assert!(replay_disk_map(&cert));
        }
        // only t ≡ 1 mod 16 is too coarse for the 3:2 -> 19/2:4 step
        let cert = family_disk_map(&ParamScope::disk(d("1:4")), &d("3:2"), &d("19/2:4"));
        assert!(!cert.is_certified());
        let w = cert.witness.clone().unwrap();
        let image = FamilyMember::new(w.parameter.clone().unwrap()).eval(&w.point);
        assert_eq!(image, w.image);
        assert!(!d("19/2:4").contains(&image));
        assert!(d("1:4").contains(&w.parameter.unwrap()));
        assert!(d("3:2").contains(&w.point));
    }

    #[test]
    fn point_scope_matches_single_map() {
        let cert = family_disk_map(&ParamScope::point(q(33, 1)), &d("27/2:4"), &d("2:2"));
        assert!(cert.is_certified());
        assert_eq!(cert.parameter, Some(q(33, 1)));
        assert!(replay_disk_map(&cert));
    }

    #[test]
    fn images_over_parameter_disks() {
        let scope = ParamScope::disk(d("1:5"));
        let img = family_q2_image(&scope, &d("3:2")).unwrap();
        assert!(d("19/2:4").contains_disk(&img));
        let c2 = family_c2_image(&scope, &d("3:2")).unwrap();
        assert!(c2.disk.contains_disk(&img));
        assert_eq!(c2.scope, ImageScope::SupersetOverC2);
        let exact = family_c2_image(&ParamScope::point(Rational2::one()), &d("-1/2:1")).unwrap();
        assert_eq!(exact.disk, d("-1/2:-1"));
        assert!(family_c2_image(&ParamScope::point(Rational2::zero()), &d("0:1")).is_err());
    }

    #[test]
    fn escape_rule() {
        assert!(escape_certified(ValExponent::Finite(0), -2));
        assert!(!escape_certified(ValExponent::Finite(0), -1));
        assert!(!escape_certified(ValExponent::Finite(4), -2));
        assert!(escape_certified(ValExponent::Finite(-1), -2));
        assert!(!escape_certified(ValExponent::Infinity, -100));
    }
}
