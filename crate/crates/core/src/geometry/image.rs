use serde::{Deserialize, Serialize};

use super::Disk;
use crate::dyadic::ValExponent;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// How a computed image disk relates to the true image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageScope {
    /// Equal to `p(D)` over `C_2`; restricted to `Q_2` points it is a superset.
    ExactOverC2,
    /// Contains the image of every `C_2` point, possibly strictly.
    SupersetOverC2,
    /// A certified superset of the image of the `Q_2` points only.
    SupersetOverQ2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskImage {
    pub disk: Disk,
    pub scope: ImageScope,
}

/// `min_k v(c_k) + k * rexp` over the Taylor coefficients at the center,
/// for `k` starting at `from`.
fn taylor_radius_val(shifted: &Poly, rexp: i64, from: usize) -> ValExponent {
    shifted
        .coeffs()
        .iter()
        .enumerate()
        .skip(from)
        .map(|(k, c)| c.val() + (k as i64) * rexp)
        .min()
        .unwrap_or(ValExponent::Infinity)
}

/// `p(D)` over `C_2`: the disk `D̄(p(a), max_k |c_k| r^k)` with `c_k` the
/// Taylor coefficients of `p` at the center.
pub fn disk_image(p: &Poly, d: &Disk) -> Result<DiskImage> {
    if p.is_constant() {
        return Err(Error::DegenerateImage);
    }
    let shifted = p.taylor_shift(&d.center);
    let rexp = taylor_radius_val(&shifted, d.rexp, 1)
        .finite()
        .expect("nonconstant polynomial has a nonzero Taylor coefficient");
    Ok(DiskImage {
        disk: Disk::new(shifted.coeff(0), rexp),
        scope: ImageScope::ExactOverC2,
    })
}

/// `v2` of `sup_{z in D} |p(z)|` over `C_2`; `inf` only for `p = 0`.
pub fn disk_sup_norm(p: &Poly, d: &Disk) -> ValExponent {
    taylor_radius_val(&p.taylor_shift(&d.center), d.rexp, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{critical_cubic, FamilyMember};
    use crate::{q, Rational2};

    fn f1() -> Poly {
        FamilyMember::new(Rational2::one()).poly
    }

    #[test]
    fn repelling_fixed_point_quadruples_radius() {
        let img = disk_image(&f1(), &Disk::new(q(-1, 2), 1)).unwrap();
        assert_eq!(img.disk, Disk::new(q(-1, 2), -1));
        assert_eq!(img.scope, ImageScope::ExactOverC2);
    }

    #[test]
    fn images_of_escape_chain() {
        let img = disk_image(&f1(), &Disk::new(q(7, 2), 3)).unwrap();
        assert_eq!(img.disk.center, q(149, 2));
        assert_eq!(img.disk, Disk::new(q(1, 2), 1));
        let id = Poly::x();
        let d = Disk::new(q(5, 3), 7);
        assert_eq!(disk_image(&id, &d).unwrap().disk, d);
        assert_eq!(
            disk_image(&Poly::from_ints(&[5]), &d),
            Err(Error::DegenerateImage)
        );
    }

    #[test]
    fn sup_norms() {
        assert_eq!(
            disk_sup_norm(&critical_cubic(), &Disk::new(q(1, 2), 0)),
            ValExponent::Finite(-1)
        );
        assert_eq!(
            disk_sup_norm(&Poly::from_ints(&[5]), &Disk::new(q(1, 2), 3)),
            ValExponent::Finite(0)
        );
        assert_eq!(
            disk_sup_norm(&Poly::x(), &Disk::new(Rational2::zero(), 0)),
            ValExponent::Finite(0)
        );
        assert_eq!(
            disk_sup_norm(&Poly::zero(), &Disk::new(Rational2::zero(), 0)),
            ValExponent::Infinity
        );
    }
}
