use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::{Padic2, Rational2};
use crate::error::{Error, Result};

/// The closed disk `D̄(center, 2^-rexp) = { z : z ≡ center mod 2^rexp }`.
///
/// Any member is a valid center: equality and hashing go through the
/// canonical residue of the center.
#[derive(Clone, Serialize, Deserialize)]
pub struct Disk {
    pub center: Rational2,
    pub rexp: i64,
}

impl Disk {
    pub fn new(center: Rational2, rexp: i64) -> Self {
        Disk { center, rexp }
    }

    /// `log2` of the radius.
    pub fn radius_log2(&self) -> i64 {
        -self.rexp
    }

    pub fn contains(&self, z: &Rational2) -> bool {
        z.congruent(&self.center, self.rexp)
    }

    /// Every point of the ball `z` lies in this disk.
    pub fn contains_ball(&self, z: &Padic2) -> bool {
        z.inside_disk(&self.center, self.rexp)
    }

    pub fn contains_disk(&self, other: &Disk) -> bool {
        other.rexp >= self.rexp && other.center.congruent(&self.center, self.rexp)
    }

    pub fn intersects(&self, other: &Disk) -> bool {
        self.contains_disk(other) || other.contains_disk(self)
    }

    /// The two residue sub-disks `D̄(a, 2^-(r+1))` and `D̄(a + 2^r, 2^-(r+1))`.
    pub fn children(&self) -> [Disk; 2] {
        [
            Disk::new(self.center.clone(), self.rexp + 1),
            Disk::new(&self.center + &Rational2::pow2(self.rexp), self.rexp + 1),
        ]
    }

    pub fn parent(&self) -> Disk {
        Disk::new(self.center.clone(), self.rexp - 1)
    }

    /// Same disk with the canonical residue as center.
    pub fn canonical(&self) -> Disk {
        Disk::new(self.center.residue(self.rexp), self.rexp)
    }

    /// Point `center + 2^rexp * k` of the disk.
    pub fn point(&self, k: &Rational2) -> Rational2 {
        &self.center + &k.shl2(self.rexp)
    }

    /// All points share one absolute value (the disk misses 0): returns `v2` of it.
    pub fn constant_val(&self) -> Option<i64> {
        self.center.val().finite().filter(|&v| v < self.rexp)
    }
}

impl PartialEq for Disk {
    fn eq(&self, other: &Self) -> bool {
        self.rexp == other.rexp && self.center.congruent(&other.center, self.rexp)
    }
}

impl Eq for Disk {}

impl Hash for Disk {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rexp.hash(state);
        self.center.residue(self.rexp).hash(state);
    }
}

impl fmt::Display for Disk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.center, self.rexp)
    }
}

impl fmt::Debug for Disk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D({}, 2^{})", self.center, -self.rexp)
    }
}

impl FromStr for Disk {
    type Err = Error;

    /// `center:rexp`, e.g. `19/2:4` for `D̄(19/2, 2^-4)`.
    fn from_str(s: &str) -> Result<Self> {
        let (c, r) = s
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("disk {s:?} is not of the form center:rexp")))?;
        let rexp = r
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad radius exponent in {s:?}")))?;
        Ok(Disk::new(c.parse()?, rexp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn membership_and_equality() {
        let d = Disk::new(q(19, 2), 4);
        assert!(d.contains(&q(51, 2)));
        assert!(!d.contains(&q(37, 2)));
        assert_eq!(d, Disk::new(q(83, 2), 4));
        assert_ne!(d, Disk::new(q(19, 2), 5));
        let [a, b] = Disk::new(q(-1, 2), 0).children();
        assert_eq!(a, Disk::new(q(-1, 2), 1));
        assert_eq!(b, Disk::new(q(1, 2), 1));
        assert!(Disk::new(q(3, 1), 2).contains_disk(&Disk::new(q(7, 1), 5)));
        assert!(!Disk::new(q(3, 1), 2).contains_disk(&Disk::new(q(7, 1), 1)));
    }

    #[test]
    fn hashing_uses_residues() {
        use std::collections::HashSet;
        let set: HashSet<Disk> = [Disk::new(q(19, 2), 4), Disk::new(q(51, 2), 4)]
            .into_iter()
            .collect();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn parse_and_display() {
        let d: Disk = "19/2:4".parse().unwrap();
        assert_eq!(d, Disk::new(q(19, 2), 4));
        assert_eq!(d.to_string(), "19/2:4");
        assert!("19/2".parse::<Disk>().is_err());
        assert!("19/2:x".parse::<Disk>().is_err());
        assert_eq!(Disk::new(q(-7, 2), 2).constant_val(), Some(-1));
        assert_eq!(Disk::new(q(8, 1), 2).constant_val(), None);
    }
}
