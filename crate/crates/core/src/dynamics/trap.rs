use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::family::{family_disk_map, replay_disk_map, ParamScope};
use crate::dyadic::{Padic2, Rational2};
use crate::error::{Error, Result};
use crate::geometry::{Disk, DiskMapCertificate};

/// Which points a certificate speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldScope {
    /// Only `Q_2` points; `C_2` points of the same disks may escape.
    Q2PointsOnly,
}

/// A chain of disks whose last disk maps back into one of the earlier ones.
///
/// Every `Q_2` point of every disk has its forward orbit in the union of the
/// disks, for every `Q_2` parameter in scope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapCertificate {
    pub id: String,
    pub scope: ParamScope,
    /// Disks visited once before the cycle.
    pub entry: Vec<Disk>,
    /// Cyclically ordered: each disk maps into the next, the last into the first.
    pub cycle: Vec<Disk>,
    /// One certificate per edge, entry edges first, then the cycle edges.
    pub proofs: Vec<DiskMapCertificate>,
    pub field_scope: FieldScope,
}

fn chain_id(scope: &ParamScope, chain: &[Disk]) -> String {
    let disks: Vec<String> = chain.iter().map(ToString::to_string).collect();
    format!("trap[{scope}; {}]", disks.join(" -> "))
}

/// Certify a chain `D_0 -> D_1 -> ... -> D_L` with `D_L` contained in some earlier `D_j`.
pub fn certify_chain(scope: &ParamScope, chain: &[Disk]) -> Result<TrapCertificate> {
    if chain.len() < 2 {
        return Err(Error::Domain(
            "a trap chain needs at least two disks".into(),
        ));
    }
    let last = chain.len() - 1;
    let j = chain[..last]
        .iter()
        .position(|d| d.contains_disk(&chain[last]))
        .ok_or_else(|| Error::Certification {
            edge: last,
            detail: format!("final disk {} is not inside any earlier disk", chain[last]),
        })?;
    let mut proofs = Vec::with_capacity(last);
    for (edge, pair) in chain.windows(2).enumerate() {
        let cert = family_disk_map(scope, &pair[0], &pair[1]);
        if !cert.is_certified() {
            let detail = match &cert.witness {
                Some(w) => format!(
                    "{} -> {}: z = {} maps to {} (t = {})",
                    pair[0],
                    pair[1],
                    w.point,
                    w.image,
                    w.parameter.as_ref().unwrap_or(scope.center())
                ),
                None => format!("{} -> {}", pair[0], pair[1]),
            };
            return Err(Error::Certification { edge, detail });
        }
        proofs.push(cert);
    }
    Ok(TrapCertificate {
        id: chain_id(scope, chain),
        scope: scope.clone(),
        entry: chain[..j].to_vec(),
        cycle: chain[j..last].to_vec(),
        proofs,
        field_scope: FieldScope::Q2PointsOnly,
    })
}

/// Certify that `disks`, taken cyclically, form a trap.
pub fn certify_trap_cycle(scope: &ParamScope, disks: &[Disk]) -> Result<TrapCertificate> {
    let first = disks
        .first()
        .ok_or_else(|| Error::Domain("empty trap cycle".into()))?;
    let mut chain = disks.to_vec();
    chain.push(first.clone());
    certify_chain(scope, &chain)
}

/// Prepend a certified entry path to an existing trap. The path's last disk
/// must map into a disk of the trap.
pub fn certify_entry_path(trap: &TrapCertificate, path: &[Disk]) -> Result<TrapCertificate> {
    let mut chain = path.to_vec();
    chain.extend(trap.entry.iter().cloned());
    chain.extend(trap.cycle.iter().cloned());
    chain.push(trap.cycle[0].clone());
    certify_chain(&trap.scope, &chain)
}

impl TrapCertificate {
    pub fn disks(&self) -> impl Iterator<Item = &Disk> {
        self.entry.iter().chain(self.cycle.iter())
    }

    pub fn applies_to(&self, t: &Rational2) -> bool {
        self.scope.contains_t(t)
    }

    /// A disk of the trap containing `z`.
    pub fn disk_containing(&self, z: &Rational2) -> Option<&Disk> {
        self.disks().find(|d| d.contains(z))
    }

    /// A disk of the trap containing the whole ball `z`.
    pub fn disk_containing_ball(&self, z: &Padic2) -> Option<&Disk> {
        self.disks().find(|d| d.contains_ball(z))
    }

    /// A disk of the trap containing all of `d`.
    pub fn disk_containing_disk(&self, d: &Disk) -> Option<&Disk> {
        self.disks().find(|e| e.contains_disk(d))
    }

    /// Re-check every edge and the chain structure.
    pub fn replay(&self) -> bool {
        let chain: Vec<&Disk> = self.disks().chain(self.cycle.first()).collect();
        if self.cycle.is_empty() || self.proofs.len() + 1 != chain.len() {
            return false;
        }
        self.proofs.iter().zip(chain.windows(2)).all(|(p, pair)| {
            let scoped = match &self.scope {
                ParamScope::Point { t } => p.parameter.as_ref() == Some(t),
                ParamScope::Disk { disk } => p.parameter_disk.as_ref() == Some(disk),
            };
            scoped
                && p.source_disk == *pair[0]
                && pair[1].contains_disk(&p.target_disk)
                && p.is_certified()
                && replay_disk_map(p)
        })
    }
}

/// The trap around the repelling 2-cycle of `f_1`, valid for all `t ≡ 1 mod 32`:
/// `27/2:4 -> 2:2 -> 3:2 -> 19/2:4 -> 3:2`.
pub fn standard_trap() -> Arc<TrapCertificate> {
    static TRAP: OnceLock<Arc<TrapCertificate>> = OnceLock::new();
    TRAP.get_or_init(|| {
        let chain: Vec<Disk> = ["27/2:4", "2:2", "3:2", "19/2:4", "3:2"]
            .iter()
            .map(|s| s.parse().expect("literal disk"))
            .collect();
        let scope = ParamScope::disk("1:5".parse().expect("literal disk"));
        Arc::new(certify_chain(&scope, &chain).expect("the standard trap certifies"))
    })
    .clone()
}

/// Append-only collection of trap certificates shared between classifications.
#[derive(Debug, Default)]
pub struct TrapLibrary {
    traps: RwLock<Vec<Arc<TrapCertificate>>>,
}

impl TrapLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    /// A library holding exactly `traps`, which are trusted as already replayed.
    pub fn from_certificates(traps: Vec<Arc<TrapCertificate>>) -> Self {
        TrapLibrary {
            traps: RwLock::new(traps),
        }
    }

    /// A library holding [`standard_trap`].
    pub fn seeded() -> Self {
        let lib = Self::new();
        lib.traps.write().expect("fresh lock").push(standard_trap());
        lib
    }

    /// Add a certificate after replaying it. Duplicates (by id) are not stored twice.
    pub fn publish(&self, cert: TrapCertificate) -> Result<Arc<TrapCertificate>> {
        if !cert.replay() {
            return Err(Error::Certification {
                edge: 0,
                detail: format!("certificate {} does not replay", cert.id),
            });
        }
        let mut traps = self.traps.write().expect("trap library lock poisoned");
        if let Some(existing) = traps.iter().find(|c| c.id == cert.id) {
            return Ok(existing.clone());
        }
        let cert = Arc::new(cert);
        traps.push(cert.clone());
        Ok(cert)
    }

    pub fn snapshot(&self) -> Vec<Arc<TrapCertificate>> {
        self.traps
            .read()
            .expect("trap library lock poisoned")
            .clone()
    }

    pub fn len(&self) -> usize {
        self.traps.read().expect("trap library lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: &str) -> Option<Arc<TrapCertificate>> {
        self.snapshot().into_iter().find(|c| c.id == id)
    }
}
