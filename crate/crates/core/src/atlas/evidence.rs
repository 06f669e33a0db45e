use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::trace::VerifierTrace;
use crate::dyadic::Rational2;
use crate::dynamics::{
    classify_point_orbit, escape_certified, first_critical_image, EscapeCertificate, OrbitOptions,
    PointReport, TrapCertificate, TrapEntry,
};
use crate::geometry::Disk;
use crate::poly::FamilyMember;

/// Why a tree node carries its label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Trace {
        trace: VerifierTrace,
    },
    Escape {
        certificate: EscapeCertificate,
    },
    Trap {
        entry: TrapEntry,
        trap: TrapCertificate,
    },
    /// `|t| <= 1/2` on the whole disk, so `Z_2` is invariant under `f_t`.
    SmallParameter {
        disk: Disk,
    },
    /// `|t| > 1` on the whole disk, so `f_t(1)` already escapes.
    LargeParameter {
        disk: Disk,
    },
    /// A point with a certified bounded orbit, for boundary nodes.
    BoundedPoint {
        report: PointReport,
    },
}

impl Evidence {
    pub fn replay(&self) -> bool {
        match self {
            Evidence::Trace { trace } => trace.replay(),
            Evidence::Escape { certificate } => certificate.replay(),
            Evidence::Trap { entry, trap } => entry.replay(trap),
            Evidence::SmallParameter { disk } => {
                Disk::new(Rational2::zero(), 1).contains_disk(disk)
            }
            Evidence::LargeParameter { disk } => {
                let (Some(vt), Some(vz)) = (
                    disk.constant_val(),
                    first_critical_image(disk).constant_val(),
                ) else {
                    return false;
                };
                vt < 0 && escape_certified(crate::ValExponent::Finite(vt), vz)
            }
            Evidence::BoundedPoint { report } => {
                let fresh = classify_point_orbit(
                    &FamilyMember::new(report.t.clone()),
                    &report.z,
                    &OrbitOptions::default(),
                );
                fresh.class == report.class && fresh.class.bounded() == Some(true)
            }
        }
    }
}

/// Append-only map from evidence id to evidence. The first entry stored under
/// an id wins.
#[derive(Debug, Default)]
pub struct EvidenceStore {
    items: RwLock<BTreeMap<String, Arc<Evidence>>>,
}

impl EvidenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&self, id: &str, evidence: Evidence) -> Arc<Evidence> {
        let mut items = self.items.write().expect("evidence lock poisoned");
        items
            .entry(id.to_string())
            .or_insert_with(|| Arc::new(evidence))
            .clone()
    }

    pub fn get(&self, id: &str) -> Option<Arc<Evidence>> {
        self.items
            .read()
            .expect("evidence lock poisoned")
            .get(id)
            .cloned()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.items
            .read()
            .expect("evidence lock poisoned")
            .contains_key(id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.items
            .read()
            .expect("evidence lock poisoned")
            .keys()
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.items.read().expect("evidence lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The entries named by `ids`, in the given order, skipping unknown ids.
    pub fn subset<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, Evidence> {
        let items = self.items.read().expect("evidence lock poisoned");
        ids.into_iter()
            .filter_map(|id| items.get(id).map(|e| (id.to_string(), (**e).clone())))
            .collect()
    }
}
