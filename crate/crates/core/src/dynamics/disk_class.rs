use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::family::{
    escape_certified, family_c2_image, family_disk_map, family_q2_image, ParamScope,
};
use super::orbit::{classify_point_orbit, OrbitClass, OrbitOptions};
use super::trap::{certify_chain, TrapCertificate, TrapLibrary};
use crate::dyadic::Rational2;
use crate::geometry::{Disk, DiskMapCertificate};
use crate::poly::FamilyMember;

#[derive(Clone, Debug)]
pub struct DiskOptions {
    /// Disk-image steps tried by each of the escape and trap searches.
    pub max_steps: usize,
    /// Levels of sub-disks searched for mixed behaviour; 0 turns the search off.
    pub boundary_depth: usize,
    /// Iteration budget for the candidate bounded point of the boundary search.
    pub boundary_point_iters: usize,
    /// Publish traps found along the way to the library.
    pub discover_traps: bool,
    pub orbit: OrbitOptions,
}

impl Default for DiskOptions {
    fn default() -> Self {
        DiskOptions {
            max_steps: 64,
            boundary_depth: 6,
            boundary_point_iters: 256,
            discover_traps: true,
            orbit: OrbitOptions::default(),
        }
    }
}

impl DiskOptions {
    pub fn traps(&self) -> &Arc<TrapLibrary> {
        &self.orbit.traps
    }
}

/// Iterated `C_2` images of a disk until every point has absolute value
/// large enough to escape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeCertificate {
    pub scope: ParamScope,
    pub source: Disk,
    /// `images[i]` contains the image of `images[i-1]` (of `source` for `i = 0`).
    pub images: Vec<Disk>,
    /// Index, counted from `source`, of the first disk satisfying the escape rule.
    pub escape_step: usize,
    /// `v2` of every point in that disk.
    pub escape_val: i64,
}

impl EscapeCertificate {
    pub fn replay(&self) -> bool {
        let Some(vt) = self.scope.t_val() else {
            return false;
        };
        let mut cur = self.source.clone();
        for img in &self.images {
            match family_c2_image(&self.scope, &cur) {
                Ok(fresh) if img.contains_disk(&fresh.disk) => cur = img.clone(),
                _ => return false,
            }
        }
        cur.constant_val() == Some(self.escape_val)
            && escape_certified(vt, self.escape_val)
            && self.images.len() == self.escape_step
    }
}

/// A certified path of `Q_2` disk maps from a disk into a trap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapEntry {
    pub scope: ParamScope,
    pub source: Disk,
    pub path: Vec<DiskMapCertificate>,
    pub trap_id: String,
    pub trap_disk: Disk,
}

impl TrapEntry {
    pub fn replay(&self, trap: &TrapCertificate) -> bool {
        let mut cur = &self.source;
        for cert in &self.path {
            if cert.source_disk != *cur
                || !cert.is_certified()
                || !super::family::replay_disk_map(cert)
            {
                return false;
            }
            cur = &cert.target_disk;
        }
        trap.id == self.trap_id
            && trap.scope.contains_scope(&self.scope)
            && trap.disks().any(|d| *d == self.trap_disk)
            && self.trap_disk.contains_disk(cur)
            && trap.replay()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiskClass {
    /// Every `C_2` point of the disk escapes.
    AllEscape {
        certificate: EscapeCertificate,
    },
    /// Every `Q_2` point of the disk has a bounded orbit.
    TrappedQ2 {
        certificate: TrapEntry,
    },
    /// A bounded point and an escaping sub-disk, both inside the disk.
    Boundary {
        bounded_point: Rational2,
        bounded_class: OrbitClass,
        escaping: EscapeCertificate,
    },
    Unknown {
        reason: String,
    },
}

impl DiskClass {
    pub fn label(&self) -> &'static str {
        match self {
            DiskClass::AllEscape { .. } => "all_escape",
            DiskClass::TrappedQ2 { .. } => "trapped_q2",
            DiskClass::Boundary { .. } => "boundary",
            DiskClass::Unknown { .. } => "unknown",
        }
    }
}

/// Search for an escape certificate by iterating `C_2` disk images.
pub fn escape_search(scope: &ParamScope, d: &Disk, max_steps: usize) -> Option<EscapeCertificate> {
    let vt = scope.t_val()?;
    let mut images = Vec::new();
    let mut cur = d.clone();
    for step in 0..=max_steps {
        if let Some(v) = cur.constant_val() {
            if escape_certified(vt, v) {
                return Some(EscapeCertificate {
                    scope: scope.clone(),
                    source: d.clone(),
                    images,
                    escape_step: step,
                    escape_val: v,
                });
            }
        } else if cur.rexp <= -2 {
            return None;
        }
        if step == max_steps {
            break;
        }
        cur = family_c2_image(scope, &cur).ok()?.disk.canonical();
        images.push(cur.clone());
    }
    None
}

/// Search for a path of `Q_2` images into a trap, discovering new traps when
/// the image chain closes up on itself.
pub fn trap_search(scope: &ParamScope, d: &Disk, opts: &DiskOptions) -> Option<TrapEntry> {
    let traps: Vec<_> = opts
        .traps()
        .snapshot()
        .into_iter()
        .filter(|c| c.scope.contains_scope(scope))
        .collect();
    let mut chain = vec![d.clone()];
    let mut path: Vec<DiskMapCertificate> = Vec::new();
    for _ in 0..=opts.max_steps {
        let cur = chain.last().expect("nonempty").clone();
        for trap in &traps {
            if let Some(td) = trap.disk_containing_disk(&cur) {
                return Some(TrapEntry {
                    scope: scope.clone(),
                    source: d.clone(),
                    path,
                    trap_id: trap.id.clone(),
                    trap_disk: td.clone(),
                });
            }
        }
        if cur.constant_val().is_none() && cur.rexp <= -2 {
            return None;
        }
        let vt = scope.t_val();
        if let (Some(vt), Some(v)) = (vt, cur.constant_val()) {
            if escape_certified(vt, v) {
                return None;
            }
        }
        let img = family_q2_image(scope, &cur).ok()?.canonical();
        let cert = family_disk_map(scope, &cur, &img);
        debug_assert!(cert.is_certified());
        if let Some(j) = chain.iter().position(|e| e.contains_disk(&img)) {
            if !opts.discover_traps {
                return None;
            }
            let mut cycle: Vec<Disk> = chain[j..].to_vec();
            cycle.push(img);
            let trap = certify_chain(scope, &cycle).ok()?;
            let trap = opts.traps().publish(trap).ok()?;
            path.truncate(j);
            return Some(TrapEntry {
                scope: scope.clone(),
                source: d.clone(),
                path,
                trap_id: trap.id.clone(),
                trap_disk: chain[j].clone(),
            });
        }
        path.push(cert);
        chain.push(img);
    }
    None
}

fn classify_in_scope(scope: &ParamScope, d: &Disk, opts: &DiskOptions) -> DiskClass {
    if let Some(certificate) = escape_search(scope, d, opts.max_steps) {
        return DiskClass::AllEscape { certificate };
    }
    if let Some(certificate) = trap_search(scope, d, opts) {
        return DiskClass::TrappedQ2 { certificate };
    }
    DiskClass::Unknown {
        reason: format!("no certificate within {} disk-image steps", opts.max_steps),
    }
}

/// Classify the orbits of all points of `d` under `f`.
pub fn classify_disk(f: &FamilyMember, d: &Disk, opts: &DiskOptions) -> DiskClass {
    let scope = ParamScope::point(f.t.clone());
    let class = classify_in_scope(&scope, d, opts);
    if !matches!(class, DiskClass::Unknown { .. }) || opts.boundary_depth == 0 {
        return class;
    }
    boundary_search(f, &scope, d, opts).unwrap_or(class)
}

fn boundary_search(
    f: &FamilyMember,
    scope: &ParamScope,
    d: &Disk,
    opts: &DiskOptions,
) -> Option<DiskClass> {
    let point_opts = OrbitOptions {
        max_iters: opts.boundary_point_iters,
        ..opts.orbit.clone()
    };
    let report = classify_point_orbit(f, &d.center, &point_opts);
    if report.class.bounded() != Some(true) {
        return None;
    }
    let mut level = vec![d.clone()];
    for _ in 0..opts.boundary_depth {
        level = level.iter().flat_map(|e| e.children()).collect();
        for sub in &level {
            if let Some(escaping) = escape_search(scope, sub, opts.max_steps) {
                return Some(DiskClass::Boundary {
                    bounded_point: d.center.clone(),
                    bounded_class: report.class,
                    escaping,
                });
            }
        }
    }
    None
}

/// The disk swept out by `f_t(1) = 1 - (3/2) t` for `t` in `params`.
pub fn first_critical_image(params: &Disk) -> Disk {
    let center = &Rational2::one() - &(&crate::q(3, 2) * &params.center);
    Disk::new(center, params.rexp - 1)
}

/// Classify the critical orbit `1, f_t(1), ...` for all `t` in `params` at once.
///
/// Certificates start from [`first_critical_image`], which is iterate 1.
pub fn classify_parameter_disk(params: &Disk, opts: &DiskOptions) -> DiskClass {
    let scope = ParamScope::disk(params.clone());
    classify_in_scope(&scope, &first_critical_image(params), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn d(s: &str) -> Disk {
        s.parse().unwrap()
    }

    fn f1() -> FamilyMember {
        FamilyMember::new(Rational2::one())
    }

    #[test]
    fn escaping_disk() {
        let c = classify_disk(&f1(), &d("1/2:1"), &DiskOptions::default());
        let DiskClass::AllEscape { certificate } = c else {
            panic!("{c:?}")
        };
        assert_eq!(certificate.escape_step, 1);
        assert_eq!(certificate.escape_val, -2);
        assert!(certificate.replay());
    }

    #[test]
    fn trapped_disk() {
        let c = classify_disk(&f1(), &d("19/2:4"), &DiskOptions::default());
        let DiskClass::TrappedQ2 { certificate } = c else {
            panic!("{c:?}")
        };
        assert!(certificate.path.is_empty());
        let opts = DiskOptions::default();
        let trap = opts.traps().get(&certificate.trap_id).unwrap();
        assert!(certificate.replay(&trap));
    }

    #[test]
    fn boundary_around_fixed_point() {
        let c = classify_disk(&f1(), &d("-1/2:6"), &DiskOptions::default());
        let DiskClass::Boundary {
            bounded_point,
            escaping,
            ..
        } = c
        else {
            panic!("{c:?}")
        };
        assert_eq!(bounded_point, q(-1, 2));
        assert!(d("-1/2:6").contains_disk(&escaping.source));
        let off = DiskOptions {
            boundary_depth: 0,
            ..DiskOptions::default()
        };
        assert!(matches!(
            classify_disk(&f1(), &d("-1/2:6"), &off),
            DiskClass::Unknown { .. }
        ));
    }

    #[test]
    fn parameter_disks() {
        let opts = DiskOptions::default();
        let c = classify_parameter_disk(&d("3:2"), &opts);
        let DiskClass::AllEscape { certificate } = c else {
            panic!("{c:?}")
        };
        // escape at iterate 2 of the critical orbit
        assert_eq!(certificate.escape_step + 1, 2);
        for center in [321, 449] {
            let c = classify_parameter_disk(&Disk::new(q(center, 1), 9), &opts);
            assert!(matches!(c, DiskClass::TrappedQ2 { .. }), "{center}: {c:?}");
        }
    }

    #[test]
    fn discovered_traps_are_published() {
        let lib = Arc::new(TrapLibrary::new());
        let opts = DiskOptions {
            orbit: OrbitOptions {
                traps: lib.clone(),
                ..OrbitOptions::default()
            },
            ..DiskOptions::default()
        };
        let c = classify_disk(&f1(), &d("3:2"), &opts);
        let DiskClass::TrappedQ2 { certificate } = c else {
            panic!("{c:?}")
        };
        assert_eq!(certificate.trap_disk, d("3:2"));
        assert_eq!(lib.len(), 1);
        let trap = lib.get(&certificate.trap_id).unwrap();
        assert!(certificate.replay(&trap));
        assert!(trap.scope.contains_t(&Rational2::one()));
    }
}
