use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::evidence::{Evidence, EvidenceStore};
use super::verify::{
    julia_escape_disk, julia_trap_disk, mandel_escape_disk, mandel_trap_disk, pcf_radius_exponent,
    verify_prop_julia, verify_thm_bdd, verify_thm_q2bdd, verify_thm_unbdd, JuliaFamily,
    THM_BDD_DEFAULT_PRECISION,
};
use super::VerifierTrace;
use crate::dyadic::{Rational2, ValExponent};
use crate::dynamics::{
    classify_disk, classify_parameter_disk, classify_point_orbit, pcf_parameter, DiskClass,
    DiskOptions, OrbitOptions, TrapLibrary,
};
use crate::error::{Error, Result};
use crate::geometry::Disk;
use crate::poly::FamilyMember;
use crate::q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    /// Parameter disks around `t = 1`; a node is labeled by the critical orbit.
    Mandelbrot,
    /// Dynamical disks of `f_1` around `z = -1/2`.
    Julia,
}

impl TreeKind {
    /// The point every `Boundary` node of the tree contains.
    pub fn distinguished(self) -> Rational2 {
        match self {
            TreeKind::Mandelbrot => Rational2::one(),
            TreeKind::Julia => q(-1, 2),
        }
    }

    pub fn root(self) -> Disk {
        Disk::new(self.distinguished(), 0)
    }

    fn tag(self) -> &'static str {
        match self {
            TreeKind::Mandelbrot => "mandel",
            TreeKind::Julia => "julia",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeLabel {
    Escape,
    TrappedQ2,
    #[serde(rename = "PCF")]
    Pcf,
    Boundary,
    Unknown,
}

impl NodeLabel {
    /// Resolved nodes are leaves; their descendants inherit the label.
    pub fn is_resolved(self) -> bool {
        matches!(
            self,
            NodeLabel::Escape | NodeLabel::TrappedQ2 | NodeLabel::Pcf
        )
    }

    fn dot_shape(self) -> &'static str {
        match self {
            NodeLabel::Escape => "oval",
            NodeLabel::TrappedQ2 | NodeLabel::Pcf => "box",
            NodeLabel::Boundary => "diamond",
            NodeLabel::Unknown => "plaintext",
        }
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeLabel::Escape => "Escape",
            NodeLabel::TrappedQ2 => "TrappedQ2",
            NodeLabel::Pcf => "PCF",
            NodeLabel::Boundary => "Boundary",
            NodeLabel::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub center: Rational2,
    pub rexp: i64,
    pub label: NodeLabel,
    pub evidence_id: Option<String>,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn disk(&self) -> Disk {
        Disk::new(self.center.clone(), self.rexp)
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a TreeNode>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }

    fn pattern(&self, levels: i64) -> LabelPattern {
        LabelPattern {
            label: self.label,
            children: if levels == 0 {
                Vec::new()
            } else {
                self.children
                    .iter()
                    .map(|c| c.pattern(levels - 1))
                    .collect()
            },
        }
    }
}

/// Labels of a subtree with the disks forgotten; children keep their order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPattern {
    pub label: NodeLabel,
    pub children: Vec<LabelPattern>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedTree {
    pub kind: TreeKind,
    /// Largest `rexp` of any node.
    pub depth: i64,
    pub root: TreeNode,
}

impl ClassifiedTree {
    /// All nodes in preorder.
    pub fn nodes(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        self.root.walk(&mut out);
        out
    }

    /// The node for exactly this disk, if the tree has one.
    pub fn find(&self, d: &Disk) -> Option<&TreeNode> {
        let mut cur = &self.root;
        if !cur.disk().contains_disk(d) {
            return None;
        }
        loop {
            if cur.rexp == d.rexp {
                return Some(cur);
            }
            cur = cur.children.iter().find(|c| c.disk().contains_disk(d))?;
        }
    }

    /// Label of `d`, inherited from a resolved ancestor when the tree stops above it.
    pub fn label_of(&self, d: &Disk) -> Option<NodeLabel> {
        let mut cur = &self.root;
        if !cur.disk().contains_disk(d) {
            return None;
        }
        loop {
            if cur.rexp == d.rexp || cur.label.is_resolved() {
                return Some(cur.label);
            }
            cur = cur.children.iter().find(|c| c.disk().contains_disk(d))?;
        }
    }

    /// Labels of the subtree rooted at `d`, down to `levels` levels below it.
    pub fn pattern(&self, d: &Disk, levels: i64) -> Option<LabelPattern> {
        self.find(d).map(|n| n.pattern(levels))
    }

    pub fn evidence_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self
            .nodes()
            .iter()
            .filter_map(|n| n.evidence_id.as_deref())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Structural invariants: residue children, monotone labels below
    /// resolved nodes, and boundary nodes around the distinguished point.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |n: &TreeNode, why: &str| Err(Error::Structural(format!("{}: {why}", n.disk())));
        let distinguished = self.kind.distinguished();
        for n in self.nodes() {
            if n.rexp > self.depth {
                return bad(n, "deeper than the tree");
            }
            if n.label == NodeLabel::Boundary && !n.disk().contains(&distinguished) {
                return bad(n, "boundary node away from the distinguished point");
            }
            if n.label.is_resolved() && !n.children.is_empty() {
                return bad(n, "resolved node with children");
            }
            if !n.children.is_empty() {
                let expect = n.disk().children();
                if n.children.len() != 2
                    || n.children.iter().zip(&expect).any(|(c, e)| c.disk() != *e)
                {
                    return bad(n, "children are not the residue sub-disks");
                }
            }
            let mut below = Vec::new();
            n.walk(&mut below);
            let clash = match n.label {
                NodeLabel::Escape => below.iter().any(|m| m.label != NodeLabel::Escape),
                NodeLabel::TrappedQ2 | NodeLabel::Pcf => {
                    below.iter().any(|m| m.label == NodeLabel::Escape)
                }
                _ => false,
            };
            if clash {
                return bad(n, "escaping and bounded labels on one branch");
            }
        }
        Ok(())
    }

    /// Graphviz text: one node per disk, attributes `shape` and `label` only.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph {} {{\n", self.kind.tag());
        let nodes = self.nodes();
        let index: HashMap<*const TreeNode, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (*n as *const TreeNode, i))
            .collect();
        for (i, n) in nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "  n{i} [shape={}, label=\"{}\"];",
                n.label.dot_shape(),
                n.disk().canonical()
            );
        }
        for (i, n) in nodes.iter().enumerate() {
            for c in &n.children {
                let _ = writeln!(out, "  n{i} -> n{};", index[&(c as *const TreeNode)]);
            }
        }
        out.push_str("}\n");
        out
    }

    /// One indented line per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in self.nodes() {
            let indent = "  ".repeat((n.rexp - self.root.rexp).max(0) as usize);
            let _ = write!(out, "{indent}{} {}", n.disk().canonical(), n.label);
            if let Some(id) = &n.evidence_id {
                let _ = write!(out, " [{id}]");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug)]
struct NodeRecord {
    label: NodeLabel,
    evidence_id: Option<String>,
}

/// A tree together with the evidence its labels cite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub tree: ClassifiedTree,
    pub evidence: BTreeMap<String, Evidence>,
}

/// Classification cache, evidence store and trap library behind the trees.
///
/// A node's label depends only on its disk and the trap library, so records
/// are cached per disk and shared between trees and subtrees.
pub struct Atlas {
    evidence: EvidenceStore,
    opts: DiskOptions,
    cache: Mutex<HashMap<(TreeKind, Disk), NodeRecord>>,
    pcf: Mutex<HashMap<u32, Option<(Rational2, ValExponent)>>>,
    jobs: usize,
}

impl Default for Atlas {
    fn default() -> Self {
        Self::new()
    }
}

impl Atlas {
    pub fn new() -> Self {
        let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self::with_jobs(jobs)
    }

    pub fn with_jobs(jobs: usize) -> Self {
        Atlas {
            evidence: EvidenceStore::new(),
            opts: DiskOptions {
                boundary_depth: 0,
                orbit: OrbitOptions {
                    traps: Arc::new(TrapLibrary::seeded()),
                    ..OrbitOptions::default()
                },
                ..DiskOptions::default()
            },
            cache: Mutex::new(HashMap::new()),
            pcf: Mutex::new(HashMap::new()),
            jobs: jobs.max(1),
        }
    }

    /// An atlas whose orbit classifications use the given budget.
    pub fn with_budget(jobs: usize, max_iters: usize, precision: u32) -> Self {
        let mut atlas = Self::with_jobs(jobs);
        atlas.opts.orbit.max_iters = max_iters;
        atlas.opts.orbit.precision = precision;
        atlas
    }

    /// Build the tree and bundle the evidence it cites.
    pub fn document(&self, kind: TreeKind, depth: i64) -> Result<TreeDocument> {
        let tree = self.tree(kind, depth)?;
        let evidence = self.evidence.subset(tree.evidence_ids());
        Ok(TreeDocument { tree, evidence })
    }

    /// Process-wide atlas used by [`mandel_tree`] and [`julia_tree`].
    pub fn shared() -> &'static Atlas {
        static ATLAS: OnceLock<Atlas> = OnceLock::new();
        ATLAS.get_or_init(Atlas::new)
    }

    pub fn evidence(&self) -> &EvidenceStore {
        &self.evidence
    }

    pub fn traps(&self) -> &Arc<TrapLibrary> {
        self.opts.traps()
    }

    pub fn tree(&self, kind: TreeKind, depth: i64) -> Result<ClassifiedTree> {
        if depth < 1 {
            return Err(Error::Domain(format!(
                "tree depth must be at least 1, got {depth}"
            )));
        }
        self.subtree(kind, &kind.root(), depth)
    }

    /// The tree below `root` down to level `depth`, built one level at a time.
    pub fn subtree(&self, kind: TreeKind, root: &Disk, depth: i64) -> Result<ClassifiedTree> {
        if depth < root.rexp {
            return Err(Error::Domain(format!(
                "depth {depth} is above the root {root}"
            )));
        }
        struct Slot {
            disk: Disk,
            rec: NodeRecord,
            children: Vec<usize>,
        }
        let root_rec = self.records(kind, std::slice::from_ref(root)).remove(0);
        let mut arena = vec![Slot {
            disk: root.clone(),
            rec: root_rec,
            children: Vec::new(),
        }];
        let mut frontier = vec![0usize];
        for _ in root.rexp..depth {
            frontier.retain(|&i| !arena[i].rec.label.is_resolved());
            if frontier.is_empty() {
                break;
            }
            let disks: Vec<Disk> = frontier
                .iter()
                .flat_map(|&i| arena[i].disk.children())
                .collect();
            let recs = self.records(kind, &disks);
            let mut next = Vec::with_capacity(disks.len());
            for (j, (disk, rec)) in disks.into_iter().zip(recs).enumerate() {
                let idx = arena.len();
                arena[frontier[j / 2]].children.push(idx);
                arena.push(Slot {
                    disk,
                    rec,
                    children: Vec::new(),
                });
                next.push(idx);
            }
            frontier = next;
        }
        fn build(arena: &[Slot], i: usize) -> TreeNode {
            let s = &arena[i];
            TreeNode {
                center: s.disk.center.clone(),
                rexp: s.disk.rexp,
                label: s.rec.label,
                evidence_id: s.rec.evidence_id.clone(),
                children: s.children.iter().map(|&c| build(arena, c)).collect(),
            }
        }
        Ok(ClassifiedTree {
            kind,
            depth,
            root: build(&arena, 0),
        })
    }

    /// Label and evidence of a single disk.
    pub fn classify(&self, kind: TreeKind, d: &Disk) -> (NodeLabel, Option<String>) {
        let rec = self.records(kind, std::slice::from_ref(d)).remove(0);
        (rec.label, rec.evidence_id)
    }

    /// Records for `disks`, classifying missing ones in parallel. Every disk of
    /// one call sees the same frozen trap library; traps discovered meanwhile
    /// are published afterwards in input order, so results do not depend on
    /// scheduling.
    fn records(&self, kind: TreeKind, disks: &[Disk]) -> Vec<NodeRecord> {
        let mut out: Vec<Option<NodeRecord>> = {
            let cache = self.cache.lock().expect("cache lock poisoned");
            disks
                .iter()
                .map(|d| cache.get(&(kind, d.clone())).cloned())
                .collect()
        };
        let missing: Vec<usize> = (0..disks.len()).filter(|&i| out[i].is_none()).collect();
        if missing.is_empty() {
            return out.into_iter().map(|r| r.expect("filled")).collect();
        }
        let frozen = self.traps().snapshot();
        let work = |idx: &[usize]| {
            idx.iter()
                .map(|&i| {
                    let lib = Arc::new(TrapLibrary::from_certificates(frozen.clone()));
                    let rec = self.classify_fresh(kind, &disks[i], &lib);
                    let found = lib.snapshot().split_off(frozen.len());
                    (i, rec, found)
                })
                .collect::<Vec<_>>()
        };
        // one worker runs inline, which also keeps single-threaded targets such as wasm working
        let results: Vec<(
            usize,
            NodeRecord,
            Vec<Arc<crate::dynamics::TrapCertificate>>,
        )> = if self.jobs == 1 {
            work(&missing)
        } else {
            let chunk = missing.len().div_ceil(self.jobs);
            std::thread::scope(|s| {
                let handles: Vec<_> = missing
                    .chunks(chunk)
                    .map(|idx| s.spawn(move || work(idx)))
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("classification worker panicked"))
                    .collect()
            })
        };
        let mut cache = self.cache.lock().expect("cache lock poisoned");
        for (i, rec, found) in results {
            for trap in found {
                // already replayed inside the worker's library
                let _ = self.traps().publish((*trap).clone());
            }
            cache
                .entry((kind, disks[i].clone()))
                .or_insert_with(|| rec.clone());
            out[i] = Some(rec);
        }
        out.into_iter().map(|r| r.expect("filled")).collect()
    }

    fn classify_fresh(&self, kind: TreeKind, d: &Disk, lib: &Arc<TrapLibrary>) -> NodeRecord {
        if d.contains(&kind.distinguished()) {
            return self.boundary_record(kind);
        }
        if let Some(rec) = self.theorem_record(kind, d) {
            return rec;
        }
        let opts = DiskOptions {
            orbit: OrbitOptions {
                traps: lib.clone(),
                ..self.opts.orbit.clone()
            },
            ..self.opts.clone()
        };
        let class = match kind {
            TreeKind::Mandelbrot => classify_parameter_disk(d, &opts),
            TreeKind::Julia => classify_disk(&FamilyMember::new(Rational2::one()), d, &opts),
        };
        let key = d.canonical();
        match class {
            DiskClass::AllEscape { certificate } => {
                let id = format!("{}/escape/{key}", kind.tag());
                self.evidence.insert(&id, Evidence::Escape { certificate });
                return self.record(NodeLabel::Escape, id);
            }
            DiskClass::TrappedQ2 { certificate } => {
                if let Some(trap) = lib.get(&certificate.trap_id) {
                    let id = format!("{}/trap/{key}", kind.tag());
                    self.evidence.insert(
                        &id,
                        Evidence::Trap {
                            entry: certificate,
                            trap: (*trap).clone(),
                        },
                    );
                    return self.record(NodeLabel::TrappedQ2, id);
                }
            }
            DiskClass::Boundary { .. } | DiskClass::Unknown { .. } => {}
        }
        if kind == TreeKind::Mandelbrot {
            if Disk::new(Rational2::zero(), 1).contains_disk(d) {
                let id = format!("mandel/small-parameter/{key}");
                self.evidence
                    .insert(&id, Evidence::SmallParameter { disk: key });
                return self.record(NodeLabel::TrappedQ2, id);
            }
            if d.constant_val().is_some_and(|v| v < 0) {
                let id = format!("mandel/large-parameter/{key}");
                self.evidence
                    .insert(&id, Evidence::LargeParameter { disk: key });
                return self.record(NodeLabel::Escape, id);
            }
        }
        NodeRecord {
            label: NodeLabel::Unknown,
            evidence_id: None,
        }
    }

    fn record(&self, label: NodeLabel, id: String) -> NodeRecord {
        NodeRecord {
            label,
            evidence_id: Some(id),
        }
    }

    fn boundary_record(&self, kind: TreeKind) -> NodeRecord {
        let id = format!("{}/bounded-point", kind.tag());
        if !self.evidence.contains(&id) {
            // t = 1: critical orbit 1 -> -1/2 -> -1/2; z = -1/2 is fixed by f_1
            let z = match kind {
                TreeKind::Mandelbrot => Rational2::one(),
                TreeKind::Julia => q(-1, 2),
            };
            let report =
                classify_point_orbit(&FamilyMember::new(Rational2::one()), &z, &self.opts.orbit);
            self.evidence.insert(&id, Evidence::BoundedPoint { report });
        }
        self.record(NodeLabel::Boundary, id)
    }

    fn trace_record(
        &self,
        label: NodeLabel,
        id: String,
        run: impl FnOnce() -> Result<VerifierTrace>,
    ) -> Option<NodeRecord> {
        if !self.evidence.contains(&id) {
            let trace = run().ok()?;
            self.evidence.insert(&id, Evidence::Trace { trace });
        }
        Some(self.record(label, id))
    }

    /// Match the closed-form disk families of the theorems.
    fn theorem_record(&self, kind: TreeKind, d: &Disk) -> Option<NodeRecord> {
        let r = d.rexp;
        match kind {
            TreeKind::Mandelbrot => {
                if r >= 2 && r % 2 == 0 {
                    let n = (r / 2) as u32;
                    if *d == mandel_escape_disk(n) {
                        return self.trace_record(
                            NodeLabel::Escape,
                            format!("thm-unbdd/n={n}"),
                            || verify_thm_unbdd(n),
                        );
                    }
                }
                if r >= 9 && r % 2 == 1 {
                    let n = ((r - 3) / 2) as u32;
                    if *d == mandel_trap_disk(5, n) || *d == mandel_trap_disk(7, n) {
                        return self.trace_record(
                            NodeLabel::TrappedQ2,
                            format!("thm-q2bdd/n={n}"),
                            || verify_thm_q2bdd(n),
                        );
                    }
                }
                let n = (3u32..)
                    .take_while(|&n| pcf_radius_exponent(n) <= r)
                    .last()?;
                if pcf_radius_exponent(n) == r && self.pcf_center(n).is_some_and(|t| d.contains(&t))
                {
                    return self.trace_record(NodeLabel::Pcf, format!("thm-bdd/n={n}"), || {
                        verify_thm_bdd(n, THM_BDD_DEFAULT_PRECISION)
                    });
                }
                None
            }
            TreeKind::Julia => {
                if r >= 1 && r % 2 == 1 {
                    let n = ((r - 1) / 2) as u32;
                    if *d == julia_escape_disk(n) {
                        return self.trace_record(
                            NodeLabel::Escape,
                            format!("prop-julia-unbounded/n={n}"),
                            || verify_prop_julia(JuliaFamily::Unbounded, n),
                        );
                    }
                }
                if r >= 4 && r % 2 == 0 {
                    let n = ((r - 4) / 2) as u32;
                    if *d == julia_trap_disk(5, n) || *d == julia_trap_disk(7, n) {
                        return self.trace_record(
                            NodeLabel::TrappedQ2,
                            format!("prop-julia-bounded/n={n}"),
                            || verify_prop_julia(JuliaFamily::Bounded, n),
                        );
                    }
                }
                None
            }
        }
    }

    /// `t_n` to at least `ceil(8n/3) + 2` bits, computed once.
    fn pcf_center(&self, n: u32) -> Option<Rational2> {
        let mut pcf = self.pcf.lock().expect("pcf lock poisoned");
        let entry = pcf.entry(n).or_insert_with(|| {
            pcf_parameter(n as usize, THM_BDD_DEFAULT_PRECISION)
                .ok()
                .map(|p| (p.t_approx, p.t_abs_prec))
        });
        entry
            .as_ref()
            .filter(|(_, prec)| prec.at_least(pcf_radius_exponent(n)))
            .map(|(t, _)| t.clone())
    }
}

/// Parameter disks around `t = 1` down to radius `2^-depth`.
pub fn mandel_tree(depth: i64) -> Result<ClassifiedTree> {
    Atlas::shared().tree(TreeKind::Mandelbrot, depth)
}

/// Dynamical disks of `f_1` around `z = -1/2` down to radius `2^-depth`.
pub fn julia_tree(depth: i64) -> Result<ClassifiedTree> {
    Atlas::shared().tree(TreeKind::Julia, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Disk {
        s.parse().unwrap()
    }

    #[test]
    fn spec_examples() {
        let atlas = Atlas::new();
        let m = atlas.tree(TreeKind::Mandelbrot, 4).unwrap();
        assert_eq!(m.find(&d("3:2")).unwrap().label, NodeLabel::Escape);
        let j = atlas.tree(TreeKind::Julia, 5).unwrap();
        assert_eq!(j.find(&d("19/2:4")).unwrap().label, NodeLabel::TrappedQ2);
        let m = atlas.tree(TreeKind::Mandelbrot, 2).unwrap();
        for r in 0..=2 {
            assert_eq!(
                m.find(&Disk::new(Rational2::one(), r)).unwrap().label,
                NodeLabel::Boundary
            );
        }
        for t in [&m, &j] {
            t.check_invariants().unwrap();
        }
        assert!(atlas.tree(TreeKind::Julia, 0).is_err());
    }

    #[test]
    fn evidence_replays() {
        let atlas = Atlas::new();
        let j = atlas.tree(TreeKind::Julia, 8).unwrap();
        for id in j.evidence_ids() {
            assert!(atlas.evidence().get(id).unwrap().replay(), "{id}");
        }
    }

    #[test]
    fn labels_do_not_depend_on_parallelism() {
        let a = Atlas::with_jobs(1).tree(TreeKind::Mandelbrot, 9).unwrap();
        let b = Atlas::with_jobs(4).tree(TreeKind::Mandelbrot, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dot_shapes() {
        let atlas = Atlas::new();
        let dot = atlas.tree(TreeKind::Julia, 4).unwrap().to_dot();
        assert!(dot.starts_with("digraph julia {"));
        assert!(dot.contains("shape=diamond, label=\"3/2:1\""));
        assert!(dot.contains("shape=oval, label=\"1/2:1\""));
        assert!(dot.contains("shape=box, label=\"19/2:4\""));
    }
}
