//! Theorem-level verifiers and the classification trees around `t = 1`
//! (parameter space) and `z = -1/2` (dynamical space of `f_1`).

mod evidence;
mod trace;
mod tree;
mod verify;

pub use evidence::{Evidence, EvidenceStore};
pub use trace::{Claim, TraceStep, VerifierTrace};
pub use tree::{
    julia_tree, mandel_tree, Atlas, ClassifiedTree, LabelPattern, NodeLabel, TreeDocument,
    TreeKind, TreeNode,
};
pub use verify::{
    julia_escape_disk, julia_trap_disk, mandel_escape_disk, mandel_trap_disk, pcf_radius_exponent,
    trap_exponent, verify_by_id, verify_prop_julia, verify_thm_bdd, verify_thm_q2bdd,
    verify_thm_unbdd, JuliaFamily, PROP_JULIA_BOUNDED, PROP_JULIA_UNBOUNDED, THM_BDD,
    THM_BDD_DEFAULT_PRECISION, THM_Q2BDD, THM_UNBDD,
};
