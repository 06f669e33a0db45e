use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{Disk, Verdict};

/// What a single step establishes. Quantities are human-readable names such
/// as `f_t^2(1)`; the disks and exponents are the checked content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// Every value of `quantity` lies in `disk`, i.e. is congruent to its
    /// center modulo `2^rexp`.
    Contains { quantity: String, disk: Disk },
    /// The map sends every point of `source` into `target`.
    Maps {
        map: String,
        source: Disk,
        target: Disk,
    },
    /// `|quantity| = 2^log2` for every value of the quantity.
    AbsEquals { quantity: String, log2: i64 },
    /// `|quantity| <= 2^log2` for every value of the quantity.
    AbsAtMost { quantity: String, log2: i64 },
    /// `disk` is one of the disks of a replayed trap certificate.
    Trapped { disk: Disk, trap_id: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// The library operation whose output is the claim.
    pub operation: String,
    pub inputs: Vec<String>,
    pub claim: Claim,
}

/// Audit trail of one theorem instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierTrace {
    pub theorem_id: String,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    /// Named disks of the instance, e.g. `T_n` or `D_a,n`.
    pub disks: BTreeMap<String, Disk>,
    pub steps: Vec<TraceStep>,
    /// Numeric outcomes such as the escape iterate or certified exponents.
    pub facts: BTreeMap<String, i64>,
    pub verdict: Verdict,
}

impl VerifierTrace {
    pub(crate) fn new(theorem_id: &str, n: u32) -> Self {
        VerifierTrace {
            theorem_id: theorem_id.to_string(),
            n,
            precision: None,
            disks: BTreeMap::new(),
            steps: Vec::new(),
            facts: BTreeMap::new(),
            verdict: Verdict::Certified,
        }
    }

    pub(crate) fn push(&mut self, operation: &str, inputs: Vec<String>, claim: Claim) {
        self.steps.push(TraceStep {
            operation: operation.to_string(),
            inputs,
            claim,
        });
    }

    pub fn fact(&self, key: &str) -> Option<i64> {
        self.facts.get(key).copied()
    }

    /// Disks claimed to contain `quantity`, in step order.
    pub fn containments<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a Disk> + 'a {
        self.steps.iter().filter_map(move |s| match &s.claim {
            Claim::Contains { quantity: q, disk } if q == quantity => Some(disk),
            _ => None,
        })
    }

    /// `log2 |quantity|` from the first `AbsEquals` claim about it.
    pub fn abs_log2(&self, quantity: &str) -> Option<i64> {
        self.steps.iter().find_map(|s| match &s.claim {
            Claim::AbsEquals { quantity: q, log2 } if q == quantity => Some(*log2),
            _ => None,
        })
    }

    /// Re-run the verifier for this instance and compare step by step.
    pub fn replay(&self) -> bool {
        super::verify::rerun(self).is_ok_and(|fresh| fresh == *self)
    }
}
