//! Serializable report types shared by the sweeps and the CLI.

use serde::{Deserialize, Serialize};

use crate::blocks::{Composition, JordanType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn failed(self) -> bool {
        self == Status::Fail
    }
}

/// One checked identity on one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: String,
    pub k: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<JordanType>,
    pub block: Composition,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl RelationReport {
    pub fn new(relation: impl Into<String>, block: &Composition, counterexample: Option<String>) -> Self {
        RelationReport {
            relation: relation.into(),
            k: block.k(),
            n: block.n(),
            lambda: None,
            block: block.clone(),
            status: Status::from_ok(counterexample.is_none()),
            counterexample,
        }
    }

    pub fn skipped(relation: impl Into<String>, block: &Composition) -> Self {
        RelationReport { status: Status::Skipped, ..Self::new(relation, block, None) }
    }

    pub fn with_lambda(mut self, lambda: &JordanType) -> Self {
        self.lambda = Some(lambda.clone());
        self
    }
}

/// Row of the block table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRow {
    pub a: Composition,
    pub simples: usize,
    pub weight_dim: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTable {
    pub n: usize,
    pub k: usize,
    pub lambda: JordanType,
    pub blocks: Vec<BlockRow>,
}

impl BlockTable {
    pub fn all_match(&self) -> bool {
        self.blocks.iter().all(|r| r.simples as u64 == r.weight_dim)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedStatus {
    pub name: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DahaReport {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    /// The uniform sign in `x_{j+1} = t_j x_j t_j + ε t_j`, if one exists.
    pub epsilon: Option<i8>,
    pub relations: Vec<NamedStatus>,
}

impl DahaReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| !r.status.failed())
    }
}

/// Convention choices for the localization model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Convention {
    /// Sign of the q-power realizing the grading shift `{1}`.
    pub sigma: i8,
    /// `+1`: `t_{m'}/t_m` is a tangent weight when `m` sits in an earlier step than `m'`.
    pub orientation: i8,
    /// Weight of the fibre dilation, in powers of `q^σ`.
    pub dilation: i8,
    /// Sign attached to each unit of grading shift.
    pub shift_sign: i8,
}

impl Convention {
    /// The convention under which every relation holds.
    pub const STANDARD: Convention = Convention { sigma: 1, orientation: 1, dilation: 2, shift_sign: -1 };

    /// All 16 candidates, in a fixed order.
    pub fn candidates() -> Vec<Convention> {
        let mut out = Vec::new();
        for sigma in [1, -1] {
            for orientation in [1, -1] {
                for dilation in [1, 2] {
                    for shift_sign in [1, -1] {
                        out.push(Convention { sigma, orientation, dilation, shift_sign });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub f1: Vec<u8>,
    pub f2: Vec<u8>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelDump {
    pub src: Composition,
    pub dst: Composition,
    pub variant: String,
    pub kind: String,
    pub node: usize,
    pub convention: Convention,
    pub entries: Vec<KernelEntry>,
}

/// Outcome of one convention on the search instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionTrial {
    pub convention: Convention,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelsReport {
    pub n: usize,
    pub k: usize,
    pub convention: Option<Convention>,
    pub search: Vec<ConventionTrial>,
    pub relations: Vec<RelationReport>,
}

impl KernelsReport {
    pub fn passed(&self) -> bool {
        self.convention.is_some() && self.relations.iter().all(|r| !r.status.failed())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationsReport {
    pub n: usize,
    pub k: usize,
    pub relations: Vec<RelationReport>,
}

impl RelationsReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| !r.status.failed())
    }
}
