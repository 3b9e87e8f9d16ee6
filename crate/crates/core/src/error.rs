use thiserror::Error;

use crate::space::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("node `{0}` declared more than once")]
    DuplicateNode(NodeId),
    #[error("node `{0}` has an empty value set")]
    EmptySpace(NodeId),
    #[error("node `{node}` lists value `{value}` more than once")]
    DuplicateValue { node: NodeId, value: String },
    #[error("`{value}` is not a value of node `{node}`")]
    UnknownValue { node: NodeId, value: String },
    #[error("value index {index} out of range for node `{node}`")]
    ValueOutOfRange { node: NodeId, index: usize },
    #[error("scope {inner} is not contained in {outer}")]
    ScopeNotContained { inner: String, outer: String },
    #[error("scopes {left} and {right} overlap")]
    ScopeOverlap { left: String, right: String },
    #[error("gamble table has {actual} entries but its scope needs {expected}")]
    TableLength { expected: usize, actual: usize },
    #[error("expected a gamble on {expected}, got one on {actual}")]
    SpaceMismatch { expected: String, actual: String },
    #[error("the zero gamble is never desirable; use the zero-vector diagnostics instead")]
    ZeroGamble,
    #[error("zero target vector: decide it with contains_zero")]
    ZeroTarget,
    #[error("row {row} has {actual} coefficients, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, actual: usize },
    #[error("the assessment is incoherent, so the prevision is unbounded")]
    IncoherentModel,
    #[error("edge {0} -> {1} listed twice")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop on `{0}`")]
    SelfLoop(NodeId),
    #[error("graph has a cycle: {}", fmt_path(.0))]
    Cycle(Vec<NodeId>),
    #[error("no local model for `{node}` given {given}")]
    MissingLocalModel { node: NodeId, given: String },
    #[error("local model for `{node}` given {given} supplied twice")]
    DuplicateLocalModel { node: NodeId, given: String },
    #[error("local model for `{node}` given {given} is incoherent")]
    IncoherentLocalModel { node: NodeId, given: String },
    #[error("local model for `{node}` given {given} contains the zero gamble")]
    ZeroAssessment { node: NodeId, given: String },
    #[error("joint assessment would have {count} generators, above the cap of {cap}")]
    CapExceeded { count: u128, cap: usize },
    #[error("nodes {nodes:?} are not non-parent non-descendants of `{node}`")]
    NotIrrelevant { node: NodeId, nodes: Vec<NodeId> },
    #[error("elimination instance too large: dimension {dim}, {rays} rays")]
    SizeGuard { dim: usize, rays: usize },
    #[error("mass function for `{node}` given {given} is invalid: {reason}")]
    InvalidPmf { node: NodeId, given: String, reason: String },
    #[error("local gamble {index} of `{node}` given {given} has nonpositive expectation under the witness")]
    WitnessMismatch { node: NodeId, given: String, index: usize },
    #[error("generator index {0} out of range")]
    GeneratorIndex(usize),
}

fn fmt_path(path: &[NodeId]) -> String {
    path.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(" -> ")
}
