use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("unknown node {node} (graph has {node_count} nodes)")]
    UnknownNode { node: usize, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("probability out of range: {0}")]
    ProbabilityOutOfRange(f64),
    #[error("importance out of range: {0}")]
    ImportanceOutOfRange(f64),
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: usize, dst: usize },
    #[error("empty seed set")]
    EmptySeedSet,
    #[error("lambda out of range: {0}")]
    LambdaOutOfRange(f64),
    #[error("edge index {index} out of range (graph has {edge_count} edges)")]
    EdgeIndexOutOfRange { index: usize, edge_count: usize },
    #[error("edge index {0} listed twice")]
    RepeatedEdgeIndex(usize),
    #[error("n_seeds > n_nodes ({n_seeds} > {n_nodes})")]
    TooManySeeds { n_seeds: usize, n_nodes: usize },
    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("instance too large for exact oracle ({edges} edges, cap {cap})")]
    TooLargeForExact { edges: usize, cap: usize },
    #[error("{needed} qubits exceed the simulator cap of {cap}; use analytic mode")]
    TooManyQubits { needed: usize, cap: usize },
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} used twice in one operation")]
    RepeatedQubit(usize),
    #[error("amplitude vector of length {0} is not a power of two")]
    BadAmplitudeLength(usize),
    #[error("state is not normalised (norm^2 = {0})")]
    NotNormalised(f64),
    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("at least one evaluation qubit is required")]
    NoEvaluationQubits,
    #[error("search space must contain at least one item")]
    EmptySearchSpace,
    #[error("estimating candidate edge {candidate}: {source}")]
    Estimator { candidate: usize, source: Box<Error> },
}
