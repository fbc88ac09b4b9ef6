use thiserror::Error;

use crate::network::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid network: {}", fmt_violations(.0))]
    InvalidNetwork(Vec<Violation>),

    #[error("more than {cap} routes")]
    RouteExplosion { cap: usize },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("demand {demand} exceeds network capacity {capacity}")]
    InfeasibleDemand { demand: u64, capacity: u64 },

    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),

    #[error("invalid route preference: {0}")]
    InvalidPreference(String),

    #[error("player ({generation},{index}) has not arrived by stage {cutoff}")]
    IncompleteHorizon { generation: u64, index: u64, cutoff: u64 },

    #[error("stage {stage} is incomplete or outside the simulated window")]
    IncompleteWindow { stage: u64 },

    #[error("horizon {horizon} is shorter than the inflow period {period}")]
    HorizonTooSmall { horizon: u64, period: u64 },

    #[error("no repeated state within {horizon} stages (largest pending schedule: {max_pending})")]
    NoCycleWithinHorizon { horizon: u64, max_pending: usize },

    #[error("network is not parallel")]
    NotParallel,

    #[error("network is not a chain of parallel modules")]
    NotChainOfParallel,

    #[error("inflow {demand} differs from network capacity {capacity}")]
    NotAtCapacity { demand: u64, capacity: u64 },

    #[error("state space exceeds {cap} states")]
    StateExplosion { cap: usize },

    #[error("periodic inflow implies capacity {implied}, network has {capacity}")]
    CapacityMismatch { implied: String, capacity: u64 },

    #[error("periodic inflow sums to {sum}, not a multiple of its period {period}")]
    NonIntegralRate { sum: u64, period: u64 },

    #[error("ratio is unbounded: optimum is zero but {0} is positive")]
    UnboundedRatio(String),

    #[error("search budget of {budget} candidate removals exceeded")]
    SearchBudgetExceeded { budget: usize },

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
