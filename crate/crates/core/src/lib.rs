//! Exact, non-collapsing measurement simulator for small GHZ-type experiments.
//!
//! Every measurement splits a branch into weighted sub-branches instead of
//! sampling an outcome, so a scenario run yields the complete set of worlds
//! together with their Born weights. Alongside the simulator sit two classical
//! oracles: an exhaustive search over local hidden-variable assignments and a
//! symbolic parity certificate for the GHZ constraint equations.
//!
//! Module map:
//!
//! * [`quantum`] dense state vectors, basis projectors, partial trace.
//! * [`scenario`] declarative measurement programs.
//! * [`branching`] world splitting, world sets and local world projections.
//! * [`ghz`] the canonical experiments, constraint equations and EPR predictions.
//! * [`lhv`] local hidden-variable enumeration and the parity certificate.

pub mod branching;
pub mod ghz;
pub mod lhv;
pub mod quantum;
pub mod scenario;

pub use branching::{
    joint_vs_product_count, local_worlds, nonselective_reduced_state, run_scenario, split, Branch,
    LocalRecord, LocalWorldSet, OutcomeRecord, WorldSet, PRUNE_THRESHOLD,
};
pub use quantum::{
    basis_projector, Amplitude, Basis, DensityMatrix, Outcome, Projector, StateVector,
    DEFAULT_MAX_QUBITS, TOLERANCE,
};
pub use scenario::{BasisRule, MeasurementStep, Observer, Scenario, Slot};

/// Errors raised by the simulator and scenario machinery.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("capacity exceeded: {requested} qubits requested, maximum is {max}")]
    Capacity { requested: usize, max: usize },
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("scenario definition error: {0}")]
    ScenarioDefinition(String),
    #[error("incomplete world: {0}")]
    IncompleteWorld(String),
}

pub type Result<T> = std::result::Result<T, Error>;
