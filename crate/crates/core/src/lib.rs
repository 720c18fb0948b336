//! Entropy analysis of inter-agent cash flows.
//!
//! A period's cash flows between `N` agents form a non-negative matrix;
//! normalizing it by the total turns every flow into the probability that a
//! random currency unit sits in that flow. This crate computes the Shannon
//! entropy of that distribution and decomposes it hierarchically:
//!
//! * savings vs inter-agent flows,
//! * origin and destination marginals with per-agent conditional entropies,
//! * the sum and difference identities tying the two expansions together,
//! * the inflow-minus-outflow entropy differentials, whose weighted sum
//!   vanishes for flow-balanced economies,
//! * arbitrary group (sector) trees, yielding nested inequality measures
//!   including the Theil index.
//!
//! [`steady_state`] holds flow-balance checks, exact two- and three-agent
//! economy constructors, and a seeded generator of balanced test economies;
//! [`sweep`] evaluates decomposition scalars over parameter grids; [`io`]
//! reads economy files and writes reports and sweep data deterministically.

pub mod decomposition;
pub mod entropy;
pub mod flow;
pub mod io;
pub mod steady_state;
pub mod sweep;

#[cfg(test)]
mod test_support;

pub use decomposition::{
    differential_balance, full_report, group_decomposition, identity_residuals, AgentEntropy,
    AgentEntropyProfile, DecompositionError, EntropyReport, GroupDecomposition, GroupNode,
    GroupNodeStats, GroupTree, Side,
};
pub use entropy::{
    entropy, entropy_unnormalized, grouped_entropy_decomposition, EntropyError,
    GroupedDistribution, GroupedEntropy, ProbVector, WeightVector,
};
pub use flow::{
    ConditionalFlows, FlowError, FlowMarginals, FlowMatrix, ProbabilityMatrix, SavingsSplit,
};
pub use io::{
    load_economy, write_economy, write_report, write_sweep, AgentSpec, EconomyFile, EconomyFormat,
    IoFormatError,
};
pub use steady_state::{
    build_three_agent, build_two_agent, check_stationarity, random_stationary, StationarityCheck,
    SteadyStateError, ThreeAgentParams, TwoAgentParams,
};
pub use sweep::{three_agent_sweep, two_agent_sweep, SweepError, SweepGrid, TwoAgentQuantity};
