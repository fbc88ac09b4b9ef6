//! Greedy equilibrium construction, equilibrium checks and long-run values.

mod greedy;
pub mod policy;
mod steady;
mod verify;

pub use greedy::{greedy_ufr, Greedy};
pub use policy::{
    candidate_policies, registered_policies, BoundPreference, NamedPolicy, PhasePreference, RoutePreference,
    TieBreakPolicy,
};
pub use steady::{detect_steady_state, SteadyState};
pub use verify::{
    earliest_arrival_table, verify_nash, verify_nash_with, verify_ufr, verify_ufr_with, EarliestArrivalTable,
    NashVerdict, UfrVerdict, VerifyOptions,
};

use crate::dynsim::InflowProfile;
use crate::error::Result;
use crate::network::Network;
use crate::rational::Q;

pub const DEFAULT_MAX_HORIZON: u64 = 2000;

/// Long-run latency of one constructed equilibrium and the policy behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumValue {
    pub value: Q,
    pub policy: String,
    pub steady: SteadyState,
}

fn evaluate(net: &Network, inflow: &InflowProfile, max_horizon: u64, cands: &[NamedPolicy]) -> Result<Vec<EquilibriumValue>> {
    cands
        .iter()
        .map(|c| {
            let steady = detect_steady_state(net, inflow, &c.policy, max_horizon)?;
            Ok(EquilibriumValue { value: steady.cycle_average, policy: c.label.clone(), steady })
        })
        .collect()
}

/// Largest long-run latency among `cands`; the first candidate wins ties.
pub fn weq_over(net: &Network, inflow: &InflowProfile, max_horizon: u64, cands: &[NamedPolicy]) -> Result<EquilibriumValue> {
    let vals = evaluate(net, inflow, max_horizon, cands)?;
    let best = vals.iter().map(|v| v.value).max().expect("at least one candidate");
    Ok(vals.into_iter().find(|v| v.value == best).expect("max exists"))
}

/// Smallest long-run latency among `cands`; the first candidate wins ties.
pub fn beq_over(net: &Network, inflow: &InflowProfile, max_horizon: u64, cands: &[NamedPolicy]) -> Result<EquilibriumValue> {
    let vals = evaluate(net, inflow, max_horizon, cands)?;
    let best = vals.iter().map(|v| v.value).min().expect("at least one candidate");
    Ok(vals.into_iter().find(|v| v.value == best).expect("min exists"))
}

/// Worst constructed equilibrium over WorstCase, BestCase and the registered
/// preferences for `net`. A lower bound on the true worst equilibrium.
pub fn weq(net: &Network, inflow: &InflowProfile, max_horizon: u64) -> Result<EquilibriumValue> {
    weq_over(net, inflow, max_horizon, &candidate_policies(net))
}

/// Best constructed equilibrium over the same candidates. An upper bound on
/// the true best equilibrium.
pub fn beq(net: &Network, inflow: &InflowProfile, max_horizon: u64) -> Result<EquilibriumValue> {
    beq_over(net, inflow, max_horizon, &candidate_policies(net))
}
