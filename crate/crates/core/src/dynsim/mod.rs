//! Deterministic stage-by-stage simulation of players, transit and point queues.

mod profile;
mod simulate;
mod split;

pub use profile::{InflowProfile, PlayerId, StrategyProfile};
pub use simulate::{
    average_latency, default_cutoff, simulate, simulate_with_cutoff, trajectory_csv, Leg, PlayerOutcome, StageTotals,
    Trajectory,
};
pub use split::{split_capacities, split_profile, SplitMap};
