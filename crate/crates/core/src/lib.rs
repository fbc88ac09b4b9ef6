//! Discrete-time atomic dynamic congestion games: networks with transit
//! times and capacities, deterministic point queues with priorities,
//! equilibrium construction, social optima and efficiency measures.

pub mod classify;
pub mod cut;
pub mod dynsim;
pub mod equilib;
pub mod error;
pub mod forms;
pub mod generators;
pub mod metrics;
pub mod network;
pub mod optflow;
pub mod rational;
pub mod scenario;
pub mod seasonal;

pub use error::{Error, Result};
