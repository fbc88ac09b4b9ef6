use std::collections::{BTreeMap, HashMap};

use super::greedy::Greedy;
use super::policy::TieBreakPolicy;
use crate::dynsim::InflowProfile;
use crate::error::{Error, Result};
use crate::network::{Network, Route};
use crate::rational::{frac, Q};

/// Periodic regime reached by the greedy construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteadyState {
    /// First generation of the repeating cycle.
    pub onset: u64,
    pub period: u64,
    /// Total latency of generations `onset..onset+period`.
    pub cycle_latencies: Vec<u64>,
    /// Mean of `cycle_latencies`: the long-run average latency.
    pub cycle_average: Q,
    /// Route usage of each generation in the cycle.
    pub cycle_route_counts: Vec<BTreeMap<Route, u64>>,
    /// Latencies of every generation up to the end of the first cycle.
    pub latencies: Vec<u64>,
}

/// Runs the greedy construction until the pending schedule, the inflow
/// phase and the policy phase repeat.
pub fn detect_steady_state(
    net: &Network,
    inflow: &InflowProfile,
    policy: &TieBreakPolicy,
    max_horizon: u64,
) -> Result<SteadyState> {
    let mut g = Greedy::new(net, inflow, policy)?;
    let mut seen = HashMap::new();
    let mut max_pending = 0;
    loop {
        let t = g.next_generation();
        let key = g.state_key();
        max_pending = max_pending.max(g.pending());
        if let Some(&t0) = seen.get(&key) {
            let lat = g.latencies();
            let cycle: Vec<u64> = lat[(t0 - 1) as usize..(t - 1) as usize].to_vec();
            let period = t - t0;
            return Ok(SteadyState {
                onset: t0,
                period,
                cycle_average: frac(cycle.iter().sum(), period),
                cycle_latencies: cycle,
                cycle_route_counts: g.route_counts()[(t0 - 1) as usize..(t - 1) as usize].to_vec(),
                latencies: lat.to_vec(),
            });
        }
        if t > max_horizon {
            return Err(Error::NoCycleWithinHorizon { horizon: max_horizon, max_pending });
        }
        seen.insert(key, t);
        g.step();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig2_periodic_preference, gen_example, gen_pigou, Example};
    use crate::rational::q;

    #[test]
    fn pigou_cycle() {
        let net = gen_pigou(2, 1).unwrap();
        let s = detect_steady_state(&net, &InflowProfile::Uniform(3), &TieBreakPolicy::WorstCase, 200).unwrap();
        assert_eq!(s.cycle_average, q(6));
        assert_eq!(s.period, 1);
    }

    #[test]
    fn fig2_periodic() {
        let net = gen_example(Example::Fig2);
        let pol = TieBreakPolicy::Explicit(fig2_periodic_preference());
        let s = detect_steady_state(&net, &InflowProfile::Uniform(2), &pol, 200).unwrap();
        assert_eq!(s.period, 2);
        assert_eq!(s.cycle_average, q(6));
    }

    #[test]
    fn overload_has_no_cycle() {
        let net = gen_example(Example::SeasonalTwoEdge);
        let r = detect_steady_state(&net, &InflowProfile::Uniform(3), &TieBreakPolicy::WorstCase, 50);
        assert!(matches!(r, Err(Error::NoCycleWithinHorizon { horizon: 50, .. })));
    }

    #[test]
    fn periodic_inflow_cycle_is_multiple_of_period() {
        let net = gen_example(Example::SeasonalTwoEdge);
        let s = detect_steady_state(&net, &InflowProfile::Periodic(vec![4, 0]), &TieBreakPolicy::WorstCase, 200).unwrap();
        assert_eq!(s.period % 2, 0);
    }
}
