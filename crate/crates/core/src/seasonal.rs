//! Periodic inflows: distance to the uniform inflow and seasonal costs on
//! parallel networks.

use std::collections::{HashMap, VecDeque};

use crate::dynsim::{InflowProfile, StrategyProfile, Trajectory};
use crate::equilib::{detect_steady_state, TieBreakPolicy};
use crate::error::{Error, Result};
use crate::forms::ParallelProfile;
use crate::network::{Network, Route};
use crate::rational::{frac, q, Q};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Departures per stage over one period, `values[k]` at stages `k+1, k+1+K, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicInflow {
    values: Vec<u64>,
}

impl PeriodicInflow {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidProfile("periodic inflow needs at least one slot".into()));
        }
        Ok(PeriodicInflow { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn period(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn rate(&self) -> Q {
        frac(self.values.iter().sum(), self.period())
    }

    /// The per-stage rate, when it is an integer.
    pub fn gamma(&self) -> Result<u64> {
        let sum: u64 = self.values.iter().sum();
        if !sum.is_multiple_of(self.period()) {
            return Err(Error::NonIntegralRate { sum, period: self.period() });
        }
        Ok(sum / self.period())
    }

    pub fn is_uniform(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    pub fn to_inflow(&self) -> InflowProfile {
        if self.values.len() == 1 {
            InflowProfile::Uniform(self.values[0])
        } else {
            InflowProfile::Periodic(self.values.clone())
        }
    }
}

/// Vectors reachable by moving one unit from an over-full slot to the next
/// slot (cyclically), in slot order.
pub fn elementary_successors(d: &PeriodicInflow) -> Result<Vec<PeriodicInflow>> {
    let gamma = d.gamma()?;
    let k = d.values.len();
    let mut out = Vec::new();
    for t in 0..k {
        if d.values[t] > gamma {
            let mut v = d.values.clone();
            v[t] -= 1;
            v[(t + 1) % k] += 1;
            out.push(PeriodicInflow { values: v });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distance {
    pub distance: u64,
    /// One shortest sequence of vectors, starting at the input and ending uniform.
    pub path: Vec<PeriodicInflow>,
}

pub fn distance_to_uniform(d: &PeriodicInflow) -> Result<Distance> {
    distance_to_uniform_capped(d, DEFAULT_STATE_CAP)
}

/// Breadth-first search in the elementary-operation graph.
pub fn distance_to_uniform_capped(d: &PeriodicInflow, cap: usize) -> Result<Distance> {
    d.gamma()?;
    let mut parent: HashMap<PeriodicInflow, Option<PeriodicInflow>> = HashMap::new();
    parent.insert(d.clone(), None);
    let mut queue = VecDeque::from([d.clone()]);
    while let Some(cur) = queue.pop_front() {
        if cur.is_uniform() {
            let mut path = vec![cur.clone()];
            let mut at = cur;
            while let Some(Some(p)) = parent.get(&at) {
                path.push(p.clone());
                at = p.clone();
            }
            path.reverse();
            return Ok(Distance { distance: path.len() as u64 - 1, path });
        }
        for next in elementary_successors(&cur)? {
            if !parent.contains_key(&next) {
                if parent.len() >= cap {
                    return Err(Error::StateExplosion { cap });
                }
                parent.insert(next.clone(), Some(cur.clone()));
                queue.push_back(next);
            }
        }
    }
    unreachable!("every non-uniform vector has a successor and the sum is preserved")
}

fn check_parallel(net: &Network, d: &PeriodicInflow) -> Result<ParallelProfile> {
    let p = ParallelProfile::new(net, 0)?;
    let capacity: u64 = p.order.iter().map(|&e| net.edge(e).capacity).sum();
    if d.rate() != q(capacity) {
        return Err(Error::CapacityMismatch { implied: d.rate().to_string(), capacity });
    }
    Ok(p)
}

/// Optimal total latency per period: `K * sum(gamma_e * tau_e) + D`.
pub fn seasonal_parallel_opt(net: &Network, d: &PeriodicInflow) -> Result<Q> {
    let p = check_parallel(net, d)?;
    let base: u64 = p.order.iter().map(|&e| net.edge(e).capacity * net.edge(e).transit).sum();
    Ok(q(d.period() * base + distance_to_uniform(d)?.distance))
}

/// Worst equilibrium total latency per period: `K * gamma * max tau + D`.
pub fn seasonal_parallel_weq(net: &Network, d: &PeriodicInflow) -> Result<Q> {
    let p = check_parallel(net, d)?;
    let gamma = d.gamma()?;
    let slow = p.order.iter().map(|&e| net.edge(e).transit).max().unwrap_or(0);
    Ok(q(d.period() * gamma * slow + distance_to_uniform(d)?.distance))
}

/// Planner schedule on a parallel network: players are released first come
/// first served, at most the network capacity per stage, and each stage's
/// releases fill the edges fastest first. Nobody waits longer than the
/// release delay, which no schedule can avoid.
pub fn planner_profile(net: &Network, inflow: &InflowProfile, horizon: u64) -> Result<StrategyProfile> {
    let p = ParallelProfile::new(net, 0)?;
    let slots: Vec<usize> = p
        .order
        .iter()
        .flat_map(|&e| std::iter::repeat_n(e, net.edge(e).capacity as usize))
        .collect();
    let gamma = slots.len() as u64;
    let mut routes: Vec<Vec<Route>> = Vec::new();
    let mut backlog: VecDeque<(usize, usize)> = VecDeque::new();
    for t in 1..=horizon {
        routes.push(vec![Route(Vec::new()); inflow.at(t) as usize]);
        for i in 0..inflow.at(t) as usize {
            backlog.push_back((t as usize - 1, i));
        }
        let served = gamma.min(backlog.len() as u64) as usize;
        for (&e, (g, i)) in slots.iter().zip(backlog.drain(..served)) {
            routes[g][i] = Route(vec![e]);
        }
    }
    // Players still waiting at the horizon take the remaining release slots in order.
    let mut slot = 0;
    while let Some((g, i)) = backlog.pop_front() {
        routes[g][i] = Route(vec![slots[slot % slots.len()]]);
        slot += 1;
    }
    Ok(StrategyProfile::from_generations(routes))
}

/// Total latency of each complete period `{pK+1..(p+1)K}`, from `p = 0`.
pub fn per_period_costs(traj: &Trajectory, period: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for chunk in traj.per_stage.chunks(period as usize) {
        if chunk.len() as u64 != period || chunk.iter().any(|s| !s.complete) {
            break;
        }
        out.push(chunk.iter().map(|s| s.latency).sum());
    }
    out
}

/// Per-period cost of the WorstCase equilibrium under `d`.
pub fn simulated_seasonal_weq(net: &Network, d: &PeriodicInflow, max_horizon: u64) -> Result<Q> {
    let s = detect_steady_state(net, &d.to_inflow(), &TieBreakPolicy::WorstCase, max_horizon)?;
    Ok(s.cycle_average * q(d.period()))
}

/// Experimental comparison of periodic against uniform worst equilibria on
/// any network. Reports numbers only; nothing is asserted about them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeasonalityGap {
    pub periodic_per_period: Q,
    pub uniform_per_period: Q,
    pub gap: Q,
    pub distance: u64,
}

pub fn seasonality_gap(net: &Network, d: &PeriodicInflow, max_horizon: u64) -> Result<SeasonalityGap> {
    let gamma = d.gamma()?;
    let periodic_per_period = simulated_seasonal_weq(net, d, max_horizon)?;
    let uniform = detect_steady_state(net, &InflowProfile::Uniform(gamma), &TieBreakPolicy::WorstCase, max_horizon)?;
    let uniform_per_period = uniform.cycle_average * q(d.period());
    Ok(SeasonalityGap {
        periodic_per_period,
        uniform_per_period,
        gap: periodic_per_period - uniform_per_period,
        distance: distance_to_uniform(d)?.distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsim::simulate;
    use crate::generators::{gen_example, Example};

    fn pi(v: &[u64]) -> PeriodicInflow {
        PeriodicInflow::new(v.to_vec()).unwrap()
    }

    #[test]
    fn successors() {
        assert_eq!(elementary_successors(&pi(&[6, 0, 0])).unwrap(), vec![pi(&[5, 1, 0])]);
        assert!(elementary_successors(&pi(&[2, 2, 2])).unwrap().is_empty());
        assert_eq!(elementary_successors(&pi(&[3, 1])).unwrap(), vec![pi(&[2, 2])]);
        assert_eq!(elementary_successors(&pi(&[3, 0])), Err(Error::NonIntegralRate { sum: 3, period: 2 }));
    }

    #[test]
    fn distances() {
        let d = distance_to_uniform(&pi(&[6, 0, 0])).unwrap();
        assert_eq!(d.distance, 6);
        assert_eq!(d.path.first(), Some(&pi(&[6, 0, 0])));
        assert_eq!(d.path.last(), Some(&pi(&[2, 2, 2])));
        assert_eq!(distance_to_uniform(&pi(&[2, 2, 2])).unwrap().distance, 0);
        assert_eq!(distance_to_uniform(&pi(&[3, 1])).unwrap().distance, 1);
        assert_eq!(
            distance_to_uniform_capped(&pi(&[12, 0, 0, 0]), 5),
            Err(Error::StateExplosion { cap: 5 })
        );
    }

    #[test]
    fn seasonal_formulas() {
        let net = gen_example(Example::SeasonalTwoEdge);
        assert_eq!(seasonal_parallel_opt(&net, &pi(&[6, 0, 0])).unwrap(), q(15));
        assert_eq!(seasonal_parallel_weq(&net, &pi(&[6, 0, 0])).unwrap(), q(18));
        assert_eq!(seasonal_parallel_opt(&net, &pi(&[3, 1])).unwrap(), q(7));
        assert_eq!(seasonal_parallel_weq(&net, &pi(&[3, 1])).unwrap(), q(9));
        assert!(matches!(seasonal_parallel_opt(&net, &pi(&[3, 3])), Err(Error::CapacityMismatch { .. })));
    }

    #[test]
    fn simulation_matches_formulas() {
        let net = gen_example(Example::SeasonalTwoEdge);
        for v in [&[6, 0, 0][..], &[3, 1], &[0, 4, 2], &[2, 2]] {
            let d = pi(v);
            let inflow = d.to_inflow();
            let p = planner_profile(&net, &inflow, 30).unwrap();
            let traj = simulate(&net, &inflow, &p, 30).unwrap();
            let costs = per_period_costs(&traj, d.period());
            assert_eq!(q(*costs.last().unwrap()), seasonal_parallel_opt(&net, &d).unwrap(), "{v:?}");
            assert_eq!(simulated_seasonal_weq(&net, &d, 500).unwrap(), seasonal_parallel_weq(&net, &d).unwrap());
        }
    }

    #[test]
    fn uniform_gap_is_zero() {
        let g = seasonality_gap(&gen_example(Example::Fig2), &pi(&[2, 2]), 500).unwrap();
        assert_eq!(g.gap, q(0));
        assert_eq!(g.distance, 0);
    }
}
