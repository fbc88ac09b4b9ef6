//! Social optimum: a static min-cost flow repeated at every stage.

use crate::cut::{capacity, CutResult};
use crate::dynsim::{InflowProfile, StrategyProfile, Trajectory};
use crate::error::{Error, Result};
use crate::network::{Network, Route};
use crate::rational::{frac, q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticFlow {
    pub edge_flow: Vec<u64>,
    /// Route decomposition, cheapest routes first.
    pub route_flow: Vec<(Route, u64)>,
    pub value: u64,
    pub cost: u64,
}

/// Successive shortest paths with Bellman-Ford on the residual graph; ties
/// resolve by edge order, so the result is deterministic.
pub fn min_cost_flow(net: &Network, value: u64) -> Result<StaticFlow> {
    let cap = capacity(net);
    if value > cap {
        return Err(Error::InfeasibleDemand { demand: value, capacity: cap });
    }
    let m = net.edges().len();
    let n = net.vertices().len();
    let mut flow = vec![0u64; m];
    let mut sent = 0;
    while sent < value {
        let mut dist: Vec<Option<i64>> = vec![None; n];
        let mut pred: Vec<Option<(usize, bool)>> = vec![None; n];
        dist[net.source()] = Some(0);
        for _ in 0..n {
            let mut changed = false;
            for (e, edge) in net.edges().iter().enumerate() {
                let tau = edge.transit as i64;
                if flow[e] < edge.capacity {
                    if let Some(d) = dist[edge.tail] {
                        if dist[edge.head].is_none_or(|x| d + tau < x) {
                            dist[edge.head] = Some(d + tau);
                            pred[edge.head] = Some((e, true));
                            changed = true;
                        }
                    }
                }
                if flow[e] > 0 {
                    if let Some(d) = dist[edge.head] {
                        if dist[edge.tail].is_none_or(|x| d - tau < x) {
                            dist[edge.tail] = Some(d - tau);
                            pred[edge.tail] = Some((e, false));
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut path = Vec::new();
        let mut v = net.dest();
        while v != net.source() {
            let (e, fwd) = pred[v].expect("demand within capacity has an augmenting path");
            path.push((e, fwd));
            v = if fwd { net.edge(e).tail } else { net.edge(e).head };
        }
        let push = path
            .iter()
            .map(|&(e, fwd)| if fwd { net.edge(e).capacity - flow[e] } else { flow[e] })
            .min()
            .expect("non-empty path")
            .min(value - sent);
        for (e, fwd) in path {
            if fwd {
                flow[e] += push;
            } else {
                flow[e] -= push;
            }
        }
        sent += push;
    }
    decompose(net, &flow, value)
}

/// Peels off routes in (transit, edge sequence) order; leftover zero-cost
/// circulations are dropped.
fn decompose(net: &Network, flow: &[u64], value: u64) -> Result<StaticFlow> {
    let mut routes = net.routes()?;
    routes.sort_by_key(|r| (r.transit(net), r.clone()));
    let mut rest = flow.to_vec();
    let mut remaining = value;
    let mut route_flow = Vec::new();
    while remaining > 0 {
        let (r, amount) = routes
            .iter()
            .find_map(|r| {
                let a = r.edges().iter().map(|&e| rest[e]).min().unwrap_or(0);
                (a > 0).then_some((r, a))
            })
            .expect("positive flow contains a route");
        let amount = amount.min(remaining);
        for &e in r.edges() {
            rest[e] -= amount;
        }
        remaining -= amount;
        match route_flow.iter_mut().find(|(x, _): &&mut (Route, u64)| x == r) {
            Some((_, f)) => *f += amount,
            None => route_flow.push((r.clone(), amount)),
        }
    }
    route_flow.sort_by_key(|(r, _)| (r.transit(net), r.clone()));
    let mut edge_flow = vec![0u64; net.edges().len()];
    for (r, f) in &route_flow {
        for &e in r.edges() {
            edge_flow[e] += f;
        }
    }
    let cost = route_flow.iter().map(|(r, f)| r.transit(net) * f).sum();
    Ok(StaticFlow { edge_flow, route_flow, value, cost })
}

/// Every generation splits like the min-cost flow: the first `F_r1` players
/// (by index) take the cheapest route, and so on.
pub fn opt_strategy(net: &Network, delta: u64, horizon: u64) -> Result<StrategyProfile> {
    let f = min_cost_flow(net, delta)?;
    let gen: Vec<Route> = f
        .route_flow
        .iter()
        .flat_map(|(r, n)| std::iter::repeat_n(r.clone(), *n as usize))
        .collect();
    Ok(StrategyProfile::from_fn(&InflowProfile::Uniform(delta), horizon, |id| {
        gen[(id.index - 1) as usize].clone()
    }))
}

/// Optimal long-run total latency per stage for uniform inflow `delta`.
pub fn opt_value(net: &Network, delta: u64) -> Result<Q> {
    Ok(q(min_cost_flow(net, delta)?.cost))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRate {
    pub edge: usize,
    pub capacity: u64,
    pub entry_average: Q,
    pub exit_average: Q,
    pub overloaded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateAudit {
    /// Averaging window `first..=last`.
    pub window: (u64, u64),
    pub edges: Vec<EdgeRate>,
    /// Change in total queue length on the cut edges across the window.
    pub queue_growth: i64,
}

impl RateAudit {
    pub fn flagged(&self) -> bool {
        self.edges.iter().any(|e| e.overloaded)
    }
}

/// Entry and exit rates of the cut edges over the second half of the
/// horizon, after the start-up transient.
pub fn rate_audit(traj: &Trajectory, net: &Network, cut: &CutResult) -> RateAudit {
    let last = traj.horizon.min(traj.edge_entries.len() as u64).max(1);
    let first = last / 2 + 1;
    let len = last - first + 1;
    let sum = |rows: &[Vec<u64>], e: usize| -> u64 {
        rows[(first - 1) as usize..last as usize].iter().map(|r| r[e]).sum()
    };
    let edges = cut
        .cut_edges
        .iter()
        .map(|&e| {
            let entry_average = frac(sum(&traj.edge_entries, e), len);
            let capacity = net.edge(e).capacity;
            EdgeRate {
                edge: e,
                capacity,
                entry_average,
                exit_average: frac(sum(&traj.edge_exits, e), len),
                overloaded: entry_average > q(capacity),
            }
        })
        .collect();
    let queued = |t: u64| -> i64 {
        cut.cut_edges.iter().map(|&e| traj.queue_history[(t - 1) as usize][e] as i64).sum()
    };
    let queue_growth = queued(last) - if first > 1 { queued(first - 1) } else { 0 };
    RateAudit { window: (first, last), edges, queue_growth }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::min_cut;
    use crate::dynsim::simulate;
    use crate::generators::{gen_braess, gen_example, gen_pigou, Example};

    fn labels(net: &Network, f: &StaticFlow) -> Vec<(String, u64)> {
        f.route_flow.iter().map(|(r, n)| (r.label(net), *n)).collect()
    }

    #[test]
    fn wheatstone() {
        let net = gen_example(Example::Wheatstone);
        let f = min_cost_flow(&net, 2).unwrap();
        assert_eq!(f.cost, 2);
        assert_eq!(labels(&net, &f), vec![("e1,e4".to_string(), 1), ("e2,e5".to_string(), 1)]);
    }

    #[test]
    fn fig3() {
        let net = gen_example(Example::Fig3);
        let f = min_cost_flow(&net, 3).unwrap();
        assert_eq!(f.cost, 2);
        assert_eq!(labels(&net, &f), vec![("e1,e2".into(), 1), ("e1,e3".into(), 1), ("e4".into(), 1)]);
    }

    #[test]
    fn zero_and_infeasible() {
        let net = gen_example(Example::Fig2);
        let f = min_cost_flow(&net, 0).unwrap();
        assert_eq!((f.cost, f.route_flow.len()), (0, 0));
        assert_eq!(min_cost_flow(&net, 3), Err(Error::InfeasibleDemand { demand: 3, capacity: 2 }));
    }

    #[test]
    fn closed_values() {
        for k in 1..=4 {
            assert_eq!(opt_value(&gen_braess(k), k as u64 + 1).unwrap(), q(k as u64 + 1));
        }
        assert_eq!(opt_value(&gen_pigou(2, 1).unwrap(), 3).unwrap(), q(4));
        assert_eq!(opt_value(&gen_pigou(3, 2).unwrap(), 10).unwrap(), q(12));
    }

    #[test]
    fn repeated_optimum_never_waits() {
        for (ex, d, cost) in [(Example::Fig2, 2, 5), (Example::Wheatstone, 2, 2), (Example::Fig3, 3, 2)] {
            let net = gen_example(ex);
            let p = opt_strategy(&net, d, 20).unwrap();
            let traj = simulate(&net, &InflowProfile::Uniform(d), &p, 20).unwrap();
            assert!(traj.per_stage.iter().all(|s| s.waiting == 0 && s.latency == cost), "{}", ex.name());
        }
    }

    #[test]
    fn audit_at_optimum() {
        let net = gen_example(Example::Wheatstone);
        let p = opt_strategy(&net, 2, 20).unwrap();
        let traj = simulate(&net, &InflowProfile::Uniform(2), &p, 20).unwrap();
        let a = rate_audit(&traj, &net, &min_cut(&net));
        assert!(!a.flagged());
        assert!(a.edges.iter().all(|e| e.entry_average == q(1) && e.exit_average == q(1)));
    }

    #[test]
    fn audit_flags_overload() {
        let net = Network::parse("network one\nvertex s\nvertex d\nedge a s d tau=1 gamma=1\nsource s\ndest d\n").unwrap();
        let inflow = InflowProfile::Uniform(2);
        let r = net.routes().unwrap()[0].clone();
        let p = StrategyProfile::from_fn(&inflow, 20, |_| r.clone());
        let traj = simulate(&net, &inflow, &p, 20).unwrap();
        let a = rate_audit(&traj, &net, &min_cut(&net));
        assert!(a.flagged());
        assert_eq!(a.queue_growth, 10);
    }
}
