//! Random instances and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use dyncong::dynsim::{InflowProfile, StrategyProfile};
use dyncong::network::{Network, NetworkBuilder, Route};
use rand::rngs::StdRng;
use rand::Rng;

/// Random valid DAG: vertices `0..n` in topological order, a spine
/// `0 -> 1 -> ... -> n-1` so every vertex lies on a route, plus extra forward
/// edges. Parallel edges are allowed.
pub fn random_network(rng: &mut StdRng, max_vertices: usize, max_edges: usize, max_tau: u64, max_gamma: u64) -> Network {
    let n = rng.gen_range(2..=max_vertices);
    let mut spec: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    let extra = rng.gen_range(0..=max_edges.saturating_sub(n - 1));
    for _ in 0..extra {
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 1..n);
        spec.push((a, b));
    }
    let mut b = NetworkBuilder::new("random");
    for v in 0..n {
        b.vertex(&format!("v{v}")).unwrap();
    }
    for (i, &(t, h)) in spec.iter().enumerate() {
        b.edge(
            &format!("e{}", i + 1),
            &format!("v{t}"),
            &format!("v{h}"),
            rng.gen_range(0..=max_tau),
            rng.gen_range(1..=max_gamma),
        )
        .unwrap();
    }
    b.source("v0").unwrap();
    b.dest(&format!("v{}", n - 1)).unwrap();
    b.build().unwrap()
}

/// Parallel network from `(tau, gamma)` pairs.
pub fn parallel(spec: &[(u64, u64)]) -> Network {
    let mut b = NetworkBuilder::new("parallel");
    b.vertex("s").unwrap();
    b.vertex("d").unwrap();
    for (i, &(tau, gamma)) in spec.iter().enumerate() {
        b.edge(&format!("e{}", i + 1), "s", "d", tau, gamma).unwrap();
    }
    b.source("s").unwrap();
    b.dest("d").unwrap();
    b.build().unwrap()
}

pub fn random_parallel(rng: &mut StdRng, max_edges: usize, max_tau: u64, max_gamma: u64) -> Network {
    let n = rng.gen_range(1..=max_edges);
    let spec: Vec<(u64, u64)> = (0..n).map(|_| (rng.gen_range(0..=max_tau), rng.gen_range(1..=max_gamma))).collect();
    parallel(&spec)
}

pub fn random_profile(rng: &mut StdRng, net: &Network, inflow: &InflowProfile, horizon: u64) -> StrategyProfile {
    let routes = net.routes().unwrap();
    StrategyProfile::from_fn(inflow, horizon, |_| routes[rng.gen_range(0..routes.len())].clone())
}

/// Cheapest integral route flow of value `delta`, by enumerating every
/// assignment of player counts to routes. Exponential.
pub fn brute_force_opt(net: &Network, delta: u64) -> Option<u64> {
    fn rec(net: &Network, routes: &[Route], k: usize, left: u64, cost: u64, load: &mut [u64], best: &mut Option<u64>) {
        if left == 0 {
            *best = Some(best.map_or(cost, |b| b.min(cost)));
            return;
        }
        if k == routes.len() {
            return;
        }
        let r = &routes[k];
        let room = r.edges().iter().map(|&e| net.edge(e).capacity - load[e]).min().unwrap_or(0);
        for n in 0..=room.min(left) {
            for &e in r.edges() {
                load[e] += n;
            }
            rec(net, routes, k + 1, left - n, cost + n * r.transit(net), load, best);
            for &e in r.edges() {
                load[e] -= n;
            }
        }
    }
    let routes = net.routes().unwrap();
    let mut best = None;
    let mut load = vec![0; net.edges().len()];
    rec(net, &routes, 0, delta, 0, &mut load, &mut best);
    best
}

/// Smallest total capacity of an edge set whose removal disconnects the
/// destination, over all subsets.
pub fn brute_force_cut(net: &Network) -> u64 {
    let m = net.edges().len();
    assert!(m <= 16, "subset enumeration is for small networks");
    (0u32..1 << m)
        .filter(|mask| !connected(net, |e| mask & (1 << e) == 0))
        .map(|mask| (0..m).filter(|e| mask & (1 << e) != 0).map(|e| net.edge(e).capacity).sum())
        .min()
        .expect("the full edge set is a cut")
}

fn connected(net: &Network, keep: impl Fn(usize) -> bool) -> bool {
    let mut seen = vec![false; net.vertices().len()];
    let mut stack = vec![net.source()];
    seen[net.source()] = true;
    while let Some(v) = stack.pop() {
        for &e in net.out_edges(v) {
            let h = net.edge(e).head;
            if keep(e) && !seen[h] {
                seen[h] = true;
                stack.push(h);
            }
        }
    }
    seen[net.dest()]
}

/// Steady backlog of a cyclic queue served at rate `gamma`, summed over one
/// period. The backlog carried past each slot is the number of unit moves
/// across that slot boundary, so the sum is the distance to uniform.
pub fn lindley_distance(values: &[u64]) -> u64 {
    let k = values.len() as u64;
    let gamma = values.iter().sum::<u64>() / k;
    let mut b = 0u64;
    // Two passes reach the periodic regime: the first leaves a backlog of zero
    // after the slot where the cumulative surplus is lowest.
    for &v in values.iter().chain(values) {
        b = (b + v).saturating_sub(gamma);
    }
    let mut total = 0;
    for &v in values {
        b = (b + v).saturating_sub(gamma);
        total += b;
    }
    total
}

/// Random vector of `k` non-negative entries summing to `gamma * k`.
pub fn random_periodic(rng: &mut StdRng, k: usize, gamma: u64) -> Vec<u64> {
    let mut v = vec![0u64; k];
    for _ in 0..gamma * k as u64 {
        v[rng.gen_range(0..k)] += 1;
    }
    v
}
