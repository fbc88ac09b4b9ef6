//! Player-by-player construction of a uniformly fastest route equilibrium.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::policy::{BoundPreference, TieBreakPolicy};
use crate::dynsim::{InflowProfile, PlayerId, StrategyProfile};
use crate::error::{Error, Result};
use crate::network::{Network, Route};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Slot {
    entry: u64,
    exit: u64,
}

/// Per-edge occupants in queue order with their (fixed) exit stages.
#[derive(Debug, Clone)]
pub(crate) struct Schedule {
    slots: Vec<Vec<Slot>>,
}

impl Schedule {
    fn new(net: &Network) -> Self {
        let slots = net
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                (0..net.initial_queue(e)).map(|j| Slot { entry: 0, exit: 1 + j / edge.capacity }).collect()
            })
            .collect();
        Schedule { slots }
    }

    /// Stage at which a newcomer entering `e` at stage `a` leaves it. The
    /// newcomer ranks behind every occupant with entry `<= a`.
    fn exit_time(&self, net: &Network, e: usize, a: u64) -> u64 {
        let edge = net.edge(e);
        let s = &self.slots[e];
        let n = s.partition_point(|o| o.entry <= a);
        let gamma = edge.capacity as usize;
        let blocked = if n >= gamma { s[n - gamma].exit + 1 } else { 0 };
        (a + edge.transit).max(blocked)
    }

    fn insert(&mut self, e: usize, entry: u64, exit: u64) {
        let s = &mut self.slots[e];
        let n = s.partition_point(|o| o.entry <= entry);
        debug_assert_eq!(n, s.len(), "a later player overtook an earlier one");
        s.insert(n, Slot { entry, exit });
    }

    /// Drops occupants that can no longer constrain anyone entering at `t` or later.
    fn prune(&mut self, net: &Network, t: u64) {
        for (e, s) in self.slots.iter_mut().enumerate() {
            let horizon = t + net.edge(e).transit;
            let k = s.partition_point(|o| o.exit < horizon);
            s.drain(..k);
        }
    }

    /// Canonical state relative to stage `t`, after `prune(t)`.
    fn key(&self, t: u64) -> Vec<Vec<(u64, u64)>> {
        self.slots
            .iter()
            .map(|s| s.iter().map(|o| (o.entry.max(t) - t, o.exit - t)).collect())
            .collect()
    }

    fn pending(&self) -> usize {
        self.slots.iter().map(|s| s.len()).sum()
    }
}

enum Chooser {
    Best,
    Worst,
    Explicit(BoundPreference),
}

/// Incremental greedy construction; one call to `step` adds one generation.
pub struct Greedy<'a> {
    net: &'a Network,
    inflow: &'a InflowProfile,
    routes: Vec<Route>,
    chooser: Chooser,
    phases: u64,
    sched: Schedule,
    next: u64,
    profile: StrategyProfile,
    latencies: Vec<u64>,
    counts: Vec<BTreeMap<Route, u64>>,
}

impl<'a> Greedy<'a> {
    pub fn new(net: &'a Network, inflow: &'a InflowProfile, policy: &TieBreakPolicy) -> Result<Self> {
        net.ensure_valid()?;
        let (routes, chooser) = match policy {
            TieBreakPolicy::BestCase => (net.routes()?, Chooser::Best),
            TieBreakPolicy::WorstCase => (net.routes()?, Chooser::Worst),
            TieBreakPolicy::Explicit(p) => {
                let b = p.bind(net)?;
                (b.routes.clone(), Chooser::Explicit(b))
            }
        };
        Ok(Greedy {
            net,
            inflow,
            routes,
            chooser,
            phases: policy.phases(),
            sched: Schedule::new(net),
            next: 1,
            profile: StrategyProfile::new(),
            latencies: Vec::new(),
            counts: Vec::new(),
        })
    }

    /// Earliest stage at which a player leaving the source at `t` can reach each vertex.
    fn earliest(&self, t: u64) -> Vec<Option<u64>> {
        let net = self.net;
        let mut best: Vec<Option<u64>> = vec![None; net.vertices().len()];
        let mut heap = BinaryHeap::new();
        best[net.source()] = Some(t);
        heap.push(Reverse((t, net.source())));
        while let Some(Reverse((a, u))) = heap.pop() {
            if best[u] != Some(a) {
                continue;
            }
            for &e in net.out_edges(u) {
                let v = net.edge(e).head;
                let x = self.sched.exit_time(net, e, a);
                if best[v].is_none_or(|b| x < b) {
                    best[v] = Some(x);
                    heap.push(Reverse((x, v)));
                }
            }
        }
        best
    }

    /// Whether `r` reaches every vertex at its earliest stage; returns the
    /// per-edge wait flags if so.
    fn tight(&self, r: &Route, ea: &[Option<u64>]) -> Option<Vec<bool>> {
        let net = self.net;
        let mut waits = Vec::with_capacity(r.len());
        for &e in r.edges() {
            let edge = net.edge(e);
            let a = ea[edge.tail]?;
            let x = self.sched.exit_time(net, e, a);
            if Some(x) != ea[edge.head] {
                return None;
            }
            waits.push(x > a + edge.transit);
        }
        Some(waits)
    }

    fn choose(&self, p: PlayerId, ea: &[Option<u64>]) -> usize {
        match &self.chooser {
            Chooser::Explicit(b) => *b
                .order(p)
                .iter()
                .find(|&&k| self.tight(&self.routes[k], ea).is_some())
                .expect("some route is tight"),
            c => {
                let prefer_wait = matches!(c, Chooser::Worst);
                (0..self.routes.len())
                    .filter_map(|k| {
                        let waits = self.tight(&self.routes[k], ea)?;
                        let key: Vec<(bool, usize)> = waits
                            .iter()
                            .zip(self.routes[k].edges())
                            .map(|(&w, &e)| (w != prefer_wait, e))
                            .collect();
                        Some((key, k))
                    })
                    .min()
                    .expect("some route is tight")
                    .1
            }
        }
    }

    /// Generation about to be constructed.
    pub fn next_generation(&self) -> u64 {
        self.next
    }

    /// Routes every player of the next generation; returns the generation's total latency.
    pub fn step(&mut self) -> u64 {
        let t = self.next;
        let mut routes = Vec::new();
        let mut total = 0;
        let mut counts = BTreeMap::new();
        for i in 1..=self.inflow.at(t) {
            let ea = self.earliest(t);
            let k = self.choose(PlayerId::new(t, i), &ea);
            let r = self.routes[k].clone();
            let mut a = t;
            for &e in r.edges() {
                let x = self.sched.exit_time(self.net, e, a);
                self.sched.insert(e, a, x);
                a = x;
            }
            total += a - t;
            *counts.entry(r.clone()).or_default() += 1;
            routes.push(r);
        }
        self.profile.push_generation(routes);
        self.latencies.push(total);
        self.counts.push(counts);
        self.next += 1;
        total
    }

    /// Canonical state before the next generation: pending schedule plus
    /// inflow and policy phases.
    pub(crate) fn state_key(&mut self) -> (u64, u64, Vec<Vec<(u64, u64)>>) {
        let t = self.next;
        self.sched.prune(self.net, t);
        let k = self.inflow.period();
        ((t - 1) % k, (t - 1) % self.phases, self.sched.key(t))
    }

    pub(crate) fn pending(&self) -> usize {
        self.sched.pending()
    }

    pub fn latencies(&self) -> &[u64] {
        &self.latencies
    }

    pub fn route_counts(&self) -> &[BTreeMap<Route, u64>] {
        &self.counts
    }

    pub fn profile(&self) -> &StrategyProfile {
        &self.profile
    }

    pub fn into_profile(self) -> StrategyProfile {
        self.profile
    }
}

/// Greedy UFR equilibrium for generations `1..=horizon`.
pub fn greedy_ufr(
    net: &Network,
    inflow: &InflowProfile,
    policy: &TieBreakPolicy,
    horizon: u64,
) -> Result<StrategyProfile> {
    if horizon == 0 || horizon < inflow.period() {
        return Err(Error::HorizonTooSmall { horizon, period: inflow.period() });
    }
    let mut g = Greedy::new(net, inflow, policy)?;
    for _ in 0..horizon {
        g.step();
    }
    Ok(g.into_profile())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsim::simulate;
    use crate::generators::{fig3_worst_preference, gen_example, gen_pigou, Example};

    fn check_against_simulation(net: &Network, inflow: &InflowProfile, policy: &TieBreakPolicy, horizon: u64) -> Vec<u64> {
        let mut g = Greedy::new(net, inflow, policy).unwrap();
        for _ in 0..horizon {
            g.step();
        }
        let traj = simulate(net, inflow, g.profile(), horizon).unwrap();
        let sim: Vec<u64> = traj.per_stage.iter().map(|s| s.latency).collect();
        assert_eq!(sim, g.latencies(), "greedy bookkeeping disagrees with simulation");
        sim
    }

    #[test]
    fn single_edge() {
        let net = Network::parse("network one\nvertex s\nvertex d\nedge a s d tau=4 gamma=2\nsource s\ndest d\n").unwrap();
        let lat = check_against_simulation(&net, &InflowProfile::Uniform(2), &TieBreakPolicy::WorstCase, 10);
        assert!(lat.iter().all(|&l| l == 8));
    }

    #[test]
    fn wheatstone_worst_is_six() {
        let net = gen_example(Example::Wheatstone);
        let lat = check_against_simulation(&net, &InflowProfile::Uniform(2), &TieBreakPolicy::WorstCase, 30);
        assert!(lat[10..].iter().all(|&l| l == 6), "{lat:?}");
    }

    #[test]
    fn fig3_explicit_is_four() {
        let net = gen_example(Example::Fig3);
        let pol = TieBreakPolicy::Explicit(fig3_worst_preference());
        let lat = check_against_simulation(&net, &InflowProfile::Uniform(3), &pol, 30);
        assert!(lat[10..].iter().all(|&l| l == 4), "{lat:?}");
    }

    #[test]
    fn pigou_worst() {
        let net = gen_pigou(2, 1).unwrap();
        let lat = check_against_simulation(&net, &InflowProfile::Uniform(3), &TieBreakPolicy::WorstCase, 30);
        assert!(lat[10..].iter().all(|&l| l == 6), "{lat:?}");
    }

    #[test]
    fn fig2_worst_and_best() {
        let net = gen_example(Example::Fig2);
        let inflow = InflowProfile::Uniform(2);
        for pol in [TieBreakPolicy::WorstCase, TieBreakPolicy::BestCase] {
            check_against_simulation(&net, &inflow, &pol, 30);
        }
    }

    #[test]
    fn initial_queue_respected() {
        let net = gen_example(Example::Fig3).with_initial_queue(1, 2);
        for pol in [TieBreakPolicy::WorstCase, TieBreakPolicy::BestCase] {
            check_against_simulation(&net, &InflowProfile::Uniform(3), &pol, 20);
        }
    }

    #[test]
    fn horizon_shorter_than_period() {
        let net = gen_example(Example::SeasonalTwoEdge);
        let inflow = InflowProfile::Periodic(vec![3, 0, 0]);
        assert_eq!(
            greedy_ufr(&net, &inflow, &TieBreakPolicy::WorstCase, 2),
            Err(Error::HorizonTooSmall { horizon: 2, period: 3 })
        );
    }
}
