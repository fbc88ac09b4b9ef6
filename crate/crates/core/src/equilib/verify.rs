//! Brute-force equilibrium checks: every player tries every route against
//! the rest of the profile held fixed.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dynsim::{simulate, InflowProfile, PlayerId, StrategyProfile, Trajectory};
use crate::error::{Error, Result};
use crate::network::{Network, Route};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Generations within this many stages of the horizon are not checked.
    pub tail_margin: u64,
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tail_margin: 0, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NashVerdict {
    Pass,
    Fail { player: PlayerId, route: Route, gain: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UfrVerdict {
    Pass,
    /// `player` could reach `vertex` at stage `earliest` instead of `actual`.
    Fail { player: PlayerId, vertex: usize, earliest: u64, actual: u64 },
}

/// Earliest stage each player could reach each vertex by a unilateral
/// deviation, with the route prefix that achieves it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EarliestArrivalTable {
    pub entries: BTreeMap<(usize, PlayerId), (u64, Route)>,
}

impl EarliestArrivalTable {
    pub fn get(&self, vertex: usize, player: PlayerId) -> Option<(u64, &Route)> {
        self.entries.get(&(vertex, player)).map(|(t, r)| (*t, r))
    }
}

/// Vertex and stage of each arrival along a route.
type Arrivals = Vec<(usize, u64)>;

/// Result of one player trying every route.
struct Deviations {
    player: PlayerId,
    actual_latency: u64,
    actual_arrivals: Arrivals,
    /// (route, latency, arrival per route vertex)
    tried: Vec<(Route, u64, Arrivals)>,
}

fn arrivals(net: &Network, route: &Route, traj: &Trajectory, p: PlayerId) -> Result<(u64, Vec<(usize, u64)>)> {
    let out = traj.per_player.get(&p).ok_or(Error::IncompleteHorizon {
        generation: p.generation,
        index: p.index,
        cutoff: traj.last_stage,
    })?;
    let vs = route.vertices(net);
    Ok((out.latency, vs.into_iter().zip(out.vertex_arrivals(p.generation)).collect()))
}

fn explore(
    net: &Network,
    inflow: &InflowProfile,
    profile: &StrategyProfile,
    horizon: u64,
    routes: &[Route],
    base: &Trajectory,
    p: PlayerId,
) -> Result<Deviations> {
    let own = profile.route(p).clone();
    let (actual_latency, actual_arrivals) = arrivals(net, &own, base, p)?;
    let mut tried = Vec::new();
    let mut dev = profile.clone();
    for r in routes {
        if *r == own {
            continue;
        }
        dev.set_route(p, r.clone());
        let traj = simulate(net, inflow, &dev, horizon)?;
        let (lat, arr) = arrivals(net, r, &traj, p)?;
        tried.push((r.clone(), lat, arr));
    }
    Ok(Deviations { player: p, actual_latency, actual_arrivals, tried })
}

fn explore_all(
    net: &Network,
    inflow: &InflowProfile,
    profile: &StrategyProfile,
    horizon: u64,
    opts: VerifyOptions,
) -> Result<Vec<Deviations>> {
    let profile = profile.truncated(horizon);
    let base = simulate(net, inflow, &profile, horizon)?;
    let routes = net.routes()?;
    let last = horizon.saturating_sub(opts.tail_margin);
    let players: Vec<PlayerId> = profile.players().filter(|p| p.generation <= last).collect();
    let run = |&p: &PlayerId| explore(net, inflow, &profile, horizon, &routes, &base, p);
    if opts.parallel {
        players.par_iter().map(run).collect()
    } else {
        players.iter().map(run).collect()
    }
}

fn nash_of(devs: &[Deviations]) -> NashVerdict {
    for d in devs {
        let best = d.tried.iter().filter(|(_, lat, _)| *lat < d.actual_latency).min_by_key(|(_, lat, _)| *lat);
        if let Some((r, lat, _)) = best {
            return NashVerdict::Fail { player: d.player, route: r.clone(), gain: d.actual_latency - lat };
        }
    }
    NashVerdict::Pass
}

pub fn verify_nash(net: &Network, inflow: &InflowProfile, profile: &StrategyProfile, horizon: u64) -> Result<NashVerdict> {
    verify_nash_with(net, inflow, profile, horizon, VerifyOptions::default())
}

pub fn verify_nash_with(
    net: &Network,
    inflow: &InflowProfile,
    profile: &StrategyProfile,
    horizon: u64,
    opts: VerifyOptions,
) -> Result<NashVerdict> {
    Ok(nash_of(&explore_all(net, inflow, profile, horizon, opts)?))
}

pub fn verify_ufr(net: &Network, inflow: &InflowProfile, profile: &StrategyProfile, horizon: u64) -> Result<UfrVerdict> {
    verify_ufr_with(net, inflow, profile, horizon, VerifyOptions::default())
}

/// UFR holds iff no player can reach any vertex of her route earlier by
/// switching routes. The destination is one such vertex, so UFR implies Nash.
pub fn verify_ufr_with(
    net: &Network,
    inflow: &InflowProfile,
    profile: &StrategyProfile,
    horizon: u64,
    opts: VerifyOptions,
) -> Result<UfrVerdict> {
    let devs = explore_all(net, inflow, profile, horizon, opts)?;
    for d in &devs {
        for &(v, actual) in &d.actual_arrivals {
            let earliest = d
                .tried
                .iter()
                .filter_map(|(_, _, arr)| arr.iter().find(|(w, _)| *w == v).map(|&(_, s)| s))
                .min();
            if let Some(e) = earliest.filter(|&e| e < actual) {
                return Ok(UfrVerdict::Fail { player: d.player, vertex: v, earliest: e, actual });
            }
        }
    }
    Ok(UfrVerdict::Pass)
}

pub fn earliest_arrival_table(
    net: &Network,
    inflow: &InflowProfile,
    profile: &StrategyProfile,
    horizon: u64,
    opts: VerifyOptions,
) -> Result<EarliestArrivalTable> {
    let devs = explore_all(net, inflow, profile, horizon, opts)?;
    let mut table = EarliestArrivalTable::default();
    for d in &devs {
        let own = profile.route(d.player);
        let candidates = std::iter::once((own, &d.actual_arrivals)).chain(d.tried.iter().map(|(r, _, a)| (r, a)));
        for (r, arr) in candidates {
            for (k, &(v, s)) in arr.iter().enumerate() {
                let entry = table.entries.entry((v, d.player));
                let prefix = Route(r.edges()[..k].to_vec());
                entry
                    .and_modify(|cur| {
                        if s < cur.0 {
                            *cur = (s, prefix.clone());
                        }
                    })
                    .or_insert((s, prefix));
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilib::{greedy_ufr, TieBreakPolicy};
    use crate::generators::{gen_example, Example};

    #[test]
    fn greedy_passes_both() {
        for ex in [Example::Wheatstone, Example::Fig3, Example::Fig2] {
            let net = gen_example(ex);
            let inflow = InflowProfile::Uniform(2);
            let p = greedy_ufr(&net, &inflow, &TieBreakPolicy::WorstCase, 8).unwrap();
            assert_eq!(verify_ufr(&net, &inflow, &p, 8).unwrap(), UfrVerdict::Pass, "{}", ex.name());
            assert_eq!(verify_nash(&net, &inflow, &p, 8).unwrap(), NashVerdict::Pass);
        }
    }

    #[test]
    fn everyone_on_slow_edge_fails() {
        let net = gen_example(Example::SeasonalTwoEdge);
        let inflow = InflowProfile::Uniform(1);
        let slow = net.parse_route("e2").unwrap();
        let p = StrategyProfile::from_fn(&inflow, 4, |_| slow.clone());
        match verify_nash(&net, &inflow, &p, 4).unwrap() {
            NashVerdict::Fail { player, gain, .. } => {
                assert_eq!(player, PlayerId::new(1, 1));
                assert_eq!(gain, 1);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn table_source_entry_is_departure() {
        let net = gen_example(Example::Wheatstone);
        let inflow = InflowProfile::Uniform(2);
        let p = greedy_ufr(&net, &inflow, &TieBreakPolicy::BestCase, 4).unwrap();
        let t = earliest_arrival_table(&net, &inflow, &p, 4, VerifyOptions::default()).unwrap();
        let (s, prefix) = t.get(net.source(), PlayerId::new(3, 2)).unwrap();
        assert_eq!(s, 3);
        assert!(prefix.is_empty());
        let traj = simulate(&net, &inflow, &p, 4).unwrap();
        for (id, o) in &traj.per_player {
            assert_eq!(t.get(net.dest(), *id).unwrap().0, o.arrival);
        }
    }
}
