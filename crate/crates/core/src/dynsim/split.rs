use std::collections::BTreeMap;

use super::profile::{PlayerId, StrategyProfile};
use super::simulate::Trajectory;
use crate::error::{Error, Result};
use crate::network::{Network, NetworkBuilder, Route};

/// `map[e]` lists the unit-capacity edges that replace original edge `e`.
pub type SplitMap = Vec<Vec<usize>>;

/// Replaces every edge of capacity `c > 1` by `c` parallel unit edges named
/// `<name>#1..#c`. Initial queues are dealt round-robin over the copies.
pub fn split_capacities(net: &Network) -> (Network, SplitMap) {
    let mut b = NetworkBuilder::new(net.name());
    for v in net.vertices() {
        b.vertex(v).expect("vertex");
    }
    let mut names: Vec<Vec<String>> = Vec::new();
    for e in net.edges() {
        let tail = net.vertex_name(e.tail);
        let head = net.vertex_name(e.head);
        let copies: Vec<String> = if e.capacity == 1 {
            vec![e.name.clone()]
        } else {
            (1..=e.capacity).map(|j| format!("{}#{}", e.name, j)).collect()
        };
        for c in &copies {
            b.edge(c, tail, head, e.transit, 1).expect("edge");
        }
        names.push(copies);
    }
    b.source(net.vertex_name(net.source())).expect("source");
    b.dest(net.vertex_name(net.dest())).expect("dest");
    for (e, copies) in names.iter().enumerate() {
        let len = net.initial_queue(e);
        let k = copies.len() as u64;
        for (j, c) in copies.iter().enumerate() {
            let share = len / k + u64::from((j as u64) < len % k);
            if share > 0 {
                b.queue(c, share).expect("queue");
            }
        }
    }
    let split = b.build().expect("split network");
    let map = names
        .iter()
        .map(|copies| copies.iter().map(|c| split.edge_index(c).expect("copy")).collect())
        .collect();
    (split, map)
}

/// Image of a simulated profile on the split network: occupants of each
/// original edge, in queue order, are dealt to its copies round-robin.
pub fn split_profile(
    net: &Network,
    map: &SplitMap,
    traj: &Trajectory,
    profile: &StrategyProfile,
) -> Result<StrategyProfile> {
    let mut order: Vec<Vec<(u64, PlayerId)>> = vec![Vec::new(); net.edges().len()];
    for p in profile.players() {
        if p.generation > traj.horizon {
            continue;
        }
        let out = traj.per_player.get(&p).ok_or(Error::IncompleteHorizon {
            generation: p.generation,
            index: p.index,
            cutoff: traj.last_stage,
        })?;
        for leg in &out.legs {
            order[leg.edge].push((leg.entry, p));
        }
    }
    let mut slot: BTreeMap<(PlayerId, usize), usize> = BTreeMap::new();
    for (e, list) in order.iter_mut().enumerate() {
        list.sort();
        let k = map[e].len() as u64;
        let offset = net.initial_queue(e);
        for (n, &(_, p)) in list.iter().enumerate() {
            slot.insert((p, e), map[e][((offset + n as u64) % k) as usize]);
        }
    }
    let mut out = profile.truncated(traj.horizon);
    for p in profile.players().filter(|p| p.generation <= traj.horizon) {
        let r = Route(profile.route(p).edges().iter().map(|&e| slot[&(p, e)]).collect());
        out.set_route(p, r);
    }
    Ok(out)
}
