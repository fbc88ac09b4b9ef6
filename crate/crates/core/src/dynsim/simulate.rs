use std::collections::{BTreeMap, VecDeque};

use super::profile::{InflowProfile, PlayerId, StrategyProfile};
use crate::error::{Error, Result};
use crate::network::{Network, Route};
use crate::rational::{decimal, frac, Q};

/// One edge traversal: entered at `entry`, left the head queue at `exit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Leg {
    pub edge: usize,
    pub entry: u64,
    pub exit: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerOutcome {
    pub transit: u64,
    pub waiting: u64,
    pub latency: u64,
    pub arrival: u64,
    pub legs: Vec<Leg>,
}

impl PlayerOutcome {
    /// Stage at which the player reached each vertex of her route, source first.
    pub fn vertex_arrivals(&self, departure: u64) -> Vec<u64> {
        let mut out = vec![departure];
        out.extend(self.legs.iter().map(|l| l.exit));
        out
    }
}

/// Costs of one generation, attributed to its departure stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageTotals {
    pub stage: u64,
    pub transit: u64,
    pub waiting: u64,
    pub latency: u64,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub horizon: u64,
    /// Last simulated stage.
    pub last_stage: u64,
    /// Players that reached the destination.
    pub per_player: BTreeMap<PlayerId, PlayerOutcome>,
    pub per_stage: Vec<StageTotals>,
    pub route_counts: BTreeMap<(u64, Route), u64>,
    /// `edge_entries[t-1][e]`: players entering `e` at stage `t`.
    pub edge_entries: Vec<Vec<u64>>,
    /// `edge_exits[t-1][e]`: occupants (players or initial-queue blockers) leaving `e` at `t`.
    pub edge_exits: Vec<Vec<u64>>,
    /// Occupants waiting at each edge's head at the end of each stage.
    pub queue_history: Vec<Vec<u64>>,
    /// Players still travelling along each edge at the end of each stage.
    pub transit_history: Vec<Vec<u64>>,
    pub final_queues: Vec<u64>,
}

impl Trajectory {
    pub fn stage(&self, t: u64) -> Option<&StageTotals> {
        self.per_stage.get((t as usize).checked_sub(1)?)
    }

    pub fn latency(&self, p: PlayerId) -> Option<u64> {
        self.per_player.get(&p).map(|o| o.latency)
    }
}

/// Stage budget large enough for every player of `1..=horizon` to finish:
/// a queued player waits at most once per occupant ahead of her on each edge.
pub fn default_cutoff(net: &Network, inflow: &InflowProfile, horizon: u64) -> u64 {
    let occupants = inflow.players_up_to(horizon) + net.initial_queues().iter().sum::<u64>();
    horizon + net.total_transit() + occupants * net.edges().len() as u64 + 1
}

pub fn simulate(net: &Network, inflow: &InflowProfile, profile: &StrategyProfile, horizon: u64) -> Result<Trajectory> {
    simulate_with_cutoff(net, inflow, profile, horizon, default_cutoff(net, inflow, horizon))
}

#[derive(Clone, Copy)]
enum Occupant {
    Blocker,
    Player(usize),
}

struct Agent<'a> {
    id: PlayerId,
    route: &'a Route,
    pos: usize,
    legs: Vec<Leg>,
    arrival: Option<u64>,
}

pub fn simulate_with_cutoff(
    net: &Network,
    inflow: &InflowProfile,
    profile: &StrategyProfile,
    horizon: u64,
    cutoff: u64,
) -> Result<Trajectory> {
    profile.check(net, inflow, horizon)?;
    let m = net.edges().len();
    let mut agents: Vec<Agent> = Vec::new();
    let mut in_transit: Vec<VecDeque<(u64, usize)>> = vec![VecDeque::new(); m];
    let mut queues: Vec<VecDeque<Occupant>> = (0..m)
        .map(|e| (0..net.initial_queue(e)).map(|_| Occupant::Blocker).collect())
        .collect();

    let mut edge_entries = Vec::new();
    let mut edge_exits = Vec::new();
    let mut queue_history = Vec::new();
    let mut transit_history = Vec::new();
    let mut active = 0usize;
    let mut last_stage = 0;

    for t in 1..=cutoff {
        if t > horizon && active == 0 {
            break;
        }
        last_stage = t;
        let mut entries = vec![0u64; m];
        let mut exits = vec![0u64; m];
        let mut budget = vec![0u64; m];

        // Transit completes: join the head queue behind everyone already there.
        for e in 0..m {
            while let Some(&(head_at, a)) = in_transit[e].front() {
                if head_at != t {
                    break;
                }
                in_transit[e].pop_front();
                queues[e].push_back(Occupant::Player(a));
            }
        }

        // Occupants that reached the head before any same-stage newcomer leave first.
        let mut mobile: Vec<usize> = Vec::new();
        for e in 0..m {
            let gamma = net.edge(e).capacity;
            let n = (queues[e].len() as u64).min(gamma);
            for _ in 0..n {
                if let Some(Occupant::Player(a)) = queues[e].pop_front() {
                    let ag = &mut agents[a];
                    ag.legs.last_mut().expect("leg").exit = t;
                    ag.pos += 1;
                    if ag.pos == ag.route.len() {
                        ag.arrival = Some(t);
                        active -= 1;
                    } else {
                        mobile.push(a);
                    }
                }
            }
            exits[e] = n;
            budget[e] = gamma - n;
        }

        if t <= horizon {
            for (i, route) in profile.generation(t).iter().enumerate() {
                agents.push(Agent {
                    id: PlayerId::new(t, i as u64 + 1),
                    route,
                    pos: 0,
                    legs: Vec::new(),
                    arrival: None,
                });
                mobile.push(agents.len() - 1);
                active += 1;
            }
        }

        // Everyone entering an edge this stage shares the entry stage, so
        // their queue order is pure priority: move them one at a time in
        // priority order, each as far as zero-transit edges allow.
        mobile.sort_by_key(|&a| agents[a].id);
        for a in mobile {
            loop {
                let ag = &mut agents[a];
                let e = ag.route.edges()[ag.pos];
                entries[e] += 1;
                ag.legs.push(Leg { edge: e, entry: t, exit: 0 });
                let tau = net.edge(e).transit;
                if tau > 0 {
                    in_transit[e].push_back((t + tau, a));
                    break;
                }
                if budget[e] > 0 && queues[e].is_empty() {
                    budget[e] -= 1;
                    exits[e] += 1;
                    ag.legs.last_mut().expect("leg").exit = t;
                    ag.pos += 1;
                    if ag.pos == ag.route.len() {
                        ag.arrival = Some(t);
                        active -= 1;
                        break;
                    }
                } else {
                    queues[e].push_back(Occupant::Player(a));
                    break;
                }
            }
        }

        edge_entries.push(entries);
        edge_exits.push(exits);
        queue_history.push(queues.iter().map(|q| q.len() as u64).collect());
        transit_history.push(in_transit.iter().map(|q| q.len() as u64).collect());
    }

    let mut per_player = BTreeMap::new();
    let mut route_counts: BTreeMap<(u64, Route), u64> = BTreeMap::new();
    let mut per_stage: Vec<StageTotals> = (1..=horizon)
        .map(|stage| StageTotals { stage, transit: 0, waiting: 0, latency: 0, complete: true })
        .collect();
    for ag in &agents {
        let t = ag.id.generation;
        *route_counts.entry((t, ag.route.clone())).or_default() += 1;
        let st = &mut per_stage[(t - 1) as usize];
        match ag.arrival {
            Some(arr) => {
                let latency = arr - t;
                let transit = ag.route.transit(net);
                let waiting = latency - transit;
                st.transit += transit;
                st.waiting += waiting;
                st.latency += latency;
                per_player.insert(
                    ag.id,
                    PlayerOutcome { transit, waiting, latency, arrival: arr, legs: ag.legs.clone() },
                );
            }
            None => st.complete = false,
        }
    }

    Ok(Trajectory {
        horizon,
        last_stage,
        per_player,
        per_stage,
        route_counts,
        edge_entries,
        edge_exits,
        final_queues: queues.iter().map(|q| q.len() as u64).collect(),
        queue_history,
        transit_history,
    })
}

/// Exact mean of the per-stage totals over `first..=last`.
pub fn average_latency(traj: &Trajectory, first: u64, last: u64) -> Result<Q> {
    if first == 0 || last < first {
        return Err(Error::IncompleteWindow { stage: first });
    }
    let mut sum = 0u64;
    for t in first..=last {
        match traj.stage(t) {
            Some(s) if s.complete => sum += s.latency,
            _ => return Err(Error::IncompleteWindow { stage: t }),
        }
    }
    Ok(frac(sum, last - first + 1))
}

/// CSV export, one row per stage of the complete prefix.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("stage,c_t,w_t,l_t,avg_to_date\n");
    let mut sum = 0u64;
    for st in traj.per_stage.iter().take_while(|s| s.complete) {
        sum += st.latency;
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            st.stage,
            st.transit,
            st.waiting,
            st.latency,
            decimal(frac(sum, st.stage))
        ));
    }
    s
}
