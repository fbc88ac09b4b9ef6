//! The named networks and the route preferences that go with them.

use crate::dynsim::{InflowProfile, StrategyProfile};
use crate::equilib::policy::{PhasePreference, RoutePreference};
use crate::error::{Error, Result};
use crate::network::{Network, NetworkBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// Two parallel modules in series, transits (1,2,2) then (1,1).
    Fig2,
    /// Series-parallel network with the initial-queue paradox.
    Fig3,
    Wheatstone,
    /// Two parallel edges with transits 1 and 2.
    SeasonalTwoEdge,
    /// Two modules with transits (1,2) each; hosts the Nash-but-not-UFR profile.
    TwoByTwo,
}

impl Example {
    pub const ALL: [Example; 5] =
        [Example::Fig2, Example::Fig3, Example::Wheatstone, Example::SeasonalTwoEdge, Example::TwoByTwo];

    pub fn name(self) -> &'static str {
        match self {
            Example::Fig2 => "fig2",
            Example::Fig3 => "fig3",
            Example::Wheatstone => "wheatstone",
            Example::SeasonalTwoEdge => "seasonal_two_edge",
            Example::TwoByTwo => "two_by_two",
        }
    }

    pub fn from_name(s: &str) -> Option<Example> {
        Example::ALL.into_iter().find(|e| e.name() == s)
    }
}

type EdgeSpec<'a> = (&'a str, &'a str, &'a str, u64, u64);

fn build(name: &str, vertices: &[&str], edges: &[EdgeSpec], source: &str, dest: &str) -> Network {
    let mut b = NetworkBuilder::new(name);
    for v in vertices {
        b.vertex(v).expect("generator vertex");
    }
    for &(id, t, h, tau, gamma) in edges {
        b.edge(id, t, h, tau, gamma).expect("generator edge");
    }
    b.source(source).expect("generator source");
    b.dest(dest).expect("generator dest");
    b.build().expect("generator network")
}

pub fn gen_example(ex: Example) -> Network {
    match ex {
        Example::Fig2 => build(
            "fig2",
            &["s", "v", "d"],
            &[
                ("m1e1", "s", "v", 1, 1),
                ("m1e2", "s", "v", 2, 1),
                ("m1e3", "s", "v", 2, 1),
                ("m2e1", "v", "d", 1, 1),
                ("m2e2", "v", "d", 1, 1),
            ],
            "s",
            "d",
        ),
        Example::Fig3 => build(
            "fig3",
            &["s", "v", "d"],
            &[
                ("e1", "s", "v", 0, 2),
                ("e2", "v", "d", 0, 1),
                ("e3", "v", "d", 1, 1),
                ("e4", "s", "d", 1, 1),
            ],
            "s",
            "d",
        ),
        Example::Wheatstone => build(
            "wheatstone",
            &["s", "v", "w", "d"],
            &[
                ("e1", "s", "v", 0, 1),
                ("e2", "s", "w", 1, 1),
                ("e3", "v", "w", 0, 1),
                ("e4", "v", "d", 1, 1),
                ("e5", "w", "d", 0, 1),
            ],
            "s",
            "d",
        ),
        Example::SeasonalTwoEdge => build(
            "seasonal_two_edge",
            &["s", "d"],
            &[("e1", "s", "d", 1, 1), ("e2", "s", "d", 2, 1)],
            "s",
            "d",
        ),
        Example::TwoByTwo => build(
            "two_by_two",
            &["s", "v", "d"],
            &[
                ("m1e1", "s", "v", 1, 1),
                ("m1e2", "s", "v", 2, 1),
                ("m2e1", "v", "d", 1, 1),
                ("m2e2", "v", "d", 2, 1),
            ],
            "s",
            "d",
        ),
    }
}

/// Braess graph of order `k`: vertices s, v1..vk, w1..wk, d; unit capacities.
pub fn gen_braess(k: usize) -> Network {
    assert!(k >= 1, "braess order must be positive");
    let mut b = NetworkBuilder::new(&format!("braess{k}"));
    b.vertex("s").unwrap();
    for i in 1..=k {
        b.vertex(&format!("v{i}")).unwrap();
    }
    for i in 1..=k {
        b.vertex(&format!("w{i}")).unwrap();
    }
    b.vertex("d").unwrap();
    for i in 1..=k {
        let (v, w) = (format!("v{i}"), format!("w{i}"));
        b.edge(&format!("s_{v}"), "s", &v, 0, 1).unwrap();
        b.edge(&format!("{v}_{w}"), &v, &w, 0, 1).unwrap();
        b.edge(&format!("{w}_d"), &w, "d", 0, 1).unwrap();
    }
    for i in 2..=k {
        let (v, w) = (format!("v{i}"), format!("w{}", i - 1));
        b.edge(&format!("{v}_{w}"), &v, &w, 1, 1).unwrap();
    }
    b.edge("v1_d", "v1", "d", 1, 1).unwrap();
    b.edge(&format!("s_w{k}"), "s", &format!("w{k}"), 1, 1).unwrap();
    b.source("s").unwrap();
    b.dest("d").unwrap();
    b.build().unwrap()
}

/// Two parallel edges: (transit 1, capacity N^p) and (transit N, capacity 1).
pub fn gen_pigou(n: u64, p: u32) -> Result<Network> {
    let wide = n
        .checked_pow(p)
        .filter(|w| w.checked_add(1).is_some())
        .ok_or_else(|| Error::Overflow(format!("{n}^{p}")))?;
    Ok(build(
        &format!("pigou_{n}_{p}"),
        &["s", "d"],
        &[("wide", "s", "d", 1, wide), ("narrow", "s", "d", n, 1)],
        "s",
        "d",
    ))
}

/// Route P_i of the Braess graph.
fn braess_p(i: usize) -> Vec<String> {
    vec![format!("s_v{i}"), format!("v{i}_w{i}"), format!("w{i}_d")]
}

/// Route Q_i of the Braess graph, `1 <= i <= k+1`.
fn braess_q(k: usize, i: usize) -> Vec<String> {
    if i == 1 {
        vec!["s_v1".into(), "v1_d".into()]
    } else if i == k + 1 {
        vec![format!("s_w{k}"), format!("w{k}_d")]
    } else {
        vec![format!("s_v{i}"), format!("v{i}_w{}", i - 1), format!("w{}_d", i - 1)]
    }
}

/// P1 > ... > Pk > Q1 > Q(k+1) > Q2 > ... > Qk: the preference that builds
/// the slow equilibrium.
pub fn braess_worst_preference(k: usize) -> RoutePreference {
    let mut list: Vec<Vec<String>> = (1..=k).map(braess_p).collect();
    list.push(braess_q(k, 1));
    list.push(braess_q(k, k + 1));
    list.extend((2..=k).map(|i| braess_q(k, i)));
    RoutePreference::single(list)
}

/// Q1 > ... > Q(k+1) > P1 > ... > Pk: every tie goes to a route that
/// avoids the zero-transit rungs, so queues never form.
pub fn braess_best_preference(k: usize) -> RoutePreference {
    let mut list: Vec<Vec<String>> = (1..=k + 1).map(|i| braess_q(k, i)).collect();
    list.extend((1..=k).map(braess_p));
    RoutePreference::single(list)
}

fn names(route: &[&str]) -> Vec<String> {
    route.iter().map(|s| s.to_string()).collect()
}

/// Two-phase preference on [`Example::Fig2`] that settles into the period-2
/// equilibrium in which odd generations use the fast first edge.
pub fn fig2_periodic_preference() -> RoutePreference {
    let all = [
        ["m1e1", "m2e1"],
        ["m1e1", "m2e2"],
        ["m1e2", "m2e1"],
        ["m1e2", "m2e2"],
        ["m1e3", "m2e1"],
        ["m1e3", "m2e2"],
    ];
    let ordered = |first: &[[&str; 2]]| -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = first.iter().map(|r| names(r)).collect();
        for r in &all {
            if !first.contains(r) {
                out.push(names(r));
            }
        }
        out
    };
    RoutePreference {
        phases: vec![
            PhasePreference::new(ordered(&[["m1e1", "m2e1"], ["m1e1", "m2e2"]])),
            PhasePreference::new(ordered(&[["m1e2", "m2e1"], ["m1e3", "m2e2"]])),
        ],
    }
}

/// Index-dependent preference on [`Example::Fig3`]: the second and third
/// player of each generation favour the slow branch through `e3`.
pub fn fig3_worst_preference() -> RoutePreference {
    let r12 = names(&["e1", "e2"]);
    let r13 = names(&["e1", "e3"]);
    let r4 = names(&["e4"]);
    let mut phase = PhasePreference::new(vec![r12.clone(), r13.clone(), r4.clone()]);
    phase.by_index.insert(2, vec![r13.clone(), r4.clone(), r12.clone()]);
    phase.by_index.insert(3, vec![r13, r12, r4]);
    RoutePreference { phases: vec![phase] }
}

fn labelled(net: &Network, inflow: &InflowProfile, horizon: u64, f: impl Fn(u64, u64) -> &'static str) -> StrategyProfile {
    StrategyProfile::from_fn(inflow, horizon, |id| {
        net.parse_route(f(id.generation, id.index)).expect("fixture route")
    })
}

/// Stationary equilibrium on [`Example::Fig2`] with `delta = 2`: after the
/// first generation the first player goes fast and the second slow.
pub fn fig2_stationary_profile(horizon: u64) -> StrategyProfile {
    let net = gen_example(Example::Fig2);
    labelled(&net, &InflowProfile::Uniform(2), horizon, |t, i| match (t, i) {
        (1, 1) => "m1e1,m2e1",
        (1, _) => "m1e1,m2e2",
        (_, 1) => "m1e1,m2e1",
        _ => "m1e2,m2e2",
    })
}

/// Period-2 equilibrium on [`Example::Fig2`] with `delta = 2`.
pub fn fig2_periodic_profile(horizon: u64) -> StrategyProfile {
    let net = gen_example(Example::Fig2);
    labelled(&net, &InflowProfile::Uniform(2), horizon, |t, i| match (t % 2, i) {
        (1, 1) => "m1e1,m2e1",
        (1, _) => "m1e1,m2e2",
        (_, 1) => "m1e2,m2e1",
        _ => "m1e3,m2e2",
    })
}

/// Slow equilibrium on [`Example::Fig3`] with `delta = 3`.
pub fn fig3_equilibrium_profile(horizon: u64) -> StrategyProfile {
    let net = gen_example(Example::Fig3);
    labelled(&net, &InflowProfile::Uniform(3), horizon, |t, i| match (t, i) {
        (1, 2) => "e1,e3",
        (1, _) => "e1,e2",
        (_, 1) => "e1,e2",
        (_, 2) => "e4",
        _ => "e1,e3",
    })
}

/// Slow UFR equilibrium on [`Example::Wheatstone`] with `delta = 2`; from
/// generation 5 on nobody uses the bridge.
pub fn wheatstone_equilibrium_profile(horizon: u64) -> StrategyProfile {
    let net = gen_example(Example::Wheatstone);
    labelled(&net, &InflowProfile::Uniform(2), horizon, |t, i| match (t, i) {
        (1, _) | (2, 1) | (3, 1) | (4, 2) => "e1,e3,e5",
        (2, _) | (4, _) => "e2,e5",
        (3, _) => "e1,e4",
        (_, 1) => "e1,e4",
        _ => "e2,e5",
    })
}

/// Inflow `(6, 0, 0)` on [`Example::SeasonalTwoEdge`].
pub fn seasonal_inflow() -> InflowProfile {
    InflowProfile::Periodic(vec![6, 0, 0])
}

/// Optimum for [`seasonal_inflow`]: odd players take the fast edge.
pub fn seasonal_opt_profile(horizon: u64) -> StrategyProfile {
    let net = gen_example(Example::SeasonalTwoEdge);
    labelled(&net, &seasonal_inflow(), horizon, |_, i| if i % 2 == 1 { "e1" } else { "e2" })
}

/// Worst equilibrium for [`seasonal_inflow`]: the first generation loads
/// the fast edge with four players, later ones alternate.
pub fn seasonal_equilibrium_profile(horizon: u64) -> StrategyProfile {
    let net = gen_example(Example::SeasonalTwoEdge);
    labelled(&net, &seasonal_inflow(), horizon, |t, i| match (t, i) {
        (1, i) if i == 1 || i % 2 == 0 => "e1",
        (1, _) => "e2",
        (_, i) if i % 2 == 1 => "e1",
        _ => "e2",
    })
}

/// Nash profile on [`Example::TwoByTwo`] with `delta = 2` in which players
/// reach the middle vertex late and the total latency settles at 9.
pub fn nash_not_ufr_profile(horizon: u64) -> StrategyProfile {
    let net = gen_example(Example::TwoByTwo);
    labelled(&net, &InflowProfile::Uniform(2), horizon, |t, i| match (t, i) {
        (1 | 2, _) => "m1e1,m2e1",
        (3, 1) => "m1e2,m2e1",
        (3, _) => "m1e1,m2e1",
        (_, 1) => "m1e2,m2e2",
        _ => "m1e1,m2e1",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::capacity;

    #[test]
    fn example_shapes() {
        let f3 = gen_example(Example::Fig3);
        let tau: Vec<u64> = f3.edges().iter().map(|e| e.transit).collect();
        let gamma: Vec<u64> = f3.edges().iter().map(|e| e.capacity).collect();
        assert_eq!(tau, vec![0, 0, 1, 1]);
        assert_eq!(gamma, vec![2, 1, 1, 1]);
        let w = gen_example(Example::Wheatstone);
        let tau: Vec<u64> = w.edges().iter().map(|e| e.transit).collect();
        assert_eq!(tau, vec![0, 1, 0, 1, 0]);
        assert!(w.edges().iter().all(|e| e.capacity == 1));
        for ex in Example::ALL {
            assert!(gen_example(ex).validate().is_empty(), "{}", ex.name());
        }
    }

    #[test]
    fn braess_counts() {
        for k in 1..=5 {
            let net = gen_braess(k);
            assert!(net.validate().is_empty());
            assert_eq!(net.vertices().len(), 2 * k + 2);
            assert_eq!(net.edges().len(), 4 * k + 1);
            assert_eq!(net.routes().unwrap().len(), 2 * k + 1);
        }
        assert_eq!(gen_braess(3).edges().len(), 13);
        assert_eq!(capacity(&gen_braess(2)), 3);
    }

    #[test]
    fn braess_one_route_costs() {
        let net = gen_braess(1);
        let cost = |names: &[&str]| net.route_from_names(names).unwrap().transit(&net);
        assert_eq!(cost(&["s_v1", "v1_w1", "w1_d"]), 0);
        assert_eq!(cost(&["s_v1", "v1_d"]), 1);
        assert_eq!(cost(&["s_w1", "w1_d"]), 1);
    }

    #[test]
    fn pigou_shapes() {
        let net = gen_pigou(3, 2).unwrap();
        let pairs: Vec<(u64, u64)> = net.edges().iter().map(|e| (e.transit, e.capacity)).collect();
        assert_eq!(pairs, vec![(1, 9), (3, 1)]);
        assert_eq!(capacity(&gen_pigou(2, 1).unwrap()), 3);
        assert_eq!(capacity(&gen_pigou(2, 2).unwrap()), 5);
        assert!(matches!(gen_pigou(10, 30), Err(Error::Overflow(_))));
    }

    #[test]
    fn preferences_cover_all_routes() {
        for k in 1..=4 {
            let net = gen_braess(k);
            braess_worst_preference(k).bind(&net).unwrap();
            braess_best_preference(k).bind(&net).unwrap();
        }
        fig2_periodic_preference().bind(&gen_example(Example::Fig2)).unwrap();
        fig3_worst_preference().bind(&gen_example(Example::Fig3)).unwrap();
    }

    fn stage_latencies(ex: Example, inflow: &InflowProfile, p: &StrategyProfile, h: u64) -> Vec<u64> {
        let traj = crate::dynsim::simulate(&gen_example(ex), inflow, p, h).unwrap();
        traj.per_stage.iter().map(|s| s.latency).collect()
    }

    #[test]
    fn fixture_latencies() {
        let two = InflowProfile::Uniform(2);
        let l = stage_latencies(Example::Fig2, &two, &fig2_stationary_profile(20), 20);
        assert!(l[1..].iter().all(|&x| x == 6), "{l:?}");
        let l = stage_latencies(Example::Fig2, &two, &fig2_periodic_profile(20), 20);
        assert!(l.chunks(2).skip(1).all(|c| c[0] + c[1] == 12), "{l:?}");
        let l = stage_latencies(Example::Fig3, &InflowProfile::Uniform(3), &fig3_equilibrium_profile(20), 20);
        assert!(l[1..].iter().all(|&x| x == 4), "{l:?}");
        let l = stage_latencies(Example::Wheatstone, &two, &wheatstone_equilibrium_profile(20), 20);
        assert!(l[5..].iter().all(|&x| x == 6), "{l:?}");
        let l = stage_latencies(Example::TwoByTwo, &two, &nash_not_ufr_profile(20), 20);
        assert!(l[3..].iter().all(|&x| x == 9), "{l:?}");
    }

    #[test]
    fn seasonal_fixture_latencies() {
        let traj = crate::dynsim::simulate(
            &gen_example(Example::SeasonalTwoEdge),
            &seasonal_inflow(),
            &seasonal_equilibrium_profile(12),
            12,
        )
        .unwrap();
        let first: Vec<u64> = (1..=6).map(|i| traj.per_player[&crate::dynsim::PlayerId::new(1, i)].latency).collect();
        assert_eq!(first, vec![1, 2, 2, 3, 3, 4]);
        let later: Vec<u64> = (1..=6).map(|i| traj.per_player[&crate::dynsim::PlayerId::new(4, i)].latency).collect();
        assert_eq!(later, vec![2, 2, 3, 3, 4, 4]);
    }
}
