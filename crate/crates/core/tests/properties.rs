mod common;

use dyncong::cut::{capacity, max_flow, min_cut};
use dyncong::dynsim::{simulate, split_capacities, InflowProfile, PlayerId};
use dyncong::equilib::{detect_steady_state, greedy_ufr, verify_ufr, TieBreakPolicy, UfrVerdict};
use dyncong::forms::{chain_opt, chain_weq, ChainDecomposition};
use dyncong::metrics::efficiency_report;
use dyncong::network::{Network, NetworkBuilder};
use dyncong::optflow::opt_value;
use dyncong::rational::q;
use dyncong::scenario::Scenario;
use dyncong::seasonal::{distance_to_uniform, elementary_successors, PeriodicInflow};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;

const MAX_H: u64 = 2000;

/// Random network with a uniform inflow at most its capacity.
fn instance(seed: u64, max_vertices: usize, max_edges: usize) -> (Network, u64, StdRng) {
    let mut rng = StdRng::seed_from_u64(seed);
    let net = random_network(&mut rng, max_vertices, max_edges, 3, 3);
    let delta = rng.gen_range(1..=capacity(&net));
    (net, delta, rng)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn conservation_capacity_and_fifo(seed in any::<u64>(), extra in 0u64..3) {
        let (net, delta, mut rng) = instance(seed, 5, 8);
        let e0 = rng.gen_range(0..net.edges().len());
        let net = net.with_initial_queue(e0, rng.gen_range(0..3));
        let inflow = InflowProfile::Uniform(delta + extra);
        let profile = random_profile(&mut rng, &net, &inflow, 8);
        let traj = simulate(&net, &inflow, &profile, 8).unwrap();
        let m = net.edges().len();
        let mut entered = vec![0u64; m];
        let mut left = vec![0u64; m];
        for t in 0..traj.edge_entries.len() {
            for e in 0..m {
                entered[e] += traj.edge_entries[t][e];
                left[e] += traj.edge_exits[t][e];
                prop_assert!(traj.edge_exits[t][e] <= net.edge(e).capacity);
                prop_assert_eq!(
                    entered[e] + net.initial_queue(e) - left[e],
                    traj.transit_history[t][e] + traj.queue_history[t][e]
                );
            }
        }
        // Occupants of one queue leave in (entry stage, priority) order.
        for e in 0..m {
            let mut legs: Vec<(u64, PlayerId, u64)> = traj
                .per_player
                .iter()
                .flat_map(|(p, o)| o.legs.iter().filter(|l| l.edge == e).map(move |l| (l.entry, *p, l.exit)))
                .collect();
            legs.sort();
            prop_assert!(legs.windows(2).all(|w| w[0].2 <= w[1].2));
        }
        for (p, o) in &traj.per_player {
            let route = profile.route(*p);
            prop_assert_eq!(o.transit, route.transit(&net));
            prop_assert_eq!(o.latency, o.transit + o.waiting);
        }
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>()) {
        let (net, delta, mut rng) = instance(seed, 6, 10);
        let inflow = InflowProfile::Uniform(delta);
        let profile = random_profile(&mut rng, &net, &inflow, 10);
        prop_assert_eq!(simulate(&net, &inflow, &profile, 10), simulate(&net, &inflow, &profile, 10));
    }

    #[test]
    fn greedy_is_insulated_from_later_players(seed in any::<u64>(), cut in 1u64..8) {
        let (net, delta, _) = instance(seed, 5, 8);
        let inflow = InflowProfile::Uniform(delta);
        let p = greedy_ufr(&net, &inflow, &TieBreakPolicy::WorstCase, 8).unwrap();
        let full = simulate(&net, &inflow, &p, 8).unwrap();
        let part = simulate(&net, &inflow, &p.truncated(cut), cut).unwrap();
        for (id, o) in &part.per_player {
            prop_assert_eq!(o.latency, full.per_player[id].latency);
        }
    }

    #[test]
    fn max_flow_matches_brute_force_cut(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let net = random_network(&mut rng, 6, 10, 2, 5);
        let f = max_flow(&net).value;
        prop_assert_eq!(f, min_cut(&net).capacity);
        prop_assert_eq!(f, brute_force_cut(&net));
    }

    #[test]
    fn routes_are_valid_sorted_and_distinct(seed in any::<u64>()) {
        let (net, _, _) = instance(seed, 6, 10);
        let routes = net.routes().unwrap();
        prop_assert!(routes.windows(2).all(|w| w[0] < w[1]));
        for r in &routes {
            prop_assert!(net.check_route(r).is_ok());
        }
        prop_assert_eq!(routes, net.routes().unwrap());
    }

    #[test]
    fn scenario_round_trip(seed in any::<u64>(), horizon in 1u64..50) {
        let (net, delta, _) = instance(seed, 6, 10);
        let mut s = Scenario::new(net);
        s.inflow = Some(InflowProfile::Uniform(delta));
        s.horizon = Some(horizon);
        let text = s.to_text();
        let back = Scenario::parse(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back, s);
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn greedy_profiles_are_ufr(seed in any::<u64>(), best in any::<bool>()) {
        let (net, delta, _) = instance(seed, 4, 6);
        let inflow = InflowProfile::Uniform(delta);
        let policy = if best { TieBreakPolicy::BestCase } else { TieBreakPolicy::WorstCase };
        let p = greedy_ufr(&net, &inflow, &policy, 6).unwrap();
        prop_assert_eq!(verify_ufr(&net, &inflow, &p, 6).unwrap(), UfrVerdict::Pass);
    }

    #[test]
    fn optimum_bounds_equilibrium(seed in any::<u64>()) {
        let (net, delta, _) = instance(seed, 5, 8);
        let inflow = InflowProfile::Uniform(delta);
        let opt = opt_value(&net, delta).unwrap();
        for policy in [TieBreakPolicy::WorstCase, TieBreakPolicy::BestCase] {
            let st = detect_steady_state(&net, &inflow, &policy, MAX_H).unwrap();
            prop_assert!(opt <= st.cycle_average);
        }
    }

    #[test]
    fn removal_never_lowers_the_optimum(seed in any::<u64>()) {
        let (net, delta, mut rng) = instance(seed, 6, 10);
        let e = rng.gen_range(0..net.edges().len());
        if let Some(reduced) = net.without_edges(&[e]) {
            if capacity(&reduced) >= delta {
                prop_assert!(opt_value(&reduced, delta).unwrap() >= opt_value(&net, delta).unwrap());
            }
        }
    }

    #[test]
    fn splitting_keeps_worst_equilibrium(seed in any::<u64>()) {
        let (net, delta, _) = instance(seed, 4, 6);
        let inflow = InflowProfile::Uniform(delta);
        let (split, _) = split_capacities(&net);
        let a = detect_steady_state(&net, &inflow, &TieBreakPolicy::WorstCase, MAX_H).unwrap();
        let b = detect_steady_state(&split, &inflow, &TieBreakPolicy::WorstCase, MAX_H).unwrap();
        prop_assert_eq!(a.cycle_average, b.cycle_average);
    }

    #[test]
    fn report_identities(seed in any::<u64>()) {
        let (net, delta, _) = instance(seed, 4, 6);
        let r = efficiency_report(&net, delta, MAX_H, None, &[]);
        if let Ok(r) = r {
            prop_assert_eq!(r.poa * r.opt, r.weq.value);
            prop_assert_eq!(r.pos * r.opt, r.beq.value);
            prop_assert!(r.beq.value <= r.weq.value);
        } else {
            // Only a zero optimum with a positive equilibrium has no ratio.
            prop_assert_eq!(opt_value(&net, delta).unwrap(), q(0));
        }
    }
}

fn chain(modules: &[Vec<(u64, u64)>]) -> Network {
    let mut b = NetworkBuilder::new("chain");
    for v in 0..=modules.len() {
        b.vertex(&format!("v{v}")).unwrap();
    }
    for (h, m) in modules.iter().enumerate() {
        for (i, &(tau, gamma)) in m.iter().enumerate() {
            b.edge(&format!("m{}e{}", h + 1, i + 1), &format!("v{h}"), &format!("v{}", h + 1), tau, gamma).unwrap();
        }
    }
    b.source("v0").unwrap();
    b.dest(&format!("v{}", modules.len())).unwrap();
    b.build().unwrap()
}

fn module() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((0u64..4, 1u64..3), 1..4)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn chain_weq_is_sum_of_modules(modules in prop::collection::vec(module(), 1..4)) {
        let net = chain(&modules);
        let c = ChainDecomposition::new(&net).unwrap();
        let st = detect_steady_state(&net, &InflowProfile::Uniform(c.capacity), &TieBreakPolicy::WorstCase, MAX_H).unwrap();
        prop_assert_eq!(st.cycle_average, chain_weq(&net).unwrap());
        prop_assert_eq!(opt_value(&net, c.capacity).unwrap(), chain_opt(&net).unwrap());
    }

    #[test]
    fn chain_weq_equals_opt_iff_used_edges_are_level(modules in prop::collection::vec(module(), 1..4)) {
        let net = chain(&modules);
        let c = ChainDecomposition::new(&net).unwrap();
        let (o, w) = (chain_opt(&net).unwrap(), chain_weq(&net).unwrap());
        prop_assert!(w >= o);
        let level = c.module_profiles(&net).iter().all(|p| match p.boundary {
            None => true,
            Some(b) => p.order[..=b].iter().all(|&e| net.edge(e).transit == net.edge(p.order[b]).transit),
        });
        prop_assert_eq!(w == o, level);
    }

    #[test]
    fn distance_matches_backlog(gamma in 0u64..4, k in 1usize..6, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let v = random_periodic(&mut rng, k, gamma);
        let d = PeriodicInflow::new(v.clone()).unwrap();
        let dist = distance_to_uniform(&d).unwrap();
        prop_assert_eq!(dist.distance, lindley_distance(&v));
        prop_assert_eq!(dist.distance == 0, d.is_uniform());
        // Every step of the returned path is an elementary operation.
        for w in dist.path.windows(2) {
            prop_assert!(elementary_successors(&w[0]).unwrap().contains(&w[1]));
            prop_assert_eq!(
                distance_to_uniform(&w[0]).unwrap().distance,
                distance_to_uniform(&w[1]).unwrap().distance + 1
            );
        }
    }

    #[test]
    fn distance_is_rotation_invariant(gamma in 0u64..4, k in 1usize..6, r in 0usize..6, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let v = random_periodic(&mut rng, k, gamma);
        let mut w = v.clone();
        w.rotate_left(r % k);
        let d = |x: Vec<u64>| distance_to_uniform(&PeriodicInflow::new(x).unwrap()).unwrap().distance;
        prop_assert_eq!(d(v), d(w));
    }
}
