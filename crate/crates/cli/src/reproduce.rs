//! Named reproductions: each runs the library pipeline for one worked
//! example and compares the result with the published value.

use dyncong::classify::{classify, Topology};
use dyncong::cut::{capacity, min_cut};
use dyncong::dynsim::{average_latency, simulate, InflowProfile, StrategyProfile};
use dyncong::equilib::{
    beq_over, detect_steady_state, verify_nash, verify_ufr, weq, weq_over, NamedPolicy, NashVerdict, TieBreakPolicy,
    UfrVerdict,
};
use dyncong::forms::{chain_opt, chain_weq, parallel_opt, parallel_weq};
use dyncong::generators::*;
use dyncong::metrics::{braess_ratio, braess_ratio_from, paradox_probe, poa, pos, BraessOptions, Probe};
use dyncong::network::Network;
use dyncong::optflow::{min_cost_flow, opt_strategy, opt_value};
use dyncong::rational::Q;
use dyncong::seasonal::{
    distance_to_uniform, elementary_successors, per_period_costs, seasonal_parallel_opt, seasonal_parallel_weq,
    seasonality_gap, PeriodicInflow,
};
use dyncong::Result;

pub const NAMES: [&str; 7] =
    ["structures", "example1", "example2", "wheatstone-braess", "braess-family", "example4", "nash-not-ufr"];

const MAX_H: u64 = 2000;

#[derive(Debug, Clone)]
pub struct Check {
    pub example: &'static str,
    pub name: String,
    pub expected: String,
    pub computed: String,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.expected == self.computed
    }
}

struct Checks {
    example: &'static str,
    out: Vec<Check>,
}

impl Checks {
    fn add(&mut self, name: impl Into<String>, expected: impl ToString, computed: Result<impl ToString>) {
        self.out.push(Check {
            example: self.example,
            name: name.into(),
            expected: expected.to_string(),
            computed: match computed {
                Ok(v) => v.to_string(),
                Err(e) => format!("error: {e}"),
            },
        });
    }
}

pub fn run(name: &str) -> Option<Vec<Check>> {
    if name == "all" {
        return Some(NAMES.iter().flat_map(|n| run(n).expect("known name")).collect());
    }
    let example = *NAMES.iter().find(|n| **n == name)?;
    let mut c = Checks { example, out: Vec::new() };
    match example {
        "structures" => structures(&mut c),
        "example1" => example1(&mut c),
        "example2" => example2(&mut c),
        "wheatstone-braess" => wheatstone(&mut c),
        "braess-family" => braess_family(&mut c),
        "example4" => example4(&mut c),
        "nash-not-ufr" => nash_not_ufr(&mut c),
        _ => unreachable!(),
    }
    Some(c.out)
}

/// Long-run per-stage latency of a fixed profile: the mean over the last
/// `window` complete stages.
fn tail_average(net: &Network, inflow: &InflowProfile, p: &StrategyProfile, horizon: u64, window: u64) -> Result<Q> {
    let traj = simulate(net, inflow, p, horizon)?;
    average_latency(&traj, horizon - window + 1, horizon)
}

fn labels(net: &Network) -> Result<String> {
    Ok(net.routes()?.iter().map(|r| r.label(net)).collect::<Vec<_>>().join(" "))
}

fn pairs(net: &Network) -> String {
    net.edges().iter().map(|e| format!("({},{})", e.transit, e.capacity)).collect::<Vec<_>>().join(" ")
}

fn names(net: &Network, edges: &[usize]) -> String {
    edges.iter().map(|&e| net.edge(e).name.clone()).collect::<Vec<_>>().join(",")
}

fn structures(c: &mut Checks) {
    let f2 = gen_example(Example::Fig2);
    let f3 = gen_example(Example::Fig3);
    let w = gen_example(Example::Wheatstone);
    let two = gen_example(Example::SeasonalTwoEdge);
    c.add("wheatstone violations", 0, Ok(w.validate().len()));
    c.add("fig2 routes", 6, f2.routes().map(|r| r.len()));
    c.add("wheatstone routes", "e1,e3,e5 e1,e4 e2,e5", labels(&w));
    c.add("wheatstone capacity", 2, Ok(capacity(&w)));
    let cut = min_cut(&f3);
    c.add("fig3 capacity", 3, Ok(cut.capacity));
    c.add("fig3 cut", "e1,e4", Ok(names(&f3, &cut.cut_edges)));
    c.add("parallel topology", "parallel", Ok(topology(&two)));
    c.add("fig2 topology", "chain 3+2", Ok(topology(&f2)));
    let b1 = gen_braess(1);
    let costs: Result<Vec<String>> = b1.routes().map(|rs| {
        let mut v: Vec<u64> = rs.iter().map(|r| r.transit(&b1)).collect();
        v.sort();
        v.iter().map(|x| x.to_string()).collect()
    });
    c.add("braess1 route costs", "0 1 1", costs.map(|v| v.join(" ")));
    let b2 = gen_braess(2);
    c.add("braess2 vertices", 6, Ok(b2.vertices().len()));
    c.add("braess2 capacity", 3, Ok(capacity(&b2)));
    c.add("pigou(2,1) edges", "(1,2) (2,1)", gen_pigou(2, 1).map(|n| pairs(&n)));
    c.add("pigou(2,1) capacity", 3, gen_pigou(2, 1).map(|n| capacity(&n)));
    c.add("fig3 edges", "(0,2) (0,1) (1,1) (1,1)", Ok(pairs(&f3)));
    c.add("wheatstone edges", "(0,1) (1,1) (0,1) (1,1) (0,1)", Ok(pairs(&w)));
    c.add("two-edge edges", "(1,1) (2,1)", Ok(pairs(&two)));
    c.add("pigou(2,1) weq at capacity", 6, gen_pigou(2, 1).and_then(|n| parallel_weq(&n, 3)));
    c.add("pigou(3,1) weq at capacity", 12, gen_pigou(3, 1).and_then(|n| parallel_weq(&n, 4)));
}

fn topology(net: &Network) -> String {
    match classify(net) {
        Topology::Parallel => "parallel".into(),
        Topology::ChainOfParallel(ms) => {
            format!("chain {}", ms.iter().map(|m| m.edges.len().to_string()).collect::<Vec<_>>().join("+"))
        }
        Topology::SeriesParallel => "series-parallel".into(),
        Topology::General => "general".into(),
    }
}

fn example1(c: &mut Checks) {
    let net = gen_example(Example::Fig2);
    let two = InflowProfile::Uniform(2);
    c.add("stationary profile latency", 6, tail_average(&net, &two, &fig2_stationary_profile(50), 50, 10));
    c.add(
        "stationary profile is Nash",
        "pass",
        verify_nash(&net, &two, &fig2_stationary_profile(12), 12).map(|v| verdict(v == NashVerdict::Pass)),
    );
    c.add("periodic profile latency", 6, tail_average(&net, &two, &fig2_periodic_profile(50), 50, 10));
    c.add("worst-case greedy latency", 6, detect_steady_state(&net, &two, &TieBreakPolicy::WorstCase, MAX_H).map(|s| s.cycle_average));
    let periodic = TieBreakPolicy::Explicit(fig2_periodic_preference());
    let s = detect_steady_state(&net, &two, &periodic, MAX_H);
    c.add("periodic preference period", 2, s.as_ref().map(|s| s.period).map_err(Clone::clone));
    c.add("periodic preference latency", 6, s.map(|s| s.cycle_average));
    c.add("chain opt", 5, chain_opt(&net));
    c.add("chain weq", 6, chain_weq(&net));
    c.add("min-cost flow opt", 5, opt_value(&net, 2));
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn example2(c: &mut Checks) {
    let net = gen_example(Example::Fig3);
    let three = InflowProfile::Uniform(3);
    c.add("equilibrium profile latency", 4, tail_average(&net, &three, &fig3_equilibrium_profile(30), 30, 10));
    c.add("worst equilibrium", 4, weq(&net, &three, MAX_H).map(|v| v.value));
    for (probe, after) in [("queue:e2:1", 3), ("transit:e2:1", 3)] {
        let r = Probe::parse(probe).and_then(|p| paradox_probe(&net, &three, &p, MAX_H));
        c.add(
            format!("{probe} before/after"),
            format!("4 -> {after} paradox"),
            r.map(|r| format!("{} -> {}{}", r.before.value, r.after.value, if r.paradox() { " paradox" } else { "" })),
        );
    }
}

fn wheatstone(c: &mut Checks) {
    let net = gen_example(Example::Wheatstone);
    let two = InflowProfile::Uniform(2);
    c.add("equilibrium profile latency", 6, tail_average(&net, &two, &wheatstone_equilibrium_profile(30), 30, 20));
    c.add(
        "equilibrium profile is UFR",
        "pass",
        verify_ufr(&net, &two, &wheatstone_equilibrium_profile(12), 12).map(|v| verdict(v == UfrVerdict::Pass)),
    );
    c.add("worst equilibrium", 6, weq(&net, &two, MAX_H).map(|v| v.value));
    let f = min_cost_flow(&net, 2);
    c.add("opt cost", 2, f.as_ref().map(|f| f.cost).map_err(Clone::clone));
    c.add(
        "opt routes",
        "e1,e4 e2,e5",
        f.map(|f| f.route_flow.iter().map(|(r, _)| r.label(&net)).collect::<Vec<_>>().join(" ")),
    );
    let sim = opt_strategy(&net, 2, 20).and_then(|p| simulate(&net, &two, &p, 20));
    c.add(
        "opt per stage, waiting",
        "2, 0",
        sim.map(|t| {
            let s = t.per_stage.last().expect("stages");
            format!("{}, {}", s.latency, t.per_stage.iter().map(|s| s.waiting).sum::<u64>())
        }),
    );
    let reduced = net.without_edges(&[net.edge_index("e3").expect("e3")]).expect("still connected");
    c.add("weq without e3", 2, weq(&reduced, &two, MAX_H).map(|v| v.value));
    let br = braess_ratio(&net, 2, BraessOptions::default());
    c.add("braess ratio", 3, br.as_ref().map(|b| b.ratio).map_err(Clone::clone));
    c.add("braess witness", "e3", br.map(|b| b.witness.join(",")));
}

fn braess_family(c: &mut Checks) {
    for k in 1..=3usize {
        let net = gen_braess(k);
        let delta = k as u64 + 1;
        let inflow = InflowProfile::Uniform(delta);
        let worst = [NamedPolicy::new("slow", TieBreakPolicy::Explicit(braess_worst_preference(k)))];
        let best = [NamedPolicy::new("fast", TieBreakPolicy::Explicit(braess_best_preference(k)))];
        let opt = opt_value(&net, delta);
        let w = weq_over(&net, &inflow, MAX_H, &worst).map(|v| v.value);
        let b = beq_over(&net, &inflow, MAX_H, &best).map(|v| v.value);
        c.add(format!("k={k} opt"), delta, opt.clone());
        c.add(format!("k={k} weq (slow preference)"), (k + 1) * (2 * k + 1), w.clone());
        c.add(format!("k={k} beq (fast preference)"), delta, b.clone());
        let ratio = |x: Result<Q>| -> Result<Q> { Ok(x? / opt.clone()?) };
        c.add(format!("k={k} poa"), 2 * k + 1, ratio(w.clone()));
        c.add(format!("k={k} pos"), 1, ratio(b));
        let opts = BraessOptions { max_removal: k, ..BraessOptions::default() };
        let br = w.and_then(|w| braess_ratio_from(&net, delta, w, opts));
        c.add(format!("k={k} braess ratio"), 2 * k + 1, br.map(|b| b.ratio));
    }
    let b2 = gen_braess(2);
    c.add("braess2 poa (library)", 5, poa(&b2, 3, MAX_H));
    c.add("braess2 pos (library)", 1, pos(&b2, 3, MAX_H));
}

fn example4(c: &mut Checks) {
    let net = gen_example(Example::SeasonalTwoEdge);
    let d = PeriodicInflow::new(vec![6, 0, 0]).expect("non-empty");
    c.add("gamma", 2, d.gamma());
    c.add(
        "successors of (6,0,0)",
        "5,1,0",
        elementary_successors(&d).map(|v| v.iter().map(|x| join(x.values())).collect::<Vec<_>>().join(" ")),
    );
    c.add("distance", 6, distance_to_uniform(&d).map(|x| x.distance));
    c.add("seasonal opt", 15, seasonal_parallel_opt(&net, &d));
    c.add("seasonal weq", 18, seasonal_parallel_weq(&net, &d));
    let inflow = seasonal_inflow();
    let period_cost = |p: StrategyProfile| -> Result<u64> {
        let traj = simulate(&net, &inflow, &p, 30)?;
        Ok(*per_period_costs(&traj, 3).last().expect("complete periods"))
    };
    c.add("optimal profile per period", 15, period_cost(seasonal_opt_profile(30)));
    c.add("equilibrium profile per period", 18, period_cost(seasonal_equilibrium_profile(30)));
    c.add("uniform opt per stage", 3, parallel_opt(&net, 2));
    c.add("gap over uniform", 6, seasonality_gap(&net, &d, MAX_H).map(|g| g.gap));
    let traj = opt_strategy(&net, 2, 10).and_then(|p| simulate(&net, &InflowProfile::Uniform(2), &p, 10));
    c.add(
        "opt players per edge per stage",
        "1,1",
        traj.map(|t| join(&t.edge_entries[9])),
    );
    c.add(
        "uniform weq per stage",
        4,
        detect_steady_state(&net, &InflowProfile::Uniform(2), &TieBreakPolicy::WorstCase, MAX_H).map(|s| s.cycle_average),
    );
}

fn join(v: &[u64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn nash_not_ufr(c: &mut Checks) {
    let net = gen_example(Example::TwoByTwo);
    let two = InflowProfile::Uniform(2);
    c.add("profile latency", 9, tail_average(&net, &two, &nash_not_ufr_profile(30), 30, 10));
    let p = nash_not_ufr_profile(12);
    c.add("Nash check", "pass", verify_nash(&net, &two, &p, 12).map(|v| verdict(v == NashVerdict::Pass)));
    c.add("UFR check", "fail", verify_ufr(&net, &two, &p, 12).map(|v| verdict(v == UfrVerdict::Pass)));
}
