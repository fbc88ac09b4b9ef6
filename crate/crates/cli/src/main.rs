mod report;
mod reproduce;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use dyncong::cut::capacity;
use dyncong::dynsim::{average_latency, simulate, trajectory_csv, InflowProfile, StrategyProfile};
use dyncong::equilib::{
    beq, detect_steady_state, greedy_ufr, registered_policies, weq, RoutePreference,
    TieBreakPolicy, DEFAULT_MAX_HORIZON,
};
use dyncong::forms::{chain_opt, chain_weq, transient_schedule, ChainDecomposition, ParallelProfile};
use dyncong::generators::{gen_braess, gen_example, gen_pigou, Example};
use dyncong::metrics::{braess_ratio_from, paradox_probe, BraessOptions, Probe};
use dyncong::network::Network;
use dyncong::optflow::{min_cost_flow, opt_strategy};
use dyncong::rational::{q, Q};
use dyncong::scenario::Scenario;
use dyncong::seasonal::{
    distance_to_uniform, per_period_costs, planner_profile, seasonal_parallel_opt, seasonal_parallel_weq,
    seasonality_gap, simulated_seasonal_weq, PeriodicInflow,
};
use dyncong::Error;

use report::{grid, Format, Report};

#[derive(Parser)]
#[command(name = "dyncong", version, about = "Dynamic congestion games with deterministic queues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file; standard input when omitted.
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Write the main output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Uniform inflow per stage; overrides the scenario's inflow.
    #[arg(long)]
    delta: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a strategy profile and print per-stage totals.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        horizon: Option<u64>,
        /// Profile file; otherwise the scenario's profile, otherwise a greedy equilibrium.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value = "worst", value_parser = parse_tie_break)]
        tie_break: TieBreakArg,
    },
    /// Build an equilibrium and report its periodic regime.
    Equilibrium {
        #[command(flatten)]
        common: Common,
        /// Largest horizon searched for a repeated state.
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long, default_value = "worst", value_parser = parse_tie_break)]
        tie_break: TieBreakArg,
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
    /// Static min-cost flow and its repetition over time.
    Optimum {
        #[command(flatten)]
        common: Common,
        /// Generations written with --emit-profile.
        #[arg(long, default_value_t = 20)]
        horizon: u64,
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
    /// Efficiency measures and paradox probes.
    Metrics {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        poa: bool,
        #[arg(long)]
        pos: bool,
        #[arg(long)]
        braess_ratio: bool,
        #[arg(long, default_value_t = 1)]
        max_removal: usize,
        /// `queue:<edge>:<len>` or `transit:<edge>:<amount>`; repeatable.
        #[arg(long)]
        probe: Vec<String>,
    },
    /// Periodic inflow: distance to uniform and per-period costs.
    Seasonal {
        #[command(flatten)]
        common: Common,
        /// Comma-separated periodic inflow; overrides the scenario.
        #[arg(long, value_delimiter = ',')]
        inflow: Option<Vec<u64>>,
        #[arg(long)]
        horizon: Option<u64>,
        /// Also print one shortest sequence of elementary operations.
        #[arg(long)]
        distance: bool,
    },
    /// Closed forms beside simulated values.
    Forms {
        #[command(flatten)]
        common: Common,
        /// 2 for parallel networks, 3 for chains of parallel modules.
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        theorem: u8,
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Print a generated network.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a named worked example and compare with the expected values.
    Reproduce {
        /// One of the example names, or `all`.
        name: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    Braess { k: usize },
    Pigou { n: u64, p: u32 },
    Example { name: String },
}

#[derive(Debug, Clone)]
enum TieBreakArg {
    Worst,
    Best,
    File(PathBuf),
    /// A policy defined in the scenario or registered for the network.
    Named(String),
}

fn parse_tie_break(s: &str) -> Result<TieBreakArg, String> {
    match s {
        "worst" => Ok(TieBreakArg::Worst),
        "best" => Ok(TieBreakArg::Best),
        _ => {
            if let Some(p) = s.strip_prefix("file:") {
                Ok(TieBreakArg::File(PathBuf::from(p)))
            } else if let Some(l) = s.strip_prefix("policy:") {
                Ok(TieBreakArg::Named(l.to_string()))
            } else {
                Err("expected worst, best, file:<path> or policy:<label>".into())
            }
        }
    }
}

fn located(path: &str, e: Error) -> anyhow::Error {
    match e {
        Error::Parse { line, msg } => anyhow!("{path}:{line}: {msg}"),
        other => anyhow!("{path}: {other}"),
    }
}

fn domain(e: Error) -> anyhow::Error {
    anyhow!(e)
}

trait Dom<T> {
    fn dom(self) -> anyhow::Result<T>;
}

impl<T> Dom<T> for dyncong::Result<T> {
    fn dom(self) -> anyhow::Result<T> {
        self.map_err(domain)
    }
}

fn read_text(path: Option<&Path>) -> anyhow::Result<(String, String)> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok((p.display().to_string(), text))
        }
        None => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text).context("cannot read standard input")?;
            Ok(("<stdin>".into(), text))
        }
    }
}

fn load(common: &Common) -> anyhow::Result<Scenario> {
    let (name, text) = read_text(common.file.as_deref())?;
    Scenario::parse(&text).map_err(|e| located(&name, e))
}

/// Uniform `--delta`, then the scenario's inflow, then the network capacity.
fn inflow_of(common: &Common, s: &Scenario) -> InflowProfile {
    let inflow = match (common.delta, &s.inflow) {
        (Some(d), _) => InflowProfile::Uniform(d),
        (None, Some(i)) => i.clone(),
        (None, None) => InflowProfile::Uniform(capacity(&s.network)),
    };
    let cap = capacity(&s.network);
    if inflow.average() > q(cap) {
        eprintln!("warning: average inflow {} exceeds network capacity {cap}; queues will grow", inflow.average());
    }
    inflow
}

fn uniform_delta(common: &Common, s: &Scenario) -> anyhow::Result<u64> {
    match inflow_of(common, s) {
        InflowProfile::Uniform(d) => Ok(d),
        InflowProfile::Periodic(_) => bail!("this command needs a uniform inflow; pass --delta"),
    }
}

fn resolve_policy(arg: &TieBreakArg, s: &Scenario) -> anyhow::Result<(String, TieBreakPolicy)> {
    Ok(match arg {
        TieBreakArg::Worst => ("worst".into(), TieBreakPolicy::WorstCase),
        TieBreakArg::Best => ("best".into(), TieBreakPolicy::BestCase),
        TieBreakArg::File(p) => {
            let (name, text) = read_text(Some(p))?;
            let pref = RoutePreference::parse(&text).map_err(|e| located(&name, e))?;
            pref.bind(&s.network).map_err(|e| located(&name, e))?;
            (name, TieBreakPolicy::Explicit(pref))
        }
        TieBreakArg::Named(label) => {
            if let Some(p) = s.policy(label) {
                (label.clone(), TieBreakPolicy::Explicit(p.clone()))
            } else if let Some(p) = registered_policies(&s.network).into_iter().find(|p| &p.label == label) {
                (label.clone(), p.policy)
            } else {
                bail!("no policy `{label}` in the scenario or registered for this network")
            }
        }
    })
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))
}

fn max_horizon(h: Option<u64>, s: &Scenario) -> u64 {
    h.or(s.horizon).unwrap_or(DEFAULT_MAX_HORIZON)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Simulate { common, horizon, profile, tie_break } => {
            let s = load(&common)?;
            let inflow = inflow_of(&common, &s);
            let horizon = horizon.or(s.horizon).unwrap_or(50);
            let profile = match (&profile, &s.profile) {
                (Some(p), _) => {
                    let (name, text) = read_text(Some(p))?;
                    StrategyProfile::parse(&text, &s.network).map_err(|e| located(&name, e))?
                }
                (None, Some(p)) => p.clone(),
                (None, None) => {
                    let (_, policy) = resolve_policy(&tie_break, &s)?;
                    greedy_ufr(&s.network, &inflow, &policy, horizon).dom()?
                }
            };
            let traj = simulate(&s.network, &inflow, &profile, horizon).dom()?;
            let text = match common.format {
                Format::Csv => trajectory_csv(&traj),
                Format::Table => {
                    let rows: Vec<Vec<String>> = traj
                        .per_stage
                        .iter()
                        .map(|st| {
                            vec![
                                st.stage.to_string(),
                                st.transit.to_string(),
                                st.waiting.to_string(),
                                st.latency.to_string(),
                                if st.complete { "yes" } else { "no" }.to_string(),
                            ]
                        })
                        .collect();
                    grid(&["stage", "transit", "waiting", "latency", "complete"], &rows, Format::Table)
                }
            };
            emit(common.out.as_deref(), &text)?;
        }
        Command::Equilibrium { common, horizon, tie_break, emit_profile } => {
            let s = load(&common)?;
            let inflow = inflow_of(&common, &s);
            let (label, policy) = resolve_policy(&tie_break, &s)?;
            let st = detect_steady_state(&s.network, &inflow, &policy, max_horizon(horizon, &s)).dom()?;
            let mut r = Report::default();
            r.text("policy", &label);
            r.text("onset", st.onset);
            r.text("period", st.period);
            r.num("cycle_average", st.cycle_average);
            r.text("cycle_latencies", join(&st.cycle_latencies));
            for (i, counts) in st.cycle_route_counts.iter().enumerate() {
                let routes: Vec<String> =
                    counts.iter().map(|(route, n)| format!("{}x{}", route.label(&s.network), n)).collect();
                r.text(format!("generation_{}", st.onset + i as u64), routes.join(" "));
            }
            emit(common.out.as_deref(), &r.render(common.format))?;
            if let Some(p) = emit_profile {
                let h = (st.onset + st.period - 1).max(inflow.period());
                let profile = greedy_ufr(&s.network, &inflow, &policy, h).dom()?;
                write_file(&p, &profile.to_text(&s.network))?;
            }
        }
        Command::Optimum { common, horizon, emit_profile } => {
            let s = load(&common)?;
            let delta = uniform_delta(&common, &s)?;
            let f = min_cost_flow(&s.network, delta).dom()?;
            let mut rows: Vec<Vec<String>> = s
                .network
                .edges()
                .iter()
                .zip(&f.edge_flow)
                .map(|(e, n)| vec!["edge".into(), e.name.clone(), "flow".into(), n.to_string()])
                .collect();
            for (route, n) in &f.route_flow {
                rows.push(vec!["route".into(), route.label(&s.network), "flow".into(), n.to_string()]);
            }
            let mut text = match common.format {
                Format::Table => rows.iter().map(|r| r.join(" ") + "\n").collect::<String>(),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rows.into_iter().map(|r| vec![r[0].clone(), r[1].clone(), r[3].clone()]).collect();
                    grid(&["kind", "id", "flow"], &rows, Format::Csv)
                }
            };
            if common.format == Format::Table {
                text.push_str(&format!("asymptotic average total latency {}\n", dyncong::rational::show(q(f.cost))));
            }
            emit(common.out.as_deref(), &text)?;
            if let Some(p) = emit_profile {
                write_file(&p, &opt_strategy(&s.network, delta, horizon).dom()?.to_text(&s.network))?;
            }
        }
        Command::Metrics { common, horizon, poa, pos, braess_ratio, max_removal, probe } => {
            let s = load(&common)?;
            let delta = uniform_delta(&common, &s)?;
            let probes = probe.iter().map(|p| Probe::parse(p)).collect::<dyncong::Result<Vec<_>>>().dom()?;
            let all = !(poa || pos || braess_ratio || !probes.is_empty());
            let h = max_horizon(horizon, &s);
            let net = &s.network;
            let inflow = InflowProfile::Uniform(delta);
            let mut r = Report::default();
            let opt = || dyncong::optflow::opt_value(net, delta);
            if all {
                r.num("opt", opt().dom()?);
            }
            let need_weq = all || poa || braess_ratio;
            let w = if need_weq { Some(weq(net, &inflow, h).dom()?) } else { None };
            if all || pos {
                let b = beq(net, &inflow, h).dom()?;
                if all {
                    r.num("beq", b.value);
                    r.text("beq_policy", &b.policy);
                }
                if all || pos {
                    r.num("pos", ratio(b.value, opt().dom()?, "the best equilibrium")?);
                }
            }
            if let Some(w) = &w {
                if all {
                    r.num("weq", w.value);
                    r.text("weq_policy", &w.policy);
                }
                if all || poa {
                    r.num("poa", ratio(w.value, opt().dom()?, "the worst equilibrium")?);
                }
                if braess_ratio {
                    let opts = BraessOptions { max_removal, max_horizon: h, ..BraessOptions::default() };
                    let br = braess_ratio_from(net, delta, w.value, opts).dom()?;
                    r.num("braess_ratio", br.ratio);
                    r.text("braess_witness", if br.witness.is_empty() { "-".into() } else { br.witness.join(",") });
                    if let Some(x) = br.reduced_weq {
                        r.num("braess_reduced_weq", x);
                    }
                    r.text("braess_evaluated", br.evaluated);
                    r.text("braess_skipped", br.skipped);
                }
            }
            for p in &probes {
                let res = paradox_probe(net, &inflow, p, h).dom()?;
                r.num(format!("probe {p} before"), res.before.value);
                r.num(format!("probe {p} after"), res.after.value);
                r.text(format!("probe {p} paradox"), if res.paradox() { "yes" } else { "no" });
            }
            emit(common.out.as_deref(), &r.render(common.format))?;
        }
        Command::Seasonal { common, inflow, horizon, distance } => {
            let s = load(&common)?;
            let values = match (inflow, &s.inflow) {
                (Some(v), _) => v,
                (None, Some(InflowProfile::Periodic(v))) => v.clone(),
                (None, Some(InflowProfile::Uniform(d))) => vec![*d],
                (None, None) => bail!("no inflow: add `inflow periodic ...` or pass --inflow"),
            };
            let d = PeriodicInflow::new(values).dom()?;
            let h = max_horizon(horizon, &s);
            let dist = distance_to_uniform(&d).dom()?;
            let mut r = Report::default();
            r.text("period", d.period());
            r.text("gamma", d.gamma().dom()?);
            r.text("distance", dist.distance);
            if distance {
                for (i, v) in dist.path.iter().enumerate() {
                    r.text(format!("step_{i}"), join(v.values()));
                }
            }
            if ParallelProfile::new(&s.network, 0).is_ok() {
                r.num("opt_per_period formula", seasonal_parallel_opt(&s.network, &d).dom()?);
                let sim_h = (d.period() * (d.gamma().dom()? + 4) * 4).max(4 * d.period());
                let p = planner_profile(&s.network, &d.to_inflow(), sim_h).dom()?;
                let traj = simulate(&s.network, &d.to_inflow(), &p, sim_h).dom()?;
                let last = per_period_costs(&traj, d.period()).last().copied();
                r.text("opt_per_period planner", last.map_or("-".into(), |x| x.to_string()));
                r.num("weq_per_period formula", seasonal_parallel_weq(&s.network, &d).dom()?);
                r.num("weq_per_period simulated", simulated_seasonal_weq(&s.network, &d, h).dom()?);
            } else {
                let g = seasonality_gap(&s.network, &d, h).dom()?;
                r.num("weq_per_period periodic", g.periodic_per_period);
                r.num("weq_per_period uniform", g.uniform_per_period);
                r.num("gap", g.gap);
            }
            emit(common.out.as_deref(), &r.render(common.format))?;
        }
        Command::Forms { common, theorem, horizon } => {
            let s = load(&common)?;
            let net = &s.network;
            let h = max_horizon(horizon, &s);
            let mut r = Report::default();
            if theorem == 2 {
                let delta = uniform_delta(&common, &s)?;
                let p = ParallelProfile::new(net, delta).dom()?;
                r.text("delta", delta);
                r.text("boundary_edge", p.boundary_edge().map_or("-".into(), |e| net.edge(e).name.clone()));
                r.num("opt formula", p.opt(net));
                r.num("opt simulated", simulated_opt(net, delta)?);
                r.num("weq formula", p.weq(net));
                let st = detect_steady_state(net, &InflowProfile::Uniform(delta), &TieBreakPolicy::WorstCase, h).dom()?;
                r.num("weq simulated", st.cycle_average);
                r.text("steady_counts", join(&p.steady_counts(net)));
                r.text("onset", st.onset);
                if let Ok(t) = transient_schedule(net, delta) {
                    for (j, x) in t.thresholds.iter().enumerate() {
                        r.num(format!("threshold_{}", j + 1), *x);
                    }
                }
            } else {
                let c = ChainDecomposition::new(net).dom()?;
                r.text("modules", c.modules.len());
                r.text("bottleneck", c.bottleneck + 1);
                r.text("capacity", c.capacity);
                r.num("opt formula", chain_opt(net).dom()?);
                r.num("opt simulated", simulated_opt(net, c.capacity)?);
                r.num("weq formula", chain_weq(net).dom()?);
                let inflow = InflowProfile::Uniform(c.capacity);
                let st = detect_steady_state(net, &inflow, &TieBreakPolicy::WorstCase, h).dom()?;
                r.num("weq simulated", st.cycle_average);
            }
            emit(common.out.as_deref(), &r.render(common.format))?;
        }
        Command::Generate { kind, out } => {
            let net = match kind {
                GenerateKind::Braess { k } => {
                    if k == 0 {
                        bail!("braess order must be positive");
                    }
                    gen_braess(k)
                }
                GenerateKind::Pigou { n, p } => {
                    if n < 2 || p < 1 {
                        bail!("pigou needs N >= 2 and p >= 1");
                    }
                    gen_pigou(n, p).dom()?
                }
                GenerateKind::Example { name } => match Example::from_name(&name) {
                    Some(ex) => gen_example(ex),
                    None => {
                        let known: Vec<&str> = Example::ALL.iter().map(|e| e.name()).collect();
                        bail!("unknown example `{name}`; known: {}", known.join(", "))
                    }
                },
            };
            emit(out.as_deref(), &net.to_text())?;
        }
        Command::Reproduce { name, format, out } => {
            let Some(checks) = reproduce::run(&name) else {
                bail!("unknown example `{name}`; known: {}, all", reproduce::NAMES.join(", "));
            };
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        c.example.to_string(),
                        c.name.clone(),
                        c.expected.clone(),
                        c.computed.clone(),
                        if c.ok() { "ok" } else { "MISMATCH" }.to_string(),
                    ]
                })
                .collect();
            emit(out.as_deref(), &grid(&["example", "check", "expected", "computed", "status"], &rows, format))?;
            return Ok(checks.iter().all(|c| c.ok()));
        }
    }
    Ok(true)
}

/// Per-stage latency once the repeated optimum has reached steady state.
fn simulated_opt(net: &Network, delta: u64) -> anyhow::Result<Q> {
    let h = net.total_transit() + 10;
    let p = opt_strategy(net, delta, h).dom()?;
    let traj = simulate(net, &InflowProfile::Uniform(delta), &p, h).dom()?;
    average_latency(&traj, h, h).dom()
}

fn ratio(x: Q, opt: Q, what: &str) -> anyhow::Result<Q> {
    if opt == q(0) {
        if x == q(0) {
            return Ok(q(1));
        }
        return Err(domain(Error::UnboundedRatio(what.into())));
    }
    Ok(x / opt)
}

fn join(v: &[u64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
