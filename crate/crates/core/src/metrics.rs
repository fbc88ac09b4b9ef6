//! Price of anarchy, price of stability, Braess ratio and paradox probes.

use std::fmt;

use rayon::prelude::*;

use crate::cut::capacity;
use crate::dynsim::InflowProfile;
use crate::equilib::{beq, weq, EquilibriumValue};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::optflow::opt_value;
use crate::rational::{q, Q};

fn ratio(num: Q, den: Q, what: &str) -> Result<Q> {
    if den == q(0) {
        if num == q(0) {
            return Ok(q(1));
        }
        return Err(Error::UnboundedRatio(what.to_string()));
    }
    Ok(num / den)
}

/// Worst constructed equilibrium over the optimum, under uniform inflow `delta`.
pub fn poa(net: &Network, delta: u64, max_horizon: u64) -> Result<Q> {
    let w = weq(net, &InflowProfile::Uniform(delta), max_horizon)?;
    ratio(w.value, opt_value(net, delta)?, "the worst equilibrium")
}

/// Best constructed equilibrium over the optimum.
pub fn pos(net: &Network, delta: u64, max_horizon: u64) -> Result<Q> {
    let b = beq(net, &InflowProfile::Uniform(delta), max_horizon)?;
    ratio(b.value, opt_value(net, delta)?, "the best equilibrium")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BraessOptions {
    pub max_removal: usize,
    pub max_horizon: u64,
    /// Largest number of removal subsets to evaluate.
    pub budget: usize,
}

impl Default for BraessOptions {
    fn default() -> Self {
        BraessOptions { max_removal: 1, max_horizon: crate::equilib::DEFAULT_MAX_HORIZON, budget: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraessRatio {
    /// At least 1; exactly 1 when no removal helps.
    pub ratio: Q,
    /// Edge names of the best removal, empty when none helps.
    pub witness: Vec<String>,
    pub reduced_weq: Option<Q>,
    pub evaluated: usize,
    /// Subsets that disconnect the network or leave capacity below the inflow.
    pub skipped: usize,
}

fn subsets(m: usize, max_size: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, budget: usize) -> Result<()> {
        for e in start..m {
            cur.push(e);
            if out.len() == budget {
                return Err(Error::SearchBudgetExceeded { budget });
            }
            out.push(cur.clone());
            if left > 1 {
                rec(e + 1, m, left - 1, cur, out, budget)?;
            }
            cur.pop();
        }
        Ok(())
    }
    if max_size > 0 {
        rec(0, m, max_size, &mut cur, &mut out, budget)?;
    }
    out.sort_by_key(|s| s.len());
    Ok(out)
}

/// Largest `weq(net) / weq(net - S)` over removal sets `S` of at most
/// `max_removal` edges that keep capacity at least `delta`.
pub fn braess_ratio(net: &Network, delta: u64, opts: BraessOptions) -> Result<BraessRatio> {
    let base = weq(net, &InflowProfile::Uniform(delta), opts.max_horizon)?.value;
    braess_ratio_from(net, delta, base, opts)
}

/// As [`braess_ratio`], with the original network's worst equilibrium given.
pub fn braess_ratio_from(net: &Network, delta: u64, base: Q, opts: BraessOptions) -> Result<BraessRatio> {
    let sets = subsets(net.edges().len(), opts.max_removal, opts.budget)?;
    let inflow = InflowProfile::Uniform(delta);
    let results: Vec<Option<Result<Q>>> = sets
        .par_iter()
        .map(|s| {
            let reduced = net.without_edges(s)?;
            if capacity(&reduced) < delta {
                return None;
            }
            Some(weq(&reduced, &inflow, opts.max_horizon).map(|v| v.value))
        })
        .collect();
    let mut best = BraessRatio { ratio: q(1), witness: Vec::new(), reduced_weq: None, evaluated: 0, skipped: 0 };
    for (s, r) in sets.iter().zip(results) {
        let Some(r) = r else {
            best.skipped += 1;
            continue;
        };
        best.evaluated += 1;
        let w = r?;
        let rho = ratio(base, w, "the reduced worst equilibrium")?;
        if rho > best.ratio {
            best.ratio = rho;
            best.witness = s.iter().map(|&e| net.edge(e).name.clone()).collect();
            best.reduced_weq = Some(w);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Probe {
    /// Adds `len` initial-queue blockers to the named edge.
    AddInitialQueue { edge: String, len: u64 },
    IncreaseTransit { edge: String, amount: u64 },
}

impl Probe {
    /// `queue:<edge>:<len>` or `transit:<edge>:<amount>`.
    pub fn parse(s: &str) -> Result<Probe> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse { line: 1, msg: format!("bad probe `{s}`; expected queue:<edge>:<n> or transit:<edge>:<n>") };
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: u64 = parts[2].parse().map_err(|_| bad())?;
        let edge = parts[1].to_string();
        match parts[0] {
            "queue" => Ok(Probe::AddInitialQueue { edge, len: n }),
            "transit" => Ok(Probe::IncreaseTransit { edge, amount: n }),
            _ => Err(bad()),
        }
    }

    pub fn apply(&self, net: &Network) -> Result<Network> {
        let find = |name: &str| net.edge_index(name).ok_or_else(|| Error::UnknownEdge(name.to_string()));
        Ok(match self {
            Probe::AddInitialQueue { edge, len } => {
                let e = find(edge)?;
                net.with_initial_queue(e, net.initial_queue(e) + len)
            }
            Probe::IncreaseTransit { edge, amount } => {
                let e = find(edge)?;
                net.with_transit(e, net.edge(e).transit + amount)
            }
        })
    }

    pub fn kind(&self) -> ParadoxKind {
        match self {
            Probe::AddInitialQueue { .. } => ParadoxKind::InitialQueue,
            Probe::IncreaseTransit { .. } => ParadoxKind::TransitIncrease,
        }
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probe::AddInitialQueue { edge, len } => write!(f, "queue:{edge}:{len}"),
            Probe::IncreaseTransit { edge, amount } => write!(f, "transit:{edge}:{amount}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParadoxKind {
    EdgeRemoval,
    InitialQueue,
    TransitIncrease,
}

impl fmt::Display for ParadoxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParadoxKind::EdgeRemoval => "edge-removal",
            ParadoxKind::InitialQueue => "initial-queue",
            ParadoxKind::TransitIncrease => "transit-increase",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadoxFlag {
    pub kind: ParadoxKind,
    pub detail: String,
    pub before: Q,
    pub after: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeResult {
    pub probe: Probe,
    pub before: EquilibriumValue,
    pub after: EquilibriumValue,
}

impl ProbeResult {
    /// A degradation of the network that lowers the worst equilibrium.
    pub fn paradox(&self) -> bool {
        self.after.value < self.before.value
    }

    pub fn flag(&self) -> Option<ParadoxFlag> {
        self.paradox().then(|| ParadoxFlag {
            kind: self.probe.kind(),
            detail: self.probe.to_string(),
            before: self.before.value,
            after: self.after.value,
        })
    }
}

pub fn paradox_probe(net: &Network, inflow: &InflowProfile, probe: &Probe, max_horizon: u64) -> Result<ProbeResult> {
    let modified = probe.apply(net)?;
    Ok(ProbeResult {
        probe: probe.clone(),
        before: weq(net, inflow, max_horizon)?,
        after: weq(&modified, inflow, max_horizon)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficiencyReport {
    pub delta: u64,
    pub opt: Q,
    pub weq: EquilibriumValue,
    pub beq: EquilibriumValue,
    pub poa: Q,
    pub pos: Q,
    pub braess: Option<BraessRatio>,
    pub paradox_flags: Vec<ParadoxFlag>,
}

/// Everything at once; the Braess search runs only if `braess` is given.
pub fn efficiency_report(
    net: &Network,
    delta: u64,
    max_horizon: u64,
    braess: Option<BraessOptions>,
    probes: &[Probe],
) -> Result<EfficiencyReport> {
    let inflow = InflowProfile::Uniform(delta);
    let opt = opt_value(net, delta)?;
    let w = weq(net, &inflow, max_horizon)?;
    let b = beq(net, &inflow, max_horizon)?;
    let poa = ratio(w.value, opt, "the worst equilibrium")?;
    let pos = ratio(b.value, opt, "the best equilibrium")?;
    let braess = braess.map(|o| braess_ratio_from(net, delta, w.value, o)).transpose()?;
    let mut paradox_flags = Vec::new();
    if let Some(br) = &braess {
        if br.ratio > q(1) {
            paradox_flags.push(ParadoxFlag {
                kind: ParadoxKind::EdgeRemoval,
                detail: br.witness.join(","),
                before: w.value,
                after: br.reduced_weq.expect("witness has a value"),
            });
        }
    }
    for p in probes {
        if let Some(f) = paradox_probe(net, &inflow, p, max_horizon)?.flag() {
            paradox_flags.push(f);
        }
    }
    Ok(EfficiencyReport { delta, opt, weq: w, beq: b, poa, pos, braess, paradox_flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_braess, gen_example, gen_pigou, Example};
    use crate::rational::frac;

    #[test]
    fn braess_two_prices() {
        let net = gen_braess(2);
        assert_eq!(poa(&net, 3, 500).unwrap(), q(5));
        assert_eq!(pos(&net, 3, 500).unwrap(), q(1));
    }

    #[test]
    fn pigou_poa() {
        assert_eq!(poa(&gen_pigou(2, 2).unwrap(), 5, 500).unwrap(), frac(10, 6));
    }

    #[test]
    fn single_edge_prices() {
        let net = Network::parse("network one\nvertex s\nvertex d\nedge a s d tau=2 gamma=3\nsource s\ndest d\n").unwrap();
        assert_eq!(poa(&net, 3, 100).unwrap(), q(1));
        assert_eq!(pos(&net, 3, 100).unwrap(), q(1));
    }

    #[test]
    fn wheatstone_removal() {
        let net = gen_example(Example::Wheatstone);
        let br = braess_ratio(&net, 2, BraessOptions::default()).unwrap();
        assert_eq!(br.ratio, q(3));
        assert_eq!(br.witness, vec!["e3"]);
        assert_eq!(br.reduced_weq, Some(q(2)));
    }

    #[test]
    fn parallel_removal_never_helps() {
        let br = braess_ratio(&gen_pigou(2, 1).unwrap(), 3, BraessOptions::default()).unwrap();
        assert_eq!(br.ratio, q(1));
        assert!(br.witness.is_empty());
        assert_eq!(br.evaluated, 0);
    }

    #[test]
    fn budget() {
        let opts = BraessOptions { max_removal: 3, budget: 10, ..BraessOptions::default() };
        assert_eq!(braess_ratio(&gen_braess(2), 3, opts), Err(Error::SearchBudgetExceeded { budget: 10 }));
    }

    #[test]
    fn fig3_probes() {
        let net = gen_example(Example::Fig3);
        let inflow = InflowProfile::Uniform(3);
        for p in ["queue:e2:1", "transit:e2:1"] {
            let r = paradox_probe(&net, &inflow, &Probe::parse(p).unwrap(), 500).unwrap();
            assert_eq!((r.before.value, r.after.value), (q(4), q(3)), "{p}");
            assert!(r.paradox());
        }
    }

    #[test]
    fn probe_parsing() {
        assert_eq!(Probe::parse("queue:e2:1").unwrap(), Probe::AddInitialQueue { edge: "e2".into(), len: 1 });
        assert!(Probe::parse("queue:e2").is_err());
        assert!(Probe::parse("jam:e2:1").is_err());
        let net = gen_example(Example::Fig3);
        assert_eq!(Probe::parse("queue:zz:1").unwrap().apply(&net), Err(Error::UnknownEdge("zz".into())));
    }

    #[test]
    fn unused_edge_queue_is_harmless() {
        let net = Network::parse(
            "network p\nvertex s\nvertex d\nedge a s d tau=1 gamma=2\nedge b s d tau=5 gamma=1\nsource s\ndest d\n",
        )
        .unwrap();
        let r = paradox_probe(&net, &InflowProfile::Uniform(2), &Probe::parse("queue:b:3").unwrap(), 200).unwrap();
        assert_eq!(r.before.value, r.after.value);
    }
}
