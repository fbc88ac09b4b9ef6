//! Tie-break rules applied when several routes reach every vertex equally early.

use std::collections::{BTreeMap, HashSet};

use crate::dynsim::PlayerId;
use crate::error::{Error, Result};
use crate::generators;
use crate::network::{parse_uint, tokens, Network, Route};

/// Route order for one phase; `by_index[i]` overrides `default` for player `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePreference {
    pub default: Vec<Vec<String>>,
    pub by_index: BTreeMap<u64, Vec<Vec<String>>>,
}

impl PhasePreference {
    pub fn new(default: Vec<Vec<String>>) -> Self {
        PhasePreference { default, by_index: BTreeMap::new() }
    }
}

/// Route preference by edge names. Generation `t` uses phase `(t-1) % phases.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutePreference {
    pub phases: Vec<PhasePreference>,
}

impl RoutePreference {
    pub fn single(list: Vec<Vec<String>>) -> Self {
        RoutePreference { phases: vec![PhasePreference::new(list)] }
    }

    /// Resolves names against `net`; every list must name each route exactly once.
    pub fn bind(&self, net: &Network) -> Result<BoundPreference> {
        if self.phases.is_empty() {
            return Err(Error::InvalidPreference("no phases".into()));
        }
        let all = net.routes()?;
        let resolve = |list: &[Vec<String>]| -> Result<Vec<usize>> {
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(list.len());
            for names in list {
                let r = net
                    .route_from_names(names)
                    .map_err(|e| Error::InvalidPreference(format!("{}: {e}", names.join(","))))?;
                let k = all.iter().position(|x| *x == r).expect("valid route is enumerated");
                if !seen.insert(k) {
                    return Err(Error::InvalidPreference(format!("route {} listed twice", r.label(net))));
                }
                out.push(k);
            }
            if out.len() != all.len() {
                let missing: Vec<String> =
                    (0..all.len()).filter(|k| !seen.contains(k)).map(|k| all[k].label(net)).collect();
                return Err(Error::InvalidPreference(format!("missing routes: {}", missing.join(" "))));
            }
            Ok(out)
        };
        let mut phases = Vec::new();
        for p in &self.phases {
            let default = resolve(&p.default)?;
            let mut by_index = BTreeMap::new();
            for (&i, list) in &p.by_index {
                by_index.insert(i, resolve(list)?);
            }
            phases.push(BoundPhase { default, by_index });
        }
        Ok(BoundPreference { routes: all, phases })
    }

    /// Text form: `phase` opens a phase, `prefer [<i>] <e1,e2,...>` appends a route.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.phases {
            s.push_str("phase\n");
            for r in &p.default {
                s.push_str(&format!("prefer {}\n", r.join(",")));
            }
            for (i, list) in &p.by_index {
                for r in list {
                    s.push_str(&format!("prefer {i} {}\n", r.join(",")));
                }
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<RoutePreference> {
        let mut phases: Vec<PhasePreference> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks = tokens(raw);
            if let Some(keep) = Self::feed(&mut phases, line, &toks)? {
                if !keep {
                    return Err(Error::Parse { line, msg: format!("unknown directive `{}`", toks[0]) });
                }
            }
        }
        if phases.is_empty() {
            return Err(Error::Parse { line: text.lines().count() + 1, msg: "no `prefer` lines".into() });
        }
        Ok(RoutePreference { phases })
    }

    /// One line of the text form. `None` for blank lines, `Some(false)` for
    /// directives that belong to someone else.
    pub(crate) fn feed(phases: &mut Vec<PhasePreference>, line: usize, toks: &[&str]) -> Result<Option<bool>> {
        if toks.is_empty() {
            return Ok(None);
        }
        let split = |s: &str| -> Vec<String> { s.split(',').map(|x| x.trim().to_string()).collect() };
        match toks[0] {
            "phase" if toks.len() == 1 => phases.push(PhasePreference::new(Vec::new())),
            "prefer" if toks.len() == 2 || toks.len() == 3 => {
                if phases.is_empty() {
                    phases.push(PhasePreference::new(Vec::new()));
                }
                let p = phases.last_mut().expect("phase");
                if toks.len() == 2 {
                    p.default.push(split(toks[1]));
                } else {
                    let idx = parse_uint(line, toks[1], "player index")?;
                    if idx == 0 {
                        return Err(Error::Parse { line, msg: "player indices start at 1".into() });
                    }
                    p.by_index.entry(idx).or_default().push(split(toks[2]));
                }
            }
            "phase" | "prefer" => {
                return Err(Error::Parse { line, msg: "expected `phase` or `prefer [<i>] <edges>`".into() })
            }
            _ => return Ok(Some(false)),
        }
        Ok(Some(true))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundPhase {
    pub default: Vec<usize>,
    pub by_index: BTreeMap<u64, Vec<usize>>,
}

/// A preference resolved to positions in `routes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundPreference {
    pub routes: Vec<Route>,
    pub phases: Vec<BoundPhase>,
}

impl BoundPreference {
    /// Route positions in preference order for player `p`.
    pub fn order(&self, p: PlayerId) -> &[usize] {
        let ph = &self.phases[((p.generation - 1) % self.phases.len() as u64) as usize];
        ph.by_index.get(&p.index).unwrap_or(&ph.default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieBreakPolicy {
    /// Prefer edges on which the player would not wait, then lower edge index.
    BestCase,
    /// Prefer edges on which the player would wait, then lower edge index.
    WorstCase,
    Explicit(RoutePreference),
}

impl TieBreakPolicy {
    pub fn label(&self) -> &'static str {
        match self {
            TieBreakPolicy::BestCase => "best",
            TieBreakPolicy::WorstCase => "worst",
            TieBreakPolicy::Explicit(_) => "explicit",
        }
    }

    /// Number of distinct generation phases the policy cycles through.
    pub fn phases(&self) -> u64 {
        match self {
            TieBreakPolicy::Explicit(p) => p.phases.len().max(1) as u64,
            _ => 1,
        }
    }
}

/// A policy with a label for reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedPolicy {
    pub label: String,
    pub policy: TieBreakPolicy,
}

impl NamedPolicy {
    pub fn new(label: &str, policy: TieBreakPolicy) -> Self {
        NamedPolicy { label: label.to_string(), policy }
    }
}

/// Built-in explicit preferences that bind to `net`, matched by structure.
pub fn registered_policies(net: &Network) -> Vec<NamedPolicy> {
    let mut candidates = vec![
        NamedPolicy::new("fig2-periodic", TieBreakPolicy::Explicit(generators::fig2_periodic_preference())),
        NamedPolicy::new("fig3-worst", TieBreakPolicy::Explicit(generators::fig3_worst_preference())),
    ];
    let m = net.edges().len();
    if m >= 5 && (m - 1).is_multiple_of(4) {
        let k = (m - 1) / 4;
        candidates.push(NamedPolicy::new(
            &format!("braess{k}-worst"),
            TieBreakPolicy::Explicit(generators::braess_worst_preference(k)),
        ));
        candidates.push(NamedPolicy::new(
            &format!("braess{k}-best"),
            TieBreakPolicy::Explicit(generators::braess_best_preference(k)),
        ));
    }
    candidates
        .into_iter()
        .filter(|c| match &c.policy {
            TieBreakPolicy::Explicit(p) => p.bind(net).is_ok(),
            _ => true,
        })
        .collect()
}

/// WorstCase, BestCase, then every registered preference for `net`.
pub fn candidate_policies(net: &Network) -> Vec<NamedPolicy> {
    let mut out = vec![
        NamedPolicy::new("worst", TieBreakPolicy::WorstCase),
        NamedPolicy::new("best", TieBreakPolicy::BestCase),
    ];
    out.extend(registered_policies(net));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_braess, gen_example, Example};

    #[test]
    fn text_round_trip() {
        let p = generators::fig3_worst_preference();
        let back = RoutePreference::parse(&p.to_text()).unwrap();
        assert_eq!(back, p);
        let f2 = generators::fig2_periodic_preference();
        assert_eq!(RoutePreference::parse(&f2.to_text()).unwrap(), f2);
    }

    #[test]
    fn bind_rejects_incomplete_lists() {
        let net = gen_example(Example::Wheatstone);
        let p = RoutePreference::parse("prefer e1,e4\nprefer e2,e5\n").unwrap();
        assert!(matches!(p.bind(&net), Err(Error::InvalidPreference(_))));
        let dup = RoutePreference::parse("prefer e1,e4\nprefer e1,e4\nprefer e2,e5\n").unwrap();
        assert!(matches!(dup.bind(&net), Err(Error::InvalidPreference(_))));
        let bad = RoutePreference::parse("prefer e1,e5\n").unwrap();
        assert!(matches!(bad.bind(&net), Err(Error::InvalidPreference(_))));
    }

    #[test]
    fn parse_errors_have_lines() {
        assert!(matches!(RoutePreference::parse("phase\nprefer 0 e1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(RoutePreference::parse("prefer\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(RoutePreference::parse("avoid e1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn index_overrides() {
        let net = gen_example(Example::Fig3);
        let b = generators::fig3_worst_preference().bind(&net).unwrap();
        let first = |i| b.routes[b.order(PlayerId::new(4, i))[0]].label(&net);
        assert_eq!(first(1), "e1,e2");
        assert_eq!(first(2), "e1,e3");
        assert_eq!(first(3), "e1,e3");
    }

    #[test]
    fn registry_matches_structure() {
        let labels = |net: &Network| -> Vec<String> { registered_policies(net).into_iter().map(|p| p.label).collect() };
        assert_eq!(labels(&gen_braess(2)), vec!["braess2-worst", "braess2-best"]);
        assert_eq!(labels(&gen_example(Example::Fig3)), vec!["fig3-worst"]);
        assert_eq!(labels(&gen_example(Example::Fig2)), vec!["fig2-periodic"]);
        assert!(labels(&gen_example(Example::TwoByTwo)).is_empty());
    }
}
