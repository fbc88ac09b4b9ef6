//! Scenario files: a network plus optional inflow, horizon, named route
//! preferences and a strategy profile.
//!
//! ```text
//! network fig3
//! vertex s
//! ...
//! inflow uniform 3          # or: inflow periodic 6 0 0
//! horizon 40
//! policy slow-branch
//! phase
//! prefer e1,e3
//! prefer 2 e4               # override for player index 2
//! assign 1 1 e1,e2
//! ```

use crate::dynsim::{InflowProfile, StrategyProfile};
use crate::equilib::RoutePreference;
use crate::error::{Error, Result};
use crate::network::{parse_uint, tokens, Network, NetworkParser};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub network: Network,
    pub inflow: Option<InflowProfile>,
    pub horizon: Option<u64>,
    pub policies: Vec<(String, RoutePreference)>,
    pub profile: Option<StrategyProfile>,
}

impl Scenario {
    pub fn new(network: Network) -> Self {
        Scenario { network, inflow: None, horizon: None, policies: Vec::new(), profile: None }
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        let mut net = NetworkParser::default();
        let mut inflow = None;
        let mut horizon = None;
        let mut policies: Vec<(String, Vec<crate::equilib::PhasePreference>)> = Vec::new();
        let mut assigns = String::new();
        let mut has_assign = false;
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last = line;
            let toks = tokens(raw);
            let mut assign_line = "";
            if toks.is_empty() || net.feed(line, &toks)? {
                assigns.push('\n');
                continue;
            }
            match toks[0] {
                "inflow" => {
                    if inflow.is_some() {
                        return Err(Error::Parse { line, msg: "duplicate `inflow`".into() });
                    }
                    inflow = Some(parse_inflow(line, &toks)?);
                }
                "horizon" => {
                    if toks.len() != 2 {
                        return Err(Error::Parse { line, msg: "`horizon` takes 1 argument".into() });
                    }
                    let h = parse_uint(line, toks[1], "horizon")?;
                    if h == 0 {
                        return Err(Error::Parse { line, msg: "horizon must be positive".into() });
                    }
                    horizon = Some(h);
                }
                "policy" => {
                    if toks.len() != 2 {
                        return Err(Error::Parse { line, msg: "`policy` takes a label".into() });
                    }
                    policies.push((toks[1].to_string(), Vec::new()));
                }
                "phase" | "prefer" => {
                    let Some((_, phases)) = policies.last_mut() else {
                        return Err(Error::Parse { line, msg: format!("`{}` outside a `policy` block", toks[0]) });
                    };
                    RoutePreference::feed(phases, line, &toks)?;
                }
                "assign" => {
                    assign_line = raw;
                    has_assign = true;
                }
                other => return Err(Error::Parse { line, msg: format!("unknown directive `{other}`") }),
            }
            assigns.push_str(assign_line);
            assigns.push('\n');
        }
        let network = net.finish(last + 1)?;
        let mut out_policies = Vec::new();
        for (label, phases) in policies {
            if phases.is_empty() {
                return Err(Error::InvalidPreference(format!("policy `{label}` has no routes")));
            }
            let pref = RoutePreference { phases };
            pref.bind(&network)?;
            out_policies.push((label, pref));
        }
        // Blank lines keep the original numbering in profile errors.
        let profile = if has_assign { Some(StrategyProfile::parse(&assigns, &network)?) } else { None };
        Ok(Scenario { network, inflow, horizon, policies: out_policies, profile })
    }

    pub fn to_text(&self) -> String {
        let mut s = self.network.to_text();
        if let Some(i) = &self.inflow {
            s.push_str(&i.to_line());
            s.push('\n');
        }
        if let Some(h) = self.horizon {
            s.push_str(&format!("horizon {h}\n"));
        }
        for (label, p) in &self.policies {
            s.push_str(&format!("policy {label}\n"));
            s.push_str(&p.to_text());
        }
        if let Some(p) = &self.profile {
            s.push_str(&p.to_text(&self.network));
        }
        s
    }

    pub fn policy(&self, label: &str) -> Option<&RoutePreference> {
        self.policies.iter().find(|(l, _)| l == label).map(|(_, p)| p)
    }
}

fn parse_inflow(line: usize, toks: &[&str]) -> Result<InflowProfile> {
    match toks.get(1).copied() {
        Some("uniform") if toks.len() == 3 => Ok(InflowProfile::Uniform(parse_uint(line, toks[2], "inflow")?)),
        Some("periodic") if toks.len() >= 3 => {
            let v = toks[2..].iter().map(|t| parse_uint(line, t, "inflow")).collect::<Result<Vec<u64>>>()?;
            Ok(InflowProfile::Periodic(v))
        }
        _ => Err(Error::Parse { line, msg: "expected `inflow uniform <d>` or `inflow periodic <d1> ... <dK>`".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig3_worst_preference, gen_example, Example};

    #[test]
    fn round_trip() {
        let net = gen_example(Example::Fig3);
        let mut s = Scenario::new(net.clone());
        s.inflow = Some(InflowProfile::Periodic(vec![6, 0, 0]));
        s.horizon = Some(12);
        s.policies.push(("slow".into(), fig3_worst_preference()));
        let r = net.parse_route("e4").unwrap();
        s.profile = Some(StrategyProfile::from_fn(&InflowProfile::Uniform(1), 2, |_| r.clone()));
        let back = Scenario::parse(&s.to_text()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn errors_carry_lines() {
        let base = gen_example(Example::Fig3).to_text();
        let n = base.lines().count();
        let bad = |extra: &str| Scenario::parse(&format!("{base}{extra}"));
        assert!(matches!(bad("inflow steady 3\n"), Err(Error::Parse { line, .. }) if line == n + 1));
        assert!(matches!(bad("horizon 0\n"), Err(Error::Parse { line, .. }) if line == n + 1));
        assert!(matches!(bad("prefer e4\n"), Err(Error::Parse { line, .. }) if line == n + 1));
        assert!(matches!(bad("\nassign 1 1 e9\n"), Err(Error::Parse { line, .. }) if line == n + 2));
        assert!(matches!(bad("policy p\nprefer e4\n"), Err(Error::InvalidPreference(_))));
        assert!(matches!(bad("teleport\n"), Err(Error::Parse { line, .. }) if line == n + 1));
    }
}
