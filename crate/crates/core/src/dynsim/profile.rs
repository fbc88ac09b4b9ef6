use std::fmt;

use crate::error::{Error, Result};
use crate::network::{parse_uint, tokens, Network, Route};
use crate::rational::{frac, Q};

/// Player `index` of generation `generation`; the derived order is the
/// priority order (earlier generation first, then lower index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId {
    pub generation: u64,
    pub index: u64,
}

impl PlayerId {
    pub fn new(generation: u64, index: u64) -> Self {
        PlayerId { generation, index }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.index, self.generation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InflowProfile {
    Uniform(u64),
    Periodic(Vec<u64>),
}

impl InflowProfile {
    /// Players departing at stage `t >= 1`.
    pub fn at(&self, t: u64) -> u64 {
        match self {
            InflowProfile::Uniform(d) => *d,
            InflowProfile::Periodic(v) => v[((t - 1) % v.len() as u64) as usize],
        }
    }

    pub fn period(&self) -> u64 {
        match self {
            InflowProfile::Uniform(_) => 1,
            InflowProfile::Periodic(v) => v.len() as u64,
        }
    }

    pub fn average(&self) -> Q {
        match self {
            InflowProfile::Uniform(d) => frac(*d, 1),
            InflowProfile::Periodic(v) => frac(v.iter().sum(), v.len() as u64),
        }
    }

    pub fn players_up_to(&self, horizon: u64) -> u64 {
        (1..=horizon).map(|t| self.at(t)).sum()
    }

    pub fn to_line(&self) -> String {
        match self {
            InflowProfile::Uniform(d) => format!("inflow uniform {d}"),
            InflowProfile::Periodic(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("inflow periodic {}", parts.join(" "))
            }
        }
    }
}

/// A route for every player of generations `1..=horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    generations: Vec<Vec<Route>>,
}

impl StrategyProfile {
    pub fn new() -> Self {
        StrategyProfile { generations: Vec::new() }
    }

    pub fn from_generations(generations: Vec<Vec<Route>>) -> Self {
        StrategyProfile { generations }
    }

    /// Builds a profile from a rule `(player) -> route`.
    pub fn from_fn(inflow: &InflowProfile, horizon: u64, mut f: impl FnMut(PlayerId) -> Route) -> Self {
        let generations = (1..=horizon)
            .map(|t| (1..=inflow.at(t)).map(|i| f(PlayerId::new(t, i))).collect())
            .collect();
        StrategyProfile { generations }
    }

    pub fn horizon(&self) -> u64 {
        self.generations.len() as u64
    }

    pub fn push_generation(&mut self, routes: Vec<Route>) {
        self.generations.push(routes);
    }

    pub fn generation(&self, t: u64) -> &[Route] {
        &self.generations[(t - 1) as usize]
    }

    pub fn route(&self, p: PlayerId) -> &Route {
        &self.generations[(p.generation - 1) as usize][(p.index - 1) as usize]
    }

    pub fn set_route(&mut self, p: PlayerId, r: Route) {
        self.generations[(p.generation - 1) as usize][(p.index - 1) as usize] = r;
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.generations.iter().enumerate().flat_map(|(t, g)| {
            (1..=g.len() as u64).map(move |i| PlayerId::new(t as u64 + 1, i))
        })
    }

    pub fn truncated(&self, horizon: u64) -> StrategyProfile {
        StrategyProfile { generations: self.generations.iter().take(horizon as usize).cloned().collect() }
    }

    /// Checks coverage against the inflow and every route against the network.
    pub fn check(&self, net: &Network, inflow: &InflowProfile, horizon: u64) -> Result<()> {
        if self.horizon() < horizon {
            return Err(Error::InvalidProfile(format!(
                "profile covers {} generations, {} required",
                self.horizon(),
                horizon
            )));
        }
        for t in 1..=horizon {
            let g = self.generation(t);
            if g.len() as u64 != inflow.at(t) {
                return Err(Error::InvalidProfile(format!(
                    "generation {t} has {} routes for {} players",
                    g.len(),
                    inflow.at(t)
                )));
            }
            for r in g {
                net.check_route(r)?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self, net: &Network) -> String {
        let mut s = String::new();
        for p in self.players() {
            s.push_str(&format!("assign {} {} {}\n", p.generation, p.index, self.route(p).label(net)));
        }
        s
    }

    /// Parses `assign <t> <i> <edge>[,<edge>...]` lines. Players must be
    /// listed without gaps; validation against the inflow happens in `check`.
    pub fn parse(text: &str, net: &Network) -> Result<StrategyProfile> {
        let mut generations: Vec<Vec<Route>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks = tokens(raw);
            if toks.is_empty() {
                continue;
            }
            if toks[0] != "assign" || toks.len() != 4 {
                return Err(Error::Parse { line, msg: "expected `assign <t> <i> <edges>`".into() });
            }
            let t = parse_uint(line, toks[1], "generation")?;
            let idx = parse_uint(line, toks[2], "index")?;
            let route = net.parse_route(toks[3]).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            if t == 0 || idx == 0 {
                return Err(Error::Parse { line, msg: "generations and indices start at 1".into() });
            }
            while (generations.len() as u64) < t {
                generations.push(Vec::new());
            }
            let g = &mut generations[(t - 1) as usize];
            if g.len() as u64 + 1 != idx {
                return Err(Error::Parse { line, msg: format!("player {idx} of generation {t} out of order") });
            }
            g.push(route);
        }
        Ok(StrategyProfile { generations })
    }
}

impl Default for StrategyProfile {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_example, Example};

    #[test]
    fn priority_order() {
        assert!(PlayerId::new(1, 5) < PlayerId::new(2, 1));
        assert!(PlayerId::new(2, 1) < PlayerId::new(2, 2));
    }

    #[test]
    fn periodic_inflow() {
        let f = InflowProfile::Periodic(vec![6, 0, 0]);
        assert_eq!((1..=7).map(|t| f.at(t)).collect::<Vec<_>>(), vec![6, 0, 0, 6, 0, 0, 6]);
        assert_eq!(f.average(), frac(2, 1));
        assert_eq!(f.to_line(), "inflow periodic 6 0 0");
    }

    #[test]
    fn profile_text_round_trip() {
        let net = gen_example(Example::Wheatstone);
        let routes = net.routes().unwrap();
        let inflow = InflowProfile::Uniform(2);
        let p = StrategyProfile::from_fn(&inflow, 3, |id| routes[(id.index as usize + id.generation as usize) % 3].clone());
        let text = p.to_text(&net);
        assert!(text.starts_with("assign 1 1 "));
        let back = StrategyProfile::parse(&text, &net).unwrap();
        assert_eq!(back, p);
        back.check(&net, &inflow, 3).unwrap();
        assert!(back.check(&net, &InflowProfile::Uniform(3), 3).is_err());
    }

    #[test]
    fn bad_profiles() {
        let net = gen_example(Example::Wheatstone);
        assert!(matches!(StrategyProfile::parse("assign 1 1 e1,e5\n", &net), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(StrategyProfile::parse("assign 1 2 e2,e5\n", &net), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(StrategyProfile::parse("assign 1 1 zz\n", &net), Err(Error::Parse { line: 1, .. })));
    }
}
