//! Networks, routes, validation and the line-oriented network format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_ROUTE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: usize,
    pub head: usize,
    pub transit: u64,
    pub capacity: u64,
}

/// Directed multigraph with a unique source and destination.
///
/// Edges are stored in their canonical order: declaration order, except that
/// edges sharing both endpoints are re-sorted among their own positions by
/// `(transit, declared position)`. Every deterministic tie-break downstream
/// uses this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    source: usize,
    dest: usize,
    initial_queues: Vec<u64>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    SourceHasIncoming,
    DestHasOutgoing,
    UnreachableVertex(String),
    DeadEndVertex(String),
    NoRoute,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SourceHasIncoming => write!(f, "source has incoming edges"),
            Violation::DestHasOutgoing => write!(f, "destination has outgoing edges"),
            Violation::UnreachableVertex(v) => write!(f, "vertex {v} is unreachable from the source"),
            Violation::DeadEndVertex(v) => write!(f, "destination is unreachable from vertex {v}"),
            Violation::NoRoute => write!(f, "no route from source to destination"),
        }
    }
}

/// A simple source-to-destination path, as edge indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Route(pub Vec<usize>);

impl Route {
    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn transit(&self, net: &Network) -> u64 {
        self.0.iter().map(|&e| net.edges[e].transit).sum()
    }

    /// Comma-separated edge names, the form used in profile and preference files.
    pub fn label(&self, net: &Network) -> String {
        self.0
            .iter()
            .map(|&e| net.edges[e].name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Vertices visited in order, source first.
    pub fn vertices(&self, net: &Network) -> Vec<usize> {
        let mut out = vec![net.source];
        out.extend(self.0.iter().map(|&e| net.edges[e].head));
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    source: Option<usize>,
    dest: Option<usize>,
    queues: Vec<(usize, u64)>,
}

impl NetworkBuilder {
    pub fn new(name: &str) -> Self {
        NetworkBuilder { name: name.to_string(), ..Default::default() }
    }

    pub fn vertex(&mut self, id: &str) -> Result<usize> {
        if self.vertices.iter().any(|v| v == id) {
            return Err(Error::Parse { line: 0, msg: format!("duplicate vertex `{id}`") });
        }
        self.vertices.push(id.to_string());
        Ok(self.vertices.len() - 1)
    }

    fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == id)
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("unknown vertex `{id}`") })
    }

    pub fn edge(&mut self, id: &str, tail: &str, head: &str, transit: u64, capacity: u64) -> Result<usize> {
        if self.edges.iter().any(|e| e.name == id) {
            return Err(Error::Parse { line: 0, msg: format!("duplicate edge `{id}`") });
        }
        if capacity == 0 {
            return Err(Error::Parse { line: 0, msg: format!("edge `{id}` has zero capacity") });
        }
        let tail = self.vertex_index(tail)?;
        let head = self.vertex_index(head)?;
        if tail == head {
            return Err(Error::Parse { line: 0, msg: format!("edge `{id}` is a self-loop") });
        }
        self.edges.push(Edge { name: id.to_string(), tail, head, transit, capacity });
        Ok(self.edges.len() - 1)
    }

    pub fn source(&mut self, v: &str) -> Result<()> {
        if self.source.is_some() {
            return Err(Error::Parse { line: 0, msg: "duplicate source".into() });
        }
        self.source = Some(self.vertex_index(v)?);
        Ok(())
    }

    pub fn dest(&mut self, v: &str) -> Result<()> {
        if self.dest.is_some() {
            return Err(Error::Parse { line: 0, msg: "duplicate dest".into() });
        }
        self.dest = Some(self.vertex_index(v)?);
        Ok(())
    }

    pub fn queue(&mut self, edge: &str, len: u64) -> Result<()> {
        let e = self
            .edges
            .iter()
            .position(|x| x.name == edge)
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("unknown edge `{edge}`") })?;
        if self.queues.iter().any(|&(x, _)| x == e) {
            return Err(Error::Parse { line: 0, msg: format!("duplicate queue for `{edge}`") });
        }
        self.queues.push((e, len));
        Ok(())
    }

    pub fn build(self) -> Result<Network> {
        let source = self.source.ok_or_else(|| Error::Parse { line: 0, msg: "missing source".into() })?;
        let dest = self.dest.ok_or_else(|| Error::Parse { line: 0, msg: "missing dest".into() })?;
        if source == dest {
            return Err(Error::Parse { line: 0, msg: "source equals dest".into() });
        }
        let mut queues = vec![0; self.edges.len()];
        for (e, len) in self.queues {
            queues[e] = len;
        }
        Ok(Network::assemble(self.name, self.vertices, self.edges, source, dest, queues))
    }
}

impl Network {
    fn assemble(
        name: String,
        vertices: Vec<String>,
        edges: Vec<Edge>,
        source: usize,
        dest: usize,
        queues: Vec<u64>,
    ) -> Network {
        // Re-sort each bundle of same-endpoint edges by transit, keeping the
        // set of positions the bundle occupies.
        let mut bundles: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            bundles.entry((e.tail, e.head)).or_default().push(i);
        }
        let mut order: Vec<usize> = (0..edges.len()).collect();
        for positions in bundles.values() {
            let mut members = positions.clone();
            members.sort_by_key(|&i| (edges[i].transit, i));
            for (slot, member) in positions.iter().zip(members) {
                order[*slot] = member;
            }
        }
        let edges_sorted: Vec<Edge> = order.iter().map(|&i| edges[i].clone()).collect();
        let queues_sorted: Vec<u64> = order.iter().map(|&i| queues[i]).collect();

        let mut out_adj = vec![Vec::new(); vertices.len()];
        let mut in_adj = vec![Vec::new(); vertices.len()];
        for (i, e) in edges_sorted.iter().enumerate() {
            out_adj[e.tail].push(i);
            in_adj[e.head].push(i);
        }
        Network {
            name,
            vertices,
            edges: edges_sorted,
            source,
            dest,
            initial_queues: queues_sorted,
            out_adj,
            in_adj,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn dest(&self) -> usize {
        self.dest
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn initial_queue(&self, e: usize) -> u64 {
        self.initial_queues[e]
    }

    pub fn initial_queues(&self) -> &[u64] {
        &self.initial_queues
    }

    pub fn total_transit(&self) -> u64 {
        self.edges.iter().map(|e| e.transit).sum()
    }

    pub fn with_name(&self, name: &str) -> Network {
        let mut n = self.clone();
        n.name = name.to_string();
        n
    }

    pub fn with_initial_queue(&self, e: usize, len: u64) -> Network {
        let mut n = self.clone();
        n.initial_queues[e] = len;
        n
    }

    /// Changes one edge's transit; the canonical edge order is recomputed.
    pub fn with_transit(&self, e: usize, transit: u64) -> Network {
        let mut edges = self.edges.clone();
        edges[e].transit = transit;
        Network::assemble(
            self.name.clone(),
            self.vertices.clone(),
            edges,
            self.source,
            self.dest,
            self.initial_queues.clone(),
        )
    }

    /// Removes the given edges, then drops every vertex and edge that no
    /// longer lies on a source-destination path. `None` when no route is left.
    pub fn without_edges(&self, removed: &[usize]) -> Option<Network> {
        let keep: Vec<bool> = (0..self.edges.len()).map(|e| !removed.contains(&e)).collect();
        let fwd = self.reach(self.source, &keep, true);
        let bwd = self.reach(self.dest, &keep, false);
        if !fwd[self.dest] {
            return None;
        }
        let live_v: Vec<bool> = (0..self.vertices.len()).map(|v| fwd[v] && bwd[v]).collect();
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (v, name) in self.vertices.iter().enumerate() {
            if live_v[v] {
                remap[v] = vertices.len();
                vertices.push(name.clone());
            }
        }
        let mut edges = Vec::new();
        let mut queues = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if keep[i] && live_v[e.tail] && live_v[e.head] {
                edges.push(Edge { tail: remap[e.tail], head: remap[e.head], ..e.clone() });
                queues.push(self.initial_queues[i]);
            }
        }
        Some(Network::assemble(
            self.name.clone(),
            vertices,
            edges,
            remap[self.source],
            remap[self.dest],
            queues,
        ))
    }

    fn reach(&self, start: usize, keep: &[bool], forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let adj = if forward { &self.out_adj[v] } else { &self.in_adj[v] };
            for &e in adj {
                if !keep[e] {
                    continue;
                }
                let w = if forward { self.edges[e].head } else { self.edges[e].tail };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.in_adj[self.source].is_empty() {
            out.push(Violation::SourceHasIncoming);
        }
        if !self.out_adj[self.dest].is_empty() {
            out.push(Violation::DestHasOutgoing);
        }
        let all = vec![true; self.edges.len()];
        let fwd = self.reach(self.source, &all, true);
        let bwd = self.reach(self.dest, &all, false);
        if !fwd[self.dest] {
            out.push(Violation::NoRoute);
        }
        for v in 0..self.vertices.len() {
            if v == self.source || v == self.dest {
                continue;
            }
            if !fwd[v] {
                out.push(Violation::UnreachableVertex(self.vertices[v].clone()));
            } else if !bwd[v] {
                out.push(Violation::DeadEndVertex(self.vertices[v].clone()));
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(v))
        }
    }

    /// All simple routes, lexicographic by edge-index sequence.
    pub fn routes(&self) -> Result<Vec<Route>> {
        self.routes_capped(DEFAULT_ROUTE_CAP)
    }

    pub fn routes_capped(&self, cap: usize) -> Result<Vec<Route>> {
        let mut out = Vec::new();
        let mut on_path = vec![false; self.vertices.len()];
        let mut path = Vec::new();
        on_path[self.source] = true;
        self.dfs_routes(self.source, &mut on_path, &mut path, &mut out, cap)?;
        Ok(out)
    }

    fn dfs_routes(
        &self,
        v: usize,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        out: &mut Vec<Route>,
        cap: usize,
    ) -> Result<()> {
        if v == self.dest {
            if out.len() == cap {
                return Err(Error::RouteExplosion { cap });
            }
            out.push(Route(path.clone()));
            return Ok(());
        }
        for &e in &self.out_adj[v] {
            let w = self.edges[e].head;
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            path.push(e);
            self.dfs_routes(w, on_path, path, out, cap)?;
            path.pop();
            on_path[w] = false;
        }
        Ok(())
    }

    /// Resolves a comma-separated list of edge names into a route of this network.
    pub fn parse_route(&self, text: &str) -> Result<Route> {
        let mut edges = Vec::new();
        for name in text.split(',') {
            let name = name.trim();
            edges.push(self.edge_index(name).ok_or_else(|| Error::UnknownEdge(name.to_string()))?);
        }
        let r = Route(edges);
        self.check_route(&r)?;
        Ok(r)
    }

    pub fn route_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Route> {
        let mut edges = Vec::new();
        for n in names {
            let n = n.as_ref();
            edges.push(self.edge_index(n).ok_or_else(|| Error::UnknownEdge(n.to_string()))?);
        }
        let r = Route(edges);
        self.check_route(&r)?;
        Ok(r)
    }

    pub fn check_route(&self, r: &Route) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProfile(m));
        if r.0.is_empty() {
            return bad("empty route".into());
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut at = self.source;
        seen[at] = true;
        for &e in &r.0 {
            if e >= self.edges.len() {
                return bad(format!("edge index {e} out of range"));
            }
            let edge = &self.edges[e];
            if edge.tail != at {
                return bad(format!("edge {} does not continue the route", edge.name));
            }
            at = edge.head;
            if seen[at] {
                return bad(format!("route revisits vertex {}", self.vertices[at]));
            }
            seen[at] = true;
        }
        if at != self.dest {
            return bad("route does not end at the destination".into());
        }
        Ok(())
    }

    /// Canonical text form; parsing it back yields an identical network.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("network {}\n", self.name));
        for v in &self.vertices {
            s.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "edge {} {} {} tau={} gamma={}\n",
                e.name, self.vertices[e.tail], self.vertices[e.head], e.transit, e.capacity
            ));
        }
        s.push_str(&format!("source {}\n", self.vertices[self.source]));
        s.push_str(&format!("dest {}\n", self.vertices[self.dest]));
        for (e, &q) in self.initial_queues.iter().enumerate() {
            if q > 0 {
                s.push_str(&format!("queue {} {}\n", self.edges[e].name, q));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Network> {
        let mut p = NetworkParser::default();
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            last = i + 1;
            let toks = tokens(raw);
            if toks.is_empty() {
                continue;
            }
            if !p.feed(i + 1, &toks)? {
                return Err(Error::Parse { line: i + 1, msg: format!("unknown directive `{}`", toks[0]) });
            }
        }
        p.finish(last + 1)
    }
}

/// Splits a line into whitespace-separated tokens, dropping `#` comments.
pub fn tokens(line: &str) -> Vec<&str> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    body.split_whitespace().collect()
}

/// Incremental parser for the network directives; other formats embed it.
#[derive(Debug, Default)]
pub struct NetworkParser {
    builder: Option<NetworkBuilder>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn relabel(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

pub fn parse_uint(line: usize, tok: &str, what: &str) -> Result<u64> {
    tok.parse::<u64>()
        .map_err(|_| parse_err(line, format!("expected non-negative integer for {what}, got `{tok}`")))
}

fn keyed<'a>(line: usize, tok: &'a str, key: &str) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected `{key}=<uint>`, got `{tok}`")))
}

impl NetworkParser {
    /// Consumes one tokenized line. Returns `false` if the directive is not a
    /// network directive, leaving it to the caller.
    pub fn feed(&mut self, line: usize, toks: &[&str]) -> Result<bool> {
        let argc = |n: usize| -> Result<()> {
            if toks.len() != n {
                Err(parse_err(line, format!("`{}` takes {} argument(s)", toks[0], n - 1)))
            } else {
                Ok(())
            }
        };
        match toks[0] {
            "network" => {
                argc(2)?;
                if self.builder.is_some() {
                    return Err(parse_err(line, "duplicate `network` directive"));
                }
                self.builder = Some(NetworkBuilder::new(toks[1]));
            }
            "vertex" => {
                argc(2)?;
                self.b(line)?.vertex(toks[1]).map_err(|e| relabel(line, e))?;
            }
            "edge" => {
                argc(6)?;
                let tau = parse_uint(line, keyed(line, toks[4], "tau")?, "tau")?;
                let gamma = parse_uint(line, keyed(line, toks[5], "gamma")?, "gamma")?;
                self.b(line)?
                    .edge(toks[1], toks[2], toks[3], tau, gamma)
                    .map_err(|e| relabel(line, e))?;
            }
            "source" => {
                argc(2)?;
                self.b(line)?.source(toks[1]).map_err(|e| relabel(line, e))?;
            }
            "dest" => {
                argc(2)?;
                self.b(line)?.dest(toks[1]).map_err(|e| relabel(line, e))?;
            }
            "queue" => {
                argc(3)?;
                let len = parse_uint(line, toks[2], "queue length")?;
                self.b(line)?.queue(toks[1], len).map_err(|e| relabel(line, e))?;
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn b(&mut self, line: usize) -> Result<&mut NetworkBuilder> {
        self.builder
            .as_mut()
            .ok_or_else(|| parse_err(line, "`network <name>` must come first"))
    }

    /// `eof_line` is reported for errors detected only at the end.
    pub fn finish(self, eof_line: usize) -> Result<Network> {
        let b = self.builder.ok_or_else(|| parse_err(eof_line, "missing `network` directive"))?;
        let net = b.build().map_err(|e| relabel(eof_line, e))?;
        let v = net.validate();
        if !v.is_empty() {
            return Err(parse_err(
                eof_line,
                format!("invalid network: {}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
            ));
        }
        Ok(net)
    }
}

/// Edge names mapped to indices, for callers that build lookups once.
pub fn edge_lookup(net: &Network) -> HashMap<&str, usize> {
    net.edges.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect()
}
