//! Topology recognition: parallel, chain of parallel modules, series-parallel.

use std::collections::BTreeMap;

use crate::network::Network;

/// One parallel module of a chain: all edges run from `tail` to `head`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    pub tail: usize,
    pub head: usize,
    pub edges: Vec<usize>,
}

impl Module {
    pub fn capacity(&self, net: &Network) -> u64 {
        self.edges.iter().map(|&e| net.edge(e).capacity).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    Parallel,
    ChainOfParallel(Vec<Module>),
    SeriesParallel,
    General,
}

pub fn classify(net: &Network) -> Topology {
    if let Some(chain) = chain_modules(net) {
        if chain.len() == 1 {
            return Topology::Parallel;
        }
        return Topology::ChainOfParallel(chain);
    }
    if reduces_to_single_edge(net) {
        Topology::SeriesParallel
    } else {
        Topology::General
    }
}

/// Walks s = v0 -> v1 -> ... -> d requiring every edge out of v_h to end at
/// the same v_{h+1}; succeeds only if this covers every edge.
pub fn chain_modules(net: &Network) -> Option<Vec<Module>> {
    let mut modules = Vec::new();
    let mut at = net.source();
    let mut covered = 0;
    let mut visited = vec![false; net.vertices().len()];
    visited[at] = true;
    while at != net.dest() {
        let out = net.out_edges(at);
        let head = net.edge(*out.first()?).head;
        if out.iter().any(|&e| net.edge(e).head != head) || visited[head] {
            return None;
        }
        if net.in_edges(head).iter().any(|&e| net.edge(e).tail != at) {
            return None;
        }
        visited[head] = true;
        covered += out.len();
        modules.push(Module { tail: at, head, edges: out.to_vec() });
        at = head;
    }
    (covered == net.edges().len()).then_some(modules)
}

fn reduces_to_single_edge(net: &Network) -> bool {
    // Multiset of (tail, head) pairs; repeatedly merge parallels and
    // contract internal vertices with one way in and one way out.
    let mut edges: Vec<(usize, usize)> = net.edges().iter().map(|e| (e.tail, e.head)).collect();
    loop {
        let mut merged: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for &p in &edges {
            merged.insert(p, ());
        }
        let before = edges.len();
        edges = merged.into_keys().collect();
        let mut contracted = false;
        for v in 0..net.vertices().len() {
            if v == net.source() || v == net.dest() {
                continue;
            }
            let ins: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].1 == v).collect();
            let outs: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].0 == v).collect();
            if ins.len() == 1 && outs.len() == 1 {
                let new = (edges[ins[0]].0, edges[outs[0]].1);
                let (a, b) = (ins[0].max(outs[0]), ins[0].min(outs[0]));
                edges.remove(a);
                edges.remove(b);
                edges.push(new);
                contracted = true;
                break;
            }
        }
        if !contracted && edges.len() == before {
            break;
        }
    }
    edges == vec![(net.source(), net.dest())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_braess, gen_example, gen_pigou, Example};

    #[test]
    fn examples() {
        assert_eq!(classify(&gen_pigou(2, 1).unwrap()), Topology::Parallel);
        assert_eq!(classify(&gen_example(Example::SeasonalTwoEdge)), Topology::Parallel);
        assert_eq!(classify(&gen_example(Example::Wheatstone)), Topology::General);
        assert_eq!(classify(&gen_example(Example::Fig3)), Topology::SeriesParallel);
        match classify(&gen_example(Example::Fig2)) {
            Topology::ChainOfParallel(m) => {
                assert_eq!(m.len(), 2);
                assert_eq!(m[0].edges.len(), 3);
                assert_eq!(m[1].edges.len(), 2);
            }
            t => panic!("unexpected {t:?}"),
        }
    }

    #[test]
    fn braess_is_general() {
        for k in 1..=4 {
            assert_eq!(classify(&gen_braess(k)), Topology::General);
        }
    }
}
