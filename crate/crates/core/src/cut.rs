//! Maximum flow (shortest augmenting paths) and the minimum cut it certifies.

use std::collections::VecDeque;

use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    pub cut_edges: Vec<usize>,
    pub capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: u64,
    pub edge_flow: Vec<u64>,
    /// Vertices reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

pub fn max_flow(net: &Network) -> MaxFlow {
    let m = net.edges().len();
    let n = net.vertices().len();
    let mut flow = vec![0u64; m];
    let mut value = 0;
    loop {
        // BFS over residual arcs: forward arcs (e, +) and backward arcs (e, -).
        let mut pred: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[net.source()] = true;
        let mut queue = VecDeque::from([net.source()]);
        while let Some(v) = queue.pop_front() {
            for &e in net.out_edges(v) {
                let w = net.edge(e).head;
                if !seen[w] && flow[e] < net.edge(e).capacity {
                    seen[w] = true;
                    pred[w] = Some((e, true));
                    queue.push_back(w);
                }
            }
            for &e in net.in_edges(v) {
                let w = net.edge(e).tail;
                if !seen[w] && flow[e] > 0 {
                    seen[w] = true;
                    pred[w] = Some((e, false));
                    queue.push_back(w);
                }
            }
        }
        if !seen[net.dest()] {
            return MaxFlow { value, edge_flow: flow, source_side: seen };
        }
        let mut path = Vec::new();
        let mut v = net.dest();
        while v != net.source() {
            let (e, fwd) = pred[v].expect("bfs predecessor");
            path.push((e, fwd));
            v = if fwd { net.edge(e).tail } else { net.edge(e).head };
        }
        let push = path
            .iter()
            .map(|&(e, fwd)| if fwd { net.edge(e).capacity - flow[e] } else { flow[e] })
            .min()
            .expect("non-empty path");
        for (e, fwd) in path {
            if fwd {
                flow[e] += push;
            } else {
                flow[e] -= push;
            }
        }
        value += push;
    }
}

/// Minimum cut on the source side of the final residual graph.
pub fn min_cut(net: &Network) -> CutResult {
    let mf = max_flow(net);
    let cut_edges: Vec<usize> = (0..net.edges().len())
        .filter(|&e| mf.source_side[net.edge(e).tail] && !mf.source_side[net.edge(e).head])
        .collect();
    let capacity = cut_edges.iter().map(|&e| net.edge(e).capacity).sum();
    debug_assert_eq!(capacity, mf.value);
    CutResult { cut_edges, capacity }
}

/// Network capacity: the value of a minimum cut.
pub fn capacity(net: &Network) -> u64 {
    max_flow(net).value
}
