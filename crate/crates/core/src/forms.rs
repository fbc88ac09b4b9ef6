//! Closed forms for parallel networks and chains of parallel modules.

use crate::classify::{chain_modules, Module};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::rational::{floor, frac, q, Q};

/// Edges of a parallel network (or module) in the order (transit, position),
/// with the boundary edge `f` that the inflow fills last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelProfile {
    /// Edge indices, fastest first.
    pub order: Vec<usize>,
    pub delta: u64,
    /// Position in `order` of the boundary edge; `None` when `delta = 0`.
    pub boundary: Option<usize>,
    /// Players sent to the boundary edge: `delta` minus the capacity before it.
    pub residual: u64,
}

impl ParallelProfile {
    fn of(net: &Network, edges: &[usize], delta: u64) -> Result<Self> {
        let mut order = edges.to_vec();
        order.sort_by_key(|&e| (net.edge(e).transit, e));
        let total: u64 = order.iter().map(|&e| net.edge(e).capacity).sum();
        if delta > total {
            return Err(Error::InfeasibleDemand { demand: delta, capacity: total });
        }
        let mut before = 0;
        let mut boundary = None;
        for (k, &e) in order.iter().enumerate() {
            if delta > 0 && before + net.edge(e).capacity >= delta {
                boundary = Some(k);
                break;
            }
            before += net.edge(e).capacity;
        }
        let residual = if boundary.is_some() { delta - before } else { 0 };
        Ok(ParallelProfile { order, delta, boundary, residual })
    }

    pub fn new(net: &Network, delta: u64) -> Result<Self> {
        Self::of(net, &parallel_edges(net)?, delta)
    }

    pub fn boundary_edge(&self) -> Option<usize> {
        self.boundary.map(|k| self.order[k])
    }

    pub fn opt(&self, net: &Network) -> Q {
        let Some(b) = self.boundary else { return q(0) };
        let full: u64 = self.order[..b].iter().map(|&e| net.edge(e).capacity * net.edge(e).transit).sum();
        q(full + self.residual * net.edge(self.order[b]).transit)
    }

    pub fn weq(&self, net: &Network) -> Q {
        q(self.boundary_edge().map_or(0, |f| self.delta * net.edge(f).transit))
    }

    /// Long-run players per stage on each edge (indexed like the network):
    /// capacity before the boundary, the residual on it, nothing after.
    pub fn steady_counts(&self, net: &Network) -> Vec<u64> {
        let mut out = vec![0; net.edges().len()];
        if let Some(b) = self.boundary {
            for &e in &self.order[..b] {
                out[e] = net.edge(e).capacity;
            }
            out[self.order[b]] = self.residual;
        }
        out
    }
}

fn parallel_edges(net: &Network) -> Result<Vec<usize>> {
    match chain_modules(net) {
        Some(m) if m.len() == 1 => Ok(m.into_iter().next().expect("one module").edges),
        _ => Err(Error::NotParallel),
    }
}

pub fn parallel_opt(net: &Network, delta: u64) -> Result<Q> {
    Ok(ParallelProfile::new(net, delta)?.opt(net))
}

pub fn parallel_weq(net: &Network, delta: u64) -> Result<Q> {
    Ok(ParallelProfile::new(net, delta)?.weq(net))
}

/// Stage thresholds of the worst-case transient on an at-capacity parallel
/// network: before stage `floors[j]` only the `j+1` fastest edges are used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransientSchedule {
    pub thresholds: Vec<Q>,
    pub floors: Vec<i64>,
    /// Players of generation `floors[j]` that join before someone is
    /// indifferent to the next edge.
    pub offsets: Vec<Q>,
}

pub fn transient_schedule(net: &Network, delta: u64) -> Result<TransientSchedule> {
    let p = ParallelProfile::new(net, delta)?;
    let gamma: Vec<u64> = p.order.iter().map(|&e| net.edge(e).capacity).collect();
    let tau: Vec<u64> = p.order.iter().map(|&e| net.edge(e).transit).collect();
    let total: u64 = gamma.iter().sum();
    if delta != total {
        return Err(Error::NotAtCapacity { demand: delta, capacity: total });
    }
    let n = gamma.len();
    let d = q(delta);
    let mut thresholds = Vec::new();
    let mut t = q(0);
    let mut cum = 0u64;
    for k in 0..n.saturating_sub(1) {
        cum += gamma[k];
        t += frac(cum, delta - cum) * q(tau[k + 1] - tau[k]);
        thresholds.push(t);
    }
    let floors: Vec<i64> = thresholds.iter().map(|&x| floor(x)).collect();
    let lo = |j: usize| Q::from_integer(floors[j]);
    let mut offsets: Vec<Q> = Vec::new();
    let mut cum = q(0);
    for j in 0..thresholds.len() {
        cum += q(gamma[j]);
        let spare = d - cum;
        let a = if j == 0 {
            spare * (thresholds[0] - lo(0))
        } else {
            let carried = (spare - offsets[j - 1]).max(q(0));
            spare * (thresholds[j] - lo(j) + lo(j - 1) + q(1) - thresholds[j - 1]) - carried
        };
        offsets.push(a);
    }
    Ok(TransientSchedule { thresholds, floors, offsets })
}

/// A chain of parallel modules and its bottleneck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub modules: Vec<Module>,
    /// Index of the first module of least capacity.
    pub bottleneck: usize,
    pub capacity: u64,
}

impl ChainDecomposition {
    pub fn new(net: &Network) -> Result<Self> {
        let modules = chain_modules(net).ok_or(Error::NotChainOfParallel)?;
        let caps: Vec<u64> = modules.iter().map(|m| m.capacity(net)).collect();
        let capacity = *caps.iter().min().expect("at least one module");
        let bottleneck = caps.iter().position(|&c| c == capacity).expect("min exists");
        Ok(ChainDecomposition { modules, bottleneck, capacity })
    }

    pub fn module_profiles(&self, net: &Network) -> Vec<ParallelProfile> {
        self.modules
            .iter()
            .map(|m| ParallelProfile::of(net, &m.edges, self.capacity).expect("bottleneck fits every module"))
            .collect()
    }
}

/// Sum of module optima at the bottleneck rate.
pub fn chain_opt(net: &Network) -> Result<Q> {
    let c = ChainDecomposition::new(net)?;
    Ok(c.module_profiles(net).iter().map(|p| p.opt(net)).sum())
}

/// Sum of module worst equilibria at the bottleneck rate.
pub fn chain_weq(net: &Network) -> Result<Q> {
    let c = ChainDecomposition::new(net)?;
    Ok(c.module_profiles(net).iter().map(|p| p.weq(net)).sum())
}
