//! Integer max-flow and the matching networks built on it.
//!
//! Every polytope question is answered by one flow on the network
//!
//! ```text
//! source -> group i (quota) -> agent of group i (unit) -> job (unit) -> sink (unit)
//! ```
//!
//! Fractional quotas are scaled by a common denominator so that all
//! capacities stay integral; the flow is then exact.

use std::collections::{HashMap, VecDeque};
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, FractionalMatching, GroupSet, GroupVector};
use crate::rational::{common_denominator, Rational};

pub type NodeId = usize;

/// Index of a forward arc as returned by [`FlowNetwork::add_arc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcId(usize);

/// Directed network with non-negative integer capacities.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    source: NodeId,
    sink: NodeId,
    head: Vec<NodeId>,
    cap: Vec<i128>,
    adj: Vec<Vec<usize>>,
}

/// Source side of a minimum cut and its capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCut {
    pub source_side: Vec<bool>,
    pub capacity: i128,
}

/// Result of a max-flow computation.
#[derive(Clone, Debug)]
pub struct MaxFlow {
    pub value: i128,
    /// Minimal minimum cut: nodes reachable from the source in the residual
    /// network.
    pub cut: MinCut,
    residual: Vec<i128>,
    original: Vec<i128>,
    head: Vec<NodeId>,
    adj: Vec<Vec<usize>>,
    sink: NodeId,
}

impl FlowNetwork {
    pub fn new(num_nodes: usize, source: NodeId, sink: NodeId) -> Self {
        assert!(source < num_nodes && sink < num_nodes && source != sink);
        FlowNetwork {
            source,
            sink,
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); num_nodes],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.head.len() / 2
    }

    pub fn add_arc(&mut self, from: NodeId, to: NodeId, capacity: i128) -> ArcId {
        assert!(capacity >= 0, "negative capacity");
        let id = self.head.len();
        self.head.push(to);
        self.cap.push(capacity);
        self.adj[from].push(id);
        self.head.push(from);
        self.cap.push(0);
        self.adj[to].push(id + 1);
        ArcId(id)
    }

    pub fn capacity(&self, arc: ArcId) -> i128 {
        self.cap[arc.0]
    }

    /// Maximum flow by shortest augmenting paths, using level graphs so that
    /// all shortest paths of one length are saturated per phase (Dinic).
    /// Arc order is insertion order, so results are reproducible.
    pub fn max_flow(&self) -> MaxFlow {
        let n = self.num_nodes();
        let mut residual = self.cap.clone();
        let mut value: i128 = 0;
        let mut level = vec![usize::MAX; n];
        let mut next = vec![0usize; n];
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[self.source] = 0;
            let mut queue = VecDeque::from([self.source]);
            while let Some(x) = queue.pop_front() {
                for &a in &self.adj[x] {
                    let y = self.head[a];
                    if residual[a] > 0 && level[y] == usize::MAX {
                        level[y] = level[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            if level[self.sink] == usize::MAX {
                break;
            }
            next.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.blocking_path(&mut residual, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                value += pushed;
            }
        }
        let source_side = reachable(self.source, &self.head, &self.adj, &residual);
        let capacity = (0..self.head.len())
            .step_by(2)
            .filter(|&a| source_side[self.head[a ^ 1]] && !source_side[self.head[a]])
            .map(|a| self.cap[a])
            .sum();
        MaxFlow {
            value,
            cut: MinCut {
                source_side,
                capacity,
            },
            residual,
            original: self.cap.clone(),
            head: self.head.clone(),
            adj: self.adj.clone(),
            sink: self.sink,
        }
    }

    /// Finds one augmenting path in the level graph and pushes its
    /// bottleneck. Iterative DFS with per-node arc pointers.
    fn blocking_path(&self, residual: &mut [i128], level: &[usize], next: &mut [usize]) -> i128 {
        let mut path: Vec<usize> = Vec::new();
        let mut node = self.source;
        loop {
            if node == self.sink {
                let bottleneck = path.iter().map(|&a| residual[a]).min().unwrap_or(0);
                for &a in &path {
                    residual[a] -= bottleneck;
                    residual[a ^ 1] += bottleneck;
                }
                return bottleneck;
            }
            let mut advanced = false;
            while next[node] < self.adj[node].len() {
                let a = self.adj[node][next[node]];
                let y = self.head[a];
                if residual[a] > 0 && level[y] == level[node] + 1 {
                    path.push(a);
                    node = y;
                    advanced = true;
                    break;
                }
                next[node] += 1;
            }
            if !advanced {
                // Dead end: retreat and skip the arc that led here.
                match path.pop() {
                    None => return 0,
                    Some(a) => {
                        node = self.head[a ^ 1];
                        next[node] += 1;
                    }
                }
            }
        }
    }
}

fn reachable(start: NodeId, head: &[NodeId], adj: &[Vec<usize>], residual: &[i128]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &a in &adj[x] {
            let y = head[a];
            if residual[a] > 0 && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

impl MaxFlow {
    pub fn flow_on(&self, arc: ArcId) -> i128 {
        self.original[arc.0] - self.residual[arc.0]
    }

    /// Maximal minimum cut: every node that cannot reach the sink in the
    /// residual network. Min cuts are closed under union, so this source
    /// side contains all others.
    pub fn maximal_source_side(&self) -> Vec<bool> {
        let n = self.adj.len();
        let mut reaches_sink = vec![false; n];
        reaches_sink[self.sink] = true;
        let mut stack = vec![self.sink];
        // Walk residual arcs backwards: x -> y usable iff residual[a] > 0
        // for the arc a from x to y, i.e. the reverse of an arc into y.
        while let Some(y) = stack.pop() {
            for &b in &self.adj[y] {
                let x = self.head[b];
                let a = b ^ 1;
                if self.residual[a] > 0 && !reaches_sink[x] {
                    reaches_sink[x] = true;
                    stack.push(x);
                }
            }
        }
        reaches_sink.into_iter().map(|r| !r).collect()
    }
}

/// The group/agent/job network of a graph under per-group quotas.
#[derive(Clone, Debug)]
pub struct MatchingNetwork<'g> {
    graph: &'g BipartiteGraph,
    network: FlowNetwork,
    unit: i128,
    group_arcs: Vec<ArcId>,
    edge_arcs: Vec<ArcId>,
}

/// A solved [`MatchingNetwork`].
#[derive(Clone, Debug)]
pub struct MatchingFlow {
    pub flow: MaxFlow,
    /// Scale factor: one agent corresponds to `unit` flow.
    pub unit: i128,
    group_flow: Vec<i128>,
    group_nodes: Vec<NodeId>,
}

const SOURCE: NodeId = 0;
const SINK: NodeId = 1;

impl<'g> MatchingNetwork<'g> {
    /// Builds the network with integer group quotas (already scaled) and
    /// the given unit capacity for agents, edges and jobs.
    pub fn new(graph: &'g BipartiteGraph, quotas: &[i128], unit: i128) -> Self {
        assert_eq!(quotas.len(), graph.k());
        assert!(unit >= 1);
        let k = graph.k();
        let agent_base = 2 + k;
        let job_base = agent_base + graph.num_agents();
        let mut network = FlowNetwork::new(job_base + graph.num_jobs(), SOURCE, SINK);
        let group_arcs = quotas
            .iter()
            .enumerate()
            .map(|(i, &q)| network.add_arc(SOURCE, 2 + i, q.max(0)))
            .collect();
        for v in 0..graph.num_agents() {
            network.add_arc(2 + graph.group_of(v), agent_base + v, unit);
        }
        let edge_arcs = graph
            .edges()
            .iter()
            .map(|&(u, v)| network.add_arc(agent_base + v, job_base + u, unit))
            .collect();
        for u in 0..graph.num_jobs() {
            network.add_arc(job_base + u, SINK, unit);
        }
        MatchingNetwork {
            graph,
            network,
            unit,
            group_arcs,
            edge_arcs,
        }
    }

    /// Network whose quotas are the coordinates of `x`, scaled by the least
    /// common denominator of `x`.
    pub fn for_point(graph: &'g BipartiteGraph, x: &GroupVector) -> Result<Self> {
        if x.len() != graph.k() {
            return Err(Error::DimensionMismatch {
                expected: graph.k(),
                got: x.len(),
            });
        }
        if !x.is_nonnegative() {
            return Err(Error::InvalidArgument(format!(
                "negative coordinate in {x:?}"
            )));
        }
        let unit = common_denominator(x.iter())?;
        let quotas = x
            .iter()
            .map(|xi| Ok(xi.mul_int(unit)?.numer()))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatchingNetwork::new(graph, &quotas, unit))
    }

    /// Quotas `|V_i|` on the groups in `set`, zero elsewhere.
    pub fn for_groups(graph: &'g BipartiteGraph, set: GroupSet) -> Self {
        let quotas: Vec<i128> = graph
            .group_sizes()
            .iter()
            .enumerate()
            .map(|(i, &n)| if set.contains(i) { n as i128 } else { 0 })
            .collect();
        MatchingNetwork::new(graph, &quotas, 1)
    }

    pub fn network(&self) -> &FlowNetwork {
        &self.network
    }

    pub fn unit(&self) -> i128 {
        self.unit
    }

    pub fn quota(&self, group: usize) -> i128 {
        self.network.capacity(self.group_arcs[group])
    }

    pub fn total_quota(&self) -> i128 {
        self.group_arcs
            .iter()
            .map(|&a| self.network.capacity(a))
            .sum()
    }

    pub fn solve(&self) -> MatchingFlow {
        let flow = self.network.max_flow();
        let group_flow = self.group_arcs.iter().map(|&a| flow.flow_on(a)).collect();
        MatchingFlow {
            flow,
            unit: self.unit,
            group_flow,
            group_nodes: (0..self.graph.k()).map(|i| 2 + i).collect(),
        }
    }

    /// Reads the matching off a solved flow: `μ(u, v) = flow(v → u) / unit`.
    pub fn extract_matching(&self, solved: &MatchingFlow) -> Result<FractionalMatching> {
        let mut weights = std::collections::BTreeMap::new();
        for (&edge, &arc) in self.graph.edges().iter().zip(&self.edge_arcs) {
            let f = solved.flow.flow_on(arc);
            if f > 0 {
                weights.insert(edge, Rational::new(f, self.unit)?);
            }
        }
        Ok(FractionalMatching::from_map_unchecked(weights))
    }
}

impl MatchingFlow {
    pub fn value(&self) -> i128 {
        self.flow.value
    }

    /// Matched mass per group, as exact rationals.
    pub fn group_point(&self) -> Result<GroupVector> {
        self.group_flow
            .iter()
            .map(|&f| Rational::new(f, self.unit))
            .collect::<Result<Vec<_>>>()
            .map(GroupVector::new)
    }

    /// Groups on the source side of the minimal minimum cut.
    pub fn min_cut_groups(&self) -> GroupSet {
        self.groups_in(&self.flow.cut.source_side)
    }

    /// Groups on the source side of the maximal minimum cut.
    pub fn max_cut_groups(&self) -> GroupSet {
        self.groups_in(&self.flow.maximal_source_side())
    }

    fn groups_in(&self, side: &[bool]) -> GroupSet {
        self.group_nodes
            .iter()
            .enumerate()
            .filter(|(_, &n)| side[n])
            .map(|(i, _)| i)
            .collect()
    }
}

/// Memoized `OPT(Λ)`: the largest number of agents from the groups in `Λ`
/// that can be matched simultaneously.
///
/// Safe to share between threads; lookups take a read lock and new values
/// are inserted under the write lock.
pub struct OptOracle<'g> {
    graph: &'g BipartiteGraph,
    memo: RwLock<HashMap<u64, i64>>,
}

impl<'g> OptOracle<'g> {
    pub fn new(graph: &'g BipartiteGraph) -> Self {
        let mut memo = HashMap::new();
        memo.insert(0, 0);
        OptOracle {
            graph,
            memo: RwLock::new(memo),
        }
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.graph
    }

    pub fn k(&self) -> usize {
        self.graph.k()
    }

    pub fn opt(&self, set: GroupSet) -> Result<i64> {
        if !set.is_subset(self.graph.all_groups()) {
            return Err(Error::InvalidArgument(format!(
                "group subset {:#x} outside k = {}",
                set.bits(),
                self.graph.k()
            )));
        }
        if let Some(&v) = self.memo.read().expect("memo lock").get(&set.bits()) {
            return Ok(v);
        }
        let value = MatchingNetwork::for_groups(self.graph, set).solve().value() as i64;
        self.memo
            .write()
            .expect("memo lock")
            .insert(set.bits(), value);
        Ok(value)
    }

    /// `OPT([K])`.
    pub fn opt_all(&self) -> i64 {
        self.opt(self.graph.all_groups())
            .expect("full set is valid")
    }

    /// `M_i = OPT({i})` for every group.
    pub fn singles(&self) -> Vec<i64> {
        (0..self.k())
            .map(|i| {
                self.opt(GroupSet::singleton(i))
                    .expect("singleton is valid")
            })
            .collect()
    }

    pub fn cached(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }
}
