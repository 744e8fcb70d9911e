//! Exhaustive ground truth for tiny graphs.
//!
//! Nothing in here touches the flow engine, so it can serve as an
//! independent check of it.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, GroupSet, GroupVector};
use crate::rational::Rational;

/// Default cap on `|E|` for enumeration.
pub const EDGE_GUARD: usize = 20;

/// An integral matching as a list of `(job, agent)` pairs.
pub type EdgeMatching = Vec<(usize, usize)>;

/// The realizable integer points of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub k: usize,
    pub points: BTreeSet<Vec<i64>>,
    /// Points of maximum `ℓ1` norm.
    pub pareto: BTreeSet<Vec<i64>>,
}

impl PointSet {
    /// `OPT(Λ)` as the best `x(Λ)` over all realizable points.
    pub fn opt(&self, set: GroupSet) -> i64 {
        self.points
            .iter()
            .map(|p| set.iter().map(|i| p[i]).sum::<i64>())
            .max()
            .unwrap_or(0)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.points.contains(x)
    }

    /// Whether `x` satisfies every rank inequality `x(Λ) ≤ OPT(Λ)` computed
    /// from the enumerated points (and `x ≥ 0`).
    pub fn satisfies_rank_inequalities(&self, x: &GroupVector) -> Result<bool> {
        if !x.is_nonnegative() {
            return Ok(false);
        }
        for bits in 0..(1u64 << self.k) {
            let set = GroupSet::from_bits(bits);
            if x.sum_over(set)? > Rational::from_int(self.opt(set) as i128) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Componentwise maximum of all points.
    pub fn bounding_box(&self) -> Vec<i64> {
        let mut hi = vec![0; self.k];
        for p in &self.points {
            for (h, &c) in hi.iter_mut().zip(p) {
                *h = (*h).max(c);
            }
        }
        hi
    }
}

/// Every matching of `graph`, in lexicographic order over edge subsets
/// (edges taken in file order, "include" explored before "exclude").
pub fn enumerate_matchings(graph: &BipartiteGraph, edge_limit: usize) -> Result<Vec<EdgeMatching>> {
    if graph.edges().len() > edge_limit {
        return Err(Error::GuardExceeded(format!(
            "{} edges exceed the enumeration limit {edge_limit}",
            graph.edges().len()
        )));
    }
    let mut out = Vec::new();
    let mut job_used = vec![false; graph.num_jobs()];
    let mut agent_used = vec![false; graph.num_agents()];
    let mut current = Vec::new();
    walk(
        graph,
        0,
        &mut job_used,
        &mut agent_used,
        &mut current,
        &mut out,
    );
    Ok(out)
}

fn walk(
    graph: &BipartiteGraph,
    idx: usize,
    job_used: &mut [bool],
    agent_used: &mut [bool],
    current: &mut EdgeMatching,
    out: &mut Vec<EdgeMatching>,
) {
    if idx == graph.edges().len() {
        out.push(current.clone());
        return;
    }
    let (u, v) = graph.edges()[idx];
    if !job_used[u] && !agent_used[v] {
        job_used[u] = true;
        agent_used[v] = true;
        current.push((u, v));
        walk(graph, idx + 1, job_used, agent_used, current, out);
        current.pop();
        job_used[u] = false;
        agent_used[v] = false;
    }
    walk(graph, idx + 1, job_used, agent_used, current, out);
}

pub fn point_of(graph: &BipartiteGraph, matching: &[(usize, usize)]) -> Vec<i64> {
    let mut p = vec![0; graph.k()];
    for &(_, v) in matching {
        p[graph.group_of(v)] += 1;
    }
    p
}

/// The set `M` of realizable points, by exhaustive enumeration.
pub fn enumerate_points(graph: &BipartiteGraph) -> Result<PointSet> {
    enumerate_points_with_limit(graph, EDGE_GUARD)
}

pub fn enumerate_points_with_limit(graph: &BipartiteGraph, edge_limit: usize) -> Result<PointSet> {
    let points: BTreeSet<Vec<i64>> = enumerate_matchings(graph, edge_limit)?
        .iter()
        .map(|m| point_of(graph, m))
        .collect();
    let best = points
        .iter()
        .map(|p| p.iter().sum::<i64>())
        .max()
        .unwrap_or(0);
    let pareto = points
        .iter()
        .filter(|p| p.iter().sum::<i64>() == best)
        .cloned()
        .collect();
    Ok(PointSet {
        k: graph.k(),
        points,
        pareto,
    })
}

/// Checks downward closure and the augmentation axiom on a finite set of
/// non-negative integer vectors.
pub fn check_discrete_polymatroid(points: &BTreeSet<Vec<i64>>) -> bool {
    let Some(first) = points.iter().next() else {
        return false;
    };
    let k = first.len();
    if points
        .iter()
        .any(|p| p.len() != k || p.iter().any(|&c| c < 0))
    {
        return false;
    }
    if !points.contains(&vec![0; k]) {
        return false;
    }
    // One-step closure implies full downward closure by induction.
    for p in points {
        for i in 0..k {
            if p[i] > 0 {
                let mut q = p.clone();
                q[i] -= 1;
                if !points.contains(&q) {
                    return false;
                }
            }
        }
    }
    for x in points {
        let nx: i64 = x.iter().sum();
        for y in points {
            if nx >= y.iter().sum::<i64>() {
                continue;
            }
            let ok = (0..k).any(|i| {
                if x[i] >= y[i] {
                    return false;
                }
                let mut z = x.clone();
                z[i] += 1;
                points.contains(&z)
            });
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Result of [`augment`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentation {
    /// 0-based group whose count grows by one.
    pub group: usize,
    /// The matching realizing `X(μ) + e_group`.
    pub matching: EdgeMatching,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Mu,
    Nu,
}

/// Given matchings `μ`, `ν` with `|X(μ)| < |X(ν)|`, finds a group `i` with
/// `X(μ)_i < X(ν)_i` such that `X(μ) + e_i` is realizable.
///
/// The paths of `μ Δ ν` define an exchange multigraph on `{0} ∪ groups`:
/// agent-agent paths give an arc from the `μ`-end group to the `ν`-end
/// group, agent-job paths give `i → 0` (agent matched by `μ`) or `0 → i`
/// (matched by `ν`). A greedy walk from `0` that never reuses an arc stops
/// at a group with more incoming than outgoing arcs; swapping every path
/// it used realizes `X(μ) + e_i`.
pub fn augment(
    graph: &BipartiteGraph,
    mu: &[(usize, usize)],
    nu: &[(usize, usize)],
) -> Result<Augmentation> {
    check_matching(graph, mu)?;
    check_matching(graph, nu)?;
    if mu.len() >= nu.len() {
        return Err(Error::InvalidArgument(format!(
            "augment needs |X(mu)| < |X(nu)|, got {} and {}",
            mu.len(),
            nu.len()
        )));
    }
    let mu_set: HashSet<(usize, usize)> = mu.iter().copied().collect();
    let nu_set: HashSet<(usize, usize)> = nu.iter().copied().collect();
    let jobs = graph.num_jobs();
    // Vertices: jobs are 0..jobs, agents are jobs..jobs+agents.
    let n = jobs + graph.num_agents();
    let mut adj: Vec<Vec<((usize, usize), Side)>> = vec![Vec::new(); n];
    for &e in mu_set.symmetric_difference(&nu_set) {
        let side = if mu_set.contains(&e) {
            Side::Mu
        } else {
            Side::Nu
        };
        adj[e.0].push((e, side));
        adj[jobs + e.1].push((e, side));
    }
    for list in &mut adj {
        list.sort_by_key(|&(e, _)| e);
    }

    // Exchange arcs: (from, to, path edges); node 0 is special, group g is g + 1.
    let mut arcs: Vec<(usize, usize, EdgeMatching)> = Vec::new();
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] || adj[start].len() != 1 {
            continue;
        }
        let mut path = Vec::new();
        let mut prev_edge = None;
        let mut node = start;
        visited[start] = true;
        loop {
            let next = adj[node].iter().find(|&&(e, _)| Some(e) != prev_edge);
            let Some(&(e, _)) = next else { break };
            path.push(e);
            prev_edge = Some(e);
            node = if node < jobs { jobs + e.1 } else { e.0 };
            visited[node] = true;
        }
        let end = node;
        let end_side = |vertex: usize| adj[vertex][0].1;
        let is_agent = |vertex: usize| vertex >= jobs;
        let group = |vertex: usize| graph.group_of(vertex - jobs) + 1;
        match (is_agent(start), is_agent(end)) {
            (true, true) => {
                let (from, to) = if end_side(start) == Side::Mu {
                    (start, end)
                } else {
                    (end, start)
                };
                arcs.push((group(from), group(to), path));
            }
            (true, false) | (false, true) => {
                let agent = if is_agent(start) { start } else { end };
                if end_side(agent) == Side::Mu {
                    arcs.push((group(agent), 0, path));
                } else {
                    arcs.push((0, group(agent), path));
                }
            }
            (false, false) => {}
        }
    }

    let mut used = vec![false; arcs.len()];
    let mut node = 0;
    loop {
        let next = (0..arcs.len()).find(|&a| !used[a] && arcs[a].0 == node);
        match next {
            Some(a) => {
                used[a] = true;
                node = arcs[a].1;
            }
            None => break,
        }
    }
    if node == 0 {
        return Err(Error::Infeasible(
            "exchange walk stopped at the special node".into(),
        ));
    }
    let mut swapped: HashSet<(usize, usize)> = mu_set;
    for (a, (_, _, path)) in arcs.iter().enumerate() {
        if used[a] {
            for e in path {
                if !swapped.remove(e) {
                    swapped.insert(*e);
                }
            }
        }
    }
    let mut matching: EdgeMatching = swapped.into_iter().collect();
    matching.sort_unstable();
    Ok(Augmentation {
        group: node - 1,
        matching,
    })
}

fn check_matching(graph: &BipartiteGraph, m: &[(usize, usize)]) -> Result<()> {
    let mut jobs = HashSet::new();
    let mut agents = HashSet::new();
    for &(u, v) in m {
        if !graph.has_edge(u, v) || !jobs.insert(u) || !agents.insert(v) {
            return Err(Error::InvalidArgument(format!(
                "not a matching at ({u}, {v})"
            )));
        }
    }
    Ok(())
}
