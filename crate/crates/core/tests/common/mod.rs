#![allow(dead_code)]

use fairmatch::BipartiteGraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random graph with `1..=max_k` groups, `1..=max_jobs` jobs,
/// `1..=max_agents` agents and at most `max_edges` edges.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    max_k: usize,
    max_jobs: usize,
    max_agents: usize,
    max_edges: usize,
) -> BipartiteGraph {
    let k = rng.random_range(1..=max_k);
    let jobs = rng.random_range(1..=max_jobs);
    let agents = rng.random_range(1..=max_agents);
    let groups: Vec<usize> = (0..agents).map(|_| rng.random_range(0..k)).collect();
    let density = rng.random_range(0.15..0.85);
    let mut edges = Vec::new();
    for u in 0..jobs {
        for a in 0..agents {
            if edges.len() < max_edges && rng.random_bool(density) {
                edges.push((u, a));
            }
        }
    }
    BipartiteGraph::new(
        k,
        (1..=jobs).map(|i| format!("u{i}")).collect(),
        (1..=agents).map(|i| format!("a{i}")).collect(),
        groups,
        edges,
    )
    .expect("generated graph is valid")
}

/// `k` groups of random sizes over `jobs` jobs, each agent joined to each
/// job with a random density.
pub fn random_graph_with_k(
    rng: &mut ChaCha8Rng,
    k: usize,
    max_jobs: usize,
    max_agents: usize,
) -> BipartiteGraph {
    let jobs = rng.random_range(1..=max_jobs);
    let agents = rng.random_range(k..=max_agents.max(k));
    let groups: Vec<usize> = (0..agents)
        .map(|a| if a < k { a } else { rng.random_range(0..k) })
        .collect();
    let density = rng.random_range(0.15..0.85);
    let edges = (0..jobs)
        .flat_map(|u| (0..agents).map(move |a| (u, a)))
        .filter(|_| rng.random_bool(density))
        .collect();
    BipartiteGraph::new(
        k,
        (1..=jobs).map(|i| format!("u{i}")).collect(),
        (1..=agents).map(|i| format!("a{i}")).collect(),
        groups,
        edges,
    )
    .expect("generated graph is valid")
}
