//! Bipartite job/agent graphs with agents partitioned into groups, plus the
//! point and matching types that live on top of them.
//!
//! Groups are 1-based in files and reports and 0-based everywhere in the
//! API.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest number of groups a [`GroupSet`] can hold.
pub const MAX_GROUPS: usize = 63;

/// A subset of group indices stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupSet(u64);

impl GroupSet {
    pub const EMPTY: GroupSet = GroupSet(0);

    pub fn from_bits(bits: u64) -> Self {
        GroupSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{0, .., k-1}`.
    pub fn full(k: usize) -> Self {
        debug_assert!(k <= MAX_GROUPS);
        GroupSet((1u64 << k) - 1)
    }

    pub fn singleton(i: usize) -> Self {
        GroupSet(1u64 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        GroupSet(self.0 | 1u64 << i)
    }

    pub fn without(self, i: usize) -> Self {
        GroupSet(self.0 & !(1u64 << i))
    }

    pub fn union(self, other: GroupSet) -> Self {
        GroupSet(self.0 | other.0)
    }

    pub fn intersection(self, other: GroupSet) -> Self {
        GroupSet(self.0 & other.0)
    }

    pub fn difference(self, other: GroupSet) -> Self {
        GroupSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: GroupSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits >> i & 1 == 1)
    }

    /// 1-based members, as printed in reports.
    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Debug for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for GroupSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter().fold(GroupSet::EMPTY, GroupSet::with)
    }
}

/// A point, weight or rate vector with one exact entry per group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupVector(Vec<Rational>);

impl GroupVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        GroupVector(entries)
    }

    pub fn zeros(k: usize) -> Self {
        GroupVector(vec![Rational::ZERO; k])
    }

    pub fn ones(k: usize) -> Self {
        GroupVector(vec![Rational::ONE; k])
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(values: I) -> Self {
        GroupVector(values.into_iter().map(Rational::from).collect())
    }

    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = GroupVector::zeros(k);
        v.0[i] = Rational::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn set(&mut self, i: usize, value: Rational) {
        self.0[i] = value;
    }

    pub fn l1(&self) -> Result<Rational> {
        // Only used on non-negative vectors; this is the plain sum.
        Rational::sum(&self.0)
    }

    pub fn sum_over(&self, set: GroupSet) -> Result<Rational> {
        Rational::sum(set.iter().map(|i| &self.0[i]))
    }

    /// Squared Euclidean norm.
    pub fn norm2_sq(&self) -> Result<Rational> {
        self.0
            .iter()
            .try_fold(Rational::ZERO, |acc, x| acc.add(&x.mul(x)?))
    }

    pub fn dot(&self, other: &GroupVector) -> Result<Rational> {
        self.check_len(other.len())?;
        self.0
            .iter()
            .zip(&other.0)
            .try_fold(Rational::ZERO, |acc, (a, b)| acc.add(&a.mul(b)?))
    }

    pub fn add(&self, other: &GroupVector) -> Result<GroupVector> {
        self.check_len(other.len())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()
            .map(GroupVector)
    }

    pub fn sub(&self, other: &GroupVector) -> Result<GroupVector> {
        self.check_len(other.len())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()
            .map(GroupVector)
    }

    pub fn scale(&self, t: &Rational) -> Result<GroupVector> {
        self.0
            .iter()
            .map(|a| a.mul(t))
            .collect::<Result<_>>()
            .map(GroupVector)
    }

    /// `self + t * direction`.
    pub fn add_scaled(&self, t: &Rational, direction: &GroupVector) -> Result<GroupVector> {
        self.add(&direction.scale(t)?)
    }

    /// Population variance of the entries.
    pub fn variance(&self) -> Result<Rational> {
        let k = Rational::from(self.0.len());
        let mean = self.l1()?.div(&k)?;
        let mut acc = Rational::ZERO;
        for x in &self.0 {
            let d = x.sub(&mean)?;
            acc = acc.add(&d.mul(&d)?)?;
        }
        acc.div(&k)
    }

    /// Entries sorted ascending.
    pub fn sorted(&self) -> Vec<Rational> {
        let mut v = self.0.clone();
        v.sort();
        v
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// Positions with a strictly positive entry.
    pub fn support(&self) -> GroupSet {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn restrict(&self, set: GroupSet) -> GroupVector {
        GroupVector(
            self.0
                .iter()
                .enumerate()
                .map(|(i, x)| if set.contains(i) { *x } else { Rational::ZERO })
                .collect(),
        )
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                got,
            });
        }
        Ok(())
    }
}

impl Index<usize> for GroupVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Debug for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if x.is_integer() {
                write!(f, "{}", x.numer())?;
            } else {
                write!(f, "{x}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Display for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for GroupVector {
    type Err = Error;

    /// Comma-separated rationals, e.g. `4/3,2/3`.
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(str::parse)
            .collect::<Result<_>>()
            .map(GroupVector)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    k: usize,
    jobs: Vec<String>,
    agents: Vec<AgentEntry>,
    edges: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentEntry {
    id: String,
    group: i64,
}

/// Jobs `U`, agents `V` partitioned into `k` groups, and edges `E ⊆ U × V`.
///
/// Immutable after construction. Jobs and agents keep the order in which
/// they were supplied.
#[derive(Clone)]
pub struct BipartiteGraph {
    k: usize,
    jobs: Vec<String>,
    agents: Vec<String>,
    group_of: Vec<usize>,
    edges: Vec<(usize, usize)>,
    edge_set: HashSet<(usize, usize)>,
    agent_jobs: Vec<Vec<usize>>,
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.jobs == other.jobs
            && self.agents == other.agents
            && self.group_of == other.group_of
            && self.edges == other.edges
    }
}

impl Eq for BipartiteGraph {}

impl fmt::Debug for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BipartiteGraph")
            .field("k", &self.k)
            .field("jobs", &self.jobs.len())
            .field("agents", &self.agents.len())
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl BipartiteGraph {
    /// Builds a graph from index-based parts.
    ///
    /// `groups[v]` is the 0-based group of agent `v`; `edges` are
    /// `(job, agent)` index pairs.
    pub fn new(
        k: usize,
        jobs: Vec<String>,
        agents: Vec<String>,
        groups: Vec<usize>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if k == 0 || k > MAX_GROUPS {
            return Err(Error::InvalidArgument(format!(
                "k must be in 1..={MAX_GROUPS}, got {k}"
            )));
        }
        if groups.len() != agents.len() {
            return Err(Error::DimensionMismatch {
                expected: agents.len(),
                got: groups.len(),
            });
        }
        let mut seen = HashSet::new();
        for id in &jobs {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for id in &agents {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        for (v, &g) in groups.iter().enumerate() {
            if g >= k {
                return Err(Error::GroupOutOfRange {
                    agent: agents[v].clone(),
                    group: g as i64 + 1,
                    k,
                });
            }
        }
        let mut edge_set = HashSet::with_capacity(edges.len());
        let mut agent_jobs = vec![Vec::new(); agents.len()];
        for &(u, v) in &edges {
            if u >= jobs.len() || v >= agents.len() {
                let job = jobs.get(u).cloned().unwrap_or_else(|| format!("#{u}"));
                let agent = agents.get(v).cloned().unwrap_or_else(|| format!("#{v}"));
                let missing = if u >= jobs.len() {
                    job.clone()
                } else {
                    agent.clone()
                };
                return Err(Error::DanglingEndpoint {
                    job,
                    agent,
                    missing,
                });
            }
            if !edge_set.insert((u, v)) {
                return Err(Error::DuplicateEdge(jobs[u].clone(), agents[v].clone()));
            }
            agent_jobs[v].push(u);
        }
        Ok(BipartiteGraph {
            k,
            jobs,
            agents,
            group_of: groups,
            edges,
            edge_set,
            agent_jobs,
        })
    }

    /// Parses and validates the JSON graph document.
    pub fn parse(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        if file.k == 0 || file.k > MAX_GROUPS {
            return Err(Error::Malformed(format!(
                "k must be in 1..={MAX_GROUPS}, got {}",
                file.k
            )));
        }
        let job_index = index_of(&file.jobs)?;
        let agent_ids: Vec<String> = file.agents.iter().map(|a| a.id.clone()).collect();
        let agent_index = index_of(&agent_ids)?;
        let mut groups = Vec::with_capacity(file.agents.len());
        for a in &file.agents {
            if a.group < 1 || a.group as u64 > file.k as u64 {
                return Err(Error::GroupOutOfRange {
                    agent: a.id.clone(),
                    group: a.group,
                    k: file.k,
                });
            }
            groups.push(a.group as usize - 1);
        }
        let mut edges = Vec::with_capacity(file.edges.len());
        for (job, agent) in &file.edges {
            let u = job_index.get(job.as_str());
            let v = agent_index.get(agent.as_str());
            match (u, v) {
                (Some(&u), Some(&v)) => edges.push((u, v)),
                _ => {
                    let missing = if u.is_none() { job } else { agent };
                    return Err(Error::DanglingEndpoint {
                        job: job.clone(),
                        agent: agent.clone(),
                        missing: missing.clone(),
                    });
                }
            }
        }
        BipartiteGraph::new(file.k, file.jobs, agent_ids, groups, edges)
    }

    /// Serializes to the compact JSON graph document.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            k: self.k,
            jobs: self.jobs.clone(),
            agents: self
                .agents
                .iter()
                .zip(&self.group_of)
                .map(|(id, &g)| AgentEntry {
                    id: id.clone(),
                    group: g as i64 + 1,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| (self.jobs[u].clone(), self.agents[v].clone()))
                .collect(),
        };
        serde_json::to_string(&file).expect("graph serialization cannot fail")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn jobs(&self) -> &[String] {
        &self.jobs
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn group_of(&self, agent: usize) -> usize {
        self.group_of[agent]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, job: usize, agent: usize) -> bool {
        self.edge_set.contains(&(job, agent))
    }

    pub fn jobs_of(&self, agent: usize) -> &[usize] {
        &self.agent_jobs[agent]
    }

    /// `|V_i|` for every group.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &g in &self.group_of {
            sizes[g] += 1;
        }
        sizes
    }

    /// Groups without any agent.
    pub fn empty_groups(&self) -> GroupSet {
        self.group_sizes()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn all_groups(&self) -> GroupSet {
        GroupSet::full(self.k)
    }

    /// Group point `X(μ)`: total mass on the agents of each group.
    pub fn group_point_of(&self, matching: &FractionalMatching) -> Result<GroupVector> {
        let mut point = GroupVector::zeros(self.k);
        for (&(u, v), w) in &matching.weights {
            if !self.has_edge(u, v) {
                return Err(Error::InvalidArgument(format!(
                    "matching uses non-edge ({u}, {v})"
                )));
            }
            let g = self.group_of[v];
            point.0[g] = point.0[g].add(w)?;
        }
        Ok(point)
    }
}

fn index_of(ids: &[String]) -> Result<HashMap<&str, usize>> {
    let mut map = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if map.insert(id.as_str(), i).is_some() {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(map)
}

/// Sparse fractional matching `μ: E → [0, 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FractionalMatching {
    weights: BTreeMap<(usize, usize), Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingEntry {
    pub job: String,
    pub agent: String,
    pub weight: Rational,
}

impl FractionalMatching {
    pub fn empty() -> Self {
        FractionalMatching::default()
    }

    /// Validates support, entry range and per-vertex mass. Zero entries are
    /// dropped.
    pub fn new(
        graph: &BipartiteGraph,
        entries: impl IntoIterator<Item = ((usize, usize), Rational)>,
    ) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for ((u, v), w) in entries {
            if !graph.has_edge(u, v) {
                return Err(Error::InvalidArgument(format!(
                    "matching uses non-edge ({u}, {v})"
                )));
            }
            if w.is_negative() || w > Rational::ONE {
                return Err(Error::InvalidArgument(format!(
                    "matching weight {w} outside [0, 1]"
                )));
            }
            if !w.is_zero() {
                let slot = weights.entry((u, v)).or_insert(Rational::ZERO);
                *slot = slot.add(&w)?;
            }
        }
        let m = FractionalMatching { weights };
        m.check_mass(graph)?;
        Ok(m)
    }

    pub(crate) fn from_map_unchecked(weights: BTreeMap<(usize, usize), Rational>) -> Self {
        FractionalMatching { weights }
    }

    fn check_mass(&self, graph: &BipartiteGraph) -> Result<()> {
        let mut job_mass = vec![Rational::ZERO; graph.num_jobs()];
        let mut agent_mass = vec![Rational::ZERO; graph.num_agents()];
        for (&(u, v), w) in &self.weights {
            job_mass[u] = job_mass[u].add(w)?;
            agent_mass[v] = agent_mass[v].add(w)?;
        }
        if let Some(u) = job_mass.iter().position(|m| *m > Rational::ONE) {
            return Err(Error::InvalidArgument(format!(
                "job {} carries mass above 1",
                graph.jobs()[u]
            )));
        }
        if let Some(v) = agent_mass.iter().position(|m| *m > Rational::ONE) {
            return Err(Error::InvalidArgument(format!(
                "agent {} carries mass above 1",
                graph.agents()[v]
            )));
        }
        Ok(())
    }

    /// Re-checks every invariant against `graph`.
    pub fn validate(&self, graph: &BipartiteGraph) -> Result<()> {
        for (&(u, v), w) in &self.weights {
            if !graph.has_edge(u, v) || !w.is_positive() || *w > Rational::ONE {
                return Err(Error::InvalidArgument(format!(
                    "invalid entry ({u}, {v}) = {w}"
                )));
            }
        }
        self.check_mass(graph)
    }

    pub fn get(&self, job: usize, agent: usize) -> Rational {
        self.weights
            .get(&(job, agent))
            .copied()
            .unwrap_or(Rational::ZERO)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), Rational)> + '_ {
        self.weights.iter().map(|(&e, &w)| (e, w))
    }

    pub fn is_integral(&self) -> bool {
        self.weights.values().all(Rational::is_integer)
    }

    /// Entries with identifiers resolved, in `(job, agent)` index order.
    pub fn to_entries(&self, graph: &BipartiteGraph) -> Vec<MatchingEntry> {
        self.weights
            .iter()
            .map(|(&(u, v), &w)| MatchingEntry {
                job: graph.jobs()[u].clone(),
                agent: graph.agents()[v].clone(),
                weight: w,
            })
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub const G_A: &str = r#"{"k": 2, "jobs": ["u1","u2"], "agents": [{"id":"a1","group":1},{"id":"a2","group":1},{"id":"b1","group":2}], "edges": [["u1","a1"],["u2","a2"],["u2","b1"]]}"#;

    pub fn g_a() -> BipartiteGraph {
        BipartiteGraph::parse(G_A).unwrap()
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_reference_graph() {
        let g = g_a();
        assert_eq!(g.num_jobs(), 2);
        assert_eq!(g.num_agents(), 3);
        assert_eq!(g.k(), 2);
        assert_eq!(g.agents(), &["a1", "a2", "b1"]);
        assert_eq!(g.group_sizes(), vec![2, 1]);
        assert!(g.empty_groups().is_empty());
    }

    #[test]
    fn rejects_dangling_endpoint() {
        let text = G_A.replace(r#"["u2","b1"]"#, r#"["u2","zz"]"#);
        match BipartiteGraph::parse(&text) {
            Err(Error::DanglingEndpoint { missing, .. }) => assert_eq!(missing, "zz"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_group_out_of_range() {
        let text = G_A.replace(r#"{"id":"b1","group":2}"#, r#"{"id":"b1","group":3}"#);
        assert!(matches!(
            BipartiteGraph::parse(&text),
            Err(Error::GroupOutOfRange { group: 3, k: 2, .. })
        ));
        let text = G_A.replace(r#"{"id":"b1","group":2}"#, r#"{"id":"b1","group":0}"#);
        assert!(matches!(
            BipartiteGraph::parse(&text),
            Err(Error::GroupOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        let dup_agent = G_A.replace(r#"{"id":"a2","group":1}"#, r#"{"id":"a1","group":1}"#);
        assert!(matches!(
            BipartiteGraph::parse(&dup_agent),
            Err(Error::DuplicateId(_))
        ));
        let dup_job = G_A.replace(r#"["u1","u2"]"#, r#"["u1","u1"]"#);
        assert!(matches!(
            BipartiteGraph::parse(&dup_job),
            Err(Error::DuplicateId(_))
        ));
        let dup_edge = G_A.replace(r#"["u1","a1"],"#, r#"["u1","a1"],["u1","a1"],"#);
        assert!(matches!(
            BipartiteGraph::parse(&dup_edge),
            Err(Error::DuplicateEdge(..))
        ));
        assert!(matches!(
            BipartiteGraph::parse("{"),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            BipartiteGraph::parse(r#"{"k":0,"jobs":[],"agents":[],"edges":[]}"#),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn empty_groups_are_legal() {
        let g = BipartiteGraph::parse(
            r#"{"k":3,"jobs":["u"],"agents":[{"id":"a","group":2}],"edges":[["u","a"]]}"#,
        )
        .unwrap();
        assert_eq!(g.empty_groups(), [0, 2].into_iter().collect());
    }

    #[test]
    fn serialization_round_trip() {
        let g = g_a();
        let text = g.to_json();
        assert_eq!(
            text,
            r#"{"k":2,"jobs":["u1","u2"],"agents":[{"id":"a1","group":1},{"id":"a2","group":1},{"id":"b1","group":2}],"edges":[["u1","a1"],["u2","a2"],["u2","b1"]]}"#
        );
        assert_eq!(BipartiteGraph::parse(&text).unwrap(), g);
    }

    #[test]
    fn group_points() {
        let g = g_a();
        assert_eq!(
            g.group_point_of(&FractionalMatching::empty()).unwrap(),
            GroupVector::from_ints([0, 0])
        );
        let mu = FractionalMatching::new(&g, [((0, 0), Rational::ONE), ((1, 2), Rational::ONE)])
            .unwrap();
        assert_eq!(
            g.group_point_of(&mu).unwrap(),
            GroupVector::from_ints([1, 1])
        );
        let mu = FractionalMatching::new(
            &g,
            [((0, 0), q("1/2")), ((1, 1), q("1/2")), ((1, 2), q("1/2"))],
        )
        .unwrap();
        assert_eq!(
            g.group_point_of(&mu).unwrap(),
            GroupVector::new(vec![Rational::ONE, q("1/2")])
        );
    }

    #[test]
    fn matching_validation() {
        let g = g_a();
        assert!(FractionalMatching::new(&g, [((0, 2), Rational::ONE)]).is_err());
        assert!(FractionalMatching::new(&g, [((1, 1), q("2/3")), ((1, 2), q("2/3"))]).is_err());
        assert!(FractionalMatching::new(&g, [((0, 0), q("3/2"))]).is_err());
        let bad =
            FractionalMatching::from_map_unchecked([((0, 2), Rational::ONE)].into_iter().collect());
        assert!(g.group_point_of(&bad).is_err());
    }

    #[test]
    fn group_set_ops() {
        let s: GroupSet = [0, 2].into_iter().collect();
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.len(), 2);
        assert_eq!(s.with(1), GroupSet::full(3));
        assert_eq!(s.to_one_based(), vec![1, 3]);
        assert!(s.is_subset(GroupSet::full(3)));
    }
}
