//! Instance families: the extremal constructions and the random model.
//!
//! Agents are named `a1, a2, ...` and jobs `u1, u2, ...` in creation order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, GroupVector};
use crate::rational::Rational;

#[derive(Default)]
struct Builder {
    jobs: usize,
    groups: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn jobs(&mut self, n: usize) -> std::ops::Range<usize> {
        self.jobs += n;
        self.jobs - n..self.jobs
    }

    fn agents(&mut self, group: usize, n: usize) -> std::ops::Range<usize> {
        let start = self.groups.len();
        self.groups.extend(std::iter::repeat_n(group, n));
        start..self.groups.len()
    }

    fn complete(&mut self, jobs: std::ops::Range<usize>, agents: std::ops::Range<usize>) {
        for u in jobs {
            for a in agents.clone() {
                self.edges.push((u, a));
            }
        }
    }

    fn pair(&mut self, jobs: std::ops::Range<usize>, agents: std::ops::Range<usize>) {
        debug_assert_eq!(jobs.len(), agents.len());
        self.edges.extend(jobs.zip(agents));
    }

    fn build(self, k: usize) -> Result<BipartiteGraph> {
        let jobs = (1..=self.jobs).map(|i| format!("u{i}")).collect();
        let agents = (1..=self.groups.len()).map(|i| format!("a{i}")).collect();
        BipartiteGraph::new(k, jobs, agents, self.groups, self.edges)
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// One group of `m` agents with `m` private jobs, and `k - 1` groups of `n`
/// agents competing for one shared block of `n` jobs.
pub fn toblerone(k: usize, m: usize, n: usize) -> Result<BipartiteGraph> {
    if k < 2 || m == 0 || n == 0 {
        return Err(invalid(format!(
            "toblerone needs k >= 2, m >= 1, n >= 1 (got {k}, {m}, {n})"
        )));
    }
    let mut b = Builder::default();
    let private = b.jobs(m);
    let own = b.agents(0, m);
    b.pair(private, own);
    let shared = b.jobs(n);
    for g in 1..k {
        let agents = b.agents(g, n);
        b.complete(shared.clone(), agents);
    }
    b.build(k)
}

/// `⌈k/2⌉` groups of `m` agents complete to `m` shared jobs, plus `⌊k/2⌋`
/// groups each with a private complete `m × m` block.
pub fn tight_halves(k: usize, m: usize) -> Result<BipartiteGraph> {
    if k < 2 || m == 0 {
        return Err(invalid(format!(
            "tight-halves needs k >= 2, m >= 1 (got {k}, {m})"
        )));
    }
    let mut b = Builder::default();
    let shared = b.jobs(m);
    let competing = k.div_ceil(2);
    for g in 0..competing {
        let agents = b.agents(g, m);
        b.complete(shared.clone(), agents);
    }
    for g in competing..k {
        let jobs = b.jobs(m);
        let agents = b.agents(g, m);
        b.complete(jobs, agents);
    }
    b.build(k)
}

/// Every group has `m` matchable agents and `OPT([k]) = ρ·k·m`.
///
/// With `f = ⌊kρ⌋` and `a = kρ - f`: groups `1..f-1` own private `m × m`
/// blocks; group `f` has `a·m` agents on private jobs and `(1-a)·m` agents
/// on a shared block of `m` jobs, to which the remaining `k - f` groups
/// (`m` agents each) are complete.
pub fn rho_tight(k: usize, m: usize, rho: Rational) -> Result<BipartiteGraph> {
    if k < 2 || m == 0 {
        return Err(invalid(format!(
            "rho-tight needs k >= 2, m >= 1 (got {k}, {m})"
        )));
    }
    let lower = Rational::new(1, k as i128 - 1)?;
    if rho < lower || rho > Rational::ONE {
        return Err(invalid(format!(
            "rho-tight needs rho in [{lower}, 1], got {rho}"
        )));
    }
    let k_rho = rho.mul_int(k as i128)?;
    let f = k_rho.floor() as usize;
    let partial = k_rho.sub(&Rational::from(f))?.mul_int(m as i128)?;
    if !partial.is_integer() {
        return Err(invalid(format!(
            "(k*rho - floor(k*rho))*m = {partial} is not an integer; choose m as a multiple of its denominator"
        )));
    }
    let partial = partial.numer() as usize;

    let mut b = Builder::default();
    for g in 0..f - 1 {
        let jobs = b.jobs(m);
        let agents = b.agents(g, m);
        b.complete(jobs, agents);
    }
    let g = f - 1;
    let own_jobs = b.jobs(partial);
    let own = b.agents(g, partial);
    b.complete(own_jobs, own);
    let shared = b.jobs(m);
    let rest = b.agents(g, m - partial);
    b.complete(shared.clone(), rest);
    for g in f..k {
        let agents = b.agents(g, m);
        b.complete(shared.clone(), agents);
    }
    b.build(k)
}

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Two groups of sizes `m1`, `m2` (distinct primes): `m1 - 1` jobs complete
/// to the first group, `m2 - 1` jobs complete to the second, and one job
/// adjacent to everybody.
pub fn prime_counterexample(m1: usize, m2: usize) -> Result<BipartiteGraph> {
    if !is_prime(m1) || !is_prime(m2) || m1 == m2 {
        return Err(invalid(format!(
            "prime counterexample needs two distinct primes (got {m1}, {m2})"
        )));
    }
    let mut b = Builder::default();
    let v1 = b.agents(0, m1);
    let v2 = b.agents(1, m2);
    let j1 = b.jobs(m1 - 1);
    b.complete(j1, v1.clone());
    let j2 = b.jobs(m2 - 1);
    b.complete(j2, v2.clone());
    let common = b.jobs(1);
    b.complete(common, v1.start..v2.end);
    b.build(2)
}

/// Complete bipartite graph with the given group sizes.
pub fn complete(k: usize, sizes: &[usize], jobs: usize) -> Result<BipartiteGraph> {
    if sizes.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: sizes.len(),
        });
    }
    if k == 0 || jobs == 0 || sizes.contains(&0) {
        return Err(invalid("complete graph needs positive counts"));
    }
    let mut b = Builder::default();
    let all_jobs = b.jobs(jobs);
    for (g, &n) in sizes.iter().enumerate() {
        let agents = b.agents(g, n);
        b.complete(all_jobs.clone(), agents);
    }
    b.build(k)
}

/// Parameters of the random bipartite model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErConfig {
    /// Number of agents.
    pub n: usize,
    /// Jobs per agent; there are `⌊βn⌋` jobs.
    pub beta: Rational,
    /// Group distribution.
    pub alpha: GroupVector,
    /// Edge probability for agents of each group.
    pub p: GroupVector,
    pub seed: u64,
}

impl ErConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        let open = |r: &Rational| r.is_positive() && *r < Rational::ONE;
        if !open(&self.beta) {
            return Err(invalid(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if self.alpha.is_empty()
            || !self.alpha.is_nonnegative()
            || self.alpha.l1()? != Rational::ONE
        {
            return Err(invalid(format!(
                "alpha must be a distribution, got {:?}",
                self.alpha
            )));
        }
        if self.p.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                got: self.p.len(),
            });
        }
        if let Some(bad) = self.p.iter().find(|p| !open(p)) {
            return Err(invalid(format!(
                "edge probabilities must lie in (0, 1), got {bad}"
            )));
        }
        Ok(())
    }
}

/// `true` with probability `q` (`0 ≤ q ≤ 1`), decided exactly from one
/// 64-bit draw: `r / 2^64 < q`.
fn below(r: u64, q: &Rational) -> Result<bool> {
    let lhs = (r as u128)
        .checked_mul(q.denom() as u128)
        .ok_or(Error::Overflow)?;
    let rhs = (q.numer() as u128)
        .checked_mul(1u128 << 64)
        .ok_or(Error::Overflow)?;
    Ok(lhs < rhs)
}

/// Samples from the random model with ChaCha8 seeded by `config.seed`.
///
/// One draw per agent picks its group, then one draw per (agent, job) pair,
/// agents outer, decides each edge. Probabilities need denominators below
/// `2^63` so the comparison stays exact.
pub fn erdos_renyi(config: &ErConfig) -> Result<BipartiteGraph> {
    config.validate()?;
    let k = config.alpha.len();
    let num_jobs = config.beta.mul_int(config.n as i128)?.floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut cumulative = Vec::with_capacity(k);
    let mut acc = Rational::ZERO;
    for a in config.alpha.iter() {
        acc = acc.add(a)?;
        cumulative.push(acc);
    }
    let mut groups = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let r = rng.next_u64();
        let mut g = k - 1;
        for (i, c) in cumulative.iter().enumerate() {
            if below(r, c)? {
                g = i;
                break;
            }
        }
        groups.push(g);
    }

    let mut edges = Vec::new();
    for (a, &g) in groups.iter().enumerate() {
        for u in 0..num_jobs {
            if below(rng.next_u64(), &config.p[g])? {
                edges.push((u, a));
            }
        }
    }
    let mut b = Builder {
        jobs: num_jobs,
        groups,
        edges,
    };
    b.edges.sort_unstable();
    b.build(k)
}

/// `ln²(n)/n`, rounded up to a multiple of `1e-12`.
pub fn dense_probability(n: usize) -> Result<Rational> {
    if n < 2 {
        return Err(invalid("the dense threshold needs n >= 2"));
    }
    let ln = (n as f64).ln();
    Rational::from_f64_ceil(ln * ln / n as f64, 1_000_000_000_000)
}

/// `1/(4·n^{3/2})`; exact when `n` is a perfect square, otherwise rounded up
/// to a multiple of `1e-15`.
pub fn sparse_probability(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(invalid("the sparse threshold needs n >= 1"));
    }
    let root = (n as f64).sqrt().round() as i128;
    if root * root == n as i128 {
        return Rational::new(1, 4 * n as i128 * root);
    }
    Rational::from_f64_ceil(1.0 / (4.0 * (n as f64).powf(1.5)), 1_000_000_000_000_000)
}
