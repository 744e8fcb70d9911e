//! Exact geometry of the fractional polytope `co(M) = {x ≥ 0 : x(Λ) ≤ OPT(Λ)}`.
//!
//! Nothing here enumerates facets; every question is one or a few scaled
//! max-flow solves.

use crate::error::{Error, Result};
use crate::flow::{MatchingNetwork, OptOracle};
use crate::graph::{BipartiteGraph, FractionalMatching, GroupSet, GroupVector};
use crate::rational::Rational;

/// Outcome of moving a point along a direction until it hits the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdvanceResult {
    /// Largest step keeping `x + t·rates` inside the polytope.
    pub t_star: Rational,
    /// `x + t_star·rates`.
    pub point: GroupVector,
    /// Active groups whose coordinate cannot increase at `point`
    /// (`tight_set ∩ active`).
    pub tight_groups: GroupSet,
    /// Maximal tight set at `point`, read from the terminating cut.
    pub tight_set: GroupSet,
    /// Number of flow solves spent in the Newton iteration.
    pub iterations: usize,
}

fn check_point(graph: &BipartiteGraph, x: &GroupVector) -> Result<()> {
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
    Ok(())
}

/// True iff `x` lies in `co(M)`.
pub fn membership(graph: &BipartiteGraph, x: &GroupVector) -> Result<bool> {
    check_point(graph, x)?;
    let net = MatchingNetwork::for_point(graph, x)?;
    Ok(net.solve().value() == net.total_quota())
}

/// A fractional matching whose group point is exactly `x`.
pub fn realize(graph: &BipartiteGraph, x: &GroupVector) -> Result<FractionalMatching> {
    check_point(graph, x)?;
    let net = MatchingNetwork::for_point(graph, x)?;
    let solved = net.solve();
    if solved.value() != net.total_quota() {
        return Err(Error::NotRealizable(format!("{x:?} is outside co(M)")));
    }
    net.extract_matching(&solved)
}

fn require_member(graph: &BipartiteGraph, x: &GroupVector) -> Result<()> {
    if !membership(graph, x)? {
        return Err(Error::Infeasible(format!("{x:?} is outside co(M)")));
    }
    Ok(())
}

/// True iff coordinate `i` of `x` cannot be increased inside `co(M)`, i.e.
/// `i` belongs to some tight set.
pub fn frozen(graph: &BipartiteGraph, x: &GroupVector, i: usize) -> Result<bool> {
    require_member(graph, x)?;
    frozen_unchecked(graph, x, i)
}

/// Lifts the quota of group `i` to `|V_i|` and checks whether the flow can
/// use any of the extra room.
fn frozen_unchecked(graph: &BipartiteGraph, x: &GroupVector, i: usize) -> Result<bool> {
    if i >= graph.k() {
        return Err(Error::InvalidArgument(format!(
            "group index {i} out of range"
        )));
    }
    let base = MatchingNetwork::for_point(graph, x)?;
    let unit = base.unit();
    let mut quotas: Vec<i128> = (0..graph.k()).map(|j| base.quota(j)).collect();
    let room = (graph.group_sizes()[i] as i128)
        .checked_mul(unit)
        .ok_or(Error::Overflow)?;
    let target = base.total_quota();
    quotas[i] = quotas[i].max(room);
    let lifted = MatchingNetwork::new(graph, &quotas, unit);
    Ok(lifted.solve().value() == target)
}

/// The maximal tight set `{i : x(Λ) = OPT(Λ) for some Λ ∋ i}` at a member
/// point, read from the maximal minimum cut of one flow.
pub fn maximal_tight_set(graph: &BipartiteGraph, x: &GroupVector) -> Result<GroupSet> {
    check_point(graph, x)?;
    let net = MatchingNetwork::for_point(graph, x)?;
    let solved = net.solve();
    if solved.value() != net.total_quota() {
        return Err(Error::Infeasible(format!("{x:?} is outside co(M)")));
    }
    Ok(solved.max_cut_groups())
}

/// Moves `x` along `rates` (restricted to `active`) as far as possible.
///
/// The step is found by Newton iteration on cuts: solve the flow at a
/// candidate step, and if it is infeasible the minimum cut names a violated
/// set `Λ`, whose constraint `x(Λ) + t·rates(Λ) ≤ OPT(Λ)` gives the next
/// (strictly smaller) candidate. The first feasible candidate is exact.
pub fn advance(
    oracle: &OptOracle<'_>,
    x: &GroupVector,
    rates: &GroupVector,
    active: GroupSet,
) -> Result<AdvanceResult> {
    let graph = oracle.graph();
    check_point(graph, x)?;
    if rates.len() != graph.k() {
        return Err(Error::DimensionMismatch {
            expected: graph.k(),
            got: rates.len(),
        });
    }
    if !rates.is_nonnegative() {
        return Err(Error::InvalidArgument(format!(
            "negative rate in {rates:?}"
        )));
    }
    let rates = rates.restrict(active);
    let min_rate = rates
        .iter()
        .filter(|r| r.is_positive())
        .min()
        .copied()
        .ok_or_else(|| Error::InvalidArgument("all rates are zero on the active set".into()))?;
    require_member(graph, x)?;

    let mut t = Rational::from_int(oracle.opt_all() as i128).div(&min_rate)?;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let y = x.add_scaled(&t, &rates)?;
        let net = MatchingNetwork::for_point(graph, &y)?;
        let solved = net.solve();
        if solved.value() == net.total_quota() {
            // Tight sets are closed under union, so a coordinate is frozen
            // exactly when it lies in the maximal one.
            let tight_set = solved.max_cut_groups();
            return Ok(AdvanceResult {
                t_star: t,
                point: y,
                tight_groups: tight_set.intersection(active),
                tight_set,
                iterations,
            });
        }
        let violated = solved.min_cut_groups();
        let rate_mass = rates.sum_over(violated)?;
        // The violated set always carries positive rate because x itself is
        // feasible.
        debug_assert!(rate_mass.is_positive());
        let slack =
            Rational::from_int(oracle.opt(violated)? as i128).sub(&x.sum_over(violated)?)?;
        let next = slack.div(&rate_mass)?;
        if next >= t || next.is_negative() {
            return Err(Error::Infeasible(format!(
                "Newton step did not decrease ({t} -> {next})"
            )));
        }
        t = next;
    }
}
