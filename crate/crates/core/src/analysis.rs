//! Price of Fairness and the bounds on it.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fairness::Permutation;
use crate::flow::{MatchingNetwork, OptOracle};
use crate::graph::{BipartiteGraph, GroupSet, GroupVector};
use crate::polytope::advance;
use crate::rational::{gcd, Rational};

/// Default cap on `k` for the permutation sweep in [`check_decreasing`].
pub const DEFAULT_DECREASING_LIMIT: usize = 8;

/// Default cap on flow solves in [`integral_fair_points`].
pub const DEFAULT_INTEGRAL_LIMIT: usize = 100_000;

/// Which entitlement vector a fair point must be proportional to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Notion {
    /// `w = 1`.
    Egalitarian,
    /// `w_i = |V_i|`.
    Demographic,
    /// `w_i = OPT({i})`.
    Opportunity,
    Custom(GroupVector),
}

impl Notion {
    pub fn name(&self) -> &'static str {
        match self {
            Notion::Egalitarian => "egalitarian",
            Notion::Demographic => "demographic",
            Notion::Opportunity => "opportunity",
            Notion::Custom(_) => "custom",
        }
    }

    pub fn weights(&self, oracle: &OptOracle<'_>) -> Result<GroupVector> {
        let graph = oracle.graph();
        Ok(match self {
            Notion::Egalitarian => GroupVector::ones(graph.k()),
            Notion::Demographic => {
                GroupVector::from_ints(graph.group_sizes().into_iter().map(|s| s as i64))
            }
            Notion::Opportunity => opportunity_weights(oracle),
            Notion::Custom(w) => {
                if w.len() != graph.k() {
                    return Err(Error::DimensionMismatch {
                        expected: graph.k(),
                        got: w.len(),
                    });
                }
                if !w.is_nonnegative() {
                    return Err(Error::InvalidArgument(format!("negative weight in {w:?}")));
                }
                w.clone()
            }
        })
    }
}

/// `w_i = M_i = OPT({i})`.
pub fn opportunity_weights(oracle: &OptOracle<'_>) -> GroupVector {
    GroupVector::from_ints(oracle.singles())
}

/// A Price of Fairness value; infinite when no positive fair point exists
/// but some matching does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pof {
    Finite(Rational),
    Infinite,
}

impl Pof {
    fn ratio(opt: i64, fair_size: &Rational) -> Result<Pof> {
        if opt == 0 {
            return Ok(Pof::Finite(Rational::ONE));
        }
        if fair_size.is_zero() {
            return Ok(Pof::Infinite);
        }
        Ok(Pof::Finite(Rational::from(opt).div(fair_size)?))
    }

    pub fn is_one(&self) -> bool {
        *self == Pof::Finite(Rational::ONE)
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            Pof::Finite(r) => Some(*r),
            Pof::Infinite => None,
        }
    }
}

impl fmt::Display for Pof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pof::Finite(r) => write!(f, "{r}"),
            Pof::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Pof {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecreasingCheck {
    pub holds: bool,
    /// A priority order whose sequence increases somewhere.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Permutation>,
    /// 1-based position of the first entry exceeding its predecessor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RhoBound {
    pub tight: Rational,
    pub relaxed: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PofReport {
    pub notion: String,
    pub weights: GroupVector,
    pub opt: i64,
    pub fair_size: Rational,
    pub pof: Pof,
    pub c_star: Rational,
    /// Maximal set attaining `c*`, 1-based.
    pub argmin: Vec<usize>,
    pub additive_gap: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Rational>,
    /// Set when the fair size is restricted to integral points.
    pub integral: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub bounds: BTreeMap<String, Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decreasing: Option<DecreasingCheck>,
}

/// The `w`-Price of Fairness `OPT([k]) / (c*·Σw)`.
pub fn pof(oracle: &OptOracle<'_>, notion: &Notion) -> Result<PofReport> {
    let w = notion.weights(oracle)?;
    let opt = oracle.opt_all();
    let (c_star, fair_size, argmin) = if w.support().is_empty() {
        (Rational::ZERO, Rational::ZERO, GroupSet::EMPTY)
    } else {
        let step = advance(oracle, &GroupVector::zeros(oracle.k()), &w, w.support())?;
        (step.t_star, step.t_star.mul(&w.l1()?)?, step.tight_set)
    };
    Ok(PofReport {
        notion: notion.name().to_string(),
        pof: Pof::ratio(opt, &fair_size)?,
        additive_gap: Rational::from(opt).sub(&fair_size)?,
        weights: w,
        opt,
        fair_size,
        c_star,
        argmin: argmin.to_one_based(),
        rho: rho(oracle).ok(),
        integral: false,
        bounds: BTreeMap::new(),
        decreasing: None,
    })
}

/// As [`pof`], but the fair size is the largest integral point on the fair
/// ray, as realized by an integral matching.
pub fn pof_integral(oracle: &OptOracle<'_>, notion: &Notion, limit: usize) -> Result<PofReport> {
    let mut report = pof(oracle, notion)?;
    let best = integral_fair_points(oracle, &report.weights, limit)?
        .last()
        .map(|x| x.l1())
        .transpose()?
        .unwrap_or(Rational::ZERO);
    report.fair_size = best;
    report.pof = Pof::ratio(report.opt, &best)?;
    report.additive_gap = Rational::from(report.opt).sub(&best)?;
    report.integral = true;
    Ok(report)
}

/// `OPT([k]) - c*·Σw`: the ℓ₁ distance from the Pareto frontier to the fair ray.
pub fn additive_gap(oracle: &OptOracle<'_>, notion: &Notion) -> Result<Rational> {
    Ok(pof(oracle, notion)?.additive_gap)
}

/// `ρ = OPT([k]) / Σ M_i`.
pub fn rho(oracle: &OptOracle<'_>) -> Result<Rational> {
    let total: i64 = oracle.singles().iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument(
            "rho is undefined when every M_i is 0".into(),
        ));
    }
    Rational::new(oracle.opt_all() as i128, total as i128)
}

/// Supremum of the opportunity PoF over graphs with `k` groups.
pub fn bound_worst_case(k: usize) -> i64 {
    (k as i64 - 1).max(1)
}

/// `m̂/2 + k·m̂²/4 + [k odd]/(4k)` with `m̂ = max M_i / min M_i`, taken over
/// the non-empty groups (empty groups have zero opportunity weight and do
/// not affect the PoF).
pub fn bound_maxmin(oracle: &OptOracle<'_>) -> Result<Rational> {
    let graph = oracle.graph();
    let sizes = graph.group_sizes();
    let m: Vec<i64> = oracle
        .singles()
        .into_iter()
        .zip(&sizes)
        .filter(|(_, &s)| s > 0)
        .map(|(m, _)| m)
        .collect();
    if m.is_empty() || m.contains(&0) {
        return Err(Error::InvalidArgument(
            "max/min bound needs every non-empty group to have M_i > 0".into(),
        ));
    }
    let k = m.len() as i128;
    let hat = Rational::new(
        *m.iter().max().unwrap() as i128,
        *m.iter().min().unwrap() as i128,
    )?;
    let mut bound = hat.div(&Rational::from_int(2))?;
    bound = bound.add(&hat.mul(&hat)?.mul_int(k)?.div(&Rational::from_int(4))?)?;
    if k % 2 == 1 {
        bound = bound.add(&Rational::new(1, 4 * k)?)?;
    }
    Ok(bound)
}

/// `ρ·max((k-⌊kρ⌋+1)/(kρ-⌊kρ⌋+1), k-⌊kρ⌋)` (or 1 when `ρ ≤ 1/(k-1)`),
/// with the relaxed form `ρ((1-ρ)k+1)`.
pub fn bound_rho(k: usize, rho: &Rational) -> Result<RhoBound> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let ki = k as i128;
    if *rho < Rational::new(1, ki)? || *rho > Rational::ONE {
        return Err(Error::InvalidArgument(format!(
            "rho = {rho} lies outside [1/{k}, 1]"
        )));
    }
    let relaxed = Rational::ONE
        .sub(rho)?
        .mul_int(ki)?
        .add(&Rational::ONE)?
        .mul(rho)?;
    let tight = if k == 1 || *rho <= Rational::new(1, ki - 1)? {
        Rational::ONE
    } else {
        let k_rho = rho.mul_int(ki)?;
        let f = k_rho.floor();
        let frac = k_rho.sub(&Rational::from_int(f))?;
        let first = Rational::from_int(ki - f + 1).div(&frac.add(&Rational::ONE)?)?;
        rho.mul(&first.max(Rational::from_int(ki - f)))?
    };
    Ok(RhoBound { tight, relaxed })
}

/// Whether every sequence `M^σ_ℓ = (OPT(σ[..=ℓ]) - OPT(σ[..ℓ])) / M_{σ(ℓ)}`
/// is non-increasing. Entries with `M_{σ(ℓ)} = 0` count as 0.
pub fn check_decreasing(oracle: &OptOracle<'_>, max_k: usize) -> Result<DecreasingCheck> {
    let k = oracle.k();
    if k > max_k {
        return Err(Error::GuardExceeded(format!(
            "decreasing check over {k}! orders exceeds the limit k <= {max_k}"
        )));
    }
    let singles = oracle.singles();
    let witness = Permutation::all(k)
        .into_par_iter()
        .map(|sigma| -> Result<Option<(Permutation, usize)>> {
            let mut prev_opt = 0;
            let mut prev_rate: Option<Rational> = None;
            for pos in 0..k {
                let g = sigma.order()[pos];
                let cur = oracle.opt(sigma.prefix(pos + 1))?;
                let rate = if singles[g] == 0 {
                    Rational::ZERO
                } else {
                    Rational::new((cur - prev_opt) as i128, singles[g] as i128)?
                };
                if prev_rate.is_some_and(|p| rate > p) {
                    return Ok(Some((sigma, pos + 1)));
                }
                prev_rate = Some(rate);
                prev_opt = cur;
            }
            Ok(None)
        })
        .find_first(|r| !matches!(r, Ok(None)))
        .transpose()?
        .flatten();
    Ok(match witness {
        Some((sigma, position)) => DecreasingCheck {
            holds: false,
            sigma: Some(sigma),
            position: Some(position),
        },
        None => DecreasingCheck {
            holds: true,
            sigma: None,
            position: None,
        },
    })
}

/// Smallest integer vector on the ray through `w`, or `None` for `w = 0`.
fn primitive_direction(w: &GroupVector) -> Result<Option<Vec<i128>>> {
    if w.support().is_empty() {
        return Ok(None);
    }
    let mut lcm: i128 = 1;
    for x in w.iter() {
        let d = x.denom();
        lcm = (lcm / gcd(lcm, d)).checked_mul(d).ok_or(Error::Overflow)?;
    }
    let scaled: Vec<i128> = w
        .iter()
        .map(|x| x.mul_int(lcm).map(|y| y.numer()))
        .collect::<Result<_>>()?;
    let g = scaled.iter().fold(0, |acc, &v| gcd(acc, v));
    Ok(Some(scaled.into_iter().map(|v| v / g).collect()))
}

fn integrally_realizable(graph: &BipartiteGraph, x: &[i128]) -> bool {
    let net = MatchingNetwork::new(graph, x, 1);
    net.solve().value() == net.total_quota()
}

/// Every integral point `c·w` (with `c ≥ 0`) realized by some integral
/// matching, in increasing order. Always starts with `0`.
pub fn integral_fair_points(
    oracle: &OptOracle<'_>,
    w: &GroupVector,
    limit: usize,
) -> Result<Vec<GroupVector>> {
    let graph = oracle.graph();
    if w.len() != graph.k() {
        return Err(Error::DimensionMismatch {
            expected: graph.k(),
            got: w.len(),
        });
    }
    if !w.is_nonnegative() {
        return Err(Error::InvalidArgument(format!("negative weight in {w:?}")));
    }
    let zero = GroupVector::zeros(graph.k());
    let Some(d) = primitive_direction(w)? else {
        return Ok(vec![zero]);
    };
    let step: i128 = d.iter().sum();
    let candidates = oracle.opt_all() as i128 / step;
    if candidates as usize >= limit {
        return Err(Error::GuardExceeded(format!(
            "{candidates} candidate integral points exceed the limit {limit}"
        )));
    }
    let mut points = vec![zero];
    for j in 1..=candidates {
        let x: Vec<i128> = d.iter().map(|v| v * j).collect();
        // Integral points of co(M) form a downward-closed set, so the ray
        // leaves it once and for all.
        if !integrally_realizable(graph, &x) {
            break;
        }
        points.push(GroupVector::new(
            x.into_iter().map(Rational::from_int).collect(),
        ));
    }
    Ok(points)
}

/// Adds the applicable opportunity bounds and the decreasing check.
pub fn attach_bounds(report: &mut PofReport, oracle: &OptOracle<'_>, max_k: usize) -> Result<()> {
    let k = oracle.k();
    report
        .bounds
        .insert("worst_case".into(), Rational::from(bound_worst_case(k)));
    if let Ok(b) = bound_maxmin(oracle) {
        report.bounds.insert("maxmin".into(), b);
    }
    let singles = oracle.singles();
    if let (Some(r), Some(first)) = (report.rho, singles.first()) {
        if singles.iter().all(|m| m == first) {
            let b = bound_rho(k, &r)?;
            report.bounds.insert("rho".into(), b.tight);
            report.bounds.insert("rho_relaxed".into(), b.relaxed);
        }
    }
    report.decreasing = Some(check_decreasing(oracle, max_k)?);
    Ok(())
}
