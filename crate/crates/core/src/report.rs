//! JSON documents emitted by the command-line tool.

use serde::Serialize;

use crate::fairness::{FairSolution, Permutation};
use crate::graph::{BipartiteGraph, GroupVector, MatchingEntry};
use crate::rational::Rational;

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub rule: String,
    pub k: usize,
    pub point: GroupVector,
    /// `‖point‖₁`.
    pub size: Rational,
    pub opt: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Permutation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<GroupVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_star: Option<Rational>,
    /// Maximal tight set at the point, 1-based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tight_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching: Option<Vec<MatchingEntry>>,
}

impl SolveReport {
    pub fn new(rule: &str, point: GroupVector, opt: i64) -> crate::Result<Self> {
        Ok(SolveReport {
            rule: rule.to_string(),
            k: point.len(),
            size: point.l1()?,
            point,
            opt,
            sigma: None,
            notion: None,
            weights: None,
            c_star: None,
            tight_set: None,
            mode: None,
            seed: None,
            samples: None,
            matching: None,
        })
    }

    pub fn from_solution(
        sol: &FairSolution,
        opt: i64,
        graph: &BipartiteGraph,
        emit_matching: bool,
    ) -> crate::Result<Self> {
        let mut r = SolveReport::new(sol.rule, sol.point.clone(), opt)?;
        r.sigma = sol.sigma.clone();
        r.weights = sol.weights.clone();
        r.c_star = sol.c_star;
        r.tight_set = sol.tight_set.map(|s| s.to_one_based());
        if emit_matching {
            r.matching = Some(sol.matching.to_entries(graph));
        }
        Ok(r)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}
