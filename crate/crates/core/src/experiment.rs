//! Batch runs over instance families, emitted as CSV.

use std::io::Write;
use std::ops::RangeInclusive;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, Notion, Pof};
use crate::error::{Error, Result};
use crate::flow::OptOracle;
use crate::generators::{self, ErConfig};
use crate::graph::{BipartiteGraph, GroupVector};
use crate::rational::Rational;

pub const CSV_HEADER: [&str; 9] = [
    "family",
    "params",
    "seed",
    "k",
    "opt",
    "fair_size",
    "pof",
    "rho",
    "bound_used",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Experiment {
    /// Random two-group graphs with at most `n` agents.
    K2AlwaysFair { trials: usize, n: usize, seed: u64 },
    TobleroneSweep {
        k: usize,
        n: usize,
        m: RangeInclusive<usize>,
    },
    /// Every attainable `ρ = i/(k·m)` in `[1/(k-1), 1]`.
    RhoSweep { k: usize, m: usize },
    ErDense {
        n: usize,
        beta: Rational,
        k: usize,
        trials: usize,
        seed: u64,
    },
    ErSparse {
        n: usize,
        beta: Rational,
        k: usize,
        trials: usize,
        seed: u64,
    },
    /// All pairs of distinct primes up to `max_prime`, fractional and integral.
    IntegralGap { max_prime: usize },
}

impl Experiment {
    pub const NAMES: [&'static str; 6] = [
        "k2-always-fair",
        "toblerone-sweep",
        "rho-sweep",
        "er-dense",
        "er-sparse",
        "integral-gap",
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub family: String,
    pub params: String,
    pub seed: Option<u64>,
    pub k: usize,
    pub opt: i64,
    pub fair_size: Rational,
    pub pof: Pof,
    pub rho: Option<Rational>,
    pub bound_used: String,
}

fn opportunity_row(
    family: &str,
    params: String,
    seed: Option<u64>,
    graph: &BipartiteGraph,
    integral: bool,
) -> Result<Row> {
    let oracle = OptOracle::new(graph);
    let report = if integral {
        analysis::pof_integral(
            &oracle,
            &Notion::Opportunity,
            analysis::DEFAULT_INTEGRAL_LIMIT,
        )?
    } else {
        analysis::pof(&oracle, &Notion::Opportunity)?
    };
    Ok(Row {
        family: family.to_string(),
        params,
        seed,
        k: graph.k(),
        opt: report.opt,
        fair_size: report.fair_size,
        pof: report.pof,
        rho: report.rho,
        bound_used: String::new(),
    })
}

/// The tightest applicable bound among max/min and worst case.
fn general_bound(graph: &BipartiteGraph) -> String {
    let oracle = OptOracle::new(graph);
    let worst = Rational::from(analysis::bound_worst_case(graph.k()));
    match analysis::bound_maxmin(&oracle) {
        Ok(b) if b < worst => format!("maxmin={b}"),
        _ => format!("worst_case={worst}"),
    }
}

fn er_rows(family: &str, config: ErConfig, trials: usize) -> Result<Vec<Row>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|j| {
            let mut c = config.clone();
            c.seed = config.seed.wrapping_add(j);
            let g = generators::erdos_renyi(&c)?;
            let params = format!("n={};beta={};p={}", c.n, c.beta, c.p[0]);
            let mut row = opportunity_row(family, params, Some(c.seed), &g, false)?;
            row.bound_used = general_bound(&g);
            Ok(row)
        })
        .collect()
}

fn uniform(k: usize) -> Result<GroupVector> {
    Ok(GroupVector::new(vec![Rational::new(1, k as i128)?; k]))
}

fn primes_up_to(n: usize) -> Vec<usize> {
    (2..=n).filter(|&p| generators::is_prime(p)).collect()
}

/// Runs an experiment; rows come out in parameter order.
pub fn run(experiment: &Experiment) -> Result<Vec<Row>> {
    match experiment {
        Experiment::K2AlwaysFair { trials, n, seed } => {
            if *n < 2 {
                return Err(Error::InvalidArgument("k2-always-fair needs n >= 2".into()));
            }
            // Draw every instance's shape up front so the parallel part only
            // depends on its own parameters.
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let configs: Vec<ErConfig> = (0..*trials)
                .map(|_| ErConfig {
                    n: rng.random_range(2..=*n),
                    beta: Rational::new(rng.random_range(1..=9), 10).unwrap(),
                    alpha: "1/2,1/2".parse().unwrap(),
                    p: GroupVector::new(
                        (0..2)
                            .map(|_| Rational::new(rng.random_range(1..=9), 10).unwrap())
                            .collect(),
                    ),
                    seed: rng.next_u64(),
                })
                .collect();
            configs
                .into_par_iter()
                .map(|c| {
                    let g = generators::erdos_renyi(&c)?;
                    let params = format!("n={};beta={};p={},{}", c.n, c.beta, c.p[0], c.p[1]);
                    let mut row = opportunity_row("er-k2", params, Some(c.seed), &g, false)?;
                    row.bound_used = "worst_case=1/1".into();
                    Ok(row)
                })
                .collect()
        }
        Experiment::TobleroneSweep { k, n, m } => {
            let bound = format!(
                "worst_case={}",
                Rational::from(analysis::bound_worst_case(*k))
            );
            m.clone()
                .into_par_iter()
                .map(|m| {
                    let g = generators::toblerone(*k, m, *n)?;
                    let mut row = opportunity_row(
                        "toblerone",
                        format!("k={k};m={m};n={n}"),
                        None,
                        &g,
                        false,
                    )?;
                    row.bound_used = bound.clone();
                    Ok(row)
                })
                .collect()
        }
        Experiment::RhoSweep { k, m } => {
            if *k < 2 || *m == 0 {
                return Err(Error::InvalidArgument(
                    "rho-sweep needs k >= 2 and m >= 1".into(),
                ));
            }
            let total = (k * m) as i128;
            let first = (total + *k as i128 - 2) / (*k as i128 - 1);
            (first..=total)
                .into_par_iter()
                .map(|i| {
                    let rho = Rational::new(i, total)?;
                    let g = generators::rho_tight(*k, *m, rho)?;
                    let mut row = opportunity_row(
                        "rho-tight",
                        format!("k={k};m={m};rho={rho}"),
                        None,
                        &g,
                        false,
                    )?;
                    let b = analysis::bound_rho(*k, &rho)?;
                    row.bound_used = format!("rho={};relaxed={}", b.tight, b.relaxed);
                    Ok(row)
                })
                .collect()
        }
        Experiment::ErDense {
            n,
            beta,
            k,
            trials,
            seed,
        } => {
            let config = ErConfig {
                n: *n,
                beta: *beta,
                alpha: uniform(*k)?,
                p: GroupVector::new(vec![generators::dense_probability(*n)?; *k]),
                seed: *seed,
            };
            er_rows("er-dense", config, *trials)
        }
        Experiment::ErSparse {
            n,
            beta,
            k,
            trials,
            seed,
        } => {
            let config = ErConfig {
                n: *n,
                beta: *beta,
                alpha: uniform(*k)?,
                p: GroupVector::new(vec![generators::sparse_probability(*n)?; *k]),
                seed: *seed,
            };
            er_rows("er-sparse", config, *trials)
        }
        Experiment::IntegralGap { max_prime } => {
            let primes = primes_up_to(*max_prime);
            let mut cases = Vec::new();
            for (i, &p1) in primes.iter().enumerate() {
                for &p2 in &primes[i + 1..] {
                    for integral in [false, true] {
                        cases.push((p1, p2, integral));
                    }
                }
            }
            cases
                .into_par_iter()
                .map(|(p1, p2, integral)| {
                    let g = generators::prime_counterexample(p1, p2)?;
                    let mode = if integral { "integral" } else { "fractional" };
                    let mut row = opportunity_row(
                        "prime",
                        format!("m1={p1};m2={p2};{mode}"),
                        None,
                        &g,
                        integral,
                    )?;
                    row.bound_used = general_bound(&g);
                    Ok(row)
                })
                .collect()
        }
    }
}

/// Writes rows under the fixed header.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let io = |e: csv::Error| Error::Malformed(format!("csv output: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Malformed(format!("csv output: {e}")))?;
    Ok(())
}
