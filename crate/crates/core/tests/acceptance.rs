//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use fairmatch::analysis::{self, Notion, Pof};
use fairmatch::brute::{self, PointSet};
use fairmatch::experiment::{self, Experiment};
use fairmatch::fairness::{self, Permutation, ShapleyMode};
use fairmatch::generators::{self, ErConfig};
use fairmatch::polytope::membership;
use fairmatch::{BipartiteGraph, GroupSet, GroupVector, OptOracle, Rational};

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// The shared family of tiny instances, with their enumerated point sets.
struct Instance {
    graph: BipartiteGraph,
    points: PointSet,
}

fn tiny_instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let graphs: Vec<BipartiteGraph> = (0..600)
        .map(|_| common::random_graph(&mut rng, 3, 6, 6, brute::EDGE_GUARD))
        .collect();
    graphs
        .into_par_iter()
        .map(|graph| {
            let points = brute::enumerate_points(&graph).expect("within the edge guard");
            Instance { graph, points }
        })
        .collect()
}

fn to_vector(x: &[i64]) -> GroupVector {
    GroupVector::from_ints(x.iter().copied())
}

fn criterion_1(instances: &[Instance]) -> Outcome {
    let probes: usize = instances
        .par_iter()
        .enumerate()
        .map(|(n, inst)| -> Result<usize, String> {
            let g = &inst.graph;
            let oracle = OptOracle::new(g);
            for bits in 0..1u64 << g.k() {
                let set = GroupSet::from_bits(bits);
                let flow = ok(oracle.opt(set))?;
                ensure!(
                    flow == inst.points.opt(set),
                    "instance {n}: OPT({bits:b}) flow {flow} vs brute {}",
                    inst.points.opt(set)
                );
            }
            // Integral probes over the bounding box grown by one: integral
            // points of co(M) are exactly the realizable ones.
            let hi: Vec<i64> = inst.points.bounding_box().iter().map(|h| h + 1).collect();
            let mut x = vec![0i64; g.k()];
            let mut count = 0;
            loop {
                let member = ok(membership(g, &to_vector(&x)))?;
                ensure!(
                    member == inst.points.contains(&x),
                    "instance {n}: membership({x:?}) = {member}"
                );
                count += 1;
                let Some(i) = (0..x.len()).find(|&i| x[i] < hi[i]) else {
                    break;
                };
                x[i] += 1;
                for v in &mut x[..i] {
                    *v = 0;
                }
            }
            // Rational probes against the enumerated rank inequalities.
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..10 {
                let y = GroupVector::new(
                    hi.iter()
                        .map(|&h| Rational::new(rng.random_range(0..=(2 * h as i128)), 2).unwrap())
                        .collect(),
                );
                let member = ok(membership(g, &y))?;
                ensure!(
                    member == ok(inst.points.satisfies_rank_inequalities(&y))?,
                    "instance {n}: rational membership({y:?}) = {member}"
                );
                count += 1;
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    Ok(format!(
        "{} instances, all OPT(Λ) equal, {probes} membership probes agree",
        instances.len()
    ))
}

fn criterion_2(instances: &[Instance]) -> Outcome {
    for (n, inst) in instances.iter().enumerate() {
        ensure!(
            brute::check_discrete_polymatroid(&inst.points.points),
            "instance {n}: axioms fail"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut pairs = 0;
    let mut attempts = 0;
    while pairs < 1200 {
        attempts += 1;
        ensure!(attempts < 100_000, "could not draw enough matching pairs");
        let inst = &instances[rng.random_range(0..instances.len())];
        let matchings = ok(brute::enumerate_matchings(&inst.graph, brute::EDGE_GUARD))?;
        let mu = matchings.choose(&mut rng).unwrap();
        let nu = matchings.choose(&mut rng).unwrap();
        if mu.len() >= nu.len() {
            continue;
        }
        let aug = ok(brute::augment(&inst.graph, mu, nu))?;
        let x_mu = brute::point_of(&inst.graph, mu);
        let x_nu = brute::point_of(&inst.graph, nu);
        let i = aug.group;
        ensure!(
            x_mu[i] < x_nu[i],
            "augment chose group {} with X(mu) {x_mu:?}, X(nu) {x_nu:?}",
            i + 1
        );
        let mut target = x_mu.clone();
        target[i] += 1;
        ensure!(
            inst.points.contains(&target),
            "X(mu) + e_{} = {target:?} is not realizable",
            i + 1
        );
        ensure!(
            brute::point_of(&inst.graph, &aug.matching) == target,
            "witness matching has the wrong point"
        );
        pairs += 1;
    }
    Ok(format!(
        "axioms hold on {} point sets; {pairs} augment pairs valid",
        instances.len()
    ))
}

fn criterion_3(instances: &[Instance]) -> Outcome {
    let checked: usize = instances
        .par_iter()
        .enumerate()
        .map(|(n, inst)| -> Result<usize, String> {
            let g = &inst.graph;
            let oracle = OptOracle::new(g);
            let total = Rational::from(inst.points.opt(g.all_groups()));
            let perms = Permutation::all(g.k());
            for sigma in &perms {
                let sol = ok(fairness::serial_dictatorship(&oracle, sigma))?;
                let mut prev = 0;
                for pos in 0..g.k() {
                    let cur = inst.points.opt(sigma.prefix(pos + 1));
                    let gi = sigma.order()[pos];
                    ensure!(
                        sol.point[gi] == Rational::from(cur - prev),
                        "instance {n}, sigma {:?}: {:?}",
                        sigma.to_one_based(),
                        sol.point
                    );
                    prev = cur;
                }
                ensure!(
                    ok(sol.point.l1())? == total,
                    "instance {n}: norm differs from OPT"
                );
                ensure!(
                    ok(g.group_point_of(&sol.matching))? == sol.point,
                    "instance {n}: witness mismatch"
                );
                ensure!(
                    sol.matching.is_integral(),
                    "instance {n}: witness not integral"
                );
            }
            Ok(perms.len())
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    Ok(format!(
        "{checked} (instance, order) pairs match prefix differences"
    ))
}

fn criterion_4(instances: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut graphs: Vec<BipartiteGraph> = instances
        .iter()
        .take(200)
        .map(|i| i.graph.clone())
        .collect();
    for k in [4, 5] {
        for _ in 0..40 {
            graphs.push(common::random_graph_with_k(&mut rng, k, 8, 12));
        }
    }
    graphs
        .par_iter()
        .enumerate()
        .try_for_each(|(n, g)| -> Result<(), String> {
            let oracle = OptOracle::new(g);
            let phi = ok(fairness::shapley(&oracle, ShapleyMode::Exact))?;
            let perms = Permutation::all(g.k());
            let mut sum = GroupVector::zeros(g.k());
            for sigma in &perms {
                sum = ok(sum.add(&ok(fairness::lexmax_point(&oracle, sigma))?))?;
            }
            let mean = ok(sum.scale(&ok(Rational::new(1, perms.len() as i128))?))?;
            ensure!(phi == mean, "graph {n}: shapley {phi:?} vs mean {mean:?}");
            ensure!(
                ok(membership(g, &phi))?,
                "graph {n}: shapley point outside co(M)"
            );
            ensure!(
                ok(phi.l1())? == Rational::from(oracle.opt_all()),
                "graph {n}: shapley norm"
            );
            Ok(())
        })?;
    Ok(format!(
        "{} graphs with k <= 5: exact Shapley is the barycenter",
        graphs.len()
    ))
}

fn criterion_5(instances: &[Instance]) -> Outcome {
    instances
        .par_iter()
        .enumerate()
        .try_for_each(|(n, inst)| -> Result<(), String> {
            let g = &inst.graph;
            let oracle = OptOracle::new(g);
            let lex = ok(fairness::leximin(&oracle, &GroupVector::ones(g.k())))?.point;
            let lex_sorted = lex.sorted();
            let lex_norm = ok(lex.norm2_sq())?;
            let lex_var = ok(lex.variance())?;
            for sigma in Permutation::all(g.k()) {
                let z = ok(fairness::lexmax_point(&oracle, &sigma))?;
                let z_sorted = z.sorted();
                let (mut a, mut b) = (Rational::ZERO, Rational::ZERO);
                for j in 0..g.k() {
                    a = ok(a.add(&lex_sorted[j]))?;
                    b = ok(b.add(&z_sorted[j]))?;
                    ensure!(
                        a >= b,
                        "instance {n}: prefix {j} of leximin {lex:?} below vertex {z:?}"
                    );
                }
                if z != lex {
                    ensure!(
                        lex_norm < ok(z.norm2_sq())?,
                        "instance {n}: norm not strictly smaller than {z:?}"
                    );
                    ensure!(
                        lex_var < ok(z.variance())?,
                        "instance {n}: variance not strictly smaller than {z:?}"
                    );
                }
            }
            Ok(())
        })?;
    Ok(format!(
        "leximin dominates every vertex on {} instances",
        instances.len()
    ))
}

fn criterion_6(instances: &[Instance]) -> Outcome {
    instances
        .par_iter()
        .enumerate()
        .try_for_each(|(n, inst)| -> Result<(), String> {
            let g = &inst.graph;
            let k = g.k();
            let oracle = OptOracle::new(g);
            let ones = GroupVector::ones(k);
            let p = ok(fairness::projection_pair(&oracle, &ones))?;
            // t* = max{t : t·1 ∈ co(M)} = min over nonempty Λ of OPT(Λ)/|Λ|.
            let t_brute = (1..1u64 << k)
                .map(|bits| {
                    let set = GroupSet::from_bits(bits);
                    Rational::new(inst.points.opt(set) as i128, set.len() as i128).unwrap()
                })
                .min()
                .unwrap();
            ensure!(
                p.t_star == t_brute,
                "instance {n}: t* {} vs {}",
                p.t_star,
                t_brute
            );
            ensure!(
                p.fair_optimum == ok(ones.scale(&p.t_star))?,
                "instance {n}: fair point not t*·1"
            );
            let h = ok(Rational::new(oracle.opt_all() as i128, k as i128))?;
            ensure!(
                p.center == h,
                "instance {n}: center {} vs OPT/K {h}",
                p.center
            );
            ensure!(
                p.orthogonality.is_zero(),
                "instance {n}: inner product {}",
                p.orthogonality
            );
            ensure!(p.holds(&ones), "instance {n}: certificate fails");
            Ok(())
        })?;
    Ok(format!(
        "orthogonality is exactly 0 on {} instances",
        instances.len()
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut graphs: Vec<BipartiteGraph> = (0..100)
        .map(|_| common::random_graph_with_k(&mut rng, 2, 20, 20))
        .collect();
    let rows = ok(experiment::run(&Experiment::K2AlwaysFair {
        trials: 100,
        n: 20,
        seed: 7,
    }))?;
    ensure!(rows.len() == 100, "experiment produced {} rows", rows.len());
    for (n, r) in rows.iter().enumerate() {
        ensure!(
            r.pof.is_one(),
            "experiment row {n} ({}) has pof {}",
            r.params,
            r.pof
        );
    }
    for (n, g) in graphs.drain(..).enumerate() {
        let r = ok(analysis::pof(&OptOracle::new(&g), &Notion::Opportunity))?;
        ensure!(r.pof.is_one(), "graph {n}: pof {}", r.pof);
    }
    Ok("200 seeded k = 2 graphs (100 uniform, 100 random-model) have pof 1".into())
}

fn criterion_8() -> Outcome {
    for k in [3usize, 4, 5] {
        let mut prev: Option<Rational> = None;
        for m in [10usize, 100, 1000] {
            let g = ok(generators::toblerone(k, m, 1))?;
            let r = ok(analysis::pof(&OptOracle::new(&g), &Notion::Opportunity))?;
            let expected =
                ok(Rational::from(m + 1).div(&ok(
                    ok(Rational::new(m as i128, k as i128 - 1))?.add(&Rational::ONE)
                )?))?;
            ensure!(
                r.pof == Pof::Finite(expected),
                "k={k}, m={m}: pof {} vs {expected}",
                r.pof
            );
            ensure!(
                expected < Rational::from(k - 1),
                "k={k}, m={m}: pof reaches k-1"
            );
            ensure!(
                prev.is_none_or(|p| p < expected),
                "k={k}: not increasing at m={m}"
            );
            prev = Some(expected);
        }
    }
    let g = ok(generators::toblerone(3, 98, 1))?;
    let r = ok(analysis::pof(&OptOracle::new(&g), &Notion::Opportunity))?;
    ensure!(
        r.pof == Pof::Finite(q("99/50")),
        "toblerone(3, 98, 1): {}",
        r.pof
    );
    Ok("9 toblerone graphs match (M+1)/(M/(K-1)+1); toblerone(3,98,1) = 99/50".into())
}

fn criterion_9() -> Outcome {
    for k in 2usize..=8 {
        for m in [1usize, 3] {
            let g = ok(generators::tight_halves(k, m))?;
            let oracle = OptOracle::new(&g);
            let r = ok(analysis::pof(&oracle, &Notion::Opportunity))?;
            let expected = ok(Rational::new(
                ((1 + k / 2) * k.div_ceil(2)) as i128,
                k as i128,
            ))?;
            ensure!(
                r.pof == Pof::Finite(expected),
                "k={k}, m={m}: pof {} vs {expected}",
                r.pof
            );
            let bound = ok(analysis::bound_maxmin(&oracle))?;
            ensure!(
                bound == expected,
                "k={k}, m={m}: maxmin bound {bound} vs {expected}"
            );
        }
    }
    Ok("14 tight-halves graphs attain the max/min bound exactly".into())
}

fn criterion_10() -> Outcome {
    let mut values = Vec::new();
    for rho in ["1/2", "3/5", "7/10", "9/10"] {
        let rho = q(rho);
        let g = ok(generators::rho_tight(10, 10, rho))?;
        let oracle = OptOracle::new(&g);
        ensure!(
            ok(analysis::rho(&oracle))? == rho,
            "rho-tight graph has rho {}",
            ok(analysis::rho(&oracle))?
        );
        let r = ok(analysis::pof(&oracle, &Notion::Opportunity))?;
        let b = ok(analysis::bound_rho(10, &rho))?;
        ensure!(
            r.pof == Pof::Finite(b.tight),
            "rho={rho}: pof {} vs bound {}",
            r.pof,
            b.tight
        );
        let relaxed = ok(ok(ok(Rational::ONE.sub(&rho))?.mul_int(10))?.add(&Rational::ONE))?;
        let relaxed = ok(relaxed.mul(&rho))?;
        ensure!(
            b.relaxed == relaxed,
            "rho={rho}: relaxed bound {} vs {relaxed}",
            b.relaxed
        );
        ensure!(
            b.tight <= relaxed,
            "rho={rho}: bound {} exceeds relaxed {relaxed}",
            b.tight
        );
        values.push(format!("{rho}->{}", b.tight));
    }
    Ok(format!("pof equals the rho bound at {}", values.join(", ")))
}

fn criterion_11(instances: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 0..50 {
        let k = rng.random_range(1..=5);
        let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(1..=6)).collect();
        let jobs = rng.random_range(1..=10);
        let g = ok(generators::complete(k, &sizes, jobs))?;
        let oracle = OptOracle::new(&g);
        let c = ok(analysis::check_decreasing(&oracle, 8))?;
        ensure!(
            c.holds,
            "complete graph {n} ({sizes:?}, {jobs} jobs) fails at {:?}",
            c.position
        );
        let r = ok(analysis::pof(&oracle, &Notion::Opportunity))?;
        ensure!(r.pof.is_one(), "complete graph {n}: pof {}", r.pof);
    }
    let holds = instances
        .par_iter()
        .enumerate()
        .map(|(n, inst)| -> Result<bool, String> {
            let oracle = OptOracle::new(&inst.graph);
            let c = ok(analysis::check_decreasing(&oracle, 8))?;
            if c.holds {
                let r = ok(analysis::pof(&oracle, &Notion::Opportunity))?;
                ensure!(r.pof.is_one(), "instance {n}: decreasing but pof {}", r.pof);
            }
            Ok(c.holds)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|&h| h)
        .count();
    Ok(format!(
        "50 complete graphs decreasing with pof 1; {holds}/{} tiny instances decreasing, all pof 1",
        instances.len()
    ))
}

fn criterion_12() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_fairmatch");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (m1, m2) in [(2usize, 3usize), (3, 5)] {
        let g = ok(generators::prime_counterexample(m1, m2))?;
        let oracle = OptOracle::new(&g);
        let w = analysis::opportunity_weights(&oracle);
        let pts = ok(analysis::integral_fair_points(
            &oracle,
            &w,
            analysis::DEFAULT_INTEGRAL_LIMIT,
        ))?;
        ensure!(
            pts == vec![GroupVector::zeros(2)],
            "({m1},{m2}): integral points {pts:?}"
        );
        let r = ok(analysis::pof(&oracle, &Notion::Opportunity))?;
        ensure!(
            r.fair_size.is_positive() && r.pof.finite().is_some(),
            "({m1},{m2}): fractional pof {}",
            r.pof
        );

        let path = dir.path().join(format!("prime-{m1}-{m2}.json"));
        std::fs::write(&path, g.to_json()).map_err(|e| e.to_string())?;
        let out = Command::new(bin)
            .arg("pof")
            .arg(&path)
            .arg("--integral")
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            out.status.success(),
            "cli failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v: serde_json::Value = ok(serde_json::from_slice(&out.stdout))?;
        ensure!(
            v["pof"] == "inf",
            "({m1},{m2}): cli --integral pof {}",
            v["pof"]
        );
    }
    Ok(
        "prime (2,3), (3,5): integral fair set {0}, fractional pof finite, --integral reports inf"
            .into(),
    )
}

fn er_share(config: ErConfig, seeds: std::ops::Range<u64>) -> Result<(usize, usize), String> {
    let total = seeds.end - seeds.start;
    let fair = seeds
        .into_par_iter()
        .map(|seed| -> Result<bool, String> {
            let mut c = config.clone();
            c.seed = seed;
            let g = ok(generators::erdos_renyi(&c))?;
            Ok(
                ok(analysis::pof(&OptOracle::new(&g), &Notion::Opportunity))?
                    .pof
                    .is_one(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|&f| f)
        .count();
    Ok((fair, total as usize))
}

fn criterion_13() -> Outcome {
    let half = q("1/2");
    let alpha: GroupVector = "1/2,1/2".parse().unwrap();
    let dense = ok(generators::dense_probability(200))?;
    let (d_fair, d_total) = er_share(
        ErConfig {
            n: 200,
            beta: half,
            alpha: alpha.clone(),
            p: GroupVector::new(vec![dense; 2]),
            seed: 0,
        },
        1..51,
    )?;
    let sparse = ok(generators::sparse_probability(400))?;
    ensure!(sparse == q("1/32000"), "sparse p = {sparse}");
    let (s_fair, s_total) = er_share(
        ErConfig {
            n: 400,
            beta: half,
            alpha,
            p: GroupVector::new(vec![sparse; 2]),
            seed: 0,
        },
        1..51,
    )?;
    ensure!(
        d_fair * 100 >= 95 * d_total,
        "dense: pof 1 on only {d_fair}/{d_total}"
    );
    ensure!(
        s_fair * 100 >= 95 * s_total,
        "sparse: pof 1 on only {s_fair}/{s_total}"
    );
    Ok(format!(
        "dense pof 1 on {d_fair}/{d_total} seeds, sparse on {s_fair}/{s_total}"
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let instances = tiny_instances();
    let criteria: Vec<(&str, Check<'_>)> = vec![
        ("oracle equivalence", Box::new(|| criterion_1(&instances))),
        (
            "discrete polymatroid axioms and augmentation",
            Box::new(|| criterion_2(&instances)),
        ),
        (
            "lexmax vertex structure",
            Box::new(|| criterion_3(&instances)),
        ),
        ("Shapley barycenter", Box::new(|| criterion_4(&instances))),
        ("leximin optimality", Box::new(|| criterion_5(&instances))),
        (
            "projection identities",
            Box::new(|| criterion_6(&instances)),
        ),
        (
            "two groups are always opportunity fair",
            Box::new(criterion_7),
        ),
        ("worst-case tightness", Box::new(criterion_8)),
        ("max/min bound tightness", Box::new(criterion_9)),
        ("rho bound tightness", Box::new(criterion_10)),
        (
            "decreasing condition",
            Box::new(|| criterion_11(&instances)),
        ),
        ("integral counterexample", Box::new(criterion_12)),
        ("random model regimes", Box::new(criterion_13)),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.1}s)", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
