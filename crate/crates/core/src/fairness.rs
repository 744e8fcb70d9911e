//! Solution concepts over the group polytope.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::OptOracle;
use crate::graph::{BipartiteGraph, FractionalMatching, GroupSet, GroupVector};
use crate::polytope::{advance, realize};
use crate::rational::Rational;

/// Largest `k` for which exact Shapley values are computed by default.
pub const DEFAULT_EXACT_SHAPLEY_LIMIT: usize = 10;

/// A priority order over groups: `order()[0]` goes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// `image` lists 0-based group indices in priority order.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let k = image.len();
        let mut seen = vec![false; k];
        for &g in &image {
            if g >= k || std::mem::replace(&mut seen[g], true) {
                return Err(Error::InvalidArgument(format!(
                    "not a permutation of 1..={k}: {:?}",
                    image.iter().map(|g| g + 1).collect::<Vec<_>>()
                )));
            }
        }
        Ok(Permutation(image))
    }

    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    /// Parses a 1-based comma list such as `2,1`.
    pub fn parse_one_based(text: &str) -> Result<Self> {
        let image = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&g| g >= 1)
                    .map(|g| g - 1)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad group index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(image)
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|g| g + 1).collect()
    }

    /// The groups in the first `len` positions.
    pub fn prefix(&self, len: usize) -> GroupSet {
        self.0[..len].iter().copied().collect()
    }

    /// All `k!` permutations in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..k).collect();
        let mut out = vec![Permutation(current.clone())];
        while next_permutation(&mut current) {
            out.push(Permutation(current.clone()));
        }
        out
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

/// A point of `co(M)` together with a matching realizing it.
#[derive(Clone, Debug)]
pub struct FairSolution {
    pub rule: &'static str,
    pub point: GroupVector,
    pub matching: FractionalMatching,
    pub sigma: Option<Permutation>,
    pub weights: Option<GroupVector>,
    pub c_star: Option<Rational>,
    /// Maximal tight set at the point, when the rule computes one.
    pub tight_set: Option<GroupSet>,
}

impl FairSolution {
    fn new(rule: &'static str, graph: &BipartiteGraph, point: GroupVector) -> Result<Self> {
        let matching = realize(graph, &point)?;
        Ok(FairSolution {
            rule,
            point,
            matching,
            sigma: None,
            weights: None,
            c_star: None,
            tight_set: None,
        })
    }
}

/// The lexicographic maximum `Ψσ`: each group in turn takes its marginal
/// contribution `OPT(σ[..=i]) - OPT(σ[..i])`.
pub fn lexmax_point(oracle: &OptOracle<'_>, sigma: &Permutation) -> Result<GroupVector> {
    check_sigma(oracle, sigma)?;
    let k = oracle.k();
    let mut point = GroupVector::zeros(k);
    let mut prev = 0;
    for pos in 0..k {
        let cur = oracle.opt(sigma.prefix(pos + 1))?;
        point.set(sigma.order()[pos], Rational::from(cur - prev));
        prev = cur;
    }
    Ok(point)
}

fn check_sigma(oracle: &OptOracle<'_>, sigma: &Permutation) -> Result<()> {
    if sigma.len() != oracle.k() {
        return Err(Error::DimensionMismatch {
            expected: oracle.k(),
            got: sigma.len(),
        });
    }
    Ok(())
}

/// Serial dictatorship under priority order `sigma`, with an integral
/// witness matching.
pub fn serial_dictatorship(oracle: &OptOracle<'_>, sigma: &Permutation) -> Result<FairSolution> {
    let point = lexmax_point(oracle, sigma)?;
    let mut sol = FairSolution::new("lexmax", oracle.graph(), point)?;
    sol.sigma = Some(sigma.clone());
    Ok(sol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapleyMode {
    Exact,
    /// Average of `samples` uniformly random orders drawn from ChaCha8
    /// seeded with `seed`.
    Sampled {
        samples: u64,
        seed: u64,
    },
}

/// Shapley values of the game `v(Λ) = OPT(Λ)`.
pub fn shapley(oracle: &OptOracle<'_>, mode: ShapleyMode) -> Result<GroupVector> {
    shapley_with_limit(oracle, mode, DEFAULT_EXACT_SHAPLEY_LIMIT)
}

/// As [`shapley`], with an explicit cap on `k` for exact mode.
///
/// Exact mode uses the subset form
/// `φ_i = Σ_{Λ ∌ i} |Λ|! (k-|Λ|-1)! / k! · (OPT(Λ ∪ {i}) - OPT(Λ))`,
/// which needs the `2^k` memoized values instead of `k!` orders.
pub fn shapley_with_limit(
    oracle: &OptOracle<'_>,
    mode: ShapleyMode,
    exact_limit: usize,
) -> Result<GroupVector> {
    let k = oracle.k();
    match mode {
        ShapleyMode::Exact => {
            if k > exact_limit || k > 30 {
                return Err(Error::GuardExceeded(format!(
                    "exact Shapley with k = {k} exceeds the limit {exact_limit}; use sampled mode"
                )));
            }
            let fact: Vec<i128> = (0..=k as i128)
                .scan(1i128, |acc, n| {
                    if n > 0 {
                        *acc *= n;
                    }
                    Some(*acc)
                })
                .collect();
            // Fill the memo in parallel first; the per-group sums only read it.
            (0..1u64 << k)
                .into_par_iter()
                .try_for_each(|bits| oracle.opt(GroupSet::from_bits(bits)).map(|_| ()))?;
            let values = (0..k)
                .into_par_iter()
                .map(|i| {
                    let mut total: i128 = 0;
                    for bits in 0..1u64 << k {
                        let set = GroupSet::from_bits(bits);
                        if set.contains(i) {
                            continue;
                        }
                        let gain = (oracle.opt(set.with(i))? - oracle.opt(set)?) as i128;
                        let weight = fact[set.len()] * fact[k - set.len() - 1];
                        total = weight
                            .checked_mul(gain)
                            .and_then(|t| total.checked_add(t))
                            .ok_or(Error::Overflow)?;
                    }
                    Rational::new(total, fact[k])
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GroupVector::new(values))
        }
        ShapleyMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidArgument(
                    "sampled Shapley needs at least one sample".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut totals = vec![0i128; k];
            let mut order: Vec<usize> = (0..k).collect();
            for _ in 0..samples {
                order.shuffle(&mut rng);
                let mut prev = 0;
                let mut set = GroupSet::EMPTY;
                for &g in &order {
                    set = set.with(g);
                    let cur = oracle.opt(set)?;
                    totals[g] += (cur - prev) as i128;
                    prev = cur;
                }
            }
            totals
                .into_iter()
                .map(|t| Rational::new(t, samples as i128))
                .collect::<Result<Vec<_>>>()
                .map(GroupVector::new)
        }
    }
}

fn check_weights(graph: &BipartiteGraph, w: &GroupVector) -> Result<()> {
    if w.len() != graph.k() {
        return Err(Error::DimensionMismatch {
            expected: graph.k(),
            got: w.len(),
        });
    }
    if !w.is_nonnegative() {
        return Err(Error::InvalidArgument(format!("negative weight in {w:?}")));
    }
    Ok(())
}

/// Weighted leximin by waterfilling: all unfrozen groups rise at rates `w`
/// until some constraint saturates, the groups it blocks freeze together,
/// and the rest continue. Groups with zero weight stay at zero.
pub fn leximin(oracle: &OptOracle<'_>, w: &GroupVector) -> Result<FairSolution> {
    let graph = oracle.graph();
    check_weights(graph, w)?;
    if graph.num_agents() == 0 {
        return Err(Error::Infeasible("all groups are empty".into()));
    }
    let mut active = w.support();
    if active.is_empty() {
        return Err(Error::InvalidArgument("weight vector is zero".into()));
    }
    let mut x = GroupVector::zeros(graph.k());
    while !active.is_empty() {
        let step = advance(oracle, &x, w, active)?;
        let newly = step.tight_groups.intersection(active);
        if newly.is_empty() {
            return Err(Error::Infeasible("waterfilling step froze no group".into()));
        }
        x = step.point;
        active = active.difference(newly);
    }
    let mut sol = FairSolution::new("leximin", graph, x)?;
    sol.weights = Some(w.clone());
    Ok(sol)
}

/// The largest point proportional to `w` inside `co(M)`: `c*·w` with
/// `c* = min_{w(Λ) > 0} OPT(Λ) / w(Λ)`.
pub fn fair_optimum(oracle: &OptOracle<'_>, w: &GroupVector) -> Result<FairSolution> {
    let graph = oracle.graph();
    check_weights(graph, w)?;
    let support = w.support();
    if support.is_empty() {
        return Err(Error::InvalidArgument("weight vector is zero".into()));
    }
    let step = advance(oracle, &GroupVector::zeros(graph.k()), w, support)?;
    let mut sol = FairSolution::new("fair-optimum", graph, step.point)?;
    sol.weights = Some(w.clone());
    sol.c_star = Some(step.t_star);
    sol.tight_set = Some(step.tight_set);
    Ok(sol)
}

/// The leximin and fair-optimum points for positive weights, with the
/// quantities that certify they are mutual projections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionPair {
    pub leximin: GroupVector,
    pub fair_optimum: GroupVector,
    /// `t*` with `fair_optimum = t*·w`.
    pub t_star: Rational,
    /// Common value of the rescaled leximin coordinates' mean:
    /// `h = (Σ x_i / w_i) / k`.
    pub center: Rational,
    /// `⟨x/w - h·1, h·1 - t*·1⟩`, which must vanish.
    pub orthogonality: Rational,
    /// Whether `‖x‖₁ = OPT([k])`.
    pub leximin_is_maximum: bool,
}

impl ProjectionPair {
    /// All certificate conditions hold.
    pub fn holds(&self, w: &GroupVector) -> bool {
        self.orthogonality.is_zero()
            && self.leximin_is_maximum
            && self.t_star <= self.center
            && w.scale(&self.t_star)
                .map(|p| p == self.fair_optimum)
                .unwrap_or(false)
    }
}

pub fn projection_pair(oracle: &OptOracle<'_>, w: &GroupVector) -> Result<ProjectionPair> {
    let graph = oracle.graph();
    check_weights(graph, w)?;
    if w.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument(
            "projection needs strictly positive weights".into(),
        ));
    }
    let lex = leximin(oracle, w)?.point;
    let fair = fair_optimum(oracle, w)?;
    let t_star = fair.c_star.expect("fair optimum sets c*");
    let k = Rational::from(graph.k());
    let scaled: Vec<Rational> = lex
        .iter()
        .zip(w.iter())
        .map(|(x, wi)| x.div(wi))
        .collect::<Result<_>>()?;
    let center = Rational::sum(&scaled)?.div(&k)?;
    let gap = center.sub(&t_star)?;
    let mut orthogonality = Rational::ZERO;
    for s in &scaled {
        orthogonality = orthogonality.add(&s.sub(&center)?.mul(&gap)?)?;
    }
    let leximin_is_maximum = lex.l1()? == Rational::from(oracle.opt_all());
    Ok(ProjectionPair {
        leximin: lex,
        fair_optimum: fair.point,
        t_star,
        center,
        orthogonality,
        leximin_is_maximum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::g_a;

    fn v(s: &str) -> GroupVector {
        s.parse().unwrap()
    }

    fn disjoint() -> BipartiteGraph {
        // Group sizes 2, 1, 3 each with private jobs.
        let jobs = (0..6).map(|i| format!("u{i}")).collect();
        let agents = (0..6).map(|i| format!("a{i}")).collect();
        BipartiteGraph::new(
            3,
            jobs,
            agents,
            vec![0, 0, 1, 2, 2, 2],
            (0..6).map(|i| (i, i)).collect(),
        )
        .unwrap()
    }

    fn shared_single_job() -> BipartiteGraph {
        BipartiteGraph::new(
            2,
            vec!["u".into()],
            vec!["a".into(), "b".into()],
            vec![0, 1],
            vec![(0, 0), (0, 1)],
        )
        .unwrap()
    }

    #[test]
    fn permutations() {
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(1).len(), 1);
        assert_eq!(
            Permutation::parse_one_based("2,1").unwrap().order(),
            &[1, 0]
        );
        assert!(Permutation::parse_one_based("1,1").is_err());
        assert!(Permutation::parse_one_based("0,1").is_err());
        assert!(Permutation::parse_one_based("1,3").is_err());
    }

    #[test]
    fn serial_dictatorship_examples() {
        let g = g_a();
        let o = OptOracle::new(&g);
        let s = serial_dictatorship(&o, &Permutation::identity(2)).unwrap();
        assert_eq!(s.point, v("2,0"));
        assert!(s.matching.is_integral());
        assert_eq!(g.group_point_of(&s.matching).unwrap(), s.point);
        let s = serial_dictatorship(&o, &Permutation::parse_one_based("2,1").unwrap()).unwrap();
        assert_eq!(s.point, v("1,1"));
        assert!(serial_dictatorship(&o, &Permutation::identity(3)).is_err());

        let g1 = BipartiteGraph::new(
            1,
            vec!["u".into(), "w".into()],
            vec!["a".into()],
            vec![0],
            vec![(0, 0), (1, 0)],
        )
        .unwrap();
        let o1 = OptOracle::new(&g1);
        assert_eq!(
            lexmax_point(&o1, &Permutation::identity(1)).unwrap(),
            v("1")
        );
    }

    #[test]
    fn shapley_examples() {
        let g = g_a();
        let o = OptOracle::new(&g);
        assert_eq!(shapley(&o, ShapleyMode::Exact).unwrap(), v("3/2,1/2"));
        let g = shared_single_job();
        assert_eq!(
            shapley(&OptOracle::new(&g), ShapleyMode::Exact).unwrap(),
            v("1/2,1/2")
        );
        let g = disjoint();
        assert_eq!(
            shapley(&OptOracle::new(&g), ShapleyMode::Exact).unwrap(),
            v("2,1,3")
        );
    }

    #[test]
    fn shapley_sampled_is_reproducible() {
        let g = g_a();
        let o = OptOracle::new(&g);
        let mode = ShapleyMode::Sampled {
            samples: 400,
            seed: 9,
        };
        let a = shapley(&o, mode).unwrap();
        let b = shapley(&o, mode).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.l1().unwrap(), Rational::from(2i64));
        // Each sample is (2,0) or (1,1): group 2 gets an integer count / 400.
        assert!(a[1] > Rational::new(2, 5).unwrap() && a[1] < Rational::new(3, 5).unwrap());
        assert!(shapley(
            &o,
            ShapleyMode::Sampled {
                samples: 0,
                seed: 1
            }
        )
        .is_err());
    }

    #[test]
    fn shapley_guard() {
        let g = g_a();
        let o = OptOracle::new(&g);
        assert!(matches!(
            shapley_with_limit(&o, ShapleyMode::Exact, 1),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn leximin_examples() {
        let g = g_a();
        let o = OptOracle::new(&g);
        let s = leximin(&o, &v("1,1")).unwrap();
        assert_eq!(s.point, v("1,1"));
        let s = leximin(&o, &v("2,1")).unwrap();
        assert_eq!(s.point, v("4/3,2/3"));
        assert_eq!(g.group_point_of(&s.matching).unwrap(), s.point);

        let g = disjoint();
        let s = leximin(&OptOracle::new(&g), &GroupVector::ones(3)).unwrap();
        assert_eq!(s.point, v("2,1,3"));
    }

    #[test]
    fn leximin_zero_weight_and_errors() {
        let g = g_a();
        let o = OptOracle::new(&g);
        assert_eq!(leximin(&o, &v("1,0")).unwrap().point, v("2,0"));
        assert!(leximin(&o, &v("0,0")).is_err());
        assert!(leximin(&o, &v("1,-1")).is_err());
        let empty = BipartiteGraph::new(2, vec!["u".into()], vec![], vec![], vec![]).unwrap();
        assert!(leximin(&OptOracle::new(&empty), &v("1,1")).is_err());
    }

    #[test]
    fn fair_optimum_examples() {
        let g = g_a();
        let o = OptOracle::new(&g);
        let s = fair_optimum(&o, &v("2,1")).unwrap();
        assert_eq!(s.c_star, Some("2/3".parse().unwrap()));
        assert_eq!(s.point, v("4/3,2/3"));
        assert_eq!(s.point.l1().unwrap(), Rational::from(2i64));
        assert_eq!(s.tight_set, Some(GroupSet::full(2)));

        let g = disjoint();
        let s = fair_optimum(&OptOracle::new(&g), &v("2,1,3")).unwrap();
        assert_eq!(s.c_star, Some(Rational::ONE));
        assert_eq!(s.point, v("2,1,3"));
        assert!(fair_optimum(&o, &v("0,0")).is_err());
    }

    #[test]
    fn projection_examples() {
        let g = g_a();
        let o = OptOracle::new(&g);
        let p = projection_pair(&o, &v("1,1")).unwrap();
        assert_eq!(p.leximin, v("1,1"));
        assert_eq!(p.fair_optimum, v("1,1"));
        assert!(p.holds(&v("1,1")));

        let g = disjoint();
        let w = v("2,1,3");
        let p = projection_pair(&OptOracle::new(&g), &w).unwrap();
        assert_eq!(p.leximin, w);
        assert_eq!(p.fair_optimum, w);
        assert!(p.holds(&w));
        assert!(projection_pair(&o, &v("1,0")).is_err());
    }

    #[test]
    fn toblerone_pair() {
        let g = crate::generators::toblerone(3, 98, 1).unwrap();
        let o = OptOracle::new(&g);
        let w = v("98,1,1");
        let fair = fair_optimum(&o, &w).unwrap();
        assert_eq!(fair.c_star, Some("1/2".parse().unwrap()));
        assert_eq!(fair.point.l1().unwrap(), Rational::from(50i64));
        assert_eq!(fair.tight_set, Some(GroupSet::from_bits(0b110)));
        let p = projection_pair(&o, &w).unwrap();
        assert_eq!(p.leximin, v("98,1/2,1/2"));
        assert_eq!(p.fair_optimum, v("49,1/2,1/2"));
        assert!(p.holds(&w));
    }
}
