use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fairmatch::analysis::{self, Notion};
use fairmatch::experiment::{self, Experiment};
use fairmatch::fairness::{self, Permutation, ShapleyMode};
use fairmatch::generators::{self, ErConfig};
use fairmatch::polytope::realize;
use fairmatch::report::{to_json, SolveReport};
use fairmatch::{
    brute, BipartiteGraph, Error, ErrorKind, GroupVector, OptOracle, Rational, Result,
};

#[derive(Parser)]
#[command(
    name = "fairmatch",
    version,
    about = "Group-fair maximum matchings in bipartite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a fair point and a matching realizing it.
    Solve(SolveArgs),
    /// Price of Fairness report.
    Pof(PofArgs),
    /// Generate an instance as a JSON graph.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Output file (default: stdout).
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Run a batch experiment and write CSV.
    Experiment(ExperimentArgs),
    /// Brute-force enumeration of realizable points (tiny graphs only).
    Oracle {
        /// Graph file, or `-` for stdin.
        graph: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Lexmax,
    Leximin,
    Shapley,
    FairOptimum,
}

#[derive(Clone, Copy, ValueEnum)]
enum NotionArg {
    Egalitarian,
    Demographic,
    Opportunity,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Args)]
struct WeightArgs {
    /// Entitlement notion.
    #[arg(long, value_enum)]
    notion: Option<NotionArg>,
    /// Custom weights, e.g. `2,1` (implies `--notion custom`).
    #[arg(long)]
    weights: Option<String>,
}

impl WeightArgs {
    fn notion(&self, default: Notion) -> Result<Notion> {
        let custom = || -> Result<Notion> {
            let w = self
                .weights
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("--notion custom needs --weights".into()))?;
            Ok(Notion::Custom(w.parse()?))
        };
        match (self.notion, &self.weights) {
            (None, None) => Ok(default),
            (None, Some(_)) | (Some(NotionArg::Custom), _) => custom(),
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "--weights only applies to --notion custom".into(),
            )),
            (Some(NotionArg::Egalitarian), None) => Ok(Notion::Egalitarian),
            (Some(NotionArg::Demographic), None) => Ok(Notion::Demographic),
            (Some(NotionArg::Opportunity), None) => Ok(Notion::Opportunity),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Graph file, or `-` for stdin.
    graph: PathBuf,
    #[arg(long, value_enum)]
    rule: Rule,
    /// Priority order for lexmax, 1-based (default: identity).
    #[arg(long)]
    sigma: Option<String>,
    /// Weights for leximin and fair-optimum (default: egalitarian).
    #[command(flatten)]
    weights: WeightArgs,
    /// Shapley computation mode.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Permutations drawn in sampled mode.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest k for exact Shapley.
    #[arg(long, default_value_t = fairness::DEFAULT_EXACT_SHAPLEY_LIMIT)]
    exact_limit: usize,
    /// Include the realizing matching in the report.
    #[arg(long)]
    emit_matching: bool,
}

#[derive(Args)]
struct PofArgs {
    /// Graph file, or `-` for stdin.
    graph: PathBuf,
    /// Weights (default: opportunity).
    #[command(flatten)]
    weights: WeightArgs,
    /// Add the opportunity bounds and the decreasing-sequence check.
    #[arg(long)]
    bounds: bool,
    /// Largest k for the decreasing-sequence check.
    #[arg(long, default_value_t = analysis::DEFAULT_DECREASING_LIMIT)]
    max_k: usize,
    /// Restrict fair points to those realized by integral matchings.
    #[arg(long)]
    integral: bool,
}

#[derive(Subcommand)]
enum Family {
    /// One independent group and k-1 groups sharing n jobs.
    Toblerone {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Half the groups share m jobs, the rest own private blocks.
    TightHalves {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// Equal-size groups with OPT = rho*k*m.
    RhoTight {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rho: Rational,
    },
    /// Two prime-sized groups with no nonzero integral fair point.
    Prime {
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
    },
    /// Complete bipartite graph.
    Complete {
        #[arg(long)]
        k: usize,
        /// Agents per group, e.g. `2,2,2`.
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        jobs: usize,
    },
    /// Random bipartite graph.
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/2")]
        beta: Rational,
        /// Group distribution.
        #[arg(long, default_value = "1/2,1/2")]
        alpha: String,
        /// `auto-dense`, `sparse`, one probability, or one per group.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of k2-always-fair, toblerone-sweep, rho-sweep, er-dense, er-sparse, integral-gap.
    name: String,
    #[arg(long)]
    k: Option<usize>,
    /// A size, or an inclusive range `a..b` for toblerone-sweep.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    beta: Option<Rational>,
    #[arg(long)]
    max_prime: Option<usize>,
    /// CSV output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_graph(path: &PathBuf) -> Result<BipartiteGraph> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Malformed(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?
    };
    BipartiteGraph::parse(&text)
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Malformed(format!("stdout: {e}"))),
    }
}

fn solve(args: &SolveArgs) -> Result<String> {
    let graph = read_graph(&args.graph)?;
    let oracle = OptOracle::new(&graph);
    let opt = oracle.opt_all();
    let report = match args.rule {
        Rule::Lexmax => {
            let sigma = match &args.sigma {
                Some(s) => Permutation::parse_one_based(s)?,
                None => Permutation::identity(graph.k()),
            };
            let sol = fairness::serial_dictatorship(&oracle, &sigma)?;
            SolveReport::from_solution(&sol, opt, &graph, args.emit_matching)?
        }
        Rule::Shapley => {
            let mode = match args.mode {
                Mode::Exact => ShapleyMode::Exact,
                Mode::Sampled => ShapleyMode::Sampled {
                    samples: args.samples,
                    seed: args.seed,
                },
            };
            let point = fairness::shapley_with_limit(&oracle, mode, args.exact_limit)?;
            let mut r = SolveReport::new("shapley", point, opt)?;
            if args.emit_matching {
                r.matching = Some(realize(&graph, &r.point)?.to_entries(&graph));
            }
            match mode {
                ShapleyMode::Exact => r.mode = Some("exact".into()),
                ShapleyMode::Sampled { samples, seed } => {
                    r.mode = Some("sampled".into());
                    r.samples = Some(samples);
                    r.seed = Some(seed);
                }
            }
            r
        }
        Rule::Leximin | Rule::FairOptimum => {
            let notion = args.weights.notion(Notion::Egalitarian)?;
            let w = notion.weights(&oracle)?;
            let sol = match args.rule {
                Rule::Leximin => fairness::leximin(&oracle, &w)?,
                _ => fairness::fair_optimum(&oracle, &w)?,
            };
            let mut r = SolveReport::from_solution(&sol, opt, &graph, args.emit_matching)?;
            r.notion = Some(notion.name().into());
            r
        }
    };
    Ok(to_json(&report))
}

fn pof(args: &PofArgs) -> Result<String> {
    let graph = read_graph(&args.graph)?;
    let oracle = OptOracle::new(&graph);
    let notion = args.weights.notion(Notion::Opportunity)?;
    let mut report = if args.integral {
        analysis::pof_integral(&oracle, &notion, analysis::DEFAULT_INTEGRAL_LIMIT)?
    } else {
        analysis::pof(&oracle, &notion)?
    };
    if args.bounds {
        analysis::attach_bounds(&mut report, &oracle, args.max_k)?;
    }
    Ok(to_json(&report))
}

fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad size {s:?}")))
        })
        .collect()
}

fn generate(family: &Family) -> Result<BipartiteGraph> {
    match family {
        Family::Toblerone { k, m, n } => generators::toblerone(*k, *m, *n),
        Family::TightHalves { k, m } => generators::tight_halves(*k, *m),
        Family::RhoTight { k, m, rho } => generators::rho_tight(*k, *m, *rho),
        Family::Prime { m1, m2 } => generators::prime_counterexample(*m1, *m2),
        Family::Complete { k, sizes, jobs } => {
            generators::complete(*k, &parse_sizes(sizes)?, *jobs)
        }
        Family::Er {
            n,
            beta,
            alpha,
            p,
            seed,
        } => {
            let alpha: GroupVector = alpha.parse()?;
            let k = alpha.len();
            let p = match p.as_str() {
                "auto-dense" => GroupVector::new(vec![generators::dense_probability(*n)?; k]),
                "sparse" => GroupVector::new(vec![generators::sparse_probability(*n)?; k]),
                list => {
                    let v: GroupVector = list.parse()?;
                    if v.len() == 1 {
                        GroupVector::new(vec![v[0]; k])
                    } else {
                        v
                    }
                }
            };
            generators::erdos_renyi(&ErConfig {
                n: *n,
                beta: *beta,
                alpha,
                p,
                seed: *seed,
            })
        }
    }
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || Error::InvalidArgument(format!("bad range {text:?}; expected `a..b` or a number"));
    match text.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let v: usize = text.trim().parse().map_err(|_| bad())?;
            Ok(v..=v)
        }
    }
}

fn experiment_of(args: &ExperimentArgs) -> Result<Experiment> {
    let half = Rational::new(1, 2)?;
    let single_m = |default: usize| -> Result<usize> {
        match &args.m {
            None => Ok(default),
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad --m {s:?}"))),
        }
    };
    Ok(match args.name.as_str() {
        "k2-always-fair" => Experiment::K2AlwaysFair {
            trials: args.trials.unwrap_or(100),
            n: args.n.unwrap_or(20),
            seed: args.seed.unwrap_or(1),
        },
        "toblerone-sweep" => Experiment::TobleroneSweep {
            k: args.k.unwrap_or(4),
            n: args.n.unwrap_or(1),
            m: parse_range(args.m.as_deref().unwrap_or("1..1000"))?,
        },
        "rho-sweep" => Experiment::RhoSweep {
            k: args.k.unwrap_or(10),
            m: single_m(40)?,
        },
        "er-dense" => Experiment::ErDense {
            n: args.n.unwrap_or(200),
            beta: args.beta.unwrap_or(half),
            k: args.k.unwrap_or(2),
            trials: args.trials.unwrap_or(50),
            seed: args.seed.unwrap_or(1),
        },
        "er-sparse" => Experiment::ErSparse {
            n: args.n.unwrap_or(400),
            beta: args.beta.unwrap_or(half),
            k: args.k.unwrap_or(2),
            trials: args.trials.unwrap_or(50),
            seed: args.seed.unwrap_or(1),
        },
        "integral-gap" => Experiment::IntegralGap {
            max_prime: args.max_prime.unwrap_or(13),
        },
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown experiment {other:?}; expected one of {}",
                Experiment::NAMES.join(", ")
            )))
        }
    })
}

#[derive(Serialize)]
struct OracleReport {
    k: usize,
    points: Vec<Vec<i64>>,
    pareto: Vec<Vec<i64>>,
    discrete_polymatroid: bool,
}

fn oracle(path: &PathBuf) -> Result<String> {
    let graph = read_graph(path)?;
    let set = brute::enumerate_points(&graph)?;
    Ok(to_json(&OracleReport {
        k: set.k,
        discrete_polymatroid: brute::check_discrete_polymatroid(&set.points),
        points: set.points.into_iter().collect(),
        pareto: set.pareto.into_iter().collect(),
    }))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => write_out(None, &solve(&args)?),
        Command::Pof(args) => write_out(None, &pof(&args)?),
        Command::Gen { family, output } => {
            let mut text = generate(&family)?.to_json();
            text.push('\n');
            write_out(output.as_ref(), &text)
        }
        Command::Experiment(args) => {
            let rows = experiment::run(&experiment_of(&args)?)?;
            let mut buf = Vec::new();
            experiment::write_csv(&rows, &mut buf)?;
            write_out(
                args.out.as_ref(),
                &String::from_utf8(buf).expect("csv is utf-8"),
            )?;
            eprintln!("{} rows", rows.len());
            Ok(())
        }
        Command::Oracle { graph } => write_out(None, &oracle(&graph)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => 1,
                ErrorKind::Infeasible => 2,
                ErrorKind::Guard | ErrorKind::Overflow => 3,
            })
        }
    }
}
