//! Group-fair maximum bipartite matchings.
//!
//! Agents are partitioned into `k` groups. The set of per-group matched
//! counts reachable by fractional matchings is a polymatroid `co(M)` whose
//! rank function is `OPT(Λ)`, the largest number of agents from the groups
//! in `Λ` that can be matched together. This crate computes that geometry
//! exactly (integer max-flow plus 128-bit rationals) and builds the usual
//! solution concepts on top of it: lexicographic maxima, Shapley matchings,
//! weighted leximin, the best weight-proportional point and the Price of
//! Fairness.
//!
//! ```
//! use fairmatch::{BipartiteGraph, OptOracle, fairness};
//!
//! let g = BipartiteGraph::parse(r#"{"k": 2, "jobs": ["u1","u2"],
//!     "agents": [{"id":"a1","group":1},{"id":"a2","group":1},{"id":"b1","group":2}],
//!     "edges": [["u1","a1"],["u2","a2"],["u2","b1"]]}"#).unwrap();
//! let oracle = OptOracle::new(&g);
//! let phi = fairness::shapley(&oracle, fairness::ShapleyMode::Exact).unwrap();
//! assert_eq!(phi.to_string(), "3/2,1/2");
//! ```

pub mod analysis;
pub mod brute;
pub mod error;
pub mod experiment;
pub mod fairness;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod polytope;
pub mod rational;
pub mod report;

pub use error::{Error, ErrorKind, Result};
pub use flow::{FlowNetwork, MatchingNetwork, MaxFlow, MinCut, OptOracle};
pub use graph::{BipartiteGraph, FractionalMatching, GroupSet, GroupVector};
pub use rational::Rational;
