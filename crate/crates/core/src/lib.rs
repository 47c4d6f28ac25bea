//! Exact and Monte Carlo analysis of monochromatic edge and triangle counts
//! under uniformly random vertex colorings.
//!
//! * [`graph`]: graphs, edge-list I/O and the graph families.
//! * [`census`]: triangles, pyramid counts, 4-cycles and the `b`/`s` statistics.
//! * [`moments`]: closed-form moments, CLT error brackets and limit laws.
//! * [`fourthmoment`]: the configuration-class decomposition of `E Z3^4 - 3`.
//! * [`sim`]: sampling, exhaustive enumeration and Kolmogorov distances.
//! * [`verify`]: the self-check suite behind `monocount verify`.

pub mod census;
pub mod error;
pub mod fourthmoment;
pub mod graph;
pub mod moments;
pub mod poly;
pub mod report;
pub mod sim;
pub mod verify;

pub use census::{PyramidCounts, TriangleCensus};
pub use error::{Error, Result};
pub use fourthmoment::{ConfigClass, ConfigKey, Decomposition, TriangleMultiset};
pub use graph::{FamilySpec, Graph, Vertex};
pub use moments::{MomentReport, Statistic};
pub use poly::RationalPoly;
pub use sim::{SimConfig, SimReport, StatisticChoice};
