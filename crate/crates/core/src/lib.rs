//! Soft random geometric graphs on the flat torus and the statistics of
//! distances inside their k-cliques.
//!
//! Pipeline: [`point_process`] samples a unit-intensity Poisson cloud,
//! [`graph`] connects pairs with probability `1 - exp(-dist^{-α})`,
//! [`clique`] enumerates k-cliques and counts those with long edges,
//! [`theory`] provides the limiting constants, [`stats`] the goodness-of-fit
//! tools and [`experiment`] the seeded replication runner.

// `!(x > 0.0)` style guards reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clique;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod point_process;
pub mod stats;
pub mod theory;
pub mod torus;

pub use clique::{clique_statistics, enumerate_k_cliques, Clique, CliqueStatistics};
pub use error::{Error, Result};
pub use graph::{build_graph_allpairs, build_graph_tiered, connection_prob, SpatialGraph};
pub use point_process::{sample_fixed_cloud, sample_poisson_cloud, PointCloud, Purpose, RngStream};
pub use theory::TheoryConstants;
pub use torus::{torus_distance, wrap_point, ModelParams, TorusPoint};
