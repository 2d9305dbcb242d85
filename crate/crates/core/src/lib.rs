//! Core of a benchmark toolkit for graph-embedding link prediction.
//!
//! * [`graph`]: undirected weighted graphs, edge-list I/O, statistics
//! * [`generators`]: ten seeded synthetic graph models, random-walk sampling
//!   and synthetic corpus plans
//! * [`split`]: held-out edge splits
//! * [`heuristics`]: preferential attachment, common neighbors, Adamic-Adar,
//!   Jaccard and a random predictor
//! * [`numerics`]: dense eigen/SVD kernels, power iteration, gradient checks
//! * [`embeddings`]: Laplacian Eigenmaps, Graph Factorization, HOPE, SDNE
//! * [`ranking`]: candidate-pair ranking shared by all predictors
//! * [`evaluation`]: P@k, MAP, random baselines and GFS aggregation

pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod generators;
pub mod graph;
pub mod heuristics;
pub mod numerics;
pub mod ranking;
pub mod split;

pub use error::{Error, Result};
pub use graph::{DomainLabel, Graph, GraphStats, Pair};
