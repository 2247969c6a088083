//! Heat-map guided local search for the two-dimensional Euclidean TSP.
//!
//! The pipeline has two halves. A heat map of directed-edge scores is
//! produced by minimizing a differentiable surrogate loss over a
//! column-stochastic soft indicator matrix ([`train`], [`heatmap`]). The
//! heat map is pruned to the top `M` entries per city ([`candidates`]) and
//! then steers a best-first k-opt local search with restarts ([`search`]).
//! [`oracle`] and [`baseline`] provide the exact and heuristic references
//! used to judge the result, and [`pipeline`] ties everything together.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod candidates;
pub mod error;
pub mod heatmap;
pub mod instance;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod search;
pub mod svg;
pub mod tour;
pub mod train;

pub use candidates::{
    edge_set, overlap_coefficient, top_m_filter, CandidateLists, CandidateMode, EdgeSet,
    PrunedHeatMap,
};
pub use error::{Error, Result};
pub use heatmap::{
    column_softmax, indicator_to_heatmap, loss_gradient, permutation_to_cycle, surrogate_loss,
    surrogate_loss_compact, verify_hamiltonian_heatmap, HeatMap, LossBreakdown, LossWeights,
    Logits, SoftIndicator,
};
pub use instance::{AdjacencyWeights, DistanceMatrix, Instance};
pub use oracle::held_karp_exact;
pub use pipeline::{solve_pipeline, BenchResult};
pub use search::{run_search, Budget, Preset, SearchParams, SearchStats};
pub use tour::{tour_length, Tour};
pub use train::{optimize_heatmap, TrainConfig};
