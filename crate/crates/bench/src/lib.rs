//! Shared fixtures for the criterion benchmarks.

use heatmap_tsp::{top_m_filter, Instance, PrunedHeatMap, TrainConfig};

/// A random instance with a briefly trained, pruned heat map.
pub fn fixture(n: usize, seed: u64, m: usize) -> (Instance, PrunedHeatMap) {
    let inst = Instance::random(n, seed).expect("n >= 3");
    let cfg = TrainConfig {
        steps: 50,
        ..TrainConfig::for_size(n)
    };
    let trained = heatmap_tsp::optimize_heatmap(&inst, &cfg).expect("training succeeds");
    let pruned = top_m_filter(&trained.heatmap, m.min(n - 1)).expect("valid M");
    (inst, pruned)
}
