//! Shared fixtures for the benchmark targets.

use curvkit::measures::gen_lipschitz_graph;
use curvkit::{DiscreteMeasure, Triple};

/// Deterministic rough-graph measure sized for benchmark loops.
pub fn graph_measure(count: usize) -> DiscreteMeasure {
    gen_lipschitz_graph(count, 0.3, 1234).expect("valid generator inputs")
}

/// A tall isoceles witness triangle away from any degenerate edge case.
pub fn witness_triple() -> Triple {
    Triple::from_coords([0.0, 0.0, -0.7, 1.0, 0.7, 1.0]).expect("distinct points")
}
