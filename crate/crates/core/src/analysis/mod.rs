//! Embedding inspection and experiment reporting: nearest neighbors, drift
//! between tables, hyperparameter sweeps, and training-curve files.

pub mod curves;
pub mod drift;
pub mod similarity;
pub mod sweep;

pub use curves::{emit_curves, read_curves, CurvePoint};
pub use drift::{embedding_drift, neighbor_overlap, DriftReport, WordDrift};
pub use similarity::{cosine_similarity, nearest_neighbors, NeighborReport};
pub use sweep::{run_sweep, RunStat, SweepAxis, SweepBase, SweepFailure, SweepResult};
