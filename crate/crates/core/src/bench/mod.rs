//! Benchmark circuits, fault injection, evaluation metrics and campaigns.

mod campaign;
mod fault;
mod generators;
mod metrics;

pub use campaign::{
    avgfds_csv, avgfds_rows, classification, classification_csv, load_results, run_campaign, similarity_csv,
    similarity_rows, write_outputs, AvgFdsRow, CampaignConfig, CampaignResult, CellFailure, FaultRecord, Grid,
    RunRecord, SimilarityRow, TermRecord, MANIFEST_FILE, RUNS_FILE,
};
pub use fault::{
    draw_faults, inject_fault, make_equivalent, max_string_shift, remove_fault, FaultSpec, FAULT_ANGLE_RANGE,
    FAULT_ATTEMPTS, MIN_FAULT_SHIFT,
};
pub use generators::{generate, random_circuit, GENERATORS};
pub use metrics::{avg_fds, avg_sim, classify, cliffs_delta, fds, jaccard, threshold_grid, ClassRow, Magnitude};
