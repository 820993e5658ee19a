//! Multiscale-rings clustering: galaxies of solar systems, safe-set merging,
//! and clustering quality metrics.

mod evaluate;
mod galaxy;
mod merge;
mod mrp;

pub use evaluate::{evaluate_clustering, mean_conductance, ClusterMetrics};
pub use galaxy::{build_galaxy, select_centers, Galaxy};
pub use merge::{merge_safe_sets, MergeOutcome, MergeRule};
pub use mrp::{
    cluster_mrp, complete_by_harmonic_measure, ClusterKind, ClusterOrigin, Clustering,
    MrpDiagnostics, MrpParams, MrpRun, GIANT_RING_SPAN,
};
