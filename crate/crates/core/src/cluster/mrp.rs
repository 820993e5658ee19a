use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::evaluate::mean_conductance;
use crate::cluster::galaxy::{build_galaxy, Galaxy};
use crate::cluster::merge::{merge_safe_sets, MergeRule};
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};
use crate::linalg::SparseSpd;
use crate::rng;
use crate::solar::{
    find_safe_sets_with, SafeSetParams, SolarSystem, DEFAULT_FRACTION, DEFAULT_MAX_TRIES,
};

/// Merged sets spanning at least this many rings are tagged giant.
pub const GIANT_RING_SPAN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MrpParams {
    /// Number of solar centers.
    pub n_c: usize,
    /// Ring width is `2^scale` hops.
    pub scale: u32,
    /// Angular blocks per ring.
    pub n_b: usize,
    pub fraction: f64,
    pub ra_threshold: f64,
    pub phi_threshold: f64,
    pub repeats: usize,
    pub seed: u64,
    pub merge_rule: MergeRule,
    /// Assign every vertex left outside the merged safe sets to the cluster
    /// its walk most likely reaches first.
    pub complete: bool,
    pub max_tries: usize,
}

impl Default for MrpParams {
    fn default() -> Self {
        MrpParams {
            n_c: 4,
            scale: 2,
            n_b: 8,
            fraction: DEFAULT_FRACTION,
            ra_threshold: 1.0,
            phi_threshold: 0.1,
            repeats: 3,
            seed: 0,
            merge_rule: MergeRule::default(),
            complete: true,
            max_tries: DEFAULT_MAX_TRIES,
        }
    }
}

impl MrpParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_c == 0 {
            return bad("n_c must be at least 1".into());
        }
        if self.n_b == 0 {
            return bad("n_b must be at least 1".into());
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.scale >= 32 {
            return bad(format!("scale {} too large", self.scale));
        }
        if !(self.ra_threshold > 0.0) {
            return bad(format!(
                "ra_threshold {} must be positive",
                self.ra_threshold
            ));
        }
        if !(self.phi_threshold > 0.0) {
            return bad(format!(
                "phi_threshold {} must be positive",
                self.phi_threshold
            ));
        }
        self.safe_set_params().validate()
    }

    fn safe_set_params(&self) -> SafeSetParams {
        SafeSetParams {
            fraction: self.fraction,
            ra_threshold: self.ra_threshold,
            max_tries: self.max_tries,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterKind {
    SafeMerge,
    /// A merged constellation spanning at least [`GIANT_RING_SPAN`] rings.
    Giant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterOrigin {
    /// Center of the solar system the cluster came from.
    pub center: usize,
    pub kind: ClusterKind,
    /// Distinct rings touched by the merged safe sets.
    pub rings: usize,
    /// Safe sets merged into the cluster.
    pub safe_sets: usize,
}

/// Disjoint clusters plus the vertices left out of all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub clusters: Vec<VertexSet>,
    pub origins: Vec<ClusterOrigin>,
    pub unassigned: VertexSet,
}

impl Clustering {
    /// Cluster index per vertex; unassigned vertices get their own labels
    /// after the cluster labels.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut labels = vec![usize::MAX; n];
        for (i, c) in self.clusters.iter().enumerate() {
            for v in c.iter() {
                labels[v] = i;
            }
        }
        let unlabeled = labels.iter_mut().filter(|l| **l == usize::MAX);
        for (l, next) in unlabeled.zip(self.clusters.len()..) {
            *l = next;
        }
        labels
    }

    /// Clusters pairwise disjoint and, with the unassigned set, covering `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for v in self
            .clusters
            .iter()
            .chain(std::iter::once(&self.unassigned))
            .flat_map(|s| s.iter())
        {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MrpDiagnostics {
    pub systems: usize,
    pub skipped_centers: Vec<usize>,
    /// Vertices not covered by any solar system.
    pub uncovered: usize,
    pub candidates: usize,
    pub safe: usize,
    pub shrunk: usize,
    pub block_errors: Vec<String>,
    pub merges: usize,
    /// Vertices placed by harmonic completion.
    pub completed: usize,
    /// Extra clusters created by splitting disconnected ones.
    pub splits: usize,
    /// Mean cluster conductance of every repeat; `None` when no cluster has one.
    pub repeat_scores: Vec<Option<f64>>,
    pub chosen_repeat: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MrpRun {
    pub clustering: Clustering,
    pub diagnostics: MrpDiagnostics,
}

/// Assign every vertex outside `clusters` to the cluster its walk most likely
/// hits first (ties to the lower cluster index). Vertices with no path to a
/// cluster stay out. Returns the grown clusters and the leftover vertices.
pub fn complete_by_harmonic_measure(
    g: &WeightedGraph,
    clusters: &[VertexSet],
) -> Result<(Vec<VertexSet>, VertexSet)> {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    for (k, c) in clusters.iter().enumerate() {
        g.check_set(c)?;
        for v in c.iter() {
            if label[v] != usize::MAX {
                return Err(Error::OverlappingSets);
            }
            label[v] = k;
        }
    }
    let reach = g.distances_from_set(clusters.iter().flat_map(|c| c.iter()));
    let free: VertexSet = (0..n)
        .filter(|&v| label[v] == usize::MAX && reach[v] != UNREACHABLE)
        .collect();
    let leftover: VertexSet = (0..n)
        .filter(|&v| label[v] == usize::MAX && reach[v] == UNREACHABLE)
        .collect();
    if free.is_empty() {
        return Ok((clusters.to_vec(), leftover));
    }

    let mut system = SparseSpd {
        diag: Vec::with_capacity(free.len()),
        off: Vec::with_capacity(free.len()),
    };
    let mut rhs = vec![vec![0.0; free.len()]; clusters.len()];
    for (i, u) in free.iter().enumerate() {
        let mut row = Vec::new();
        for &(v, w) in g.neighbors(u) {
            if let Some(j) = free.index_of(v) {
                row.push((j, -w));
            } else if label[v] != usize::MAX {
                rhs[label[v]][i] += w;
            }
        }
        system.diag.push(g.omega(u));
        system.off.push(row);
    }
    let measures = system.solve_many(&rhs)?;
    let mut grown: Vec<Vec<usize>> = clusters.iter().map(|c| c.as_slice().to_vec()).collect();
    for (i, u) in free.iter().enumerate() {
        let mut best = 0;
        for k in 1..clusters.len() {
            if measures[k][i] > measures[best][i] {
                best = k;
            }
        }
        grown[best].push(u);
    }
    Ok((grown.into_iter().map(VertexSet::new).collect(), leftover))
}

/// Split every cluster into the components of its induced subgraph; pieces
/// keep the origin of the cluster they came from.
fn split_disconnected(
    g: &WeightedGraph,
    clusters: Vec<VertexSet>,
    origins: Vec<ClusterOrigin>,
) -> (Vec<VertexSet>, Vec<ClusterOrigin>, usize) {
    let mut out = Vec::with_capacity(clusters.len());
    let mut out_origins = Vec::with_capacity(clusters.len());
    let mut splits = 0;
    for (c, o) in clusters.into_iter().zip(origins) {
        let parts = g.induced_components(&c);
        splits += parts.len().saturating_sub(1);
        for p in parts {
            out.push(p);
            out_origins.push(o);
        }
    }
    (out, out_origins, splits)
}

struct SystemResult {
    clusters: Vec<VertexSet>,
    origins: Vec<ClusterOrigin>,
    candidates: usize,
    safe: usize,
    shrunk: usize,
    errors: Vec<String>,
    merges: usize,
}

fn process_system(
    g: &WeightedGraph,
    ss: &SolarSystem,
    params: &MrpParams,
    seed: u64,
) -> Result<SystemResult> {
    let candidates = find_safe_sets_with(g, ss, &params.safe_set_params(), seed)?;
    let errors = candidates
        .iter()
        .filter_map(|c| {
            c.error.as_ref().map(|e| {
                format!(
                    "center {} ring {} block {}: {e}",
                    ss.center, c.ring, c.block
                )
            })
        })
        .collect();
    let safe: Vec<VertexSet> = candidates
        .iter()
        .filter(|c| c.safe && c.error.is_none() && !c.vertices.is_empty())
        .map(|c| c.vertices.clone())
        .collect();
    let merged = merge_safe_sets(g, &safe, params.phi_threshold, params.merge_rule)?;
    let origins = merged
        .sets
        .iter()
        .zip(&merged.members)
        .map(|(set, members)| {
            let mut rings: Vec<usize> = set.iter().filter_map(|v| ss.ring_of(v)).collect();
            rings.sort_unstable();
            rings.dedup();
            ClusterOrigin {
                center: ss.center,
                kind: if rings.len() >= GIANT_RING_SPAN {
                    ClusterKind::Giant
                } else {
                    ClusterKind::SafeMerge
                },
                rings: rings.len(),
                safe_sets: members.len(),
            }
        })
        .collect();
    Ok(SystemResult {
        clusters: merged.sets,
        origins,
        candidates: candidates.len(),
        safe: safe.len(),
        shrunk: candidates.iter().filter(|c| c.shrunk).count(),
        errors,
        merges: merged.merges,
    })
}

fn run_repeat(
    g: &WeightedGraph,
    galaxy: &Galaxy,
    params: &MrpParams,
    repeat: usize,
) -> Result<MrpRun> {
    let results: Vec<SystemResult> = galaxy
        .systems
        .par_iter()
        .enumerate()
        .map(|(i, ss)| {
            process_system(
                g,
                ss,
                params,
                rng::derive_seed(params.seed, &[repeat as u64, i as u64]),
            )
        })
        .collect::<Result<_>>()?;

    let mut diagnostics = MrpDiagnostics {
        systems: galaxy.systems.len(),
        skipped_centers: galaxy.skipped_centers.clone(),
        uncovered: g.n()
            - galaxy
                .systems
                .iter()
                .map(|ss| ss.vertices().len())
                .sum::<usize>(),
        ..Default::default()
    };
    let mut clusters = Vec::new();
    let mut origins = Vec::new();
    for r in results {
        diagnostics.candidates += r.candidates;
        diagnostics.safe += r.safe;
        diagnostics.shrunk += r.shrunk;
        diagnostics.merges += r.merges;
        diagnostics.block_errors.extend(r.errors);
        clusters.extend(r.clusters);
        origins.extend(r.origins);
    }

    let (mut clusters, mut origins, splits) = split_disconnected(g, clusters, origins);
    diagnostics.splits = splits;
    let assigned: usize = clusters.iter().map(VertexSet::len).sum();
    let unassigned = if params.complete && !clusters.is_empty() {
        let (grown, leftover) = complete_by_harmonic_measure(g, &clusters)?;
        diagnostics.completed = grown.iter().map(VertexSet::len).sum::<usize>() - assigned;
        let (c, o, more) = split_disconnected(g, grown, origins);
        clusters = c;
        origins = o;
        diagnostics.splits += more;
        leftover
    } else {
        let mut taken = vec![false; g.n()];
        clusters
            .iter()
            .flat_map(|c| c.iter())
            .for_each(|v| taken[v] = true);
        (0..g.n()).filter(|&v| !taken[v]).collect()
    };
    // Order clusters by smallest member so the output does not depend on system order.
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by_key(|&i| clusters[i].as_slice().first().copied());
    let clustering = Clustering {
        clusters: order.iter().map(|&i| clusters[i].clone()).collect(),
        origins: order.iter().map(|&i| origins[i]).collect(),
        unassigned,
    };
    Ok(MrpRun {
        clustering,
        diagnostics,
    })
}

/// Multiscale-rings clustering: build a galaxy of disjoint solar systems,
/// draw one candidate set per block, keep those with low relative absorption,
/// merge them by mutual conductance, and optionally complete the partition by
/// harmonic measure. Of `repeats` independent draws, the one with the lowest
/// mean cluster conductance is returned (earliest on ties).
pub fn cluster_mrp(g: &WeightedGraph, params: &MrpParams) -> Result<MrpRun> {
    params.validate()?;
    let galaxy = build_galaxy(g, params.n_c, params.scale, params.n_b)?;
    let runs: Vec<MrpRun> = (0..params.repeats)
        .into_par_iter()
        .map(|r| run_repeat(g, &galaxy, params, r))
        .collect::<Result<_>>()?;
    let scores: Vec<Option<f64>> = runs
        .iter()
        .map(|r| mean_conductance(g, &r.clustering))
        .collect();
    let key = |s: Option<f64>| s.unwrap_or(f64::INFINITY);
    let best = (0..runs.len())
        .min_by(|&a, &b| key(scores[a]).total_cmp(&key(scores[b])).then(a.cmp(&b)))
        .unwrap();
    let mut run = runs.into_iter().nth(best).unwrap();
    run.diagnostics.repeat_scores = scores;
    run.diagnostics.chosen_repeat = best;
    Ok(run)
}
