use serde::{Deserialize, Serialize};

use crate::cluster::mrp::Clustering;
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::oracle::adjusted_rand_index;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterMetrics {
    /// Conductance per cluster; `None` for a cluster equal to the whole graph.
    pub conductances: Vec<Option<f64>>,
    pub mean_conductance: Option<f64>,
    /// Fraction of vertices inside some cluster.
    pub coverage: f64,
    /// Against the reference labeling, when one is given.
    pub ari: Option<f64>,
}

fn cluster_conductances(g: &WeightedGraph, c: &Clustering) -> Vec<Option<f64>> {
    c.clusters.iter().map(|s| g.conductance(s).ok()).collect()
}

/// Mean conductance over the clusters that have one.
pub fn mean_conductance(g: &WeightedGraph, c: &Clustering) -> Option<f64> {
    let defined: Vec<f64> = cluster_conductances(g, c).into_iter().flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Unassigned vertices count as singletons when comparing with `reference`.
pub fn evaluate_clustering(
    g: &WeightedGraph,
    c: &Clustering,
    reference: Option<&[usize]>,
) -> Result<ClusterMetrics> {
    let n = g.n();
    let conductances = cluster_conductances(g, c);
    let assigned: usize = c.clusters.iter().map(|s| s.len()).sum();
    let ari = reference
        .map(|r| adjusted_rand_index(&c.labels(n), r))
        .transpose()?;
    Ok(ClusterMetrics {
        mean_conductance: mean_conductance(g, c),
        conductances,
        coverage: assigned as f64 / n as f64,
        ari,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::mrp::{ClusterKind, ClusterOrigin};
    use crate::graph::VertexSet;

    fn clustering(clusters: Vec<VertexSet>, unassigned: VertexSet) -> Clustering {
        let origin = ClusterOrigin {
            center: 0,
            kind: ClusterKind::SafeMerge,
            rings: 1,
            safe_sets: 1,
        };
        Clustering {
            origins: vec![origin; clusters.len()],
            clusters,
            unassigned,
        }
    }

    fn bridged_k4() -> WeightedGraph {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for u in base..base + 4 {
                for v in u + 1..base + 4 {
                    edges.push((u, v, 1.0));
                }
            }
        }
        edges.push((3, 4, 1.0));
        WeightedGraph::from_edges(8, edges).unwrap()
    }

    #[test]
    fn whole_graph_cluster() {
        let g = bridged_k4();
        let m = evaluate_clustering(
            &g,
            &clustering(vec![VertexSet::full(8)], VertexSet::empty()),
            None,
        )
        .unwrap();
        assert_eq!(m.coverage, 1.0);
        assert_eq!(m.conductances, vec![None]);
        assert_eq!(m.mean_conductance, None);
        assert_eq!(m.ari, None);
    }

    #[test]
    fn bridged_k4_true_split() {
        // Cut weight 1; each side has volume 3·3 + 4 = 13.
        let g = bridged_k4();
        let truth = [0, 0, 0, 0, 1, 1, 1, 1];
        let c = clustering(
            vec![VertexSet::new(0..4), VertexSet::new(4..8)],
            VertexSet::empty(),
        );
        let m = evaluate_clustering(&g, &c, Some(&truth)).unwrap();
        for phi in &m.conductances {
            assert!((phi.unwrap() - 1.0 / 13.0).abs() < 1e-15);
        }
        assert_eq!(m.ari, Some(1.0));
    }

    #[test]
    fn partial_coverage() {
        let g = bridged_k4();
        let c = clustering(vec![VertexSet::new(0..3)], VertexSet::new(3..8));
        let m = evaluate_clustering(&g, &c, None).unwrap();
        assert!((m.coverage - 3.0 / 8.0).abs() < 1e-15);
        assert_eq!(c.labels(8), vec![0, 0, 0, 1, 2, 3, 4, 5]);
        assert!(evaluate_clustering(&g, &c, Some(&[0, 1])).is_err());
    }
}
