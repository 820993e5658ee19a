use mrp_core::cluster::{build_galaxy, cluster_mrp, evaluate_clustering, MrpParams};
use mrp_core::entropy::{ball_cover, beta_entropy, cluster_entropy, EntropyParams};
use mrp_core::oracle::{adjusted_rand_index, generate_sbm, random_connected, SbmSpec};
use mrp_core::solar::{find_safe_sets, harmonic_hit_probability, relative_absorption};
use mrp_core::WeightedGraph;

fn sbm(seed: u64) -> (WeightedGraph, Vec<usize>) {
    let s = generate_sbm(&SbmSpec {
        sizes: vec![30, 30],
        p_in: 0.5,
        p_out: 0.01,
        seed,
    })
    .unwrap();
    assert!(s.connected);
    (s.graph, s.labels)
}

#[test]
fn edge_list_round_trip() {
    let g = random_connected(25, 0.1, true, 5);
    let back = WeightedGraph::parse_edge_list(&g.to_edge_list()).unwrap();
    assert_eq!(back.n(), g.n());
    assert_eq!(
        back.edges().collect::<Vec<_>>(),
        g.edges().collect::<Vec<_>>()
    );
}

#[test]
fn galaxy_systems_are_disjoint_and_partitioned() {
    let g = random_connected(120, 0.01, false, 2);
    let galaxy = build_galaxy(&g, 4, 1, 6).unwrap();
    let mut seen = vec![false; g.n()];
    for system in &galaxy.systems {
        for ring in &system.rings {
            let mut blocks: Vec<usize> = ring.blocks.iter().flat_map(|b| b.iter()).collect();
            blocks.sort_unstable();
            assert_eq!(blocks, ring.vertices.as_slice());
            for v in ring.vertices.iter() {
                assert!(!seen[v], "vertex {v} in two systems");
                seen[v] = true;
            }
        }
    }
}

#[test]
fn safe_sets_stay_in_their_blocks() {
    let g = random_connected(80, 0.03, true, 9);
    let galaxy = build_galaxy(&g, 1, 1, 4).unwrap();
    let system = &galaxy.systems[0];
    let threshold = 1.0;
    for cand in find_safe_sets(&g, system, 0.5, threshold, 3).unwrap() {
        let block = &system.rings[cand.ring - 1].blocks[cand.block];
        assert!(cand.vertices.is_subset(block));
        if let Some(ra) = cand.ra {
            assert_eq!(cand.safe, ra < threshold);
            let field = harmonic_hit_probability(&g, block, &cand.vertices).unwrap();
            assert!((relative_absorption(&g, block, &cand.vertices, &field) - ra).abs() < 1e-9);
        }
    }
}

#[test]
fn clustering_and_evaluation_agree() {
    let (g, truth) = sbm(4);
    let run = cluster_mrp(
        &g,
        &MrpParams {
            seed: 4,
            ..Default::default()
        },
    )
    .unwrap();
    let c = &run.clustering;
    assert!(c.is_partition_of(g.n()));
    let metrics = evaluate_clustering(&g, c, Some(&truth)).unwrap();
    assert_eq!(metrics.coverage, 1.0);
    let ari = adjusted_rand_index(&c.labels(g.n()), &truth).unwrap();
    assert_eq!(metrics.ari, Some(ari));
    assert!(ari >= 0.8);
    for (cluster, phi) in c.clusters.iter().zip(&metrics.conductances) {
        assert_eq!(*phi, Some(g.conductance(cluster).unwrap()));
    }
}

#[test]
fn entropy_scores_match_direct_evaluation() {
    let (g, _) = sbm(1);
    let params = EntropyParams {
        n_sets: 12,
        top_m: 3,
        seed: 1,
        ..Default::default()
    };
    let run = cluster_entropy(&g, &params).unwrap();
    let cover = ball_cover(&g, params.radius);
    assert_eq!(run.balls, cover.len());
    assert_eq!(run.horizon, 4 * g.diameter().unwrap());
    for s in &run.ranked {
        let direct = beta_entropy(&g, &s.vertices, &cover, run.horizon, params.scope).unwrap();
        assert!((direct - s.score).abs() < 1e-12);
        assert_eq!(s.vertices.len(), params.kappa);
    }
    assert!(run.ranked.windows(2).all(|w| w[0].score >= w[1].score));
}
