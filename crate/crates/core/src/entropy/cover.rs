use serde::{Deserialize, Serialize};

use crate::graph::{VertexSet, WeightedGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: usize,
    pub vertices: VertexSet,
}

/// Hop-distance balls whose union is the vertex set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub balls: Vec<Ball>,
}

impl Covering {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

/// Greedy cover: repeatedly take the lowest-id uncovered vertex and add the
/// ball of radius `radius` around it.
pub fn ball_cover(g: &WeightedGraph, radius: usize) -> Covering {
    let mut covered = vec![false; g.n()];
    let mut balls = Vec::new();
    for center in 0..g.n() {
        if covered[center] {
            continue;
        }
        let vertices: VertexSet = g
            .bfs_distances(center)
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d <= radius)
            .map(|(v, _)| v)
            .collect();
        for v in vertices.iter() {
            covered[v] = true;
        }
        balls.push(Ball {
            center,
            radius,
            vertices,
        });
    }
    Covering { balls }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::random_connected;

    fn path(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn p5_unit_radius() {
        let cov = ball_cover(&path(5), 1);
        let sets: Vec<&VertexSet> = cov.balls.iter().map(|b| &b.vertices).collect();
        assert_eq!(
            sets,
            vec![
                &VertexSet::new([0, 1]),
                &VertexSet::new([1, 2, 3]),
                &VertexSet::new([3, 4])
            ]
        );
        assert_eq!(
            cov.balls.iter().map(|b| b.center).collect::<Vec<_>>(),
            vec![0, 2, 4]
        );
    }

    #[test]
    fn extreme_radii() {
        let g = random_connected(25, 0.05, false, 3);
        let singles = ball_cover(&g, 0);
        assert_eq!(singles.len(), 25);
        assert!(singles.balls.iter().all(|b| b.vertices.len() == 1));
        let one = ball_cover(&g, g.diameter().unwrap());
        assert_eq!(one.len(), 1);
        assert_eq!(one.balls[0].vertices, VertexSet::full(25));
    }

    #[test]
    fn covers_everything() {
        for seed in 0..20 {
            let g = random_connected(40, 0.03, false, seed);
            let cov = ball_cover(&g, (seed % 3) as usize);
            let union = cov
                .balls
                .iter()
                .fold(VertexSet::empty(), |acc, b| acc.union(&b.vertices));
            assert_eq!(union, VertexSet::full(40));
            assert!(cov.balls.iter().all(|b| !b.vertices.is_empty()));
        }
    }
}
