use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng;

/// Regeneration attempts before a disconnected draw is returned flagged.
const MAX_ATTEMPTS: u64 = 100;

/// Stochastic block model with planted communities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl SbmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::InvalidParameter(
                "block sizes must be positive".into(),
            ));
        }
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !unit(self.p_in) || !unit(self.p_out) || self.p_out > self.p_in {
            return Err(Error::InvalidParameter("need 0 ≤ p_out ≤ p_in ≤ 1".into()));
        }
        Ok(())
    }

    /// Planted community of every vertex.
    pub fn labels(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SbmGraph {
    pub graph: WeightedGraph,
    pub labels: Vec<usize>,
    /// False when every attempt came out disconnected.
    pub connected: bool,
    /// Index of the accepted draw.
    pub attempt: u64,
}

fn draw(spec: &SbmSpec, labels: &[usize], attempt: u64) -> Vec<(usize, usize, f64)> {
    let mut rng = rng::stream(spec.seed, &[attempt]);
    let n = labels.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] {
                spec.p_in
            } else {
                spec.p_out
            };
            if rng.gen::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    edges
}

/// Sample a unit-weight SBM graph, redrawing (with a derived seed) while it is
/// disconnected.
pub fn generate_sbm(spec: &SbmSpec) -> Result<SbmGraph> {
    spec.validate()?;
    let labels = spec.labels();
    let n = labels.len();
    let mut fallback: Option<(WeightedGraph, u64)> = None;
    let mut last_err = Error::EmptyGraph;
    for attempt in 0..MAX_ATTEMPTS {
        match WeightedGraph::from_edges(n, draw(spec, &labels, attempt)) {
            Ok(graph) if graph.is_connected() => {
                return Ok(SbmGraph {
                    graph,
                    labels,
                    connected: true,
                    attempt,
                });
            }
            Ok(graph) => {
                if fallback.is_none() {
                    fallback = Some((graph, attempt));
                }
            }
            Err(e) => last_err = e,
        }
    }
    match fallback {
        Some((graph, attempt)) => Ok(SbmGraph {
            graph,
            labels,
            connected: false,
            attempt,
        }),
        None => Err(last_err),
    }
}

/// Random connected graph: a random recursive tree plus independent extra
/// edges with probability `p_extra`. Weights are uniform on `[0.5, 2)` when
/// `weighted`, else one.
pub fn random_connected(n: usize, p_extra: f64, weighted: bool, seed: u64) -> WeightedGraph {
    assert!(n >= 2, "need at least two vertices");
    let mut rng = rng::stream(seed, &[0x6e]);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let weight = |rng: &mut rng::Rng| {
        if weighted {
            rng.gen_range(0.5..2.0)
        } else {
            1.0
        }
    };
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[i].min(order[j]), order[i].max(order[j]));
        present.insert((u, v));
        edges.push((u, v, weight(&mut rng)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present.contains(&(u, v)) && rng.gen::<f64>() < p_extra {
                edges.push((u, v, weight(&mut rng)));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).expect("tree edges cover every vertex")
}
