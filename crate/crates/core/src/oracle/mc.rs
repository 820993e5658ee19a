use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};
use crate::rng;
use crate::walk::sim::{step, Estimate};

/// Frequency estimate of `P^start[T_U < T_∂B]`: walks run until they enter
/// `U` or leave `B`.
pub fn mc_hit_probability(
    g: &WeightedGraph,
    b: &VertexSet,
    u: &VertexSet,
    start: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    g.check_set(b)?;
    if !u.is_subset(b) {
        return Err(Error::NotSubset);
    }
    if !b.contains(start) || u.contains(start) {
        return Err(Error::InvalidParameter("start must lie in B∖U".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let in_b = b.mask(g.n());
    let in_u = u.mask(g.n());
    let stops = (0..g.n()).filter(|&v| in_u[v] || !in_b[v]);
    if g.distances_from_set(stops)[start] == UNREACHABLE {
        return Err(Error::InvalidParameter(
            "walk can reach neither U nor the boundary".into(),
        ));
    }
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, &[i as u64]);
            let mut v = start;
            loop {
                v = step(g, v, &mut rng);
                if in_u[v] {
                    return 1;
                }
                if !in_b[v] {
                    return 0;
                }
            }
        })
        .sum();
    Ok(Estimate::from_count(hits, samples))
}
