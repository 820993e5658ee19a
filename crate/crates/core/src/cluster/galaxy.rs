use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::solar::{
    build_solar_system_within, polar_from_coordinates, AngularEmbedding, SolarSystem,
    SpectralEmbedding,
};

/// Greedy farthest-point centers: the heaviest vertex first (lowest id on
/// ties), then repeatedly the vertex farthest in hops from all chosen centers.
/// Stops early once every vertex is a center.
pub fn select_centers(g: &WeightedGraph, count: usize) -> Vec<usize> {
    let n = g.n();
    if n == 0 || count == 0 {
        return Vec::new();
    }
    let first = (0..n)
        .max_by(|&a, &b| g.omega(a).total_cmp(&g.omega(b)).then(b.cmp(&a)))
        .unwrap();
    let mut centers = vec![first];
    let mut nearest = g.bfs_distances(first);
    while centers.len() < count.min(n) {
        let next = (0..n)
            .filter(|v| !centers.contains(v))
            .max_by(|&a, &b| nearest[a].cmp(&nearest[b]).then(b.cmp(&a)))
            .unwrap();
        centers.push(next);
        for (d, e) in nearest.iter_mut().zip(g.bfs_distances(next)) {
            *d = (*d).min(e);
        }
    }
    centers
}

/// Disjoint solar systems, built in center order on vertices not yet claimed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Galaxy {
    pub systems: Vec<SolarSystem>,
    pub requested: usize,
    /// Centers dropped because an earlier system had already claimed them.
    pub skipped_centers: Vec<usize>,
}

impl Galaxy {
    /// Fewer systems than requested.
    pub fn truncated(&self) -> bool {
        self.systems.len() < self.requested
    }
}

pub fn build_galaxy(g: &WeightedGraph, n_c: usize, scale: u32, n_b: usize) -> Result<Galaxy> {
    if n_c == 0 {
        return Err(Error::InvalidParameter(
            "need at least one solar center".into(),
        ));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let coords = SpectralEmbedding.coordinates(g);
    let mut claimed = vec![false; g.n()];
    let mut galaxy = Galaxy {
        systems: Vec::new(),
        requested: n_c,
        skipped_centers: Vec::new(),
    };
    for center in select_centers(g, n_c) {
        if claimed[center] {
            galaxy.skipped_centers.push(center);
            continue;
        }
        let polar = polar_from_coordinates(g, center, &coords)?;
        let available: Vec<bool> = claimed.iter().map(|c| !c).collect();
        let ss = build_solar_system_within(&polar, scale, n_b, Some(&available))?;
        for v in ss.vertices().iter() {
            claimed[v] = true;
        }
        galaxy.systems.push(ss);
    }
    Ok(galaxy)
}
