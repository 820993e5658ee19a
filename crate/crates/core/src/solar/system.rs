use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};
use crate::solar::embed::{
    polar_from_coordinates, AngularEmbedding, PolarEmbedding, SpectralEmbedding,
};

/// Rings per solar system; the outermost ends at radius `10·2^s`.
pub const RING_COUNT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    /// 1-based ring position.
    pub index: usize,
    pub vertices: VertexSet,
    /// Angular blocks partitioning `vertices`; some may be empty.
    pub blocks: Vec<VertexSet>,
}

/// Center, scale, and the ten rings of width `2^s` around the center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolarSystem {
    pub center: usize,
    pub scale: u32,
    pub ring_width: usize,
    pub rings: Vec<Ring>,
}

impl SolarSystem {
    /// Every vertex in some ring.
    pub fn vertices(&self) -> VertexSet {
        VertexSet::new(self.rings.iter().flat_map(|r| r.vertices.iter()))
    }

    pub fn blocks_per_ring(&self) -> usize {
        self.rings.first().map_or(0, |r| r.blocks.len())
    }

    /// `(ring index, block index, block)` for every nonempty block.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &VertexSet)> {
        self.rings.iter().flat_map(|r| {
            r.blocks
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_empty())
                .map(move |(j, b)| (r.index, j, b))
        })
    }

    /// Ring holding `v`, if any.
    pub fn ring_of(&self, v: usize) -> Option<usize> {
        self.rings
            .iter()
            .find(|r| r.vertices.contains(v))
            .map(|r| r.index)
    }
}

/// Split `members` (already sorted by angle) into `n_b` runs whose sizes differ by at most one.
fn quantile_blocks(members: &[usize], n_b: usize) -> Vec<VertexSet> {
    let base = members.len() / n_b;
    let extra = members.len() % n_b;
    let mut out = Vec::with_capacity(n_b);
    let mut start = 0;
    for j in 0..n_b {
        let size = base + usize::from(j < extra);
        out.push(VertexSet::new(members[start..start + size].iter().copied()));
        start += size;
    }
    out
}

/// Build a solar system on the vertices marked `available` (all when `None`).
/// Ring membership uses hop distance in the full graph.
pub fn build_solar_system_within(
    polar: &PolarEmbedding,
    scale: u32,
    n_b: usize,
    available: Option<&[bool]>,
) -> Result<SolarSystem> {
    if n_b == 0 {
        return Err(Error::InvalidParameter(
            "need at least one block per ring".into(),
        ));
    }
    if scale >= 32 {
        return Err(Error::InvalidParameter("scale too large".into()));
    }
    let width = 1usize << scale;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); RING_COUNT];
    for (v, &d) in polar.radius.iter().enumerate() {
        if d == UNREACHABLE || available.is_some_and(|a| !a[v]) {
            continue;
        }
        let ring = d / width;
        if ring < RING_COUNT {
            members[ring].push(v);
        }
    }
    let rings = members
        .into_iter()
        .enumerate()
        .map(|(i, mut m)| {
            m.sort_by(|&a, &b| polar.angle[a].total_cmp(&polar.angle[b]).then(a.cmp(&b)));
            Ring {
                index: i + 1,
                blocks: quantile_blocks(&m, n_b),
                vertices: VertexSet::new(m),
            }
        })
        .collect();
    Ok(SolarSystem {
        center: polar.center,
        scale,
        ring_width: width,
        rings,
    })
}

/// Rings `{v : (i−1)·2^s ≤ d_G(center, v) < i·2^s}` for `i = 1..=10`, each cut
/// into `n_b` angular blocks by the spectral embedding.
pub fn build_solar_system(
    g: &WeightedGraph,
    center: usize,
    scale: u32,
    n_b: usize,
) -> Result<SolarSystem> {
    g.check_vertex(center)?;
    let polar = polar_from_coordinates(g, center, &SpectralEmbedding.coordinates(g))?;
    build_solar_system_within(&polar, scale, n_b, None)
}
