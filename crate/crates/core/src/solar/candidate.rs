use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::rng::{self, Rng};
use crate::solar::harmonic::{harmonic_hit_probability, relative_absorption};
use crate::solar::system::SolarSystem;

pub const DEFAULT_FRACTION: f64 = 0.5;
/// Uniform draws tried before falling back to breadth-first growth.
pub const DEFAULT_MAX_TRIES: usize = 50;

/// A connected random subset of one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateDraw {
    pub vertices: VertexSet,
    /// The block had no connected subset of the requested size; `vertices`
    /// is its largest induced component instead.
    pub shrunk: bool,
    pub used_fallback: bool,
}

/// Grow a connected set of `k` vertices inside `mask`, starting at `start` and
/// absorbing a uniformly random frontier vertex at each step.
fn grow(g: &WeightedGraph, in_block: &[bool], start: usize, k: usize, rng: &mut Rng) -> VertexSet {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::with_capacity(k);
    let mut frontier = vec![start];
    seen[start] = true;
    while out.len() < k && !frontier.is_empty() {
        let v = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        out.push(v);
        for &(w, _) in g.neighbors(v) {
            if in_block[w] && !seen[w] {
                seen[w] = true;
                frontier.push(w);
            }
        }
    }
    VertexSet::new(out)
}

/// Draw `⌈fraction·|block|⌉` block vertices inducing a connected subgraph.
///
/// Uniform subsets are tried `max_tries` times; after that the set is grown
/// breadth-first from a random vertex of a large enough component.
pub fn sample_candidate_set(
    g: &WeightedGraph,
    block: &VertexSet,
    fraction: f64,
    max_tries: usize,
    seed: u64,
) -> Result<CandidateDraw> {
    g.check_set(block)?;
    if block.is_empty() {
        return Err(Error::DegenerateSet("empty block"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction {fraction} outside (0, 1]"
        )));
    }
    let k = ((fraction * block.len() as f64).ceil() as usize).clamp(1, block.len());
    let mut rng = rng::stream(seed, &[]);

    let components = g.induced_components(block);
    let largest = components.iter().map(VertexSet::len).max().unwrap_or(0);
    if largest < k {
        let vertices = components
            .into_iter()
            .max_by_key(VertexSet::len)
            .unwrap_or_default();
        return Ok(CandidateDraw {
            vertices,
            shrunk: true,
            used_fallback: false,
        });
    }

    let members = block.as_slice();
    for _ in 0..max_tries {
        let u: VertexSet = sample(&mut rng, members.len(), k)
            .into_iter()
            .map(|i| members[i])
            .collect();
        if g.induces_connected(&u) {
            return Ok(CandidateDraw {
                vertices: u,
                shrunk: false,
                used_fallback: false,
            });
        }
    }

    let eligible: Vec<usize> = components
        .iter()
        .filter(|c| c.len() >= k)
        .flat_map(|c| c.iter())
        .collect();
    let start = eligible[rng.gen_range(0..eligible.len())];
    Ok(CandidateDraw {
        vertices: grow(g, &block.mask(g.n()), start, k, &mut rng),
        shrunk: false,
        used_fallback: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafeSetParams {
    pub fraction: f64,
    /// A candidate is safe when its relative absorption is strictly below this.
    pub ra_threshold: f64,
    pub max_tries: usize,
}

impl SafeSetParams {
    pub fn new(fraction: f64, ra_threshold: f64) -> Self {
        SafeSetParams {
            fraction,
            ra_threshold,
            max_tries: DEFAULT_MAX_TRIES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "fraction {} outside (0, 1]",
                self.fraction
            )));
        }
        if self.ra_threshold.is_nan() || self.ra_threshold < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "relative absorption threshold {} must be nonnegative",
                self.ra_threshold
            )));
        }
        Ok(())
    }
}

/// One block's candidate set together with its absorption test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    /// 1-based ring index.
    pub ring: usize,
    pub block: usize,
    pub vertices: VertexSet,
    pub connected: bool,
    pub shrunk: bool,
    pub ra: Option<f64>,
    pub safe: bool,
    /// Set when sampling or the harmonic solve failed for this block.
    pub error: Option<String>,
}

fn evaluate_block(
    g: &WeightedGraph,
    ring: usize,
    index: usize,
    block: &VertexSet,
    params: &SafeSetParams,
    seed: u64,
) -> CandidateSet {
    let mut out = CandidateSet {
        ring,
        block: index,
        vertices: VertexSet::empty(),
        connected: false,
        shrunk: false,
        ra: None,
        safe: false,
        error: None,
    };
    let block_seed = rng::derive_seed(seed, &[ring as u64, index as u64]);
    let draw = match sample_candidate_set(g, block, params.fraction, params.max_tries, block_seed) {
        Ok(d) => d,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.connected = g.induces_connected(&draw.vertices);
    out.shrunk = draw.shrunk;
    out.vertices = draw.vertices;
    match harmonic_hit_probability(g, block, &out.vertices) {
        Ok(field) => {
            let ra = relative_absorption(g, block, &out.vertices, &field);
            out.ra = Some(ra);
            out.safe = ra < params.ra_threshold;
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Sample and test one candidate per nonempty block, in parallel. Results are
/// ordered by `(ring, block)`; per-block failures are reported in the
/// candidate instead of aborting the sweep.
pub fn find_safe_sets_with(
    g: &WeightedGraph,
    ss: &SolarSystem,
    params: &SafeSetParams,
    seed: u64,
) -> Result<Vec<CandidateSet>> {
    params.validate()?;
    let blocks: Vec<(usize, usize, &VertexSet)> = ss.blocks().collect();
    Ok(blocks
        .into_par_iter()
        .map(|(ring, index, block)| evaluate_block(g, ring, index, block, params, seed))
        .collect())
}

pub fn find_safe_sets(
    g: &WeightedGraph,
    ss: &SolarSystem,
    fraction: f64,
    ra_threshold: f64,
    seed: u64,
) -> Result<Vec<CandidateSet>> {
    find_safe_sets_with(g, ss, &SafeSetParams::new(fraction, ra_threshold), seed)
}
