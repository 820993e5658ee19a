//! Walk simulation: plain weighted walks, the subordinated (multiscale rings)
//! walk, and the hitting-time discrepancy estimate.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};
use crate::rng::{self, Rng};

/// A simulated trajectory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    pub start: usize,
    pub vertices: Vec<usize>,
    pub seed: u64,
}

impl WalkPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Monte-Carlo frequency estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_count(hits: usize, samples: usize) -> Self {
        let mean = hits as f64 / samples as f64;
        let stderr = (mean * (1.0 - mean) / samples as f64).sqrt();
        Estimate {
            mean,
            stderr,
            samples,
        }
    }
}

/// One step of the weighted walk from `u`.
pub(crate) fn step(g: &WeightedGraph, u: usize, rng: &mut Rng) -> usize {
    let nbrs = g.neighbors(u);
    let mut target = rng.gen::<f64>() * g.omega(u);
    for &(v, w) in nbrs {
        if target < w {
            return v;
        }
        target -= w;
    }
    // Rounding can leave a sliver past the last neighbour.
    nbrs[nbrs.len() - 1].0
}

pub fn simulate_walk(g: &WeightedGraph, start: usize, steps: usize, seed: u64) -> Result<WalkPath> {
    g.check_vertex(start)?;
    let mut rng = rng::stream(seed, &[0]);
    let mut vertices = Vec::with_capacity(steps + 1);
    vertices.push(start);
    let mut u = start;
    for _ in 0..steps {
        u = step(g, u, &mut rng);
        vertices.push(u);
    }
    Ok(WalkPath {
        start,
        vertices,
        seed,
    })
}

/// Law of the clock increments `R_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncrementLaw {
    /// Uniform on `{1, …, max}`.
    UniformUpTo(u64),
    /// Always the same increment.
    Constant(u64),
}

impl IncrementLaw {
    fn sample(&self, rng: &mut Rng) -> u64 {
        match *self {
            IncrementLaw::UniformUpTo(max) => rng.gen_range(1..=max),
            IncrementLaw::Constant(r) => r,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            IncrementLaw::UniformUpTo(max) => (max as f64 + 1.0) / 2.0,
            IncrementLaw::Constant(r) => r as f64,
        }
    }
}

/// Scale, increment law, and stopping threshold of the subordinated walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrpConfig {
    pub scale: u32,
    pub increments: IncrementLaw,
    pub threshold: u64,
}

impl MrpConfig {
    /// Increments uniform on `{1, …, 2^s}`, threshold `100·4^s`.
    pub fn new(scale: u32) -> Self {
        MrpConfig {
            scale,
            increments: IncrementLaw::UniformUpTo(1u64 << scale),
            threshold: 100 * 4u64.pow(scale),
        }
    }

    pub fn with_threshold(mut self, threshold: u64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.threshold < 1 {
            return Err(Error::InvalidParameter(
                "threshold must be at least 1".into(),
            ));
        }
        match self.increments {
            IncrementLaw::UniformUpTo(0) | IncrementLaw::Constant(0) => Err(
                Error::InvalidParameter("increments must be positive".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Subsampled path `Y_n = S_{τ_n}` together with the clock `τ_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrpPath {
    pub path: WalkPath,
    pub clock: Vec<u64>,
}

/// Run the subordinated walk until the clock first reaches the threshold.
///
/// The underlying walk draws from the same stream as [`simulate_walk`], so a
/// unit-increment run reproduces the plain walk step for step.
pub fn simulate_mrp(
    g: &WeightedGraph,
    start: usize,
    cfg: &MrpConfig,
    seed: u64,
) -> Result<MrpPath> {
    g.check_vertex(start)?;
    cfg.validate()?;
    let mut walk_rng = rng::stream(seed, &[0]);
    let mut clock_rng = rng::stream(seed, &[1]);
    let mut vertices = vec![start];
    let mut clock = vec![0u64];
    let mut u = start;
    let mut tau = 0u64;
    while tau < cfg.threshold {
        let r = cfg.increments.sample(&mut clock_rng);
        for _ in 0..r {
            u = step(g, u, &mut walk_rng);
        }
        tau += r;
        vertices.push(u);
        clock.push(tau);
    }
    Ok(MrpPath {
        path: WalkPath {
            start,
            vertices,
            seed,
        },
        clock,
    })
}

/// Estimate `P(T(x, Ω) − d(x, Ω) > C·d(x, Ω))`, where `T` is the walk's
/// hitting time of `Ω` and `d` the hop distance.
pub fn discrepancy_probability(
    g: &WeightedGraph,
    x: usize,
    omega: &VertexSet,
    c: f64,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    g.check_vertex(x)?;
    g.check_set(omega)?;
    if omega.is_empty() {
        return Err(Error::DegenerateSet("target set is empty"));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter("C must be positive".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let d = g.distances_from_set(omega.iter())[x];
    if d == UNREACHABLE {
        return Err(Error::Disconnected);
    }
    if d == 0 {
        return Ok(Estimate::from_count(0, samples));
    }
    let horizon = discrepancy_horizon(d, c);
    let inside = omega.mask(g.n());
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, &[i as u64]);
            let mut u = x;
            for _ in 0..horizon {
                u = step(g, u, &mut rng);
                if inside[u] {
                    return 0;
                }
            }
            1
        })
        .sum();
    Ok(Estimate::from_count(hits, samples))
}

/// Largest hitting time that does not count as a discrepancy: `⌊(1 + C)·d⌋`.
pub fn discrepancy_horizon(d: usize, c: f64) -> usize {
    ((1.0 + c) * d as f64).floor() as usize
}
