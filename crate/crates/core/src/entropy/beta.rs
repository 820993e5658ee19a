use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::cover::{ball_cover, Covering};
use crate::entropy::snell::StochasticKernel;
use crate::entropy::value::homogeneous_value;
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};
use crate::rng;

/// `v·ln v`, with `0·ln 0 = 0`.
pub fn entropy_term(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * v.ln()
    }
}

/// `(1/n) Σ_i V_i ln V_i` over the per-ball values.
pub fn pointwise_beta_entropy(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().map(|&v| entropy_term(v)).sum::<f64>() / values.len() as f64
}

/// Where the running reward of ball `Ω_i` is collected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardScope {
    /// On `Ω_i`; a set's score is then the plain mean of per-vertex scores.
    Ball,
    /// On `Ω_i ∩ K` for the set `K` being scored, so walks that stay inside
    /// the set earn more.
    #[default]
    BallWithinSet,
}

impl std::str::FromStr for RewardScope {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ball" => Ok(RewardScope::Ball),
            "ball-within-set" => Ok(RewardScope::BallWithinSet),
            other => Err(format!(
                "unknown reward scope `{other}` (expected ball or ball-within-set)"
            )),
        }
    }
}

/// Per-vertex data shared by all value computations on one graph.
struct Context<'a> {
    kernel: StochasticKernel,
    covering: &'a Covering,
    masks: Vec<Vec<bool>>,
    horizon: usize,
}

impl<'a> Context<'a> {
    fn new(g: &WeightedGraph, covering: &'a Covering, horizon: usize) -> Self {
        Context {
            kernel: StochasticKernel::from_graph(g),
            masks: covering
                .balls
                .iter()
                .map(|b| b.vertices.mask(g.n()))
                .collect(),
            covering,
            horizon,
        }
    }

    /// `V_i(x)` for every ball `i`, the reward optionally restricted to `within`.
    fn values(&self, g: &WeightedGraph, x: usize, within: Option<&[bool]>) -> Result<Vec<f64>> {
        let payoff: Vec<f64> = g
            .bfs_distances(x)
            .into_iter()
            .map(|d| {
                if d == UNREACHABLE {
                    Err(Error::Disconnected)
                } else {
                    Ok(d as f64)
                }
            })
            .collect::<Result<_>>()?;
        Ok((0..self.covering.len())
            .map(|i| {
                let reward: Vec<f64> = (0..g.n())
                    .map(|v| {
                        let inside = self.masks[i][v] && within.is_none_or(|k| k[v]);
                        if inside {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                homogeneous_value(&self.kernel, &payoff, &reward, self.horizon)[x]
            })
            .collect())
    }
}

fn set_score(g: &WeightedGraph, ctx: &Context, k: &VertexSet, scope: RewardScope) -> Result<f64> {
    let mask = k.mask(g.n());
    let within = match scope {
        RewardScope::Ball => None,
        RewardScope::BallWithinSet => Some(mask.as_slice()),
    };
    let per_vertex: Vec<f64> = k
        .as_slice()
        .par_iter()
        .map(|&x| ctx.values(g, x, within).map(|v| pointwise_beta_entropy(&v)))
        .collect::<Result<_>>()?;
    Ok(per_vertex.iter().sum::<f64>() / per_vertex.len() as f64)
}

/// β-entropy of `k`: the mean over `x ∈ K` of `(1/n) Σ_i V_i(x) ln V_i(x)`.
pub fn beta_entropy(
    g: &WeightedGraph,
    k: &VertexSet,
    covering: &Covering,
    horizon: usize,
    scope: RewardScope,
) -> Result<f64> {
    g.check_set(k)?;
    if k.is_empty() {
        return Err(Error::DegenerateSet("empty set"));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    set_score(g, &Context::new(g, covering, horizon), k, scope)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyParams {
    /// Cardinality of every random set.
    pub kappa: usize,
    pub n_sets: usize,
    pub top_m: usize,
    /// Radius of the covering balls.
    pub radius: usize,
    /// Stopping horizon; `4·diameter` when unset.
    pub horizon: Option<usize>,
    pub seed: u64,
    pub scope: RewardScope,
}

impl Default for EntropyParams {
    fn default() -> Self {
        EntropyParams {
            kappa: 10,
            n_sets: 100,
            top_m: 5,
            radius: 1,
            horizon: None,
            seed: 0,
            scope: RewardScope::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredSet {
    /// Draw index of the set.
    pub id: usize,
    pub vertices: VertexSet,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRun {
    /// Highest scores first; ties by draw index.
    pub ranked: Vec<ScoredSet>,
    pub horizon: usize,
    pub balls: usize,
}

/// The `l`-th random set of a run: `kappa` vertices drawn uniformly without
/// replacement from stream `(seed, l)`.
pub fn random_set(n: usize, kappa: usize, seed: u64, l: usize) -> VertexSet {
    let mut rng = rng::stream(seed, &[l as u64]);
    sample(&mut rng, n, kappa).into_iter().collect()
}

/// Draw `n_sets` random sets of cardinality `kappa`, score each by β-entropy,
/// and return the `top_m` highest.
pub fn cluster_entropy(g: &WeightedGraph, params: &EntropyParams) -> Result<EntropyRun> {
    let n = g.n();
    if params.kappa == 0 || params.kappa > n {
        return Err(Error::InvalidParameter(format!(
            "kappa {} outside 1..={n}",
            params.kappa
        )));
    }
    if params.top_m == 0 || params.top_m > params.n_sets {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ top_m ({}) ≤ n_sets ({})",
            params.top_m, params.n_sets
        )));
    }
    let diameter = g.diameter().ok_or(Error::Disconnected)?;
    let horizon = params.horizon.unwrap_or(4 * diameter).max(1);
    let covering = ball_cover(g, params.radius);
    let ctx = Context::new(g, &covering, horizon);

    let sets: Vec<VertexSet> = (0..params.n_sets)
        .map(|l| random_set(n, params.kappa, params.seed, l))
        .collect();
    let scores: Vec<f64> = match params.scope {
        RewardScope::Ball => {
            // Per-vertex scores do not depend on the set, so compute each once.
            let per_vertex: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|x| ctx.values(g, x, None).map(|v| pointwise_beta_entropy(&v)))
                .collect::<Result<_>>()?;
            sets.iter()
                .map(|k| k.iter().map(|x| per_vertex[x]).sum::<f64>() / k.len() as f64)
                .collect()
        }
        RewardScope::BallWithinSet => sets
            .par_iter()
            .map(|k| set_score(g, &ctx, k, params.scope))
            .collect::<Result<_>>()?,
    };

    let mut ranked: Vec<ScoredSet> = sets
        .into_iter()
        .zip(scores)
        .enumerate()
        .map(|(id, (vertices, score))| ScoredSet {
            id,
            vertices,
            score,
        })
        .collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.id.cmp(&b.id)));
    ranked.truncate(params.top_m);
    Ok(EntropyRun {
        ranked,
        horizon,
        balls: covering.len(),
    })
}
