use crate::entropy::snell::{snell_envelope, StochasticKernel};
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};

/// `V_0` over all states for a time-homogeneous stopping payoff `payoff[s]`
/// and running reward `reward[s]`, horizon `horizon`:
/// `V_N = M`, `V_t = max(M, L + E[V_{t+1}])`.
pub fn homogeneous_value(
    kernel: &StochasticKernel,
    payoff: &[f64],
    reward: &[f64],
    horizon: usize,
) -> Vec<f64> {
    let mut v = payoff.to_vec();
    let mut next = vec![0.0; v.len()];
    for _ in 0..horizon {
        for s in 0..v.len() {
            next[s] = payoff[s].max(reward[s] + kernel.expect(s, &v));
        }
        std::mem::swap(&mut v, &mut next);
    }
    v
}

fn distance_payoff(g: &WeightedGraph, x: usize) -> Result<Vec<f64>> {
    g.check_vertex(x)?;
    g.bfs_distances(x)
        .into_iter()
        .map(|d| {
            if d == UNREACHABLE {
                Err(Error::Disconnected)
            } else {
                Ok(d as f64)
            }
        })
        .collect()
}

/// `V(x) = sup_τ E^x[Σ_{t<τ} 1(X_t ∈ Ω) + d_G(x, X_τ)]` over stopping times
/// `τ ≤ horizon`.
pub fn value_function(
    g: &WeightedGraph,
    x: usize,
    omega: &VertexSet,
    horizon: usize,
) -> Result<f64> {
    g.check_set(omega)?;
    let payoff = distance_payoff(g, x)?;
    let reward: Vec<f64> = omega
        .mask(g.n())
        .into_iter()
        .map(|b| if b { 1.0 } else { 0.0 })
        .collect();
    let kernel = StochasticKernel::from_graph(g);
    Ok(homogeneous_value(&kernel, &payoff, &reward, horizon)[x])
}

/// The same value computed as a plain Snell envelope on the augmented chain
/// `(vertex, reward collected so far)`, whose payoff folds the running reward
/// into the stopping payoff.
pub fn value_function_augmented(
    g: &WeightedGraph,
    x: usize,
    omega: &VertexSet,
    horizon: usize,
) -> Result<f64> {
    g.check_set(omega)?;
    let distance = distance_payoff(g, x)?;
    let n = g.n();
    let levels = horizon + 1;
    let index = |y: usize, a: usize| y * levels + a;
    let mut rows = vec![Vec::new(); n * levels];
    for y in 0..n {
        let gain = usize::from(omega.contains(y));
        for a in 0..levels {
            let next = (a + gain).min(horizon);
            rows[index(y, a)] = g
                .neighbors(y)
                .iter()
                .map(|&(z, w)| (index(z, next), w / g.omega(y)))
                .collect();
        }
    }
    let kernel = StochasticKernel::from_rows(rows)?;
    let payoff_row: Vec<f64> = (0..n * levels)
        .map(|i| (i % levels) as f64 + distance[i / levels])
        .collect();
    let env = snell_envelope(&kernel, &vec![payoff_row; levels])?;
    Ok(env.table[0][index(x, 0)])
}
