//! Walk on ℤ versus walk on the graph: step distributions, Chebyshev
//! polynomials of the kernel, and the Hoeffding / Carne–Varopoulos bounds.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{TransitionKernel, WeightedGraph, UNREACHABLE};
use crate::linalg;

/// Law of `S_n` for the ±1 walk on ℤ with up-probability `p_up`, started at 0.
/// Returns `(k, P(S_n = k))` for `k = −n, −n+2, …, n`.
pub fn rw_step_distribution(n: usize, p_up: f64) -> Vec<(i64, f64)> {
    let q = 1.0 - p_up;
    let mut binom = 1.0f64;
    (0..=n)
        .map(|ups| {
            if ups > 0 {
                binom = binom * (n - ups + 1) as f64 / ups as f64;
            }
            let k = 2 * ups as i64 - n as i64;
            (k, binom * p_up.powi(ups as i32) * q.powi((n - ups) as i32))
        })
        .collect()
}

/// `H_k(t)` through `H_{k+1} = 2t·H_k − H_{k−1}`.
pub fn chebyshev_scalar(k: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[H_0(M), …, H_{kmax}(M)]` by the same recurrence with `M` in place of `t`.
pub fn chebyshev_matrices(kmax: usize, m: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let id = DMatrix::identity(m.nrows(), m.ncols());
    let mut out = vec![id];
    if kmax >= 1 {
        out.push(m.clone());
    }
    for k in 1..kmax {
        let next = (m * &out[k]) * 2.0 - &out[k - 1];
        out.push(next);
    }
    out
}

pub fn chebyshev_matrix(k: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
    chebyshev_matrices(k, m).pop().unwrap()
}

/// Max-entry gap between `P^n` and `Σ_k P(S_n = k)·H_{|k|}(P)` for the simple symmetric walk.
pub fn verify_duality(p: &TransitionKernel, n: usize) -> f64 {
    let m = p.matrix();
    let size = m.nrows();
    let mut power = DMatrix::identity(size, size);
    for _ in 0..n {
        power = &power * m;
    }
    let cheb = chebyshev_matrices(n, m);
    let mut sum = DMatrix::zeros(size, size);
    for (k, prob) in rw_step_distribution(n, 0.5) {
        sum += &cheb[k.unsigned_abs() as usize] * prob;
    }
    linalg::max_abs_diff(&power, &sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSweep {
    pub cases: usize,
    pub violations: usize,
    /// Smallest `bound − value` seen.
    pub min_slack: f64,
}

impl BoundSweep {
    fn new() -> Self {
        BoundSweep {
            cases: 0,
            violations: 0,
            min_slack: f64::INFINITY,
        }
    }

    fn record(&mut self, value: f64, bound: f64) {
        self.cases += 1;
        if value > bound {
            self.violations += 1;
        }
        self.min_slack = self.min_slack.min(bound - value);
    }
}

/// Check `p^t(x, y) ≤ 2·√(ω_y/ω_x)·exp(−d(x, y)²/2t)` for all pairs and
/// `1 ≤ t ≤ t_max`. The kernel norm on `L²(ω)` is one, so `|P|^t` drops out.
pub fn carne_check(g: &WeightedGraph, t_max: usize) -> Result<BoundSweep> {
    let n = g.n();
    let dist: Vec<Vec<usize>> = (0..n).map(|x| g.bfs_distances(x)).collect();
    if dist[0].contains(&UNREACHABLE) {
        return Err(Error::Disconnected);
    }
    let p = g.transition_kernel();
    let mut power = p.matrix().clone();
    let mut sweep = BoundSweep::new();
    for t in 1..=t_max {
        if t > 1 {
            power = &power * p.matrix();
        }
        for x in 0..n {
            for y in 0..n {
                let d = dist[x][y] as f64;
                let bound =
                    2.0 * (g.omega(y) / g.omega(x)).sqrt() * (-d * d / (2.0 * t as f64)).exp();
                sweep.record(power[(x, y)], bound);
            }
        }
    }
    Ok(sweep)
}

/// One-sided Hoeffding bound `P(S_n − E S_n ≥ k) ≤ exp(−k²/2n)` for ±1 steps
/// with each up-probability in `p_values`, and the two-sided tail
/// `Σ_{|k| ≥ d} P(S_n = k) ≤ 2·exp(−d²/2n)` for the symmetric walk, over
/// `1 ≤ n ≤ n_max`.
pub fn hoeffding_check(n_max: usize, p_values: &[f64]) -> BoundSweep {
    let mut sweep = BoundSweep::new();
    for n in 1..=n_max {
        let nf = n as f64;
        for &p in p_values {
            let dist = rw_step_distribution(n, p);
            let mean = nf * (2.0 * p - 1.0);
            // The tail is a step function; its worst case against the bound
            // sits exactly on the atoms.
            for &(k0, _) in &dist {
                let k = k0 as f64 - mean;
                if k <= 0.0 {
                    continue;
                }
                let tail: f64 = dist
                    .iter()
                    .filter(|&&(s, _)| s >= k0)
                    .map(|&(_, q)| q)
                    .sum();
                sweep.record(tail, (-k * k / (2.0 * nf)).exp());
            }
        }
        let sym = rw_step_distribution(n, 0.5);
        for d in 1..=(n as i64 + 1) {
            let tail: f64 = sym
                .iter()
                .filter(|&&(k, _)| k.abs() >= d)
                .map(|&(_, q)| q)
                .sum();
            let df = d as f64;
            sweep.record(tail, 2.0 * (-df * df / (2.0 * nf)).exp());
        }
    }
    sweep
}
