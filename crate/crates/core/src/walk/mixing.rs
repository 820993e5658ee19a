//! Exact mixing, relaxation, and hitting times for small graphs, reported
//! against the hitting-time and average-conductance bounds.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg;

/// Subset enumeration for the conductance profile stops here.
pub const PROFILE_MAX_VERTICES: usize = 14;

/// Guard for the powering loop in [`mixing_time`].
const MAX_POWER_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    pub fn new(value: f64, bound: f64) -> Self {
        BoundCheck {
            value,
            bound,
            satisfied: value <= bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkStatistics {
    /// Smallest `n` with `max_x TV(p^n(x,·), π) ≤ ε`; `None` for periodic walks.
    pub mixing_time: Option<usize>,
    pub relaxation_time: f64,
    /// `max_{x,y} E_x[T_y]`.
    pub hitting_time: f64,
    /// `t_hit ≤ 20·(d_avg/d_min)·n·√(t_rel + 1)`.
    pub hitting_bound: BoundCheck,
    /// `τ(1/4) ≤ 2000·∫_{π*}^{3/4} du / (u·Φ(u)²)`; only for small aperiodic graphs.
    pub profile_bound: Option<BoundCheck>,
}

fn tv_to_stationary(rows: &DMatrix<f64>, pi: &[f64]) -> f64 {
    rows.row_iter()
        .map(|r| 0.5 * r.iter().zip(pi).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of `D^{1/2} P D^{-1/2}`, descending.
pub fn kernel_spectrum(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n();
    let mut s = DMatrix::zeros(n, n);
    for u in 0..n {
        for &(v, w) in g.neighbors(u) {
            s[(u, v)] = w / (g.omega(u) * g.omega(v)).sqrt();
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// ε-mixing time by exact powering of the kernel. Periodic (bipartite) walks
/// never mix and report `None`.
pub fn mixing_time(g: &WeightedGraph, eps: f64) -> Result<Option<usize>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.is_bipartite() {
        return Ok(None);
    }
    let pi = g.stationary();
    let p = g.transition_kernel();
    let n = g.n();
    let mut rows = DMatrix::identity(n, n);
    for step in 0..MAX_POWER_STEPS {
        if tv_to_stationary(&rows, &pi) <= eps {
            return Ok(Some(step));
        }
        rows = &rows * p.matrix();
    }
    Err(Error::Numerical(
        "mixing time exceeds the powering limit".into(),
    ))
}

pub fn relaxation_time(g: &WeightedGraph) -> f64 {
    let ev = kernel_spectrum(g);
    if ev.len() < 2 {
        return 0.0;
    }
    1.0 / (1.0 - ev[1])
}

/// Largest expected hitting time over ordered pairs, one linear solve per target.
pub fn max_hitting_time(g: &WeightedGraph) -> Result<f64> {
    let n = g.n();
    let p = g.transition_kernel();
    let mut worst: f64 = 0.0;
    for target in 0..n {
        let others: Vec<usize> = (0..n).filter(|&v| v != target).collect();
        let k = others.len();
        let mut m = DMatrix::identity(k, k);
        for (i, &u) in others.iter().enumerate() {
            for (j, &v) in others.iter().enumerate() {
                m[(i, j)] -= p.p(u, v);
            }
        }
        let h = linalg::solve_dense(m, &vec![1.0; k])?;
        worst = h.iter().copied().fold(worst, f64::max);
    }
    Ok(worst)
}

/// `∫_{π*}^{3/4} du / (u·Φ(u)²)` with `Φ(u) = min{φ(S) : π(S) ≤ u}` by
/// brute force over all proper subsets.
pub fn conductance_profile_integral(g: &WeightedGraph) -> Result<f64> {
    let n = g.n();
    if n > PROFILE_MAX_VERTICES {
        return Err(Error::InvalidParameter(format!(
            "profile enumeration limited to {PROFILE_MAX_VERTICES} vertices"
        )));
    }
    let total = g.total_volume();
    let mut sets: Vec<(f64, f64)> = Vec::with_capacity(1 << n);
    for mask in 1u32..((1u32 << n) - 1) {
        let mut vol = 0.0;
        let mut cut = 0.0;
        for u in 0..n {
            if mask & (1 << u) == 0 {
                continue;
            }
            vol += g.omega(u);
            for &(v, w) in g.neighbors(u) {
                if mask & (1 << v) == 0 {
                    cut += w;
                }
            }
        }
        sets.push((vol / total, cut / vol.min(total - vol)));
    }
    sets.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pi_min = g.stationary().into_iter().fold(f64::INFINITY, f64::min);
    let upper = 0.75;
    let mut integral = 0.0;
    let mut phi = f64::INFINITY;
    let mut i = 0;
    let mut lo = pi_min;
    while lo < upper {
        while i < sets.len() && sets[i].0 <= lo * (1.0 + 1e-12) {
            phi = phi.min(sets[i].1);
            i += 1;
        }
        let hi = if i < sets.len() {
            sets[i].0.min(upper)
        } else {
            upper
        };
        if hi > lo {
            integral += (hi / lo).ln() / (phi * phi);
        }
        lo = hi;
    }
    Ok(integral)
}

pub fn walk_statistics(g: &WeightedGraph, eps: f64) -> Result<WalkStatistics> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("ε must be positive".into()));
    }
    let mixing = mixing_time(g, eps)?;
    let t_rel = relaxation_time(g);
    let t_hit = max_hitting_time(g)?;
    let n = g.n() as f64;
    let d_avg = g.total_volume() / n;
    let d_min = g.omegas().iter().copied().fold(f64::INFINITY, f64::min);
    let hitting_bound = BoundCheck::new(t_hit, 20.0 * d_avg / d_min * n * (t_rel + 1.0).sqrt());

    let profile_bound = if g.n() <= PROFILE_MAX_VERTICES {
        match mixing_time(g, 0.25)? {
            Some(t) => {
                let integral = conductance_profile_integral(g)?;
                Some(BoundCheck::new(t as f64, 2000.0 * integral))
            }
            None => None,
        }
    } else {
        None
    };
    Ok(WalkStatistics {
        mixing_time: mixing,
        relaxation_time: t_rel,
        hitting_time: t_hit,
        hitting_bound,
        profile_bound,
    })
}
