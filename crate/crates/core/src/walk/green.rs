//! Green functions of the walk killed on leaving a set, and the two
//! occupation identities checked against them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};
use crate::linalg;

/// `G_A(x, y) = Σ_n P^x(X_n = y, walk has not left A by time n)` over `x, y ∈ A`.
#[derive(Clone, Debug)]
pub struct KilledGreen {
    pub domain: VertexSet,
    pub matrix: DMatrix<f64>,
}

impl KilledGreen {
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        Some(self.matrix[(self.domain.index_of(x)?, self.domain.index_of(y)?)])
    }
}

/// Kernel restricted to `a` (rows and columns in `a`'s order).
pub fn restricted_kernel(g: &WeightedGraph, a: &VertexSet) -> DMatrix<f64> {
    let k = a.len();
    let mut q = DMatrix::zeros(k, k);
    for (i, u) in a.iter().enumerate() {
        for &(v, w) in g.neighbors(u) {
            if let Some(j) = a.index_of(v) {
                q[(i, j)] = w / g.omega(u);
            }
        }
    }
    q
}

/// True when the walk can leave `a` from every vertex of `a`.
pub fn can_exit(g: &WeightedGraph, a: &VertexSet) -> bool {
    let inside = a.mask(g.n());
    let outside = (0..g.n()).filter(|&v| !inside[v]);
    let dist = g.distances_from_set(outside);
    a.iter().all(|v| dist[v] != UNREACHABLE)
}

fn check_domain(g: &WeightedGraph, a: &VertexSet) -> Result<()> {
    g.check_set(a)?;
    if a.is_empty() {
        return Err(Error::DegenerateSet("empty domain"));
    }
    if !can_exit(g, a) {
        return Err(Error::DivergentGreen);
    }
    Ok(())
}

/// `G_A = (I − P|_A)^{-1}`.
pub fn killed_green(g: &WeightedGraph, a: &VertexSet) -> Result<KilledGreen> {
    check_domain(g, a)?;
    let q = restricted_kernel(g, a);
    let m = DMatrix::identity(a.len(), a.len()) - q;
    Ok(KilledGreen {
        domain: a.clone(),
        matrix: linalg::invert(m)?,
    })
}

/// Truncated series `Σ_{n ≤ terms} P|_A^n`, summed by binary splitting so the
/// cost grows with `log terms`.
pub fn killed_green_series(g: &WeightedGraph, a: &VertexSet, terms: usize) -> Result<DMatrix<f64>> {
    check_domain(g, a)?;
    let q = restricted_kernel(g, a);
    let k = a.len();
    let count = terms + 1;
    // Invariant: sum = Σ_{n < m} Q^n and power = Q^m for the prefix m of `count`'s bits.
    let mut sum = DMatrix::zeros(k, k);
    let mut power = DMatrix::identity(k, k);
    for bit in (0..usize::BITS - count.leading_zeros()).rev() {
        sum = &sum + &power * &sum;
        power = &power * &power;
        if count >> bit & 1 == 1 {
            sum += &power;
            power = &power * &q;
        }
    }
    Ok(sum)
}

/// Probability, from each vertex of `domain`, of reaching `target ⊆ domain`
/// before leaving `domain`. Returned in `domain` order.
fn hit_before_exit(g: &WeightedGraph, domain: &VertexSet, target: &VertexSet) -> Result<Vec<f64>> {
    let free = domain.difference(target);
    let k = free.len();
    let mut m = DMatrix::identity(k, k);
    let mut rhs = vec![0.0; k];
    for (i, u) in free.iter().enumerate() {
        for &(v, w) in g.neighbors(u) {
            let p = w / g.omega(u);
            if let Some(j) = free.index_of(v) {
                m[(i, j)] -= p;
            } else if target.contains(v) {
                rhs[i] += p;
            }
        }
    }
    let h_free = linalg::solve_dense(m, &rhs)?;
    Ok(domain
        .iter()
        .map(|v| match free.index_of(v) {
            Some(i) => h_free[i],
            None => 1.0,
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnIdentity {
    /// `G_A(c, c)`.
    pub green: f64,
    /// `P^c(walk leaves A before returning to c)`.
    pub escape: f64,
    /// `|green · escape − 1|`.
    pub residual: f64,
}

/// Check `G_A(c, c) · P^c(τ_A < T_c^+) = 1`, where `τ_A` is the exit time of
/// `A` and `T_c^+` the first return to `c`. The escape probability comes from
/// its own linear solve, not from the Green matrix.
pub fn green_return_identity(g: &WeightedGraph, a: &VertexSet, c: usize) -> Result<ReturnIdentity> {
    if !a.contains(c) {
        return Err(Error::NotSubset);
    }
    let green = killed_green(g, a)?.get(c, c).unwrap();

    // h(y) = P^y(leave A before hitting c); h = 1 off A and h(c) = 0.
    let free = a.difference(&VertexSet::new([c]));
    let k = free.len();
    let mut m = DMatrix::identity(k, k);
    let mut rhs = vec![0.0; k];
    for (i, u) in free.iter().enumerate() {
        for &(v, w) in g.neighbors(u) {
            let p = w / g.omega(u);
            if let Some(j) = free.index_of(v) {
                m[(i, j)] -= p;
            } else if !a.contains(v) {
                rhs[i] += p;
            }
        }
    }
    let h = linalg::solve_dense(m, &rhs)?;
    let escape: f64 = g
        .neighbors(c)
        .iter()
        .map(|&(v, w)| {
            let p = w / g.omega(c);
            if !a.contains(v) {
                p
            } else if v == c {
                0.0
            } else {
                p * h[free.index_of(v).unwrap()]
            }
        })
        .sum();
    Ok(ReturnIdentity {
        green,
        escape,
        residual: (green * escape - 1.0).abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LastExitReport {
    /// `P^x(τ̄_A ≤ η_B)` for every `x ∈ B`, in `B` order.
    pub lhs: Vec<f64>,
    /// `Σ_{y ∈ A} G_B(x, y) · P^y(τ_A > η_B)`, in `B` order.
    pub rhs: Vec<f64>,
    pub residual: f64,
}

/// Last-exit decomposition of the probability of visiting `A` before leaving
/// `B ⊇ A`: `τ̄_A` is the first visit time (from 0), `τ_A` the first visit
/// from time 1, and `η_B` the exit time of `B`.
pub fn last_exit_identity(
    g: &WeightedGraph,
    a: &VertexSet,
    b: &VertexSet,
) -> Result<LastExitReport> {
    if !a.is_subset(b) {
        return Err(Error::NotSubset);
    }
    if a.is_empty() {
        return Err(Error::DegenerateSet("empty target"));
    }
    let green = killed_green(g, b)?;
    let h = hit_before_exit(g, b, a)?;

    // P^y(τ_A > η_B): the first step leaves B, or lands in B∖A and then
    // leaves before reaching A.
    let avoid: Vec<f64> = a
        .iter()
        .map(|y| {
            g.neighbors(y)
                .iter()
                .map(|&(v, w)| {
                    let miss = match b.index_of(v) {
                        Some(i) => 1.0 - h[i],
                        None => 1.0,
                    };
                    w / g.omega(y) * miss
                })
                .sum()
        })
        .collect();

    let rhs: Vec<f64> = b
        .iter()
        .map(|x| {
            a.iter()
                .zip(&avoid)
                .map(|(y, e)| green.get(x, y).unwrap() * e)
                .sum()
        })
        .collect();
    let residual = h
        .iter()
        .zip(&rhs)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    Ok(LastExitReport {
        lhs: h,
        rhs,
        residual,
    })
}
