use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph, UNREACHABLE};
use crate::linalg::SparseSpd;

/// `q(i) = P^i[T_U < T_∂B]` on a block `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicField {
    pub domain: VertexSet,
    pub target: VertexSet,
    pub boundary: VertexSet,
    /// Aligned with `domain`.
    pub values: Vec<f64>,
}

impl HarmonicField {
    /// `q(v)`: the solved value on `B`, zero elsewhere (including the boundary).
    pub fn value(&self, v: usize) -> f64 {
        self.domain.index_of(v).map_or(0.0, |i| self.values[i])
    }

    /// Largest `|Σ_j p(i,j)(q(i) − q(j))|` over `i ∈ B∖U`.
    pub fn harmonic_residual(&self, g: &WeightedGraph) -> f64 {
        self.domain
            .iter()
            .filter(|&i| !self.target.contains(i))
            .map(|i| {
                let qi = self.value(i);
                g.neighbors(i)
                    .iter()
                    .map(|&(j, w)| w / g.omega(i) * (qi - self.value(j)))
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Solve the Dirichlet problem `q = 1` on `U`, `q = 0` on the exterior
/// boundary of `B`, and `Σ_j p(i,j)(q(i) − q(j)) = 0` on `B∖U`.
///
/// Multiplying each interior row by `ω_i` gives a symmetric positive-definite
/// system over `B∖U` only. Interior vertices that cannot reach `U` or the
/// boundary never hit `U` and get zero.
pub fn harmonic_hit_probability(
    g: &WeightedGraph,
    b: &VertexSet,
    u: &VertexSet,
) -> Result<HarmonicField> {
    g.check_set(b)?;
    if !u.is_subset(b) {
        return Err(Error::NotSubset);
    }
    let boundary = g.exterior_boundary(b);
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let mut field = HarmonicField {
        domain: b.clone(),
        target: u.clone(),
        boundary,
        values: b
            .iter()
            .map(|v| if u.contains(v) { 1.0 } else { 0.0 })
            .collect(),
    };
    if u.is_empty() {
        return Ok(field);
    }

    let in_b = b.mask(g.n());
    let in_u = u.mask(g.n());
    let stops = (0..g.n()).filter(|&v| in_u[v] || !in_b[v]);
    let reach = g.distances_from_set(stops);
    let interior: VertexSet = b
        .iter()
        .filter(|&v| !in_u[v] && reach[v] != UNREACHABLE)
        .collect();

    let mut system = SparseSpd {
        diag: Vec::with_capacity(interior.len()),
        off: Vec::with_capacity(interior.len()),
    };
    let mut rhs = Vec::with_capacity(interior.len());
    for i in interior.iter() {
        let mut row = Vec::new();
        let mut r = 0.0;
        for &(j, w) in g.neighbors(i) {
            if let Some(k) = interior.index_of(j) {
                row.push((k, -w));
            } else if in_u[j] {
                r += w;
            }
        }
        system.diag.push(g.omega(i));
        system.off.push(row);
        rhs.push(r);
    }
    let solution = system.solve(&rhs)?;
    for (v, q) in interior.iter().zip(solution) {
        let idx = b.index_of(v).unwrap();
        field.values[idx] = q.clamp(0.0, 1.0);
    }
    Ok(field)
}

/// `RA = Σ_{i ∈ B∖U} q(i) / max(1, d_G(i, ∂B))`.
pub fn relative_absorption(
    g: &WeightedGraph,
    b: &VertexSet,
    u: &VertexSet,
    field: &HarmonicField,
) -> f64 {
    let depth = g.distances_from_set(g.exterior_boundary(b).iter());
    b.iter()
        .filter(|&i| !u.contains(i))
        .map(|i| {
            let d = depth[i];
            if d == UNREACHABLE {
                0.0
            } else {
                field.value(i) / d.max(1) as f64
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{mc_hit_probability, random_connected};
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::Rng as _;

    fn path(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn p4_midpoint() {
        let g = path(4);
        let b = VertexSet::new([1, 2]);
        let u = VertexSet::new([1]);
        let q = harmonic_hit_probability(&g, &b, &u).unwrap();
        assert!((q.value(2) - 0.5).abs() < 1e-15);
        assert_eq!(q.value(1), 1.0);
        assert_eq!(q.boundary, VertexSet::new([0, 3]));
        assert!((relative_absorption(&g, &b, &u, &q) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn full_and_empty_targets() {
        let g = path(6);
        let b = VertexSet::new([1, 2, 3]);
        let all = harmonic_hit_probability(&g, &b, &b).unwrap();
        assert!(all.values.iter().all(|&q| q == 1.0));
        let none = harmonic_hit_probability(&g, &b, &VertexSet::empty()).unwrap();
        assert!(none.values.iter().all(|&q| q == 0.0));
        assert_eq!(relative_absorption(&g, &b, &VertexSet::empty(), &none), 0.0);
    }

    #[test]
    fn whole_graph_has_no_boundary() {
        let g = path(3);
        assert_eq!(
            harmonic_hit_probability(&g, &VertexSet::full(3), &VertexSet::new([0])).unwrap_err(),
            Error::EmptyBoundary
        );
    }

    #[test]
    fn ra_is_linear_in_q() {
        let g = path(8);
        let b = VertexSet::new([1, 2, 3, 4, 5]);
        let u = VertexSet::new([3]);
        let q = harmonic_hit_probability(&g, &b, &u).unwrap();
        let mut doubled = q.clone();
        doubled.values.iter_mut().for_each(|v| *v *= 2.0);
        let ra = relative_absorption(&g, &b, &u, &q);
        assert!((relative_absorption(&g, &b, &u, &doubled) - 2.0 * ra).abs() < 1e-14);
    }

    #[test]
    fn agrees_with_monte_carlo() {
        for seed in 0..5u64 {
            let g = random_connected(30, 0.08, true, seed);
            let mut rng = crate::rng::stream(seed, &[77]);
            let b: VertexSet = sample(&mut rng, 30, 12).into_iter().collect();
            let u: VertexSet = b.iter().take(3).collect();
            let q = harmonic_hit_probability(&g, &b, &u).unwrap();
            let start = b.as_slice()[rng.gen_range(3..12)];
            let est = mc_hit_probability(&g, &b, &u, start, 10_000, seed).unwrap();
            let tol = 4.0 * est.stderr.max(1e-3);
            assert!(
                (q.value(start) - est.mean).abs() <= tol,
                "{} vs {:?}",
                q.value(start),
                est
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn maximum_principle_and_monotonicity(seed in 0u64..10_000, n in 6usize..40) {
            let g = random_connected(n, 0.1, true, seed);
            let mut rng = crate::rng::stream(seed, &[1]);
            let size = rng.gen_range(2..n);
            let b: VertexSet = sample(&mut rng, n, size).into_iter().collect();
            let k = rng.gen_range(1..=b.len());
            let big: VertexSet = b.iter().take(k).collect();
            let small: VertexSet = big.iter().take(rng.gen_range(0..=k)).collect();
            let q_big = harmonic_hit_probability(&g, &b, &big).unwrap();
            let q_small = harmonic_hit_probability(&g, &b, &small).unwrap();
            prop_assert!(q_big.harmonic_residual(&g) <= 1e-10);
            prop_assert!(q_small.harmonic_residual(&g) <= 1e-10);
            for v in b.iter() {
                prop_assert!((0.0..=1.0).contains(&q_big.value(v)));
                prop_assert!(q_big.value(v) + 1e-12 >= q_small.value(v));
            }
        }
    }
}
