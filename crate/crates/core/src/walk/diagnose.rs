//! Runs every walk identity and bound on one graph and collects a
//! pass/fail table.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::rng;
use crate::walk::{duality, green, mixing};

pub const GREEN_TOL: f64 = 1e-10;
pub const LAST_EXIT_TOL: f64 = 1e-10;
pub const SERIES_TOL: f64 = 1e-8;
pub const DUALITY_TOL: f64 = 1e-8;
pub const KERNEL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseConfig {
    /// Random `(A, c)` and `(A ⊆ B)` draws for the occupation identities.
    pub instances: usize,
    /// Largest `n` in the Chebyshev duality check.
    pub duality_max_n: usize,
    /// Largest `t` in the Carne–Varopoulos sweep.
    pub carne_t_max: usize,
    /// Largest `n` in the Hoeffding sweep.
    pub hoeffding_max_n: usize,
    /// ε for the mixing time.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            instances: 20,
            duality_max_n: 8,
            carne_t_max: 30,
            hoeffding_max_n: 60,
            epsilon: 0.25,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub instances: usize,
    /// Largest residual, or largest bound excess for inequality checks.
    pub max_residual: f64,
    pub pass: bool,
}

impl IdentityResult {
    fn tolerance(instances: usize, max_residual: f64, tol: f64) -> Self {
        IdentityResult {
            instances,
            max_residual,
            pass: max_residual <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseReport {
    pub identities: BTreeMap<String, IdentityResult>,
    pub statistics: mixing::WalkStatistics,
}

impl DiagnoseReport {
    pub fn all_pass(&self) -> bool {
        self.identities.values().all(|r| r.pass)
    }
}

/// Proper nonempty random subset of `pool`.
fn random_proper_subset(pool: &[usize], rng: &mut rng::Rng) -> VertexSet {
    let size = rng.gen_range(1..pool.len());
    sample(rng, pool.len(), size)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

pub fn diagnose(g: &WeightedGraph, cfg: &DiagnoseConfig) -> Result<DiagnoseReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let mut rng = rng::stream(cfg.seed, &[0xd1a6]);
    let mut out = BTreeMap::new();

    let kernel = g.transition_kernel();
    let defect = kernel
        .row_sum_defect()
        .max(kernel.detailed_balance_defect(g.omegas()));
    out.insert(
        "kernel".to_string(),
        IdentityResult::tolerance(1, defect, KERNEL_TOL),
    );

    let mut green_worst: f64 = 0.0;
    let mut series_worst: f64 = 0.0;
    let mut exit_worst: f64 = 0.0;
    for _ in 0..cfg.instances {
        let a = random_proper_subset(&all, &mut rng);
        let c = a.as_slice()[rng.gen_range(0..a.len())];
        green_worst = green_worst.max(green::green_return_identity(g, &a, c)?.residual);

        let inv = green::killed_green(g, &a)?;
        let series = green::killed_green_series(g, &a, series_terms(g, &a))?;
        series_worst = series_worst.max(crate::linalg::max_abs_diff(&inv.matrix, &series));

        let b = random_proper_subset(&all, &mut rng);
        let inner = if b.len() == 1 {
            b.clone()
        } else {
            let size = rng.gen_range(1..=b.len());
            sample(&mut rng, b.len(), size)
                .into_iter()
                .map(|i| b.as_slice()[i])
                .collect()
        };
        exit_worst = exit_worst.max(green::last_exit_identity(g, &inner, &b)?.residual);
    }
    out.insert(
        "green_return".into(),
        IdentityResult::tolerance(cfg.instances, green_worst, GREEN_TOL),
    );
    out.insert(
        "green_series".into(),
        IdentityResult::tolerance(cfg.instances, series_worst, SERIES_TOL),
    );
    out.insert(
        "last_exit".into(),
        IdentityResult::tolerance(cfg.instances, exit_worst, LAST_EXIT_TOL),
    );

    let duality_worst = (0..=cfg.duality_max_n)
        .map(|k| duality::verify_duality(&kernel, k))
        .fold(0.0, f64::max);
    out.insert(
        "duality".into(),
        IdentityResult::tolerance(cfg.duality_max_n + 1, duality_worst, DUALITY_TOL),
    );

    let carne = duality::carne_check(g, cfg.carne_t_max)?;
    out.insert("carne_varopoulos".into(), bound_result(&carne));
    let hoeffding = duality::hoeffding_check(cfg.hoeffding_max_n, &[0.1, 0.25, 0.5, 0.75, 0.9]);
    out.insert("hoeffding".into(), bound_result(&hoeffding));

    let stats = mixing::walk_statistics(g, cfg.epsilon)?;
    out.insert("hitting_bound".into(), check_result(&stats.hitting_bound));
    if let Some(profile) = &stats.profile_bound {
        out.insert("conductance_profile_bound".into(), check_result(profile));
    }
    Ok(DiagnoseReport {
        identities: out,
        statistics: stats,
    })
}

/// Enough series terms for the tail `‖Q‖^N` to drop below 1e-12.
fn series_terms(g: &WeightedGraph, a: &VertexSet) -> usize {
    let q = green::restricted_kernel(g, a);
    let q2 = &q * &q;
    let q4 = &q2 * &q2;
    // Row sums of Q^4 bound the four-step survival probability.
    let rate = q4
        .row_iter()
        .map(|r| r.sum())
        .fold(0.0, f64::max)
        .max(1e-300);
    let blocks = if rate < 1.0 {
        (1e-13f64).ln() / rate.ln()
    } else {
        1e6
    };
    ((4.0 * blocks).ceil() as usize + 8).min(2_000_000)
}

fn bound_result(sweep: &duality::BoundSweep) -> IdentityResult {
    IdentityResult {
        instances: sweep.cases,
        max_residual: (-sweep.min_slack).max(0.0),
        pass: sweep.violations == 0,
    }
}

fn check_result(check: &mixing::BoundCheck) -> IdentityResult {
    IdentityResult {
        instances: 1,
        max_residual: (check.value - check.bound).max(0.0),
        pass: check.satisfied,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_passes_everything() {
        let g = WeightedGraph::parse_edge_list("0 1\n1 2\n2 0").unwrap();
        let report = diagnose(&g, &DiagnoseConfig::default()).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.statistics.mixing_time, Some(2));
        assert!(report.identities.contains_key("conductance_profile_bound"));
    }

    #[test]
    fn deterministic_report() {
        let g = WeightedGraph::parse_edge_list("0 1\n1 2 2\n2 3\n3 0\n1 3 0.5").unwrap();
        let cfg = DiagnoseConfig {
            seed: 3,
            ..Default::default()
        };
        assert_eq!(diagnose(&g, &cfg).unwrap(), diagnose(&g, &cfg).unwrap());
    }
}
