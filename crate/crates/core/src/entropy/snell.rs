use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Markov kernel stored as sparse rows `(target, probability)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StochasticKernel {
    rows: Vec<Vec<(usize, f64)>>,
}

impl StochasticKernel {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        for (s, row) in rows.iter().enumerate() {
            if row
                .iter()
                .any(|&(z, p)| z >= n || !(p >= 0.0) || !p.is_finite())
            {
                return Err(Error::InvalidParameter(format!(
                    "row {s} has an invalid entry"
                )));
            }
            let sum: f64 = row.iter().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidParameter(format!("row {s} sums to {sum}")));
            }
        }
        Ok(StochasticKernel { rows })
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidParameter("kernel must be square".into()));
        }
        let rows = (0..m.nrows())
            .map(|s| {
                (0..m.ncols())
                    .filter(|&z| m[(s, z)] != 0.0)
                    .map(|z| (z, m[(s, z)]))
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }

    /// `p(u,v) = w_uv / ω_u`.
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let rows = (0..g.n())
            .map(|u| {
                g.neighbors(u)
                    .iter()
                    .map(|&(v, w)| (v, w / g.omega(u)))
                    .collect()
            })
            .collect();
        StochasticKernel { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, s: usize) -> &[(usize, f64)] {
        &self.rows[s]
    }

    /// `E[f(X_1) | X_0 = s]`.
    pub fn expect(&self, s: usize, f: &[f64]) -> f64 {
        self.rows[s].iter().map(|&(z, p)| p * f[z]).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (s, row) in self.rows.iter().enumerate() {
            for &(z, p) in row {
                m[(s, z)] += p;
            }
        }
        m
    }
}

fn check_table(kernel: &StochasticKernel, payoff: &[Vec<f64>], reward: &[f64]) -> Result<()> {
    let n = kernel.len();
    if payoff.is_empty() {
        return Err(Error::InvalidParameter(
            "payoff table needs at least time 0".into(),
        ));
    }
    if payoff.iter().any(|row| row.len() != n) || reward.len() != n {
        return Err(Error::InvalidParameter(
            "payoff, reward, and kernel sizes disagree".into(),
        ));
    }
    if payoff
        .iter()
        .flatten()
        .chain(reward)
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidParameter("payoffs must be finite".into()));
    }
    Ok(())
}

/// Value of optimal stopping with terminal payoff `payoff[t][s]` and a running
/// reward `reward[s]` collected at every time strictly before stopping:
/// `V_N = M_N`, `V_t = max(M_t, L + E[V_{t+1}])`.
pub fn backward_induction(
    kernel: &StochasticKernel,
    payoff: &[Vec<f64>],
    reward: &[f64],
) -> Result<Vec<Vec<f64>>> {
    check_table(kernel, payoff, reward)?;
    let horizon = payoff.len() - 1;
    let mut table = vec![Vec::new(); horizon + 1];
    table[horizon] = payoff[horizon].clone();
    for t in (0..horizon).rev() {
        let next = &table[t + 1];
        let row: Vec<f64> = (0..kernel.len())
            .map(|s| payoff[t][s].max(reward[s] + kernel.expect(s, next)))
            .collect();
        table[t] = row;
    }
    Ok(table)
}

/// Smallest supermartingale dominating a Markov payoff process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnellEnvelope {
    pub horizon: usize,
    /// `payoff[t][s] = M_t(s)`.
    pub payoff: Vec<Vec<f64>>,
    /// `table[t][s] = B_t(s)`.
    pub table: Vec<Vec<f64>>,
}

/// Largest violations of the envelope conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeResiduals {
    /// `|B_N − M_N|`.
    pub terminal: f64,
    /// `max(M_t − B_t, 0)`.
    pub majorant: f64,
    /// `max(E[B_{t+1}] − B_t, 0)`.
    pub supermartingale: f64,
}

impl SnellEnvelope {
    pub fn residuals(&self, kernel: &StochasticKernel) -> EnvelopeResiduals {
        let n = self.horizon;
        let terminal = self.table[n]
            .iter()
            .zip(&self.payoff[n])
            .map(|(b, m)| (b - m).abs())
            .fold(0.0, f64::max);
        let mut majorant = 0.0f64;
        let mut supermartingale = 0.0f64;
        for t in 0..=n {
            for s in 0..kernel.len() {
                majorant = majorant.max(self.payoff[t][s] - self.table[t][s]);
                if t < n {
                    supermartingale = supermartingale
                        .max(kernel.expect(s, &self.table[t + 1]) - self.table[t][s]);
                }
            }
        }
        EnvelopeResiduals {
            terminal,
            majorant,
            supermartingale,
        }
    }
}

/// `B_N = M_N`, `B_t = max(M_t, E[B_{t+1} | X_t])`.
pub fn snell_envelope(kernel: &StochasticKernel, payoff: &[Vec<f64>]) -> Result<SnellEnvelope> {
    let zero = vec![0.0; kernel.len()];
    let table = backward_induction(kernel, payoff, &zero)?;
    Ok(SnellEnvelope {
        horizon: payoff.len() - 1,
        payoff: payoff.to_vec(),
        table,
    })
}

/// Markov stopping rule: stop at `(t, s)` when `stop[t][s]`; time `N` always stops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub stop: Vec<Vec<bool>>,
}

/// First time the envelope touches the payoff: stop where `B_t(s) = M_t(s)`.
pub fn optimal_stop_rule(env: &SnellEnvelope) -> StopRule {
    let stop = env
        .table
        .iter()
        .zip(&env.payoff)
        .enumerate()
        .map(|(t, (b, m))| {
            b.iter()
                .zip(m)
                .map(|(b, m)| t == env.horizon || b == m)
                .collect()
        })
        .collect();
    StopRule { stop }
}

/// `E[M_τ]` from `start` under `rule`, by propagating the unstopped mass.
pub fn expected_payoff(
    kernel: &StochasticKernel,
    payoff: &[Vec<f64>],
    rule: &StopRule,
    start: usize,
) -> f64 {
    let n = kernel.len();
    let horizon = payoff.len() - 1;
    let mut mass = vec![0.0; n];
    mass[start] = 1.0;
    let mut value = 0.0;
    for t in 0..=horizon {
        let mut next = vec![0.0; n];
        for s in 0..n {
            if mass[s] == 0.0 {
                continue;
            }
            if t == horizon || rule.stop[t][s] {
                value += mass[s] * payoff[t][s];
            } else {
                for &(z, p) in kernel.row(s) {
                    next[z] += mass[s] * p;
                }
            }
        }
        mass = next;
    }
    value
}

/// Largest `|E[B_{τ∧(k+1)} | X_k = s] − B_{τ∧k}(s)|` over all `(k, s)`: the
/// stopped envelope is a martingale under the optimal rule.
pub fn stopped_martingale_residual(
    kernel: &StochasticKernel,
    env: &SnellEnvelope,
    rule: &StopRule,
) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..env.horizon {
        for s in 0..kernel.len() {
            // Once stopped, the process is frozen and the identity is trivial.
            if !rule.stop[k][s] {
                let ahead = kernel.expect(s, &env.table[k + 1]);
                worst = worst.max((ahead - env.table[k][s]).abs());
            }
        }
    }
    worst
}
