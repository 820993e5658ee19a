use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest `|states|·N` the exhaustive search accepts.
pub const ENUMERATION_CAP: usize = 20;

/// Exact optimum of `E[Σ_{t<τ} L(X_t) + M_τ(X_τ)]` over every Markov
/// stopping rule, by enumeration.
///
/// A rule marks each `(t, state)` with `t < N` as stop or continue; time `N`
/// always stops. `payoff[t][s]` is `M_t(s)` for `t = 0..=N`.
pub fn brute_force_stopping_value(
    kernel: &DMatrix<f64>,
    payoff: &[Vec<f64>],
    reward: &[f64],
    start: usize,
) -> Result<f64> {
    let states = kernel.nrows();
    if payoff.is_empty() {
        return Err(Error::InvalidParameter(
            "payoff table needs at least time 0".into(),
        ));
    }
    if payoff.iter().any(|row| row.len() != states) || reward.len() != states || start >= states {
        return Err(Error::InvalidParameter(
            "payoff, reward, and kernel sizes disagree".into(),
        ));
    }
    let horizon = payoff.len() - 1;
    let bits = states * horizon;
    if bits > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            bits,
            cap: ENUMERATION_CAP,
        });
    }

    let mut best = f64::NEG_INFINITY;
    let mut mass = vec![0.0; states];
    let mut next = vec![0.0; states];
    for rule in 0u64..(1u64 << bits) {
        mass.iter_mut().for_each(|m| *m = 0.0);
        mass[start] = 1.0;
        let mut value = 0.0;
        for t in 0..horizon {
            for s in 0..states {
                if mass[s] == 0.0 {
                    continue;
                }
                if rule & (1 << (t * states + s)) != 0 {
                    value += mass[s] * payoff[t][s];
                    mass[s] = 0.0;
                } else {
                    value += mass[s] * reward[s];
                }
            }
            next.iter_mut().for_each(|m| *m = 0.0);
            for s in 0..states {
                if mass[s] == 0.0 {
                    continue;
                }
                for z in 0..states {
                    next[z] += mass[s] * kernel[(s, z)];
                }
            }
            std::mem::swap(&mut mass, &mut next);
        }
        value += mass
            .iter()
            .zip(&payoff[horizon])
            .map(|(m, p)| m * p)
            .sum::<f64>();
        best = best.max(value);
    }
    Ok(best)
}
