//! β-entropy clustering: ball coverings, finite-horizon optimal stopping
//! values, Snell envelopes, and the ranking of random sets by entropy.

mod beta;
mod cover;
mod snell;
mod value;

pub use beta::{
    beta_entropy, cluster_entropy, entropy_term, pointwise_beta_entropy, random_set, EntropyParams,
    EntropyRun, RewardScope, ScoredSet,
};
pub use cover::{ball_cover, Ball, Covering};
pub use snell::{
    backward_induction, expected_payoff, optimal_stop_rule, snell_envelope,
    stopped_martingale_residual, EnvelopeResiduals, SnellEnvelope, StochasticKernel, StopRule,
};
pub use value::{homogeneous_value, value_function, value_function_augmented};
