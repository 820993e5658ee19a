//! Reference implementations the tests trust more than the main code paths:
//! Monte-Carlo hitting estimates, exhaustive optimal-stopping search,
//! benchmark graph generators, and partition agreement scores.

mod ari;
mod brute;
mod generate;
mod mc;

pub use ari::adjusted_rand_index;
pub use brute::{brute_force_stopping_value, ENUMERATION_CAP};
pub use generate::{generate_sbm, random_connected, SbmGraph, SbmSpec};
pub use mc::mc_hit_probability;
