//! Solar systems: concentric hop-distance rings around a center, split into
//! angular blocks, with one random candidate set per block filtered by how
//! strongly the walk is absorbed into it.

mod candidate;
mod embed;
mod harmonic;
mod system;

pub use candidate::{
    find_safe_sets, find_safe_sets_with, sample_candidate_set, CandidateDraw, CandidateSet,
    SafeSetParams, DEFAULT_FRACTION, DEFAULT_MAX_TRIES,
};
pub use embed::{
    polar_embed, polar_from_coordinates, AngularEmbedding, PolarEmbedding, SpectralEmbedding,
};
pub use harmonic::{harmonic_hit_probability, relative_absorption, HarmonicField};
pub use system::{build_solar_system, build_solar_system_within, Ring, SolarSystem, RING_COUNT};
