use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{WeightedGraph, UNREACHABLE};

const ZERO: f64 = 1e-12;

/// Planar coordinates whose polar angle orders vertices around a solar system.
pub trait AngularEmbedding {
    fn coordinates(&self, g: &WeightedGraph) -> Vec<[f64; 2]>;
}

/// Second and third eigenvectors of the normalized Laplacian
/// `I − D^{-1/2} W D^{-1/2}`, each signed so its first nonzero entry is positive.
#[derive(Clone, Copy, Debug, Default)]
pub struct SpectralEmbedding;

impl AngularEmbedding for SpectralEmbedding {
    fn coordinates(&self, g: &WeightedGraph) -> Vec<[f64; 2]> {
        let n = g.n();
        let mut s = DMatrix::zeros(n, n);
        for u in 0..n {
            for &(v, w) in g.neighbors(u) {
                s[(u, v)] = w / (g.omega(u) * g.omega(v)).sqrt();
            }
        }
        // Largest eigenvalues of D^{-1/2} W D^{-1/2} are the smallest of the Laplacian.
        let eig = SymmetricEigen::new(s);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .total_cmp(&eig.eigenvalues[a])
                .then(a.cmp(&b))
        });
        let column = |rank: usize| -> Vec<f64> {
            match order.get(rank) {
                Some(&c) => {
                    let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
                    if let Some(first) = v.iter().copied().find(|x| x.abs() > ZERO) {
                        if first < 0.0 {
                            v.iter_mut().for_each(|x| *x = -*x);
                        }
                    }
                    v
                }
                None => vec![0.0; n],
            }
        };
        let x = column(1);
        let y = column(2);
        x.into_iter().zip(y).map(|(a, b)| [a, b]).collect()
    }
}

/// Hop radius and angle of every vertex relative to a center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarEmbedding {
    pub center: usize,
    /// `d_G(center, v)`, [`UNREACHABLE`] off the center's component.
    pub radius: Vec<usize>,
    /// Polar angle of the planar coordinates, in `[0, 2π)`; 0 at the origin.
    pub angle: Vec<f64>,
}

pub fn polar_from_coordinates(
    g: &WeightedGraph,
    center: usize,
    coords: &[[f64; 2]],
) -> Result<PolarEmbedding> {
    g.check_vertex(center)?;
    let angle = coords
        .iter()
        .map(|&[x, y]| {
            if x.abs() <= ZERO && y.abs() <= ZERO {
                0.0
            } else {
                y.atan2(x).rem_euclid(TAU) % TAU
            }
        })
        .collect();
    Ok(PolarEmbedding {
        center,
        radius: g.bfs_distances(center),
        angle,
    })
}

/// Spectral polar embedding around `center`; the graph must be connected.
pub fn polar_embed(g: &WeightedGraph, center: usize) -> Result<PolarEmbedding> {
    g.check_vertex(center)?;
    let emb = polar_from_coordinates(g, center, &SpectralEmbedding.coordinates(g))?;
    if emb.radius.contains(&UNREACHABLE) {
        return Err(Error::Disconnected);
    }
    Ok(emb)
}
