//! Planarity of signed Gauss diagrams.
//!
//! Every crossing becomes a 4-valent vertex whose cyclic order of incident
//! arc-ends is forced by the crossing sign; the circle arcs between
//! consecutive endpoints are the edges. Tracing the faces of this rotation
//! system gives the genus of the surface the diagram lives on. A diagram is
//! realizable in the plane iff that genus is zero.

use std::collections::HashMap;

use thiserror::Error;

use crate::gauss::{ArrowId, GaussDiagram, Role, Sign};

const OVER_OUT: usize = 0;
const UNDER_OUT: usize = 1;
const OVER_IN: usize = 2;
const UNDER_IN: usize = 3;

/// Half-edges with their edge pairing and counter-clockwise rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialMap {
    /// `alpha[h]` is the other end of the edge through half-edge `h`.
    pub alpha: Vec<usize>,
    /// `sigma[h]` is the next half-edge counter-clockwise around h's vertex.
    pub sigma: Vec<usize>,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizabilityError {
    #[error("the empty diagram has no crossings to build a map from")]
    Empty,
}

fn half_edge(vertex: usize, slot: usize) -> usize {
    4 * vertex + slot
}

pub fn build_map(d: &GaussDiagram) -> Result<CombinatorialMap, RealizabilityError> {
    if d.is_empty() {
        return Err(RealizabilityError::Empty);
    }
    let index: HashMap<ArrowId, usize> = d.arrows().enumerate().map(|(k, a)| (a, k)).collect();
    let n = index.len();
    let mut alpha = vec![usize::MAX; 4 * n];
    let word = d.word();
    let len = word.len();
    for p in 0..len {
        let from = word[p];
        let to = word[(p + 1) % len];
        let out = half_edge(index[&from.arrow], if from.role == Role::Tail { OVER_OUT } else { UNDER_OUT });
        let inn = half_edge(index[&to.arrow], if to.role == Role::Tail { OVER_IN } else { UNDER_IN });
        alpha[out] = inn;
        alpha[inn] = out;
    }
    let mut sigma = vec![0; 4 * n];
    for (a, v) in &index {
        // Counter-clockwise around a positive crossing: over-out, under-out,
        // over-in, under-in. A negative crossing is its mirror image.
        let order = match d.sign(*a).unwrap() {
            Sign::Plus => [OVER_OUT, UNDER_OUT, OVER_IN, UNDER_IN],
            Sign::Minus => [OVER_OUT, UNDER_IN, OVER_IN, UNDER_OUT],
        };
        for k in 0..4 {
            sigma[half_edge(*v, order[k])] = half_edge(*v, order[(k + 1) % 4]);
        }
    }
    Ok(CombinatorialMap { alpha, sigma, vertices: n, edges: len })
}

impl CombinatorialMap {
    /// Number of orbits of `sigma ∘ alpha`.
    pub fn faces(&self) -> usize {
        let mut seen = vec![false; self.alpha.len()];
        let mut faces = 0;
        for start in 0..self.alpha.len() {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                h = self.sigma[self.alpha[h]];
            }
        }
        faces
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces() as i64
    }
}

/// Genus of the surface carrying the diagram; 0 for the empty diagram.
pub fn genus(d: &GaussDiagram) -> usize {
    match build_map(d) {
        Ok(map) => {
            let chi = map.euler_characteristic();
            debug_assert!(chi <= 2 && (2 - chi) % 2 == 0);
            ((2 - chi) / 2) as usize
        }
        Err(RealizabilityError::Empty) => 0,
    }
}

pub fn is_realizable(d: &GaussDiagram) -> bool {
    genus(d) == 0
}
