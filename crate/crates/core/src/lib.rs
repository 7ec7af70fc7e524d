//! Gauss diagrams of knot diagrams, the refined classification of
//! Reidemeister moves, arrow-diagram invariants and the rewriting of
//! arbitrary moves into a six-class generating set.

pub mod corpus;
pub mod demo;
pub mod gauss;
pub mod invariants;
pub mod moves;
pub mod realizability;
pub mod rewriter;
pub mod verify;

pub use gauss::{
    canonical_form, connected_sum, interlaced, mirror, parse_gauss_code, restrict_to_subset, reverse_orientation,
    serialize, writhe, ArrowId, CanonicalForm, Endpoint, GaussDiagram, GaussError, Role, Sign,
};
pub use moves::{
    apply_move, arnold_q, classify, enumerate_insertion_sites, enumerate_r3_sites, enumerate_removal_sites,
    omega3_context, sum_states, DiagramState, DirectedMoveClass, MoveClass, MoveError, MoveSite, Omega3Context,
};
