//! Paradoxical decompositions, invariant measures and equidecompositions
//! over bounded-resolution clopen contexts.

pub mod context;
pub mod decide;
pub mod equidecompose;
pub mod measure;
pub mod models;

pub use context::{ActionContext, ContextAtom, ContextCaps};
pub use decide::{
    decide_paradoxical, invariant_measure_lp, verify_certificate, verify_measure, InvariantMeasureCertificate,
    ParadoxCertificate, Piece,
};
pub use equidecompose::{equidecompose, verify_equidecomposition, Equidecomposition, LabeledSet, MatchedPiece};
pub use measure::{block_masses, measure_to_model, JoinAtom, MeasureModel, MeasuredJoin};
pub use models::{affine_lift, barycentre, fixed_point_model, FixedPointModel, LiftedWitness};
