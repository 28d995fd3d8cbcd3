//! Shifts over free groups, the boundary action, Bernoulli and algebraic models.

pub mod algebraic;
pub mod bernoulli;
pub mod snf;

pub use crate::free_group::{boundary_translate, BoundaryPoint, BoundarySet};
pub use algebraic::{algebraic_fixed_points, algebraic_model_witness, periodic_points};
pub use bernoulli::{bernoulli_model, FiniteQuotient};
