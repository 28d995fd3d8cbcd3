pub mod action;
pub mod error;
pub mod free_group;
pub mod linalg;
pub mod lp;
pub mod matrix;
pub mod paradox;
pub mod rational;
pub mod symbolic;
pub mod system;
pub mod witness;
pub mod zsystems;

pub use action::{validate_action_description, FiniteAction};
pub use error::{Error, Result};
pub use rational::Rational;
pub use system::{Point, Resolution, SystemDescriptor};
pub use witness::{check_witness, Witness};
