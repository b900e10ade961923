//! Exact geometry, substitution and invariants of the pinwheel tiling.

pub mod context;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod frequency;
pub mod kernel;
pub mod ktheory;
pub mod lattice;
pub mod motion;
pub mod par;
pub mod patch;
pub mod substitution;
pub mod tile;
pub mod verify;
pub mod winding;

pub use context::{CollarConvention, Context};
pub use error::{Error, Result};
pub use field::ExactScalar;
pub use motion::RigidMotion;
pub use substitution::{inflate, subdivision_rule, supertile, Supertile};
pub use tile::{Chirality, Tile};
