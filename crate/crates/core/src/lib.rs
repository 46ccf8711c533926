//! Reflexive polytopes, complete toric threefolds and their toric minimal
//! model program.

pub mod error;
pub mod fan;
pub mod geometry;
pub mod lattice;
pub mod mmp;
pub mod polytope;
pub mod verify;

pub use error::{Error, Result};
pub use fan::{face_fan, Cone, Fan};
pub use lattice::{IntegerMatrix, LatticeVector};
pub use polytope::{LatticePolytope, ReflexivePolytope};
