//! Exact computations with simply-laced lattice vertex algebras, the principal
//! W-algebra realized as a joint kernel of screening operators, and the affine
//! Brylinski filtration on the dominant weight spaces of the basic representation.

pub mod brylinski;
pub mod cartan;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod linalg;
pub mod rational;
pub mod series;
pub mod twisted;
pub mod verify;
pub mod walg;

pub use error::{Error, Result};
pub use rational::Q;
