//! Orlicz and M-addition of convex bodies in the plane and in space, the
//! associated mixed volumes and dual functionals, and validators for the
//! Brunn-Minkowski-type inequalities they satisfy.

pub mod bodies;
pub mod error;
pub mod functionals;
pub mod additions;
pub mod phi;
pub mod geom;
pub mod inequalities;
pub mod oracle;
pub mod tol;

pub use error::{Error, Result};
