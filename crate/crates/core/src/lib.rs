//! Exact arithmetic for discrete moment tensors and Ehrhart tensor
//! polynomials of lattice polytopes.

pub mod ehrhart;
pub mod error;
pub mod halfopen;
pub mod json;
pub mod linalg;
pub mod polytope;
pub mod positivity;
pub mod rational;
pub mod tensor;
pub mod triangulation;

pub use error::{Error, Result};
pub use polytope::{convex_hull, EmbeddedPolytope, FacetIneq, LatticeEmbedding, Polytope};
pub use rational::Rational;
pub use tensor::{HrVector, IntPoint, SymTensor, TensorPolynomial};
