//! Normed L⁰-modules over finite atomic measure spaces.
//!
//! A module assigns a finite-dimensional normed space to every atom; elements
//! pick one vector per fiber and the pointwise norm is the function of fiber
//! norms. On top of that the crate builds morphisms, Hom and dual modules,
//! pullbacks along atom maps, and direct and inverse limits over finite posets
//! and ℕ-chains with a closed-form tail, together with checks of their
//! universal properties.

pub mod direct;
pub mod error;
pub mod harness;
pub mod hom;
pub mod index;
pub mod inverse;
pub mod linalg;
pub mod measure;
pub mod module;
pub mod norm;
pub mod pullback;
pub mod random;
pub mod system;
pub mod tol;

pub use error::{Error, Result};
