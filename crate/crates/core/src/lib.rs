//! Explicit orders of prescribed level in definite rational quaternion algebras.
//!
//! Given a discriminant Δ (squarefree, odd number of primes) and a level N with
//! Δ | N, [`construct::construct_order`] returns a ℤ-basis of an order of reduced
//! discriminant N in an algebra (a, b / ℚ) ramified exactly at the primes of Δ,
//! together with every scalar used to build it. [`verify::verify_order`] checks
//! any lattice independently.

pub mod cli;
pub mod construct;
pub mod error;
pub mod lattice;
pub mod numth;
pub mod quat;
pub mod verify;

pub use construct::{construct_order, CaseTag, ConstructOptions, OrderRecipe, OrderResult};
pub use error::{ConstructError, LatticeError, NumthError, QuatError};
pub use lattice::{hnf, OrderReport, QuatLattice};
pub use quat::{QuatAlgebra, QuatElement};
pub use verify::{sweep, verify_order, SweepReport};
