//! Exact polyhedral-cone engine for F-nef containment on M̄₀,ₙ.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactla`]: rational matrices, row reduction, span membership.
//! - [`moduli`]: boundary classes, Keel relations, F-nef forms, the basis
//!   `B_n` and quotient coordinates.
//! - [`cone`]: H-represented cones, Minkowski sums with lines and rays,
//!   facet reduction.
//! - [`lp`]: exact simplex for conic membership, Farkas certificates,
//!   containment indices.
//! - [`engine`]: filtrations, greedy enlargement, effective representatives
//!   and end-to-end containment proofs.

pub mod cone;
pub mod engine;
pub mod error;
pub mod exactla;
pub mod lp;
pub mod moduli;

pub use error::{Error, Result};
