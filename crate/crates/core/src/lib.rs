//! Tensor higher-degree eigenvalue complementarity problems.
//!
//! Given tensors `A, B, C` of order `m` and dimension `n`, find `λ` and a
//! nonzero `x ≥ 0` with
//!
//! ```text
//! ϱ = (λ^m A + λ B + C) x^{m-1} ≥ 0,   xᵀϱ = 0.
//! ```
//!
//! [`admm`] solves the `C = -I` case through a homogeneous polynomial
//! reformulation, [`spectrum`] enumerates Pareto eigenvalues support by
//! support, and [`model::verify_eigenpair`] checks any candidate pair.

pub mod admm;
pub mod cli;
pub mod document;
pub mod error;
pub mod model;
pub mod reproduce;
pub mod spectrum;
pub mod tensor;

pub use error::{Error, Result};
pub use model::{verify_eigenpair, Cone, Eigenpair, ProblemTriple};
pub use tensor::Tensor;
