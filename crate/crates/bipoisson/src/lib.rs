//! Exact construction and symbolic certification of a compatible pair of
//! Poisson brackets — one linear (Lie–Poisson), one quadratic — on the dual
//! of `sl(N)` extended by one auxiliary coordinate `S0`.
//!
//! The quadratic bracket is parametrised by a pair of four-index tensors
//! `(c, b)` over `sl(N) ⊗ sl(N)` (`c` skew, `b` symmetric, both with
//! vanishing partial traces) subject to a single quartic/linear tensor
//! equation; [`tensor::fp4_residual`] materialises that equation's residual.
//! [`brackets`] builds the bracket tables from a valid pair, [`verify`]
//! certifies the claimed identities (Jacobi, pencil compatibility, trace
//! Casimir, `S0`-flow, Schouten decomposition) by exhaustive symbolic
//! computation over coordinate tuples, and [`sl3`] ships a hard-coded
//! catalog of `sl(3)` solutions, including two one-parameter families and a
//! two-parameter family with exact polynomial entries.
//!
//! All arithmetic is exact: coefficients are arbitrary-precision rationals
//! and every claimed identity is checked as literal cancellation to the zero
//! polynomial, never numerically.

pub mod brackets;
pub mod io;
pub mod poly;
pub mod report;
pub mod sl3;
pub mod tensor;
pub mod verify;

pub use poly::{Polynomial, Rational, VarId};
pub use report::Report;
