//! Finite-dimensional order theory of Hilbert-space contractions.
//!
//! The crate computes defect operators, characteristic functions and the
//! unitary / completely nonunitary split of a contraction, decides the
//! preorders `A ≼ B` (isometric intertwiner) and `A ≺ B` (intertwiner with
//! reducing range) with witnesses or refutation certificates, and checks the
//! surrounding structure theorems (Cantor–Bernstein gluing, singular-value
//! product equalities, truncated unitary dilations) on concrete matrices.
//!
//! Everything here is pure computation: no IO, no global state. The crate is
//! `no_std` (it needs `alloc`); enable the `parallel` feature to spread
//! multi-start searches and grid sampling over a rayon pool. Results do not
//! depend on the scheduling.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub(crate) mod exec;
pub(crate) mod float;

pub mod charfn;
pub mod contraction;
pub mod dilation;
pub mod factorization;
pub mod fixtures;
pub mod linalg;
pub mod order;
pub mod rng;
pub mod singular_values;
pub mod subspace;
pub mod verdict;

pub use crate::error::{Error, Result};
pub use crate::linalg::{ComplexMatrix, Tolerance};
pub use crate::subspace::Subspace;
pub use num_complex::Complex64;
